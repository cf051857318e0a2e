#include "riskbandit/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace riskbandit {

std::size_t snapped_ceil_at_least_one(double x) {
    if (!(x > 0.0)) return 1;
    const double nearest = std::round(x);
    const double c = std::abs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::ceil(x);
    return std::max<std::size_t>(1, static_cast<std::size_t>(c));
}

std::size_t tail_count(double alpha, std::size_t n) {
    if (n == 0) return 0;
    return std::min(n, snapped_ceil_at_least_one(alpha * static_cast<double>(n)));
}

}  // namespace riskbandit
