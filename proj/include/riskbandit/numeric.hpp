#pragma once

#include <cstddef>

namespace riskbandit {

// max(1, ceil(alpha * n)), clamped to n.
//
// alpha * n is snapped to the nearest integer when it lies within 1e-9
// (relative) of one, so that e.g. 0.1 * 30 counts 3 rewards rather than 4
// after binary rounding of 0.1.
std::size_t tail_count(double alpha, std::size_t n);

// ceil(x) with the same snapping as tail_count, floored at 1.
std::size_t snapped_ceil_at_least_one(double x);

}  // namespace riskbandit
