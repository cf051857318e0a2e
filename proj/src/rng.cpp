#include "riskbandit/rng.hpp"

#include <cmath>
#include <numbers>

namespace riskbandit {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1) return 0;
    for (;;) {
        const auto x = engine_();
        const auto m = static_cast<unsigned __int128>(x) * n;
        const auto low = static_cast<std::uint64_t>(m);
        if (low >= n) return static_cast<std::uint64_t>(m >> 64);
        const std::uint64_t threshold = (0 - n) % n;
        if (low >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
}

double Rng::normal(double mean, double stddev) {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ mix64(a + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ mix64(b + 0x8cb92ba72f3d8dd7ULL));
    return h;
}

}  // namespace riskbandit
