#pragma once

#include <cstdint>
#include <random>

namespace riskbandit {

// Deterministic random stream backed by std::mt19937_64.
//
// Only the raw 64-bit engine output is used; uniform and normal variates are
// derived here rather than through <random> distributions, whose algorithms
// are implementation-defined. This keeps sample streams bit-identical across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n);

    // Box-Muller, one variate per call (the partner variate is discarded so
    // the stream position does not depend on call history).
    double normal(double mean, double stddev);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Child seed for stream (a, b) under `master`. Each coordinate is folded in
// through its own mixing round, so (master, a, b) tuples that differ in any
// coordinate give unrelated seeds and adding runs never shifts existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept;

}  // namespace riskbandit
