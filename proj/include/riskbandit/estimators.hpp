#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace riskbandit {

// Sufficient statistics for one arm: every reward seen, kept sorted, plus
// Welford accumulators for mean and variance.
class ArmStats {
public:
    ArmStats() = default;

    // Throws ValidationError unless reward lies in [0, 1].
    void update(double reward);

    std::size_t count() const noexcept { return sorted_.size(); }
    std::span<const double> rewards_sorted() const noexcept { return sorted_; }
    double running_sum() const noexcept { return sum_; }
    double running_sq_dev() const noexcept { return sq_dev_; }

    // All of the following throw UndefinedStatistic when count() == 0.
    double mean() const;
    // Population variance about the final mean.
    double variance() const;
    double min() const;
    // Average of the tail_count(alpha, n) smallest rewards.
    double cvar(double alpha) const;
    // variance - rho * mean; lower is better.
    double mv_value(double rho) const;

private:
    void require_nonempty() const;

    std::vector<double> sorted_;
    double sum_ = 0.0;
    double welford_mean_ = 0.0;
    double sq_dev_ = 0.0;
};

// Free-function spellings used by the policies.
inline double empirical_mean(const ArmStats& s) { return s.mean(); }
inline double empirical_variance(const ArmStats& s) { return s.variance(); }
inline double empirical_min(const ArmStats& s) { return s.min(); }
inline double empirical_cvar(const ArmStats& s, double alpha) { return s.cvar(alpha); }
inline double mv_value(const ArmStats& s, double rho) { return s.mv_value(rho); }

}  // namespace riskbandit
