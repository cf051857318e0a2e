#include "riskbandit/estimators.hpp"

#include <algorithm>
#include <string>

#include "riskbandit/error.hpp"
#include "riskbandit/numeric.hpp"

namespace riskbandit {

void ArmStats::update(double reward) {
    if (!(reward >= 0.0 && reward <= 1.0)) {
        throw ValidationError("reward " + std::to_string(reward) + " outside [0, 1]");
    }
    sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), reward), reward);
    sum_ += reward;
    const double n = static_cast<double>(sorted_.size());
    const double delta = reward - welford_mean_;
    welford_mean_ += delta / n;
    sq_dev_ += delta * (reward - welford_mean_);
}

void ArmStats::require_nonempty() const {
    if (sorted_.empty()) throw UndefinedStatistic("statistic of an arm with no rewards");
}

double ArmStats::mean() const {
    require_nonempty();
    return sum_ / static_cast<double>(sorted_.size());
}

double ArmStats::variance() const {
    require_nonempty();
    return std::max(0.0, sq_dev_ / static_cast<double>(sorted_.size()));
}

double ArmStats::min() const {
    require_nonempty();
    return sorted_.front();
}

double ArmStats::cvar(double alpha) const {
    require_nonempty();
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ValidationError("risk level alpha must lie in (0, 1]");
    }
    const std::size_t n = tail_count(alpha, sorted_.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += sorted_[i];
    return sum / static_cast<double>(n);
}

double ArmStats::mv_value(double rho) const { return variance() - rho * mean(); }

}  // namespace riskbandit
