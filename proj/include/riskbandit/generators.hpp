#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "riskbandit/distributions.hpp"
#include "riskbandit/rng.hpp"

namespace riskbandit {

// K arms with their analytic means and essential infima computed once at
// construction. Immutable afterwards.
class BanditProblem {
public:
    // Validates every arm; throws ConfigError when `arms` is empty.
    explicit BanditProblem(std::vector<ArmSpec> arms);

    std::size_t size() const noexcept { return arms_.size(); }
    std::span<const ArmSpec> arms() const noexcept { return arms_; }
    const ArmSpec& arm(std::size_t i) const { return arms_.at(i); }

    std::span<const double> means() const noexcept { return means_; }
    std::span<const double> infima() const noexcept { return infima_; }
    std::span<const double> margins_mean() const noexcept { return margins_mean_; }
    std::span<const double> margins_min() const noexcept { return margins_min_; }

    std::size_t best_mean_arm() const noexcept { return best_mean_arm_; }
    std::size_t best_min_arm() const noexcept { return best_min_arm_; }
    double best_mean() const noexcept { return means_[best_mean_arm_]; }

    // Min over arms of the per-arm lower-bound constant; absent unless every
    // arm has one.
    std::optional<double> lower_bound_A() const noexcept { return lower_bound_A_; }

private:
    std::vector<ArmSpec> arms_;
    std::vector<double> means_;
    std::vector<double> infima_;
    std::vector<double> margins_mean_;
    std::vector<double> margins_min_;
    std::size_t best_mean_arm_ = 0;
    std::size_t best_min_arm_ = 0;
    std::optional<double> lower_bound_A_;
};

struct ProofOfConceptParams {
    std::size_t K = 20;
    double mu_star = 0.5;
    double a_star = 0.499;
    // Not published with the original experiment; chosen so every support
    // stays inside [0, 1] for K = 20.
    double delta_max = 0.05;
    double r_max = 0.4;
};

// Uniform segments with means decreasing and radii increasing affinely in
// the arm index: arm 0 is U([a*, 2 mu* - a*]), the last arm has mean
// mu* - delta_max and radius (mu* - a*) + r_max.
BanditProblem gen_proof_of_concept(const ProofOfConceptParams& params);

// Random truncated-Gaussian mixtures: floor ~ U[0, 0.05], 1 to 4 components
// with means ~ U[0, 1], stddevs ~ U[0.12, 0.5], weights uniform then
// normalized.
BanditProblem gen_mixture(std::size_t K, Rng& rng);

struct MatrixOptions {
    // Min-max rescale all values jointly into [0, 1] before building arms.
    bool rescale = false;
};

// One empirical-resample arm per row.
BanditProblem gen_from_matrix(std::vector<std::vector<double>> rows, MatrixOptions options = {});

// Reads one row per line, comma-separated reals, rows may differ in length.
// Blank lines and lines starting with '#' are skipped.
std::vector<std::vector<double>> read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path,
                      const std::vector<std::vector<double>>& rows);

// Jointly min-max rescales into [0, 1]; a constant matrix maps to 0.5.
void rescale_min_max(std::vector<std::vector<double>>& rows);

struct BatteryModel {
    std::size_t steps = 48;
    double capacity = 1.0;
    // Demand above this level triggers discharge.
    double threshold = 0.35;
    // Energy bought back into the battery per quiet step.
    double recharge_rate = 0.05;
    double recharge_efficiency = 0.9;
    // Surcharge on the largest single-step purchase.
    double peak_penalty = 2.0;
    // Multiplies the whole demand profile; 0 gives an all-zero process.
    double demand_scale = 1.0;
    double noise = 0.3;
    double spike_probability = 0.05;
    double spike_size = 0.5;
};

// Reward matrix (n_arms rows x n_realizations columns) from simulated
// battery dispatch. Arm k discharges a fraction (k + 1) / n_arms of the
// stored energy whenever demand exceeds the threshold; rewards are negated
// costs, jointly rescaled into [0, 1]. See docs/battery_simulator.md.
std::vector<std::vector<double>> gen_battery_synthetic(std::size_t n_arms,
                                                       std::size_t n_realizations, Rng& demand_rng,
                                                       const BatteryModel& model = {});

}  // namespace riskbandit
