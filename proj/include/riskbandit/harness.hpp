#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "riskbandit/generators.hpp"
#include "riskbandit/policies.hpp"

namespace riskbandit {

struct RunConfig {
    std::shared_ptr<const BanditProblem> problem;
    PolicyConfig policy = MinConfig{};
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
    std::size_t n_runs = 1;
    bool random_ties = false;
};

// Throws ValidationError/ConfigError for horizon < K, n_runs == 0, fewer
// than two arms, or policy parameters out of range.
void validate(const RunConfig& cfg);

// Trajectory of one episode. Index t - 1 holds step t.
struct RegretLedger {
    std::vector<std::uint32_t> arms;
    std::vector<double> rewards;
    // t * mu* - sum_k n_k mu_k
    std::vector<double> theoretical;
    // t * mu* - sum_k n_k mu_hat_k; arms never pulled contribute 0
    std::vector<double> empirical;
    std::vector<std::size_t> pulls;

    std::size_t horizon() const noexcept { return arms.size(); }
};

// Reward stream of arm `arm` in run `run_index`. Streams are independent of
// the policy, so policies sharing a seed see the same reward sequences.
std::uint64_t arm_stream_seed(std::uint64_t seed, std::size_t run_index, std::size_t arm);
std::uint64_t tie_stream_seed(std::uint64_t seed, std::size_t run_index);

RegretLedger run_episode(const RunConfig& cfg, std::size_t run_index);

// Pointwise summary across ledgers. std is the population standard
// deviation of the theoretical regret.
struct RegretCurve {
    std::vector<double> mean_theoretical;
    std::vector<double> mean_empirical;
    std::vector<double> std_theoretical;

    std::size_t size() const noexcept { return mean_theoretical.size(); }
};

// Streaming fold over ledgers of equal horizon. Folding the same ledgers in
// the same order gives bit-identical results.
class LedgerAccumulator {
public:
    void add(const RegretLedger& ledger);

    std::size_t count() const noexcept { return count_; }
    std::size_t horizon() const noexcept { return sum_theoretical_.size(); }

    RegretCurve curve() const;
    // Mean reward per step, sorted increasing.
    std::vector<double> sorted_mean_rewards() const;

private:
    std::size_t count_ = 0;
    std::vector<double> sum_theoretical_;
    std::vector<double> sum_sq_theoretical_;
    std::vector<double> sum_empirical_;
    std::vector<double> sum_rewards_;
};

// Throws ValidationError on an empty list or mismatched horizons.
RegretCurve aggregate_regret(std::span<const RegretLedger> ledgers);
std::vector<double> sorted_reward_cdf(std::span<const RegretLedger> ledgers);
std::vector<double> sorted_final_regret(std::vector<double> per_instance_regrets);

// Runs fn(0) ... fn(n - 1) on up to `threads` workers. Rethrows the
// exception of the lowest failing index.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

// All n_runs episodes of cfg, in run order.
std::vector<RegretLedger> run_all(const RunConfig& cfg, std::size_t threads = 1);

// Sets a named policy parameter ("C", "alpha", "rho", "delta", "tau").
// Throws ValidationError for names the policy does not have.
void set_policy_parameter(PolicyConfig& policy, const std::string& name, double value);

using SweepGrid = std::map<std::string, std::vector<double>>;

struct SweepCell {
    std::map<std::string, double> parameters;
    PolicyConfig policy;
    RegretCurve curve;
};

// Grid cells in sweep order with their policies set; curves left empty.
std::vector<SweepCell> expand_grid(const PolicyConfig& base, const SweepGrid& grid);

// Cartesian product of the grid (keys in lexicographic order, last key
// varying fastest). An empty grid yields the base configuration alone.
std::vector<SweepCell> sweep(const RunConfig& base, const SweepGrid& grid, std::size_t threads = 1);

}  // namespace riskbandit
