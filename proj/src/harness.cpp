#include "riskbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "riskbandit/error.hpp"

namespace riskbandit {

namespace {

constexpr std::uint64_t kTieStream = ~std::uint64_t{0};

}  // namespace

void validate(const RunConfig& cfg) {
    if (!cfg.problem) throw ConfigError("run config has no problem");
    const std::size_t k = cfg.problem->size();
    if (k < 2) throw ConfigError("a bandit problem needs at least two arms");
    if (cfg.horizon < k) {
        throw ValidationError("horizon " + std::to_string(cfg.horizon) + " is below the arm count " +
                              std::to_string(k));
    }
    if (cfg.n_runs == 0) throw ValidationError("runs must be >= 1");
    validate(cfg.policy, cfg.horizon);
    if (const auto* ee = std::get_if<ExpExpConfig>(&cfg.policy); ee && ee->tau < k) {
        throw ValidationError("expexp: tau must be >= K");
    }
}

std::uint64_t arm_stream_seed(std::uint64_t seed, std::size_t run_index, std::size_t arm) {
    return derive_seed(seed, run_index, arm);
}

std::uint64_t tie_stream_seed(std::uint64_t seed, std::size_t run_index) {
    return derive_seed(seed, run_index, kTieStream);
}

RegretLedger run_episode(const RunConfig& cfg, std::size_t run_index) {
    validate(cfg);
    const BanditProblem& problem = *cfg.problem;
    const std::size_t k = problem.size();
    const std::size_t T = cfg.horizon;

    std::vector<Rng> streams;
    streams.reserve(k);
    for (std::size_t i = 0; i < k; ++i) streams.emplace_back(arm_stream_seed(cfg.seed, run_index, i));

    PolicyState state(cfg.policy);
    if (cfg.random_ties) state.tie_breaker.emplace(tie_stream_seed(cfg.seed, run_index));

    std::vector<ArmStats> stats(k);
    RegretLedger ledger;
    ledger.arms.reserve(T);
    ledger.rewards.reserve(T);
    ledger.theoretical.reserve(T);
    ledger.empirical.reserve(T);
    ledger.pulls.assign(k, 0);

    const double best = problem.best_mean();
    const auto margins = problem.margins_mean();
    double theoretical = 0.0;
    double collected = 0.0;
    for (std::size_t t = 1; t <= T; ++t) {
        const std::size_t arm = select_arm(state, stats, t);
        const double reward = sample(problem.arm(arm), streams[arm]);
        stats[arm].update(reward);
        ++ledger.pulls[arm];

        // sum_k n_k mu_hat_k is the total reward collected so far.
        theoretical += margins[arm];
        collected += reward;

        ledger.arms.push_back(static_cast<std::uint32_t>(arm));
        ledger.rewards.push_back(reward);
        ledger.theoretical.push_back(theoretical);
        ledger.empirical.push_back(static_cast<double>(t) * best - collected);
    }
    return ledger;
}

void LedgerAccumulator::add(const RegretLedger& ledger) {
    const std::size_t T = ledger.horizon();
    if (count_ == 0) {
        sum_theoretical_.assign(T, 0.0);
        sum_sq_theoretical_.assign(T, 0.0);
        sum_empirical_.assign(T, 0.0);
        sum_rewards_.assign(T, 0.0);
    } else if (T != horizon()) {
        throw ValidationError("ledgers have mismatched horizons (" + std::to_string(T) + " vs " +
                              std::to_string(horizon()) + ")");
    }
    for (std::size_t i = 0; i < T; ++i) {
        sum_theoretical_[i] += ledger.theoretical[i];
        sum_sq_theoretical_[i] += ledger.theoretical[i] * ledger.theoretical[i];
        sum_empirical_[i] += ledger.empirical[i];
        sum_rewards_[i] += ledger.rewards[i];
    }
    ++count_;
}

RegretCurve LedgerAccumulator::curve() const {
    if (count_ == 0) throw ValidationError("no ledgers to aggregate");
    const double n = static_cast<double>(count_);
    RegretCurve c;
    const std::size_t T = horizon();
    c.mean_theoretical.resize(T);
    c.mean_empirical.resize(T);
    c.std_theoretical.resize(T);
    for (std::size_t i = 0; i < T; ++i) {
        const double m = sum_theoretical_[i] / n;
        c.mean_theoretical[i] = m;
        c.mean_empirical[i] = sum_empirical_[i] / n;
        c.std_theoretical[i] = std::sqrt(std::max(0.0, sum_sq_theoretical_[i] / n - m * m));
    }
    return c;
}

std::vector<double> LedgerAccumulator::sorted_mean_rewards() const {
    if (count_ == 0) throw ValidationError("no ledgers to aggregate");
    std::vector<double> out(sum_rewards_.size());
    const double n = static_cast<double>(count_);
    std::transform(sum_rewards_.begin(), sum_rewards_.end(), out.begin(),
                   [n](double s) { return s / n; });
    std::sort(out.begin(), out.end());
    return out;
}

RegretCurve aggregate_regret(std::span<const RegretLedger> ledgers) {
    LedgerAccumulator acc;
    for (const auto& l : ledgers) acc.add(l);
    return acc.curve();
}

std::vector<double> sorted_reward_cdf(std::span<const RegretLedger> ledgers) {
    LedgerAccumulator acc;
    for (const auto& l : ledgers) acc.add(l);
    return acc.sorted_mean_rewards();
}

std::vector<double> sorted_final_regret(std::vector<double> per_instance_regrets) {
    if (per_instance_regrets.empty()) throw ValidationError("no regrets to sort");
    std::sort(per_instance_regrets.begin(), per_instance_regrets.end());
    return per_instance_regrets;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = n;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

std::vector<RegretLedger> run_all(const RunConfig& cfg, std::size_t threads) {
    validate(cfg);
    std::vector<RegretLedger> ledgers(cfg.n_runs);
    parallel_for(cfg.n_runs, threads, [&](std::size_t r) { ledgers[r] = run_episode(cfg, r); });
    return ledgers;
}

void set_policy_parameter(PolicyConfig& policy, const std::string& name, double value) {
    auto unknown = [&] {
        throw ValidationError("policy " + policy_name(policy) + " has no parameter '" + name + "'");
    };
    if (auto* p = std::get_if<UcbConfig>(&policy)) {
        name == "C" ? void(p->C = value) : unknown();
    } else if (std::holds_alternative<MinConfig>(policy)) {
        unknown();
    } else if (auto* p = std::get_if<MarabConfig>(&policy)) {
        if (name == "C") p->C = value;
        else if (name == "alpha") p->alpha = value;
        else unknown();
    } else if (auto* p = std::get_if<MvLcbConfig>(&policy)) {
        if (name == "rho") p->rho = value;
        else if (name == "delta") p->delta = value;
        else unknown();
    } else if (auto* p = std::get_if<ExpExpConfig>(&policy)) {
        if (name == "rho") {
            p->rho = value;
        } else if (name == "tau") {
            if (!(value >= 0.0) || value != std::floor(value)) {
                throw ValidationError("expexp: tau must be a non-negative integer");
            }
            p->tau = static_cast<std::size_t>(value);
        } else {
            unknown();
        }
    }
}

std::vector<SweepCell> expand_grid(const PolicyConfig& base, const SweepGrid& grid) {
    std::vector<SweepCell> cells{SweepCell{{}, base, {}}};
    for (const auto& [name, values] : grid) {
        if (values.empty()) throw ValidationError("sweep parameter '" + name + "' has no values");
        std::vector<SweepCell> expanded;
        expanded.reserve(cells.size() * values.size());
        for (const auto& cell : cells) {
            for (double v : values) {
                SweepCell next = cell;
                set_policy_parameter(next.policy, name, v);
                next.parameters[name] = v;
                expanded.push_back(std::move(next));
            }
        }
        cells = std::move(expanded);
    }
    return cells;
}

std::vector<SweepCell> sweep(const RunConfig& base, const SweepGrid& grid, std::size_t threads) {
    auto cells = expand_grid(base.policy, grid);
    for (const auto& cell : cells) {
        RunConfig cfg = base;
        cfg.policy = cell.policy;
        validate(cfg);
    }

    // One work unit per (cell, run); folded per cell in run order.
    const std::size_t runs = base.n_runs;
    std::vector<RegretLedger> ledgers(cells.size() * runs);
    parallel_for(ledgers.size(), threads, [&](std::size_t unit) {
        RunConfig cfg = base;
        cfg.policy = cells[unit / runs].policy;
        ledgers[unit] = run_episode(cfg, unit % runs);
    });
    for (std::size_t c = 0; c < cells.size(); ++c) {
        cells[c].curve = aggregate_regret(std::span(ledgers).subspan(c * runs, runs));
    }
    return cells;
}

}  // namespace riskbandit
