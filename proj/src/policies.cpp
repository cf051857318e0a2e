#include "riskbandit/policies.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "riskbandit/error.hpp"
#include "riskbandit/numeric.hpp"

namespace riskbandit {

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void require_pulled(const ArmStats& stats) {
    if (stats.count() == 0) throw UndefinedStatistic("index of an arm with no rewards");
}

// Best arm under `score`, ties resolved by `tie_breaker` or lowest index.
template <class Score>
std::size_t best_arm(std::span<const ArmStats> stats, bool maximize, std::optional<Rng>& tie_breaker,
                     Score&& score) {
    std::vector<double> values(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) values[i] = score(stats[i]);

    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (maximize ? values[i] > values[best] : values[i] < values[best]) best = i;
    }
    if (!tie_breaker) return best;

    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == values[best]) tied.push_back(i);
    }
    return tied[tie_breaker->below(tied.size())];
}

}  // namespace

void validate(const PolicyConfig& config, std::optional<std::size_t> horizon) {
    std::visit(overloaded{
                   [](const UcbConfig& c) {
                       if (!(c.C > 0.0)) throw ValidationError("ucb: C must be > 0");
                   },
                   [](const MinConfig&) {},
                   [](const MarabConfig& c) {
                       if (!(c.C >= 0.0)) throw ValidationError("marab: C must be >= 0");
                       if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
                           throw ValidationError("marab: alpha must lie in (0, 1)");
                       }
                   },
                   [](const MvLcbConfig& c) {
                       if (!(c.rho > 0.0)) throw ValidationError("mvlcb: rho must be > 0");
                       if (!(c.delta > 0.0 && c.delta < 1.0)) {
                           throw ValidationError("mvlcb: delta must lie in (0, 1)");
                       }
                   },
                   [&](const ExpExpConfig& c) {
                       if (!(c.rho > 0.0)) throw ValidationError("expexp: rho must be > 0");
                       if (horizon && c.tau > *horizon) {
                           throw ValidationError("expexp: tau exceeds the horizon");
                       }
                   },
               },
               config);
}

std::string policy_name(const PolicyConfig& config) {
    return std::visit(overloaded{
                          [](const UcbConfig&) { return std::string("ucb"); },
                          [](const MinConfig&) { return std::string("min"); },
                          [](const MarabConfig&) { return std::string("marab"); },
                          [](const MvLcbConfig&) { return std::string("mvlcb"); },
                          [](const ExpExpConfig&) { return std::string("expexp"); },
                      },
                      config);
}

double ucb_index(const ArmStats& stats, std::size_t t, double C) {
    require_pulled(stats);
    const double n = static_cast<double>(stats.count());
    return stats.mean() + C * std::sqrt(std::log(static_cast<double>(t)) / n);
}

double marab_index(const ArmStats& stats, std::size_t t, double C, double alpha) {
    require_pulled(stats);
    const double cvar = stats.cvar(alpha);
    if (C == 0.0) return cvar;
    const double n_alpha = static_cast<double>(tail_count(alpha, stats.count()));
    const double horizon_term = static_cast<double>(snapped_ceil_at_least_one(static_cast<double>(t) * alpha));
    return cvar - C * std::sqrt(std::log(horizon_term) / n_alpha);
}

double min_index(const ArmStats& stats) {
    require_pulled(stats);
    return stats.min();
}

double mvlcb_index(const ArmStats& stats, double rho, double delta) {
    require_pulled(stats);
    const double n = static_cast<double>(stats.count());
    return stats.mv_value(rho) - (5.0 + rho) * std::sqrt(std::log(1.0 / delta) / (2.0 * n));
}

std::size_t select_arm(PolicyState& state, std::span<const ArmStats> all_stats, std::size_t t) {
    const std::size_t k = all_stats.size();
    if (k < 2) throw ConfigError("a bandit problem needs at least two arms");

    if (auto* ee = std::get_if<ExpExpConfig>(&state.config)) {
        if (t <= ee->tau) {
            state.round_robin_cursor = t % k;
            return (t - 1) % k;
        }
        if (!state.frozen_choice) {
            for (std::size_t i = 0; i < k; ++i) {
                if (all_stats[i].count() == 0) return i;
            }
            const double rho = ee->rho;
            state.frozen_choice = best_arm(all_stats, false, state.tie_breaker,
                                           [&](const ArmStats& s) { return s.mv_value(rho); });
        }
        return *state.frozen_choice;
    }

    for (std::size_t i = 0; i < k; ++i) {
        if (all_stats[i].count() == 0) {
            state.round_robin_cursor = i + 1;
            return i;
        }
    }

    return std::visit(
        overloaded{
            [&](const UcbConfig& c) {
                return best_arm(all_stats, true, state.tie_breaker,
                                [&](const ArmStats& s) { return ucb_index(s, t, c.C); });
            },
            [&](const MinConfig&) {
                return best_arm(all_stats, true, state.tie_breaker,
                                [](const ArmStats& s) { return min_index(s); });
            },
            [&](const MarabConfig& c) {
                return best_arm(all_stats, true, state.tie_breaker,
                                [&](const ArmStats& s) { return marab_index(s, t, c.C, c.alpha); });
            },
            [&](const MvLcbConfig& c) {
                return best_arm(all_stats, false, state.tie_breaker,
                                [&](const ArmStats& s) { return mvlcb_index(s, c.rho, c.delta); });
            },
            [&](const ExpExpConfig&) -> std::size_t { return 0; },  // handled above
        },
        state.config);
}

}  // namespace riskbandit
