#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "riskbandit/estimators.hpp"
#include "riskbandit/rng.hpp"

namespace riskbandit {

struct UcbConfig {
    double C = 1.0;
};

struct MinConfig {};

struct MarabConfig {
    double C = 1e-6;
    double alpha = 0.2;
};

struct MvLcbConfig {
    double rho = 2.0;
    double delta = 0.01;
};

struct ExpExpConfig {
    double rho = 2.0;
    std::size_t tau = 0;
};

using PolicyConfig = std::variant<UcbConfig, MinConfig, MarabConfig, MvLcbConfig, ExpExpConfig>;

// Throws ValidationError on out-of-range parameters. When `horizon` is
// given, ExpExp's tau must not exceed it.
void validate(const PolicyConfig& config, std::optional<std::size_t> horizon = std::nullopt);

// "ucb", "min", "marab", "mvlcb", "expexp".
std::string policy_name(const PolicyConfig& config);

// Index functions. All require stats.count() >= 1 and throw
// UndefinedStatistic otherwise.
double ucb_index(const ArmStats& stats, std::size_t t, double C);
double marab_index(const ArmStats& stats, std::size_t t, double C, double alpha);
double min_index(const ArmStats& stats);
// Lower is better: the MV objective is minimized.
double mvlcb_index(const ArmStats& stats, double rho, double delta);

struct PolicyState {
    explicit PolicyState(PolicyConfig cfg) : config(std::move(cfg)) {}

    PolicyConfig config;
    std::size_t round_robin_cursor = 0;
    // ExpExp exploitation arm, fixed at t = tau + 1.
    std::optional<std::size_t> frozen_choice;
    // When set, exact ties are broken uniformly at random instead of by
    // lowest index.
    std::optional<Rng> tie_breaker;
};

// Arm to pull at step t (1-based). Arms never pulled go first, lowest index
// first. Deterministic unless state.tie_breaker is set.
// Throws ConfigError when fewer than two arms are given.
std::size_t select_arm(PolicyState& state, std::span<const ArmStats> all_stats, std::size_t t);

}  // namespace riskbandit
