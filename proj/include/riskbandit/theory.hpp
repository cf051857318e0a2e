#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskbandit/distributions.hpp"
#include "riskbandit/generators.hpp"

namespace riskbandit {

struct BoundInputs {
    std::size_t K = 2;
    double A = 1.0;
    double delta_mu_max = 0.0;
    double delta_a_min = 0.0;
    std::size_t t = 1;
    double delta = 0.05;
    // Margins of the suboptimal arms, for the UCB bound.
    std::vector<double> delta_mu_list;
    // Number of optimal arms; the leading factor becomes K - k.
    std::size_t optimal_arms = 1;
};

struct RegretBound {
    double high_probability = 0.0;
    // Absent when t is below the side condition of the expectation form.
    std::optional<double> expectation;
    std::string note;
};

// High-probability and expected regret of MIN when the best-mean arm is also
// the best-infimum arm:
//   (K-1)/A * dmu/da * log(tK/delta) + (K-1) dmu
// and, for t >= (K-1)/A * da/dmu,
//   (K-1)/A * dmu/da * (log(t^2 K A da / ((K-1) dmu)) + 1) + (K-1) dmu.
// Throws ValidationError on A <= 0, delta outside (0, 1), or da <= 0 with
// suboptimal arms present.
RegretBound prop43_regret_bound(const BoundInputs& in);

// Same under the stronger margin assumption dmu_i <= da_i for every arm:
//   (K-1)/A * log(tK/delta) + (K-1) dmu
// and, for t > (K-1)/A,
//   (K-1)/A * (log(t^2 K A / (K-1)) + 1) + (K-1) dmu.
RegretBound prop44_regret_bound(const BoundInputs& in);

// 8 sum log(t)/d_i + (1 + pi^2/3) sum d_i over suboptimal margins d_i.
// Throws ValidationError on a non-positive margin or t == 0.
double ucb_regret_bound(const std::vector<double>& suboptimal_margins, std::size_t t);

struct MarginReport {
    bool best_arm_coincide = false;
    bool prop44_margins_hold = false;
    std::optional<double> A;
};

MarginReport margin_assumption_check(const BanditProblem& problem);

struct LemmaCheck {
    double empirical_prob = 0.0;
    double bound = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    // empirical_prob <= bound + 3 * std_error
    bool pass = false;
};

// Monte-Carlo frequency of {min of t draws >= a + epsilon} against
// exp(-t A epsilon). Trials are split into fixed shards with derived seeds,
// so the result does not depend on `threads`.
// Throws ValidationError when the arm has no closed-form A, or trials == 0.
LemmaCheck lemma41_check(const ArmSpec& spec, std::size_t t, double epsilon, std::uint64_t trials,
                         std::uint64_t seed, std::size_t threads = 1);

// Frequency of {some arm i has t-sample min >= a_i + epsilon} against
// K exp(-t A epsilon), A being the problem's lower-bound constant.
LemmaCheck lemma42_check(const BanditProblem& problem, std::size_t t, double epsilon,
                         std::uint64_t trials, std::uint64_t seed, std::size_t threads = 1);

}  // namespace riskbandit
