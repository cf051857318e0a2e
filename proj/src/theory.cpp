#include "riskbandit/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "riskbandit/error.hpp"
#include "riskbandit/harness.hpp"

namespace riskbandit {

namespace {

constexpr std::size_t kLemmaShards = 64;

void check_common(const BoundInputs& in) {
    if (!(in.A > 0.0)) throw ValidationError("A must be > 0");
    if (!(in.delta > 0.0 && in.delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
    if (in.t == 0) throw ValidationError("t must be >= 1");
    if (in.K == 0) throw ValidationError("K must be >= 1");
    if (!(in.delta_mu_max >= 0.0)) throw ValidationError("delta_mu_max must be >= 0");
}

// K - k suboptimal arms, or 0 when every arm is optimal.
double suboptimal_count(const BoundInputs& in) {
    return in.K > in.optimal_arms ? static_cast<double>(in.K - in.optimal_arms) : 0.0;
}

LemmaCheck finish(std::uint64_t hits, std::uint64_t trials, double bound) {
    LemmaCheck r;
    r.trials = trials;
    r.hits = hits;
    r.empirical_prob = static_cast<double>(hits) / static_cast<double>(trials);
    r.std_error = std::sqrt(r.empirical_prob * (1.0 - r.empirical_prob) / static_cast<double>(trials));
    r.bound = bound;
    r.pass = r.empirical_prob <= bound + 3.0 * r.std_error;
    return r;
}

// Counts trials where some arm's t-sample min reaches its infimum + epsilon.
std::uint64_t count_hits(std::span<const ArmSpec> arms, std::size_t t, double epsilon,
                         std::uint64_t trials, std::uint64_t seed, std::size_t threads) {
    std::vector<double> thresholds;
    for (const auto& a : arms) thresholds.push_back(essential_infimum(a) + epsilon);

    std::vector<std::uint64_t> shard_hits(kLemmaShards, 0);
    parallel_for(kLemmaShards, threads, [&](std::size_t shard) {
        const std::uint64_t begin = trials * shard / kLemmaShards;
        const std::uint64_t end = trials * (shard + 1) / kLemmaShards;
        Rng rng(derive_seed(seed, shard));
        std::uint64_t hits = 0;
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            bool any = false;
            for (std::size_t i = 0; i < arms.size(); ++i) {
                double lowest = 1.0;
                for (std::size_t u = 0; u < t; ++u) lowest = std::min(lowest, sample(arms[i], rng));
                // With t = 0 the empty minimum is +inf, so the event holds.
                if (t == 0 || lowest >= thresholds[i]) any = true;
            }
            hits += any ? 1 : 0;
        }
        shard_hits[shard] = hits;
    });
    return std::accumulate(shard_hits.begin(), shard_hits.end(), std::uint64_t{0});
}

}  // namespace

RegretBound prop43_regret_bound(const BoundInputs& in) {
    check_common(in);
    const double m = suboptimal_count(in);
    RegretBound out;
    if (m == 0.0) {
        out.high_probability = 0.0;
        out.expectation = 0.0;
        out.note = "no suboptimal arm";
        return out;
    }
    if (!(in.delta_a_min > 0.0)) throw ValidationError("delta_a_min must be > 0");

    const double K = static_cast<double>(in.K);
    const double t = static_cast<double>(in.t);
    const double ratio = in.delta_mu_max / in.delta_a_min;
    const double lead = m / in.A * ratio;
    out.high_probability = lead * std::log(t * K / in.delta) + m * in.delta_mu_max;

    if (in.delta_mu_max == 0.0) {
        out.expectation = 0.0;
        out.note = "zero mean margins";
        return out;
    }
    const double threshold = m / in.A / ratio;
    if (t >= threshold) {
        out.expectation =
            lead * (std::log(t * t * K * in.A / (m * ratio)) + 1.0) + m * in.delta_mu_max;
    } else {
        out.note = "expectation bound requires t >= " + std::to_string(threshold);
    }
    return out;
}

RegretBound prop44_regret_bound(const BoundInputs& in) {
    check_common(in);
    const double m = suboptimal_count(in);
    RegretBound out;
    if (m == 0.0) {
        out.high_probability = 0.0;
        out.expectation = 0.0;
        out.note = "no suboptimal arm";
        return out;
    }
    const double K = static_cast<double>(in.K);
    const double t = static_cast<double>(in.t);
    const double lead = m / in.A;
    out.high_probability = lead * std::log(t * K / in.delta) + m * in.delta_mu_max;

    const double threshold = m / in.A;
    if (t > threshold) {
        out.expectation = lead * (std::log(t * t * K * in.A / m) + 1.0) + m * in.delta_mu_max;
    } else {
        out.note = "expectation bound requires t > " + std::to_string(threshold);
    }
    return out;
}

double ucb_regret_bound(const std::vector<double>& suboptimal_margins, std::size_t t) {
    if (t == 0) throw ValidationError("t must be >= 1");
    const double log_t = std::log(static_cast<double>(t));
    double inverse_sum = 0.0;
    double margin_sum = 0.0;
    for (double d : suboptimal_margins) {
        if (!(d > 0.0)) throw ValidationError("suboptimal margins must be > 0");
        inverse_sum += 1.0 / d;
        margin_sum += d;
    }
    return 8.0 * log_t * inverse_sum + (1.0 + std::numbers::pi * std::numbers::pi / 3.0) * margin_sum;
}

MarginReport margin_assumption_check(const BanditProblem& problem) {
    MarginReport r;
    const auto means = problem.means();
    const auto infima = problem.infima();
    const double best_mu = *std::max_element(means.begin(), means.end());
    const double best_a = *std::max_element(infima.begin(), infima.end());
    // Some arm attains both maxima.
    for (std::size_t i = 0; i < problem.size(); ++i) {
        if (means[i] == best_mu && infima[i] == best_a) r.best_arm_coincide = true;
    }
    r.prop44_margins_hold = true;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        if (problem.margins_mean()[i] > problem.margins_min()[i] + 1e-12) r.prop44_margins_hold = false;
    }
    r.A = problem.lower_bound_A();
    return r;
}

LemmaCheck lemma41_check(const ArmSpec& spec, std::size_t t, double epsilon, std::uint64_t trials,
                         std::uint64_t seed, std::size_t threads) {
    validate(spec);
    if (trials == 0) throw ValidationError("trials must be >= 1");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
    const auto A = lower_bound_constant(spec);
    if (!A) throw ValidationError("no closed-form lower-bound constant for " + describe(spec));
    const double bound = std::exp(-static_cast<double>(t) * *A * epsilon);
    const ArmSpec arms[] = {spec};
    return finish(count_hits(arms, t, epsilon, trials, seed, threads), trials, bound);
}

LemmaCheck lemma42_check(const BanditProblem& problem, std::size_t t, double epsilon,
                         std::uint64_t trials, std::uint64_t seed, std::size_t threads) {
    if (trials == 0) throw ValidationError("trials must be >= 1");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
    const auto A = problem.lower_bound_A();
    if (!A) throw ValidationError("problem has no closed-form lower-bound constant");
    const double bound =
        static_cast<double>(problem.size()) * std::exp(-static_cast<double>(t) * *A * epsilon);
    return finish(count_hits(problem.arms(), t, epsilon, trials, seed, threads), trials, bound);
}

}  // namespace riskbandit
