// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "riskbandit/cli.hpp"
#include "riskbandit/experiment.hpp"
#include "riskbandit/harness.hpp"
#include "riskbandit/policies.hpp"
#include "riskbandit/theory.hpp"

using namespace riskbandit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::size_t worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

// 1. With C = 0 and alpha <= 1/n the CVaR index is the empirical minimum.
Outcome marab_min_limit() {
    Rng rng(101);
    std::size_t mismatches = 0;
    for (int fixture = 0; fixture < 100; ++fixture) {
        const std::size_t K = 2 + rng.below(6);
        std::vector<ArmStats> stats(K);
        std::size_t max_count = 0;
        for (auto& s : stats) {
            const std::size_t n = 1 + rng.below(50);
            for (std::size_t i = 0; i < n; ++i) s.update(rng.uniform01());
            max_count = std::max(max_count, n);
        }
        const std::size_t t = 1 + rng.below(2000);
        const double alpha = rng.uniform01() / static_cast<double>(max_count);
        for (const auto& s : stats) {
            if (marab_index(s, t, 0.0, alpha) != min_index(s)) ++mismatches;
        }
        PolicyState marab(MarabConfig{0.0, alpha});
        PolicyState min(MinConfig{});
        if (select_arm(marab, stats, t) != select_arm(min, stats, t)) ++mismatches;
    }
    return {mismatches == 0, "mismatches=" + std::to_string(mismatches)};
}

// 2. Incremental CVaR against sort-and-average with an integer tail count.
Outcome cvar_oracle() {
    Rng rng(202);
    std::size_t mismatches = 0, comparisons = 0;
    for (int set = 0; set < 1000; ++set) {
        const std::size_t n = 1 + rng.below(50);
        std::vector<double> values(n);
        ArmStats stats;
        for (auto& v : values) {
            // Coarse values so the multisets contain duplicates.
            v = set % 2 ? rng.uniform01() : static_cast<double>(rng.below(5)) / 4.0;
            stats.update(v);
        }
        std::sort(values.begin(), values.end());
        for (std::size_t k = 1; k <= 20; ++k) {
            const double alpha = static_cast<double>(k) / 20.0;
            const std::size_t m = std::max<std::size_t>(1, (k * n + 19) / 20);
            double sum = 0.0;
            for (std::size_t i = 0; i < m; ++i) sum += values[i];
            ++comparisons;
            if (empirical_cvar(stats, alpha) != sum / static_cast<double>(m)) ++mismatches;
        }
    }
    return {mismatches == 0,
            "mismatches=" + std::to_string(mismatches) + "/" + std::to_string(comparisons)};
}

// 3. CVaR_0.2 of U[0,1] is 0.1.
Outcome cvar_consistency() {
    std::size_t within = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(derive_seed(303, seed));
        ArmStats stats;
        for (int i = 0; i < 10000; ++i) stats.update(rng.uniform01());
        const double err = std::abs(empirical_cvar(stats, 0.2) - 0.1);
        worst = std::max(worst, err);
        if (err <= 0.02) ++within;
    }
    return {within >= 95, "within=" + std::to_string(within) + "/100 worst_error=" + num(worst)};
}

// 4. P(min of 10 draws >= a + 0.1) for U[0,1]: exact 0.9^10.
Outcome single_arm_tail() {
    const auto r = lemma41_check(UniformSegment{0.5, 0.5}, 10, 0.1, 100000, 404, worker_threads());
    const double exact = std::pow(0.9, 10);
    const bool pass = std::abs(r.empirical_prob - exact) <= 0.005 && r.empirical_prob <= std::exp(-1.0);
    return {pass, "empirical=" + num(r.empirical_prob) + " exact=" + num(exact) + " bound=" + num(r.bound)};
}

RunConfig poc_config(PolicyConfig policy, std::shared_ptr<const BanditProblem> problem,
                     std::uint64_t seed) {
    RunConfig cfg;
    cfg.problem = std::move(problem);
    cfg.policy = policy;
    cfg.horizon = 2000;
    cfg.seed = seed;
    cfg.n_runs = 40;
    return cfg;
}

// 5. MIN settles on the best arm early and its regret stops growing.
Outcome min_plateau() {
    const auto problem = std::make_shared<const BanditProblem>(gen_proof_of_concept({}));
    const auto curve = aggregate_regret(run_all(poc_config(MinConfig{}, problem, 505), worker_threads()));
    const double r500 = curve.mean_theoretical[499];
    const double r2000 = curve.mean_theoretical[1999];
    return {r2000 - r500 <= 0.01 * r500 + 1.0, "R_500=" + num(r500) + " R_2000=" + num(r2000)};
}

// 6. Final MaRaB regret over the C x alpha grid stays within a factor 2.
Outcome marab_insensitivity() {
    const auto problem = std::make_shared<const BanditProblem>(gen_proof_of_concept({}));
    std::vector<double> Cs;
    for (int e = -6; e <= 3; ++e) Cs.push_back(std::pow(10.0, e));
    const auto cells = sweep(poc_config(MarabConfig{1.0, 0.1}, problem, 606),
                             {{"C", Cs}, {"alpha", {0.001, 0.01, 0.1}}}, worker_threads());
    double lo = INFINITY, hi = 0.0;
    std::string worst;
    for (const auto& c : cells) {
        const double r = c.curve.mean_theoretical.back();
        lo = std::min(lo, r);
        if (r > hi) {
            hi = r;
            worst = "C=" + num(c.parameters.at("C")) + ",alpha=" + num(c.parameters.at("alpha"));
        }
    }
    return {hi <= 2.0 * lo,
            "cells=" + std::to_string(cells.size()) + " min=" + num(lo) + " max=" + num(hi) +
                " ratio=" + num(hi / lo) + " (max at " + worst + ")"};
}

// 7. Mean UCB regret on the mixture family against c log t.
Outcome ucb_log_growth() {
    ExperimentSpec spec;
    spec.problem.generator = "mixture";
    spec.problem.K = 20;
    spec.horizon = 2000;
    spec.runs = 40;
    spec.instances = 10;
    spec.seed = 707;
    PolicySpec ucb;
    ucb.label = "ucb";
    ucb.config = UcbConfig{1e-3};
    spec.policies = {ucb};
    validate(spec);
    const auto problems = build_problems(spec);
    const auto result = run_policy(spec, problems, ucb, ucb.config, worker_threads());

    // Least squares through the origin on x = log t.
    double sxy = 0.0, sxx = 0.0, mean_y = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 200; t <= 2000; ++t) {
        const double x = std::log(static_cast<double>(t));
        const double y = result.curve.mean_theoretical[t - 1];
        sxy += x * y;
        sxx += x * x;
        mean_y += y;
        ++n;
    }
    mean_y /= static_cast<double>(n);
    const double c = sxy / sxx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t t = 200; t <= 2000; ++t) {
        const double y = result.curve.mean_theoretical[t - 1];
        const double r = y - c * std::log(static_cast<double>(t));
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return {r2 >= 0.9, "c=" + num(c) + " R^2=" + num(r2) + " R_200=" +
                           num(result.curve.mean_theoretical[199]) +
                           " R_2000=" + num(result.curve.mean_theoretical[1999])};
}

// 8. Bound plug-in value and ordering of the two MIN bounds.
Outcome bound_evaluators() {
    BoundInputs in;
    in.K = 2;
    in.A = 1.0;
    in.delta_mu_max = 0.1;
    in.delta_a_min = 0.1;
    in.t = 100;
    in.delta = 0.05;
    const double value = prop43_regret_bound(in).high_probability;
    bool pass = std::abs(value - 8.394) <= 1e-3;

    Rng rng(808);
    std::size_t violations = 0;
    for (int i = 0; i < 1000; ++i) {
        BoundInputs r;
        r.K = 2 + rng.below(49);
        r.A = rng.uniform(0.01, 100.0);
        r.delta_a_min = rng.uniform(1e-4, 1.0);
        r.delta_mu_max = rng.uniform(0.0, r.delta_a_min);
        r.t = 1 + rng.below(1'000'000);
        r.delta = rng.uniform(1e-6, 0.999);
        if (prop44_regret_bound(r).high_probability > prop43_regret_bound(r).high_probability) ++violations;
    }
    pass = pass && violations == 0;
    return {pass, "prop43=" + num(value) + " violations=" + std::to_string(violations) + "/1000"};
}

// 9. Observed MIN regret under the expected-regret bound on varied problems.
Outcome theory_simulation_link() {
    std::size_t violations = 0;
    double tightest = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        Rng rng(derive_seed(909, i));
        ProofOfConceptParams params;
        params.delta_max = rng.uniform(0.01, 0.1);
        params.r_max = rng.uniform(0.05, 0.39 - params.delta_max);
        const auto problem = std::make_shared<const BanditProblem>(gen_proof_of_concept(params));
        const auto curve =
            aggregate_regret(run_all(poc_config(MinConfig{}, problem, derive_seed(909, i, 1)), worker_threads()));

        BoundInputs in;
        in.K = problem->size();
        in.A = *problem->lower_bound_A();
        in.delta_mu_max = *std::max_element(problem->margins_mean().begin(), problem->margins_mean().end());
        in.delta_a_min = INFINITY;
        for (std::size_t k = 0; k < problem->size(); ++k) {
            if (k != problem->best_min_arm()) in.delta_a_min = std::min(in.delta_a_min, problem->margins_min()[k]);
        }
        in.t = 2000;
        const auto bound = prop44_regret_bound(in);
        const double observed = curve.mean_theoretical.back();
        if (!bound.expectation || observed > *bound.expectation) ++violations;
        if (bound.expectation) tightest = std::max(tightest, observed / *bound.expectation);
    }
    return {violations == 0,
            "violations=" + std::to_string(violations) + "/20 max observed/bound=" + num(tightest)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 10. Identical CSVs across reruns and thread counts.
Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "riskbandit_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const json doc = {
        {"problem", {{"generator", "mixture"}, {"K", 10}}},
        {"policies",
         {{{"name", "ucb"}, {"C", 1e-3}},
          {{"name", "min"}},
          {{"name", "marab"}, {"C", 1e-6}, {"alpha", 0.2}},
          {{"name", "mvlcb"}, {"rho", 2.0}},
          {{"name", "expexp"}, {"rho", 2.0}}}},
        {"horizon", 1000},
        {"runs", 10},
        {"instances", 4},
        {"seed", 1010},
        {"random_ties", true}};
    std::ofstream(dir / "spec.json") << doc.dump(2);

    std::ostringstream out, err;
    std::vector<std::pair<std::string, std::size_t>> variants = {{"a", 1}, {"b", 1}, {"c", 8}};
    for (const auto& [name, threads] : variants) {
        cli::CommonOptions opts;
        opts.spec = dir / "spec.json";
        opts.out = dir / name;
        opts.threads = threads;
        if (cli::cmd_run(opts, out, err) != cli::kOk) return {false, "cmd_run failed: " + err.str()};
    }
    std::size_t differing = 0;
    for (const char* f : {"regret_curve.csv", "reward_cdf.csv", "final_regret.csv"}) {
        const auto a = slurp(dir / "a" / f);
        if (a.empty() || a != slurp(dir / "b" / f)) ++differing;
        if (a != slurp(dir / "c" / f)) ++differing;
    }
    fs::remove_all(dir);
    return {differing == 0, "differing file pairs=" + std::to_string(differing) + "/6"};
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;
    std::function<Outcome()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "MaRaB with C=0 and small alpha equals MIN", 1.0, marab_min_limit},
        {2, "CVaR estimator matches sort-and-average oracle", 5.0, cvar_oracle},
        {3, "CVaR estimate consistency on U[0,1]", 10.0, cvar_consistency},
        {4, "single-arm min tail probability", 5.0, single_arm_tail},
        {5, "MIN regret plateau on proof-of-concept problem", 30.0, min_plateau},
        {6, "MaRaB insensitive to C and alpha", 300.0, marab_insensitivity},
        {7, "UCB regret grows like log t on mixtures", 300.0, ucb_log_growth},
        {8, "bound evaluators", 1.0, bound_evaluators},
        {9, "MIN regret below expected-regret bound", 120.0, theory_simulation_link},
        {10, "run output deterministic", 120.0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.time_limit_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::printf("%s criterion %d: %s -- %s [%.2fs, limit %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.time_limit_s, in_time ? "" : ", TOO SLOW");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
