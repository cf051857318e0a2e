#include "riskbandit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <thread>

#include "riskbandit/error.hpp"
#include "riskbandit/experiment.hpp"
#include "riskbandit/theory.hpp"

namespace riskbandit::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
}

ExperimentSpec load_with_overrides(const CommonOptions& opts) {
    if (opts.spec.empty()) throw ValidationError("--spec: an experiment file is required");
    auto spec = load_experiment(opts.spec);
    if (opts.seed) spec.seed = opts.seed;
    if (opts.out) spec.output = *opts.out;
    if (opts.format != "csv" && opts.format != "json") {
        throw ValidationError("--format: expected csv or json");
    }
    validate(spec);
    return spec;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& kind, const json& config,
              const std::string& header)
        : path_(path), out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << "# riskbandit " << kind << " schema " << kCsvSchemaVersion << '\n';
        out_ << "# config: " << config.dump() << '\n';
        out_ << header << '\n';
    }

    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

    ~CsvWriter() noexcept(false) {
        out_.flush();
        if (!out_ && std::uncaught_exceptions() == 0) {
            throw std::runtime_error("failed writing " + path_.string());
        }
    }

private:
    static std::string cell(double v) { return fmt(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }

    std::filesystem::path path_;
    std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json parameters_json(const PolicyConfig& policy) {
    json j = json::object();
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, UcbConfig>) {
                j["C"] = c.C;
            } else if constexpr (std::is_same_v<T, MarabConfig>) {
                j["C"] = c.C;
                j["alpha"] = c.alpha;
            } else if constexpr (std::is_same_v<T, MvLcbConfig>) {
                j["rho"] = c.rho;
                j["delta"] = c.delta;
            } else if constexpr (std::is_same_v<T, ExpExpConfig>) {
                j["rho"] = c.rho;
                j["tau"] = c.tau;
            }
        },
        policy);
    return j;
}

std::string param_cell(const json& params, const char* key) {
    if (!params.contains(key)) return "";
    const auto& v = params.at(key);
    return v.is_number_unsigned() ? std::to_string(v.get<std::size_t>()) : fmt(v.get<double>());
}

json curve_json(const RegretCurve& c) {
    return {{"mean_theoretical_regret", c.mean_theoretical},
            {"mean_empirical_regret", c.mean_empirical},
            {"std", c.std_theoretical}};
}

}  // namespace

std::size_t resolve_threads(std::optional<std::size_t> requested) {
    if (requested && *requested > 0) return *requested;
    if (const char* env = std::getenv("RISKBANDIT_THREADS")) {
        std::size_t n = 0;
        const std::string s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
        if (res.ec == std::errc{} && res.ptr == s.data() + s.size() && n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_run(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto started = std::chrono::steady_clock::now();
        const auto spec = load_with_overrides(opts);
        const std::size_t threads = resolve_threads(opts.threads);
        const json config = resolved_config(spec);
        const auto problems = build_problems(spec);
        const std::size_t K = problems.front()->size();

        std::vector<PolicyResult> results;
        for (const auto& policy : spec.policies) {
            const auto cfg = resolve_policy(policy, K, spec.horizon);
            results.push_back(run_policy(spec, problems, policy, cfg, threads));
            out << "[run] " << policy.label << ": final mean regret theoretical="
                << fmt(results.back().curve.mean_theoretical.back())
                << " empirical=" << fmt(results.back().curve.mean_empirical.back()) << '\n';
        }

        std::filesystem::create_directories(spec.output);
        std::vector<std::string> files;
        if (opts.format == "csv") {
            {
                CsvWriter w(spec.output / "regret_curve.csv", "regret_curve", config,
                            "policy,t,mean_theoretical_regret,mean_empirical_regret,std");
                for (const auto& r : results) {
                    for (std::size_t i = 0; i < r.curve.size(); ++i) {
                        w.row(r.label, i + 1, r.curve.mean_theoretical[i], r.curve.mean_empirical[i],
                              r.curve.std_theoretical[i]);
                    }
                }
            }
            {
                CsvWriter w(spec.output / "reward_cdf.csv", "reward_cdf", config,
                            "policy,rank,mean_reward");
                for (const auto& r : results) {
                    for (std::size_t i = 0; i < r.sorted_rewards.size(); ++i) {
                        w.row(r.label, i + 1, r.sorted_rewards[i]);
                    }
                }
            }
            {
                CsvWriter w(spec.output / "final_regret.csv", "final_regret", config,
                            "policy,rank,empirical_regret,theoretical_regret");
                for (const auto& r : results) {
                    for (std::size_t i = 0; i < r.sorted_final_empirical.size(); ++i) {
                        w.row(r.label, i + 1, r.sorted_final_empirical[i], r.sorted_final_theoretical[i]);
                    }
                }
            }
            files = {"regret_curve.csv", "reward_cdf.csv", "final_regret.csv"};
        } else {
            json doc;
            doc["config"] = config;
            for (const auto& r : results) {
                doc["results"].push_back({{"policy", r.label},
                                          {"parameters", parameters_json(r.policy)},
                                          {"regret_curve", curve_json(r.curve)},
                                          {"sorted_mean_rewards", r.sorted_rewards},
                                          {"sorted_final_empirical_regret", r.sorted_final_empirical},
                                          {"sorted_final_theoretical_regret", r.sorted_final_theoretical}});
            }
            write_json(spec.output / "results.json", doc);
            files = {"results.json"};
        }

        json summary;
        summary["command"] = "run";
        summary["config"] = config;
        summary["seed"] = *spec.seed;
        summary["files"] = files;
        for (const auto& r : results) {
            summary["policies"].push_back({{"policy", r.label},
                                           {"parameters", parameters_json(r.policy)},
                                           {"final_mean_theoretical_regret", r.curve.mean_theoretical.back()},
                                           {"final_mean_empirical_regret", r.curve.mean_empirical.back()}});
        }
        summary["threads"] = threads;
        summary["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        summary["timestamp"] = timestamp_utc();
        write_json(spec.output / "summary.json", summary);
        out << "[run] wrote " << spec.output.string() << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_sweep(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto started = std::chrono::steady_clock::now();
        const auto spec = load_with_overrides(opts);
        const std::size_t threads = resolve_threads(opts.threads);
        const json config = resolved_config(spec);
        const auto problems = build_problems(spec);
        const std::size_t K = problems.front()->size();

        struct Row {
            std::string label;
            json parameters;
            RegretCurve curve;
        };
        std::vector<Row> rows;
        for (const auto& policy : spec.policies) {
            const auto base = resolve_policy(policy, K, spec.horizon);
            for (const auto& cell : expand_grid(base, policy.grid)) {
                auto r = run_policy(spec, problems, policy, cell.policy, threads);
                out << "[sweep] " << policy.label << ' ' << parameters_json(cell.policy).dump()
                    << ": final mean regret " << fmt(r.curve.mean_theoretical.back()) << '\n';
                rows.push_back({policy.label, parameters_json(cell.policy), std::move(r.curve)});
            }
        }

        std::filesystem::create_directories(spec.output);
        std::string file;
        if (opts.format == "csv") {
            file = "sweep.csv";
            CsvWriter w(spec.output / file, "sweep", config,
                        "policy,C,alpha,rho,delta,tau,final_mean_theoretical_regret,"
                        "final_mean_empirical_regret,final_std");
            for (const auto& r : rows) {
                w.row(r.label, param_cell(r.parameters, "C"), param_cell(r.parameters, "alpha"),
                      param_cell(r.parameters, "rho"), param_cell(r.parameters, "delta"),
                      param_cell(r.parameters, "tau"), r.curve.mean_theoretical.back(),
                      r.curve.mean_empirical.back(), r.curve.std_theoretical.back());
            }
        } else {
            file = "sweep.json";
            json doc;
            doc["config"] = config;
            doc["cells"] = json::array();
            for (const auto& r : rows) {
                doc["cells"].push_back({{"policy", r.label},
                                        {"parameters", r.parameters},
                                        {"final_mean_theoretical_regret", r.curve.mean_theoretical.back()},
                                        {"final_mean_empirical_regret", r.curve.mean_empirical.back()},
                                        {"final_std", r.curve.std_theoretical.back()}});
            }
            write_json(spec.output / file, doc);
        }

        json summary;
        summary["command"] = "sweep";
        summary["config"] = config;
        summary["seed"] = *spec.seed;
        summary["files"] = {file};
        summary["cells"] = rows.size();
        summary["threads"] = threads;
        summary["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        summary["timestamp"] = timestamp_utc();
        write_json(spec.output / "summary.json", summary);
        out << "[sweep] " << rows.size() << " cells written to " << spec.output.string() << '\n';
        return static_cast<int>(kOk);
    });
}

namespace {

BoundInputs parse_bound_inputs(const json& doc) {
    if (!doc.is_object()) throw ValidationError("bound inputs: expected a JSON object");
    static const std::set<std::string> allowed = {"K", "A", "delta_mu_max", "delta_a_min", "t",
                                                  "delta", "delta_mu_list", "optimal_arms"};
    for (const auto& [key, _] : doc.items()) {
        if (!allowed.contains(key)) throw ValidationError(key + ": unknown key");
    }
    auto count = [&](const char* key, bool required, std::size_t fallback) -> std::size_t {
        if (!doc.contains(key)) {
            if (required) throw ValidationError(std::string(key) + ": missing");
            return fallback;
        }
        const auto& v = doc.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ValidationError(std::string(key) + ": expected a non-negative integer");
        }
        return doc.at(key).get<std::size_t>();
    };
    auto number = [&](const char* key, bool required, double fallback) -> double {
        if (!doc.contains(key)) {
            if (required) throw ValidationError(std::string(key) + ": missing");
            return fallback;
        }
        if (!doc.at(key).is_number()) throw ValidationError(std::string(key) + ": expected a number");
        return doc.at(key).get<double>();
    };

    BoundInputs in;
    in.K = count("K", true, 0);
    in.A = number("A", true, 0.0);
    in.t = count("t", true, 0);
    in.delta = number("delta", false, 0.05);
    in.delta_mu_max = number("delta_mu_max", false, 0.0);
    in.delta_a_min = number("delta_a_min", false, 0.0);
    in.optimal_arms = count("optimal_arms", false, 1);
    if (doc.contains("delta_mu_list")) {
        if (!doc.at("delta_mu_list").is_array()) {
            throw ValidationError("delta_mu_list: expected a list of numbers");
        }
        for (const auto& v : doc.at("delta_mu_list")) {
            if (!v.is_number()) throw ValidationError("delta_mu_list: expected a list of numbers");
            in.delta_mu_list.push_back(v.get<double>());
        }
    }
    return in;
}

json bound_json(const RegretBound& b) {
    json j;
    j["high_probability"] = b.high_probability;
    j["expectation"] = b.expectation ? json(*b.expectation) : json(nullptr);
    if (!b.note.empty()) j["reason"] = b.note;
    return j;
}

// Evaluates one bound; an input that only this bound rejects becomes an
// error entry instead of failing the whole command.
template <class Fn>
json evaluate(Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        return {{"error", e.what()}};
    }
}

json lemma_json(const char* check, const LemmaCheck& r, std::size_t t, double epsilon) {
    return {{"check", check},
            {"t", t},
            {"epsilon", epsilon},
            {"trials", r.trials},
            {"hits", r.hits},
            {"empirical_prob", r.empirical_prob},
            {"std_error", r.std_error},
            {"bound", r.bound},
            {"pass", r.pass}};
}

}  // namespace

int cmd_bound(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        json doc;
        try {
            if (opts.spec.empty() || opts.spec == "-") {
                doc = json::parse(std::cin);
            } else {
                std::ifstream in(opts.spec);
                if (!in) throw ValidationError("cannot open " + opts.spec.string());
                doc = json::parse(in);
            }
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("malformed bound inputs: ") + e.what());
        }
        const BoundInputs in = parse_bound_inputs(doc);
        if (!(in.A > 0.0)) throw ValidationError("A: must be > 0");
        if (!(in.delta > 0.0 && in.delta < 1.0)) throw ValidationError("delta: must lie in (0, 1)");
        if (in.t == 0) throw ValidationError("t: must be >= 1");

        json result;
        result["inputs"] = doc;
        result["prop43"] = evaluate([&] { return bound_json(prop43_regret_bound(in)); });
        result["prop44"] = evaluate([&] { return bound_json(prop44_regret_bound(in)); });
        if (doc.contains("delta_mu_list")) {
            result["ucb"] = evaluate([&] { return json(ucb_regret_bound(in.delta_mu_list, in.t)); });
        } else {
            result["ucb"] = nullptr;
        }
        const std::string text = result.dump(2);
        out << text << '\n';
        if (opts.out) {
            std::filesystem::create_directories(*opts.out);
            write_json(*opts.out / "bound.json", result);
        }
        return static_cast<int>(kOk);
    });
}

int cmd_check_lemma(const CommonOptions& opts, const LemmaOptions& lemma, std::ostream& out,
                    std::ostream& err) {
    return guarded(err, [&] {
        if (lemma.trials == 0) throw ValidationError("--trials: must be >= 1");
        if (!(lemma.epsilon > 0.0)) throw ValidationError("--epsilon: must be > 0");
        const std::size_t threads = resolve_threads(opts.threads);
        const std::uint64_t seed = opts.seed.value_or(1);

        json result;
        if (!opts.spec.empty()) {
            auto spec = load_experiment(opts.spec);
            if (opts.seed) spec.seed = opts.seed;
            const auto problem = build_problem(spec, 0);
            const auto r = lemma42_check(*problem, lemma.t, lemma.epsilon, lemma.trials, seed, threads);
            result = lemma_json("any_arm_min_tail", r, lemma.t, lemma.epsilon);
            result["arms"] = problem->size();
            result["A"] = *problem->lower_bound_A();
        } else {
            if (lemma.arms == 0) throw ValidationError("--arms: must be >= 1");
            const ArmSpec arm = UniformSegment{lemma.center, lemma.radius};
            validate(arm);
            if (lemma.arms == 1) {
                const auto r = lemma41_check(arm, lemma.t, lemma.epsilon, lemma.trials, seed, threads);
                result = lemma_json("single_arm_min_tail", r, lemma.t, lemma.epsilon);
            } else {
                const BanditProblem problem(std::vector<ArmSpec>(lemma.arms, arm));
                const auto r = lemma42_check(problem, lemma.t, lemma.epsilon, lemma.trials, seed, threads);
                result = lemma_json("any_arm_min_tail", r, lemma.t, lemma.epsilon);
            }
            result["arms"] = lemma.arms;
            result["A"] = *lower_bound_constant(arm);
        }
        result["seed"] = seed;
        out << result.dump(2) << '\n';
        if (opts.out) {
            std::filesystem::create_directories(*opts.out);
            write_json(*opts.out / "check_lemma.json", result);
        }
        return static_cast<int>(kOk);
    });
}

int main(int argc, char** argv) {
    CLI::App app{"Risk-aware multi-armed bandit simulations"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    LemmaOptions lemma;

    auto add_common = [&](CLI::App* cmd, bool spec_required) {
        auto* spec = cmd->add_option("--spec", opts.spec, "Experiment or input file");
        if (spec_required) spec->required();
        cmd->add_option("--out", out_dir, "Output directory (overrides the file)");
        cmd->add_option("--seed", seed, "Master seed (overrides the file)");
        cmd->add_option("--threads", threads, "Worker threads (default: RISKBANDIT_THREADS or all cores)");
        cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    };

    auto* run = app.add_subcommand("run", "Run every policy on every instance and write curves");
    add_common(run, true);
    auto* sweep = app.add_subcommand("sweep", "Run each policy's parameter grid");
    add_common(sweep, true);
    auto* bound = app.add_subcommand("bound", "Evaluate closed-form regret bounds from JSON inputs");
    add_common(bound, false);
    auto* check = app.add_subcommand("check-lemma", "Monte-Carlo check of the min-tail inequalities");
    add_common(check, false);
    check->add_option("--t", lemma.t, "Samples per arm");
    check->add_option("--epsilon", lemma.epsilon, "Distance above the infimum");
    check->add_option("--trials", lemma.trials, "Monte-Carlo trials");
    check->add_option("--center", lemma.center, "Uniform segment center");
    check->add_option("--radius", lemma.radius, "Uniform segment radius");
    check->add_option("--arms", lemma.arms, "Number of identical arms");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidationFailure;
    }

    const auto* active = app.get_subcommands().front();
    if (active->count("--out")) opts.out = out_dir;
    if (active->count("--seed")) opts.seed = seed;
    if (active->count("--threads")) opts.threads = threads;

    if (run->parsed()) return cmd_run(opts, std::cout, std::cerr);
    if (sweep->parsed()) return cmd_sweep(opts, std::cout, std::cerr);
    if (bound->parsed()) return cmd_bound(opts, std::cout, std::cerr);
    return cmd_check_lemma(opts, lemma, std::cout, std::cerr);
}

}  // namespace riskbandit::cli
