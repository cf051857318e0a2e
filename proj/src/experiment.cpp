#include "riskbandit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "riskbandit/error.hpp"

namespace riskbandit {

using nlohmann::json;

namespace {

constexpr std::uint64_t kProblemStream = 0x70726f626c656dULL;
constexpr std::uint64_t kRunStream = 0x72756e73ULL;

void reject_unknown_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw ValidationError(where + key + ": unknown key");
    }
}

const json& require_object(const json& v, const std::string& field) {
    if (!v.is_object()) throw ValidationError(field + ": expected an object");
    return v;
}

double get_number(const json& obj, const std::string& key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(where + key + ": expected a number");
    return v.get<double>();
}

// Parsed documents store positive integers as unsigned, built ones as signed.
bool is_non_negative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::size_t get_count(const json& obj, const std::string& key, const std::string& where,
                      std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!is_non_negative_integer(v)) throw ValidationError(where + key + ": expected a non-negative integer");
    return v.get<std::size_t>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& where, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw ValidationError(where + key + ": expected true or false");
    return v.get<bool>();
}

// A number, or the string "auto" (returns nullopt).
std::optional<double> get_number_or_auto(const json& obj, const std::string& key,
                                         const std::string& where, double fallback) {
    if (obj.contains(key) && obj.at(key).is_string()) {
        if (obj.at(key).get<std::string>() != "auto") {
            throw ValidationError(where + key + ": expected a number or \"auto\"");
        }
        return std::nullopt;
    }
    return get_number(obj, key, where, fallback);
}

ProblemSpec parse_problem(const json& doc) {
    const std::string where = "problem.";
    require_object(doc, "problem");
    ProblemSpec p;
    if (!doc.contains("generator") || !doc.at("generator").is_string()) {
        throw ValidationError("problem.generator: expected one of proof_of_concept, mixture, csv, battery");
    }
    p.generator = doc.at("generator").get<std::string>();
    if (p.generator == "proof_of_concept") {
        reject_unknown_keys(doc, where, {"generator", "K", "mu_star", "a_star", "delta_max", "r_max"});
        auto& poc = p.proof_of_concept;
        poc.K = get_count(doc, "K", where, poc.K);
        poc.mu_star = get_number(doc, "mu_star", where, poc.mu_star);
        poc.a_star = get_number(doc, "a_star", where, poc.a_star);
        poc.delta_max = get_number(doc, "delta_max", where, poc.delta_max);
        poc.r_max = get_number(doc, "r_max", where, poc.r_max);
        p.K = poc.K;
    } else if (p.generator == "mixture") {
        reject_unknown_keys(doc, where, {"generator", "K"});
        p.K = get_count(doc, "K", where, p.K);
    } else if (p.generator == "csv") {
        reject_unknown_keys(doc, where, {"generator", "path", "rescale"});
        if (!doc.contains("path") || !doc.at("path").is_string()) {
            throw ValidationError("problem.path: expected a file path");
        }
        p.csv_path = doc.at("path").get<std::string>();
        p.rescale = get_bool(doc, "rescale", where, false);
    } else if (p.generator == "battery") {
        reject_unknown_keys(doc, where, {"generator", "n_arms", "n_realizations", "demand_scale"});
        p.K = get_count(doc, "n_arms", where, p.K);
        p.n_realizations = get_count(doc, "n_realizations", where, p.n_realizations);
        p.battery.demand_scale = get_number(doc, "demand_scale", where, p.battery.demand_scale);
    } else {
        throw ValidationError("problem.generator: unknown generator '" + p.generator + "'");
    }
    return p;
}

PolicySpec parse_policy(const json& doc, std::size_t index) {
    const std::string where = "policies[" + std::to_string(index) + "].";
    require_object(doc, where.substr(0, where.size() - 1));
    if (!doc.contains("name") || !doc.at("name").is_string()) {
        throw ValidationError(where + "name: expected one of ucb, min, marab, mvlcb, expexp");
    }
    const auto name = doc.at("name").get<std::string>();
    PolicySpec p;
    std::set<std::string> allowed = {"name", "label", "grid"};
    if (name == "ucb") {
        allowed.insert("C");
        p.config = UcbConfig{get_number(doc, "C", where, 1e-3)};
    } else if (name == "min") {
        p.config = MinConfig{};
    } else if (name == "marab") {
        allowed.insert({"C", "alpha"});
        p.config = MarabConfig{get_number(doc, "C", where, 1e-6), get_number(doc, "alpha", where, 0.2)};
    } else if (name == "mvlcb") {
        allowed.insert({"rho", "delta"});
        const auto delta = get_number_or_auto(doc, "delta", where, 0.0);
        p.delta_auto = !delta.has_value() || !doc.contains("delta");
        p.config = MvLcbConfig{get_number(doc, "rho", where, 2.0), delta.value_or(0.0)};
    } else if (name == "expexp") {
        allowed.insert({"rho", "tau"});
        p.tau_auto = !doc.contains("tau") || doc.at("tau").is_string();
        ExpExpConfig c{get_number(doc, "rho", where, 2.0), 0};
        if (!p.tau_auto) c.tau = get_count(doc, "tau", where, 0);
        get_number_or_auto(doc, "tau", where, 0.0);
        p.config = c;
    } else {
        throw ValidationError(where + "name: unknown policy '" + name + "'");
    }
    reject_unknown_keys(doc, where, allowed);

    if (doc.contains("label")) {
        if (!doc.at("label").is_string()) throw ValidationError(where + "label: expected a string");
        p.label = doc.at("label").get<std::string>();
    } else {
        p.label = name;
    }
    if (doc.contains("grid")) {
        const auto& grid = require_object(doc.at("grid"), where + "grid");
        for (const auto& [key, values] : grid.items()) {
            if (!values.is_array() || values.empty()) {
                throw ValidationError(where + "grid." + key + ": expected a non-empty list of numbers");
            }
            std::vector<double> list;
            for (const auto& v : values) {
                if (!v.is_number()) throw ValidationError(where + "grid." + key + ": expected numbers");
                list.push_back(v.get<double>());
            }
            // Checks the name against the policy.
            PolicyConfig probe = p.config;
            try {
                set_policy_parameter(probe, key, list.front());
            } catch (const ValidationError& e) {
                throw ValidationError(where + "grid." + key + ": " + e.what());
            }
            if (key == "tau") p.tau_auto = false;
            if (key == "delta") p.delta_auto = false;
            p.grid[key] = std::move(list);
        }
    }
    return p;
}

json policy_json(const PolicySpec& p) {
    json j;
    j["label"] = p.label;
    j["name"] = policy_name(p.config);
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
                j["delta"] = p.delta_auto ? json("auto") : json(c.delta);
            } else if constexpr (std::is_same_v<T, ExpExpConfig>) {
                j["rho"] = c.rho;
                j["tau"] = p.tau_auto ? json("auto") : json(c.tau);
            }
        },
        p.config);
    if (!p.grid.empty()) j["grid"] = p.grid;
    return j;
}

}  // namespace

ExperimentSpec parse_experiment(const json& doc) {
    require_object(doc, "experiment");
    reject_unknown_keys(doc, "",
                        {"problem", "policies", "horizon", "runs", "instances", "seed", "output",
                         "random_ties"});
    ExperimentSpec spec;
    if (!doc.contains("problem")) throw ValidationError("problem: missing");
    spec.problem = parse_problem(doc.at("problem"));

    if (!doc.contains("policies") || !doc.at("policies").is_array()) {
        throw ValidationError("policies: expected a list of policies");
    }
    for (std::size_t i = 0; i < doc.at("policies").size(); ++i) {
        spec.policies.push_back(parse_policy(doc.at("policies")[i], i));
    }
    spec.horizon = get_count(doc, "horizon", "", 0);
    spec.runs = get_count(doc, "runs", "", 1);
    spec.instances = get_count(doc, "instances", "", 1);
    if (doc.contains("seed")) {
        if (!is_non_negative_integer(doc.at("seed"))) {
            throw ValidationError("seed: expected a non-negative 64-bit integer");
        }
        spec.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("output")) {
        if (!doc.at("output").is_string()) throw ValidationError("output: expected a directory path");
        spec.output = doc.at("output").get<std::string>();
    }
    spec.random_ties = get_bool(doc, "random_ties", "", false);
    return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open experiment file " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    auto spec = parse_experiment(doc);
    // Relative CSV paths are taken relative to the experiment file.
    if (spec.problem.generator == "csv" && spec.problem.csv_path.is_relative()) {
        spec.problem.csv_path = path.parent_path() / spec.problem.csv_path;
    }
    return spec;
}

void validate(const ExperimentSpec& spec) {
    if (!spec.seed) throw ValidationError("seed: missing (set it in the file or pass --seed)");
    if (spec.horizon == 0) throw ValidationError("horizon: missing or zero");
    if (spec.runs == 0) throw ValidationError("runs: must be >= 1");
    if (spec.instances == 0) throw ValidationError("instances: must be >= 1");
    if (spec.policies.empty()) throw ValidationError("policies: at least one policy is required");
    std::set<std::string> labels;
    for (const auto& p : spec.policies) {
        if (!labels.insert(p.label).second) {
            throw ValidationError("policies: duplicate label '" + p.label + "'");
        }
    }
}

json resolved_config(const ExperimentSpec& spec) {
    json problem;
    const auto& p = spec.problem;
    problem["generator"] = p.generator;
    if (p.generator == "proof_of_concept") {
        problem["K"] = p.proof_of_concept.K;
        problem["mu_star"] = p.proof_of_concept.mu_star;
        problem["a_star"] = p.proof_of_concept.a_star;
        problem["delta_max"] = p.proof_of_concept.delta_max;
        problem["r_max"] = p.proof_of_concept.r_max;
    } else if (p.generator == "mixture") {
        problem["K"] = p.K;
    } else if (p.generator == "csv") {
        problem["path"] = p.csv_path.filename().string();
        problem["rescale"] = p.rescale;
    } else if (p.generator == "battery") {
        problem["n_arms"] = p.K;
        problem["n_realizations"] = p.n_realizations;
        problem["demand_scale"] = p.battery.demand_scale;
    }
    json policies = json::array();
    for (const auto& pol : spec.policies) policies.push_back(policy_json(pol));

    json j;
    j["csv_schema_version"] = kCsvSchemaVersion;
    j["problem"] = problem;
    j["policies"] = policies;
    j["horizon"] = spec.horizon;
    j["runs"] = spec.runs;
    j["instances"] = spec.instances;
    j["seed"] = spec.seed.value_or(0);
    j["random_ties"] = spec.random_ties;
    return j;
}

std::shared_ptr<const BanditProblem> build_problem(const ExperimentSpec& spec, std::size_t index) {
    const auto& p = spec.problem;
    const std::uint64_t seed = spec.seed.value_or(0);
    if (p.generator == "proof_of_concept") {
        return std::make_shared<const BanditProblem>(gen_proof_of_concept(p.proof_of_concept));
    }
    if (p.generator == "mixture") {
        Rng rng(derive_seed(seed, index, kProblemStream));
        return std::make_shared<const BanditProblem>(gen_mixture(p.K, rng));
    }
    if (p.generator == "csv") {
        return std::make_shared<const BanditProblem>(
            gen_from_matrix(read_matrix_csv(p.csv_path), MatrixOptions{p.rescale}));
    }
    if (p.generator == "battery") {
        Rng rng(derive_seed(seed, index, kProblemStream));
        return std::make_shared<const BanditProblem>(
            gen_from_matrix(gen_battery_synthetic(p.K, p.n_realizations, rng, p.battery)));
    }
    throw ValidationError("problem.generator: unknown generator '" + p.generator + "'");
}

std::vector<std::shared_ptr<const BanditProblem>> build_problems(const ExperimentSpec& spec) {
    const auto& g = spec.problem.generator;
    const bool per_instance = g == "mixture" || g == "battery";
    std::vector<std::shared_ptr<const BanditProblem>> problems;
    problems.reserve(spec.instances);
    for (std::size_t i = 0; i < spec.instances; ++i) {
        problems.push_back(per_instance || i == 0 ? build_problem(spec, i) : problems.front());
    }
    return problems;
}

PolicyConfig resolve_policy(const PolicySpec& policy, std::size_t K, std::size_t horizon) {
    PolicyConfig config = policy.config;
    const double T = static_cast<double>(horizon);
    if (auto* c = std::get_if<MvLcbConfig>(&config); c && policy.delta_auto) {
        c->delta = 1.0 / (T * T);
    }
    if (auto* c = std::get_if<ExpExpConfig>(&config); c && policy.tau_auto) {
        const double tau = static_cast<double>(K) * std::pow(T / 14.0, 2.0 / 3.0);
        c->tau = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(tau)), K, horizon);
    }
    return config;
}

std::uint64_t instance_run_seed(std::uint64_t seed, std::size_t instance) {
    return derive_seed(seed, instance, kRunStream);
}

PolicyResult run_policy(const ExperimentSpec& spec,
                        const std::vector<std::shared_ptr<const BanditProblem>>& problems,
                        const PolicySpec& policy, const PolicyConfig& config, std::size_t threads) {
    const std::size_t runs = spec.runs;
    const std::size_t units = problems.size() * runs;
    const std::uint64_t seed = spec.seed.value_or(0);

    auto make_cfg = [&](std::size_t instance) {
        RunConfig cfg;
        cfg.problem = problems[instance];
        cfg.policy = config;
        cfg.horizon = spec.horizon;
        cfg.seed = instance_run_seed(seed, instance);
        cfg.n_runs = runs;
        cfg.random_ties = spec.random_ties;
        return cfg;
    };
    for (std::size_t i = 0; i < problems.size(); ++i) validate(make_cfg(i));

    PolicyResult result;
    result.label = policy.label;
    result.policy = config;
    LedgerAccumulator acc;
    std::vector<double> final_emp(problems.size(), 0.0);
    std::vector<double> final_theo(problems.size(), 0.0);

    // Ledgers are held one chunk at a time and folded in unit order.
    const std::size_t chunk = std::max<std::size_t>(1, std::min<std::size_t>(units, 512));
    std::vector<RegretLedger> ledgers(chunk);
    for (std::size_t begin = 0; begin < units; begin += chunk) {
        const std::size_t end = std::min(units, begin + chunk);
        parallel_for(end - begin, threads, [&](std::size_t offset) {
            const std::size_t unit = begin + offset;
            ledgers[offset] = run_episode(make_cfg(unit / runs), unit % runs);
        });
        for (std::size_t unit = begin; unit < end; ++unit) {
            const auto& l = ledgers[unit - begin];
            acc.add(l);
            final_emp[unit / runs] += l.empirical.back();
            final_theo[unit / runs] += l.theoretical.back();
        }
    }
    for (auto& v : final_emp) v /= static_cast<double>(runs);
    for (auto& v : final_theo) v /= static_cast<double>(runs);

    result.curve = acc.curve();
    result.sorted_rewards = acc.sorted_mean_rewards();
    result.sorted_final_empirical = sorted_final_regret(std::move(final_emp));
    result.sorted_final_theoretical = sorted_final_regret(std::move(final_theo));
    return result;
}

}  // namespace riskbandit
