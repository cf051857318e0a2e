#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskbandit/generators.hpp"
#include "riskbandit/harness.hpp"

namespace riskbandit {

inline constexpr int kCsvSchemaVersion = 1;

struct ProblemSpec {
    // "proof_of_concept", "mixture", "csv" or "battery".
    std::string generator = "proof_of_concept";
    ProofOfConceptParams proof_of_concept;
    std::size_t K = 20;
    std::filesystem::path csv_path;
    bool rescale = false;
    std::size_t n_realizations = 117;
    BatteryModel battery;
};

struct PolicySpec {
    std::string label;
    PolicyConfig config;
    // Resolved per problem: delta = 1 / T^2, tau = K (T / 14)^(2/3).
    bool delta_auto = false;
    bool tau_auto = false;
    SweepGrid grid;
};

struct ExperimentSpec {
    ProblemSpec problem;
    std::vector<PolicySpec> policies;
    std::size_t horizon = 0;
    std::size_t runs = 1;
    std::size_t instances = 1;
    std::optional<std::uint64_t> seed;
    std::filesystem::path output = "out";
    bool random_ties = false;
};

// Parses and schema-checks an experiment document. Unknown keys and
// wrongly typed fields raise ValidationError naming the field. The seed may
// be absent here and supplied later (e.g. by --seed).
ExperimentSpec parse_experiment(const nlohmann::json& doc);
ExperimentSpec load_experiment(const std::filesystem::path& path);

// Final check after command-line overrides: seed present, horizon and runs
// positive, policies non-empty.
void validate(const ExperimentSpec& spec);

// Canonical JSON of everything that determines the results. The output
// directory is left out so identical experiments written to different
// places embed the same config.
nlohmann::json resolved_config(const ExperimentSpec& spec);

// Problem for instance `index`. Random families draw from a stream derived
// from (seed, index); fixed families return the same problem every time.
std::shared_ptr<const BanditProblem> build_problem(const ExperimentSpec& spec, std::size_t index);

// Policy with "auto" parameters filled in for K arms and the spec horizon.
PolicyConfig resolve_policy(const PolicySpec& policy, std::size_t K, std::size_t horizon);

std::uint64_t instance_run_seed(std::uint64_t seed, std::size_t instance);

struct PolicyResult {
    std::string label;
    PolicyConfig policy;
    std::map<std::string, double> parameters;
    RegretCurve curve;
    std::vector<double> sorted_rewards;
    // Mean over runs of the final regret, one entry per instance, each
    // column sorted increasing on its own.
    std::vector<double> sorted_final_empirical;
    std::vector<double> sorted_final_theoretical;
};

// Every (instance, run) episode of one policy, folded in cell order.
PolicyResult run_policy(const ExperimentSpec& spec,
                        const std::vector<std::shared_ptr<const BanditProblem>>& problems,
                        const PolicySpec& policy, const PolicyConfig& config, std::size_t threads);

std::vector<std::shared_ptr<const BanditProblem>> build_problems(const ExperimentSpec& spec);

}  // namespace riskbandit
