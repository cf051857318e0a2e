#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace riskbandit::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kRuntimeFailure = 2 };

struct CommonOptions {
    std::filesystem::path spec;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string format = "csv";
};

struct LemmaOptions {
    std::size_t t = 10;
    double epsilon = 0.1;
    std::uint64_t trials = 100'000;
    double center = 0.5;
    double radius = 0.5;
    std::size_t arms = 1;
};

// --threads, then RISKBANDIT_THREADS, then hardware concurrency.
std::size_t resolve_threads(std::optional<std::size_t> requested);

// Each command reports errors on `err` and returns an ExitCode.
int cmd_run(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommonOptions& opts, std::ostream& out, std::ostream& err);
// Reads BoundInputs JSON from opts.spec ("-" for stdin) and prints results.
int cmd_bound(const CommonOptions& opts, std::ostream& out, std::ostream& err);
// With opts.spec set, checks every arm of that experiment's first problem
// instance; otherwise `arms` identical uniform segments.
int cmd_check_lemma(const CommonOptions& opts, const LemmaOptions& lemma, std::ostream& out,
                    std::ostream& err);

// Full command line: `riskbandit <run|sweep|bound|check-lemma> [flags]`.
int main(int argc, char** argv);

}  // namespace riskbandit::cli
