#include "riskbandit/generators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "riskbandit/error.hpp"

namespace riskbandit {

BanditProblem::BanditProblem(std::vector<ArmSpec> arms) : arms_(std::move(arms)) {
    if (arms_.empty()) throw ConfigError("a bandit problem needs at least one arm");

    bool all_have_A = true;
    double A = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < arms_.size(); ++i) {
        try {
            validate(arms_[i]);
        } catch (const ValidationError& e) {
            throw ValidationError("arm " + std::to_string(i + 1) + ": " + e.what());
        }
        means_.push_back(analytic_mean(arms_[i]));
        infima_.push_back(essential_infimum(arms_[i]));
        if (auto a = lower_bound_constant(arms_[i])) {
            A = std::min(A, *a);
        } else {
            all_have_A = false;
        }
    }
    if (all_have_A) lower_bound_A_ = A;

    // max_element returns the first maximum, i.e. ties go to the lowest index.
    best_mean_arm_ = static_cast<std::size_t>(std::max_element(means_.begin(), means_.end()) - means_.begin());
    best_min_arm_ = static_cast<std::size_t>(std::max_element(infima_.begin(), infima_.end()) - infima_.begin());
    const double best_mu = means_[best_mean_arm_];
    const double best_a = infima_[best_min_arm_];
    for (std::size_t i = 0; i < arms_.size(); ++i) {
        margins_mean_.push_back(best_mu - means_[i]);
        margins_min_.push_back(best_a - infima_[i]);
    }
}

BanditProblem gen_proof_of_concept(const ProofOfConceptParams& p) {
    if (p.K < 2) throw ConfigError("proof-of-concept problem needs K >= 2");
    if (!(p.a_star > 0.0 && p.a_star < p.mu_star)) {
        throw ValidationError("proof-of-concept: need 0 < a_star < mu_star");
    }
    if (!(p.delta_max >= 0.0) || !(p.r_max >= 0.0)) {
        throw ValidationError("proof-of-concept: delta_max and r_max must be >= 0");
    }

    const double r1 = p.mu_star - p.a_star;
    std::vector<ArmSpec> arms;
    arms.reserve(p.K);
    for (std::size_t i = 0; i < p.K; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(p.K - 1);
        const UniformSegment seg{p.mu_star - frac * p.delta_max, r1 + frac * p.r_max};
        if (seg.center - seg.radius < 0.0 || seg.center + seg.radius > 1.0) {
            std::ostringstream os;
            os << "proof-of-concept: arm " << i + 1 << " support [" << seg.center - seg.radius << ", "
               << seg.center + seg.radius << "] escapes [0, 1]";
            throw ValidationError(os.str());
        }
        arms.emplace_back(seg);
    }

    BanditProblem problem(std::move(arms));
    if (problem.best_mean_arm() != 0 || problem.best_min_arm() != 0) {
        throw std::logic_error("proof-of-concept: arm 1 must be best in mean and in infimum");
    }
    for (std::size_t i = 0; i < problem.size(); ++i) {
        if (problem.margins_min()[i] + 1e-12 < problem.margins_mean()[i]) {
            throw std::logic_error("proof-of-concept: min margin below mean margin");
        }
    }
    return problem;
}

BanditProblem gen_mixture(std::size_t K, Rng& rng) {
    if (K < 2) throw ConfigError("mixture problem needs K >= 2");
    std::vector<ArmSpec> arms;
    arms.reserve(K);
    for (std::size_t i = 0; i < K; ++i) {
        TruncatedGaussianMixture m;
        m.floor = rng.uniform(0.0, 0.05);
        const std::size_t n = 1 + rng.below(4);
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            GaussianComponent c;
            c.mean = rng.uniform01();
            c.stddev = rng.uniform(0.12, 0.5);
            // 1 - u keeps the weight strictly positive.
            c.weight = 1.0 - rng.uniform01();
            total += c.weight;
            m.components.push_back(c);
        }
        for (auto& c : m.components) c.weight /= total;
        arms.emplace_back(std::move(m));
    }
    return BanditProblem(std::move(arms));
}

void rescale_min_max(std::vector<std::vector<double>>& rows) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    for (auto& row : rows) {
        for (double& v : row) v = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.5;
    }
}

BanditProblem gen_from_matrix(std::vector<std::vector<double>> rows, MatrixOptions options) {
    if (rows.size() < 2) throw ConfigError("matrix problem needs at least two rows (arms)");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].empty()) throw ValidationError("matrix row " + std::to_string(i + 1) + " is empty");
        for (double v : rows[i]) {
            if (!std::isfinite(v)) {
                throw ValidationError("matrix row " + std::to_string(i + 1) + " has a non-finite value");
            }
        }
    }
    if (options.rescale) rescale_min_max(rows);
    std::vector<ArmSpec> arms;
    arms.reserve(rows.size());
    for (auto& row : rows) arms.emplace_back(EmpiricalResample{std::move(row)});
    return BanditProblem(std::move(arms));
}

std::vector<std::vector<double>> read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                      ": not a number: '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << row[j];
        }
        out << '\n';
    }
}

}  // namespace riskbandit
