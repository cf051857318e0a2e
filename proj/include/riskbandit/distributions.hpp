#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "riskbandit/rng.hpp"

namespace riskbandit {

// U([center - radius, center + radius]).
struct UniformSegment {
    double center = 0.5;
    double radius = 0.5;
};

struct GaussianComponent {
    double weight = 1.0;
    double mean = 0.5;
    double stddev = 0.1;
};

// Mixture of normals restricted to [floor, 1]. Sampling redraws both the
// component and the value until the value lands in range, so the density is
// the mixture density on [floor, 1] renormalized as a whole.
struct TruncatedGaussianMixture {
    double floor = 0.0;
    std::vector<GaussianComponent> components;
};

// Uniform resampling with replacement from a fixed list of realizations.
struct EmpiricalResample {
    std::vector<double> values;
};

using ArmSpec = std::variant<UniformSegment, TruncatedGaussianMixture, EmpiricalResample>;

inline constexpr std::uint64_t kDefaultMaxRejections = 1'000'000;

// Throws ValidationError describing the first violated invariant.
void validate(const ArmSpec& spec);

std::string describe(const ArmSpec& spec);

// One reward in [essential_infimum(spec), 1]. Throws DegenerateMixture when
// rejection sampling exceeds `max_rejections` attempts.
double sample(const ArmSpec& spec, Rng& rng, std::uint64_t max_rejections = kDefaultMaxRejections);

double analytic_mean(const ArmSpec& spec);
double essential_infimum(const ArmSpec& spec);

// Largest v with P(X < v) = alpha for continuous arms; the ceil(alpha m)-th
// smallest value for empirical arms.
double quantile_value(const ArmSpec& spec, double alpha);

// E[X | X below its alpha-quantile]. Non-decreasing in alpha, equal to the
// mean at alpha = 1.
double analytic_cvar(const ArmSpec& spec, double alpha);

// Constant A with P(X <= a + eps) >= A eps near the infimum, when known in
// closed form (uniform segments only).
std::optional<double> lower_bound_constant(const ArmSpec& spec);

}  // namespace riskbandit
