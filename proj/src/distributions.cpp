#include "riskbandit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "riskbandit/error.hpp"
#include "riskbandit/numeric.hpp"

namespace riskbandit {

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Closed-form pieces of the renormalized truncated mixture.
class MixtureIntegrals {
public:
    explicit MixtureIntegrals(const TruncatedGaussianMixture& m) : m_(m) {
        mass_ = unnormalized_mass(1.0);
        if (!(mass_ > 0.0)) {
            throw DegenerateMixture("mixture places no mass on [" + std::to_string(m.floor) +
                                    ", 1]");
        }
    }

    double cdf(double x) const {
        if (x <= m_.floor) return 0.0;
        if (x >= 1.0) return 1.0;
        return unnormalized_mass(x) / mass_;
    }

    // E[X; X < x] under the renormalized density.
    double partial_expectation(double x) const {
        x = std::clamp(x, m_.floor, 1.0);
        double sum = 0.0;
        for (const auto& c : m_.components) {
            const double za = (m_.floor - c.mean) / c.stddev;
            const double zx = (x - c.mean) / c.stddev;
            sum += c.weight * (c.mean * (std_normal_cdf(zx) - std_normal_cdf(za)) -
                               c.stddev * (std_normal_pdf(zx) - std_normal_pdf(za)));
        }
        return sum / mass_;
    }

    double quantile(double alpha) const {
        if (alpha >= 1.0) return 1.0;
        double lo = m_.floor;
        double hi = 1.0;
        for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
            const double mid = 0.5 * (lo + hi);
            (cdf(mid) < alpha ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    double unnormalized_mass(double x) const {
        double sum = 0.0;
        for (const auto& c : m_.components) {
            sum += c.weight * (std_normal_cdf((x - c.mean) / c.stddev) -
                               std_normal_cdf((m_.floor - c.mean) / c.stddev));
        }
        return sum;
    }

    const TruncatedGaussianMixture& m_;
    double mass_ = 0.0;
};

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ValidationError("risk level alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
}

std::vector<double> sorted_copy(const std::vector<double>& v) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

void validate(const ArmSpec& spec) {
    std::visit(
        overloaded{
            [](const UniformSegment& u) {
                if (!(u.radius > 0.0)) throw ValidationError("uniform segment radius must be > 0");
                if (u.center - u.radius < 0.0 || u.center + u.radius > 1.0) {
                    throw ValidationError("uniform segment [" + std::to_string(u.center - u.radius) +
                                          ", " + std::to_string(u.center + u.radius) +
                                          "] escapes [0, 1]");
                }
            },
            [](const TruncatedGaussianMixture& m) {
                if (!(m.floor >= 0.0 && m.floor < 1.0)) {
                    throw ValidationError("mixture floor must lie in [0, 1)");
                }
                if (m.components.empty()) throw ValidationError("mixture has no components");
                double total = 0.0;
                for (const auto& c : m.components) {
                    if (!(c.weight > 0.0)) throw ValidationError("mixture weights must be > 0");
                    if (!(c.stddev > 0.0)) throw ValidationError("mixture stddev must be > 0");
                    if (!std::isfinite(c.mean)) throw ValidationError("mixture mean must be finite");
                    total += c.weight;
                }
                if (std::abs(total - 1.0) > 1e-12) {
                    throw ValidationError("mixture weights sum to " + std::to_string(total) +
                                          ", expected 1");
                }
            },
            [](const EmpiricalResample& e) {
                if (e.values.empty()) throw ValidationError("empirical arm has no values");
                for (double v : e.values) {
                    if (!(v >= 0.0 && v <= 1.0)) {
                        throw ValidationError("empirical value " + std::to_string(v) +
                                              " outside [0, 1]");
                    }
                }
            },
        },
        spec);
}

std::string describe(const ArmSpec& spec) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const UniformSegment& u) {
                       os << "uniform(center=" << u.center << ", radius=" << u.radius << ")";
                   },
                   [&](const TruncatedGaussianMixture& m) {
                       os << "mixture(floor=" << m.floor << ", components=" << m.components.size()
                          << ")";
                   },
                   [&](const EmpiricalResample& e) {
                       os << "empirical(n=" << e.values.size() << ")";
                   },
               },
               spec);
    return os.str();
}

double sample(const ArmSpec& spec, Rng& rng, std::uint64_t max_rejections) {
    return std::visit(
        overloaded{
            [&](const UniformSegment& u) {
                return rng.uniform(u.center - u.radius, u.center + u.radius);
            },
            [&](const TruncatedGaussianMixture& m) {
                for (std::uint64_t attempt = 0; attempt < max_rejections; ++attempt) {
                    const double u = rng.uniform01();
                    std::size_t j = 0;
                    double cumulative = m.components[0].weight;
                    while (u >= cumulative && j + 1 < m.components.size()) {
                        ++j;
                        cumulative += m.components[j].weight;
                    }
                    const auto& c = m.components[j];
                    const double r = rng.normal(c.mean, c.stddev);
                    if (r >= m.floor && r <= 1.0) return r;
                }
                throw DegenerateMixture("rejection sampling exceeded " +
                                        std::to_string(max_rejections) + " attempts");
            },
            [&](const EmpiricalResample& e) { return e.values[rng.below(e.values.size())]; },
        },
        spec);
}

double analytic_mean(const ArmSpec& spec) {
    validate(spec);
    return std::visit(overloaded{
                          [](const UniformSegment& u) { return u.center; },
                          [](const TruncatedGaussianMixture& m) {
                              return MixtureIntegrals(m).partial_expectation(1.0);
                          },
                          [](const EmpiricalResample& e) {
                              return std::accumulate(e.values.begin(), e.values.end(), 0.0) /
                                     static_cast<double>(e.values.size());
                          },
                      },
                      spec);
}

double essential_infimum(const ArmSpec& spec) {
    validate(spec);
    return std::visit(overloaded{
                          [](const UniformSegment& u) { return u.center - u.radius; },
                          [](const TruncatedGaussianMixture& m) { return m.floor; },
                          [](const EmpiricalResample& e) {
                              return *std::min_element(e.values.begin(), e.values.end());
                          },
                      },
                      spec);
}

double quantile_value(const ArmSpec& spec, double alpha) {
    validate(spec);
    check_alpha(alpha);
    return std::visit(overloaded{
                          [&](const UniformSegment& u) {
                              return (u.center - u.radius) + alpha * 2.0 * u.radius;
                          },
                          [&](const TruncatedGaussianMixture& m) {
                              return MixtureIntegrals(m).quantile(alpha);
                          },
                          [&](const EmpiricalResample& e) {
                              const auto s = sorted_copy(e.values);
                              return s[tail_count(alpha, s.size()) - 1];
                          },
                      },
                      spec);
}

double analytic_cvar(const ArmSpec& spec, double alpha) {
    validate(spec);
    check_alpha(alpha);
    return std::visit(
        overloaded{
            [&](const UniformSegment& u) { return (u.center - u.radius) + alpha * u.radius; },
            [&](const TruncatedGaussianMixture& m) {
                const MixtureIntegrals mix(m);
                const double q = mix.quantile(alpha);
                const double mass = mix.cdf(q);
                if (!(mass > 0.0)) return m.floor;
                return std::clamp(mix.partial_expectation(q) / mass, m.floor, q);
            },
            [&](const EmpiricalResample& e) {
                const auto s = sorted_copy(e.values);
                const std::size_t n = tail_count(alpha, s.size());
                double sum = 0.0;
                for (std::size_t i = 0; i < n; ++i) sum += s[i];
                return sum / static_cast<double>(n);
            },
        },
        spec);
}

std::optional<double> lower_bound_constant(const ArmSpec& spec) {
    if (const auto* u = std::get_if<UniformSegment>(&spec)) return 1.0 / (2.0 * u->radius);
    return std::nullopt;
}

}  // namespace riskbandit
