#include <algorithm>
#include <cmath>
#include <numbers>

#include "riskbandit/error.hpp"
#include "riskbandit/generators.hpp"

namespace riskbandit {

namespace {

std::vector<double> draw_demand(const BatteryModel& model, Rng& rng) {
    std::vector<double> demand(model.steps);
    for (std::size_t h = 0; h < model.steps; ++h) {
        // Daily profile: trough at step 0, peak at step 12 of each 24.
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(h % 24) / 24.0;
        const double base = 0.3 - 0.15 * std::cos(phase);
        const double z = rng.normal(0.0, 1.0);
        const bool spike = rng.uniform01() < model.spike_probability;
        double d = std::max(0.0, base * (1.0 + model.noise * z));
        if (spike) d += model.spike_size;
        demand[h] = model.demand_scale * d;
    }
    return demand;
}

double dispatch_cost(const BatteryModel& model, const std::vector<double>& demand, double fraction) {
    double level = model.capacity;
    double cost = 0.0;
    double peak = 0.0;
    for (double d : demand) {
        double purchase = 0.0;
        if (d > model.threshold) {
            const double discharge = std::min(fraction * level, d);
            level -= discharge;
            purchase = d - discharge;
        } else {
            const double recharge = std::min(model.recharge_rate, model.capacity - level);
            level += recharge;
            purchase = d + recharge / model.recharge_efficiency;
        }
        cost += purchase;
        peak = std::max(peak, purchase);
    }
    return cost + model.peak_penalty * peak;
}

}  // namespace

std::vector<std::vector<double>> gen_battery_synthetic(std::size_t n_arms, std::size_t n_realizations,
                                                       Rng& demand_rng, const BatteryModel& model) {
    if (n_arms < 2) throw ConfigError("battery problem needs at least two arms");
    if (n_realizations < 1) throw ValidationError("battery problem needs at least one realization");

    std::vector<std::vector<double>> rewards(n_arms, std::vector<double>(n_realizations));
    for (std::size_t r = 0; r < n_realizations; ++r) {
        // Every strategy is evaluated on the same demand trajectory.
        const auto demand = draw_demand(model, demand_rng);
        for (std::size_t k = 0; k < n_arms; ++k) {
            const double fraction = static_cast<double>(k + 1) / static_cast<double>(n_arms);
            rewards[k][r] = -dispatch_cost(model, demand, fraction);
        }
    }
    rescale_min_max(rewards);
    return rewards;
}

}  // namespace riskbandit
