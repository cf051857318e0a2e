#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "riskbandit/error.hpp"
#include "riskbandit/policies.hpp"

using namespace riskbandit;

namespace {

ArmStats stats_of(std::initializer_list<double> rewards) {
    ArmStats s;
    for (double r : rewards) s.update(r);
    return s;
}

std::vector<ArmStats> random_arms(std::mt19937_64& gen, std::size_t k, std::size_t max_count,
                                  double hi = 1.0) {
    std::uniform_real_distribution<double> reward(0.0, hi);
    std::vector<ArmStats> arms(k);
    for (auto& a : arms) {
        const std::size_t n = 1 + gen() % max_count;
        for (std::size_t i = 0; i < n; ++i) a.update(reward(gen));
    }
    return arms;
}

}  // namespace

TEST_CASE("ucb index") {
    CHECK(ucb_index(stats_of({0.5}), 1, 1.0) == 0.5);
    // sqrt(log(55) / 4) = 1.000916...
    CHECK(ucb_index(stats_of({0.5, 0.5, 0.5, 0.5}), 55, 1.0) ==
          doctest::Approx(1.500916228416803).epsilon(1e-12));
    CHECK(ucb_index(stats_of({0.2, 0.4}), 1000, 0.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(ucb_index(ArmStats{}, 5, 1.0), UndefinedStatistic);
}

TEST_CASE("marab index") {
    const auto s = stats_of({0.1, 0.5, 0.9});
    CHECK(marab_index(s, 10, 0.0, 0.4) == s.cvar(0.4));
    // ceil(t alpha) = 1 zeroes the log term.
    CHECK(marab_index(s, 2, 1000.0, 0.4) == s.cvar(0.4));
    // 0.3 - sqrt(log 4 / 2)
    CHECK(marab_index(s, 10, 1.0, 0.4) == doctest::Approx(-0.5325546111576978).epsilon(1e-12));
    CHECK_THROWS_AS(marab_index(ArmStats{}, 5, 1.0, 0.1), UndefinedStatistic);
}

TEST_CASE("min index") {
    CHECK(min_index(stats_of({0.3, 0.7})) == 0.3);
    CHECK(min_index(stats_of({0.9})) == 0.9);
    CHECK_THROWS_AS(min_index(ArmStats{}), UndefinedStatistic);
}

TEST_CASE("mvlcb index") {
    // variance 0.25, mean 0.5, rho 1, log(1/delta) = 2, n = 2
    const auto s = stats_of({0.0, 1.0});
    CHECK(mvlcb_index(s, 1.0, std::exp(-2.0)) == doctest::Approx(-4.492640687119286).epsilon(1e-12));
    // The width vanishes as n grows.
    ArmStats big;
    for (int i = 0; i < 100000; ++i) big.update(i % 2 ? 1.0 : 0.0);
    CHECK(mvlcb_index(big, 1.0, 0.5) == doctest::Approx(big.mv_value(1.0)).epsilon(0.03));
    const auto a = stats_of({0.2, 0.6});
    CHECK(mvlcb_index(a, 2.0, 0.1) == mvlcb_index(stats_of({0.2, 0.6}), 2.0, 0.1));
}

TEST_CASE("initialization pass picks the lowest unpulled arm") {
    std::vector<ArmStats> arms = {stats_of({0.5}), ArmStats{}, stats_of({0.5})};
    PolicyState state(UcbConfig{1.0});
    CHECK(select_arm(state, arms, 3) == 1);

    for (const PolicyConfig& cfg : {PolicyConfig{UcbConfig{1.0}}, PolicyConfig{MinConfig{}},
                                    PolicyConfig{MarabConfig{1.0, 0.1}},
                                    PolicyConfig{MvLcbConfig{2.0, 0.01}}}) {
        std::vector<ArmStats> fresh(5);
        PolicyState st(cfg);
        for (std::size_t t = 1; t <= 5; ++t) {
            const auto arm = select_arm(st, fresh, t);
            CHECK(arm == t - 1);
            fresh[arm].update(0.5);
        }
    }
}

TEST_CASE("argmax and argmin selection with lowest-index ties") {
    std::vector<ArmStats> arms = {stats_of({0.3, 0.8}), stats_of({0.7, 0.9}), stats_of({0.5})};
    PolicyState min_state(MinConfig{});
    CHECK(select_arm(min_state, arms, 10) == 1);

    std::vector<ArmStats> tied = {stats_of({0.4}), stats_of({0.6}), stats_of({0.6})};
    CHECK(select_arm(min_state, tied, 10) == 1);

    PolicyState mv_state(MvLcbConfig{1.0, 0.1});
    std::vector<ArmStats> same = {stats_of({0.4, 0.6}), stats_of({0.4, 0.6})};
    CHECK(select_arm(mv_state, same, 10) == 0);
    // Lower MV-LCB index wins: higher mean, same spread.
    std::vector<ArmStats> mv = {stats_of({0.2, 0.4}), stats_of({0.6, 0.8})};
    CHECK(select_arm(mv_state, mv, 10) == 1);
}

TEST_CASE("fewer than two arms is a configuration error") {
    std::vector<ArmStats> one = {stats_of({0.5})};
    PolicyState state(MinConfig{});
    CHECK_THROWS_AS(select_arm(state, one, 2), ConfigError);
}

TEST_CASE("expexp explores round-robin then freezes") {
    PolicyState state(ExpExpConfig{2.0, 6});
    std::vector<ArmStats> arms(3);
    const double rewards[3] = {0.2, 0.9, 0.5};
    for (std::size_t t = 1; t <= 6; ++t) {
        const auto arm = select_arm(state, arms, t);
        CHECK(arm == (t - 1) % 3);
        arms[arm].update(rewards[arm]);
    }
    CHECK_FALSE(state.frozen_choice.has_value());
    CHECK(select_arm(state, arms, 7) == 1);
    REQUIRE(state.frozen_choice.has_value());
    // Later evidence does not move the frozen arm.
    for (int i = 0; i < 50; ++i) arms[1].update(0.0);
    CHECK(select_arm(state, arms, 8) == 1);

    PolicyState s2(ExpExpConfig{2.0, 6});
    std::vector<ArmStats> fresh(3);
    CHECK(select_arm(s2, fresh, 4) == 0);
}

TEST_CASE("common reward translation shifts indices by the constant") {
    std::mt19937_64 gen(31);
    for (int rep = 0; rep < 100; ++rep) {
        const double c = 0.3;
        auto base = random_arms(gen, 4, 30, 0.7);
        std::vector<ArmStats> shifted(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            for (double r : base[i].rewards_sorted()) shifted[i].update(r + c);
        }
        const std::size_t t = 1 + gen() % 500;
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(ucb_index(shifted[i], t, 0.5) == doctest::Approx(ucb_index(base[i], t, 0.5) + c).epsilon(1e-12));
            CHECK(marab_index(shifted[i], t, 0.5, 0.2) ==
                  doctest::Approx(marab_index(base[i], t, 0.5, 0.2) + c).epsilon(1e-12));
            CHECK(min_index(shifted[i]) == doctest::Approx(min_index(base[i]) + c).epsilon(1e-15));
        }
        PolicyState a(MinConfig{}), b(MinConfig{});
        CHECK(select_arm(a, base, t) == select_arm(b, shifted, t));
    }
}

TEST_CASE("marab with C = 0 and small alpha is MIN") {
    std::mt19937_64 gen(5);
    for (int rep = 0; rep < 100; ++rep) {
        const auto arms = random_arms(gen, 5, 50);
        std::size_t max_count = 0;
        for (const auto& a : arms) max_count = std::max(max_count, a.count());
        const double alpha = 1.0 / static_cast<double>(max_count + 1);
        for (const auto& a : arms) CHECK(marab_index(a, 100, 0.0, alpha) == min_index(a));
        PolicyState marab(MarabConfig{0.0, alpha}), min(MinConfig{});
        CHECK(select_arm(marab, arms, 100) == select_arm(min, arms, 100));
    }
}

TEST_CASE("select_arm is pure for deterministic policies") {
    std::mt19937_64 gen(12);
    const auto arms = random_arms(gen, 6, 20);
    for (const PolicyConfig& cfg : {PolicyConfig{UcbConfig{1.0}}, PolicyConfig{MarabConfig{1.0, 0.2}},
                                    PolicyConfig{MvLcbConfig{2.0, 0.01}}}) {
        PolicyState s(cfg);
        const auto first = select_arm(s, arms, 50);
        for (int i = 0; i < 10; ++i) CHECK(select_arm(s, arms, 50) == first);
    }
}

TEST_CASE("random tie-breaking visits every tied arm") {
    std::vector<ArmStats> tied = {stats_of({0.6}), stats_of({0.6}), stats_of({0.2})};
    PolicyState s(MinConfig{});
    s.tie_breaker.emplace(4);
    bool seen[3] = {};
    for (int i = 0; i < 100; ++i) seen[select_arm(s, tied, 5)] = true;
    CHECK(seen[0]);
    CHECK(seen[1]);
    CHECK_FALSE(seen[2]);
}

TEST_CASE("marab cvar decreases monotonically in the initial phase") {
    Rng rng(2);
    const double alpha = 0.05;
    ArmStats s;
    s.update(rng.uniform01());
    double prev = s.cvar(alpha);
    while (static_cast<double>(s.count()) < 1.0 / alpha - 1) {
        s.update(rng.uniform01());
        const double c = s.cvar(alpha);
        CHECK(c == s.min());
        CHECK(c <= prev);
        prev = c;
    }
}

TEST_CASE("policy parameter validation") {
    CHECK_THROWS_AS(validate(PolicyConfig{UcbConfig{0.0}}), ValidationError);
    CHECK_NOTHROW(validate(PolicyConfig{MarabConfig{0.0, 0.5}}));
    CHECK_THROWS_AS(validate(PolicyConfig{MarabConfig{1.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(validate(PolicyConfig{MvLcbConfig{1.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(validate(PolicyConfig{MvLcbConfig{0.0, 0.5}}), ValidationError);
    CHECK_THROWS_AS(validate(PolicyConfig{ExpExpConfig{1.0, 100}}, 50), ValidationError);
    CHECK(policy_name(PolicyConfig{MarabConfig{}}) == "marab");
}
