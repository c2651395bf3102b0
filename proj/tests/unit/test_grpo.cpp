#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "subsearch/grpo.hpp"

using subsearch::group_advantages;

TEST_CASE("the [1,0,0,0,1] fixture matches the hand-derived advantages") {
    auto adv = group_advantages({1, 0, 0, 0, 1});
    REQUIRE(adv.size() == 5);
    CHECK(adv[0] == doctest::Approx(1.22474487).epsilon(1e-6));
    CHECK(adv[1] == doctest::Approx(-0.81649658).epsilon(1e-6));
    CHECK(adv[2] == doctest::Approx(-0.81649658).epsilon(1e-6));
    CHECK(adv[3] == doctest::Approx(-0.81649658).epsilon(1e-6));
    CHECK(adv[4] == doctest::Approx(1.22474487).epsilon(1e-6));
}

TEST_CASE("advantages are zero-sum") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> rewards;
        std::size_t g = 2 + rng() % 7;
        for (std::size_t i = 0; i < g; ++i) rewards.push_back(u(rng));
        auto adv = group_advantages(rewards);
        double sum = 0.0;
        for (double a : adv) sum += a;
        CHECK(std::abs(sum) <= 1e-9 * static_cast<double>(g));
    }
}

TEST_CASE("advantages are shift-invariant") {
    std::vector<double> base = {0.3, 1.1, 0.7, 0.2, 1.9};
    std::vector<double> shifted;
    for (double r : base) shifted.push_back(r + 17.5);
    auto a = group_advantages(base);
    auto b = group_advantages(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    }
}

TEST_CASE("constant groups standardize to zero, not NaN") {
    // 0.5 sums exactly, so every deviation is a true zero.
    for (double a : group_advantages({0.5, 0.5, 0.5})) {
        CHECK(a == 0.0);
        CHECK_FALSE(std::isnan(a));
    }
    // 0.7 accumulates rounding in the mean; the epsilon guard must still keep
    // the result finite and negligibly small.
    for (double a : group_advantages({0.7, 0.7, 0.7})) {
        CHECK(std::fabs(a) < 1e-7);
        CHECK_FALSE(std::isnan(a));
    }
}

TEST_CASE("fewer than two rollouts is a contract violation") {
    CHECK_THROWS_AS(group_advantages({}), std::invalid_argument);
    CHECK_THROWS_AS(group_advantages({1.0}), std::invalid_argument);
}

TEST_CASE("matches the brute-force oracle on random groups") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> rewards;
        std::size_t g = 2 + rng() % 9;
        for (std::size_t i = 0; i < g; ++i) rewards.push_back(u(rng));
        auto got = group_advantages(rewards, 1e-8);
        auto want = oracle::advantages(rewards, 1e-8);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("population (not sample) standard deviation is used") {
    // For {0, 1}: population std = 0.5, so advantages are ±1 (minus the
    // epsilon softening). Sample std would give ±0.70710678.
    auto adv = group_advantages({0.0, 1.0});
    CHECK(adv[0] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(adv[1] == doctest::Approx(1.0).epsilon(1e-6));
}
