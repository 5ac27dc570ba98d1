// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <random>

#include "enskd/optim.hpp"

using namespace enskd;

namespace {

// Scalar "network" for optimizer tests.
MlpParameters scalar_param(double value) {
    MlpParameters p;
    p.layers.push_back({1, 1, {value}, {0.0}});
    return p;
}

GradientSet scalar_grad(const MlpParameters& p, double g) {
    GradientSet out = zero_gradients(p);
    out.layers[0].weights[0] = g;
    return out;
}

}  // namespace

TEST_CASE("sgd_step: zero gradient leaves parameters unchanged") {
    auto p = scalar_param(1.25);
    sgd_step(p, scalar_grad(p, 0.0), 0.1);
    CHECK(p.layers[0].weights[0] == 1.25);
}

TEST_CASE("sgd_step: definition") {
    auto p = scalar_param(1.0);
    sgd_step(p, scalar_grad(p, 0.5), 0.1);
    CHECK(p.layers[0].weights[0] == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("sgd_step: two steps equal one step with doubled rate") {
    auto two = scalar_param(1.0);
    sgd_step(two, scalar_grad(two, 0.3), 0.05);
    sgd_step(two, scalar_grad(two, 0.3), 0.05);
    auto one = scalar_param(1.0);
    sgd_step(one, scalar_grad(one, 0.3), 0.1);
    CHECK(std::fabs(two.layers[0].weights[0] - one.layers[0].weights[0]) <= 1e-12);
}

TEST_CASE("sgd_step: non-finite gradient raises diverged") {
    auto p = scalar_param(1.0);
    CHECK_THROWS_WITH_AS(sgd_step(p, scalar_grad(p, std::nan("")), 0.1),
                         "diverged: non-finite gradient", std::runtime_error);
}

TEST_CASE("sgd_step: overflow to non-finite parameters raises diverged") {
    auto p = scalar_param(1.0);
    CHECK_THROWS_AS(sgd_step(p, scalar_grad(p, 1e308), 1e308), std::runtime_error);
}

TEST_CASE("adam_step: zero gradient with zero state leaves parameters unchanged") {
    auto p = scalar_param(2.0);
    auto s = AdamState::init(p);
    adam_step(p, scalar_grad(p, 0.0), s, 0.01);
    CHECK(p.layers[0].weights[0] == 2.0);
    CHECK(s.t == 1);
}

TEST_CASE("adam_step: first step moves by ~lr in the gradient's direction") {
    // Bias correction makes m_hat/sqrt(v_hat) = sign(g) up to epsilon, so the
    // property needs |g| well above epsilon; generated |g| >= 0.1.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mag(0.1, 10.0);
    for (int iter = 0; iter < 100; ++iter) {
        const double g = (iter % 2 == 0 ? 1.0 : -1.0) * mag(rng);
        const double lr = 0.003;
        auto p = scalar_param(1.0);
        auto s = AdamState::init(p);
        adam_step(p, scalar_grad(p, g), s, lr);
        const double step = 1.0 - p.layers[0].weights[0];
        const double expected = lr * (g > 0 ? 1.0 : -1.0);
        CHECK(std::fabs(step - expected) / std::fabs(expected) <= 1e-6);
    }
}

TEST_CASE("adam_step: three fixed steps match the frozen scalar recurrence") {
    // theta0 = 1, g = 0.3 per step, lr = 0.1, defaults otherwise; recurrence
    // evaluated independently at high precision.
    auto p = scalar_param(1.0);
    auto s = AdamState::init(p);
    const double expected[] = {0.90000000333333322, 0.80000000666666644, 0.70000000999999967};
    for (int t = 0; t < 3; ++t) {
        adam_step(p, scalar_grad(p, 0.3), s, 0.1);
        CHECK(std::fabs(p.layers[0].weights[0] - expected[t]) <= 1e-10);
    }
    CHECK(s.t == 3);
}

TEST_CASE("adam_step: t increments by exactly one per step") {
    auto p = scalar_param(1.0);
    auto s = AdamState::init(p);
    for (int i = 1; i <= 5; ++i) {
        adam_step(p, scalar_grad(p, 0.1), s, 0.01);
        CHECK(s.t == i);
    }
}

TEST_CASE("adam_step: non-finite gradient raises diverged") {
    auto p = scalar_param(1.0);
    auto s = AdamState::init(p);
    CHECK_THROWS_WITH_AS(adam_step(p, scalar_grad(p, INFINITY), s, 0.01),
                         "diverged: non-finite gradient", std::runtime_error);
}

TEST_CASE("optimizers: finite inputs never silently produce non-finite parameters") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    auto p = scalar_param(1.0);
    auto s = AdamState::init(p);
    for (int i = 0; i < 200; ++i) {
        adam_step(p, scalar_grad(p, u(rng)), s, 0.05);
        CHECK(std::isfinite(p.layers[0].weights[0]));
    }
}
