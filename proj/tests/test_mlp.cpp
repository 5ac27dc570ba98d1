// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <random>

#include "enskd/mlp.hpp"
#include "enskd/numerics.hpp"

#include "oracles.hpp"

using namespace enskd;

namespace {

// Reference forward pass: independent double-loop evaluation.
std::vector<double> ref_forward(const MlpParameters& params, const std::vector<double>& input,
                                Activation act) {
    std::vector<double> cur = input;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        std::vector<double> next(layer.out_dim, 0.0);
        for (int r = 0; r < layer.out_dim; ++r) {
            double acc = layer.bias[r];
            for (int c = 0; c < layer.in_dim; ++c) acc += layer.w(r, c) * cur[c];
            next[r] = acc;
        }
        if (l + 1 < params.layers.size()) {
            for (double& x : next) {
                x = act == Activation::Relu ? (x > 0.0 ? x : 0.0) : std::tanh(x);
            }
        }
        cur = next;
    }
    return cur;
}

// Loss used for gradient checks: cross-entropy of a fixed target against
// softmax(logits).
double ce_loss(const MlpParameters& params, const std::vector<double>& input,
               const std::vector<double>& target, Activation act) {
    const auto logits = ref_forward(params, input, act);
    return oracle::cross_entropy(target, oracle::softmax(logits));
}

MlpParameters random_params(const MlpArchitecture& arch, std::uint64_t seed) {
    return init_parameters(arch, seed);
}

double max_param_rel_err(const GradientSet& analytic, const GradientSet& numeric) {
    double worst = 0.0;
    for (std::size_t l = 0; l < analytic.layers.size(); ++l) {
        for (std::size_t i = 0; i < analytic.layers[l].weights.size(); ++i) {
            worst = std::max(worst, oracle::rel_err(analytic.layers[l].weights[i],
                                                    numeric.layers[l].weights[i]));
        }
        for (std::size_t i = 0; i < analytic.layers[l].bias.size(); ++i) {
            worst = std::max(worst,
                             oracle::rel_err(analytic.layers[l].bias[i], numeric.layers[l].bias[i]));
        }
    }
    return worst;
}

// Central finite differences over every parameter.
GradientSet fd_gradients(MlpParameters params, const std::vector<double>& input,
                         const std::vector<double>& target, Activation act, double h = 1e-5) {
    GradientSet out = zero_gradients(params);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        for (std::size_t i = 0; i < params.layers[l].weights.size(); ++i) {
            double& theta = params.layers[l].weights[i];
            const double orig = theta;
            theta = orig + h;
            const double up = ce_loss(params, input, target, act);
            theta = orig - h;
            const double down = ce_loss(params, input, target, act);
            theta = orig;
            out.layers[l].weights[i] = (up - down) / (2.0 * h);
        }
        for (std::size_t i = 0; i < params.layers[l].bias.size(); ++i) {
            double& theta = params.layers[l].bias[i];
            const double orig = theta;
            theta = orig + h;
            const double up = ce_loss(params, input, target, act);
            theta = orig - h;
            const double down = ce_loss(params, input, target, act);
            theta = orig;
            out.layers[l].bias[i] = (up - down) / (2.0 * h);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("init_parameters: deterministic given seed") {
    MlpArchitecture arch;
    const auto a = init_parameters(arch, 123);
    const auto b = init_parameters(arch, 123);
    REQUIRE(a.layers.size() == b.layers.size());
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(a.layers[l].weights == b.layers[l].weights);
        CHECK(a.layers[l].bias == b.layers[l].bias);
    }
    const auto c = init_parameters(arch, 124);
    CHECK(a.layers[0].weights != c.layers[0].weights);
}

TEST_CASE("init_parameters: empty hidden_dims gives one linear layer") {
    MlpArchitecture arch;
    arch.input_dim = 4;
    arch.hidden_dims = {};
    arch.num_classes = 3;
    const auto p = init_parameters(arch, 1);
    REQUIRE(p.layers.size() == 1);
    CHECK(p.layers[0].in_dim == 4);
    CHECK(p.layers[0].out_dim == 3);
}

TEST_CASE("init_parameters: Xavier bound for a 4->8 layer") {
    MlpArchitecture arch;
    arch.input_dim = 4;
    arch.hidden_dims = {8};
    arch.num_classes = 2;
    const auto p = init_parameters(arch, 99);
    const double bound = std::sqrt(6.0 / 12.0);  // 0.7071067811865476
    for (double w : p.layers[0].weights) {
        CHECK(std::fabs(w) <= bound);
    }
    for (double b : p.layers[0].bias) CHECK(b == 0.0);
}

TEST_CASE("forward: zero parameters give zero logits") {
    MlpArchitecture arch;
    auto p = init_parameters(arch, 5);
    for (auto& layer : p.layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
    const auto logits = forward(p, {0.7, -0.3});
    for (double z : logits.values) CHECK(z == 0.0);
}

TEST_CASE("forward: single linear layer computes Wx + b") {
    MlpParameters p;
    p.layers.push_back({2, 2, {1.0, 2.0, 3.0, 4.0}, {0.5, -0.5}});
    const auto logits = forward(p, {1.0, 1.0});
    CHECK(logits[0] == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(logits[1] == doctest::Approx(6.5).epsilon(1e-15));
}

TEST_CASE("forward: matches the double-loop reference") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const Activation act : {Activation::Relu, Activation::Tanh}) {
        MlpArchitecture arch;
        arch.input_dim = 3;
        arch.hidden_dims = {5, 4};
        arch.num_classes = 3;
        arch.activation = act;
        const auto p = random_params(arch, 42);
        for (int iter = 0; iter < 50; ++iter) {
            std::vector<double> x(3);
            for (double& v : x) v = u(rng);
            ForwardCache cache;
            const auto got = forward_cached(p, x, cache, act);
            const auto want = ref_forward(p, x, act);
            for (std::size_t i = 0; i < want.size(); ++i) {
                CHECK(std::fabs(got[i] - want[i]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("forward: deterministic, bit-identical") {
    MlpArchitecture arch;
    const auto p = random_params(arch, 9);
    const auto a = forward(p, {0.25, -1.5});
    const auto b = forward(p, {0.25, -1.5});
    CHECK(a.values == b.values);
}

TEST_CASE("forward: dimension mismatch rejected") {
    MlpArchitecture arch;
    const auto p = random_params(arch, 3);
    CHECK_THROWS_AS(forward(p, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("backward: zero upstream gives zero gradients") {
    MlpArchitecture arch;
    const auto p = random_params(arch, 17);
    const auto g = backward(p, {0.4, 0.6}, {0.0, 0.0, 0.0}, arch.activation);
    for (const auto& layer : g.layers) {
        for (double w : layer.weights) CHECK(w == 0.0);
        for (double b : layer.bias) CHECK(b == 0.0);
    }
}

TEST_CASE("backward: single linear layer is an outer product") {
    MlpParameters p;
    p.layers.push_back({2, 2, {1.0, 2.0, 3.0, 4.0}, {0.0, 0.0}});
    const std::vector<double> x = {0.5, -1.0};
    const std::vector<double> up = {2.0, -3.0};
    const auto g = backward(p, x, up, Activation::Relu);
    CHECK(g.layers[0].w(0, 0) == doctest::Approx(2.0 * 0.5));
    CHECK(g.layers[0].w(0, 1) == doctest::Approx(2.0 * -1.0));
    CHECK(g.layers[0].w(1, 0) == doctest::Approx(-3.0 * 0.5));
    CHECK(g.layers[0].w(1, 1) == doctest::Approx(-3.0 * -1.0));
    CHECK(g.layers[0].bias == up);
}

TEST_CASE("backward: upstream dimension mismatch rejected") {
    MlpArchitecture arch;
    const auto p = random_params(arch, 3);
    CHECK_THROWS_AS(backward(p, {1.0, 2.0}, {1.0, 1.0}, arch.activation), std::invalid_argument);
}

TEST_CASE("gradient check: analytic vs central finite differences") {
    // >= 20 random (params, input, loss target) instances per activation.
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (const Activation act : {Activation::Relu, Activation::Tanh}) {
        for (int iter = 0; iter < 25; ++iter) {
            MlpArchitecture arch;
            arch.input_dim = 2 + iter % 3;
            arch.hidden_dims = {4 + iter % 5, 3};
            arch.num_classes = 2 + iter % 3;
            arch.activation = act;
            const auto p = random_params(arch, 1000 + static_cast<std::uint64_t>(iter));
            std::vector<double> x(arch.input_dim);
            for (double& v : x) v = u(rng);
            const auto target = oracle::random_prob(rng, static_cast<std::size_t>(arch.num_classes));

            // Analytic: upstream = softmax(z) - target (cross-entropy identity).
            ForwardCache cache;
            const auto logits = forward_cached(p, x, cache, act);
            const auto probs = oracle::softmax(logits.values);
            std::vector<double> upstream(probs.size());
            for (std::size_t i = 0; i < probs.size(); ++i) upstream[i] = probs[i] - target[i];
            const auto analytic = backward(p, cache, upstream, act);

            const auto numeric = fd_gradients(p, x, target, act);
            CHECK(max_param_rel_err(analytic, numeric) < 1e-4);
        }
    }
}
