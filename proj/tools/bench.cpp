// Copyright (c) 2026 enskd contributors
// SPDX-License-Identifier: Apache-2.0
//
// Times the OpenMP batch kernels against their serial reference on a
// synthetic workload and verifies that both produce bit-identical results.
//
// usage: enskd_bench [rows] [reps]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "enskd/data.hpp"
#include "enskd/kernels.hpp"
#include "enskd/mlp.hpp"

using namespace enskd;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool grads_identical(const GradientSet& a, const GradientSet& b) {
    if (!a.shape_congruent(b)) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].weights != b.layers[l].weights) return false;
        if (a.layers[l].bias != b.layers[l].bias) return false;
    }
    return true;
}

void report(const char* kernel, double serial_ms, double omp_ms, bool identical) {
    std::printf("%-16s %10.2f ms %10.2f ms %8.2fx   %s\n", kernel, serial_ms, omp_ms,
                serial_ms / omp_ms, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int rows = argc > 1 ? std::atoi(argv[1]) : 20000;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 5;
    if (rows < 1 || reps < 1) {
        std::fprintf(stderr, "usage: %s [rows] [reps]\n", argv[0]);
        return 2;
    }

    MlpArchitecture arch;  // default 2-32-3
    const auto examples = generate_gaussian_mixture(arch.num_classes, rows / arch.num_classes + 1,
                                                    circle_means(arch.num_classes, arch.input_dim, 2.0),
                                                    1.0, 12345);
    std::vector<std::vector<double>> features;
    features.reserve(examples.size());
    for (const auto& ex : examples) features.push_back(ex.features);

    const MlpParameters params = init_parameters(arch, 7);

    std::vector<std::size_t> batch(examples.size());
    std::iota(batch.begin(), batch.end(), 0);

    SampleLossFn ce_fn = [&](std::size_t idx, const ProbVector& pred) {
        const auto label = static_cast<std::size_t>(examples[idx].label);
        SampleLoss s;
        s.breakdown.total = -std::log(std::max(pred[label], kEpsLog));
        s.logit_grad.resize(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            s.logit_grad[i] = pred[i] - (i == label ? 1.0 : 0.0);
        }
        return s;
    };

#ifdef _OPENMP
    std::printf("threads: %d, rows: %zu, reps: %d\n", omp_get_max_threads(), examples.size(), reps);
#else
    std::printf("built without OpenMP; both columns run the serial path\n");
#endif
    std::printf("%-16s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    bool all_ok = true;

    {
        auto t0 = Clock::now();
        std::vector<ProbVector> serial_out;
        for (int r = 0; r < reps; ++r) {
            serial_out = predict_probs(params, arch.activation, features, ExecMode::Serial);
        }
        const double serial_ms = ms_since(t0) / reps;
        t0 = Clock::now();
        std::vector<ProbVector> omp_out;
        for (int r = 0; r < reps; ++r) {
            omp_out = predict_probs(params, arch.activation, features, ExecMode::OpenMP);
        }
        const double omp_ms = ms_since(t0) / reps;
        bool identical = serial_out.size() == omp_out.size();
        for (std::size_t i = 0; identical && i < serial_out.size(); ++i) {
            identical = serial_out[i].values() == omp_out[i].values();
        }
        all_ok = all_ok && identical;
        report("predict_probs", serial_ms, omp_ms, identical);
    }

    {
        auto t0 = Clock::now();
        std::size_t serial_count = 0;
        for (int r = 0; r < reps; ++r) {
            serial_count = count_correct(params, arch.activation, examples, ExecMode::Serial);
        }
        const double serial_ms = ms_since(t0) / reps;
        t0 = Clock::now();
        std::size_t omp_count = 0;
        for (int r = 0; r < reps; ++r) {
            omp_count = count_correct(params, arch.activation, examples, ExecMode::OpenMP);
        }
        const double omp_ms = ms_since(t0) / reps;
        const bool identical = serial_count == omp_count;
        all_ok = all_ok && identical;
        report("count_correct", serial_ms, omp_ms, identical);
    }

    {
        auto t0 = Clock::now();
        BatchGradResult serial_r;
        for (int r = 0; r < reps; ++r) {
            serial_r = batch_gradient(params, arch.activation, features, batch, ce_fn,
                                      ExecMode::Serial);
        }
        const double serial_ms = ms_since(t0) / reps;
        t0 = Clock::now();
        BatchGradResult omp_r;
        for (int r = 0; r < reps; ++r) {
            omp_r = batch_gradient(params, arch.activation, features, batch, ce_fn,
                                   ExecMode::OpenMP);
        }
        const double omp_ms = ms_since(t0) / reps;
        const bool identical = grads_identical(serial_r.mean_grad, omp_r.mean_grad) &&
                               serial_r.mean_total == omp_r.mean_total;
        all_ok = all_ok && identical;
        report("batch_gradient", serial_ms, omp_ms, identical);
    }

    if (!all_ok) {
        std::fprintf(stderr, "kernel outputs differ between serial and OpenMP\n");
        return 1;
    }
    return 0;
}
