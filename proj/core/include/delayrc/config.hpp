#pragma once

// Run configuration read from a sectioned key = value file:
//
//   [model]
//   type = stuart_landau        # or mackey_glass, custom
//   p_SL = -0.05
//   kappa = 0.06
//   gamma_nl = -0.1
//   eta = 0.001
//
//   [timing]
//   T = 80
//   N_V = 160
//   tau = 80
//
//   [sim]
//   dt = 0.01
//   buffer_inputs = 10000
//   K = 20000
//   seed = 1
//   masks = 10
//
// Mackey-Glass keys: p_MG, alpha, exponent_p, eta. Custom (linear) keys: a, b, c.
// Optional [sim] keys: transient_time, l_max, lambda_rule, threads.
// Keys are case-insensitive; unknown keys are rejected. String values may be quoted.

#include <cstdint>
#include <string>

#include "delayrc/analysis.hpp"
#include "delayrc/reservoir.hpp"

namespace delayrc {

struct RunConfig {
    ReservoirModel model = StuartLandauParams{};
    double T = 80.0;
    int n_v = 160;
    double tau = 80.0;
    int k_train = 20000;
    int buffer_inputs = 10000;
    int n_masks = 10;
    std::uint64_t seed = 1;
    IntegratorOptions integrator;
    int l_max = 50;
    double lambda_rule = 1e-6;
    unsigned threads = 0;

    TimingConfig timing() const { return make_timing(T, n_v, tau); }
    ExperimentConfig experiment() const;
};

/// Throws ConfigError on malformed input, unknown keys or invalid values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace delayrc
