#pragma once

// Ridge-regression readout and linear memory capacity of a state matrix.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "delayrc/reservoir.hpp"

namespace delayrc {

struct RidgeConfig {
    double lambda_rule = 1e-6;           // lambda = rule * max |S_km|
    std::optional<double> lambda_abs;    // overrides the rule when set
};

/// Regularization for a given state matrix under `cfg`. Throws NumericalError
/// when the result is not positive (e.g. an all-zero state matrix).
double ridge_lambda(const Eigen::MatrixXd& states, const RidgeConfig& cfg);

/// w = (S^T S + lambda I)^{-1} S^T y via a Cholesky solve.
Eigen::VectorXd train_ridge(const Eigen::MatrixXd& states, const Eigen::VectorXd& target,
                            double lambda);

/// sqrt( sum (target - prediction)^2 / (K var(target)) ), population variance.
double nrmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target);

/// y^T S (S^T S + lambda I)^{-1} S^T y / |y|^2
double capacity(const Eigen::MatrixXd& states, const Eigen::VectorXd& target, double lambda);

struct RecallTarget {
    int l = 0;
    Eigen::VectorXd values;  // values[k] = u_{k-l} over the training window
};

RecallTarget recall_target(const InputSequence& inputs, int l);

/// The same sequence with its training window moved `l` inputs into the past,
/// so that recall_target(shift_window(u, a), b) == recall_target(u, a + b).
InputSequence shift_window(const InputSequence& inputs, int l);

struct CapacitySpectrum {
    std::vector<double> capacities;  // index = recall depth l
    double cutoff = 0.0;             // capacities below this are zeroed
    double lambda = 0.0;
    double mc_total = 0.0;
};

struct CapacityOptions {
    RidgeConfig ridge;
    int l_max = 50;
    bool apply_cutoff = true;
    double p_value = 1e-6;
    // Keep adding recalls (10 at a time) while the trailing ten sum above this.
    bool auto_extend = true;
    double tail_tolerance = 1e-3;
};

/// C_l for l = 0..l_max (or further with auto_extend) sharing one
/// factorization of S^T S + lambda I.
CapacitySpectrum memory_capacity(const StateMatrix& states, const InputSequence& inputs,
                                 const CapacityOptions& options = {});

/// P(X > x) for X ~ chi^2 with n_v degrees of freedom.
double chi2_upper_tail(int n_v, double x);

/// (1 - p_value) quantile of chi^2 with n_v degrees of freedom.
double chi2_threshold(int n_v, double p_value);

}  // namespace delayrc
