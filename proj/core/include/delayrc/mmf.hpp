#pragma once

// Master memory function: linear memory capacity of a delay reservoir from
// its linearization a, b, c alone.
//
// Between two node boundaries the linearized system
//     ds/dt = a s + b s(t - tau) + c I(t)
// is integrated exactly with the delayed term frozen at its node value, which
// gives the coupled map
//     s_j = gamma_c I_j + p s_{j-1} + m s_{j-nu},
//     p = exp(a theta), m = -(b/a)(1 - p), gamma_c = -(c/a)(1 - p).
// Unrolling it yields s_j = gamma_c sum_{i,k} C(i+k, i) p^i m^k I_{j-i-k nu}
// (a Pascal's triangle in the "left" steps i and delay steps k). Grouping the
// terms by the clock cycle of the input they carry gives the modified state
// matrix, whose Gram matrix stands in for S^T S / K.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "delayrc/readout.hpp"
#include "delayrc/reservoir.hpp"

namespace delayrc {

struct Linearization {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    std::vector<std::string> warnings;
};

Linearization make_linearization(double a, double b, double c);

Linearization linearize_stuart_landau(const StuartLandauParams& params);
Linearization linearize_mackey_glass(const MackeyGlassParams& params);
Linearization linearize(const ReservoirModel& model);

struct MapCoefficients {
    double p = 0.0;
    double m = 0.0;
    double gamma_c = 0.0;
    double theta = 0.0;
    int nu = 0;
    int n_v = 0;
    std::vector<std::string> warnings;
};

MapCoefficients map_coefficients(const Linearization& lin, double theta, int nu, int n_v);

/// C(k+i, i) p^i m^k evaluated as a running product; underflow flushes to 0.
double binomial_term(int i, int k, const MapCoefficients& coeffs);

struct MmfOptions {
    // Triangle rows are summed until one whose terms, scaled by
    // gamma_c / sqrt(3), all fall below epsilon_rel * max |S~| (or
    // epsilon_abs); that row and later ones are dropped.
    double epsilon_rel = 1e-6;
    double epsilon_abs = 0.0;  // > 0 overrides the relative rule
    int max_row = 100000;
    int min_triangle_rows = 0;  // keep at least this many rows regardless of epsilon
    // Minimum number of recall rows; the matrix always holds every row the
    // retained triangle terms reach.
    int min_rows = 0;
};

struct ModifiedStateMatrix {
    Eigen::MatrixXd entries;  // rows = recall depth l, cols = virtual node n
    double epsilon = 0.0;
    int triangle_rows = 0;  // rows q = 0 .. triangle_rows - 1 were summed
    bool rows_converged = false;
};

ModifiedStateMatrix modified_state_matrix(const MapCoefficients& coeffs, const Mask& mask,
                                          const MmfOptions& options = {});

/// Regularization for the analytic path, mirroring the direct rule
/// lambda = rule * max |S| applied to S^T S (which is K times S~^T S~):
///     lambda = rule * s_peak / k_equiv,  s_peak = sqrt(3) max_n sum_l |S~_ln|,
/// where s_peak is the largest centered state response the linear map can
/// produce with |u| <= 1 and k_equiv the training length being mirrored.
double mmf_lambda(const ModifiedStateMatrix& s_tilde, double k_equiv = 20000.0,
                  double rule = 1e-6);

/// sqrt(3) max_n sum_l |S~_ln|
double peak_state_response(const ModifiedStateMatrix& s_tilde);

/// tr(S~ (S~^T S~ + lambda I)^{-1} S~^T) = sum_i mu_i / (mu_i + lambda) over the eigenvalues of S~^T S~.
double mmf_memory_capacity(const ModifiedStateMatrix& s_tilde, double lambda);

/// C_l = S~_l (S~^T S~ + lambda I)^{-1} S~_l^T for every row l.
CapacitySpectrum mmf_capacity_spectrum(const ModifiedStateMatrix& s_tilde, double lambda);

}  // namespace delayrc
