#pragma once

// Experiment drivers comparing the directly simulated memory capacity with the
// master-memory-function prediction: spectra, parameter sweeps, agreement
// metrics, input-strength scans and timing.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "delayrc/mmf.hpp"
#include "delayrc/readout.hpp"
#include "delayrc/reservoir.hpp"

namespace delayrc {

struct ExperimentConfig {
    ReservoirModel model = StuartLandauParams{};
    TimingConfig timing = make_timing(80.0, 160, 80.0);
    int k_train = 20000;
    int buffer_inputs = 10000;
    int n_masks = 10;
    std::uint64_t seed = 1;
    IntegratorOptions integrator;
    CapacityOptions capacity;
    MmfOptions mmf;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Mask and input sequence of replica r; shared by both pipelines.
Mask replica_mask(const ExperimentConfig& cfg, int replica);
InputSequence replica_inputs(const ExperimentConfig& cfg, int replica);

/// Direct path for one replica: integrate, center, ridge capacities.
CapacitySpectrum direct_spectrum(const ExperimentConfig& cfg, const Mask& mask,
                                 const InputSequence& inputs);

/// Analytic path for one mask with lambda matched to k_train.
CapacitySpectrum mmf_spectrum(const Linearization& lin, const TimingConfig& timing, const Mask& mask,
                              double k_equiv, const MmfOptions& options = {});

struct SpectrumComparison {
    Linearization linearization;
    TimingConfig timing;
    std::vector<double> direct_mean, direct_std;
    std::vector<double> mmf_mean, mmf_std;
    std::vector<double> mc_direct;  // per replica
    std::vector<double> mc_mmf;
    double mc_direct_mean = 0.0;
    double mc_mmf_mean = 0.0;
};

/// Both pipelines on n_masks shared (mask, input) replicas. Spectra are padded
/// with zeros to a common length.
SpectrumComparison run_spectrum_compare(const ExperimentConfig& cfg);

/// mean over l <= l_max of |x_l - y_l| (missing entries count as 0).
double mean_abs_difference(const std::vector<double>& x, const std::vector<double>& y, int l_max);

/// Pearson correlation of x_l and y_l over l <= l_max.
double pearson(const std::vector<double>& x, const std::vector<double>& y, int l_max);

enum class CellStatus { ok, diverged, invalid };

std::string to_string(CellStatus status);

struct SweepGrid {
    std::string param1, param2;
    std::vector<double> values1, values2;
    Eigen::MatrixXd mc_direct;  // values1.size() x values2.size(); NaN where not computed
    Eigen::MatrixXd mc_mmf;
    std::vector<CellStatus> status;  // row-major
    std::vector<std::string> notes;

    CellStatus& at(std::size_t i, std::size_t j) { return status[i * values2.size() + j]; }
    CellStatus at(std::size_t i, std::size_t j) const { return status[i * values2.size() + j]; }
};

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

struct AbSweepConfig {
    std::vector<double> a_values;
    std::vector<double> b_values;
    TimingConfig timing = make_timing(50.0, 100, 72.0);
    double c = 1e-3;
    int n_masks = 1;
    std::uint64_t seed = 1;
    double k_equiv = 20000.0;
    MmfOptions mmf;
    unsigned threads = 0;
};

/// MMF-only sweep over the (a, b) plane; a + b >= 0 and non-convergent cells
/// are marked diverged, a = 0 invalid.
SweepGrid run_ab_sweep(const AbSweepConfig& cfg);

struct AgreementReport {
    double delta_mc = 0.0;       // max over valid cells of |MC_mmf - MC_direct| / MC_direct
    double delta_mc_mean = 0.0;
    double rv = 0.0;
    Eigen::MatrixXd relative_difference;  // NaN on invalid cells
};

/// RV = tr(Sxy Syx) / sqrt(tr(Sxx^2) tr(Syy^2)) with column-centered X, Y.
double rv_coefficient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

AgreementReport agreement(const SweepGrid& grid);

struct PumpFeedbackConfig {
    std::vector<double> p_values;
    std::vector<double> kappa_values;
    StuartLandauParams base;  // gamma_nl and eta
    ExperimentConfig experiment;  // timing, K, buffer, seeds, n_masks
};

struct PumpFeedbackResult {
    SweepGrid grid;
    AgreementReport report;
};

/// Stuart-Landau over (p_sl, kappa); cells without a nontrivial equilibrium
/// are marked invalid, unstable ones diverged.
PumpFeedbackResult run_pump_feedback_sweep(const PumpFeedbackConfig& cfg);

/// Model with its input strength replaced (c for the linear model).
ReservoirModel with_eta(const ReservoirModel& model, double eta);

struct EtaScanRow {
    double eta = 0.0;
    double mc_direct = 0.0;
    double mc_mmf = 0.0;
    double ratio = 0.0;
    CellStatus status = CellStatus::ok;
};

std::vector<EtaScanRow> run_eta_scan(const std::vector<double>& etas, const ExperimentConfig& base);

struct BenchmarkConfig {
    double a = -0.503;
    std::vector<double> b_values;  // empty = 5 points from -a - 0.1 to -a - 0.005
    double gamma_nl = -0.1;
    double eta = 1e-3;
    ExperimentConfig experiment;   // timing, K, buffer, seed; one replica
};

struct BenchmarkPoint {
    double b = 0.0;
    double t_direct = 0.0;  // seconds
    double t_mmf = 0.0;
    double ratio = 0.0;     // t_mmf / t_direct
    double mc_direct = 0.0;
    double mc_mmf = 0.0;
    int triangle_rows = 0;
};

/// Stuart-Landau realisation of (a, b): kappa = b, p_sl = (-a - 3 b) / 2.
StuartLandauParams stuart_landau_for(double a, double b, double gamma_nl, double eta);

/// Mackey-Glass realisation of (a, b) with exponent 1: p_mg = a, alpha = a^2 / b.
MackeyGlassParams mackey_glass_for(double a, double b, double eta);

/// Single-threaded wall-clock timing of both pipelines along a line in b.
std::vector<BenchmarkPoint> run_benchmark(const BenchmarkConfig& cfg);

/// Runs fn(0..n-1) on up to `threads` workers (0 = hardware concurrency).
/// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(int n, unsigned threads, const std::function<void(int)>& fn);

}  // namespace delayrc
