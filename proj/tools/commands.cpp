#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "delayrc/analysis.hpp"
#include "delayrc/errors.hpp"
#include "delayrc/export.hpp"
#include "delayrc/mmf.hpp"
#include "delayrc/readout.hpp"
#include "delayrc/sysid.hpp"

namespace delayrc::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const CommonOptions& opts, const std::string& name) {
    fs::create_directories(opts.out_dir);
    const fs::path path = fs::path(opts.out_dir) / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

void emit_json(const CommonOptions& opts, const std::string& name, const std::string& json) {
    open_output(opts, name) << json << '\n';
    std::cout << json << '\n';
}

void report_warnings(const RunConfig& cfg) {
    for (const auto& w : cfg.timing().warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

RunConfig resolve(const CommonOptions& opts, Preset preset) {
    RunConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = load_config(opts.config_path);
    } else {
        switch (preset) {
            case Preset::fig3:
                break;
            case Preset::fig4:
                cfg.T = 50.0;
                cfg.n_v = 100;
                cfg.tau = 72.0;
                cfg.n_masks = 1;
                break;
            case Preset::theta1:
                cfg.model = stuart_landau_for(-0.503, 0.201, -0.1, 1e-3);
                cfg.T = 100.0;
                cfg.n_v = 100;
                cfg.tau = 141.0;
                cfg.n_masks = 1;
                break;
        }
    }
    if (opts.paper_scale) {
        cfg.k_train = 75000;
        cfg.n_masks = 100;
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.masks) cfg.n_masks = *opts.masks;
    if (opts.k_train) cfg.k_train = *opts.k_train;
    if (opts.T) cfg.T = *opts.T;
    if (opts.n_v) cfg.n_v = *opts.n_v;
    if (opts.tau) cfg.tau = *opts.tau;
    if (opts.threads) cfg.threads = *opts.threads;
    if (cfg.n_masks < 1) throw ConfigError("--masks must be positive");
    if (cfg.k_train < 1) throw ConfigError("--K must be positive");
    (void)cfg.timing();
    return cfg;
}

Range parse_range(const std::string& text) {
    Range r;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.n) || c1 != ':' || c2 != ':' || !in.eof() || r.n < 1) {
        throw ConfigError("range '" + text + "' must look like lo:hi:n with n >= 1");
    }
    return r;
}

int cmd_simulate(const CommonOptions& opts, bool export_states) {
    const RunConfig cfg = resolve(opts, Preset::fig3);
    report_warnings(cfg);
    const ExperimentConfig ex = cfg.experiment();
    const Mask mask = replica_mask(ex, 0);
    const InputSequence inputs = replica_inputs(ex, 0);
    const StateMatrix states = integrate_dde(ex.model, ex.timing, inputs, mask, ex.integrator);
    const CapacitySpectrum spectrum = memory_capacity(states, inputs, ex.capacity);
    if (export_states) {
        auto out = open_output(opts, "states.csv");
        write_state_csv(out, states);
    }
    {
        auto out = open_output(opts, "spectrum_direct.csv");
        write_spectrum_csv(out, spectrum);
    }
    emit_json(opts, "summary_direct.json", spectrum_summary_json(spectrum, cfg));
    return 0;
}

int cmd_mmf(const CommonOptions& opts) {
    const RunConfig cfg = resolve(opts, Preset::fig3);
    report_warnings(cfg);
    const ExperimentConfig ex = cfg.experiment();
    const Linearization lin = linearize(ex.model);
    for (const auto& w : lin.warnings) std::cerr << "warning: " << w << '\n';
    const MapCoefficients coeffs = map_coefficients(lin, ex.timing.theta, ex.timing.nu, ex.timing.n_v);
    const ModifiedStateMatrix s_tilde = modified_state_matrix(coeffs, replica_mask(ex, 0), ex.mmf);
    const CapacitySpectrum spectrum = mmf_capacity_spectrum(s_tilde, mmf_lambda(s_tilde, cfg.k_train));
    {
        auto out = open_output(opts, "s_tilde.csv");
        write_s_tilde_csv(out, s_tilde);
    }
    {
        auto out = open_output(opts, "spectrum_mmf.csv");
        write_spectrum_csv(out, spectrum);
    }
    emit_json(opts, "summary_mmf.json", spectrum_summary_json(spectrum, cfg));
    return 0;
}

int cmd_spectrum_compare(const CommonOptions& opts) {
    const RunConfig cfg = resolve(opts, Preset::fig3);
    report_warnings(cfg);
    const SpectrumComparison cmp = run_spectrum_compare(cfg.experiment());
    {
        auto out = open_output(opts, "spectrum_compare.csv");
        write_comparison_csv(out, cmp);
    }
    emit_json(opts, "spectrum_compare.json", comparison_summary_json(cmp, cfg));
    return 0;
}

int cmd_sweep_ab(const CommonOptions& opts, const Range& a, const Range& b, double c) {
    const RunConfig cfg = resolve(opts, Preset::fig4);
    report_warnings(cfg);
    AbSweepConfig sweep;
    sweep.a_values = linspace(a.lo, a.hi, a.n);
    sweep.b_values = linspace(b.lo, b.hi, b.n);
    sweep.timing = cfg.timing();
    sweep.c = c;
    sweep.n_masks = cfg.n_masks;
    sweep.seed = cfg.seed;
    sweep.k_equiv = cfg.k_train;
    sweep.threads = cfg.threads;
    const SweepGrid grid = run_ab_sweep(sweep);
    auto out = open_output(opts, "sweep_ab.csv");
    write_ab_sweep_csv(out, grid);
    return 0;
}

int cmd_sweep_pump_feedback(const CommonOptions& opts, const Range& p, const Range& kappa) {
    const RunConfig cfg = resolve(opts, Preset::theta1);
    report_warnings(cfg);
    PumpFeedbackConfig sweep;
    sweep.p_values = linspace(p.lo, p.hi, p.n);
    sweep.kappa_values = linspace(kappa.lo, kappa.hi, kappa.n);
    if (const auto* sl = std::get_if<StuartLandauParams>(&cfg.model)) {
        sweep.base = *sl;
    } else {
        throw ConfigError("sweep-pump-feedback needs a stuart_landau model");
    }
    sweep.experiment = cfg.experiment();
    const PumpFeedbackResult result = run_pump_feedback_sweep(sweep);
    {
        auto out = open_output(opts, "sweep_pump_feedback.csv");
        write_grid_csv(out, result.grid, result.report);
    }
    emit_json(opts, "sweep_pump_feedback.json", agreement_json(result.report, cfg));
    return 0;
}

int cmd_eta_scan(const CommonOptions& opts, const std::vector<double>& etas) {
    const RunConfig cfg = resolve(opts, Preset::theta1);
    report_warnings(cfg);
    const auto rows = run_eta_scan(etas, cfg.experiment());
    auto out = open_output(opts, "eta_scan.csv");
    write_eta_scan_csv(out, rows);
    return 0;
}

int cmd_sysid(const CommonOptions& opts, std::optional<double> tau, double i0, std::optional<double> c) {
    const RunConfig cfg = resolve(opts, Preset::theta1);
    const double delay = tau ? *tau : cfg.timing().tau;
    const ProbeConfig probe = make_probe(delay, i0);
    Linearization lin;
    if (c) {
        lin = identify(cfg.model, probe, *c);
    } else {
        lin = identify(cfg.model, probe, linearize(cfg.model).c);
        lin.warnings.push_back("--c not given; used the analytic input coupling of the configured model");
    }
    emit_json(opts, "sysid.json", linearization_json(lin));
    return 0;
}

int cmd_bench(const CommonOptions& opts, const std::vector<double>& b_values) {
    CommonOptions local = opts;
    if (!local.k_train && !local.paper_scale) local.k_train = 50000;
    const RunConfig cfg = resolve(local, Preset::theta1);
    report_warnings(cfg);
    BenchmarkConfig bench;
    bench.b_values = b_values;
    bench.experiment = cfg.experiment();
    bench.experiment.threads = 1;
    if (const auto* sl = std::get_if<StuartLandauParams>(&cfg.model)) {
        bench.gamma_nl = sl->gamma_nl;
        bench.eta = sl->eta;
        bench.a = linearize(cfg.model).a;
    }
    emit_json(opts, "bench.json", benchmark_json(run_benchmark(bench), cfg));
    return 0;
}

}  // namespace delayrc::cli
