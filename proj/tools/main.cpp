#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "delayrc/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kInstability = 3, kNumerical = 4 };

void add_common(CLI::App* cmd, delayrc::cli::CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "base seed for masks and inputs");
    cmd->add_option("--masks", o.masks, "number of mask replicas");
    cmd->add_option("--K", o.k_train, "training inputs");
    cmd->add_option("--T", o.T, "clock cycle");
    cmd->add_option("--N_V", o.n_v, "virtual nodes");
    cmd->add_option("--delay", o.tau, "delay time tau");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--paper-scale", o.paper_scale, "K = 75000 and 100 masks");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace delayrc::cli;
    CLI::App app{"Linear memory capacity of delay-based reservoirs: direct simulation and "
                 "master memory function"};
    app.require_subcommand(1);

    CommonOptions common;
    bool export_states = false;
    std::string a_range = "-0.2:-0.01:20", b_range = "-0.15:0.15:31";
    double c = 1e-3;
    std::string p_range = "-0.2:0.0:5", kappa_range = "0.25:0.45:5";
    std::vector<double> etas{1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
    std::optional<double> sysid_tau;
    double i0 = 0.1;
    std::optional<double> sysid_c;
    std::vector<double> b_values;

    auto* simulate = app.add_subcommand("simulate", "direct simulation and ridge capacities");
    add_common(simulate, common);
    simulate->add_flag("--states", export_states, "also write the centered state matrix");

    auto* mmf = app.add_subcommand("mmf", "modified state matrix and analytic capacities");
    add_common(mmf, common);

    auto* compare = app.add_subcommand("spectrum-compare", "direct vs analytic spectra over masks");
    add_common(compare, common);

    auto* sweep_ab = app.add_subcommand("sweep-ab", "analytic memory capacity over the (a, b) plane");
    add_common(sweep_ab, common);
    sweep_ab->add_option("--a-range", a_range, "lo:hi:n");
    sweep_ab->add_option("--b-range", b_range, "lo:hi:n");
    sweep_ab->add_option("--c", c, "input coupling");

    auto* sweep_pf = app.add_subcommand("sweep-pump-feedback", "Stuart-Landau (p_SL, kappa) grid, both paths");
    add_common(sweep_pf, common);
    sweep_pf->add_option("--p-range", p_range, "lo:hi:n");
    sweep_pf->add_option("--kappa-range", kappa_range, "lo:hi:n");

    auto* eta = app.add_subcommand("eta-scan", "MC_MMF / MC_direct over input strengths");
    add_common(eta, common);
    eta->add_option("--eta", etas, "input strengths")->delimiter(',');

    auto* sysid = app.add_subcommand("sysid", "identify (a, b) from harmonic probes");
    add_common(sysid, common);
    sysid->add_option("--tau", sysid_tau, "delay of the probed system");
    sysid->add_option("--i0", i0, "probe amplitude");
    sysid->add_option("--c", sysid_c, "known input coupling");

    auto* bench = app.add_subcommand("bench", "single-threaded timing of both paths along b");
    add_common(bench, common);
    bench->add_option("--b", b_values, "feedback values")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*simulate) return cmd_simulate(common, export_states);
        if (*mmf) return cmd_mmf(common);
        if (*compare) return cmd_spectrum_compare(common);
        if (*sweep_ab) return cmd_sweep_ab(common, parse_range(a_range), parse_range(b_range), c);
        if (*sweep_pf) return cmd_sweep_pump_feedback(common, parse_range(p_range), parse_range(kappa_range));
        if (*eta) return cmd_eta_scan(common, etas);
        if (*sysid) return cmd_sysid(common, sysid_tau, i0, sysid_c);
        if (*bench) return cmd_bench(common, b_values);
    } catch (const delayrc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const delayrc::InstabilityError& e) {
        std::cerr << "instability: " << e.what() << '\n';
        return kInstability;
    } catch (const delayrc::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return kInstability;
    } catch (const delayrc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
