#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delayrc/config.hpp"

namespace delayrc::cli {

// Flags shared by every subcommand; unset optionals keep the preset value.
struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> masks;
    std::optional<int> k_train;
    std::optional<double> T;
    std::optional<int> n_v;
    std::optional<double> tau;
    std::optional<unsigned> threads;
    bool paper_scale = false;
};

enum class Preset { fig3, fig4, theta1 };

/// Config file if given, otherwise the preset, then command-line overrides.
RunConfig resolve(const CommonOptions& opts, Preset preset);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;
};

/// "lo:hi:n"
Range parse_range(const std::string& text);

int cmd_simulate(const CommonOptions& opts, bool export_states);
int cmd_mmf(const CommonOptions& opts);
int cmd_spectrum_compare(const CommonOptions& opts);
int cmd_sweep_ab(const CommonOptions& opts, const Range& a, const Range& b, double c);
int cmd_sweep_pump_feedback(const CommonOptions& opts, const Range& p, const Range& kappa);
int cmd_eta_scan(const CommonOptions& opts, const std::vector<double>& etas);
int cmd_sysid(const CommonOptions& opts, std::optional<double> tau, double i0, std::optional<double> c);
int cmd_bench(const CommonOptions& opts, const std::vector<double>& b_values);

}  // namespace delayrc::cli
