#include "delayrc/export.hpp"

#include <cmath>
#include <iomanip>
#include <variant>

#include "json.hpp"

namespace delayrc {

namespace {

using nlohmann::json;

void header(std::ostream& out, const char* kind, const char* columns) {
    out << "# delayrc " << kind << " v" << kCsvSchemaVersion << '\n' << columns << '\n';
    out << std::setprecision(17);
}

json model_json(const ReservoirModel& model) {
    json j;
    j["type"] = model_name(model);
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StuartLandauParams>) {
                j["p_SL"] = m.p_sl;
                j["kappa"] = m.kappa;
                j["gamma_nl"] = m.gamma_nl;
                j["eta"] = m.eta;
            } else if constexpr (std::is_same_v<T, MackeyGlassParams>) {
                j["p_MG"] = m.p_mg;
                j["alpha"] = m.alpha;
                j["exponent_p"] = m.exponent_p;
                j["eta"] = m.eta;
            } else {
                j["a"] = m.a;
                j["b"] = m.b;
                j["c"] = m.c;
            }
        },
        model);
    return j;
}

json config_object(const RunConfig& cfg) {
    const TimingConfig t = cfg.timing();
    json j;
    j["model"] = model_json(cfg.model);
    j["timing"] = {{"T", t.T},     {"N_V", t.n_v},         {"theta", t.theta},
                   {"tau", t.tau}, {"nu", t.nu},           {"requested_tau", t.requested_tau},
                   {"warnings", t.warnings}};
    j["sim"] = {{"dt", aligned_step(t.theta, cfg.integrator.dt)},
                {"transient_time", cfg.integrator.transient_time < 0.0 ? 50.0 * t.tau
                                                                        : cfg.integrator.transient_time},
                {"buffer_inputs", cfg.buffer_inputs},
                {"K", cfg.k_train},
                {"masks", cfg.n_masks},
                {"seed", cfg.seed},
                {"l_max", cfg.l_max},
                {"lambda_rule", cfg.lambda_rule}};
    return j;
}

// JSON has no NaN; missing values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_state_csv(std::ostream& out, const StateMatrix& states) {
    header(out, "state", "k,m,value");
    const auto& s = states.entries;
    for (Eigen::Index k = 0; k < s.rows(); ++k) {
        for (Eigen::Index m = 0; m < s.cols(); ++m) out << k << ',' << m << ',' << s(k, m) << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, const CapacitySpectrum& spectrum) {
    header(out, "spectrum", "l,C_l");
    for (std::size_t l = 0; l < spectrum.capacities.size(); ++l) {
        out << l << ',' << spectrum.capacities[l] << '\n';
    }
}

void write_s_tilde_csv(std::ostream& out, const ModifiedStateMatrix& s_tilde) {
    header(out, "s_tilde", "l,n,value");
    const auto& s = s_tilde.entries;
    for (Eigen::Index l = 0; l < s.rows(); ++l) {
        for (Eigen::Index n = 0; n < s.cols(); ++n) out << l << ',' << n << ',' << s(l, n) << '\n';
    }
}

void write_comparison_csv(std::ostream& out, const SpectrumComparison& cmp) {
    header(out, "spectrum_compare", "l,C_l_direct,C_l_direct_std,C_l_mmf,C_l_mmf_std");
    for (std::size_t l = 0; l < cmp.direct_mean.size(); ++l) {
        out << l << ',' << cmp.direct_mean[l] << ',' << cmp.direct_std[l] << ',' << cmp.mmf_mean[l] << ','
            << cmp.mmf_std[l] << '\n';
    }
}

void write_ab_sweep_csv(std::ostream& out, const SweepGrid& grid) {
    header(out, "sweep_ab", "a,b,MC,status");
    for (std::size_t i = 0; i < grid.values1.size(); ++i) {
        for (std::size_t j = 0; j < grid.values2.size(); ++j) {
            out << grid.values1[i] << ',' << grid.values2[j] << ','
                << grid.mc_mmf(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << ','
                << to_string(grid.at(i, j)) << '\n';
        }
    }
}

void write_grid_csv(std::ostream& out, const SweepGrid& grid, const AgreementReport& report) {
    const std::string cols = grid.param1 + ',' + grid.param2 + ",MC_direct,MC_MMF,delta_MC,status";
    header(out, "sweep_grid", cols.c_str());
    for (std::size_t i = 0; i < grid.values1.size(); ++i) {
        for (std::size_t j = 0; j < grid.values2.size(); ++j) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(j);
            out << grid.values1[i] << ',' << grid.values2[j] << ',' << grid.mc_direct(r, c) << ','
                << grid.mc_mmf(r, c) << ',' << report.relative_difference(r, c) << ','
                << to_string(grid.at(i, j)) << '\n';
        }
    }
}

void write_eta_scan_csv(std::ostream& out, const std::vector<EtaScanRow>& rows) {
    header(out, "eta_scan", "eta,MC_direct,MC_MMF,ratio,status");
    for (const auto& r : rows) {
        out << r.eta << ',' << r.mc_direct << ',' << r.mc_mmf << ',' << r.ratio << ',' << to_string(r.status)
            << '\n';
    }
}

std::string config_json(const RunConfig& cfg) { return config_object(cfg).dump(2); }

std::string spectrum_summary_json(const CapacitySpectrum& spectrum, const RunConfig& cfg) {
    json j;
    j["mc_total"] = spectrum.mc_total;
    j["lambda"] = spectrum.lambda;
    j["cutoff"] = spectrum.cutoff;
    j["recalls"] = spectrum.capacities.size();
    j["config"] = config_object(cfg);
    return j.dump(2);
}

std::string comparison_summary_json(const SpectrumComparison& cmp, const RunConfig& cfg) {
    json j;
    j["mc_direct_mean"] = cmp.mc_direct_mean;
    j["mc_mmf_mean"] = cmp.mc_mmf_mean;
    j["mc_direct"] = cmp.mc_direct;
    j["mc_mmf"] = cmp.mc_mmf;
    const int l_max = std::min<int>(30, static_cast<int>(cmp.direct_mean.size()) - 1);
    j["mean_abs_difference_l30"] = l_max >= 0 ? mean_abs_difference(cmp.direct_mean, cmp.mmf_mean, l_max) : 0.0;
    j["linearization"] = json::parse(linearization_json(cmp.linearization));
    j["config"] = config_object(cfg);
    return j.dump(2);
}

std::string agreement_json(const AgreementReport& report, const RunConfig& cfg) {
    json j;
    j["delta_mc_max"] = number(report.delta_mc);
    j["delta_mc_mean"] = number(report.delta_mc_mean);
    j["rv"] = number(report.rv);
    j["config"] = config_object(cfg);
    return j.dump(2);
}

std::string linearization_json(const Linearization& lin) {
    json j;
    j["a"] = lin.a;
    j["b"] = lin.b;
    j["c"] = lin.c;
    j["warnings"] = lin.warnings;
    return j.dump(2);
}

std::string benchmark_json(const std::vector<BenchmarkPoint>& points, const RunConfig& cfg) {
    json j;
    double td = 0.0, tm = 0.0;
    json pts = json::array();
    for (const auto& p : points) {
        pts.push_back({{"b", p.b},
                       {"t_direct", p.t_direct},
                       {"t_mmf", p.t_mmf},
                       {"ratio", p.ratio},
                       {"mc_direct", p.mc_direct},
                       {"mc_mmf", p.mc_mmf},
                       {"triangle_rows", p.triangle_rows}});
        td += p.t_direct;
        tm += p.t_mmf;
    }
    j["points"] = pts;
    j["t_direct"] = td;
    j["t_mmf"] = tm;
    j["ratio"] = td > 0.0 ? tm / td : 0.0;
    j["config"] = config_object(cfg);
    return j.dump(2);
}

}  // namespace delayrc
