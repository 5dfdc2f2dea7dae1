#include "delayrc/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "delayrc/errors.hpp"

namespace delayrc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double get_capacity(const std::vector<double>& c, std::size_t l) { return l < c.size() ? c[l] : 0.0; }

void mean_std(const std::vector<std::vector<double>>& runs, std::vector<double>& mean,
              std::vector<double>& sd) {
    std::size_t len = 0;
    for (const auto& r : runs) len = std::max(len, r.size());
    mean.assign(len, 0.0);
    sd.assign(len, 0.0);
    if (runs.empty()) return;
    const auto n = static_cast<double>(runs.size());
    for (std::size_t l = 0; l < len; ++l) {
        double s = 0.0;
        for (const auto& r : runs) s += get_capacity(r, l);
        mean[l] = s / n;
        double v = 0.0;
        for (const auto& r : runs) v += (get_capacity(r, l) - mean[l]) * (get_capacity(r, l) - mean[l]);
        sd[l] = runs.size() > 1 ? std::sqrt(v / (n - 1.0)) : 0.0;
    }
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void parallel_for(int n, unsigned threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed = true;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

Mask replica_mask(const ExperimentConfig& cfg, int replica) {
    return make_mask(cfg.timing.n_v, derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(replica)));
}

InputSequence replica_inputs(const ExperimentConfig& cfg, int replica) {
    return generate_inputs(cfg.k_train, derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(replica)),
                           cfg.buffer_inputs);
}

CapacitySpectrum direct_spectrum(const ExperimentConfig& cfg, const Mask& mask,
                                 const InputSequence& inputs) {
    const StateMatrix states = integrate_dde(cfg.model, cfg.timing, inputs, mask, cfg.integrator);
    return memory_capacity(states, inputs, cfg.capacity);
}

CapacitySpectrum mmf_spectrum(const Linearization& lin, const TimingConfig& timing, const Mask& mask,
                              double k_equiv, const MmfOptions& options) {
    const MapCoefficients coeffs = map_coefficients(lin, timing.theta, timing.nu, timing.n_v);
    const ModifiedStateMatrix s_tilde = modified_state_matrix(coeffs, mask, options);
    return mmf_capacity_spectrum(s_tilde, mmf_lambda(s_tilde, k_equiv));
}

SpectrumComparison run_spectrum_compare(const ExperimentConfig& cfg) {
    if (cfg.n_masks < 1) throw ConfigError("at least one mask is required");
    SpectrumComparison out;
    out.linearization = linearize(cfg.model);
    out.timing = cfg.timing;
    std::vector<std::vector<double>> direct(static_cast<std::size_t>(cfg.n_masks));
    std::vector<std::vector<double>> mmf(static_cast<std::size_t>(cfg.n_masks));
    out.mc_direct.assign(static_cast<std::size_t>(cfg.n_masks), 0.0);
    out.mc_mmf.assign(static_cast<std::size_t>(cfg.n_masks), 0.0);

    parallel_for(cfg.n_masks, cfg.threads, [&](int r) {
        const auto i = static_cast<std::size_t>(r);
        const Mask mask = replica_mask(cfg, r);
        const InputSequence inputs = replica_inputs(cfg, r);
        const CapacitySpectrum d = direct_spectrum(cfg, mask, inputs);
        const CapacitySpectrum m =
            mmf_spectrum(out.linearization, cfg.timing, mask, cfg.k_train, cfg.mmf);
        direct[i] = d.capacities;
        mmf[i] = m.capacities;
        out.mc_direct[i] = d.mc_total;
        out.mc_mmf[i] = m.mc_total;
    });

    mean_std(direct, out.direct_mean, out.direct_std);
    mean_std(mmf, out.mmf_mean, out.mmf_std);
    const std::size_t len = std::max(out.direct_mean.size(), out.mmf_mean.size());
    out.direct_mean.resize(len, 0.0);
    out.direct_std.resize(len, 0.0);
    out.mmf_mean.resize(len, 0.0);
    out.mmf_std.resize(len, 0.0);
    out.mc_direct_mean = mean_of(out.mc_direct);
    out.mc_mmf_mean = mean_of(out.mc_mmf);
    return out;
}

double mean_abs_difference(const std::vector<double>& x, const std::vector<double>& y, int l_max) {
    if (l_max < 0) throw ConfigError("l_max must be nonnegative");
    double s = 0.0;
    for (int l = 0; l <= l_max; ++l) {
        s += std::abs(get_capacity(x, static_cast<std::size_t>(l)) - get_capacity(y, static_cast<std::size_t>(l)));
    }
    return s / (l_max + 1);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y, int l_max) {
    if (l_max < 1) throw ConfigError("pearson: need at least two points");
    const int n = l_max + 1;
    double mx = 0.0, my = 0.0;
    for (int l = 0; l < n; ++l) {
        mx += get_capacity(x, static_cast<std::size_t>(l));
        my += get_capacity(y, static_cast<std::size_t>(l));
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int l = 0; l < n; ++l) {
        const double dx = get_capacity(x, static_cast<std::size_t>(l)) - mx;
        const double dy = get_capacity(y, static_cast<std::size_t>(l)) - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw NumericalError("pearson: a spectrum has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

std::string to_string(CellStatus status) {
    switch (status) {
        case CellStatus::ok: return "ok";
        case CellStatus::diverged: return "diverged";
        case CellStatus::invalid: return "invalid";
    }
    return "unknown";
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw ConfigError("linspace: need at least one point");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

SweepGrid run_ab_sweep(const AbSweepConfig& cfg) {
    if (cfg.a_values.empty() || cfg.b_values.empty()) throw ConfigError("sweep ranges must be nonempty");
    if (cfg.n_masks < 1) throw ConfigError("at least one mask is required");
    SweepGrid grid;
    grid.param1 = "a";
    grid.param2 = "b";
    grid.values1 = cfg.a_values;
    grid.values2 = cfg.b_values;
    const auto na = static_cast<Eigen::Index>(cfg.a_values.size());
    const auto nb = static_cast<Eigen::Index>(cfg.b_values.size());
    grid.mc_mmf = Eigen::MatrixXd::Constant(na, nb, kNaN);
    grid.mc_direct = Eigen::MatrixXd::Constant(na, nb, kNaN);
    grid.status.assign(static_cast<std::size_t>(na * nb), CellStatus::ok);

    std::vector<Mask> masks;
    for (int r = 0; r < cfg.n_masks; ++r) {
        masks.push_back(make_mask(cfg.timing.n_v, derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(r))));
    }

    parallel_for(static_cast<int>(na * nb), cfg.threads, [&](int cell) {
        const auto i = static_cast<std::size_t>(cell / nb);
        const auto j = static_cast<std::size_t>(cell % nb);
        const double a = cfg.a_values[i];
        const double b = cfg.b_values[j];
        if (a == 0.0) {
            grid.at(i, j) = CellStatus::invalid;
            return;
        }
        if (a + b >= 0.0) {
            grid.at(i, j) = CellStatus::diverged;
            return;
        }
        try {
            const Linearization lin = make_linearization(a, b, cfg.c);
            double mc = 0.0;
            for (const Mask& mask : masks) mc += mmf_spectrum(lin, cfg.timing, mask, cfg.k_equiv, cfg.mmf).mc_total;
            grid.mc_mmf(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mc / cfg.n_masks;
        } catch (const DivergenceError&) {
            grid.at(i, j) = CellStatus::diverged;
        }
    });
    return grid;
}

double rv_coefficient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw ConfigError("rv_coefficient: shapes differ");
    if (x.rows() < 2) throw ConfigError("rv_coefficient: need at least two rows");
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
    const Eigen::MatrixXd sxy = xc.transpose() * yc;
    const Eigen::MatrixXd sxx = xc.transpose() * xc;
    const Eigen::MatrixXd syy = yc.transpose() * yc;
    const double covv = (sxy * sxy.transpose()).trace();
    const double vav = (sxx * sxx).trace() * (syy * syy).trace();
    if (!(vav > 0.0)) throw NumericalError("rv_coefficient: a matrix has zero variance");
    return covv / std::sqrt(vav);
}

AgreementReport agreement(const SweepGrid& grid) {
    AgreementReport rep;
    const Eigen::Index n1 = grid.mc_direct.rows();
    const Eigen::Index n2 = grid.mc_direct.cols();
    rep.relative_difference = Eigen::MatrixXd::Constant(n1, n2, kNaN);
    int valid = 0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n1; ++i) {
        for (Eigen::Index j = 0; j < n2; ++j) {
            if (grid.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) != CellStatus::ok) continue;
            const double d = grid.mc_direct(i, j);
            const double m = grid.mc_mmf(i, j);
            if (!(d > 0.0) || !std::isfinite(m)) continue;
            const double rel = std::abs(m - d) / d;
            rep.relative_difference(i, j) = rel;
            rep.delta_mc = std::max(rep.delta_mc, rel);
            sum += rel;
            ++valid;
        }
    }
    rep.delta_mc_mean = valid > 0 ? sum / valid : kNaN;
    rep.rv = valid == n1 * n2 && valid > 0 ? rv_coefficient(grid.mc_direct, grid.mc_mmf) : kNaN;
    return rep;
}

PumpFeedbackResult run_pump_feedback_sweep(const PumpFeedbackConfig& cfg) {
    if (cfg.p_values.empty() || cfg.kappa_values.empty()) throw ConfigError("sweep ranges must be nonempty");
    const ExperimentConfig& ex = cfg.experiment;
    if (ex.n_masks < 1) throw ConfigError("at least one mask is required");
    PumpFeedbackResult out;
    SweepGrid& grid = out.grid;
    grid.param1 = "p_sl";
    grid.param2 = "kappa";
    grid.values1 = cfg.p_values;
    grid.values2 = cfg.kappa_values;
    const auto np = static_cast<Eigen::Index>(cfg.p_values.size());
    const auto nk = static_cast<Eigen::Index>(cfg.kappa_values.size());
    grid.mc_direct = Eigen::MatrixXd::Constant(np, nk, kNaN);
    grid.mc_mmf = Eigen::MatrixXd::Constant(np, nk, kNaN);
    grid.status.assign(static_cast<std::size_t>(np * nk), CellStatus::ok);

    const int cells = static_cast<int>(np * nk);
    const int tasks = cells * ex.n_masks;
    std::vector<double> direct(static_cast<std::size_t>(tasks), kNaN);
    std::vector<double> mmf(static_cast<std::size_t>(tasks), kNaN);
    std::vector<CellStatus> status(static_cast<std::size_t>(tasks), CellStatus::ok);

    parallel_for(tasks, ex.threads, [&](int task) {
        const int cell = task / ex.n_masks;
        const int r = task % ex.n_masks;
        const auto i = static_cast<std::size_t>(cell / nk);
        const auto j = static_cast<std::size_t>(cell % nk);
        StuartLandauParams params = cfg.base;
        params.p_sl = cfg.p_values[i];
        params.kappa = cfg.kappa_values[j];
        const auto t = static_cast<std::size_t>(task);
        try {
            (void)equilibrium(ReservoirModel{params});
        } catch (const ConfigError&) {
            status[t] = CellStatus::invalid;
            return;
        }
        ExperimentConfig local = ex;
        local.model = params;
        try {
            const Mask mask = replica_mask(local, r);
            const InputSequence inputs = replica_inputs(local, r);
            const Linearization lin = linearize(local.model);
            mmf[t] = mmf_spectrum(lin, local.timing, mask, local.k_train, local.mmf).mc_total;
            direct[t] = direct_spectrum(local, mask, inputs).mc_total;
        } catch (const InstabilityError&) {
            status[t] = CellStatus::diverged;
        } catch (const DivergenceError&) {
            status[t] = CellStatus::diverged;
        }
    });

    for (int cell = 0; cell < cells; ++cell) {
        const auto i = static_cast<std::size_t>(cell / nk);
        const auto j = static_cast<std::size_t>(cell % nk);
        double sd = 0.0, sm = 0.0;
        CellStatus st = CellStatus::ok;
        for (int r = 0; r < ex.n_masks; ++r) {
            const auto t = static_cast<std::size_t>(cell * ex.n_masks + r);
            if (status[t] != CellStatus::ok) st = status[t];
            sd += direct[t];
            sm += mmf[t];
        }
        grid.at(i, j) = st;
        if (st == CellStatus::ok) {
            grid.mc_direct(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sd / ex.n_masks;
            grid.mc_mmf(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sm / ex.n_masks;
        }
    }
    out.report = agreement(grid);
    return out;
}

ReservoirModel with_eta(const ReservoirModel& model, double eta) {
    ReservoirModel out = model;
    std::visit(
        [eta](auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearDdeParams>) {
                m.c = eta;
            } else {
                m.eta = eta;
            }
        },
        out);
    return out;
}

std::vector<EtaScanRow> run_eta_scan(const std::vector<double>& etas, const ExperimentConfig& base) {
    if (base.n_masks < 1) throw ConfigError("at least one mask is required");
    const int n_eta = static_cast<int>(etas.size());
    const int tasks = n_eta * base.n_masks;
    std::vector<double> direct(static_cast<std::size_t>(tasks), kNaN);
    std::vector<double> mmf(static_cast<std::size_t>(tasks), kNaN);
    std::vector<CellStatus> status(static_cast<std::size_t>(tasks), CellStatus::ok);

    parallel_for(tasks, base.threads, [&](int task) {
        const int e = task / base.n_masks;
        const int r = task % base.n_masks;
        const auto t = static_cast<std::size_t>(task);
        ExperimentConfig local = base;
        local.model = with_eta(base.model, etas[static_cast<std::size_t>(e)]);
        const Mask mask = replica_mask(local, r);
        const InputSequence inputs = replica_inputs(local, r);
        mmf[t] = mmf_spectrum(linearize(local.model), local.timing, mask, local.k_train, local.mmf).mc_total;
        try {
            direct[t] = direct_spectrum(local, mask, inputs).mc_total;
        } catch (const InstabilityError&) {
            status[t] = CellStatus::diverged;
        }
    });

    std::vector<EtaScanRow> rows;
    for (int e = 0; e < n_eta; ++e) {
        EtaScanRow row;
        row.eta = etas[static_cast<std::size_t>(e)];
        for (int r = 0; r < base.n_masks; ++r) {
            const auto t = static_cast<std::size_t>(e * base.n_masks + r);
            if (status[t] != CellStatus::ok) row.status = status[t];
            row.mc_direct += direct[t] / base.n_masks;
            row.mc_mmf += mmf[t] / base.n_masks;
        }
        if (row.status != CellStatus::ok) row.mc_direct = kNaN;
        row.ratio = row.mc_mmf / row.mc_direct;
        rows.push_back(row);
    }
    return rows;
}

StuartLandauParams stuart_landau_for(double a, double b, double gamma_nl, double eta) {
    StuartLandauParams p;
    p.kappa = b;
    p.p_sl = 0.5 * (-a - 3.0 * b);
    p.gamma_nl = gamma_nl;
    p.eta = eta;
    return p;
}

MackeyGlassParams mackey_glass_for(double a, double b, double eta) {
    if (b == 0.0) throw ConfigError("Mackey-Glass realisation needs b != 0");
    MackeyGlassParams p;
    p.p_mg = a;
    p.alpha = a * a / b;
    p.exponent_p = 1.0;
    p.eta = eta;
    return p;
}

std::vector<BenchmarkPoint> run_benchmark(const BenchmarkConfig& cfg) {
    std::vector<double> bs = cfg.b_values;
    if (bs.empty()) bs = linspace(-cfg.a - 0.1, -cfg.a - 0.005, 5);
    std::vector<BenchmarkPoint> points;
    for (double b : bs) {
        ExperimentConfig ex = cfg.experiment;
        ex.model = stuart_landau_for(cfg.a, b, cfg.gamma_nl, cfg.eta);
        const Mask mask = replica_mask(ex, 0);
        const InputSequence inputs = replica_inputs(ex, 0);

        BenchmarkPoint pt;
        pt.b = b;
        auto start = std::chrono::steady_clock::now();
        pt.mc_direct = direct_spectrum(ex, mask, inputs).mc_total;
        pt.t_direct = seconds_since(start);

        start = std::chrono::steady_clock::now();
        const Linearization lin = linearize(ex.model);
        const MapCoefficients coeffs = map_coefficients(lin, ex.timing.theta, ex.timing.nu, ex.timing.n_v);
        const ModifiedStateMatrix s_tilde = modified_state_matrix(coeffs, mask, ex.mmf);
        pt.mc_mmf = mmf_capacity_spectrum(s_tilde, mmf_lambda(s_tilde, ex.k_train)).mc_total;
        pt.t_mmf = seconds_since(start);
        pt.triangle_rows = s_tilde.triangle_rows;
        pt.ratio = pt.t_mmf / pt.t_direct;
        points.push_back(pt);
    }
    return points;
}

}  // namespace delayrc
