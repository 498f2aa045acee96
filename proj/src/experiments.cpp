#include "kdv5/experiments.hpp"

#include "kdv5/cutoffs.hpp"
#include "kdv5/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace kdv5 {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Fraction of the window next to the seam used for the seam-mass diagnostic.
constexpr double kSeamBand = 0.05;

double ramp(double x) { return eval_cutoff(CutoffSpec::plain(0.0, 1.0), x, 0); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

int nu_degree(int l) {
    if (l < 1) throw ContractViolation("nu_degree: l must be >= 1");
    static constexpr int table[] = {1, 1, 2, 2, 4, 8};
    return l <= 6 ? table[l - 1] : 8 * (l - 5);
}

BootstrapSchedule bootstrap_schedule(int n) {
    if (n < 1) throw ContractViolation("bootstrap_schedule: n must be >= 1");
    BootstrapSchedule s;
    s.n = n;
    for (int k = 0; k <= n; ++k) s.pairs.emplace_back(2 * k, n - k);
    s.final_l = 2 * n + 1;
    return s;
}

double DataSpec::get(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

Field build_data(const Grid& g, const DataSpec& d, std::uint64_t seed) {
    const double mid = 0.5 * g.L;
    Field u(g);
    bool smooth = true;
    if (d.id == "soliton") {
        const double c = d.get("c", 1.0), x0 = d.get("x0", mid);
        if (!(c > 0.0)) throw ContractViolation("soliton: c must be > 0");
        u = Field::sample(g, [=](double x) {
            const double s = 1.0 / std::cosh(0.5 * std::sqrt(c) * (x - x0));
            return 3.0 * c * s * s;
        });
    } else if (d.id == "gaussian") {
        const double a = d.get("amplitude", 1.0), c = d.get("center", mid), w = d.get("width", 2.0);
        if (!(w > 0.0)) throw ContractViolation("gaussian: width must be > 0");
        u = Field::sample(g, [=](double x) {
            const double z = (x - c) / w;
            return a * std::exp(-z * z);
        });
    } else if (d.id == "smooth_right_rough_left") {
        smooth = false;
        const double lb = d.get("l_break", 3.0), x0 = d.get("x0", mid);
        const double ab = d.get("base_amplitude", 0.05), cb = d.get("base_center", x0 + 4.0);
        const double wb = d.get("base_width", 2.0), ar = d.get("rough_amplitude", 0.02);
        const int kr = static_cast<int>(d.get("k_rough", 16.0));
        const double taper = d.get("taper", 2.0);
        if (kr < 1 || 3 * kr >= g.N) throw ContractViolation("smooth_right_rough_left: k_rough out of range");
        if (!(x0 - 1.0 > taper + 1.0)) throw ContractViolation("smooth_right_rough_left: x0 too close to the seam");
        // phases are drawn for k = 1, 2, ... so coarser grids share the low modes
        Rng rng(seed);
        Spectrum s(static_cast<std::size_t>(g.modes()), cplx(0.0, 0.0));
        for (int k = 1; k < g.N / 2; ++k) {
            const double phase = 2.0 * kPi * rng.uniform();
            if (k < kr || 3 * k > g.N) continue;  // rough band stops at the dealiasing cut
            const double c = ar * std::pow(static_cast<double>(kr) / k, lb + 0.6);
            s[static_cast<std::size_t>(k)] = 0.5 * c * std::polar(1.0, phase);
        }
        const Field rough = inverse(g, s);
        u = Field::sample(g, [=](double x) {
            const double z = (x - cb) / wb;
            return ab * std::exp(-z * z);
        });
        for (int j = 0; j < g.N; ++j) {
            const double x = g.x(j);
            const double mask = (1.0 - ramp(x - (x0 - 1.0))) * ramp(x - taper);
            u[j] += rough[j] * mask;
        }
    } else if (d.id == "one_sided_decay") {
        const double n = d.get("n", 2.0), origin = d.get("origin", mid), kappa = d.get("kappa", 2.0);
        const double left = d.get("left", 4.0);
        const double rf = d.get("right_from", 0.6 * mid), rt = d.get("right_to", 0.75 * mid);
        if (!(rt > rf) || !(rf > 0.0)) throw ContractViolation("one_sided_decay: need 0 < right_from < right_to");
        const double p = 0.5 * (n + 1.0) + 0.1;
        u = Field::sample(g, [=](double x) {
            const double X = x - origin;
            const double env = std::pow(1.0 + X * X, -0.5 * p);
            const double lt = eval_cutoff(CutoffSpec::plain(0.0, 2.0), X + left, 0);
            const double rtp = 1.0 - eval_cutoff(CutoffSpec::plain(0.0, rt - rf), X - rf, 0);
            return env * std::cos(kappa * X) * lt * rtp;
        });
    } else {
        throw ContractViolation("build_data: unknown data id '" + d.id + "'");
    }
    if (!u.all_finite()) throw ContractViolation("build_data: non-finite data");
    if (smooth && u.max_abs() > 0.0 && spectral_tail(u) > kDataTailLimit) {
        std::ostringstream os;
        os << "build_data: " << d.id << " is not resolved on N=" << g.N << " (tail " << spectral_tail(u) << ")";
        throw ContractViolation(os.str());
    }
    return u;
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Propagation: return "propagation";
        case ExperimentKind::Decay: return "decay";
        case ExperimentKind::Bootstrap: return "bootstrap";
    }
    return "?";
}

ExperimentKind experiment_from_string(const std::string& s) {
    for (auto k : {ExperimentKind::Simulate, ExperimentKind::Propagation, ExperimentKind::Decay,
                   ExperimentKind::Bootstrap})
        if (s == to_string(k)) return k;
    throw ContractViolation("unknown experiment '" + s + "'");
}

namespace {

SupportPolicy experiment_policy() {
    // fifth-order radiation wraps around the torus; its size at the seam is reported separately
    SupportPolicy p;
    p.allow_edge_truncation = true;
    return p;
}

WeightedFunctional with_id(WeightedFunctional f, std::string id) {
    f.id = std::move(id);
    f.policy = experiment_policy();
    return f;
}

CutoffSpec family(int n, double eps, double b) {
    return n > 0 ? CutoffSpec::weighted(n, eps, b) : CutoffSpec::plain(eps, b);
}

WeightedFunctional from_spec(const FunctionalSpec& s, double offset) {
    const CutoffSpec c = family(s.n, s.eps, s.b);
    std::ostringstream id;
    id << s.kind << "_l" << s.l << "_n" << s.n << "_nu" << num(s.nu);
    if (s.kind == "energy") return with_id(WeightedFunctional::energy(s.l, WeightFunction::cutoff(c), s.nu, offset), id.str());
    if (s.kind == "smoothing")
        return with_id(WeightedFunctional::smoothing(s.l, WeightFunction::cutoff(c, 1), s.nu, offset), id.str());
    if (s.kind == "corrected")
        return with_id(WeightedFunctional::corrected(s.l, WeightFunction::cutoff(c), s.nu, offset), id.str());
    if (s.kind == "cubic_decay")
        return with_id(WeightedFunctional::cubic_decay(CutoffSpec::weighted(std::max(s.n, 1), s.eps, s.b), s.nu, offset),
                       id.str());
    if (s.kind == "xweighted") return with_id(WeightedFunctional::xweighted(s.n, s.l, s.eps, offset), id.str());
    throw ContractViolation("unknown functional kind '" + s.kind + "'");
}

std::vector<WeightedFunctional> propagation_set(const ExperimentConfig& c) {
    std::vector<WeightedFunctional> fs;
    const auto& w = c.window;
    for (double nu : w.nu) {
        for (int m = 0; m <= c.l; ++m)
            fs.push_back(with_id(WeightedFunctional::energy(m, WeightFunction::cutoff(CutoffSpec::plain(w.eps, w.b)), nu,
                                                            -w.x0),
                                 "E" + std::to_string(m) + "_nu" + num(nu)));
        fs.push_back(with_id(WeightedFunctional::smoothing(c.l, WeightFunction::window(w.eps, w.R), nu, -w.x0),
                             "S" + std::to_string(c.l + 2) + "_nu" + num(nu)));
    }
    return fs;
}

std::vector<WeightedFunctional> decay_set(const ExperimentConfig& c) {
    std::vector<WeightedFunctional> fs;
    const double origin = c.data.get("origin", 0.5 * c.grid.L);
    for (int m = 0; m <= c.l; ++m)
        fs.push_back(with_id(WeightedFunctional::xweighted(c.n, m, c.window.eps, -origin),
                             "X" + std::to_string(c.n) + "_m" + std::to_string(m)));
    fs.push_back(with_id(WeightedFunctional::smoothing(c.l, WeightFunction::power(c.n - 1, 0.0), 0.0, -origin),
                         "XS" + std::to_string(c.n - 1) + "_m" + std::to_string(c.l + 2)));
    return fs;
}

std::vector<WeightedFunctional> bootstrap_set(const ExperimentConfig& c) {
    const auto s = bootstrap_schedule(c.n);
    const auto& w = c.window;
    const double nu = w.nu.empty() ? 0.0 : w.nu.front();
    std::vector<WeightedFunctional> fs;
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
        const auto [lk, nk] = s.pairs[k];
        const CutoffSpec spec = family(nk, w.eps, w.b);
        const std::string tag = "B" + std::to_string(k) + "_n" + std::to_string(nk);
        for (int j = 0; j <= lk; ++j)
            fs.push_back(with_id(WeightedFunctional::energy(j, WeightFunction::cutoff(spec), nu, -w.x0),
                                 tag + "_E" + std::to_string(j)));
        fs.push_back(with_id(WeightedFunctional::smoothing(lk, WeightFunction::cutoff(spec, 1), nu, -w.x0),
                             tag + "_S" + std::to_string(lk + 2)));
    }
    fs.push_back(with_id(WeightedFunctional::energy(s.final_l, WeightFunction::cutoff(CutoffSpec::plain(w.eps, w.b)), nu,
                                                    -w.x0),
                         "final_E" + std::to_string(s.final_l)));
    return fs;
}

std::vector<WeightedFunctional> functional_set(const ExperimentConfig& c) {
    std::vector<WeightedFunctional> fs;
    switch (c.experiment) {
        case ExperimentKind::Propagation: fs = propagation_set(c); break;
        case ExperimentKind::Decay: fs = decay_set(c); break;
        case ExperimentKind::Bootstrap: fs = bootstrap_set(c); break;
        case ExperimentKind::Simulate: break;
    }
    for (const auto& s : c.functionals) fs.push_back(from_spec(s, -c.window.x0));
    return fs;
}

bool nondecreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1]) return false;
    return true;
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void ExperimentConfig::validate() const {
    model.validate();
    if (grid.N < 16 || grid.N % 2 != 0 || !(grid.L > 0.0)) throw ConfigError("grid: need even N >= 16 and L > 0");
    if (!(solver.t_end > 0.0)) throw ConfigError("solver.t_end must be > 0");
    if (solver.stride < 1) throw ConfigError("solver.stride must be >= 1");
    if (l < 0 || n < 0) throw ConfigError("l and n must be >= 0");
    if (experiment == ExperimentKind::Decay && n < 1) throw ConfigError("decay: n must be >= 1");
    if (experiment == ExperimentKind::Bootstrap && (n < 1 || 2 * n + 2 > 8))
        throw ConfigError("bootstrap: n must be in 1..3 (derivative orders up to 8)");
    if (experiment == ExperimentKind::Propagation && (l + 2 > 8 || window.nu.empty()))
        throw ConfigError("propagation: need l <= 6 and at least one nu");
    if (!(window.R > window.eps)) throw ConfigError("window: need R > eps");
    for (double nu : window.nu)
        if (nu < 0.0) throw ConfigError("window.nu must be >= 0");
    for (const auto& f : functional_set(*this)) {
        check_weight_support(grid, f.weight, f.shift(0.0), f.policy);
        check_weight_support(grid, f.weight, f.shift(solver.t_end), f.policy);
    }
}

double stable_dt(const Model& m, const Field& u0, const SolverConfig& cfg, double safety) {
    if (!(safety > 0.0)) throw ContractViolation("stable_dt: safety must be > 0");
    const double stiff = nonlinear_stiffness(m, u0, cfg.dealias);
    double dt = stiff > 0.0 ? safety * kStabilityEnvelope / stiff : cfg.t_end;
    dt = std::min(dt, 1e-3);
    long steps = static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9));
    steps = std::max<long>(steps, cfg.stride);
    steps = ((steps + cfg.stride - 1) / cfg.stride) * cfg.stride;
    return cfg.t_end / static_cast<double>(steps);
}

EnergyReport run_experiment(const ExperimentConfig& cfg, Field* final_state) {
    EnergyReport rep;
    rep.experiment = to_string(cfg.experiment);
    try {
        cfg.validate();
    } catch (const SupportViolation& e) {
        rep.warnings.push_back(std::string("seam violation: ") + e.what());
        rep.checks["support"] = false;
        return rep;
    }
    rep.checks["support"] = true;
    const Field u0 = build_data(cfg.grid, cfg.data, cfg.seed);
    SolverConfig sc = cfg.solver;
    if (!(sc.dt > 0.0)) sc.dt = stable_dt(cfg.model, u0, sc, cfg.dt_safety);
    rep.summary["dt"] = sc.dt;

    FunctionalTracker tracker(functional_set(cfg));
    std::vector<FunctionalTracker::Row> extra;
    const int gl = cfg.l + 1;
    const std::string gid = "global_H" + std::to_string(gl);
    const bool want_global = cfg.experiment == ExperimentKind::Propagation;
    Observer diag = [&](double t, const Field& u) {
        if (want_global) extra.push_back({t, gid, sobolev_norm(u, gl)});
        const int band = std::max(1, static_cast<int>(kSeamBand * u.size()));
        double edge = 0.0;
        for (int j = 0; j < band; ++j) edge = std::max({edge, std::fabs(u[j]), std::fabs(u[u.size() - 1 - j])});
        const double peak = u.max_abs();
        extra.push_back({t, "seam_mass", peak > 0.0 ? edge / peak : 0.0});
    };
    try {
        const Trajectory tr = simulate(cfg.model, u0, sc, {tracker.observer(), diag}, false);
        rep.warnings = tr.warnings;
        if (final_state) *final_state = tr.final_state;
        rep.checks["no_blowup"] = true;
    } catch (const BlowUpError& e) {
        rep.warnings.push_back(std::string("blow-up: ") + e.what());
        rep.summary["last_good_time"] = e.last_good_time();
        rep.checks["no_blowup"] = false;
    } catch (const SupportViolation& e) {
        rep.warnings.push_back(std::string("seam violation: ") + e.what());
        rep.checks["support"] = false;
    }

    // merge per observation time: tracker rows then diagnostics
    std::size_t ei = 0;
    const auto& rows = tracker.rows();
    std::size_t ri = 0;
    while (ri < rows.size() || ei < extra.size()) {
        const double t = ri < rows.size() ? rows[ri].t : extra[ei].t;
        while (ri < rows.size() && rows[ri].t == t) rep.rows.push_back(rows[ri++]);
        while (ei < extra.size() && extra[ei].t == t) rep.rows.push_back(extra[ei++]);
    }

    bool finite = true, smooth_ok = true;
    for (const auto& f : tracker.functionals()) {
        const auto s = tracker.series(f.id);
        finite = finite && all_finite(s);
        if (f.kind == FunctionalKind::Smoothing) smooth_ok = smooth_ok && nondecreasing(s);
        if (!s.empty()) {
            rep.summary["sup:" + f.id] = *std::max_element(s.begin(), s.end());
            rep.summary["initial:" + f.id] = s.front();
        }
    }
    rep.checks["finite"] = finite;
    rep.checks["smoothing_nondecreasing"] = smooth_ok;
    double seam = 0.0;
    for (const auto& r : extra)
        if (r.id == "seam_mass") seam = std::max(seam, r.value);
    rep.summary["sup:seam_mass"] = seam;

    if (want_global) {
        double gmin = INFINITY;
        for (const auto& r : extra)
            if (r.id == gid) gmin = std::min(gmin, r.value);
        rep.summary["min:" + gid] = gmin;
        bool gap = true;
        for (double nu : cfg.window.nu) {
            // windowed H^l norm: sqrt of the sum of the energies m = 0..l at each time
            std::vector<double> h2;
            for (int m = 0; m <= cfg.l; ++m) {
                const auto s = tracker.series("E" + std::to_string(m) + "_nu" + num(nu));
                if (h2.empty()) h2.assign(s.size(), 0.0);
                for (std::size_t i = 0; i < s.size(); ++i) h2[i] += s[i];
            }
            const double sup = h2.empty() ? 0.0 : std::sqrt(*std::max_element(h2.begin(), h2.end()));
            const std::string w = "H" + std::to_string(cfg.l) + "_window_nu" + num(nu);
            rep.summary["sup:" + w] = sup;
            const double ratio = sup > 0.0 ? gmin / sup : INFINITY;
            rep.summary["gap_nu" + num(nu)] = ratio;
            if (!h2.empty() && h2.front() > 0.0)
                for (const auto& r : extra)
                    if (r.id == gid) {
                        rep.summary["gap_initial_nu" + num(nu)] = r.value / std::sqrt(h2.front());
                        break;
                    }
            gap = gap && ratio >= kRoughGapFactor;
        }
        if (cfg.data.id == "smooth_right_rough_left") rep.checks["global_exceeds_windowed"] = gap;
    }
    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const auto& kv) { return kv.second; });
    return rep;
}

EnergyReport run_propagation(const ExperimentConfig& cfg) {
    auto c = cfg;
    c.experiment = ExperimentKind::Propagation;
    return run_experiment(c);
}

EnergyReport run_decay(const ExperimentConfig& cfg) {
    auto c = cfg;
    c.experiment = ExperimentKind::Decay;
    return run_experiment(c);
}

EnergyReport run_bootstrap(const ExperimentConfig& cfg) {
    auto c = cfg;
    c.experiment = ExperimentKind::Bootstrap;
    return run_experiment(c);
}

EnergyReport run_simulate(const ExperimentConfig& cfg, Field* final_state) {
    auto c = cfg;
    c.experiment = ExperimentKind::Simulate;
    return run_experiment(c, final_state);
}

std::string report_csv(const EnergyReport& r) {
    std::string out = "t,functional_id,value\n";
    char buf[64];
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%.17g", row.t);
        out += buf;
        out += ',';
        out += row.id;
        std::snprintf(buf, sizeof buf, ",%.17g\n", row.value);
        out += buf;
    }
    return out;
}

std::map<std::string, double> series_sup(const EnergyReport& r) {
    std::map<std::string, double> s;
    for (const auto& row : r.rows) {
        auto it = s.find(row.id);
        if (it == s.end()) s[row.id] = row.value;
        else it->second = std::max(it->second, row.value);
    }
    return s;
}

}  // namespace kdv5
