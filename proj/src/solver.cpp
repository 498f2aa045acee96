#include "kdv5/solver.hpp"

#include "kdv5/errors.hpp"

#include <cmath>
#include <sstream>

namespace kdv5 {

std::string to_string(Scheme s) { return s == Scheme::ETDRK4 ? "etdrk4" : "ifrk4"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "etdrk4" || s == "ETDRK4") return Scheme::ETDRK4;
    if (s == "ifrk4" || s == "IFRK4") return Scheme::IFRK4;
    throw ConfigError("unknown scheme: " + s);
}

long SolverConfig::steps() const {
    if (!(dt > 0.0 && std::isfinite(dt))) throw ContractViolation("solver: dt must be positive");
    if (!(t_end > 0.0 && std::isfinite(t_end))) throw ContractViolation("solver: t_end must be positive");
    if (stride < 1) throw ContractViolation("solver: stride must be >= 1");
    const double r = t_end / dt;
    const long n = std::lround(r);
    if (n < 1 || std::fabs(r - n) > 1e-9 * r) throw ContractViolation("solver: t_end is not an integer number of steps");
    if (n % stride != 0) throw ContractViolation("solver: step count is not a multiple of the stride");
    return n;
}

Field linear_exact(const Field& u0, double t, double a5, double a3, double a1) {
    if (t == 0.0) return u0;
    Model lin;
    lin.a5 = a5;
    lin.a3 = a3;
    lin.a1 = a1;
    const auto lam = linear_symbol(lin, u0.grid);
    Spectrum s = forward(u0);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] *= std::polar(1.0, t * lam[k].imag());
    return inverse(u0.grid, s);
}

std::array<cplx, 3> phi123(cplx z) {
    std::array<cplx, 3> out;
    if (std::abs(z) < kPhiSeriesRadius) {
        // phi_k(z) = sum_j z^j / (j+k)!
        for (int k = 1; k <= 3; ++k) {
            cplx acc(0.0, 0.0), zj(1.0, 0.0);
            double fact = 1.0;
            for (int i = 1; i <= k; ++i) fact *= i;
            for (int j = 0; j < kPhiSeriesTerms; ++j) {
                acc += zj / fact;
                zj *= z;
                fact *= (j + k + 1);
            }
            out[k - 1] = acc;
        }
        return out;
    }
    const cplx e = std::exp(z);
    out[0] = (e - 1.0) / z;
    out[1] = (out[0] - 1.0) / z;
    out[2] = (out[1] - 0.5) / z;
    return out;
}

Stepper::Stepper(const Model& m, const Grid& g, double dt, Scheme scheme, Dealias dealias)
    : model_(m), grid_(g), dt_(dt), scheme_(scheme), dealias_(dealias) {
    m.validate();
    const auto lam = linear_symbol(m, g);
    const std::size_t n = lam.size();
    E_.resize(n);
    E2_.resize(n);
    Q_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx z = dt * lam[k];
        E_[k] = std::polar(1.0, z.imag());
        E2_[k] = std::polar(1.0, 0.5 * z.imag());
        if (scheme == Scheme::ETDRK4) {
            const auto ph = phi123(z);
            const auto hh = phi123(0.5 * z);
            Q_[k] = 0.5 * dt * hh[0];
            f1_[k] = dt * (ph[0] - 3.0 * ph[1] + 4.0 * ph[2]);
            f2_[k] = dt * (ph[1] - 2.0 * ph[2]);
            f3_[k] = dt * (4.0 * ph[2] - ph[1]);
        }
    }
}

Spectrum Stepper::N(const Spectrum& v) const { return nonlinear_spectrum(model_, grid_, v, dealias_); }

Spectrum Stepper::step(const Spectrum& u) const {
    const std::size_t n = u.size();
    Spectrum a(n), b(n), c(n), out(n);
    if (scheme_ == Scheme::ETDRK4) {
        const Spectrum Nu = N(u);
        for (std::size_t k = 0; k < n; ++k) a[k] = E2_[k] * u[k] + Q_[k] * Nu[k];
        const Spectrum Na = N(a);
        for (std::size_t k = 0; k < n; ++k) b[k] = E2_[k] * u[k] + Q_[k] * Na[k];
        const Spectrum Nb = N(b);
        for (std::size_t k = 0; k < n; ++k) c[k] = E2_[k] * a[k] + Q_[k] * (2.0 * Nb[k] - Nu[k]);
        const Spectrum Nc = N(c);
        for (std::size_t k = 0; k < n; ++k)
            out[k] = E_[k] * u[k] + f1_[k] * Nu[k] + 2.0 * f2_[k] * (Na[k] + Nb[k]) + f3_[k] * Nc[k];
        return out;
    }
    const double h = dt_;
    const Spectrum k1 = N(u);
    for (std::size_t k = 0; k < n; ++k) a[k] = E2_[k] * (u[k] + 0.5 * h * k1[k]);
    const Spectrum k2 = N(a);
    for (std::size_t k = 0; k < n; ++k) b[k] = E2_[k] * u[k] + 0.5 * h * k2[k];
    const Spectrum k3 = N(b);
    for (std::size_t k = 0; k < n; ++k) c[k] = E_[k] * u[k] + h * E2_[k] * k3[k];
    const Spectrum k4 = N(c);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = E_[k] * u[k] + h / 6.0 * (E_[k] * k1[k] + 2.0 * E2_[k] * (k2[k] + k3[k]) + k4[k]);
    return out;
}

Field step(const Field& u, const Model& m, const SolverConfig& cfg) {
    Stepper s(m, u.grid, cfg.dt, cfg.scheme, cfg.dealias);
    return inverse(u.grid, s.step(forward(u)));
}

double nonlinear_stiffness(const Model& m, const Field& u, Dealias d) {
    const Grid& g = u.grid;
    const double kc = g.kappa(d == Dealias::TwoThirds ? g.N / 3 : g.N / 2);
    std::array<double, 4> sup{};
    for (int o = 0; o < 4; ++o) sup[o] = derivative(u, o).max_abs();
    double total = 0.0;
    for (const auto& t : m.monomials) {
        double best = 0.0;
        for (std::size_t i = 0; i < t.orders.size(); ++i) {
            double p = std::pow(kc, t.orders[i]);
            for (std::size_t j = 0; j < t.orders.size(); ++j)
                if (j != i) p *= sup[t.orders[j]];
            best = std::max(best, p);
        }
        total += std::fabs(t.c) * best;
    }
    return total;
}

Field reflect(const Field& u) {
    Field r(u.grid);
    const int N = u.grid.N;
    for (int j = 0; j < N; ++j) r.u[j] = u.u[(N - j) % N];
    return r;
}

namespace {

bool finite(const Spectrum& s) {
    for (const auto& c : s)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

double seam_fraction(const Field& u, double margin) {
    const double peak = u.max_abs();
    if (peak == 0.0 || margin <= 0.0) return 0.0;
    double edge = 0.0;
    for (int j = 0; j < u.grid.N; ++j) {
        const double x = u.grid.x(j);
        if (x < margin || x > u.grid.L - margin) edge = std::max(edge, std::fabs(u.u[j]));
    }
    return edge / peak;
}

}  // namespace

Trajectory simulate(const Model& m, const Field& u0, const SolverConfig& cfg, const std::vector<Observer>& observers,
                    bool keep_snapshots) {
    const long nsteps = cfg.steps();
    if (!u0.all_finite()) throw ContractViolation("simulate: initial data is not finite");
    Trajectory tr;
    const double tail = spectral_tail(u0);
    if (tail > 1e-10) {
        std::ostringstream os;
        os << "initial data not resolved: spectral tail " << tail;
        tr.warnings.push_back(os.str());
    }
    const double stiff = nonlinear_stiffness(m, u0, cfg.dealias);
    if (cfg.dt * stiff > kStabilityEnvelope) {
        std::ostringstream os;
        os << "dt * nonlinear stiffness = " << cfg.dt * stiff << " exceeds " << kStabilityEnvelope;
        tr.warnings.push_back(os.str());
    }
    const Stepper stepper(m, u0.grid, cfg.dt, cfg.scheme, cfg.dealias);
    bool seam_warned = false;
    auto emit = [&](double t, const Field& u) {
        for (const auto& ob : observers) ob(t, u);
        if (keep_snapshots) tr.snapshots.push_back({t, u});
        if (!seam_warned && seam_fraction(u, cfg.seam_margin) > 1e-8) {
            std::ostringstream os;
            os << "solution reaches the seam band at t=" << t;
            tr.warnings.push_back(os.str());
            seam_warned = true;
        }
    };
    emit(0.0, u0);
    Spectrum uh = forward(u0);
    double last_good = 0.0;
    for (long n = 1; n <= nsteps; ++n) {
        uh = stepper.step(uh);
        const double t = n * cfg.dt;
        if (!finite(uh)) {
            std::ostringstream os;
            os << "non-finite state in step " << n << " (t=" << t << ")";
            throw BlowUpError(os.str(), last_good);
        }
        last_good = t;
        if (n % cfg.stride == 0) emit(t, inverse(u0.grid, uh));
    }
    tr.final_time = nsteps * cfg.dt;
    tr.final_state = inverse(u0.grid, uh);
    return tr;
}

}  // namespace kdv5
