#include "kdv5/weights.hpp"

#include "kdv5/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace kdv5 {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kGaussPoints = 16;
// phase advance allowed per Gauss panel
constexpr double kPanelPhase = 3.0;

struct GaussRule {
    std::array<double, kGaussPoints> x{};
    std::array<double, kGaussPoints> w{};
};

// Gauss-Legendre nodes on [-1,1] by Newton iteration on P_n.
const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        GaussRule r;
        const int n = kGaussPoints;
        for (int i = 0; i < n; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 1; j <= n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
                }
                dp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::fabs(dz) < 1e-16) break;
            }
            r.x[i] = z;
            r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        return r;
    }();
    return rule;
}

double falling(int n, int i) {
    double r = 1.0;
    for (int q = 0; q < i; ++q) r *= (n - q);
    return r;
}

double poly_eval(const std::vector<double>& c, double X, int deriv) {
    double r = 0.0;
    for (int i = static_cast<int>(c.size()) - 1; i >= deriv; --i) r = r * X + c[i] * falling(i, deriv);
    return r;
}

std::vector<double> monomial(int n, double scale) {
    std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
    c[n] = scale;
    return c;
}

// acc[k] += int_a^b f(x + s) e^{-i kappa_k x} dx for k in [k0, k1), via composite Gauss-Legendre.
template <class F>
void gauss_moments(std::vector<cplx>& acc, int k0, int k1, double dk, double a, double b, F&& f) {
    if (k1 <= k0 || !(b > a)) return;
    const auto& rule = gauss_rule();
    const double kmax = dk * (k1 - 1);
    const int panels = std::max(1, static_cast<int>(std::ceil(kmax * (b - a) / kPanelPhase)));
    const double hp = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * hp;
        for (int q = 0; q < kGaussPoints; ++q) {
            const double x = lo + 0.5 * hp * (rule.x[q] + 1.0);
            const double v = 0.5 * hp * rule.w[q] * f(x);
            if (v == 0.0) continue;
            const cplx step = std::polar(1.0, -dk * x);
            cplx cur;
            for (int k = k0; k < k1; ++k) {
                if ((k - k0) % 64 == 0)
                    cur = std::polar(1.0, -dk * k * x);
                else
                    cur *= step;
                acc[k] += v * cur;
            }
        }
    }
}

}  // namespace

WeightFunction WeightFunction::cutoff(const CutoffSpec& spec, int order) {
    spec.validate();
    if (order < 0 || order > 5) throw ContractViolation("WeightFunction::cutoff: order must be in 0..5");
    WeightFunction w;
    w.spec_ = spec;
    w.order_ = order;
    w.ramp_ = std::make_pair(spec.ramp_begin(), spec.ramp_end());
    w.nondecreasing_ = (order == 0);
    w.pieces_.push_back({spec.ramp_begin(), spec.ramp_end(),
                         [spec, order](double X) { return eval_cutoff(spec, X, order); }, {}});
    if (spec.kind == CutoffKind::Plain) {
        if (order == 0) w.pieces_.push_back({spec.ramp_end(), std::numeric_limits<double>::infinity(),
                                             [](double) { return 1.0; }, {1.0}});
    } else if (order <= spec.n) {
        auto c = monomial(spec.n - order, falling(spec.n, order));
        w.pieces_.push_back({spec.ramp_end(), std::numeric_limits<double>::infinity(),
                             [c](double X) { return poly_eval(c, X, 0); }, c});
    }
    w.df_ = [spec, order](double X) { return eval_cutoff(spec, X, order + 1); };
    std::ostringstream os;
    os << spec.label() << "^(" << order << ")";
    w.label_ = os.str();
    return w;
}

WeightFunction WeightFunction::cutoff_ratio(const CutoffSpec& spec) {
    spec.validate();
    WeightFunction w;
    w.spec_ = spec;
    w.order_ = -1;
    w.ramp_ = std::make_pair(spec.ramp_begin(), spec.ramp_end());
    w.pieces_.push_back({spec.ramp_begin(), spec.ramp_end(), [spec](double X) { return ratio_third(spec, X); }, {}});
    if (spec.kind == CutoffKind::Weighted && spec.n >= 3) {
        Piece tail{spec.ramp_end(), std::numeric_limits<double>::infinity(),
                   [spec](double X) { return ratio_third(spec, X); }, {}};
        const double nn = spec.n;
        if (spec.n >= 5) tail.poly = monomial(spec.n - 5, nn * (nn - 1) * (nn - 1) * (nn - 2) * (nn - 2));
        w.pieces_.push_back(tail);
    }
    w.label_ = "ratio(" + spec.label() + ")";
    return w;
}

WeightFunction WeightFunction::window(double a, double b) {
    if (!(b > a)) throw ContractViolation("WeightFunction::window: need a < b");
    WeightFunction w;
    w.ramp_ = std::make_pair(a, b);
    w.pieces_.push_back({a, b, [](double) { return 1.0; }, {1.0}});
    w.df_ = [](double) { return 0.0; };
    std::ostringstream os;
    os << "window[" << a << "," << b << "]";
    w.label_ = os.str();
    return w;
}

WeightFunction WeightFunction::power(int n, double from) {
    if (n < 0) throw ContractViolation("WeightFunction::power: n must be >= 0");
    WeightFunction w;
    w.ramp_ = std::make_pair(from, from);
    auto c = monomial(n, 1.0);
    w.pieces_.push_back({from, std::numeric_limits<double>::infinity(), [c](double X) { return poly_eval(c, X, 0); }, c});
    w.df_ = [c](double X) { return poly_eval(c, X, 1); };
    w.nondecreasing_ = from >= 0.0;
    std::ostringstream os;
    os << "x^" << n << "[" << from << ",inf)";
    w.label_ = os.str();
    return w;
}

WeightFunction WeightFunction::custom(std::function<double(double)> f, std::function<double(double)> df,
                                      bool nondecreasing, double from, std::string label) {
    WeightFunction w;
    w.pieces_.push_back({from, std::numeric_limits<double>::infinity(), std::move(f), {}});
    if (std::isfinite(from)) w.ramp_ = std::make_pair(from, from);
    w.df_ = std::move(df);
    w.nondecreasing_ = nondecreasing;
    w.label_ = std::move(label);
    return w;
}

double WeightFunction::operator()(double X) const {
    for (const auto& p : pieces_)
        if (X >= p.begin && X <= p.end) return p.f(X);
    return 0.0;
}

double WeightFunction::derivative(double X) const {
    if (!df_) throw ContractViolation("WeightFunction: derivative not available for " + label_);
    if (pieces_.empty() || X < pieces_.front().begin) return 0.0;
    return df_(X);
}

bool WeightFunction::has_plateau() const {
    return !pieces_.empty() && std::isinf(pieces_.back().end);
}

double WeightFunction::support_begin() const {
    return pieces_.empty() ? std::numeric_limits<double>::infinity() : pieces_.front().begin;
}

bool WeightFunction::check_sign_flag(const Grid& g, double shift) const {
    if (!nondecreasing_) return false;
    if (!df_) return true;
    for (int j = 0; j < g.N; ++j) {
        const double X = g.x(j) + shift;
        if (X < support_begin()) continue;
        if (df_(X) < -1e-12) return false;
    }
    return true;
}

void check_weight_support(const Grid& g, const WeightFunction& w, double shift, const SupportPolicy& policy) {
    const double margin = policy.margin_cells * g.h();
    auto inside = [&](double X) {
        const double x = X - shift;
        return x >= margin && x <= g.L - margin;
    };
    const auto ramp = w.ramp();
    if (ramp && !(inside(ramp->first) && inside(ramp->second))) {
        std::ostringstream os;
        os << "weight " << w.label() << " with shift " << shift << " has breakpoints outside [" << margin << ", "
           << g.L - margin << "]";
        throw SupportViolation(os.str());
    }
}

namespace {

// Relative size of the integrand near the edges where the weight does not vanish.
void check_edges(const std::vector<double>& integrand, const std::vector<double>& weight, const Grid& g,
                 const SupportPolicy& policy, const std::string& label) {
    if (policy.allow_edge_truncation) return;
    const int M = static_cast<int>(integrand.size());
    double peak = 0.0;
    for (int j = 0; j < M; ++j) peak = std::max(peak, std::fabs(integrand[j] * weight[j]));
    if (peak == 0.0) return;
    const double band = policy.margin_cells * g.h();
    for (int j = 0; j < M; ++j) {
        const double x = g.L * j / M;
        if (x > band && x < g.L - band) continue;
        const double v = std::fabs(integrand[j] * weight[j]);
        if (v > policy.edge_tolerance * peak) {
            std::ostringstream os;
            os << "integrand against " << label << " is " << v / peak << " of its peak at the window edge x=" << x;
            throw SupportViolation(os.str());
        }
    }
}

}  // namespace

double weighted_integral(const Field& u, const WeightFunction& w, double shift, const SupportPolicy& policy) {
    check_weight_support(u.grid, w, shift, policy);
    const Grid& g = u.grid;
    std::vector<double> ws(static_cast<std::size_t>(g.N));
    double s = 0.0;
    for (int j = 0; j < g.N; ++j) {
        ws[j] = w(g.x(j) + shift);
        s += u.u[j] * ws[j];
    }
    check_edges(u.u, ws, g, policy, w.label());
    // trapezoid on [0, L] with the weight read non-periodically at the right end
    s += 0.5 * u.u[0] * (w(g.L + shift) - ws[0]);
    return s * g.h();
}

WeightMoments::WeightMoments(const Grid& g, const WeightFunction& w, double shift, int modes)
    : grid_(g), shift_(shift), plateau_(w.has_plateau()), w_(w) {
    if (modes < 1) throw ContractViolation("WeightMoments: need at least one mode");
    W_.assign(static_cast<std::size_t>(modes), cplx(0.0, 0.0));
    const double dk = 2.0 * kPi / g.L;
    for (const auto& piece : w.pieces()) {
        const double a = std::max(piece.begin, shift) - shift;
        const double b = std::min(piece.end, shift + g.L) - shift;
        if (!(b > a)) continue;
        auto f = [&piece, shift](double x) { return piece.f(x + shift); };
        if (piece.poly.empty()) {
            gauss_moments(W_, 0, modes, dk, a, b, f);
            continue;
        }
        // polynomial piece: Gauss for slowly oscillating modes, closed form otherwise
        const int d = static_cast<int>(piece.poly.size()) - 1;
        const double width = b - a;
        int k_split = static_cast<int>(std::floor(8.0 * (d + 1) / (dk * width))) + 1;
        k_split = std::min(k_split, modes);
        gauss_moments(W_, 0, k_split, dk, a, b, f);
        const double A = a + shift, B = b + shift;
        for (int k = k_split; k < modes; ++k) {
            const double kap = dk * k;
            const cplx c(0.0, -kap);
            // int P(X) e^{-i kappa (X - shift)} dX = [e^{-i kappa x} sum_j (-1)^j P^(j)(X) / c^{j+1}]
            cplx sa(0.0, 0.0), sb(0.0, 0.0);
            cplx cp = c;
            for (int j = 0; j <= d; ++j) {
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                sa += sign * poly_eval(piece.poly, A, j) / cp;
                sb += sign * poly_eval(piece.poly, B, j) / cp;
                cp *= c;
            }
            W_[k] += std::polar(1.0, -kap * b) * sb - std::polar(1.0, -kap * a) * sa;
        }
    }
    for (auto& v : W_) v /= g.L;
}

Spectrum product_spectrum(const Grid& g, std::span<const Spectrum> factors, std::vector<double>* samples) {
    if (factors.empty()) throw ContractViolation("product_spectrum: no factors");
    const int p = static_cast<int>(factors.size());
    const int M = p * g.N;
    std::vector<double> prod(static_cast<std::size_t>(M), 1.0);
    for (const auto& f : factors) {
        Spectrum s = resize_spectrum(f, g.N, M);
        if (M == g.N) s[g.N / 2] = 0.0;
        const auto v = inverse_samples(s, M);
        for (int j = 0; j < M; ++j) prod[j] *= v[j];
    }
    Spectrum out = forward_samples(prod);
    if (samples) *samples = std::move(prod);
    return out;
}

double product_integral(const Grid& g, std::span<const Spectrum> factors, const WeightMoments& m,
                        const SupportPolicy& policy) {
    const int M = static_cast<int>(factors.size()) * g.N;
    if (m.modes() < M / 2) throw ContractViolation("product_integral: weight moments do not cover the product");
    std::vector<double> samples;
    const Spectrum gh = product_spectrum(g, factors, &samples);
    if (m.plateau() && !policy.allow_edge_truncation) {
        std::vector<double> ws(static_cast<std::size_t>(M));
        for (int j = 0; j < M; ++j) ws[j] = m.weight()(g.L * j / M + m.shift());
        check_edges(samples, ws, g, policy, m.weight().label());
    }
    const auto& W = m.values();
    double acc = (gh[0] * std::conj(W[0])).real();
    for (int k = 1; k < M / 2; ++k) acc += 2.0 * (gh[k] * std::conj(W[k])).real();
    return acc * g.L;
}

WeightMoments moments_for(const Grid& g, const WeightFunction& w, double shift, int max_degree,
                          const SupportPolicy& policy) {
    check_weight_support(g, w, shift, policy);
    return WeightMoments(g, w, shift, max_degree * g.N / 2 + 1);
}

}  // namespace kdv5
