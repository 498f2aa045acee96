#include "kdv5/lemmas.hpp"

#include "kdv5/errors.hpp"

#include <algorithm>
#include <cmath>

namespace kdv5 {

namespace {

// Cumulative trapezoid integral of piecewise-linear samples, evaluated anywhere in [0, X].
class Cumulative {
public:
    Cumulative(const std::vector<double>& f, double X) : f_(f), h_(X / static_cast<double>(f.size() - 1)) {
        c_.assign(f.size(), 0.0);
        for (std::size_t i = 1; i < f.size(); ++i) c_[i] = c_[i - 1] + 0.5 * h_ * (f[i - 1] + f[i]);
    }
    double operator()(double a) const {
        const double s = a / h_;
        auto i = static_cast<std::size_t>(std::floor(s));
        if (i >= f_.size() - 1) return c_.back();
        const double th = s - static_cast<double>(i);
        const double fa = f_[i] + th * (f_[i + 1] - f_[i]);
        return c_[i] + 0.5 * th * h_ * (f_[i] + fa);
    }

private:
    std::vector<double> f_, c_;
    double h_;
};

}  // namespace

DyadicDecayReport check_dyadic_decay(const std::vector<double>& f, double X, double alpha, double eps) {
    if (f.size() < 3) throw ContractViolation("check_dyadic_decay: need at least 3 samples");
    if (!(X >= 4.0)) throw ContractViolation("check_dyadic_decay: need X >= 4");
    if (!(eps > 0.0) || !(alpha > 0.0)) throw ContractViolation("check_dyadic_decay: alpha, eps must be > 0");
    for (double v : f)
        if (!(v >= 0.0)) throw ContractViolation("check_dyadic_decay: f must be nonnegative and finite");

    DyadicDecayReport r;
    const Cumulative F(f, X);
    const int J = static_cast<int>(std::floor(std::log2(X)));
    for (int j = 0; j <= J; ++j) r.dyadic_points.push_back(std::ldexp(1.0, j));

    // hypothesis on the dyadic points
    std::vector<double> c;
    for (double a : r.dyadic_points) c.push_back(F(a) / std::pow(a, alpha));
    const int half = J / 2;
    const double lo = *std::max_element(c.begin(), c.begin() + half + 1);
    const double hi = *std::max_element(c.begin() + half + 1, c.end());
    r.hypothesis_constant = std::max(lo, hi);
    r.growth = lo > 0.0 ? hi / lo : (hi > 0.0 ? INFINITY : 1.0);
    r.hypothesis_ok = r.growth <= kDyadicGrowthLimit;

    // weighted samples and their dyadic blocks
    std::vector<double> g(f.size());
    const double h = X / static_cast<double>(f.size() - 1);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = h * static_cast<double>(i);
        g[i] = f[i] / std::pow(1.0 + x * x, 0.5 * (alpha + eps));
    }
    const Cumulative Gw(g, X);
    double prev = 0.0;
    for (double a : r.dyadic_points) {
        const double v = Gw(a);
        r.block_sums.push_back(v - prev);
        prev = v;
    }
    r.total = Gw(X);

    // first block index from which every later ratio is below one
    const int B = static_cast<int>(r.block_sums.size());
    int start = B - 1;
    while (start > 0) {
        const double a = r.block_sums[static_cast<std::size_t>(start - 1)];
        const double b = r.block_sums[static_cast<std::size_t>(start)];
        if (a == 0.0 && b == 0.0) {
            --start;
            continue;
        }
        if (!(b < a)) break;
        --start;
    }
    r.converging = start <= B - 3;
    r.x_star = r.dyadic_points[static_cast<std::size_t>(std::min(start, B - 1))];
    r.pass = r.hypothesis_ok && r.converging;
    if (!r.hypothesis_ok) r.note = "hypothesis int_0^a f <= c a^alpha violated";
    else if (!r.converging) r.note = "dyadic blocks do not decrease";
    return r;
}

Sob2Report check_sob2(const SpaceTimeFunction& fn, double L, double T, int n) {
    if (!fn.f || !fn.f_x || !fn.f_t || !fn.f_xt) throw ContractViolation("check_sob2: missing callable");
    if (!(L > 0.0) || !(T > 0.0) || n < 2) throw ContractViolation("check_sob2: need L, T > 0 and n >= 2");
    const double hx = L / n, ht = T / n;
    double sup = 0.0, Ixt = 0.0, I = 0.0, It = 0.0, Ix = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double wx = (i == 0 || i == n) ? 0.5 : 1.0;
        const double x = hx * i;
        for (int k = 0; k <= n; ++k) {
            const double w = wx * ((k == 0 || k == n) ? 0.5 : 1.0);
            const double t = ht * k;
            const double v = fn.f(x, t);
            sup = std::max(sup, std::fabs(v));
            I += w * std::fabs(v);
            Ix += w * std::fabs(fn.f_x(x, t));
            It += w * std::fabs(fn.f_t(x, t));
            Ixt += w * std::fabs(fn.f_xt(x, t));
        }
    }
    const double a = hx * ht;
    Sob2Report r;
    r.sup = sup;
    r.rhs = a * (Ixt + I / (T * L) + It / L + Ix / T);
    r.slack = r.rhs - r.sup;
    r.pass = r.slack >= -1e-9 * std::max(1.0, r.rhs);
    return r;
}

}  // namespace kdv5
