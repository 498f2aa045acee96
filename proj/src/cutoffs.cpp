#include "kdv5/cutoffs.hpp"

#include "kdv5/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace kdv5 {

namespace {

constexpr double kFact5[6] = {1.0, 5.0, 20.0, 60.0, 120.0, 120.0};  // 5!/(5-i)!

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double falling(int n, int i) {
    double r = 1.0;
    for (int q = 0; q < i; ++q) r *= (n - q);
    return r;
}

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// d^i/dy^i y^5
double dy5(double y, int i) { return i > 5 ? 0.0 : kFact5[i] * ipow(y, 5 - i); }
// d^r/dy^r (1-y)^5
double dmy5(double y, int r) {
    if (r > 5) return 0.0;
    const double s = (r % 2 == 0) ? 1.0 : -1.0;
    return s * kFact5[r] * ipow(1.0 - y, 5 - r);
}

}  // namespace

std::array<std::int64_t, 12> RhoPoly::derivative_table(int order) {
    if (order < 0 || order > max_table_order)
        throw ContractViolation("RhoPoly::derivative_table: order out of range");
    std::array<std::int64_t, 12> out{};
    for (int i = order; i <= degree; ++i) {
        std::int64_t f = 1;
        for (int q = 0; q < order; ++q) f *= (i - q);
        out[i - order] = coefficients[i] * f;
    }
    return out;
}

double RhoPoly::p(double y) {
    double r = 0.0;
    for (int i = 5; i >= 0; --i) r = r * y + static_cast<double>(p_coefficients[i]);
    return r;
}

double RhoPoly::value(double y, int order) {
    if (order < 0 || order > max_table_order)
        throw ContractViolation("RhoPoly::value: order out of range");
    if (order == 0) {
        if (y <= 0.5) return ipow(y, 6) * p(y);
        const double z = 1.0 - y;
        return 1.0 - ipow(z, 6) * p(z);
    }
    // rho^(m) = 2772 d^{m-1}[y^5 (1-y)^5]
    const int m = order - 1;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) s += binom(m, i) * dy5(y, i) * dmy5(y, m - i);
    return 2772.0 * s;
}

double RhoPoly::value_expanded(double y, int order) {
    const auto t = derivative_table(order);
    double r = 0.0;
    for (int i = degree; i >= 0; --i) r = r * y + static_cast<double>(t[i]);
    return r;
}

double RhoPoly::ratio_third(double y) {
    if (y <= 0.0 || y >= 1.0) return 0.0;
    const double q = 2.0 - 9.0 * y + 9.0 * y * y;
    return 277200.0 * y * (1.0 - y) * q * q;
}

CutoffSpec CutoffSpec::plain(double eps, double b) {
    CutoffSpec s;
    s.kind = CutoffKind::Plain;
    s.n = 0;
    s.eps = eps;
    s.b = b;
    s.validate();
    return s;
}

CutoffSpec CutoffSpec::weighted(int n, double eps, double b) {
    CutoffSpec s;
    s.kind = CutoffKind::Weighted;
    s.n = n;
    s.eps = eps;
    s.b = b;
    s.validate();
    return s;
}

CutoffSpec CutoffSpec::with_ramp(double e, double bb) const {
    CutoffSpec s = *this;
    s.eps = e;
    s.b = bb;
    s.validate();
    return s;
}

CutoffSpec CutoffSpec::lowered() const {
    if (kind == CutoffKind::Plain) throw ContractViolation("lowered: plain cutoff has no weight");
    if (n == 1) return plain(eps, b);
    return weighted(n - 1, eps, b);
}

void CutoffSpec::validate() const {
    if (!(std::isfinite(eps) && eps >= 0.0)) throw ContractViolation("cutoff: eps must be finite and >= 0");
    if (!(std::isfinite(b) && b > 0.0)) throw ContractViolation("cutoff: b must be finite and > 0");
    if (kind == CutoffKind::Weighted && n < 1) throw ContractViolation("cutoff: weighted exponent must be >= 1");
}

std::string CutoffSpec::label() const {
    std::ostringstream os;
    os.precision(17);
    if (kind == CutoffKind::Plain)
        os << "plain(eps=" << eps << ",b=" << b << ")";
    else
        os << "weighted(n=" << n << ",eps=" << eps << ",b=" << b << ")";
    return os.str();
}

namespace {

double plain_cutoff(double eps, double b, double x, int order) {
    if (x <= eps) return 0.0;
    if (x >= eps + b) return order == 0 ? 1.0 : 0.0;
    const double y = (x - eps) / b;
    return RhoPoly::value(y, order) / ipow(b, order);
}

}  // namespace

double eval_cutoff(const CutoffSpec& spec, double x, int order) {
    if (order < 0 || order > 6) throw ContractViolation("eval_cutoff: order must be in 0..5");
    if (spec.kind == CutoffKind::Plain) return plain_cutoff(spec.eps, spec.b, x, order);
    if (x <= spec.eps) return 0.0;
    const int n = spec.n;
    if (x >= spec.eps + spec.b) return order > n ? 0.0 : falling(n, order) * ipow(x, n - order);
    double s = 0.0;
    for (int i = 0; i <= order && i <= n; ++i)
        s += binom(order, i) * falling(n, i) * ipow(x, n - i) * plain_cutoff(spec.eps, spec.b, x, order - i);
    return s;
}

double ratio_third(const CutoffSpec& spec, double x) {
    if (x <= spec.eps) return 0.0;
    if (spec.kind == CutoffKind::Plain) {
        if (x >= spec.eps + spec.b) return 0.0;
        return RhoPoly::ratio_third((x - spec.eps) / spec.b) / ipow(spec.b, 5);
    }
    const int n = spec.n;
    if (x >= spec.eps + spec.b) {
        const double nn = n;
        return nn * (nn - 1) * (nn - 1) * (nn - 2) * (nn - 2) * std::pow(x, nn - 5.0);
    }
    const double d1 = eval_cutoff(spec, x, 1);
    if (!(d1 > 0.0)) return 0.0;
    const double d3 = eval_cutoff(spec, x, 3);
    return d3 * d3 / d1;
}

std::string to_string(CutoffInequality id) {
    switch (id) {
        case CutoffInequality::CutoffRatio: return "CutoffRatio";
        case CutoffInequality::CutoffBounded: return "CutoffBounded";
        case CutoffInequality::CutoffRatioExpanded: return "CutoffRatioExpanded";
        case CutoffInequality::CutoffExpanded: return "CutoffExpanded";
        case CutoffInequality::CutoffNRatio: return "CutoffNRatio";
        case CutoffInequality::CutoffNRatio2: return "CutoffNRatio2";
        case CutoffInequality::CutoffNDerivatives: return "CutoffNDerivatives";
        case CutoffInequality::CutoffNRatioToMinusOne: return "CutoffNRatioToMinusOne";
        case CutoffInequality::CutoffNPrimeToMinusOne: return "CutoffNPrimeToMinusOne";
    }
    return "unknown";
}

namespace {

using Fn = std::function<double(double)>;

constexpr double kMargin = 1e-9;

// Scans lhs <= c * rhs on x = from + i/res and fills the report.
// Points with rhs == 0 require lhs == 0.
void scan(SupConstantReport& r, const std::vector<Fn>& lhs, const Fn& rhs, double from, double to,
          int res) {
    r.scan_from = from;
    r.scan_to = to;
    r.resolution = res;
    r.margin = kMargin;
    r.pass = true;
    r.per_order.assign(lhs.size(), 0.0);
    const long count = std::lround((to - from) * res);
    for (std::size_t j = 0; j < lhs.size(); ++j) {
        double c = 0.0;
        for (long i = 0; i <= count && r.pass; ++i) {
            const double x = from + static_cast<double>(i) / res;
            const double a = std::fabs(lhs[j](x));
            const double w = rhs(x);
            if (!std::isfinite(a) || !std::isfinite(w)) {
                r.pass = false;
                r.offending_x = x;
                r.note = "non-finite scan value";
                break;
            }
            if (w <= 0.0) {
                if (a > 0.0) {
                    r.pass = false;
                    r.offending_x = x;
                    r.note = "bound vanishes where the bounded quantity does not";
                }
                continue;
            }
            c = std::max(c, a / w);
        }
        r.per_order[j] = c;
        if (!r.pass) break;
        // pointwise re-verification against the reported constant
        const double cm = c * (1.0 + kMargin);
        for (long i = 0; i <= count; ++i) {
            const double x = from + static_cast<double>(i) / res;
            const double w = rhs(x);
            if (w > 0.0 && std::fabs(lhs[j](x)) > cm * w) {
                r.pass = false;
                r.offending_x = x;
                r.note = "pointwise re-verification failed";
                break;
            }
        }
        if (!r.pass) break;
    }
    r.sup_value = 0.0;
    for (double c : r.per_order) r.sup_value = std::max(r.sup_value, c);
    if (!std::isfinite(r.sup_value)) r.pass = false;
}

std::vector<Fn> derivative_family(const CutoffSpec& s) {
    std::vector<Fn> out;
    for (int j = 1; j <= 5; ++j) out.push_back([s, j](double x) { return eval_cutoff(s, x, j); });
    return out;
}

}  // namespace

std::vector<SupConstantReport> certify_inequalities(const CutoffSpec& spec, int resolution) {
    spec.validate();
    if (resolution < 1000) throw ContractViolation("certify_inequalities: resolution must be >= 1000 per unit");
    const double eps = spec.eps, b = spec.b;
    const CutoffSpec plain = CutoffSpec::plain(eps, b);
    const CutoffSpec wide = CutoffSpec::plain(eps / 3.0, b + eps);
    const Fn one = [](double) { return 1.0; };
    const Fn wide_prime = [wide](double x) { return eval_cutoff(wide, x, 1); };
    const Fn plain_ratio = [plain](double x) { return ratio_third(plain, x); };

    std::vector<SupConstantReport> out;
    auto make = [&](CutoffInequality id, const CutoffSpec& s) {
        SupConstantReport r;
        r.id = id;
        r.spec_label = s.label();
        return r;
    };

    {
        auto r = make(CutoffInequality::CutoffRatio, plain);
        scan(r, {plain_ratio}, one, eps, eps + b, resolution);
        out.push_back(r);
    }
    {
        auto r = make(CutoffInequality::CutoffBounded, plain);
        scan(r, derivative_family(plain), one, eps - 1.0, eps + b + 1.0, resolution);
        out.push_back(r);
    }
    {
        auto r = make(CutoffInequality::CutoffRatioExpanded, plain);
        scan(r, {plain_ratio}, wide_prime, eps, eps + b, resolution);
        out.push_back(r);
    }
    {
        auto r = make(CutoffInequality::CutoffExpanded, plain);
        scan(r, derivative_family(plain), wide_prime, eps, eps + b, resolution);
        out.push_back(r);
    }
    if (spec.kind == CutoffKind::Plain) return out;

    const double x_max = 4.0 * (eps + b) + 4.0;
    const Fn ratio_n = [spec](double x) { return ratio_third(spec, x); };
    const Fn one_plus = [spec](double x) { return 1.0 + eval_cutoff(spec, x, 0); };
    const CutoffSpec lower = spec.lowered().with_ramp(eps / 3.0, b + eps);
    const Fn lower_w = [lower](double x) { return eval_cutoff(lower, x, 0); };
    {
        auto r = make(CutoffInequality::CutoffNRatio, spec);
        scan(r, {ratio_n}, one, eps, eps + b, resolution);
        out.push_back(r);
    }
    {
        auto r = make(CutoffInequality::CutoffNRatio2, spec);
        scan(r, {ratio_n}, one_plus, eps - 1.0, x_max, resolution);
        out.push_back(r);
    }
    {
        auto r = make(CutoffInequality::CutoffNDerivatives, spec);
        scan(r, derivative_family(spec), one_plus, eps - 1.0, x_max, resolution);
        out.push_back(r);
    }
    {
        auto r = make(CutoffInequality::CutoffNRatioToMinusOne, spec);
        scan(r, {ratio_n}, lower_w, eps, x_max, resolution);
        out.push_back(r);
    }
    {
        auto r = make(CutoffInequality::CutoffNPrimeToMinusOne, spec);
        scan(r, derivative_family(spec), lower_w, eps, x_max, resolution);
        out.push_back(r);
    }
    return out;
}

std::string reports_to_json(const std::vector<SupConstantReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json j;
        j["inequality"] = to_string(r.id);
        j["spec"] = r.spec_label;
        j["sup_value"] = r.sup_value;
        j["per_order"] = r.per_order;
        j["scan_from"] = r.scan_from;
        j["scan_to"] = r.scan_to;
        j["resolution"] = r.resolution;
        j["margin"] = r.margin;
        j["pass"] = r.pass;
        if (!r.pass) {
            j["offending_x"] = r.offending_x;
            j["note"] = r.note;
        }
        arr.push_back(j);
    }
    return arr.dump(2);
}

}  // namespace kdv5
