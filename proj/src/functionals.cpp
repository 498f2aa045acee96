#include "kdv5/functionals.hpp"

#include "kdv5/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kdv5 {

std::string to_string(FunctionalKind k) {
    switch (k) {
        case FunctionalKind::Energy: return "energy";
        case FunctionalKind::Smoothing: return "smoothing";
        case FunctionalKind::Corrected: return "corrected";
        case FunctionalKind::CubicDecay: return "cubic_decay";
        case FunctionalKind::XWeighted: return "xweighted";
    }
    return "?";
}

namespace {

WeightedFunctional make(FunctionalKind kind, int l, const WeightFunction& w, double nu, double offset) {
    WeightedFunctional f;
    f.kind = kind;
    f.l = l;
    f.weight = w;
    f.nu = nu;
    f.offset = offset;
    std::ostringstream os;
    os << to_string(kind) << "_l" << l << "_" << w.label();
    if (nu != 0.0) os << "_nu" << nu;
    f.id = os.str();
    f.validate();
    return f;
}

}  // namespace

WeightedFunctional WeightedFunctional::energy(int l, const WeightFunction& w, double nu, double offset) {
    return make(FunctionalKind::Energy, l, w, nu, offset);
}

WeightedFunctional WeightedFunctional::smoothing(int l, const WeightFunction& w, double nu, double offset) {
    return make(FunctionalKind::Smoothing, l, w, nu, offset);
}

WeightedFunctional WeightedFunctional::corrected(int l, const WeightFunction& w, double nu, double offset) {
    return make(FunctionalKind::Corrected, l, w, nu, offset);
}

WeightedFunctional WeightedFunctional::cubic_decay(const CutoffSpec& weighted, double nu, double offset) {
    if (weighted.kind != CutoffKind::Weighted) throw ContractViolation("cubic_decay: needs a Weighted cutoff");
    return make(FunctionalKind::CubicDecay, 0, WeightFunction::cutoff(weighted), nu, offset);
}

WeightedFunctional WeightedFunctional::xweighted(int n, int m, double eps, double offset) {
    if (!(eps > 0.0)) throw ContractViolation("xweighted: eps must be > 0");
    auto f = make(FunctionalKind::XWeighted, m, WeightFunction::power(n, eps), 0.0, offset);
    std::ostringstream os;
    os << "xweighted_n" << n << "_m" << m;
    f.id = os.str();
    return f;
}

int WeightedFunctional::degree() const {
    return (kind == FunctionalKind::Corrected || kind == FunctionalKind::CubicDecay) ? 3 : 2;
}

int WeightedFunctional::derivative_order() const {
    switch (kind) {
        case FunctionalKind::Smoothing: return l + 2;
        case FunctionalKind::Corrected: return l - 1;
        case FunctionalKind::CubicDecay: return 0;
        default: return l;
    }
}

void WeightedFunctional::validate() const {
    if (l < 0) throw ContractViolation("functional: l must be >= 0");
    if (kind == FunctionalKind::Corrected && l < 1) throw ContractViolation("corrected functional: l must be >= 1");
    if (derivative_order() > 8) throw ContractViolation("functional: derivative order above 8");
    if (nu < 0.0) throw ContractViolation("functional: nu must be >= 0");
    if (kind == FunctionalKind::Energy && !weight.nondecreasing())
        throw ContractViolation("energy functional: weight must be nondecreasing");
}

double evaluate(const WeightedFunctional& f, const Field& u, double t) {
    const Grid& g = u.grid;
    const double s = f.shift(t);
    if (f.kind == FunctionalKind::Energy && !f.weight.check_sign_flag(g, s))
        throw ContractViolation("energy functional: weight derivative negative on the grid");
    const Spectrum uh = forward(u);
    const Spectrum d = derivative_spectrum(g, uh, f.derivative_order());
    std::vector<Spectrum> factors{d, d};
    if (f.degree() == 3) factors.push_back(uh);
    std::vector<double> samples;
    product_spectrum(g, factors, &samples);
    const int M = static_cast<int>(samples.size());
    const Field prod(Grid(g.L, M), std::move(samples));
    if (f.kind == FunctionalKind::Smoothing) {
        for (int j = 0; j < M; ++j)
            if (f.weight(prod.grid.x(j) + s) < -1e-12)
                throw ContractViolation("smoothing functional: weight must be nonnegative");
    }
    return weighted_integral(prod, f.weight, s, f.policy);
}

FunctionalTracker::FunctionalTracker(std::vector<WeightedFunctional> fs) : fs_(std::move(fs)) {
    for (const auto& f : fs_) {
        f.validate();
        if (acc_.count(f.id)) throw ContractViolation("FunctionalTracker: duplicate id " + f.id);
        acc_[f.id] = 0.0;
    }
}

void FunctionalTracker::observe(double t, const Field& u) {
    const bool first = times_.empty();
    const double dt = first ? 0.0 : t - times_.back();
    if (!first && !(dt > 0.0)) throw ContractViolation("FunctionalTracker: times must increase");
    for (const auto& f : fs_) {
        double v = evaluate(f, u, t);
        if (f.kind == FunctionalKind::Smoothing) {
            if (!first) acc_[f.id] += 0.5 * dt * (last_[f.id] + v);
            last_[f.id] = v;
            v = acc_[f.id];
        }
        rows_.push_back({t, f.id, v});
    }
    times_.push_back(t);
}

Observer FunctionalTracker::observer() {
    return [this](double t, const Field& u) { observe(t, u); };
}

std::vector<double> FunctionalTracker::series(const std::string& id) const {
    std::vector<double> out;
    for (const auto& r : rows_)
        if (r.id == id) out.push_back(r.value);
    if (out.empty() && !acc_.count(id)) throw ContractViolation("FunctionalTracker: unknown id " + id);
    return out;
}

}  // namespace kdv5
