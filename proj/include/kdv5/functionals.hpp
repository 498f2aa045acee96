#pragma once

#include "kdv5/cutoffs.hpp"
#include "kdv5/solver.hpp"
#include "kdv5/spectral.hpp"
#include "kdv5/weights.hpp"

#include <map>
#include <string>
#include <vector>

namespace kdv5 {

enum class FunctionalKind {
    Energy,      // int (d^l u)^2 w(x + s) dx
    Smoothing,   // int_0^t int (d^{l+2} u)^2 w(x + s) dx dt, w = chi' or a window
    Corrected,   // int u (d^{l-1} u)^2 w(x + s) dx
    CubicDecay,  // int u^3 chi_n(x + s) dx
    XWeighted,   // int_eps^inf x^n (d^m u)^2 dx
};
std::string to_string(FunctionalKind k);

/// Weighted functional with weight evaluated at x + offset + nu t.
struct WeightedFunctional {
    std::string id;
    FunctionalKind kind = FunctionalKind::Energy;
    int l = 0;
    WeightFunction weight;
    double nu = 0.0;
    double offset = 0.0;
    SupportPolicy policy;

    static WeightedFunctional energy(int l, const WeightFunction& w, double nu = 0.0, double offset = 0.0);
    static WeightedFunctional smoothing(int l, const WeightFunction& w, double nu = 0.0, double offset = 0.0);
    static WeightedFunctional corrected(int l, const WeightFunction& w, double nu = 0.0, double offset = 0.0);
    static WeightedFunctional cubic_decay(const CutoffSpec& weighted, double nu = 0.0, double offset = 0.0);
    static WeightedFunctional xweighted(int n, int m, double eps, double offset = 0.0);

    double shift(double t) const { return offset + nu * t; }
    /// Number of field factors in the integrand.
    int degree() const;
    /// Largest derivative order in the integrand.
    int derivative_order() const;
    void validate() const;
};

/// Spatial integral at time t.  For Smoothing this is the integrand of the time integral;
/// FunctionalTracker accumulates it.  Products are formed alias-free on a degree*N grid and
/// integrated by the trapezoid rule against the weight.
double evaluate(const WeightedFunctional& f, const Field& u, double t);

/// Time series of a set of functionals along a trajectory.
class FunctionalTracker {
public:
    struct Row {
        double t = 0.0;
        std::string id;
        double value = 0.0;
    };

    explicit FunctionalTracker(std::vector<WeightedFunctional> fs);

    /// Evaluates every functional; Smoothing values are running trapezoid time integrals.
    void observe(double t, const Field& u);
    Observer observer();

    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<WeightedFunctional>& functionals() const { return fs_; }
    std::vector<double> series(const std::string& id) const;
    std::vector<double> times() const { return times_; }

private:
    std::vector<WeightedFunctional> fs_;
    std::vector<Row> rows_;
    std::vector<double> times_;
    std::map<std::string, double> acc_, last_;
};

}  // namespace kdv5
