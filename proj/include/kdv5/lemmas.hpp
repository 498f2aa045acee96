#pragma once

#include <functional>
#include <string>
#include <vector>

namespace kdv5 {

struct DyadicDecayReport {
    bool hypothesis_ok = false;     // int_0^a f <= c a^alpha holds on the dyadic points without growth
    double hypothesis_constant = 0.0;  // max over dyadic a >= 1 of int_0^a f / a^alpha
    double growth = 0.0;            // that max over the upper half of the dyadic range / over the lower half
    std::vector<double> dyadic_points;  // a_j = 2^j, j = 0..J
    std::vector<double> block_sums;     // int over [a_{j-1}, a_j] (first block [0, 1]) of f / <x>^{alpha+eps}
    double total = 0.0;
    bool converging = false;
    double x_star = 0.0;            // block ratios stay below 1 from here on
    bool pass = false;
    std::string note;
};

/// Growth factor above which int_0^a f <= c a^alpha is reported as violated.
inline constexpr double kDyadicGrowthLimit = 2.0;

/// f sampled at x_i = i X / (n - 1).  Requires X >= 4 and f >= 0.
/// pass iff the hypothesis holds and the dyadic block sums of f / <x>^{alpha+eps} decrease
/// geometrically from some x* on.  A failed hypothesis is reported, not thrown.
DyadicDecayReport check_dyadic_decay(const std::vector<double>& f, double X, double alpha, double eps);

struct Sob2Report {
    double sup = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - sup
    bool pass = false;
};

/// f and its derivatives on [0, L] x [0, T].
struct SpaceTimeFunction {
    std::function<double(double, double)> f, f_x, f_t, f_xt;
};

/// Checks sup |f| <= int int |f_xt| + (1/TL) int int |f| + (1/L) int int |f_t| + (1/T) int int |f_x|
/// on an (n+1) x (n+1) grid with the trapezoid rule.  pass iff slack >= -1e-9 * max(1, rhs).
Sob2Report check_sob2(const SpaceTimeFunction& f, double L, double T, int n = 400);

}  // namespace kdv5
