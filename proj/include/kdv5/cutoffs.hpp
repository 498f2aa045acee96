#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace kdv5 {

/// Degree-11 ramp rho(y) = 2772 * int_0^y s^5 (1-s)^5 ds with integer coefficients.
struct RhoPoly {
    static constexpr int degree = 11;
    static constexpr int max_table_order = 6;

    /// Monomial coefficients of rho, index = power.
    static constexpr std::array<std::int64_t, 12> coefficients{
        0, 0, 0, 0, 0, 0, 462, -1980, 3465, -3080, 1386, -252};

    /// Quintic p with rho(y) = y^6 p(y).
    static constexpr std::array<std::int64_t, 6> p_coefficients{
        462, -1980, 3465, -3080, 1386, -252};

    /// Monomial coefficients of the order-th derivative (order 0..6).
    static std::array<std::int64_t, 12> derivative_table(int order);

    /// rho^(order)(y) for y in [0,1], evaluated in factored form.
    static double value(double y, int order);

    /// Horner evaluation of the expanded table; used as a cross-check.
    static double value_expanded(double y, int order);

    static double p(double y);

    /// (rho''')^2 / rho' = 277200 y(1-y)(2-9y+9y^2)^2.
    static double ratio_third(double y);
};

enum class CutoffKind { Plain, Weighted };

struct CutoffSpec {
    CutoffKind kind = CutoffKind::Plain;
    int n = 0;  // weight exponent, only for Weighted
    double eps = 1.0;
    double b = 1.0;

    static CutoffSpec plain(double eps, double b);
    static CutoffSpec weighted(int n, double eps, double b);

    /// Same kind and exponent, different ramp.
    CutoffSpec with_ramp(double eps, double b) const;
    /// chi_{n-1} on the same ramp (Plain when n == 1).
    CutoffSpec lowered() const;

    double ramp_begin() const { return eps; }
    double ramp_end() const { return eps + b; }
    std::string label() const;
    void validate() const;
};

/// chi^(order)(x) or chi_n^(order)(x), order 0..5 (order 6 is accepted internally).
double eval_cutoff(const CutoffSpec& spec, double x, int order);

/// (chi''')^2 / chi' with the removable singularities resolved.
double ratio_third(const CutoffSpec& spec, double x);

enum class CutoffInequality {
    CutoffRatio,
    CutoffBounded,
    CutoffRatioExpanded,
    CutoffExpanded,
    CutoffNRatio,
    CutoffNRatio2,
    CutoffNDerivatives,
    CutoffNRatioToMinusOne,
    CutoffNPrimeToMinusOne,
};

std::string to_string(CutoffInequality id);

struct SupConstantReport {
    CutoffInequality id{};
    std::string spec_label;
    double sup_value = 0.0;             // measured constant (max over derivative orders)
    std::vector<double> per_order;      // per derivative order where applicable
    double scan_from = 0.0;
    double scan_to = 0.0;
    int resolution = 0;                 // points per unit length
    double margin = 1e-9;
    bool pass = false;
    double offending_x = 0.0;           // first failing point when !pass
    std::string note;
};

/// Measures the sup constants of every applicable cutoff bound by grid scan.
std::vector<SupConstantReport> certify_inequalities(const CutoffSpec& spec, int resolution);

std::string reports_to_json(const std::vector<SupConstantReport>& reports);

}  // namespace kdv5
