#pragma once

#include "kdv5/cutoffs.hpp"
#include "kdv5/spectral.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kdv5 {

/// Weight psi(X) on the real line, evaluated on the torus as psi(x + shift), x in [0, L).
///
/// Weights are stored as a list of smooth pieces.  Left of the first piece the weight is zero;
/// the last piece may extend to +infinity (plateau).  Polynomial pieces carry monomial
/// coefficients in X so their Fourier moments are available in closed form.
class WeightFunction {
public:
    struct Piece {
        double begin = 0.0;
        double end = std::numeric_limits<double>::infinity();
        std::function<double(double)> f;
        std::vector<double> poly;  // monomial coefficients in X when non-empty
    };

    /// chi^(order) or chi_n^(order).
    static WeightFunction cutoff(const CutoffSpec& spec, int order = 0);
    /// (chi''')^2 / chi'.
    static WeightFunction cutoff_ratio(const CutoffSpec& spec);
    /// Indicator of [a, b].
    static WeightFunction window(double a, double b);
    /// X^n on [from, infinity).
    static WeightFunction power(int n, double from);
    /// Smooth weight on [from, infinity) given by callables; derivative sign flag as stated.
    static WeightFunction custom(std::function<double(double)> f, std::function<double(double)> df,
                                 bool nondecreasing, double from = -std::numeric_limits<double>::infinity(),
                                 std::string label = "custom");

    double operator()(double X) const;
    /// psi'(X); available for cutoff, window (zero almost everywhere), power and custom weights.
    double derivative(double X) const;

    bool nondecreasing() const { return nondecreasing_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    /// Interval where the weight is not a plateau, if any.
    std::optional<std::pair<double, double>> ramp() const { return ramp_; }
    /// True if the weight is nonzero as X -> +infinity.
    bool has_plateau() const;
    /// Leftmost point of the support.
    double support_begin() const;
    const std::optional<CutoffSpec>& spec() const { return spec_; }
    int order() const { return order_; }
    const std::string& label() const { return label_; }

    /// Checks psi' >= -1e-12 at the given sample points when the sign flag is set.
    bool check_sign_flag(const Grid& g, double shift) const;

private:
    std::vector<Piece> pieces_;
    std::function<double(double)> df_;
    std::optional<std::pair<double, double>> ramp_;
    std::optional<CutoffSpec> spec_;
    int order_ = 0;
    bool nondecreasing_ = false;
    std::string label_;
};

/// How a weighted integral treats the right edge of the window.
struct SupportPolicy {
    double margin_cells = 2.0;       // ramp must stay this many cells inside the window
    double edge_tolerance = 1e-8;    // |integrand| allowed at the window edges, relative to its peak
    bool allow_edge_truncation = false;
};

/// Throws SupportViolation if the weight breakpoints at this shift are not inside the window.
void check_weight_support(const Grid& g, const WeightFunction& w, double shift, const SupportPolicy& policy);

/// Trapezoid rule h * sum_j u_j w(x_j + shift) with the support precondition enforced.
double weighted_integral(const Field& u, const WeightFunction& w, double shift,
                         const SupportPolicy& policy = {});

/// Exact Fourier moments W_k = (1/L) int_0^L w(x + shift) e^{-i kappa_k x} dx, k = 0..modes-1.
class WeightMoments {
public:
    WeightMoments() = default;
    WeightMoments(const Grid& g, const WeightFunction& w, double shift, int modes);

    const std::vector<cplx>& values() const { return W_; }
    int modes() const { return static_cast<int>(W_.size()); }
    const Grid& grid() const { return grid_; }
    double shift() const { return shift_; }
    bool plateau() const { return plateau_; }
    const WeightFunction& weight() const { return w_; }

private:
    Grid grid_;
    double shift_ = 0.0;
    bool plateau_ = false;
    WeightFunction w_;
    std::vector<cplx> W_;
};

/// Spectrum (k = 0..M/2) of the product of resolved factors, formed without aliasing on M = p*N points.
/// Each factor's Nyquist coefficient is dropped before padding.
Spectrum product_spectrum(const Grid& g, std::span<const Spectrum> factors, std::vector<double>* samples = nullptr);

/// int_0^L w(x+shift) prod_i f_i(x) dx, exact for band-limited factors and piecewise-smooth w.
/// The moments must cover p*N/2 modes.
double product_integral(const Grid& g, std::span<const Spectrum> factors, const WeightMoments& moments,
                        const SupportPolicy& policy = {});

/// Convenience: moments sized for products of up to max_degree factors.
WeightMoments moments_for(const Grid& g, const WeightFunction& w, double shift, int max_degree,
                          const SupportPolicy& policy = {});

}  // namespace kdv5
