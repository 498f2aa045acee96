#pragma once

#include "kdv5/spectral.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace kdv5 {

/// coefficient * prod_i d^{orders[i]} u, orders in 0..3.
struct Monomial {
    double c = 0.0;
    std::vector<int> orders;
    int degree() const { return static_cast<int>(orders.size()); }
};

/// Treatment of pointwise products.
enum class Dealias {
    None,       // products on the N-point grid
    TwoThirds,  // inputs and result truncated to |k| <= N/3
    Pad2,       // products on a 2N-point grid, exact for cubic terms
};

std::string to_string(Dealias d);
Dealias dealias_from_string(const std::string& s);

/// u_t = a5 u_xxxxx + a3 u_xxx + a1 u_x + sum of monomials.
struct Model {
    std::string name;
    double a5 = 0.0, a3 = 0.0, a1 = 0.0;
    std::vector<Monomial> monomials;

    void validate() const;
    /// (c1, c2, c3) when the model reads u_t = u_xxxxx - c1 u^2 u_x - c2 u_x u_xx - c3 u u_xxx.
    std::optional<std::array<double, 3>> kdv5g_coefficients() const;
    /// L^2-conserving template: pure fifth-order dispersion, u^2u_x / u_x u_xx / u u_xxx terms with c2 = 2 c3.
    bool hamiltonian() const;
    /// Every monomial is an exact x-derivative (sufficient test over a fixed list of patterns).
    bool mass_conserving() const;
    int max_degree() const;
};

Model general_c(double c1, double c2, double c3);
Model water_wave(double c1, double c2, double c3, double c4, double c5);

/// kdv, kdv5, benney, lisher, example_xx; general_c and water_wave take 3 and 5 parameters.
Model catalog(const std::string& name, const std::vector<double>& params = {});

/// Model from a JSON value: either a catalog name string, {"name":..., "params":[...]},
/// or {"a5":..,"a3":..,"a1":..,"monomials":[{"c":..,"orders":[..]}]}.
Model model_from_json(const std::string& json_text);
std::string model_to_json(const Model& m);

/// lambda(k) = a5 (i kappa)^5 + a3 (i kappa)^3 + a1 (i kappa).
std::vector<cplx> linear_symbol(const Model& m, const Grid& g);

/// Spectrum of the nonlinear part for the field with half-spectrum uh.
Spectrum nonlinear_spectrum(const Model& m, const Grid& g, const Spectrum& uh, Dealias d);

Field eval_rhs(const Model& m, const Field& u, Dealias d = Dealias::TwoThirds);

}  // namespace kdv5
