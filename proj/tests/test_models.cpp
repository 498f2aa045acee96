#include <doctest.h>

#include "kdv5/errors.hpp"
#include "kdv5/models.hpp"

#include <cmath>

using namespace kdv5;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("catalog coefficients") {
    const auto k5 = catalog("kdv5");
    const auto c = k5.kdv5g_coefficients();
    REQUIRE(c.has_value());
    CHECK((*c)[0] == -30.0);
    CHECK((*c)[1] == 20.0);
    CHECK((*c)[2] == 10.0);
    CHECK(k5.hamiltonian());
    CHECK_FALSE(catalog("general_c", {0.0, 1.0, 0.0}).hamiltonian());
    CHECK(catalog("general_c", {3.0, 4.0, 2.0}).hamiltonian());
    CHECK(catalog("benney").hamiltonian());
    CHECK_FALSE(catalog("kdv").hamiltonian());
    CHECK_FALSE(catalog("lisher").hamiltonian());
    CHECK_FALSE(catalog("example_xx").hamiltonian());
    const auto ww = catalog("water_wave", {1, 2, 3, 4, 5});
    CHECK(ww.a5 == -5.0);
    CHECK(ww.a3 == -2.0);
    CHECK(ww.a1 == -1.0);
    CHECK_THROWS_AS(catalog("nope"), ContractViolation);
    CHECK_THROWS_AS(catalog("general_c", {1.0}), ContractViolation);
}

TEST_CASE("mass conservation classification") {
    for (const char* n : {"kdv", "kdv5", "benney"}) CHECK(catalog(n).mass_conserving());
    CHECK(catalog("general_c", {1, 2, 3}).mass_conserving());
    CHECK(catalog("water_wave", {1, 2, 3, 4, 5}).mass_conserving());
    CHECK_FALSE(catalog("lisher").mass_conserving());
    CHECK_FALSE(catalog("example_xx").mass_conserving());
}

TEST_CASE("eval_rhs examples") {
    const Grid g(2 * kPi, 32);
    CHECK(eval_rhs(catalog("kdv5"), Field(g)).max_abs() == 0.0);
    const Field c = Field::sample(g, [](double x) { return std::cos(x); });
    const Field r = eval_rhs(catalog("kdv"), c);
    for (int j = 0; j < g.N; ++j) {
        const double x = g.x(j);
        CHECK(r[j] == doctest::Approx(-std::sin(x) + std::sin(x) * std::cos(x)).epsilon(1e-12).scale(1.0));
    }
    CHECK(std::fabs(integrate(eval_rhs(catalog("kdv5"), c))) <= 1e-12);
}

TEST_CASE("L2 balance of the fifth-order template") {
    // int u rhs = (2 c3 - c2) int u u_x u_xx; vanishes when c2 = 2 c3
    const Grid g(17.0, 128);
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const double c1 = rng.uniform(-5, 5), c2 = rng.uniform(-5, 5), c3 = rng.uniform(-5, 5);
        const Field u = band_limited_random(g, 40, 1000 + trial, 1.0);
        const Model m = general_c(c1, c2, c3);
        const Field r = eval_rhs(m, u, Dealias::Pad2);
        const double lhs = integrate(pointwise(u, r));
        const double ref = (2 * c3 - c2) * integrate(pointwise(u, pointwise(derivative(u, 1), derivative(u, 2))));
        // relative to int |u| |rhs|, the natural size of the pairing
        double scale = 0.0;
        for (int j = 0; j < g.N; ++j) scale += std::fabs(u[j] * r[j]) * g.h();
        CHECK(std::fabs(lhs - ref) <= 1e-10 * scale);
        const Model h = general_c(c1, 2 * c3, c3);
        const Field rh = eval_rhs(h, u, Dealias::Pad2);
        double hscale = 0.0;
        for (int j = 0; j < g.N; ++j) hscale += std::fabs(u[j] * rh[j]) * g.h();
        CHECK(std::fabs(integrate(pointwise(u, rh))) <= 1e-10 * hscale);
    }
}

TEST_CASE("total-derivative models have zero-mean right-hand sides") {
    const Grid g(23.0, 128);
    const Field u = band_limited_random(g, 40, 5, 1.0);
    for (const auto& m : {catalog("kdv"), catalog("kdv5"), catalog("benney"), catalog("general_c", {1.5, -2.0, 0.7}),
                          catalog("water_wave", {1, 2, 3, 4, 5})}) {
        const Field r = eval_rhs(m, u);
        CHECK_MESSAGE(std::fabs(integrate(r)) <= 1e-12 * std::max(1.0, r.max_abs()), m.name);
    }
    const Field r = eval_rhs(catalog("example_xx"), u);
    CHECK(std::fabs(integrate(r)) > 1e-6);
}

TEST_CASE("dealiasing rules") {
    const Grid g(2 * kPi, 32);
    // u = cos(10x): u u_x = -sin(20x)/2 sits above N/3 and aliases onto mode 12 without dealiasing
    const Field u = Field::sample(g, [](double x) { return std::cos(10 * x); });
    Model m;
    m.monomials = {{1.0, {0, 1}}};
    const Spectrum none = forward(eval_rhs(m, u, Dealias::None));
    const Spectrum two = forward(eval_rhs(m, u, Dealias::TwoThirds));
    const Spectrum pad = forward(eval_rhs(m, u, Dealias::Pad2));
    CHECK(std::abs(none[12]) > 0.1);
    CHECK(std::abs(two[12]) <= 1e-14);
    CHECK(std::abs(pad[12]) <= 1e-14);
}

TEST_CASE("model JSON round trip") {
    const Model m = catalog("lisher");
    const Model r = model_from_json(model_to_json(m));
    CHECK(r.a5 == m.a5);
    REQUIRE(r.monomials.size() == m.monomials.size());
    for (std::size_t i = 0; i < m.monomials.size(); ++i) {
        CHECK(r.monomials[i].c == m.monomials[i].c);
        CHECK(r.monomials[i].orders == m.monomials[i].orders);
    }
    CHECK(model_from_json("\"kdv5\"").hamiltonian());
    CHECK(model_from_json("kdv").a3 == -1.0);
    CHECK(model_from_json(R"({"name":"general_c","params":[0,2,1]})").hamiltonian());
    CHECK_THROWS(model_from_json(R"({"a5":1,"monomials":[{"c":1,"orders":[4]}]})"));
}
