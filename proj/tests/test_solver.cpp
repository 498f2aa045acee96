#include <doctest.h>

#include "kdv5/errors.hpp"
#include "kdv5/solver.hpp"

#include <cmath>

using namespace kdv5;

namespace {
constexpr double kPi = 3.14159265358979323846;

double max_diff(const Field& a, const Field& b) { return (a - b).max_abs(); }

Field gaussian(const Grid& g, double amp, double center, double width) {
    return Field::sample(g, [=](double x) {
        const double z = (x - center) / width;
        return amp * std::exp(-z * z);
    });
}
}  // namespace

TEST_CASE("phi functions agree across the series threshold") {
    for (double r : {0.49999, 0.5, 0.50001}) {
        for (double ang : {0.0, 1.0, kPi / 2, 2.5, kPi}) {
            const cplx z = std::polar(r, ang);
            const auto p = phi123(z);
            // recurrence in long double as reference
            const std::complex<long double> zl(z.real(), z.imag());
            const auto e = std::exp(zl);
            const auto p1 = (e - 1.0L) / zl, p2 = (p1 - 1.0L) / zl, p3 = (p2 - 0.5L) / zl;
            CHECK(std::abs(p[0] - cplx(p1)) <= 1e-14);
            CHECK(std::abs(p[1] - cplx(p2)) <= 1e-14);
            CHECK(std::abs(p[2] - cplx(p3)) <= 1e-13);
        }
    }
    const auto z0 = phi123(cplx(0.0, 0.0));
    CHECK(z0[0] == cplx(1.0, 0.0));
    CHECK(std::abs(z0[1] - 0.5) <= 1e-16);
    CHECK(std::abs(z0[2] - 1.0 / 6.0) <= 1e-16);
    const auto tiny = phi123(cplx(0.0, 1e-9));
    CHECK(std::abs(tiny[2] - 1.0 / 6.0) <= 1e-9);
}

TEST_CASE("linear_exact examples") {
    const Grid g(2 * kPi, 32);
    const Field c = Field::sample(g, [](double x) { return std::cos(x); });
    CHECK(max_diff(linear_exact(c, kPi, 1, 0, 0), -1.0 * c) <= 1e-13);
    const Field u = band_limited_random(Grid(9.0, 64), 20, 3, 1.0);
    CHECK(linear_exact(u, 0.0, 1, 2, 3).u == u.u);
    const double n0 = std::sqrt(spectral_energy(u));
    CHECK(std::sqrt(spectral_energy(linear_exact(u, 0.37, 1, -2, 0.5))) == doctest::Approx(n0).epsilon(1e-13));
}

TEST_CASE("solver configuration") {
    SolverConfig cfg;
    cfg.dt = 1e-5;
    cfg.t_end = 0.1;
    CHECK(cfg.steps() == 10000);
    cfg.stride = 7;
    CHECK_THROWS_AS(cfg.steps(), ContractViolation);
    cfg.stride = 1;
    cfg.t_end = 0.10000005;
    CHECK_THROWS_AS(cfg.steps(), ContractViolation);
}

TEST_CASE("linear flow through the stepper matches the exact propagator") {
    const Grid g(2 * kPi, 64);
    const Field u0 = band_limited_random(g, 20, 8, 1.0);
    Model m;
    m.a5 = 1.0;
    m.a3 = -0.5;
    m.a1 = 0.25;
    for (Scheme s : {Scheme::ETDRK4, Scheme::IFRK4}) {
        SolverConfig cfg;
        cfg.dt = 0.01;
        cfg.t_end = 1.0;
        cfg.scheme = s;
        const auto tr = simulate(m, u0, cfg, {}, false);
        CHECK(max_diff(tr.final_state, linear_exact(u0, 1.0, 1.0, -0.5, 0.25)) <= 1e-10);
    }
}

TEST_CASE("zero data stays zero and observers follow the stride") {
    const Grid g(40.0, 128);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.02;
    cfg.stride = 5;
    std::vector<double> times;
    const auto tr = simulate(catalog("kdv5"), Field(g), cfg, {[&](double t, const Field&) { times.push_back(t); }});
    CHECK(tr.final_state.max_abs() == 0.0);
    REQUIRE(times.size() == 5);
    CHECK(times[0] == 0.0);
    CHECK(times[4] == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(tr.snapshots.size() == 5);
    for (std::size_t i = 1; i < tr.snapshots.size(); ++i) CHECK(tr.snapshots[i].t > tr.snapshots[i - 1].t);
}

TEST_CASE("non-finite state is reported with the last good time") {
    const Grid g(40.0, 256);
    SolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 0.2;
    const Field u0 = gaussian(g, 5.0, 20.0, 1.0);
    bool thrown = false;
    try {
        simulate(catalog("kdv5"), u0, cfg, {}, false);
    } catch (const BlowUpError& e) {
        thrown = true;
        CHECK(e.last_good_time() >= 0.0);
        CHECK(e.last_good_time() < 0.2);
    }
    CHECK(thrown);
}

TEST_CASE("stability warning is recorded") {
    const Grid g(40.0, 256);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1e-3;
    const auto tr = simulate(catalog("kdv5"), gaussian(g, 1.0, 20.0, 2.0), cfg, {}, false);
    bool found = false;
    for (const auto& w : tr.warnings) found = found || w.find("stiffness") != std::string::npos;
    CHECK(found);
}

TEST_CASE("IFRK4 and ETDRK4 agree on a smooth kdv5 run") {
    const Grid g(40.0, 128);
    const Field u0 = gaussian(g, 1.0, 20.0, 2.0);
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.1;
    const Field a = simulate(catalog("kdv5"), u0, cfg, {}, false).final_state;
    cfg.scheme = Scheme::IFRK4;
    const Field b = simulate(catalog("kdv5"), u0, cfg, {}, false).final_state;
    CHECK(max_diff(a, b) <= 1e-7);
}

TEST_CASE("reversibility through the reflection symmetry") {
    const Grid g(40.0, 256);
    const Field u0 = gaussian(g, 1.0, 20.0, 2.0);
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.05;
    const Model m = catalog("kdv5");
    const Field uT = simulate(m, u0, cfg, {}, false).final_state;
    const Field back = reflect(simulate(m, reflect(uT), cfg, {}, false).final_state);
    CHECK(max_diff(back, u0) <= 1e-5);
    CHECK(max_diff(uT, u0) > 1e-3);
}

TEST_CASE("mass is conserved for total-derivative models") {
    const Grid g(40.0, 256);
    const Field u0 = gaussian(g, 1.0, 20.0, 2.0);
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.05;
    for (const char* name : {"kdv5", "benney", "kdv"}) {
        const Field u = simulate(catalog(name), u0, cfg, {}, false).final_state;
        CHECK_MESSAGE(std::fabs(integrate(u) - integrate(u0)) <= 1e-10, name);
    }
}
