// Acceptance criteria 1-7, one line each.  Every tolerance is fixed here.
//   acceptance                 run all criteria, exit 1 if any fails
//   acceptance --write-golden  regenerate tests/golden/*.json from the pinned configs

#include "kdv5/config.hpp"
#include "kdv5/cutoffs.hpp"
#include "kdv5/experiments.hpp"
#include "kdv5/identities.hpp"
#include "kdv5/lemmas.hpp"
#include "kdv5/manifest.hpp"
#include "kdv5/models.hpp"
#include "kdv5/solver.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace kdv5;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

// criterion 1
constexpr int kCutoffResolution = 10000;
constexpr double kRhoEndpointTol = 1e-12;
constexpr double kRhoRatioTol = 1e-10;
constexpr double kEpsIndependenceTol = 1e-6;
constexpr double kCutoffSeconds = 5.0;
// criterion 2
constexpr int kIdentityN = 256;
constexpr int kIdentitySeeds = 20;
constexpr double kIdentityTol = 1e-8;
constexpr double kIdentitySeconds = 30.0;
// criterion 3
constexpr double kLinearTol = 1e-10;
constexpr double kSolitonTol = 1e-4;
constexpr double kOrderLo = 3.5, kOrderHi = 4.5;
constexpr double kL2DriftTol = 1e-6;
constexpr double kMassDriftTol = 1e-10;
constexpr double kBalanceTol = 1e-10;
constexpr double kSolverSeconds = 60.0;
// criterion 5
constexpr double kGoldenFactor = 1.05;
constexpr double kExperimentSeconds = 60.0;
// criterion 6
constexpr int kLinftyFields = 50;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::string failures;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failures += (failures.empty() ? "" : "; ") + what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string src(const std::string& rel) { return (fs::path(KDV5_SOURCE_DIR) / rel).string(); }

// ---------------------------------------------------------------------------------------------

Outcome criterion1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::pair<double, double>> families{{0.5, 1.0}, {1.0, 1.0}, {1.0, 2.0}};
    int certified = 0, failed = 0;
    std::vector<double> ratio_sups;
    for (auto [eps, b] : families) {
        std::vector<CutoffSpec> specs{CutoffSpec::plain(eps, b)};
        for (int n : {1, 2, 3, 5}) specs.push_back(CutoffSpec::weighted(n, eps, b));
        for (const auto& s : specs)
            for (const auto& r : certify_inequalities(s, kCutoffResolution)) {
                ++certified;
                if (!r.pass) ++failed;
                // (chi''')^2 / chi' scales like b^-5; b^5 sup must not depend on eps
                if (r.id == CutoffInequality::CutoffRatio && s.kind == CutoffKind::Plain)
                    ratio_sups.push_back(r.sup_value * std::pow(b, 5));
            }
    }
    o.require(failed == 0, std::to_string(failed) + " inequality checks");

    double endpoint = std::fabs(RhoPoly::value(1.0, 0) - 1.0) + std::fabs(RhoPoly::value(0.0, 0));
    for (int j = 1; j <= 5; ++j) endpoint = std::max({endpoint, std::fabs(RhoPoly::value(0.0, j)), std::fabs(RhoPoly::value(1.0, j))});
    o.require(endpoint <= kRhoEndpointTol, "rho endpoints");

    // closed form of (rho''')^2 / rho' against the quotient of evaluated derivatives
    double worst_ratio = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const double y = i / 1001.0;
        const double closed = RhoPoly::ratio_third(y);
        const double d1 = RhoPoly::value(y, 1), d3 = RhoPoly::value(y, 3);
        const double direct = d3 * d3 / d1;
        if (std::fabs(closed) > 1e-8) worst_ratio = std::max(worst_ratio, std::fabs(direct - closed) / std::fabs(closed));
    }
    o.require(worst_ratio <= kRhoRatioTol, "rho ratio closed form");

    double spread = 0.0;
    for (double s : ratio_sups) spread = std::max(spread, std::fabs(s - ratio_sups[0]) / ratio_sups[0]);
    for (double eps : {0.25, 2.0}) {
        const double v = certify_inequalities(CutoffSpec::plain(eps, 1.0), kCutoffResolution)[0].sup_value;
        spread = std::max(spread, std::fabs(v - ratio_sups[0]) / ratio_sups[0]);
    }
    o.require(ratio_sups.size() == 3 && spread <= kEpsIndependenceTol, "CutoffRatio eps independence");
    const double secs = seconds_since(t0);
    o.require(secs < kCutoffSeconds, "runtime");
    o.detail << certified << " certifications, rho endpoints " << endpoint << ", ratio closed form rel " << worst_ratio
             << ", CutoffRatio sup spread " << spread << ", " << secs << " s";
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::uint64_t> seeds;
    for (int s = 1; s <= kIdentitySeeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    const auto rows = identity_suite(kIdentityN, seeds, 1);
    double worst = 0.0;
    int failing = 0;
    for (const auto& r : rows) {
        const double v = r.id.rfind("energy", 0) == 0 ? -r.slack / std::max(r.scale, 1e-300) : r.rel_residual;
        worst = std::max(worst, v);
        if (!r.pass || (r.id.rfind("energy", 0) != 0 && r.rel_residual > kIdentityTol)) ++failing;
    }
    o.require(failing == 0, std::to_string(failing) + " identity rows");
    const auto cal = calibrate_convention(kIdentityN, 5);
    o.require(cal.passing.has_value() && *cal.passing == Convention::PlusUUxxx, "convention calibration");

    // trapezoid quadrature, N = 128 -> 256
    const auto ref = identity_refinement(kIdentityN / 2, {1, 2, 3});
    double weakest = INFINITY;
    for (const auto& r : ref) weakest = std::min(weakest, r.coarse / std::max(r.fine, 1e-300));
    o.require(weakest >= kRefinementFactor, "residual decrease under grid doubling");
    const double secs = seconds_since(t0);
    o.require(secs < kIdentitySeconds, "runtime");
    o.detail << rows.size() << " rows over " << kIdentitySeeds << " seeds, worst rel residual " << worst
             << ", weakest doubling factor " << weakest << ", " << secs << " s";
    return o;
}

Field soliton(const Grid& g, double c, double x0, double t) {
    return Field::sample(g, [=](double x) {
        const double s = 1.0 / std::cosh(0.5 * std::sqrt(c) * (x - x0 - c * t));
        return 3.0 * c * s * s;
    });
}

Outcome criterion3() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();

    // linear flow
    Model lin;
    lin.name = "linear";
    lin.a5 = 1.0;
    lin.a3 = -0.5;
    lin.a1 = 0.25;
    const Grid gl(2.0 * kPi, 64);
    const Field ul = band_limited_random(gl, 20, 8, 1.0);
    SolverConfig lc;
    lc.dt = 0.01;
    lc.t_end = 1.0;
    const double lin_err = (simulate(lin, ul, lc, {}, false).final_state - linear_exact(ul, 1.0, 1.0, -0.5, 0.25)).max_abs();
    o.require(lin_err <= kLinearTol, "linear flow");

    // KdV soliton transit
    const Grid gs(40.0, 1024);
    SolverConfig sc;
    sc.dt = 1e-3;
    sc.t_end = 1.0;
    const double sol_err = (simulate(catalog("kdv"), soliton(gs, 1.0, 15.0, 0.0), sc, {}, false).final_state -
                            soliton(gs, 1.0, 15.0, 1.0)).max_abs();
    o.require(sol_err <= kSolitonTol, "soliton transit");

    // temporal order on the soliton, N = 256, against a dt/16 reference
    const Grid go(40.0, 256);
    const Field u0 = soliton(go, 1.0, 15.0, 0.0);
    auto run = [&](int steps) {
        SolverConfig c;
        c.dt = 1.0 / steps;
        c.t_end = 1.0;
        return simulate(catalog("kdv"), u0, c, {}, false).final_state;
    };
    const Field ref = run(10240);
    const double e1 = (run(640) - ref).max_abs(), e2 = (run(1280) - ref).max_abs(), e3 = (run(2560) - ref).max_abs();
    const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
    o.require(p1 >= kOrderLo && p1 <= kOrderHi && p2 >= kOrderLo && p2 <= kOrderHi, "temporal order");

    // kdv5 invariants
    const Grid g5(40.0, 512);
    const Field v0 = Field::sample(g5, [](double x) {
        const double z = (x - 20.0) / 2.0;
        return std::exp(-z * z);
    });
    SolverConfig c5;
    c5.dt = 1e-4;
    c5.t_end = 0.1;
    const Field v = simulate(catalog("kdv5"), v0, c5, {}, false).final_state;
    const double l2 = std::fabs(integrate(pointwise(v, v)) - integrate(pointwise(v0, v0)));
    const double mass = std::fabs(integrate(v) - integrate(v0));
    o.require(l2 <= kL2DriftTol, "kdv5 L2 drift");
    o.require(mass <= kMassDriftTol, "kdv5 mass drift");

    // L2 balance for random coefficients: int u rhs = (2 c3 - c2) int u u_x u_xx
    const Grid gb(17.0, 128);
    Rng rng(99);
    double balance = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double c1 = rng.uniform(-5, 5), c2 = rng.uniform(-5, 5), c3 = rng.uniform(-5, 5);
        const Field u = band_limited_random(gb, 40, 1000 + static_cast<std::uint64_t>(trial), 1.0);
        const Field r = eval_rhs(general_c(c1, c2, c3), u, Dealias::Pad2);
        const double lhs = integrate(pointwise(u, r));
        const double rhs = (2 * c3 - c2) * integrate(pointwise(u, pointwise(derivative(u, 1), derivative(u, 2))));
        double scale = 0.0;
        for (int j = 0; j < gb.N; ++j) scale += std::fabs(u[j] * r[j]) * gb.h();
        balance = std::max(balance, std::fabs(lhs - rhs) / scale);
    }
    o.require(balance <= kBalanceTol, "L2 balance");
    const double secs = seconds_since(t0);
    o.require(secs < kSolverSeconds, "runtime");
    o.detail << "linear " << lin_err << ", soliton " << sol_err << ", order " << p1 << " / " << p2 << ", kdv5 L2 drift "
             << l2 << ", mass drift " << mass << ", balance rel " << balance << ", " << secs << " s";
    return o;
}

Outcome criterion4() {
    Outcome o;
    const int table[] = {1, 1, 2, 2, 4, 8};
    for (int l = 1; l <= 6; ++l) o.require(nu_degree(l) == table[l - 1], "nu_degree(" + std::to_string(l) + ")");
    for (int l : {7, 10, 20}) o.require(nu_degree(l) == 8 * (l - 5), "nu_degree(" + std::to_string(l) + ")");
    const auto s = bootstrap_schedule(9);
    const std::vector<std::pair<int, int>> cascade{{0, 9},  {2, 8},  {4, 7},  {6, 6},  {8, 5},
                                                   {10, 4}, {12, 3}, {14, 2}, {16, 1}, {18, 0}};
    o.require(s.pairs == cascade && s.final_l == 19, "bootstrap_schedule(9)");
    o.detail << "nu_degree 1..6,7,10,20 = ";
    for (int l : {1, 2, 3, 4, 5, 6, 7, 10, 20}) o.detail << nu_degree(l) << " ";
    o.detail << "; schedule(9) ends at (18,0), final_l " << s.final_l;
    return o;
}

// Golden values of one pinned run: sup over t of the listed series.
std::map<std::string, double> golden_values(const EnergyReport& r, const std::vector<std::string>& keys) {
    std::map<std::string, double> g;
    for (const auto& k : keys) g[k] = r.summary.at(k);
    return g;
}

const std::vector<std::string> kPropagationKeys{"sup:H3_window_nu0", "sup:H3_window_nu1"};
const std::vector<std::string> kDecayKeys{"sup:X2_m0", "sup:X2_m1", "sup:X2_m2"};

std::map<std::string, double> read_golden(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("missing golden file " + path);
    return nlohmann::json::parse(f).get<std::map<std::string, double>>();
}

bool within_golden(double v, double g) { return g > 0.0 && v <= kGoldenFactor * g && v * kGoldenFactor >= g; }

Outcome criterion5(bool write_golden) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    const auto prop = run_propagation(load_config(src("configs/propagation_rough.cfg")));
    const double tp = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto dec = run_decay(load_config(src("configs/decay.cfg")));
    const double td = seconds_since(t0);
    if (write_golden) {
        write_atomic(src("tests/golden/propagation_rough.json"),
                     nlohmann::json(golden_values(prop, kPropagationKeys)).dump(2) + "\n");
        write_atomic(src("tests/golden/decay.json"), nlohmann::json(golden_values(dec, kDecayKeys)).dump(2) + "\n");
    }
    const auto gp = read_golden(src("tests/golden/propagation_rough.json"));
    const auto gd = read_golden(src("tests/golden/decay.json"));

    for (const auto& k : kPropagationKeys) o.require(within_golden(prop.summary.at(k), gp.at(k)), k + " vs golden");
    double gap = INFINITY;
    for (const char* nu : {"0", "1"}) gap = std::min(gap, prop.summary.at(std::string("gap_nu") + nu));
    o.require(gap >= kRoughGapFactor, "global H4 / windowed H3 >= 1e3");
    o.require(prop.checks.at("finite") && prop.checks.at("smoothing_nondecreasing") && prop.checks.at("no_blowup"),
              "propagation accumulators");
    for (const auto& k : kDecayKeys) o.require(within_golden(dec.summary.at(k), gd.at(k)), k + " vs golden");
    o.require(dec.checks.at("finite") && dec.checks.at("smoothing_nondecreasing") && dec.checks.at("no_blowup"),
              "decay accumulators");
    o.require(tp < kExperimentSeconds && td < kExperimentSeconds, "runtime");
    o.detail << "windowed H3 sup " << prop.summary.at("sup:H3_window_nu0") << " / " << prop.summary.at("sup:H3_window_nu1")
             << ", min global H4 " << prop.summary.at("min:global_H4") << ", gap " << gap << " (at t=0: " << prop.summary.at("gap_initial_nu1") << "), seam mass "
             << prop.summary.at("sup:seam_mass") << ", decay X2_m2 sup " << dec.summary.at("sup:X2_m2") << ", "
             << tp << " s + " << td << " s";
    return o;
}

Outcome criterion6() {
    Outcome o;
    const double X = 1024.0;
    auto sampled = [X](const std::function<double(double)>& f) {
        std::vector<double> v(200001);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(X * static_cast<double>(i) / (v.size() - 1));
        return v;
    };
    const auto lin = check_dyadic_decay(sampled([](double x) { return 2.0 * x; }), X, 2.0, 0.5);
    const auto zero = check_dyadic_decay(std::vector<double>(1001, 0.0), X, 2.0, 0.5);
    const auto cubic = check_dyadic_decay(sampled([](double x) { return x * x * x; }), X, 2.0, 0.5);
    o.require(lin.pass && lin.converging, "dyadic 2x");
    o.require(zero.pass, "dyadic zero");
    o.require(!cubic.hypothesis_ok && !cubic.pass, "dyadic x^3 reported as hypothesis violation");

    SpaceTimeFunction c{[](double, double) { return 2.5; }, [](double, double) { return 0.0; },
                        [](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
    SpaceTimeFunction lx{[](double x, double) { return x; }, [](double, double) { return 1.0; },
                         [](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
    SpaceTimeFunction ss{[](double x, double t) { return std::sin(2 * kPi * x) * std::sin(2 * kPi * t); },
                         [](double x, double t) { return 2 * kPi * std::cos(2 * kPi * x) * std::sin(2 * kPi * t); },
                         [](double x, double t) { return 2 * kPi * std::sin(2 * kPi * x) * std::cos(2 * kPi * t); },
                         [](double x, double t) { return 4 * kPi * kPi * std::cos(2 * kPi * x) * std::cos(2 * kPi * t); }};
    const auto rc = check_sob2(c, 1.0, 1.0), rl = check_sob2(lx, 1.0, 1.0), rs = check_sob2(ss, 1.0, 1.0);
    o.require(rc.pass && std::fabs(rc.rhs - 2.5) <= 1e-12, "sob2 constant");
    o.require(rl.pass && std::fabs(rl.rhs - 1.5) <= 1e-12, "sob2 x");
    o.require(rs.pass, "sob2 sin sin");

    const CutoffSpec psi = CutoffSpec::plain(1.0, 1.0);
    double worst = 0.0;
    for (int s = 1; s <= kLinftyFields; ++s) {
        const auto r = check_linfty_trick(identity_test_field(256, static_cast<std::uint64_t>(s)), psi, 0, kIdentityShift,
                                          1, 2, 0);
        worst = std::max(worst, r.constant);
        o.require(r.pass, "linfty seed " + std::to_string(s));
    }
    o.require(worst <= kLinftyTrickBound, "linfty constant");
    o.detail << "dyadic 2x/0/x^3 ok, sob2 slacks " << rc.slack << " / " << rl.slack << " / " << rs.slack
             << ", largest product-bound constant " << worst << " over " << kLinftyFields << " fields";
    return o;
}

// Runs one CLI invocation into dir; returns the exit status.
int cli(const std::string& args, const std::string& dir) {
    const std::string cmd = std::string(KDV5_CLI) + " " + args + " -o " + dir + " > " + dir + ".log 2>&1";
    fs::create_directories(dir);
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome criterion7() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "kdv5_acceptance_repro";
    fs::remove_all(root);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"simulate", "simulate -c " + src("configs/gaussian.cfg")},
        {"propagation", "propagation -c " + src("configs/propagation_rough.cfg")},
        {"decay", "decay -c " + src("configs/decay.cfg")},
        {"bootstrap", "bootstrap -c " + src("configs/bootstrap.cfg")},
        {"check-cutoffs", "check-cutoffs"},
        {"check-identities", "check-identities --seeds 20 --threads 2"},
    };
    int compared = 0;
    for (const auto& [name, args] : runs) {
        const std::string a = (root / (name + "_a")).string(), b = (root / (name + "_b")).string();
        cli(args, a);
        cli(args, b);
        const std::string ma = slurp(fs::path(a) / "manifest.json"), mb = slurp(fs::path(b) / "manifest.json");
        bool same = !ma.empty() && sha256_hex(ma) == sha256_hex(mb);
        for (const auto& e : fs::directory_iterator(a))
            same = same && slurp(e.path()) == slurp(fs::path(b) / e.path().filename());
        o.require(same, name);
        ++compared;
    }
    fs::remove_all(root);
    o.detail << compared << " subcommands run twice, manifests and outputs compared byte for byte";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const bool write_golden = argc > 1 && std::string(argv[1]) == "--write-golden";
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         [&] { return criterion5(write_golden); }, criterion6,
                                                         criterion7};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::printf("criterion %zu: %s  %s%s%s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(),
                    o.failures.empty() ? "" : "  | failed: ", o.failures.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
