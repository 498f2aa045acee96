#include "kdv5/identities.hpp"

#include "kdv5/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace kdv5 {

namespace {

constexpr int kMaxDerivative = 8;

void add(DiffPoly& p, std::vector<int> key, double c) {
    std::sort(key.begin(), key.end());
    auto& v = p[key];
    v += c;
    if (v == 0.0) p.erase(key);
}

Term term(double c, std::vector<int> orders, int j) {
    std::sort(orders.begin(), orders.end());
    return {c, std::move(orders), j};
}

int binom(int n, int k) {
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<Spectrum> derivative_spectra(const Field& u, int max_order) {
    if (max_order > kMaxDerivative) throw ContractViolation("identities: derivative order above 8");
    const Spectrum uh = forward(u);
    std::vector<Spectrum> d;
    for (int o = 0; o <= max_order; ++o) d.push_back(derivative_spectrum(u.grid, uh, o));
    return d;
}

int max_order(const TermList& t) {
    int m = 0;
    for (const auto& x : t)
        for (int o : x.orders) m = std::max(m, o);
    return m;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace

DiffPoly dx(const DiffPoly& p) {
    DiffPoly out;
    for (const auto& [orders, c] : p) {
        for (std::size_t i = 0; i < orders.size(); ++i) {
            auto o = orders;
            ++o[i];
            add(out, std::move(o), c);
        }
    }
    return out;
}

DiffPoly dx(const DiffPoly& p, int times) {
    DiffPoly out = p;
    for (int i = 0; i < times; ++i) out = dx(out);
    return out;
}

DiffPoly multiply(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly out;
    for (const auto& [oa, ca] : a)
        for (const auto& [ob, cb] : b) {
            auto o = oa;
            o.insert(o.end(), ob.begin(), ob.end());
            add(out, std::move(o), ca * cb);
        }
    return out;
}

TermList time_derivative(const std::vector<int>& G, const DiffPoly& rhs, double nu) {
    DiffPoly sum;
    for (std::size_t i = 0; i < G.size(); ++i) {
        DiffPoly rest;
        std::vector<int> r = G;
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
        rest[r] = 1.0;
        for (const auto& [o, c] : multiply(rest, dx(rhs, G[i]))) add(sum, o, c);
    }
    TermList out;
    for (const auto& [o, c] : sum) out.push_back({c, o, 0});
    if (nu != 0.0) out.push_back(term(nu, G, 1));
    return out;
}

std::string to_string(IdentityId id) {
    switch (id) {
        case IdentityId::KatoK: return "kato_k";
        case IdentityId::KwonL1: return "kwon_l1";
        case IdentityId::KwonL2: return "kwon_l2";
        case IdentityId::DecayN: return "decay_n";
    }
    return "?";
}

IdentityId identity_from_string(const std::string& s) {
    for (auto id : {IdentityId::KatoK, IdentityId::KwonL1, IdentityId::KwonL2, IdentityId::DecayN})
        if (s == to_string(id)) return id;
    throw ContractViolation("unknown identity '" + s + "'");
}

std::string to_string(Convention c) {
    return c == Convention::PlusUUxxx ? "u_t=u_xxxxx+u*u_xxx" : "u_t=u_xxxxx-u*u_xxx";
}

WeightBank::WeightBank(const Grid& g, const CutoffSpec& spec, double shift, int max_degree,
                       const SupportPolicy& policy)
    : grid_(g), spec_(spec), shift_(shift), policy_(policy) {
    spec.validate();
    if (max_degree < 1) throw ContractViolation("WeightBank: max_degree must be >= 1");
    for (int j = 0; j <= 5; ++j) {
        weights_.push_back(WeightFunction::cutoff(spec, j));
        moments_.push_back(moments_for(g, weights_.back(), shift, max_degree, policy));
    }
}

std::vector<double> evaluate_terms(const TermList& terms, const Field& u, const WeightBank& bank, Quadrature q) {
    if (!(u.grid == bank.grid())) throw ContractViolation("evaluate_terms: field and weight grids differ");
    const auto d = derivative_spectra(u, max_order(terms));
    const Grid& g = u.grid;
    std::vector<double> out;
    out.reserve(terms.size());
    if (q == Quadrature::Exact) {
        for (const auto& t : terms) {
            std::vector<Spectrum> f;
            for (int o : t.orders) f.push_back(d[static_cast<std::size_t>(o)]);
            out.push_back(t.c * product_integral(g, f, bank.moments(t.weight_order), bank.policy()));
        }
        return out;
    }
    std::vector<std::vector<double>> s;
    for (const auto& sp : d) s.push_back(inverse(g, sp).u);
    for (const auto& t : terms) {
        const auto& w = bank.weight(t.weight_order);
        double acc = 0.0;
        for (int j = 0; j < g.N; ++j) {
            double v = w(g.x(j) + bank.shift());
            for (int o : t.orders) v *= s[static_cast<std::size_t>(o)][static_cast<std::size_t>(j)];
            acc += v;
        }
        out.push_back(t.c * acc * g.h());
    }
    return out;
}

std::vector<int> identity_functional(IdentityId id, int k) {
    switch (id) {
        case IdentityId::KatoK:
            if (k < 1) throw ContractViolation("kato_k: k must be >= 1");
            return {k, k};
        case IdentityId::KwonL1: return {0, 1, 1};
        case IdentityId::KwonL2: return {0, 2, 2};
        case IdentityId::DecayN: return {0, 0, 0};
    }
    return {};
}

DiffPoly identity_flow(IdentityId id, Convention c) {
    DiffPoly p;
    if (id == IdentityId::KatoK) {
        p[{3}] = -1.0;
        p[{0, 1}] = -1.0;
    } else {
        p[{5}] = 1.0;
        p[{0, 3}] = c == Convention::PlusUUxxx ? 1.0 : -1.0;
    }
    return p;
}

TermList identity_rhs(IdentityId id, int k, Transcription tr) {
    const bool printed = tr == Transcription::AsPrinted;
    switch (id) {
        case IdentityId::KatoK: {
            if (k < 1) throw ContractViolation("kato_k: k must be >= 1");
            TermList t{term(-3.0, {k + 1, k + 1}, 1), term(1.0, {k, k}, 3), term(1.0, {0, k, k}, 1),
                       term(1.0, {1, k, k}, 0)};
            // commutator [d^k; u] u_x = sum_{j=1..k} C(k,j) d^j u d^{k+1-j} u
            const double cc = printed ? 1.0 : -2.0;
            for (int j = 1; j <= k; ++j) t.push_back(term(cc * binom(k, j), {k, j, k + 1 - j}, 0));
            return t;
        }
        case IdentityId::KwonL1:
            return {term(-5.0, {1, 3, 3}, 0),
                    term(-5.0, {0, 3, 3}, 1),
                    term(printed ? 28.0 / 3.0 : 25.0 / 3.0, {2, 2, 2}, 1),
                    term(printed ? 21.0 : 20.0, {1, 2, 2}, 2),
                    term(5.0, {0, 2, 2}, 3),
                    term(-10.0 / 3.0, {1, 1, 1}, 4),
                    term(-1.0, {0, 1, 1}, 5),
                    term(4.0, {0, 1, 2, 2}, 0),
                    term(3.0, {0, 0, 2, 2}, 1),
                    term(-9.0 / 4.0, {1, 1, 1, 1}, 1),
                    term(-1.0, {0, 1, 1, 2}, 1),
                    term(-4.0, {0, 1, 1, 1}, 2),
                    term(-1.0, {0, 0, 1, 1}, 3)};
        case IdentityId::KwonL2:
            return {term(-5.0, {1, 4, 4}, 0),
                    term(-5.0, {0, 4, 4}, 1),
                    term(5.0, {3, 3, 3}, 0),
                    term(25.0, {2, 3, 3}, 1),
                    term(15.0, {1, 3, 3}, 2),
                    term(5.0, {0, 3, 3}, 3),
                    term(2.0, {0, 1, 3, 3}, 0),
                    term(3.0, {0, 0, 3, 3}, 1),
                    term(-25.0 / 3.0, {2, 2, 2}, 3),
                    term(-5.0, {1, 2, 2}, 4),
                    term(-1.0, {0, 2, 2}, 5),
                    term(-1.0, {1, 2, 2, 2}, 0),
                    // printed with the cube missing: u (u_xx)^2
                    printed ? term(-3.0, {0, 2, 2}, 1) : term(-3.0, {0, 2, 2, 2}, 1),
                    term(-2.0, {1, 1, 2, 2}, 1),
                    term(-4.0, {0, 1, 2, 2}, 2),
                    term(-1.0, {0, 0, 2, 2}, 3)};
        case IdentityId::DecayN:
            return {term(-15.0, {1, 2, 2}, 0),
                    term(printed ? -9.0 : -15.0, {0, 2, 2}, 1),
                    term(printed ? 10.0 : 15.0, {1, 1, 1}, 2),
                    term(printed ? 12.0 : 15.0, {0, 1, 1}, 3),
                    term(-1.0, {0, 0, 0}, 5),
                    term(9.0, {0, 1, 1, 1}, 0),
                    term(27.0 / 2.0, {0, 0, 1, 1}, 1),
                    term(-3.0 / 4.0, {0, 0, 0, 0}, 3)};
    }
    return {};
}

IdentityResidual check_identity(IdentityId id, const Field& u, const WeightBank& bank, double nu, int k,
                                const IdentityOptions& opt) {
    if (id == IdentityId::DecayN && bank.spec().kind != CutoffKind::Weighted)
        throw ContractViolation("decay_n needs a Weighted cutoff");
    const auto G = identity_functional(id, k);
    const TermList lhs_terms = time_derivative(G, identity_flow(id, opt.convention), nu);
    TermList rhs_terms = identity_rhs(id, k, opt.transcription);
    if (nu != 0.0) rhs_terms.push_back(term(nu, G, 1));

    const auto lv = evaluate_terms(lhs_terms, u, bank, opt.quadrature);
    const auto rv = evaluate_terms(rhs_terms, u, bank, opt.quadrature);
    double lhs = 0.0, rhs = 0.0;
    for (double v : lv) lhs += v;
    for (double v : rv) rhs += v;

    IdentityResidual r;
    r.id = to_string(id);
    if (id == IdentityId::KatoK) r.id = "kato_" + std::to_string(k);
    if (id == IdentityId::DecayN) r.id = "decay_" + std::to_string(bank.spec().n);
    r.seed = opt.seed;
    r.N = u.grid.N;
    r.scale = std::max(max_abs(rv), std::fabs(lhs));
    r.abs_residual = std::fabs(lhs - rhs);
    r.rel_residual = r.abs_residual / std::max(r.scale, 1e-300);
    r.convention = id == IdentityId::KatoK ? "u_t=-u_xxx-u*u_x" : to_string(opt.convention);
    r.pass = r.abs_residual <= std::max(kIdentityRelTol * r.scale, kIdentityAbsFloor);
    return r;
}

IdentityResidual check_identity(IdentityId id, const Field& u, const CutoffSpec& spec, double shift, double nu,
                                int k, const IdentityOptions& opt) {
    const WeightBank bank(u.grid, spec, shift);
    return check_identity(id, u, bank, nu, k, opt);
}

Field identity_test_field(int N, std::uint64_t seed, const IdentityField& f) {
    return localized_random(Grid(f.L, N), f.kmax, seed, f.amplitude, f.center, f.width);
}

ConventionCalibration calibrate_convention(int N, int seeds) {
    const IdentityField tf;
    const WeightBank bank(Grid(tf.L, N), CutoffSpec::plain(1.0, 2.0), kIdentityShift);
    ConventionCalibration cal;
    bool plus_ok = true, minus_ok = true;
    for (int s = 0; s < seeds; ++s) {
        const Field u = identity_test_field(N, static_cast<std::uint64_t>(s + 1), tf);
        for (double nu : {0.0, 1.0}) {
            IdentityOptions opt;
            opt.convention = Convention::PlusUUxxx;
            const auto p = check_identity(IdentityId::KwonL1, u, bank, nu, 0, opt);
            opt.convention = Convention::MinusUUxxx;
            const auto m = check_identity(IdentityId::KwonL1, u, bank, nu, 0, opt);
            cal.worst_plus = std::max(cal.worst_plus, p.rel_residual);
            cal.worst_minus = std::max(cal.worst_minus, m.rel_residual);
            plus_ok = plus_ok && p.pass;
            minus_ok = minus_ok && m.pass;
        }
    }
    if (plus_ok != minus_ok) cal.passing = plus_ok ? Convention::PlusUUxxx : Convention::MinusUUxxx;
    return cal;
}

IdentityResidual check_energy_lemma(const ManufacturedField& field, const WeightFunction& psi, double shift,
                                    double nu, const std::vector<double>& times) {
    if (!field.u || !field.u_t) throw ContractViolation("check_energy_lemma: field callables missing");
    if (times.empty()) throw ContractViolation("check_energy_lemma: no sample times");
    const bool cutoff = psi.spec().has_value() && psi.order() == 0;

    IdentityResidual r;
    r.id = "energy_lemma";
    r.convention = "u_t-u_xxxxx=F";
    r.slack = std::numeric_limits<double>::infinity();
    r.pass = true;
    for (double t : times) {
        const Field u = field.u(t);
        const Field ut = field.u_t(t);
        const Grid& g = u.grid;
        const double s = shift + nu * t;
        if (!psi.check_sign_flag(g, s)) throw ContractViolation("check_energy_lemma: psi_x >= 0 fails");
        const Spectrum uh = forward(u);
        const Spectrum uth = forward(ut);
        const Spectrum u2 = derivative_spectrum(g, uh, 2);
        const Spectrum u5 = derivative_spectrum(g, uh, 5);
        Spectrum fh(uth.size());
        for (std::size_t k = 0; k < fh.size(); ++k) fh[k] = uth[k] - u5[k];

        const std::vector<Spectrum> uu{uh, uh}, uut{uh, uth}, uf{uh, fh}, u22{u2, u2};
        std::vector<double> lhs, rhs;
        if (cutoff) {
            const WeightBank bank(g, *psi.spec(), s, 2);
            const auto ratio = moments_for(g, WeightFunction::cutoff_ratio(*psi.spec()), s, 2);
            const SupportPolicy& pol = bank.policy();
            const double p1uu = product_integral(g, uu, bank.moments(1), pol);
            lhs = {2.0 * product_integral(g, uut, bank.moments(0), pol), nu * p1uu,
                   product_integral(g, u22, bank.moments(1), pol)};
            rhs = {nu * p1uu, 1.5 * product_integral(g, uu, bank.moments(5), pol),
                   25.0 / 16.0 * product_integral(g, uu, ratio, pol),
                   2.0 * product_integral(g, uf, bank.moments(0), pol)};
        } else {
            for (int j = 0; j < g.N; ++j)
                if (u[j] != 0.0 && psi.derivative(g.x(j) + s) != 0.0)
                    throw ContractViolation("check_energy_lemma: non-cutoff psi must have zero derivative");
            const auto m = moments_for(g, psi, s, 2);
            lhs = {2.0 * product_integral(g, uut, m)};
            rhs = {2.0 * product_integral(g, uf, m)};
        }
        double L = 0.0, R = 0.0;
        for (double v : lhs) L += v;
        for (double v : rhs) R += v;
        const double scale = std::max(max_abs(lhs), max_abs(rhs));
        const double slack = R - L;
        if (slack < r.slack) {
            r.slack = slack;
            r.scale = scale;
            r.abs_residual = std::max(0.0, -slack);
            r.rel_residual = std::fabs(slack) / std::max(scale, 1e-300);
            r.N = g.N;
        }
        if (slack < -std::max(kIdentityRelTol * scale, kIdentityAbsFloor)) r.pass = false;
    }
    return r;
}

LinftyTrickReport check_linfty_trick(const Field& u, const CutoffSpec& spec, int order, double shift, int j1, int j2,
                                     int j3) {
    if (order < 0 || order > 1) throw ContractViolation("check_linfty_trick: psi order must be 0 or 1");
    if (std::min({j1, j2, j3}) < 0 || std::max({j1, j2, j3}) > 6)
        throw ContractViolation("check_linfty_trick: orders must be in 0..6");
    const Grid& g = u.grid;
    const int M = 4 * g.N;
    const auto d = derivative_spectra(u, std::max({j1 + 1, j2, j3}));
    auto samples = [&](int o) { return inverse_samples(d[static_cast<std::size_t>(o)], M); };
    const auto a1 = samples(j1), a1p = samples(j1 + 1), a2 = samples(j2), a3 = samples(j3);
    const CutoffSpec narrow = spec.with_ramp(spec.eps / 5.0, 4.0 * spec.eps / 5.0);

    double lhs = 0.0, A1 = 0.0, A2 = 0.0, A3 = 0.0, B = 0.0, D = 0.0;
    const double h = g.L / M;
    for (int j = 0; j < M; ++j) {
        const double X = g.L * j / M + shift;
        const double psi = eval_cutoff(spec, X, order);
        const double dpsi = std::fabs(eval_cutoff(spec, X, order + 1));
        const double nar = eval_cutoff(narrow, X, order);
        lhs += std::fabs(a1[j] * a2[j] * a3[j]) * psi;
        A1 += a1p[j] * a1p[j] * psi;
        A2 += a1[j] * a1[j] * psi;
        A3 += a1[j] * a1[j] * dpsi;
        B += a2[j] * a2[j] * nar;
        D += a3[j] * a3[j] * psi;
    }
    LinftyTrickReport rep;
    rep.lhs = lhs * h;
    rep.rhs = ((A1 + A2 + A3) * h) * (B * h) + D * h;
    rep.constant = rep.lhs == 0.0 ? 0.0 : rep.lhs / rep.rhs;
    rep.pass = std::isfinite(rep.constant) && rep.constant <= kLinftyTrickBound;
    return rep;
}

namespace {

struct SuiteCase {
    IdentityId id;
    int k;          // Kato order
    int n;          // weight exponent, 0 = plain cutoff
};

const std::vector<SuiteCase>& suite_cases() {
    static const std::vector<SuiteCase> cases{
        {IdentityId::KatoK, 1, 0},  {IdentityId::KatoK, 2, 0},  {IdentityId::KatoK, 3, 0},  {IdentityId::KwonL1, 0, 0},
        {IdentityId::KwonL2, 0, 0}, {IdentityId::DecayN, 0, 1}, {IdentityId::DecayN, 0, 2},
    };
    return cases;
}

CutoffSpec suite_spec(int n) { return n > 0 ? CutoffSpec::weighted(n, 1.0, 2.0) : CutoffSpec::plain(1.0, 2.0); }

}  // namespace

ManufacturedField energy_test_field(int N) {
    const Grid g(20.0, N);
    auto shape = [g](double t) {
        return Field::sample(g, [t](double x) {
            const double z = (x - 10.0) / 2.0;
            return std::exp(-t) * std::cos(x) * std::exp(-z * z);
        });
    };
    return {shape, [shape](double t) { return -1.0 * shape(t); }};
}

std::vector<IdentityResidual> identity_suite(int N, const std::vector<std::uint64_t>& seeds, int threads) {
    const Grid g(20.0, N);
    std::vector<WeightBank> banks;
    for (int n = 0; n <= 2; ++n) banks.emplace_back(g, suite_spec(n), kIdentityShift);
    const std::size_t per = suite_cases().size();
    std::vector<IdentityResidual> rows(seeds.size() * per);

    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < seeds.size(); i += stride) {
            const Field u = identity_test_field(N, seeds[i]);
            for (std::size_t c = 0; c < per; ++c) {
                const auto& sc = suite_cases()[c];
                IdentityOptions opt;
                opt.seed = seeds[i];
                rows[i * per + c] = check_identity(sc.id, u, banks[static_cast<std::size_t>(sc.n)], 1.0, sc.k, opt);
            }
        }
    };
    const auto T = static_cast<std::size_t>(std::clamp(threads, 1, std::max<int>(1, static_cast<int>(seeds.size()))));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < T; ++t) pool.emplace_back(work, t, T);
    work(0, T);
    for (auto& th : pool) th.join();

    const ManufacturedField mf = energy_test_field(N);
    for (double nu : {0.0, 1.0}) {
        auto r = check_energy_lemma(mf, WeightFunction::cutoff(suite_spec(0)), kIdentityShift, nu,
                                    {0.0, 0.25, 0.5, 1.0});
        r.id = nu == 0.0 ? "energy_nu0" : "energy_nu1";
        rows.push_back(r);
    }
    return rows;
}

std::vector<RefinementRow> identity_refinement(int N, const std::vector<std::uint64_t>& seeds) {
    IdentityOptions trap;
    trap.quadrature = Quadrature::Trapezoid;
    std::vector<RefinementRow> out;
    for (auto s : seeds) {
        const Field a = identity_test_field(N, s), b = identity_test_field(2 * N, s);
        for (const auto& sc : suite_cases()) {
            const auto ra = check_identity(sc.id, a, suite_spec(sc.n), kIdentityShift, 1.0, sc.k, trap);
            const auto rb = check_identity(sc.id, b, suite_spec(sc.n), kIdentityShift, 1.0, sc.k, trap);
            RefinementRow r{ra.id, s, ra.abs_residual, rb.abs_residual, false};
            r.pass = r.fine * kRefinementFactor <= r.coarse;
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace kdv5
