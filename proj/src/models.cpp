#include "kdv5/models.hpp"

#include "kdv5/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace kdv5 {

std::string to_string(Dealias d) {
    switch (d) {
        case Dealias::None: return "none";
        case Dealias::TwoThirds: return "two_thirds";
        case Dealias::Pad2: return "pad2";
    }
    return "unknown";
}

Dealias dealias_from_string(const std::string& s) {
    if (s == "none") return Dealias::None;
    if (s == "two_thirds" || s == "2/3") return Dealias::TwoThirds;
    if (s == "pad2") return Dealias::Pad2;
    throw ConfigError("unknown dealias rule: " + s);
}

void Model::validate() const {
    for (const auto& t : monomials) {
        if (t.orders.empty()) throw ContractViolation("model " + name + ": monomial without factors");
        for (int o : t.orders)
            if (o < 0 || o > 3) throw ContractViolation("model " + name + ": factor order must be in 0..3");
        if (!std::isfinite(t.c)) throw ContractViolation("model " + name + ": non-finite coefficient");
    }
    if (!(std::isfinite(a5) && std::isfinite(a3) && std::isfinite(a1)))
        throw ContractViolation("model " + name + ": non-finite dispersion coefficient");
}

namespace {

std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

// Merged coefficients keyed by the sorted factor list.
std::map<std::vector<int>, double> merged(const Model& m) {
    std::map<std::vector<int>, double> out;
    for (const auto& t : m.monomials) out[sorted(t.orders)] += t.c;
    return out;
}

const std::vector<int> kU2U1{0, 0, 1};
const std::vector<int> kU1U2{1, 2};
const std::vector<int> kUU3{0, 3};

}  // namespace

std::optional<std::array<double, 3>> Model::kdv5g_coefficients() const {
    if (a5 != 1.0 || a3 != 0.0 || a1 != 0.0) return std::nullopt;
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (const auto& [k, v] : merged(*this)) {
        if (k == kU2U1)
            c[0] = -v;
        else if (k == kU1U2)
            c[1] = -v;
        else if (k == kUU3)
            c[2] = -v;
        else if (v != 0.0)
            return std::nullopt;
    }
    return c;
}

bool Model::hamiltonian() const {
    if (a5 == 0.0 || a3 != 0.0 || a1 != 0.0) return false;
    double q12 = 0.0, q03 = 0.0;
    for (const auto& [k, v] : merged(*this)) {
        if (k == kU1U2)
            q12 = v;
        else if (k == kUU3)
            q03 = v;
        else if (k != kU2U1 && v != 0.0)
            return false;
    }
    return q12 == 2.0 * q03;
}

bool Model::mass_conserving() const {
    for (const auto& [k, v] : merged(*this)) {
        if (v == 0.0) continue;
        // u^p u_x, u_x u_xx, u u_xxx, u_xx u_xxx are exact derivatives
        const bool power_flux = std::count(k.begin(), k.end(), 1) == 1 &&
                                std::count(k.begin(), k.end(), 0) == static_cast<long>(k.size()) - 1;
        if (!(power_flux || k == kU1U2 || k == kUU3 || k == std::vector<int>{2, 3})) return false;
    }
    return true;
}

int Model::max_degree() const {
    int d = 0;
    for (const auto& t : monomials) d = std::max(d, t.degree());
    return d;
}

Model general_c(double c1, double c2, double c3) {
    Model m;
    m.name = "general_c";
    m.a5 = 1.0;
    m.monomials = {{-c1, {0, 0, 1}}, {-c2, {1, 2}}, {-c3, {0, 3}}};
    return m;
}

Model water_wave(double c1, double c2, double c3, double c4, double c5) {
    Model m;
    m.name = "water_wave";
    m.a5 = -c5;
    m.a3 = -c2;
    m.a1 = -1.0;
    m.monomials = {{-c1, {0, 1}}, {-c3, {1, 2}}, {-c4, {0, 3}}};
    return m;
}

Model catalog(const std::string& name, const std::vector<double>& params) {
    auto want = [&](std::size_t n) {
        if (params.size() != n)
            throw ContractViolation("catalog: model " + name + " takes " + std::to_string(n) + " parameters");
    };
    Model m;
    if (name == "kdv") {
        want(0);
        m.name = name;
        m.a3 = -1.0;
        m.monomials = {{-1.0, {0, 1}}};
    } else if (name == "kdv5") {
        want(0);
        m = general_c(-30.0, 20.0, 10.0);
        m.name = name;
    } else if (name == "general_c") {
        want(3);
        m = general_c(params[0], params[1], params[2]);
    } else if (name == "benney") {
        want(0);
        m.name = name;
        m.a5 = -1.0;
        m.monomials = {{2.0, {1, 2}}, {1.0, {0, 3}}};
    } else if (name == "lisher") {
        want(0);
        m.name = name;
        m.a5 = -1.0;
        m.monomials = {{-1.0, {0, 1}}, {-1.0, {0, 0, 1}}, {-1.0, {1, 2}}, {-1.0, {0, 3}},
                       {-1.0, {0, 1, 2}}, {-1.0, {0, 0, 3}}};
    } else if (name == "water_wave") {
        want(5);
        m = water_wave(params[0], params[1], params[2], params[3], params[4]);
    } else if (name == "example_xx") {
        want(0);
        m.name = name;
        m.a5 = 1.0;
        m.monomials = {{1.0, {0, 2}}};
    } else {
        throw ContractViolation("catalog: unknown model " + name);
    }
    m.validate();
    return m;
}

Model model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception&) {
        // bare catalog name
        return catalog(text);
    }
    try {
        if (j.is_string()) return catalog(j.get<std::string>());
        if (j.contains("name") && !j.contains("monomials"))
            return catalog(j.at("name").get<std::string>(), j.value("params", std::vector<double>{}));
        Model m;
        m.name = j.value("name", std::string("custom"));
        m.a5 = j.value("a5", 0.0);
        m.a3 = j.value("a3", 0.0);
        m.a1 = j.value("a1", 0.0);
        for (const auto& t : j.at("monomials")) m.monomials.push_back({t.at("c").get<double>(), t.at("orders").get<std::vector<int>>()});
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model specification: ") + e.what());
    }
}

std::string model_to_json(const Model& m) {
    nlohmann::ordered_json j;
    j["name"] = m.name;
    j["a5"] = m.a5;
    j["a3"] = m.a3;
    j["a1"] = m.a1;
    j["monomials"] = nlohmann::ordered_json::array();
    for (const auto& t : m.monomials) j["monomials"].push_back({{"c", t.c}, {"orders", t.orders}});
    return j.dump();
}

std::vector<cplx> linear_symbol(const Model& m, const Grid& g) {
    std::vector<cplx> lam(static_cast<std::size_t>(g.modes()));
    for (int k = 0; k < g.modes(); ++k) {
        const double q = g.kappa(k);
        // (i q)^5 = i q^5, (i q)^3 = -i q^3
        lam[k] = cplx(0.0, m.a5 * std::pow(q, 5) - m.a3 * std::pow(q, 3) + m.a1 * q);
    }
    if (g.N % 2 == 0) lam[g.N / 2] = 0.0;  // odd symbol at Nyquist
    return lam;
}

Spectrum nonlinear_spectrum(const Model& m, const Grid& g, const Spectrum& uh, Dealias d) {
    const int N = g.N;
    Spectrum out(static_cast<std::size_t>(g.modes()), cplx(0.0, 0.0));
    if (m.monomials.empty()) return out;
    const int M = (d == Dealias::Pad2) ? 2 * N : N;
    const int kcut = (d == Dealias::TwoThirds) ? N / 3 : N / 2 - 1;

    std::array<std::vector<double>, 4> phys;
    std::array<bool, 4> need{};
    for (const auto& t : m.monomials)
        for (int o : t.orders) need[o] = true;
    for (int o = 0; o < 4; ++o) {
        if (!need[o]) continue;
        Spectrum s = derivative_spectrum(g, uh, o);
        for (int k = kcut + 1; k < static_cast<int>(s.size()); ++k) s[k] = 0.0;
        phys[o] = inverse_samples(M == N ? s : resize_spectrum(s, N, M), M);
    }
    std::vector<double> acc(static_cast<std::size_t>(M), 0.0);
    for (const auto& t : m.monomials) {
        for (int j = 0; j < M; ++j) {
            double p = t.c;
            for (int o : t.orders) p *= phys[o][j];
            acc[j] += p;
        }
    }
    const Spectrum big = forward_samples(acc);
    for (int k = 0; k <= kcut; ++k) out[k] = big[k];
    return out;
}

Field eval_rhs(const Model& m, const Field& u, Dealias d) {
    const Spectrum uh = forward(u);
    Spectrum r = nonlinear_spectrum(m, u.grid, uh, d);
    const auto lam = linear_symbol(m, u.grid);
    for (int k = 0; k < u.grid.modes(); ++k) r[k] += lam[k] * uh[k];
    return inverse(u.grid, r);
}

}  // namespace kdv5
