#include "kdv5/spectral.hpp"

#include "kdv5/errors.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>

namespace kdv5 {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW plans are created under a global lock and executed with the new-array interface,
// which is thread safe.  Plans are unaligned so std::vector storage can be used directly.
struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

const PlanPair& plans_for(int n) {
    static std::map<int, std::unique_ptr<PlanPair>> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;
    auto p = std::make_unique<PlanPair>();
    std::vector<double> r(static_cast<std::size_t>(n));
    std::vector<fftw_complex> c(static_cast<std::size_t>(n / 2 + 1));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p->r2c = fftw_plan_dft_r2c_1d(n, r.data(), c.data(), flags);
    p->c2r = fftw_plan_dft_c2r_1d(n, c.data(), r.data(), flags | FFTW_DESTROY_INPUT);
    auto& ref = *p;
    cache.emplace(n, std::move(p));
    return ref;
}

}  // namespace

Grid::Grid(double length, int points) : L(length), N(points) {
    if (!(std::isfinite(length) && length > 0.0)) throw ContractViolation("Grid: L must be positive");
    if (points < 2 || points % 2 != 0) throw ContractViolation("Grid: N must be even and >= 2");
}

double Grid::kappa(int k) const { return 2.0 * kPi * k / L; }

Field::Field(const Grid& g, std::vector<double> samples) : grid(g), u(std::move(samples)) {
    if (static_cast<int>(u.size()) != g.N) throw ContractViolation("Field: sample count does not match grid");
}

bool Field::all_finite() const {
    return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::fabs(v));
    return m;
}

Field operator+(const Field& a, const Field& b) {
    Field r(a.grid);
    for (int j = 0; j < a.grid.N; ++j) r.u[j] = a.u[j] + b.u[j];
    return r;
}

Field operator-(const Field& a, const Field& b) {
    Field r(a.grid);
    for (int j = 0; j < a.grid.N; ++j) r.u[j] = a.u[j] - b.u[j];
    return r;
}

Field operator*(double s, const Field& a) {
    Field r(a.grid);
    for (int j = 0; j < a.grid.N; ++j) r.u[j] = s * a.u[j];
    return r;
}

Field pointwise(const Field& a, const Field& b) {
    Field r(a.grid);
    for (int j = 0; j < a.grid.N; ++j) r.u[j] = a.u[j] * b.u[j];
    return r;
}

Spectrum forward_samples(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    const auto& p = plans_for(n);
    std::vector<double> in(v);
    Spectrum out(static_cast<std::size_t>(n / 2 + 1));
    fftw_execute_dft_r2c(p.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    const double s = 1.0 / n;
    for (auto& c : out) c *= s;
    return out;
}

std::vector<double> inverse_samples(const Spectrum& s, int M) {
    const auto& p = plans_for(M);
    Spectrum in(static_cast<std::size_t>(M / 2 + 1), cplx(0.0, 0.0));
    const std::size_t n = std::min(in.size(), s.size());
    std::copy(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n), in.begin());
    // imaginary parts of the zero and Nyquist modes are not representable in a real signal
    in[0] = cplx(in[0].real(), 0.0);
    in.back() = cplx(in.back().real(), 0.0);
    std::vector<double> out(static_cast<std::size_t>(M));
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    return out;
}

Spectrum forward(const Field& f) { return forward_samples(f.u); }

Field inverse(const Grid& g, const Spectrum& s) { return Field(g, inverse_samples(s, g.N)); }

Spectrum resize_spectrum(const Spectrum& s, int N_from, int M) {
    Spectrum out(static_cast<std::size_t>(M / 2 + 1), cplx(0.0, 0.0));
    const int keep = std::min(N_from / 2, M / 2);
    for (int k = 0; k < keep; ++k) out[k] = s[k];
    if (N_from == M) out[M / 2] = s[M / 2];
    return out;
}

Spectrum derivative_spectrum(const Grid& g, const Spectrum& s, int order) {
    if (order < 0 || order > 8) throw ContractViolation("derivative: order out of range");
    Spectrum out(s.size());
    const int nyq = g.N / 2;
    for (int k = 0; k < static_cast<int>(s.size()); ++k) {
        const cplx ik(0.0, g.kappa(k));
        cplx m(1.0, 0.0);
        for (int i = 0; i < order; ++i) m *= ik;
        out[k] = m * s[k];
        if (k == nyq && order % 2 == 1) out[k] = 0.0;
    }
    return out;
}

Field derivative(const Field& u, int order) {
    if (order < 0 || order > 6) throw ContractViolation("derivative: order must be in 0..6");
    if (order == 0) return u;
    return inverse(u.grid, derivative_spectrum(u.grid, forward(u), order));
}

double integrate(const Field& u) {
    double s = 0.0;
    for (double v : u.u) s += v;
    return s * u.grid.h();
}

namespace {

double weighted_spectral_sum(const Field& u, double s, bool seminorm) {
    const Spectrum c = forward(u);
    const int N = u.grid.N;
    double acc = 0.0;
    for (int k = 0; k <= N / 2; ++k) {
        if (seminorm && k == 0) continue;
        const double kap = u.grid.kappa(k);
        const double w = seminorm ? std::pow(std::fabs(kap), 2.0 * s) : std::pow(1.0 + kap * kap, s);
        const double mult = (k == 0 || k == N / 2) ? 1.0 : 2.0;
        acc += mult * w * std::norm(c[k]);
    }
    return acc * u.grid.L;
}

}  // namespace

double spectral_energy(const Field& u) { return weighted_spectral_sum(u, 0.0, false); }

double sobolev_norm(const Field& u, double s) { return std::sqrt(weighted_spectral_sum(u, s, false)); }

double sobolev_seminorm(const Field& u, double s) { return std::sqrt(weighted_spectral_sum(u, s, true)); }

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Field band_limited_random(const Grid& g, int kmax, std::uint64_t seed, double amplitude) {
    if (kmax < 1 || 3 * kmax > g.N) throw ContractViolation("band_limited_random: need 1 <= kmax <= N/3");
    Rng rng(seed);
    Spectrum s(static_cast<std::size_t>(g.modes()), cplx(0.0, 0.0));
    const double scale = amplitude / (2.0 * kmax);
    for (int k = 1; k <= kmax; ++k) {
        const double a = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-1.0, 1.0);
        s[k] = scale * cplx(a, b);
    }
    return inverse(g, s);
}

Field localized_random(const Grid& g, int kmax, std::uint64_t seed, double amplitude, double center,
                       double width) {
    Field u = band_limited_random(g, kmax, seed, amplitude);
    for (int j = 0; j < g.N; ++j) {
        const double z = (g.x(j) - center) / width;
        u.u[j] *= std::exp(-z * z);
    }
    return u;
}

double spectral_tail(const Field& u) {
    const Spectrum c = forward(u);
    double peak = 0.0, tail = 0.0;
    const int cut = static_cast<int>(0.45 * u.grid.N);
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
        const double a = std::abs(c[k]);
        peak = std::max(peak, a);
        if (k > cut) tail = std::max(tail, a);
    }
    return peak > 0.0 ? tail / peak : 0.0;
}

void write_field_binary(const std::string& path, const Field& u, double t) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out.write(reinterpret_cast<const char*>(u.u.data()),
                  static_cast<std::streamsize>(u.u.size() * sizeof(double)));
    }
    nlohmann::ordered_json side;
    side["L"] = u.grid.L;
    side["N"] = u.grid.N;
    side["t"] = t;
    side["dtype"] = "float64-le";
    std::ofstream js(path + ".json");
    js << side.dump(2) << "\n";
}

Field read_field_binary(const std::string& path, double* t) {
    std::ifstream js(path + ".json");
    if (!js) throw std::runtime_error("missing sidecar for " + path);
    nlohmann::json side = nlohmann::json::parse(js);
    Grid g(side.at("L").get<double>(), side.at("N").get<int>());
    if (t) *t = side.at("t").get<double>();
    Field f(g);
    std::ifstream in(path, std::ios::binary);
    in.read(reinterpret_cast<char*>(f.u.data()), static_cast<std::streamsize>(f.u.size() * sizeof(double)));
    if (!in) throw std::runtime_error("short read from " + path);
    return f;
}

void write_field_csv(const std::string& path, const Field& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "x,u\n";
    for (int j = 0; j < u.grid.N; ++j) out << u.grid.x(j) << "," << u.u[j] << "\n";
}

}  // namespace kdv5
