#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace kdv5 {

using cplx = std::complex<double>;

/// Uniform periodic grid on [0, L) with N (even) points.
struct Grid {
    double L = 2.0 * 3.14159265358979323846;
    int N = 64;

    Grid() = default;
    Grid(double length, int points);

    double h() const { return L / N; }
    double x(int j) const { return L * j / N; }
    /// Angular wavenumber of mode k.
    double kappa(int k) const;
    int modes() const { return N / 2 + 1; }
    bool operator==(const Grid& o) const { return L == o.L && N == o.N; }
};

/// Half-spectrum (k = 0..N/2) of a real signal, normalised as u_hat_k = (1/N) sum_j u_j e^{-i kappa x_j}.
using Spectrum = std::vector<cplx>;

struct Field {
    Grid grid;
    std::vector<double> u;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), u(static_cast<std::size_t>(g.N), 0.0) {}
    Field(const Grid& g, std::vector<double> samples);

    template <class F>
    static Field sample(const Grid& g, F&& f) {
        Field out(g);
        for (int j = 0; j < g.N; ++j) out.u[j] = f(g.x(j));
        return out;
    }

    int size() const { return grid.N; }
    double operator[](int j) const { return u[j]; }
    double& operator[](int j) { return u[j]; }
    bool all_finite() const;
    double max_abs() const;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
/// Pointwise product (no dealiasing).
Field pointwise(const Field& a, const Field& b);

// -- transforms ------------------------------------------------------------

Spectrum forward(const Field& f);
Field inverse(const Grid& g, const Spectrum& s);
/// Real samples on an M-point grid of a spectrum given with fewer (or more) modes.
std::vector<double> inverse_samples(const Spectrum& s, int M);
Spectrum forward_samples(const std::vector<double>& v);

/// Spectrum of the spectral interpolant resampled to M points (zero padding or truncation).
Spectrum resize_spectrum(const Spectrum& s, int N_from, int M);

// -- calculus --------------------------------------------------------------

/// (i kappa)^order multiplier; Nyquist coefficient zeroed for odd orders.
Spectrum derivative_spectrum(const Grid& g, const Spectrum& s, int order);
Field derivative(const Field& u, int order);

/// h * sum_j u_j.
double integrate(const Field& u);

double spectral_energy(const Field& u);
/// (L * sum_k <kappa>^{2s} |u_hat_k|^2)^{1/2} over all k (both signs).
double sobolev_norm(const Field& u, double s);
/// Same with |kappa|^{2s}; the zero mode is dropped.
double sobolev_seminorm(const Field& u, double s);

// -- random fields ---------------------------------------------------------

/// Uniform [0,1) doubles from std::mt19937_64 using the top 53 bits, so streams match across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    double uniform();
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::mt19937_64 engine_;
};

/// Zero-mean field with modes 1..kmax, coefficients amplitude*(a+ib)/(2 kmax), a,b in [-1,1].
/// Hence max|u| <= sqrt(2) * amplitude.
Field band_limited_random(const Grid& g, int kmax, std::uint64_t seed, double amplitude);

/// band_limited_random times exp(-((x-center)/width)^2).
Field localized_random(const Grid& g, int kmax, std::uint64_t seed, double amplitude, double center,
                       double width);

/// Relative spectral tail: max |u_hat_k| over k > 0.45 N divided by max |u_hat_k|.
double spectral_tail(const Field& u);

// -- persistence -----------------------------------------------------------

void write_field_binary(const std::string& path, const Field& u, double t);
Field read_field_binary(const std::string& path, double* t = nullptr);
void write_field_csv(const std::string& path, const Field& u);

}  // namespace kdv5
