#pragma once

#include "kdv5/models.hpp"
#include "kdv5/spectral.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace kdv5 {

enum class Scheme { ETDRK4, IFRK4 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverConfig {
    double dt = 1e-4;
    double t_end = 0.1;
    Scheme scheme = Scheme::ETDRK4;
    Dealias dealias = Dealias::TwoThirds;
    int stride = 1;            // steps between observer calls / snapshots
    double seam_margin = 0.0;  // width next to x = 0 and x = L expected to stay empty

    /// Number of steps; throws ContractViolation unless t_end/dt is an integer multiple of stride.
    long steps() const;
};

struct Snapshot {
    double t = 0.0;
    Field u;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<std::string> warnings;
    Field final_state;
    double final_time = 0.0;
};

using Observer = std::function<void(double t, const Field& u)>;

/// u_hat_k(t) = exp(t lambda(k)) u_hat_k(0).
Field linear_exact(const Field& u0, double t, double a5, double a3, double a1);

/// phi_1, phi_2, phi_3 of z. Taylor series below |z| = kPhiSeriesRadius, recurrence from e^z above.
std::array<cplx, 3> phi123(cplx z);
inline constexpr double kPhiSeriesRadius = 0.5;
inline constexpr int kPhiSeriesTerms = 20;

/// Precomputed coefficients for one model, grid and step size.
class Stepper {
public:
    Stepper(const Model& m, const Grid& g, double dt, Scheme scheme, Dealias dealias);
    Spectrum step(const Spectrum& uh) const;
    const Grid& grid() const { return grid_; }

private:
    Spectrum N(const Spectrum& v) const;
    Model model_;
    Grid grid_;
    double dt_;
    Scheme scheme_;
    Dealias dealias_;
    std::vector<cplx> E_, E2_, Q_, f1_, f2_, f3_;
};

/// One step of size cfg.dt.
Field step(const Field& u, const Model& m, const SolverConfig& cfg);

/// Integrates from t = 0 to cfg.t_end; observers run at t = 0 and every stride.
/// Throws BlowUpError on non-finite state.
Trajectory simulate(const Model& m, const Field& u0, const SolverConfig& cfg,
                    const std::vector<Observer>& observers = {}, bool keep_snapshots = true);

/// Effective stiffness of the nonlinear terms at u: sum |c| max_i kappa_cut^{o_i} prod_{j != i} max|d^{o_j} u|.
double nonlinear_stiffness(const Model& m, const Field& u, Dealias d);
/// dt * stiffness above this is outside the RK4 imaginary-axis stability interval.
inline constexpr double kStabilityEnvelope = 2.8;

/// u(x) -> u(-x) on the grid.
Field reflect(const Field& u);

}  // namespace kdv5
