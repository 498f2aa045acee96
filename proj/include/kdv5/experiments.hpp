#pragma once

#include "kdv5/functionals.hpp"
#include "kdv5/models.hpp"
#include "kdv5/solver.hpp"
#include "kdv5/spectral.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kdv5 {

/// Degree of the nu-polynomial in the propagation constants: 1,1,2,2,4,8 for l = 1..6, then 8(l-5).
int nu_degree(int l);

struct BootstrapSchedule {
    int n = 0;
    std::vector<std::pair<int, int>> pairs;  // (l_k, n_k) = (2k, n-k), k = 0..n
    int final_l = 0;                         // 2n + 1
};
BootstrapSchedule bootstrap_schedule(int n);

/// Initial data recipe.  Parameters by id (defaults in brackets):
///   soliton:                 c [1], x0 [L/2]            3c sech^2(sqrt(c)(x-x0)/2)
///   gaussian:                amplitude [1], center [L/2], width [2]
///   smooth_right_rough_left: l_break [3], x0 [L/2], base_amplitude [0.05], base_center [x0+4],
///                            base_width [2], rough_amplitude [0.02], k_rough [16], taper [2]
///   one_sided_decay:         <x>^{-(n+1)/2-0.1} cos(kappa x), x from origin; n [2], origin [L/2], kappa [2], left [4], right_from [0.6 L/2],
///                            right_to [0.75 L/2]
/// Random phases use the seed argument.
struct DataSpec {
    std::string id = "gaussian";
    std::map<std::string, double> params;
    double get(const std::string& key, double fallback) const;
};

/// Largest relative spectral tail accepted for smooth data.
inline constexpr double kDataTailLimit = 1e-10;

/// Throws ContractViolation for unknown ids or unresolved smooth data.
Field build_data(const Grid& g, const DataSpec& d, std::uint64_t seed);

/// Extra functional requested in a configuration.
struct FunctionalSpec {
    std::string kind = "energy";  // energy, smoothing, corrected, cubic_decay, xweighted
    int l = 0;
    int n = 0;
    double eps = 1.0;
    double b = 1.0;
    double nu = 0.0;
};

/// Window of the propagation theorem: right of x0 + eps - nu t, smoothing over [x0+eps, x0+R] - nu t.
struct WindowSpec {
    double x0 = 20.0;
    double eps = 1.0;
    double b = 1.0;
    double R = 4.0;
    std::vector<double> nu{0.0};
};

enum class ExperimentKind { Simulate, Propagation, Decay, Bootstrap };
std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Propagation;
    Model model;
    Grid grid{40.0, 1024};
    SolverConfig solver;
    DataSpec data;
    std::uint64_t seed = 1;
    std::vector<FunctionalSpec> functionals;
    WindowSpec window;
    int l = 3;            // propagation / decay derivative order
    int n = 2;            // decay weight exponent; bootstrap schedule length
    double dt_safety = 0.5;  // dt = safety * stability limit when solver.dt <= 0

    /// Cutoff ramps of every functional stay inside the window for all t <= t_end.
    void validate() const;
};

/// dt = safety * kStabilityEnvelope / max(stiffness(u0), linear bound), rounded down so that
/// t_end / dt is an integer multiple of stride.
double stable_dt(const Model& m, const Field& u0, const SolverConfig& cfg, double safety);

/// Required ratio of min_t global H^{l+1} to sup_t right-windowed H^l for rough-left data.
inline constexpr double kRoughGapFactor = 1e3;

struct EnergyReport {
    std::string experiment;
    std::vector<FunctionalTracker::Row> rows;  // long format (t, id, value)
    std::map<std::string, double> summary;     // named scalars
    std::map<std::string, bool> checks;        // pass flags
    std::vector<std::string> warnings;
    bool pass = false;
};

/// Right-windowed energies for m = 0..l with ramp at x0 + eps - nu t, the smoothing integral over
/// [x0 + eps, x0 + R] - nu t, and the global discrete H^{l+1} norm, for each nu of the window.
EnergyReport run_propagation(const ExperimentConfig& cfg);
/// int_eps^inf x^n (d^m u)^2 for m = 0..l (x measured from the data origin) and the
/// int_0^t int_0^inf x^{n-1} (d^{l+2} u)^2 accumulator.
EnergyReport run_decay(const ExperimentConfig& cfg);
/// Functionals of bootstrap_schedule(cfg.n) with chi_{n_k}, then the right-windowed energy of order final_l.
EnergyReport run_bootstrap(const ExperimentConfig& cfg);
/// Plain run: energies requested in cfg.functionals only.
EnergyReport run_simulate(const ExperimentConfig& cfg, Field* final_state = nullptr);
EnergyReport run_experiment(const ExperimentConfig& cfg, Field* final_state = nullptr);

/// CSV with header "t,functional_id,value", values printed with 17 significant digits.
std::string report_csv(const EnergyReport& r);
/// sup over t of each functional id.
std::map<std::string, double> series_sup(const EnergyReport& r);

}  // namespace kdv5
