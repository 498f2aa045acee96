// kdv5lab: command-line front end.  Exit status 0 only when every pass flag of the run is set,
// 1 when a check fails, 2 on bad input.

#include "kdv5/config.hpp"
#include "kdv5/cutoffs.hpp"
#include "kdv5/errors.hpp"
#include "kdv5/experiments.hpp"
#include "kdv5/identities.hpp"
#include "kdv5/manifest.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace kdv5;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string out_file(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void emit(const std::string& dir, const std::string& name, const std::string& text, RunManifest& m) {
    write_atomic(out_file(dir, name), text);
    m.outputs[name] = sha256_hex(text);
}

int finish(const std::string& dir, RunManifest& m) {
    m.pass = !m.checks.empty();
    for (const auto& [k, v] : m.checks) m.pass = m.pass && v;
    write_atomic(out_file(dir, "manifest.json"), m.to_json());
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << m.command << ": " << (m.pass ? "PASS" : "FAIL") << "\n";
    for (const auto& [k, v] : m.checks)
        if (!v) std::cout << "  failed: " << k << "\n";
    return m.pass ? 0 : 1;
}

int run_config(const std::string& command, const std::string& config, const std::string& dir,
               std::optional<ExperimentKind> kind) {
    ExperimentConfig cfg = load_config(config);
    if (kind) cfg.experiment = *kind;
    RunManifest m;
    m.command = command;
    m.config_digest = sha256_hex(config_to_json(cfg));
    m.seed = cfg.seed;
    m.convention = to_string(Convention::PlusUUxxx);
    m.tolerances = {{"data_tail_limit", kDataTailLimit},
                    {"edge_tolerance", SupportPolicy{}.edge_tolerance},
                    {"stability_envelope", kStabilityEnvelope},
                    {"rough_gap_factor", kRoughGapFactor},
                    {"dt_safety", cfg.dt_safety}};
    Field final_state(cfg.grid);
    const EnergyReport r = run_experiment(cfg, &final_state);
    emit(dir, "report.csv", report_csv(r), m);
    if (cfg.experiment == ExperimentKind::Simulate && r.checks.count("no_blowup") && r.checks.at("no_blowup")) {
        const std::string bin = out_file(dir, "final.bin");
        write_field_binary(bin, final_state, cfg.solver.t_end);
        m.outputs["final.bin"] = file_sha256(bin);
        m.outputs["final.bin.json"] = file_sha256(bin + ".json");
    }
    m.checks = r.checks;
    m.summary = r.summary;
    m.warnings = r.warnings;
    return finish(dir, m);
}

int check_cutoffs(const std::vector<double>& eps, const std::vector<double>& bs, const std::vector<int>& ns,
                  int resolution, const std::string& dir) {
    RunManifest m;
    m.command = "check-cutoffs";
    m.tolerances = {{"margin", SupConstantReport{}.margin}, {"resolution", static_cast<double>(resolution)}};
    std::vector<SupConstantReport> all;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double b = bs.size() == 1 ? bs[0] : bs.at(i);
        auto add = [&](const CutoffSpec& s) {
            for (auto& r : certify_inequalities(s, resolution)) {
                m.checks[s.label() + ":" + to_string(r.id)] = r.pass;
                all.push_back(std::move(r));
            }
        };
        add(CutoffSpec::plain(eps[i], b));
        for (int n : ns) add(CutoffSpec::weighted(n, eps[i], b));
    }
    emit(dir, "cutoffs.json", reports_to_json(all) + "\n", m);
    return finish(dir, m);
}

int check_identities(int N, int seeds, int threads, const std::string& dir) {
    RunManifest m;
    m.command = "check-identities";
    m.tolerances = {{"rel_tol", kIdentityRelTol}, {"abs_floor", kIdentityAbsFloor}, {"refinement_factor", kRefinementFactor}};
    std::vector<std::uint64_t> ids;
    for (int s = 1; s <= seeds; ++s) ids.push_back(static_cast<std::uint64_t>(s));
    m.seed = 1;

    const auto cal = calibrate_convention(N, std::min(seeds, 5));
    m.convention = cal.passing ? to_string(*cal.passing) : "none";
    m.checks["convention_calibrated"] = cal.passing.has_value();
    m.summary["calibration_worst_plus"] = cal.worst_plus;
    m.summary["calibration_worst_minus"] = cal.worst_minus;

    const auto rows = identity_suite(N, ids, threads);
    std::string csv = "id,seed,scale,abs_residual,rel_residual,convention\n";
    bool all_pass = true;
    double worst = 0.0;
    for (const auto& r : rows) {
        csv += r.id + "," + std::to_string(r.seed) + "," + fmt17(r.scale) + "," + fmt17(r.abs_residual) + "," +
               fmt17(r.rel_residual) + "," + r.convention + "\n";
        all_pass = all_pass && r.pass;
        worst = std::max(worst, r.rel_residual);
    }
    emit(dir, "identities.csv", csv, m);
    m.checks["residuals"] = all_pass;
    m.summary["worst_rel_residual"] = worst;

    const auto ref = identity_refinement(N / 2, std::vector<std::uint64_t>(ids.begin(), ids.begin() + std::min<std::size_t>(ids.size(), 3)));
    std::string rcsv = "id,seed,coarse_abs_residual,fine_abs_residual\n";
    bool ref_pass = true;
    for (const auto& r : ref) {
        rcsv += r.id + "," + std::to_string(r.seed) + "," + fmt17(r.coarse) + "," + fmt17(r.fine) + "\n";
        ref_pass = ref_pass && r.pass;
    }
    emit(dir, "refinement.csv", rcsv, m);
    m.checks["refinement"] = ref_pass;
    return finish(dir, m);
}

// Long-format merge: run,t,functional_id,value with run = name of the directory holding the CSV.
int merge_reports(const std::vector<std::string>& inputs, const std::string& out) {
    std::string merged = "run,t,functional_id,value\n";
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read " + path);
        const fs::path p(path);
        const std::string run = p.has_parent_path() ? p.parent_path().filename().string() : p.stem().string();
        std::string line;
        if (!std::getline(in, line) || line != "t,functional_id,value") throw ConfigError(path + ": not a report CSV");
        while (std::getline(in, line))
            if (!line.empty()) merged += run + "," + line + "\n";
    }
    write_atomic(out, merged);
    std::cout << "report: " << inputs.size() << " files -> " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kdv5lab: fifth-order KdV energy-method laboratory"};
    app.require_subcommand(1);

    std::string config, out = ".";
    auto config_cmd = [&](const std::string& name, const std::string& help) {
        auto* c = app.add_subcommand(name, help);
        c->add_option("-c,--config", config, "configuration file")->required()->check(CLI::ExistingFile);
        c->add_option("-o,--out", out, "output directory");
        return c;
    };
    auto* sim = config_cmd("simulate", "integrate and record the configured functionals and the final field");
    auto* prop = config_cmd("propagation", "right-windowed energies, smoothing integral and global norm");
    auto* dec = config_cmd("decay", "x^n-weighted energies and their smoothing accumulator");
    auto* boot = config_cmd("bootstrap", "functional cascade of the bootstrap schedule");

    std::vector<double> eps{0.5, 1.0, 1.0}, bs{1.0, 1.0, 2.0};
    std::vector<int> ns{1, 2, 3, 5};
    int resolution = 10000;
    auto* cut = app.add_subcommand("check-cutoffs", "certify the cutoff inequalities by grid scan");
    cut->add_option("--eps", eps, "ramp starts")->expected(1, -1);
    cut->add_option("--b", bs, "ramp widths (one, or one per eps)")->expected(1, -1);
    cut->add_option("--n", ns, "weight exponents")->expected(0, -1);
    cut->add_option("--resolution", resolution, "points per unit length");
    cut->add_option("-o,--out", out, "output directory");

    int N = 256, seeds = 20, threads = 1;
    auto* ids = app.add_subcommand("check-identities", "residuals of the integral identities on random fields");
    ids->add_option("--N", N, "grid points")->check(CLI::Range(32, 1 << 16));
    ids->add_option("--seeds", seeds, "number of seeds")->check(CLI::Range(1, 10000));
    ids->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
    ids->add_option("-o,--out", out, "output directory");

    std::vector<std::string> inputs;
    std::string merged = "merged.csv";
    auto* rep = app.add_subcommand("report", "merge report CSVs into one long-format CSV");
    rep->add_option("inputs", inputs, "report.csv files")->required()->check(CLI::ExistingFile);
    rep->add_option("-o,--out", merged, "merged CSV path");

    CLI11_PARSE(app, argc, argv);
    try {
        if (!rep->parsed()) fs::create_directories(out);
        if (sim->parsed()) return run_config("simulate", config, out, ExperimentKind::Simulate);
        if (prop->parsed()) return run_config("propagation", config, out, ExperimentKind::Propagation);
        if (dec->parsed()) return run_config("decay", config, out, ExperimentKind::Decay);
        if (boot->parsed()) return run_config("bootstrap", config, out, ExperimentKind::Bootstrap);
        if (cut->parsed()) {
            if (bs.size() != 1 && bs.size() != eps.size()) throw ConfigError("--b needs one value or one per --eps");
            return check_cutoffs(eps, bs, ns, resolution, out);
        }
        if (ids->parsed()) return check_identities(N, seeds, threads, out);
        if (rep->parsed()) return merge_reports(inputs, merged);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ContractViolation& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
