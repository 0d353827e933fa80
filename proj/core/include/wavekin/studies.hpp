#pragma once

#include "wavekin/config.hpp"
#include "wavekin/conservation.hpp"
#include "wavekin/fluctuations.hpp"
#include "wavekin/measures.hpp"
#include "wavekin/sim.hpp"

#include <string>
#include <vector>

namespace wavekin {

/// Builds the initial ensemble described by the config (presets, sampler
/// draws, or file input).
ParticleEnsemble make_initial_ensemble(const RunConfig& c);

struct SimArtifacts {
    std::vector<DiagnosticsRecord> diagnostics;
    std::vector<BoundReport> bound_reports;
    double E0 = 0.0, Eperp = 0.0;
    Vec3 P0, J0;
    bool any_violation = false;
    SystemState final_state;
};

/// Runs the coupled system per the config; writes the run directory
/// (manifest, diagnostics CSV, bound report, final snapshots) when outdir is
/// nonempty.
SimArtifacts run_simulation(const RunConfig& c, const std::string& outdir);

struct LlnRow {
    std::size_t n = 0;
    double time = 0.0;
    int replica = 0;
    double distance = 0.0;
    bool exact = true;
    double gap = 0.0;
};

struct LlnResult {
    std::vector<LlnRow> rows;
    std::vector<double> times;
    std::vector<double> slopes;     // fitted log-log slope per time
    std::vector<bool> monotone;     // mean distance decreasing in N, per time
};

/// Convergence study of the empirical measures against a deterministic
/// quadrature reference; writes distances.csv, slopes.json and a gnuplot
/// script when outdir is nonempty.
LlnResult lln_study(const RunConfig& c, const std::string& outdir);

struct CltResult {
    int dim = 0;
    std::vector<double> Q;        // from the sensitivity route
    std::vector<double> cov_emp;  // Monte Carlo, pooled across the sweep
    std::vector<double> cov_emp_largest; // Monte Carlo at the largest N
    std::vector<double> mean;
    std::vector<double> se;
    bool mean_within_3se = true;
    double frob_rel_err = 0.0;
    std::vector<double> ad_stats; // per coordinate at the largest N
    double energy_pvalue = 0.0;
    std::vector<std::size_t> sweep;
    std::vector<double> cf_discrepancy; // per sweep entry
    std::vector<std::string> probe_descriptions;
};

/// Fluctuation study: Monte Carlo replicas against the mean-field reference,
/// the sensitivity covariance, normality statistics and characteristic
/// function discrepancies; writes fluctuations.csv and summary.json when
/// outdir is nonempty.
CltResult clt_study(const RunConfig& c, const std::string& outdir);

struct ValidationReport {
    std::vector<std::string> failures;
    bool io_error = false;
    bool ok() const { return failures.empty() && !io_error; }
};

/// Replays the property checks on a stored run directory.
ValidationReport validate_run(const std::string& rundir);

/// Creates the output directory (with parents); returns the absolute path.
std::string prepare_output_dir(const std::string& requested, const std::string& stem);

} // namespace wavekin
