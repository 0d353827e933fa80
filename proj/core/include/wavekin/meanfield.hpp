#pragma once

#include "wavekin/field.hpp"
#include "wavekin/kernel.hpp"
#include "wavekin/measures.hpp"
#include "wavekin/sim.hpp"

#include <optional>
#include <vector>

namespace wavekin {

/// A sampled curve in the measure-field phase space: measure and field
/// snapshots on a uniform time grid (a stride multiple of the fine step).
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<WeightedPointMeasure> measures;
    std::vector<ScalarGrid> psi;
    std::vector<ScalarGrid> pi;
    double dt = 0.0; // fine integration step
    int grid_n = 0;
    double halfwidth = 0.0;
    bool tail = false;
    double tail_mass = 0.0;
    bool truncation_activated = false;

    std::size_t samples() const { return times.size(); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    int stride_steps() const {
        return times.size() > 1 ? static_cast<int>(std::llround((times[1] - times[0]) / dt)) : 1;
    }
};

/// Builds a trajectory from a coupled run (fields must have been recorded).
TrajectoryRecord trajectory_from_run(const RunRecord& rec, int sample_stride);

/// Test-particle transport by the stored field trajectory: the same
/// kick-drift-kick integrator as the coupled push, against fields linearly
/// interpolated in time between snapshots. t_from and t_to must lie on the
/// fine step grid; backward transport (t_to < t_from) reverses the steps.
Phase characteristics_flow(const RegularizationKernel& k, const TrajectoryRecord& traj,
                           const Phase& z0, double t_from, double t_to);

/// det of the 6x6 Jacobian of z -> characteristics_flow(z) by central
/// differences; equals 1 for the exact flow.
double flow_jacobian_check(const RegularizationKernel& k, const TrajectoryRecord& traj,
                           const Phase& z0, double t, double fd_step = 1e-4);

struct ApplyFOptions {
    /// H1dot cap of the psi-truncation; disabled when absent.
    std::optional<double> psi_cap;
};

/// One application of the fixed-point map: the measure component is the
/// pushforward of mu0 under the characteristics of the trial's fields, the
/// field component is the wave evolution from zeta0 driven by the trial's
/// measures. Output lives on the trial's time grid.
TrajectoryRecord apply_F(const RegularizationKernel& k, const TrajectoryRecord& trial,
                         const WeightedPointMeasure& mu0, const WaveField& zeta0,
                         const ApplyFOptions& opt = {});

/// Free evolution of the initial data (zero trial): free-streaming measure,
/// source-free wave evolution.
TrajectoryRecord free_evolution(const RegularizationKernel& k,
                                const WeightedPointMeasure& mu0, const WaveField& zeta0,
                                double T, double dt, int sample_stride);

/// sup_t e^{-w t} ( kr(mu_a, mu_b) + ||dpsi||_H1dot + ||dpi||_L2 ) over the
/// common sample times.
double weighted_supnorm(const TrajectoryRecord& a, const TrajectoryRecord& b, double w,
                        const DistanceOptions& dopt = {});

struct PicardLog {
    std::vector<double> gaps;   // ||X_{k+1} - X_k||_w
    std::vector<double> ratios; // gaps[k+1]/gaps[k]
    double w = 0.0;
    bool contraction = true;    // all ratios < 1
    bool truncation_activated = false;
};

/// Picard iteration of apply_F from the free-evolution seed.
PicardLog picard_iterate(const RegularizationKernel& k, const WeightedPointMeasure& mu0,
                         const WaveField& zeta0, double w, double T, double dt,
                         int sample_stride, int iterations,
                         const ApplyFOptions& opt = {},
                         std::vector<TrajectoryRecord>* keep_iterates = nullptr);

/// Lipschitz constant of the particle flow from the field bound:
/// (1/sqrt2)(2 + max{wl, 1/wl}) e^{wl |t - t'|} with wl = sqrt(C_rho C_psi).
double flow_lipschitz_bound(double c_rho, double c_psi, double t_span);

/// The weight threshold 2*wbar with wbar = sqrt(C_rho * sqrt(4 + 4E - 8E_perp)).
double picard_weight_threshold(double c_rho, double energy, double ground_energy);

} // namespace wavekin
