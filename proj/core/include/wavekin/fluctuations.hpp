#pragma once

#include "wavekin/geometry.hpp"
#include "wavekin/grid.hpp"
#include "wavekin/kernel.hpp"
#include "wavekin/rng.hpp"
#include "wavekin/sim.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wavekin {

/// A smooth compactly-ish supported test element Theta of the field pair,
/// paired with (dpsi, dpi) in the H1dot (+) L2 inner product. The default
/// family consists of Gaussian-bump derivatives:
///   PsiGrad: Theta_psi = d/dx_axis exp(-|x-c|^2/(2 s^2)), Theta_pi = 0
///   Pi:      Theta_pi  = d/dx_axis exp(-|x-c|^2/(2 s^2)), Theta_psi = 0.
struct ProbeField {
    enum class Kind { PsiGrad, Pi };
    Kind kind = Kind::PsiGrad;
    Vec3 center;
    double sigma = 0.3;
    int axis = 0;

    /// <Theta, (dpsi, dpi)> = int grad Theta_psi . grad dpsi + int Theta_pi dpi.
    double pair(const ScalarGrid& dpsi, const ScalarGrid& dpi) const;
    std::string describe() const;
};

std::vector<ProbeField> default_probes(double radius);

/// Base data for a linearized run: the nonlinear trajectory with per-step
/// positions/momenta and per-step psi grids (record_fields stride 1), plus
/// an optional passive tracer path appended by the caller.
struct SensitivityBase {
    const RegularizationKernel* kernel = nullptr;
    const RunRecord* rec = nullptr;
    std::vector<Phase> tracer; // reference test particle path, per step
    double coupling_scale = 1.0;
};

/// Inhomogeneity of the linear system: the measure-derivative direction.
/// ExtraParticle = direction delta_{zbar} (the transported extra source);
/// Averaged = direction mu0 (the base smeared density as source), so that
/// the centered direction delta_{zbar} - mu0 is the difference of the two.
struct SensitivityMode {
    enum class Kind { ExtraParticle, Averaged };
    Kind kind = Kind::ExtraParticle;
    Phase zbar;
};

/// First-variation state along the base at one time.
struct SensitivitySnapshot {
    double time = 0.0;
    Phase tracer_dz;
    double max_dq = 0.0; // max over source atoms |D1 q|
    double max_dp = 0.0;
    double dpsi_h1 = 0.0;
    double dpsi_l2 = 0.0;
    double dpi_l2 = 0.0;
    std::vector<double> probe_values; // <Theta_i, (dpsi, dpi)>
};

struct SensitivityResult {
    std::vector<SensitivitySnapshot> snaps; // one per base step
    // grids at requested steps (for oracle comparisons)
    std::vector<int> kept_steps;
    std::vector<ScalarGrid> dpsi_at;
    std::vector<ScalarGrid> dpi_at;
};

struct SensitivityOptions {
    std::vector<ProbeField> probes;
    std::vector<int> keep_grid_steps; // steps at which to keep the grids
    std::vector<int> probe_steps;     // steps at which to pair probes (empty = all)
};

/// Integrates the coupled linear (first-variation) system along the base.
/// The update mirrors the nonlinear kick-drift-kick step term by term, so the
/// output is the exact derivative of the discrete forward map; sensitivities
/// start from zero and the inhomogeneity enters through the source.
SensitivityResult sensitivity_evolve(const SensitivityBase& base, const SensitivityMode& mode,
                                     const SensitivityOptions& opt = {});

/// Verifies the first-variation bound chain along a sensitivity trajectory
/// (uncentered, ExtraParticle direction with |sigma_0| = 1):
///   |D1q_t|    <= int |D1p|
///   |D1p_t|    <= int [ ||grad rho|| ||psi_t'||_H1 |D1q| + ||rho|| ||D1psi||_H1 ]
///   ||D1psi||_H1 <= t^2/2 ||grad rho|| + ||hess rho|| int (t-t') |D1q|
///   ||D1pi||_L2  <= t ||rho|| + t^2/2 ||grad rho|| + int [||grad rho|| + (t-t')||hess rho||] |D1q|
///   ||D1psi||_L2 <= t^2/2 ||rho|| + ||grad rho|| int (t-t') |D1q|
struct SensitivityBoundsReport {
    struct Row {
        std::string name;
        double lhs, rhs;
        bool ok;
    };
    std::vector<Row> rows;
    bool all_ok = true;
};

SensitivityBoundsReport sensitivity_bounds_check(const RegularizationKernel& k,
                                                 const SensitivityResult& s,
                                                 const std::vector<double>& base_psi_h1);

/// The fluctuation observable vector Y(zbar): tracer D1z at the probe times
/// followed by the probe pairings at the probe times.
struct ObservableLayout {
    std::vector<int> probe_steps; // step indices of the probe times
    int n_probes = 0;
    int dim() const { return static_cast<int>(probe_steps.size()) * (6 + n_probes); }
};

std::vector<double> observable_vector(const SensitivityResult& s, const ObservableLayout& lay);

/// Q = Cov_{zbar ~ mu0}[ Y(zbar) ] via the mu0 quadrature nodes; runs one
/// linear system per node (parallel across nodes).
struct CovarianceResult {
    std::vector<double> Q; // dim x dim row-major
    int dim = 0;
    std::vector<double> mean_Y;
};

CovarianceResult covariance_Q(const SensitivityBase& base,
                              const std::vector<Phase>& zbar_nodes,
                              const std::vector<double>& zbar_weights,
                              const ObservableLayout& lay, const SensitivityOptions& opt);

} // namespace wavekin
