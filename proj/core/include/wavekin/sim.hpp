#pragma once

#include "wavekin/conservation.hpp"
#include "wavekin/field.hpp"
#include "wavekin/kernel.hpp"
#include "wavekin/particles.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace wavekin {

/// Strang-split kick-drift-kick step of the coupled system. The kick updates
/// (pi, p) from (psi, q); the drift updates (psi, q) from (pi, p). Both halves
/// are exact gradients of the split discrete Hamiltonian, so the energy drift
/// stays bounded and oscillatory.
class CoupledStepper {
  public:
    CoupledStepper(const RegularizationKernel& k, SystemState& state, double dt,
                   double coupling_scale = 1.0);

    void step();

    /// Fields at the beginning/end of the last step, for time-centered pushes
    /// of passive tracers.
    const ScalarGrid& psi_begin() const { return psi_begin_; }

    double dt() const { return dt_; }

  private:
    const RegularizationKernel& k_;
    SystemState& s_;
    double dt_;
    double coupling_;
    ScalarGrid source_;
    ScalarGrid psi_begin_;
    bool have_source_ = false;

    void half_kick(const ScalarGrid& source);
};

/// Per-step record of a full run: particle phase points and field grids.
/// Snapshots are kept at a configurable stride; positions of every particle
/// are kept at every step (they are the retarded source for the Kirchhoff
/// evaluator and the base data for sensitivity runs).
struct RunRecord {
    std::vector<double> times;                   // every step boundary
    std::vector<std::vector<Vec3>> positions;    // per step boundary
    std::vector<std::vector<Vec3>> momenta;      // per step boundary
    std::vector<double> weights;
    std::vector<int> snapshot_steps;             // indices with stored fields
    std::vector<ScalarGrid> psi_snaps;
    std::vector<ScalarGrid> pi_snaps;
    double dt = 0.0;
    int grid_n = 0;
    double halfwidth = 0.0;
    bool tail = false;
    double tail_mass = 0.0;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

struct RunOptions {
    double dt = 0.05;
    double T = 1.0;
    int field_snapshot_stride = 1; // store fields every k steps
    bool record_fields = true;
    bool record_particles = true;
    double coupling_scale = 1.0;
    // optional passive tracers pushed by the fields but never sourcing them
    std::vector<Phase> tracers;
    // diagnostics sampling stride; 0 = no diagnostics
    int diagnostics_stride = 0;
    std::function<void(const DiagnosticsRecord&)> on_diagnostics;
    // when set, assert the speed bound with these conserved values
    std::optional<double> assert_speed_bound_E0;
    double ground_energy = 0.0;
};

struct RunResult {
    RunRecord record;
    std::vector<Phase> tracer_paths_flat; // tracer-major: [tracer][step]
    std::size_t tracer_steps = 0;
    std::vector<DiagnosticsRecord> diagnostics;
    bool speed_bound_violated = false;

    Phase tracer_at(std::size_t tracer, std::size_t step) const {
        return tracer_paths_flat[tracer * tracer_steps + step];
    }
};

/// Runs the coupled system from the given state (mutated in place).
RunResult run_coupled(const RegularizationKernel& k, SystemState& state,
                      const RunOptions& opt);

} // namespace wavekin
