#include "wavekin/sim.hpp"

#include "wavekin/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace wavekin {

CoupledStepper::CoupledStepper(const RegularizationKernel& k, SystemState& state, double dt,
                               double coupling_scale)
    : k_(k), s_(state), dt_(dt), coupling_(coupling_scale),
      source_(state.field.n(), state.field.halfwidth()),
      psi_begin_(state.field.n(), state.field.halfwidth()) {
    assert_cfl(dt, state.field.spacing());
}

void CoupledStepper::half_kick(const ScalarGrid& source) {
    WaveField& f = s_.field;
    ParticleEnsemble& e = s_.particles;
    const int n = f.n();
    const double hdt = 0.5 * dt_;
    parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii) + 1;
            for (int j = 1; j < n - 1; ++j)
                for (int kk = 1; kk < n - 1; ++kk)
                    f.pi.at(i, j, kk) +=
                        hdt * (f.psi.laplacian_at(i, j, kk) - source.at(i, j, kk));
        }
    });
    parallel_for(e.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            e.p[i] += (hdt * coupling_) * force(k_, f, e.q[i]);
    });
}

void CoupledStepper::step() {
    WaveField& f = s_.field;
    ParticleEnsemble& e = s_.particles;
    if (!have_source_) {
        smeared_density(k_, e, source_);
        have_source_ = true;
    }
    psi_begin_ = f.psi;
    half_kick(source_);
    // drift
    const int n = f.n();
    parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii) + 1;
            for (int j = 1; j < n - 1; ++j)
                for (int kk = 1; kk < n - 1; ++kk) f.psi.at(i, j, kk) += dt_ * f.pi.at(i, j, kk);
        }
    });
    parallel_for(e.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) e.q[i] += dt_ * velocity(e.p[i]);
    });
    smeared_density(k_, e, source_);
    half_kick(source_);
    f.time += dt_;
}

RunResult run_coupled(const RegularizationKernel& k, SystemState& state,
                      const RunOptions& opt) {
    RunResult out;
    const int steps = static_cast<int>(std::llround(opt.T / opt.dt));
    if (std::abs(steps * opt.dt - opt.T) > 1e-9 * std::max(1.0, opt.T))
        throw std::invalid_argument("run_coupled: T must be an integer multiple of dt");

    RunRecord& rec = out.record;
    rec.dt = opt.dt;
    rec.grid_n = state.field.n();
    rec.halfwidth = state.field.halfwidth();
    rec.tail = state.field.analytic_tail;
    rec.tail_mass = state.field.tail_mass;
    rec.weights = state.particles.w;

    const std::size_t n_tracers = opt.tracers.size();
    std::vector<Phase> tracers = opt.tracers;
    out.tracer_steps = static_cast<std::size_t>(steps) + 1;
    out.tracer_paths_flat.resize(n_tracers * out.tracer_steps);

    CoupledStepper stepper(k, state, opt.dt, opt.coupling_scale);

    auto record_step = [&](int s) {
        rec.times.push_back(state.field.time);
        if (opt.record_particles) {
            rec.positions.push_back(state.particles.q);
            rec.momenta.push_back(state.particles.p);
        }
        if (opt.record_fields && s % opt.field_snapshot_stride == 0) {
            rec.snapshot_steps.push_back(s);
            rec.psi_snaps.push_back(state.field.psi);
            rec.pi_snaps.push_back(state.field.pi);
        }
        for (std::size_t t = 0; t < n_tracers; ++t)
            out.tracer_paths_flat[t * out.tracer_steps + s] = tracers[t];
    };

    auto sample_diag = [&](int s) {
        if (opt.diagnostics_stride <= 0) return;
        if (s % opt.diagnostics_stride != 0 && s != steps) return;
        DiagnosticsRecord d = functionals(k, state);
        if (opt.assert_speed_bound_E0) {
            const double bound =
                speed_bound(state.particles.size(), *opt.assert_speed_bound_E0,
                            opt.ground_energy);
            if (d.max_speed > bound * (1.0 + 1e-6) + 1e-12) {
                d.bounds_ok = false;
                out.speed_bound_violated = true;
            }
        }
        out.diagnostics.push_back(d);
        if (opt.on_diagnostics) opt.on_diagnostics(d);
    };

    record_step(0);
    sample_diag(0);
    for (int s = 1; s <= steps; ++s) {
        stepper.step();
        // tracers see the time-centered field pair of the step just taken
        if (n_tracers) {
            WaveField begin(state.field.n(), state.field.halfwidth());
            begin.psi = stepper.psi_begin();
            ParticleEnsemble te;
            for (auto& tr : tracers) te.add(tr.q, tr.p, 0.0);
            push_step(k, begin, state.field, te, opt.dt);
            for (std::size_t t = 0; t < n_tracers; ++t) tracers[t] = {te.q[t], te.p[t]};
        }
        record_step(s);
        sample_diag(s);
    }
    return out;
}

} // namespace wavekin
