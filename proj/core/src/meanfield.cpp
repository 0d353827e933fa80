#include "wavekin/meanfield.hpp"

#include "wavekin/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavekin {

namespace {

/// Linear-in-time field lookup between snapshots; exact at snapshot times.
struct FieldLerp {
    const TrajectoryRecord& traj;

    void locate(double t, std::size_t& k, double& theta) const {
        const double t0 = traj.times.front();
        const double dt_s = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 1.0;
        double s = (t - t0) / dt_s;
        k = static_cast<std::size_t>(std::floor(s + 1e-9));
        if (k >= traj.samples() - 1) k = traj.samples() - 2;
        theta = s - k;
        if (theta < 0.0) theta = 0.0;
        if (theta > 1.0) theta = 1.0;
    }

    /// Force on a test particle from the interpolated field; linear in the
    /// grid, so the lerp commutes with the convolution.
    Vec3 force_at(const RegularizationKernel& kern, const Vec3& q, double t) const {
        std::size_t k;
        double theta;
        locate(t, k, theta);
        const Vec3 fa = kern.convolve_gradrho_collocated(traj.psi[k], q);
        if (theta == 0.0) return fa;
        const Vec3 fb = kern.convolve_gradrho_collocated(traj.psi[k + 1], q);
        return (1.0 - theta) * fa + theta * fb;
    }
};

} // namespace

TrajectoryRecord trajectory_from_run(const RunRecord& rec, int sample_stride) {
    TrajectoryRecord t;
    t.dt = rec.dt;
    t.grid_n = rec.grid_n;
    t.halfwidth = rec.halfwidth;
    t.tail = rec.tail;
    t.tail_mass = rec.tail_mass;
    if (rec.snapshot_steps.empty())
        throw std::invalid_argument("trajectory_from_run: run has no field snapshots");
    const int rec_stride = rec.snapshot_steps.size() > 1
                               ? rec.snapshot_steps[1] - rec.snapshot_steps[0]
                               : 1;
    if (sample_stride % rec_stride != 0)
        throw std::invalid_argument("trajectory_from_run: stride not a multiple of recording");
    for (std::size_t si = 0; si < rec.snapshot_steps.size(); ++si) {
        const int step = rec.snapshot_steps[si];
        if (step % sample_stride != 0) continue;
        t.times.push_back(rec.times[step]);
        t.psi.push_back(rec.psi_snaps[si]);
        t.pi.push_back(rec.pi_snaps[si]);
        WeightedPointMeasure m;
        for (std::size_t i = 0; i < rec.weights.size(); ++i)
            m.add({rec.positions[step][i], rec.momenta[step][i]}, rec.weights[i]);
        t.measures.push_back(std::move(m));
    }
    return t;
}

Phase characteristics_flow(const RegularizationKernel& k, const TrajectoryRecord& traj,
                           const Phase& z0, double t_from, double t_to) {
    const double dt = traj.dt;
    const double span = t_to - t_from;
    const int steps = static_cast<int>(std::llround(std::abs(span) / dt));
    if (std::abs(std::abs(span) - steps * dt) > 1e-9 * std::max(1.0, std::abs(span)))
        throw std::invalid_argument("characteristics_flow: times must lie on the step grid");
    if (t_from < traj.times.front() - 1e-9 || t_to > traj.times.back() + 1e-9 ||
        t_to < traj.times.front() - 1e-9 || t_from > traj.times.back() + 1e-9)
        throw std::out_of_range("characteristics_flow: field trajectory does not cover the span");

    FieldLerp lerp{traj};
    const double sdt = (span >= 0) ? dt : -dt;
    Phase z = z0;
    double t = t_from;
    for (int s = 0; s < steps; ++s) {
        z.p += 0.5 * sdt * lerp.force_at(k, z.q, t);
        z.q += sdt * velocity(z.p);
        t += sdt;
        z.p += 0.5 * sdt * lerp.force_at(k, z.q, t);
    }
    return z;
}

double flow_jacobian_check(const RegularizationKernel& k, const TrajectoryRecord& traj,
                           const Phase& z0, double t, double fd_step) {
    std::vector<double> J(36);
    for (int c = 0; c < 6; ++c) {
        Phase zp = z0, zm = z0;
        double* p_plus = (c < 3) ? &zp.q.x : &zp.p.x;
        double* p_minus = (c < 3) ? &zm.q.x : &zm.p.x;
        p_plus[c % 3] += fd_step;
        p_minus[c % 3] -= fd_step;
        const Phase fp = characteristics_flow(k, traj, zp, traj.times.front(), t);
        const Phase fm = characteristics_flow(k, traj, zm, traj.times.front(), t);
        const Phase d = (1.0 / (2.0 * fd_step)) * (fp - fm);
        J[0 * 6 + c] = d.q.x;
        J[1 * 6 + c] = d.q.y;
        J[2 * 6 + c] = d.q.z;
        J[3 * 6 + c] = d.p.x;
        J[4 * 6 + c] = d.p.y;
        J[5 * 6 + c] = d.p.z;
    }
    return small_det(std::move(J), 6);
}

TrajectoryRecord apply_F(const RegularizationKernel& k, const TrajectoryRecord& trial,
                         const WeightedPointMeasure& mu0, const WaveField& zeta0,
                         const ApplyFOptions& opt) {
    TrajectoryRecord out;
    out.times = trial.times;
    out.dt = trial.dt;
    out.grid_n = trial.grid_n;
    out.halfwidth = trial.halfwidth;
    out.tail = zeta0.analytic_tail;
    out.tail_mass = zeta0.tail_mass;

    const double t0 = trial.times.front();
    const std::size_t n_samples = trial.samples();
    const int stride = trial.stride_steps();
    const double dt = trial.dt;

    // ---- measure half: pushforward of mu0 along the trial's fields
    out.measures.assign(n_samples, WeightedPointMeasure{});
    {
        std::vector<std::vector<Phase>> paths(mu0.size(),
                                              std::vector<Phase>(n_samples));
        FieldLerp lerp{trial};
        parallel_for(mu0.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                Phase z = mu0.points[i];
                paths[i][0] = z;
                double t = t0;
                for (std::size_t s = 1; s < n_samples; ++s) {
                    for (int u = 0; u < stride; ++u) {
                        z.p += 0.5 * dt * lerp.force_at(k, z.q, t);
                        z.q += dt * velocity(z.p);
                        t += dt;
                        z.p += 0.5 * dt * lerp.force_at(k, z.q, t);
                    }
                    paths[i][s] = z;
                }
            }
        });
        for (std::size_t s = 0; s < n_samples; ++s) {
            out.measures[s].weights = mu0.weights;
            out.measures[s].points.resize(mu0.size());
            for (std::size_t i = 0; i < mu0.size(); ++i)
                out.measures[s].points[i] = paths[i][s];
        }
    }

    // ---- field half: wave evolution driven by the trial's measures
    {
        // density grids at the trial snapshots, linearly interpolated between
        std::vector<ScalarGrid> dens(n_samples);
        parallel_for(n_samples, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t s = lo; s < hi; ++s) {
                ParticleEnsemble es;
                const auto& m = trial.measures[s];
                for (std::size_t i = 0; i < m.size(); ++i)
                    es.add(m.points[i].q, m.points[i].p, m.weights[i]);
                dens[s] = ScalarGrid(trial.grid_n, trial.halfwidth);
                smeared_density(k, es, dens[s]);
            }
        });
        auto source_at = [&](double t, ScalarGrid& buf) {
            const double dt_s = trial.times.size() > 1 ? trial.times[1] - trial.times[0] : 1.0;
            double s = (t - t0) / dt_s;
            std::size_t kk = static_cast<std::size_t>(std::floor(s + 1e-9));
            if (kk >= n_samples - 1) kk = n_samples - 2;
            double theta = std::clamp(s - kk, 0.0, 1.0);
            buf = dens[kk];
            if (theta > 0.0) {
                buf *= (1.0 - theta);
                ScalarGrid b2 = dens[kk + 1];
                b2 *= theta;
                buf += b2;
            }
        };

        WaveField f = zeta0;
        out.psi.push_back(f.psi);
        out.pi.push_back(f.pi);
        const int n = f.n();
        ScalarGrid src(trial.grid_n, trial.halfwidth);
        double t = t0;
        auto half_kick = [&](const ScalarGrid& source) {
            parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t ii = lo; ii < hi; ++ii) {
                    const int i = static_cast<int>(ii) + 1;
                    for (int j = 1; j < n - 1; ++j)
                        for (int kk = 1; kk < n - 1; ++kk)
                            f.pi.at(i, j, kk) +=
                                0.5 * dt * (f.psi.laplacian_at(i, j, kk) - source.at(i, j, kk));
                }
            });
        };
        for (std::size_t s = 1; s < n_samples; ++s) {
            for (int u = 0; u < stride; ++u) {
                source_at(t, src);
                half_kick(src);
                parallel_for(static_cast<std::size_t>(n - 2),
                             [&](std::size_t lo, std::size_t hi) {
                                 for (std::size_t ii = lo; ii < hi; ++ii) {
                                     const int i = static_cast<int>(ii) + 1;
                                     for (int j = 1; j < n - 1; ++j)
                                         for (int kk = 1; kk < n - 1; ++kk)
                                             f.psi.at(i, j, kk) += dt * f.pi.at(i, j, kk);
                                 }
                             });
                t += dt;
                source_at(t, src);
                half_kick(src);
            }
            ScalarGrid psi_out = f.psi;
            if (opt.psi_cap) {
                const double nrm = psi_h1_norm(f);
                if (nrm > *opt.psi_cap) {
                    psi_out *= (*opt.psi_cap / nrm);
                    out.truncation_activated = true;
                }
            }
            out.psi.push_back(std::move(psi_out));
            out.pi.push_back(f.pi);
        }
    }
    return out;
}

TrajectoryRecord free_evolution(const RegularizationKernel& k,
                                const WeightedPointMeasure& mu0, const WaveField& zeta0,
                                double T, double dt, int sample_stride) {
    (void)k;
    TrajectoryRecord out;
    out.dt = dt;
    out.grid_n = zeta0.n();
    out.halfwidth = zeta0.halfwidth();
    out.tail = zeta0.analytic_tail;
    out.tail_mass = zeta0.tail_mass;

    const int steps = static_cast<int>(std::llround(T / dt));
    if (steps % sample_stride != 0)
        throw std::invalid_argument("free_evolution: step count not divisible by stride");

    WaveField f = zeta0;
    int step = 0;
    auto record = [&]() {
        out.times.push_back(f.time);
        out.psi.push_back(f.psi);
        out.pi.push_back(f.pi);
        WeightedPointMeasure m;
        for (std::size_t i = 0; i < mu0.size(); ++i) {
            Phase z = mu0.points[i];
            z.q += f.time * velocity(z.p);
            m.add(z, mu0.weights[i]);
        }
        out.measures.push_back(std::move(m));
    };
    record();
    while (step < steps) {
        leapfrog_free_step(f, dt);
        ++step;
        if (step % sample_stride == 0) record();
    }
    return out;
}

double weighted_supnorm(const TrajectoryRecord& a, const TrajectoryRecord& b, double w,
                        const DistanceOptions& dopt) {
    if (a.samples() != b.samples())
        throw std::invalid_argument("weighted_supnorm: mismatched time grids");
    double sup = 0.0;
    for (std::size_t s = 0; s < a.samples(); ++s) {
        if (std::abs(a.times[s] - b.times[s]) > 1e-9)
            throw std::invalid_argument("weighted_supnorm: mismatched time grids");
        const double dmu = kr_distance(a.measures[s], b.measures[s], dopt);
        const double dpsi = diff_h1_norm(a.psi[s], b.psi[s]);
        const double dpi = diff_l2_norm(a.pi[s], b.pi[s]);
        sup = std::max(sup, std::exp(-w * a.times[s]) * (dmu + dpsi + dpi));
    }
    return sup;
}

PicardLog picard_iterate(const RegularizationKernel& k, const WeightedPointMeasure& mu0,
                         const WaveField& zeta0, double w, double T, double dt,
                         int sample_stride, int iterations, const ApplyFOptions& opt,
                         std::vector<TrajectoryRecord>* keep_iterates) {
    PicardLog log;
    log.w = w;
    TrajectoryRecord prev = free_evolution(k, mu0, zeta0, T, dt, sample_stride);
    if (keep_iterates) keep_iterates->push_back(prev);
    for (int it = 0; it < iterations; ++it) {
        TrajectoryRecord next = apply_F(k, prev, mu0, zeta0, opt);
        log.truncation_activated |= next.truncation_activated;
        log.gaps.push_back(weighted_supnorm(next, prev, w));
        prev = std::move(next);
        if (keep_iterates) keep_iterates->push_back(prev);
    }
    for (std::size_t i = 0; i + 1 < log.gaps.size(); ++i) {
        const double r = log.gaps[i] > 0 ? log.gaps[i + 1] / log.gaps[i] : 0.0;
        log.ratios.push_back(r);
        if (r >= 1.0) log.contraction = false;
    }
    return log;
}

double flow_lipschitz_bound(double c_rho, double c_psi, double t_span) {
    const double wl = std::sqrt(c_rho * c_psi);
    const double pre = (2.0 + std::max(wl, 1.0 / wl)) / std::sqrt(2.0);
    return pre * std::exp(wl * std::abs(t_span));
}

double picard_weight_threshold(double c_rho, double energy, double ground_energy) {
    const double cpsi = std::sqrt(std::max(0.0, 4.0 + 4.0 * energy - 8.0 * ground_energy));
    return 2.0 * std::sqrt(c_rho * cpsi);
}

} // namespace wavekin
