#include "wavekin/fluctuations.hpp"

#include "wavekin/field.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/particles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wavekin {

namespace {

Vec3 bump_gradient(const Vec3& x, const Vec3& c, double sigma, int axis) {
    // grad of d/dx_axis exp(-|x-c|^2/(2 s^2))
    const Vec3 d = x - c;
    const double s2 = sigma * sigma;
    const double e = std::exp(-norm2(d) / (2.0 * s2));
    // f = -d_axis/s^2 * e ; grad f = (-e/s^2) (e_axis - d d_axis / s^2)
    Vec3 g = (-e / s2) * Vec3{axis == 0 ? 1.0 : 0.0, axis == 1 ? 1.0 : 0.0,
                              axis == 2 ? 1.0 : 0.0};
    g += (e * d[axis] / (s2 * s2)) * d;
    return g;
}

double bump_deriv(const Vec3& x, const Vec3& c, double sigma, int axis) {
    const Vec3 d = x - c;
    const double s2 = sigma * sigma;
    return -d[axis] / s2 * std::exp(-norm2(d) / (2.0 * s2));
}

} // namespace

double ProbeField::pair(const ScalarGrid& dpsi, const ScalarGrid& dpi) const {
    const ScalarGrid& g = (kind == Kind::PsiGrad) ? dpsi : dpi;
    const int n = g.n();
    std::vector<double> buf(g.size(), 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const Vec3 x = g.node(i, j, k);
                    if (kind == Kind::PsiGrad) {
                        buf[g.index(i, j, k)] =
                            dot(bump_gradient(x, center, sigma, axis), g.gradient_at(i, j, k));
                    } else {
                        buf[g.index(i, j, k)] =
                            bump_deriv(x, center, sigma, axis) * g.at(i, j, k);
                    }
                }
        }
    });
    const double h = g.spacing();
    return h * h * h * pairwise_sum_grid(buf);
}

std::string ProbeField::describe() const {
    std::ostringstream os;
    os << (kind == Kind::PsiGrad ? "psi-grad" : "pi") << "-bump axis=" << axis
       << " center=(" << center.x << "," << center.y << "," << center.z << ")"
       << " sigma=" << sigma;
    return os.str();
}

std::vector<ProbeField> default_probes(double radius) {
    // near-dipole test fields: very wide bump derivatives respond to the low
    // harmonics of the density fluctuation, the same modes that dominate the
    // test-particle block, keeping the observable spectrum concentrated and
    // the pairings deep in the linear regime
    std::vector<ProbeField> v;
    const double s = 1.0 * radius;
    v.push_back({ProbeField::Kind::PsiGrad, Vec3{0, 0, 0}, s, 0});
    v.push_back({ProbeField::Kind::PsiGrad, Vec3{0, 0, 0}, s, 1});
    v.push_back({ProbeField::Kind::PsiGrad, Vec3{0.24 * radius, 0, 0}, s, 0});
    v.push_back({ProbeField::Kind::Pi, Vec3{0, 0, 0}, s, 0});
    v.push_back({ProbeField::Kind::Pi, Vec3{0, 0, 0}, s, 1});
    v.push_back({ProbeField::Kind::Pi, Vec3{0, 0.24 * radius, 0}, s, 1});
    return v;
}

namespace {

/// delta of the collocated force: dF = -h^3 sum_g [H_rho(x_g - q) dq] psi_g
///                                   + h^3 sum_g grad_rho(x_g - q) dpsi_g.
Vec3 delta_force(const RegularizationKernel& k, const ScalarGrid& psi,
                 const ScalarGrid& dpsi, const Vec3& q, const Vec3& dq) {
    const double eps = k.radius();
    int ilo, ihi, jlo, jhi, klo, khi;
    psi.clamp_range(q.x, eps, ilo, ihi);
    psi.clamp_range(q.y, eps, jlo, jhi);
    psi.clamp_range(q.z, eps, klo, khi);
    const double h3 = std::pow(psi.spacing(), 3);
    Vec3 out;
    for (int i = ilo; i <= ihi; ++i)
        for (int j = jlo; j <= jhi; ++j)
            for (int kk = klo; kk <= khi; ++kk) {
                const Vec3 d = psi.node(i, j, kk) - q;
                const double r = norm(d);
                if (r >= eps) continue;
                const Vec3 g = k.grad(d);
                out += dpsi.at(i, j, kk) * g;
                // -H_rho(d) dq * psi_g
                const Mat3 H = k.hessian(d);
                out -= psi.at(i, j, kk) * H.apply(dq);
            }
    return h3 * out;
}

/// delta of the smeared density: dS(x_g) = -sum_j w_j grad_rho(x_g - q_j).dq_j
/// plus the inhomogeneous part.
void delta_source(const RegularizationKernel& k, const std::vector<Vec3>& q,
                  const std::vector<double>& w, const std::vector<Phase>& dz,
                  ScalarGrid& out) {
    out.fill(0.0);
    const double eps = k.radius();
    for (std::size_t a = 0; a < q.size(); ++a) {
        int ilo, ihi, jlo, jhi, klo, khi;
        out.clamp_range(q[a].x, eps, ilo, ihi);
        out.clamp_range(q[a].y, eps, jlo, jhi);
        out.clamp_range(q[a].z, eps, klo, khi);
        const Vec3 dq = dz[a].q;
        for (int i = ilo; i <= ihi; ++i)
            for (int j = jlo; j <= jhi; ++j)
                for (int kk = klo; kk <= khi; ++kk) {
                    const Vec3 d = out.node(i, j, kk) - q[a];
                    const double r = norm(d);
                    if (r >= eps) continue;
                    out.at(i, j, kk) -= w[a] * dot(k.grad(d), dq);
                }
    }
}

void add_kernel_bump(const RegularizationKernel& k, const Vec3& c, double scale,
                     ScalarGrid& out) {
    const double eps = k.radius();
    int ilo, ihi, jlo, jhi, klo, khi;
    out.clamp_range(c.x, eps, ilo, ihi);
    out.clamp_range(c.y, eps, jlo, jhi);
    out.clamp_range(c.z, eps, klo, khi);
    for (int i = ilo; i <= ihi; ++i)
        for (int j = jlo; j <= jhi; ++j)
            for (int kk = klo; kk <= khi; ++kk) {
                const double r = norm(out.node(i, j, kk) - c);
                if (r < eps) out.at(i, j, kk) += scale * k.radial(r);
            }
}

void add_base_density(const RegularizationKernel& k, const std::vector<Vec3>& q,
                      const std::vector<double>& w, ScalarGrid& out) {
    for (std::size_t a = 0; a < q.size(); ++a) add_kernel_bump(k, q[a], w[a], out);
}

double grid_l2(const ScalarGrid& g) {
    std::vector<double> buf(g.size());
    const double* p = g.data();
    for (std::size_t i = 0; i < g.size(); ++i) buf[i] = p[i] * p[i];
    const double h = g.spacing();
    return std::sqrt(h * h * h * pairwise_sum_grid(buf));
}

double grid_h1(const ScalarGrid& g) {
    std::vector<double> buf(g.size(), 0.0);
    const int n = g.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) buf[g.index(i, j, k)] = norm2(g.gradient_at(i, j, k));
    const double h = g.spacing();
    return std::sqrt(h * h * h * pairwise_sum_grid(buf));
}

} // namespace

SensitivityResult sensitivity_evolve(const SensitivityBase& base, const SensitivityMode& mode,
                                     const SensitivityOptions& opt) {
    const RegularizationKernel& k = *base.kernel;
    const RunRecord& rec = *base.rec;
    if (rec.psi_snaps.empty() || rec.snapshot_steps.size() != rec.times.size())
        throw std::invalid_argument(
            "sensitivity_evolve: base must record fields at every step");
    const std::size_t n_atoms = rec.weights.size();
    const std::size_t steps = rec.steps();
    const double dt = rec.dt;
    const bool with_tracer = !base.tracer.empty();
    if (with_tracer && base.tracer.size() != steps + 1)
        throw std::invalid_argument("sensitivity_evolve: tracer path length mismatch");
    const double lam = base.coupling_scale;

    // linear state
    std::vector<Phase> dz(n_atoms + (with_tracer ? 1 : 0));
    ScalarGrid dpsi(rec.grid_n, rec.halfwidth), dpi(rec.grid_n, rec.halfwidth);
    ScalarGrid dsrc(rec.grid_n, rec.halfwidth);

    // extra-particle path: the transported source point follows the base flow
    Phase xp = mode.zbar;

    SensitivityResult out;
    out.snaps.resize(steps + 1);

    auto snapshot = [&](std::size_t s) {
        SensitivitySnapshot& sn = out.snaps[s];
        sn.time = rec.times[s];
        if (with_tracer) sn.tracer_dz = dz.back();
        for (std::size_t a = 0; a < n_atoms; ++a) {
            sn.max_dq = std::max(sn.max_dq, norm(dz[a].q));
            sn.max_dp = std::max(sn.max_dp, norm(dz[a].p));
        }
        sn.dpsi_h1 = grid_h1(dpsi);
        sn.dpsi_l2 = grid_l2(dpsi);
        sn.dpi_l2 = grid_l2(dpi);
        const bool pair_here =
            opt.probe_steps.empty() ||
            std::find(opt.probe_steps.begin(), opt.probe_steps.end(), static_cast<int>(s)) !=
                opt.probe_steps.end();
        if (pair_here)
            for (const ProbeField& pr : opt.probes) sn.probe_values.push_back(pr.pair(dpsi, dpi));
        for (std::size_t m = 0; m < opt.keep_grid_steps.size(); ++m)
            if (opt.keep_grid_steps[m] == static_cast<int>(s)) {
                out.kept_steps.push_back(static_cast<int>(s));
                out.dpsi_at.push_back(dpsi);
                out.dpi_at.push_back(dpi);
            }
    };

    const int n = rec.grid_n;
    auto dsource_at = [&](std::size_t step) {
        delta_source(k, rec.positions[step], rec.weights, dz, dsrc);
        if (mode.kind == SensitivityMode::Kind::ExtraParticle)
            add_kernel_bump(k, xp.q, 1.0, dsrc);
        else
            add_base_density(k, rec.positions[step], rec.weights, dsrc);
    };
    snapshot(0);
    for (std::size_t s = 0; s < steps; ++s) {
        const ScalarGrid& psi_n = rec.psi_snaps[s];
        const ScalarGrid& psi_n1 = rec.psi_snaps[s + 1];
        const auto& q_n = rec.positions[s];
        const auto& p_n = rec.momenta[s];
        const auto& q_n1 = rec.positions[s + 1];

        // ---- first half kick at step s
        dsource_at(s);
        parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t ii = lo; ii < hi; ++ii) {
                const int i = static_cast<int>(ii) + 1;
                for (int j = 1; j < n - 1; ++j)
                    for (int kk = 1; kk < n - 1; ++kk)
                        dpi.at(i, j, kk) +=
                            0.5 * dt * (dpsi.laplacian_at(i, j, kk) - dsrc.at(i, j, kk));
            }
        });
        parallel_for(n_atoms, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t a = lo; a < hi; ++a)
                dz[a].p += (0.5 * dt * lam) * delta_force(k, psi_n, dpsi, q_n[a], dz[a].q);
        });
        Phase xp_mid = xp;
        if (with_tracer) {
            const Phase tr = base.tracer[s];
            dz.back().p +=
                (0.5 * dt * lam) * delta_force(k, psi_n, dpsi, tr.q, dz.back().q);
        }
        if (mode.kind == SensitivityMode::Kind::ExtraParticle) {
            // the transported source point rides the stored base field
            xp_mid.p = xp.p + (0.5 * dt * lam) * k.convolve_gradrho_collocated(psi_n, xp.q);
        }

        // ---- drift: dq with the half-step base momenta, dpsi with dpi
        parallel_for(n_atoms, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t a = lo; a < hi; ++a) {
                const Vec3 p_half =
                    p_n[a] + (0.5 * dt * lam) * k.convolve_gradrho_collocated(psi_n, q_n[a]);
                dz[a].q += dt * velocity_jacobian(p_half).apply(dz[a].p);
            }
        });
        if (with_tracer) {
            const Phase tr = base.tracer[s];
            const Vec3 p_half =
                tr.p + (0.5 * dt * lam) * k.convolve_gradrho_collocated(psi_n, tr.q);
            dz.back().q += dt * velocity_jacobian(p_half).apply(dz.back().p);
        }
        parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t ii = lo; ii < hi; ++ii) {
                const int i = static_cast<int>(ii) + 1;
                for (int j = 1; j < n - 1; ++j)
                    for (int kk = 1; kk < n - 1; ++kk) dpsi.at(i, j, kk) += dt * dpi.at(i, j, kk);
            }
        });
        if (mode.kind == SensitivityMode::Kind::ExtraParticle) {
            xp_mid.q = xp.q + dt * velocity(xp_mid.p);
        }

        // ---- second half kick at step s+1
        if (mode.kind == SensitivityMode::Kind::ExtraParticle) {
            xp_mid.p += (0.5 * dt * lam) * k.convolve_gradrho_collocated(psi_n1, xp_mid.q);
            xp = xp_mid;
        }
        dsource_at(s + 1);
        parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t ii = lo; ii < hi; ++ii) {
                const int i = static_cast<int>(ii) + 1;
                for (int j = 1; j < n - 1; ++j)
                    for (int kk = 1; kk < n - 1; ++kk)
                        dpi.at(i, j, kk) +=
                            0.5 * dt * (dpsi.laplacian_at(i, j, kk) - dsrc.at(i, j, kk));
            }
        });
        parallel_for(n_atoms, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t a = lo; a < hi; ++a)
                dz[a].p += (0.5 * dt * lam) * delta_force(k, psi_n1, dpsi, q_n1[a], dz[a].q);
        });
        if (with_tracer) {
            const Phase tr = base.tracer[s + 1];
            dz.back().p +=
                (0.5 * dt * lam) * delta_force(k, psi_n1, dpsi, tr.q, dz.back().q);
        }

        snapshot(s + 1);
    }
    return out;
}

SensitivityBoundsReport sensitivity_bounds_check(const RegularizationKernel& k,
                                                 const SensitivityResult& s,
                                                 const std::vector<double>& base_psi_h1) {
    SensitivityBoundsReport rep;
    const auto& snaps = s.snaps;
    const KernelConstants& C = k.constants();
    const double tol = 1e-6;

    auto add = [&](const std::string& name, double lhs, double rhs) {
        const bool ok = lhs <= rhs * (1.0 + tol) + 1e-12;
        rep.rows.push_back({name, lhs, rhs, ok});
        rep.all_ok = rep.all_ok && ok;
    };

    // cumulative trapezoid integrals of |D1p|, |D1q|, psi_h1*|D1q|, dpsi_h1
    const std::size_t m = snaps.size();
    std::vector<double> t(m);
    for (std::size_t i = 0; i < m; ++i) t[i] = snaps[i].time;

    auto cumtrap = [&](const std::function<double(std::size_t)>& f) {
        std::vector<double> F(m, 0.0);
        for (std::size_t i = 1; i < m; ++i)
            F[i] = F[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f(i - 1) + f(i));
        return F;
    };
    const auto int_dp = cumtrap([&](std::size_t i) { return snaps[i].max_dp; });
    const auto int_force =
        cumtrap([&](std::size_t i) {
            return C.grad_l2 * base_psi_h1[i] * snaps[i].max_dq + C.l2 * snaps[i].dpsi_h1;
        });
    // int_0^t (t - t') |D1q| dt' evaluated per endpoint
    auto lagged = [&](std::size_t end) {
        double acc = 0.0;
        for (std::size_t i = 1; i <= end; ++i) {
            const double f0 = (t[end] - t[i - 1]) * snaps[i - 1].max_dq;
            const double f1 = (t[end] - t[i]) * snaps[i].max_dq;
            acc += 0.5 * (t[i] - t[i - 1]) * (f0 + f1);
        }
        return acc;
    };
    const auto int_dq = cumtrap([&](std::size_t i) { return snaps[i].max_dq; });

    for (std::size_t i = m - 1; i < m; ++i) { // final time; earlier ones spot-checked below
        add("dq<=int dp", snaps[i].max_dq, int_dp[i]);
        add("dp<=int force", snaps[i].max_dp, int_force[i]);
        add("dpsi_h1", snaps[i].dpsi_h1,
            0.5 * t[i] * t[i] * C.grad_l2 + C.hess_l2 * lagged(i));
        add("dpi_l2", snaps[i].dpi_l2,
            t[i] * C.l2 + 0.5 * t[i] * t[i] * C.grad_l2 + C.grad_l2 * int_dq[i] +
                C.hess_l2 * lagged(i));
        add("dpsi_l2", snaps[i].dpsi_l2, 0.5 * t[i] * t[i] * C.l2 + C.grad_l2 * lagged(i));
    }
    // pointwise along the trajectory at a coarse stride
    const std::size_t stride = std::max<std::size_t>(1, m / 8);
    for (std::size_t i = stride; i + 1 < m; i += stride) {
        add("dq<=int dp @t", snaps[i].max_dq, int_dp[i]);
        add("dpsi_h1 @t", snaps[i].dpsi_h1,
            0.5 * t[i] * t[i] * C.grad_l2 + C.hess_l2 * lagged(i));
    }
    return rep;
}

std::vector<double> observable_vector(const SensitivityResult& s, const ObservableLayout& lay) {
    std::vector<double> y;
    y.reserve(lay.dim());
    for (int step : lay.probe_steps) {
        const SensitivitySnapshot& sn = s.snaps.at(step);
        y.push_back(sn.tracer_dz.q.x);
        y.push_back(sn.tracer_dz.q.y);
        y.push_back(sn.tracer_dz.q.z);
        y.push_back(sn.tracer_dz.p.x);
        y.push_back(sn.tracer_dz.p.y);
        y.push_back(sn.tracer_dz.p.z);
        for (int pi = 0; pi < lay.n_probes; ++pi) y.push_back(sn.probe_values.at(pi));
    }
    return y;
}

CovarianceResult covariance_Q(const SensitivityBase& base,
                              const std::vector<Phase>& zbar_nodes,
                              const std::vector<double>& zbar_weights,
                              const ObservableLayout& lay, const SensitivityOptions& opt) {
    if (zbar_nodes.empty()) throw std::invalid_argument("covariance_Q: empty node set");
    const int d = lay.dim();
    std::vector<std::vector<double>> ys(zbar_nodes.size());
    // one linear system per node; nodes processed in fixed order chunks
    parallel_for(zbar_nodes.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            SensitivityMode mode;
            mode.kind = SensitivityMode::Kind::ExtraParticle;
            mode.zbar = zbar_nodes[i];
            ys[i] = observable_vector(sensitivity_evolve(base, mode, opt), lay);
        }
    });
    double wsum = 0.0;
    for (double w : zbar_weights) wsum += w;

    CovarianceResult out;
    out.dim = d;
    out.mean_Y.assign(d, 0.0);
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (int a = 0; a < d; ++a) out.mean_Y[a] += zbar_weights[i] / wsum * ys[i][a];
    out.Q.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double w = zbar_weights[i] / wsum;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                out.Q[a * d + b] +=
                    w * (ys[i][a] - out.mean_Y[a]) * (ys[i][b] - out.mean_Y[b]);
    }
    return out;
}

} // namespace wavekin
