#include "wavekin/conservation.hpp"

#include "wavekin/parallel.hpp"

#include <cmath>

namespace wavekin {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DiagnosticsRecord functionals(const RegularizationKernel& k, const SystemState& s) {
    DiagnosticsRecord rec;
    const ParticleEnsemble& e = s.particles;
    const WaveField& f = s.field;
    rec.time = f.time;

    // Mass: int (rho * rho_t) dx = grid integral of the smeared density.
    ScalarGrid dens(f.n(), f.halfwidth());
    smeared_density(k, e, dens);
    rec.mass = dens.integral();

    // Particle sums.
    double kinetic = 0.0, coupling = 0.0;
    Vec3 p_sum, j_sum;
    std::vector<double> kin_terms(e.size()), cpl_terms(e.size());
    parallel_for(e.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            kin_terms[i] = e.w[i] * std::sqrt(1.0 + norm2(e.p[i]));
            cpl_terms[i] = e.w[i] * k.convolve_scalar_collocated(f.psi, e.q[i]);
        }
    });
    kinetic = pairwise_sum(std::span<const double>(kin_terms.data(), kin_terms.size()));
    coupling = pairwise_sum(std::span<const double>(cpl_terms.data(), cpl_terms.size()));
    for (std::size_t i = 0; i < e.size(); ++i) {
        p_sum += e.w[i] * e.p[i];
        j_sum += e.w[i] * cross(e.q[i], e.p[i]);
        rec.max_speed = std::max(rec.max_speed, norm(velocity(e.p[i])));
        rec.max_momentum = std::max(rec.max_momentum, norm(e.p[i]));
    }

    // Field integrals: P_f = int pi grad psi, J_f = int (x cross grad psi) pi.
    const int n = f.n();
    std::vector<double> bx(f.psi.size(), 0.0), by(f.psi.size(), 0.0), bz(f.psi.size(), 0.0);
    std::vector<double> jx(f.psi.size(), 0.0), jy(f.psi.size(), 0.0), jz(f.psi.size(), 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < n; ++j)
                for (int kk = 0; kk < n; ++kk) {
                    const std::size_t id = f.psi.index(i, j, kk);
                    const double pival = f.pi.at(i, j, kk);
                    if (pival == 0.0) continue;
                    const Vec3 g = f.psi.gradient4_at(i, j, kk);
                    const Vec3 x = f.psi.node(i, j, kk);
                    const Vec3 xg = cross(x, g);
                    bx[id] = pival * g.x;
                    by[id] = pival * g.y;
                    bz[id] = pival * g.z;
                    jx[id] = xg.x * pival;
                    jy[id] = xg.y * pival;
                    jz[id] = xg.z * pival;
                }
        }
    });
    const double h3 = std::pow(f.spacing(), 3);
    const Vec3 field_p{h3 * pairwise_sum_grid(bx), h3 * pairwise_sum_grid(by),
                       h3 * pairwise_sum_grid(bz)};
    const Vec3 field_j{h3 * pairwise_sum_grid(jx), h3 * pairwise_sum_grid(jy),
                       h3 * pairwise_sum_grid(jz)};

    rec.kinetic = kinetic;
    rec.coupling = coupling;
    rec.field = field_energy(f);
    rec.energy = kinetic + coupling + rec.field;
    rec.particle_momentum = p_sum;
    rec.particle_angular_momentum = j_sum;
    rec.momentum = p_sum - field_p;
    rec.angular_momentum = j_sum - field_j;
    rec.psi_h1 = psi_h1_norm(f);
    rec.pi_l2 = pi_l2_norm(f);
    return rec;
}

double ground_state_energy(const RegularizationKernel& k) {
    // 1/(8 pi) int int rho rho / |x-y| = (1/8 pi) int rho(x) pot(x) dx with
    // pot = |.|^{-1} * rho = -(4 pi) psi_rho; reduced to a radial integral.
    const GaussLegendre gl(512);
    const double eps = k.radius();
    const double I = 4.0 * kPi *
                     gl_integrate(gl, 0.0, eps, [&](double r) {
                         const double pot = -4.0 * kPi * k.ground_potential(r);
                         return r * r * k.radial(r) * pot;
                     });
    return 1.0 - I / (8.0 * kPi);
}

double ground_state_energy_h1_route(const RegularizationKernel& k) {
    // ||psi_rho||_{H1dot}^2 = 4 pi int_0^inf r^2 psi'(r)^2 dr; beyond the
    // support psi' = 1/(4 pi r^2) integrates to 1/(4 pi eps) exactly.
    const GaussLegendre gl(512);
    const double eps = k.radius();
    const double inside = 4.0 * kPi * gl_integrate(gl, 0.0, eps, [&](double r) {
        const double d = k.ground_potential_deriv(r);
        return r * r * d * d;
    });
    const double outside = 1.0 / (4.0 * kPi * eps);
    return 1.0 - 0.5 * (inside + outside);
}

BoundReport apriori_bounds(const DiagnosticsRecord& rec, std::size_t n_particles,
                           double E0, double Eperp, const Vec3& P0, const Vec3& J0,
                           double R) {
    BoundReport rep;
    const double excess = E0 - Eperp;
    rep.add("psi_h1_sq", rec.psi_h1 * rec.psi_h1, 4.0 + 4.0 * E0 - 8.0 * Eperp);
    rep.add("pi_l2_sq", rec.pi_l2 * rec.pi_l2, 2.0 * excess);
    rep.add("mean_kinetic", rec.kinetic, 1.0 + excess);
    rep.add("coupling_upper", rec.coupling, E0 - 1.0);
    rep.add("coupling_lower", 6.0 * Eperp - 3.0 * E0 - 3.0, rec.coupling);
    rep.add("speed", rec.max_speed, speed_bound(n_particles, E0, Eperp));
    // Momentum / angular-momentum bounds from the conservation laws:
    // |1/N sum p| <= |P| + ||psi|| ||pi|| and
    // |1/N sum p x q| <= |J| + (R + |t|) ||psi|| ||pi||.
    rep.add("mean_momentum", norm(rec.particle_momentum),
            norm(P0) + rec.psi_h1 * rec.pi_l2);
    rep.add("mean_angular_momentum", norm(rec.particle_angular_momentum),
            norm(J0) + (R + std::abs(rec.time)) * rec.psi_h1 * rec.pi_l2);
    return rep;
}

double gronwall_bound(double gamma, double u0, double v0, const PiecewiseConstant& g,
                      double t) {
    if (gamma <= 0.0) throw std::invalid_argument("gronwall_bound: gamma must be > 0");
    double U = u0 * std::cosh(gamma * t) + (v0 / gamma) * std::sinh(gamma * t);
    if (g.values.empty()) return U;
    // G(tau) = int_0^tau g is piecewise linear: G(tau) = alpha_i + beta_i tau
    // on [t_i, t_{i+1}); the outer integral then has a closed form per piece:
    //   int cosh(gamma (t - tau)) (alpha + beta tau) dtau
    //     = -(alpha + beta tau)/gamma * sinh(gamma (t - tau))
    //       - beta/gamma^2 * cosh(gamma (t - tau))  evaluated at the ends.
    double G_at = 0.0;
    double inh = 0.0;
    for (std::size_t i = 0; i < g.knots.size() && g.knots[i] < t; ++i) {
        const double a = g.knots[i];
        const double b = (i + 1 < g.knots.size()) ? std::min(g.knots[i + 1], t) : t;
        if (b <= a) continue;
        const double beta = g.values[i];
        const double alpha = G_at - beta * a;
        auto F = [&](double tau) {
            return -(alpha + beta * tau) / gamma * std::sinh(gamma * (t - tau)) -
                   beta / (gamma * gamma) * std::cosh(gamma * (t - tau));
        };
        inh += F(b) - F(a);
        G_at += beta * (b - a);
    }
    return U + inh;
}

double gronwall_bound(double gamma, double u0, double v0,
                      const std::function<double(double)>& g, double t, int quad_points) {
    if (gamma <= 0.0) throw std::invalid_argument("gronwall_bound: gamma must be > 0");
    double U = u0 * std::cosh(gamma * t) + (v0 / gamma) * std::sinh(gamma * t);
    if (t <= 0.0) return U;
    const int n = quad_points;
    const double dt = t / n;
    // composite trapezoid for G, then for the outer integral
    std::vector<double> G(n + 1, 0.0);
    double prev = g(0.0);
    for (int i = 1; i <= n; ++i) {
        const double cur = g(i * dt);
        G[i] = G[i - 1] + 0.5 * dt * (prev + cur);
        prev = cur;
    }
    double inh = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double wq = (i == 0 || i == n) ? 0.5 : 1.0;
        inh += wq * std::cosh(gamma * (t - i * dt)) * G[i];
    }
    return U + inh * dt;
}

} // namespace wavekin
