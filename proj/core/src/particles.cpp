#include "wavekin/particles.hpp"

#include "wavekin/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace wavekin {

double ParticleEnsemble::total_weight() const {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

double ParticleEnsemble::max_speed() const {
    double m = 0.0;
    for (const Vec3& pi : p) m = std::max(m, norm(velocity(pi)));
    return m;
}

ParticleEnsemble ParticleEnsemble::uniform(std::vector<Vec3> q, std::vector<Vec3> p) {
    ParticleEnsemble e;
    const double w = 1.0 / static_cast<double>(q.size());
    e.q = std::move(q);
    e.p = std::move(p);
    e.w.assign(e.q.size(), w);
    return e;
}

Mat3 velocity_jacobian(const Vec3& p) {
    const double g2 = 1.0 + norm2(p);
    const double g = std::sqrt(g2);
    const double inv_g = 1.0 / g;
    const double inv_g3 = inv_g / g2;
    Mat3 J;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) J(i, j) = -p[i] * p[j] * inv_g3;
    J(0, 0) += inv_g;
    J(1, 1) += inv_g;
    J(2, 2) += inv_g;
    return J;
}

Vec3 force(const RegularizationKernel& k, const WaveField& f, const Vec3& q) {
    return k.convolve_gradrho_collocated(f.psi, q);
}

Vec3 force_gl(const RegularizationKernel& k, const WaveField& f, const Vec3& q) {
    return -k.convolve_grad(f.psi, q);
}

void smeared_density(const RegularizationKernel& k, const ParticleEnsemble& e,
                     ScalarGrid& out) {
    out.fill(0.0);
    const double eps = k.radius();
    for (std::size_t a = 0; a < e.size(); ++a) {
        const Vec3& q = e.q[a];
        if (!out.contains_ball(q, eps))
            throw std::domain_error("smeared_density: support leaves the grid box");
        int ilo, ihi, jlo, jhi, klo, khi;
        out.clamp_range(q.x, eps, ilo, ihi);
        out.clamp_range(q.y, eps, jlo, jhi);
        out.clamp_range(q.z, eps, klo, khi);
        const double w = e.w[a];
        for (int i = ilo; i <= ihi; ++i) {
            const double dx = out.coord(i) - q.x;
            for (int j = jlo; j <= jhi; ++j) {
                const double dy = out.coord(j) - q.y;
                const double rxy2 = dx * dx + dy * dy;
                if (rxy2 >= eps * eps) continue;
                for (int kk = klo; kk <= khi; ++kk) {
                    const double dz = out.coord(kk) - q.z;
                    const double r = std::sqrt(rxy2 + dz * dz);
                    if (r >= eps) continue;
                    out.at(i, j, kk) += w * k.radial(r);
                }
            }
        }
    }
}

ScalarGrid smeared_density(const RegularizationKernel& k, const ParticleEnsemble& e,
                           int grid_n, double halfwidth) {
    ScalarGrid g(grid_n, halfwidth);
    smeared_density(k, e, g);
    return g;
}

void push_step(const RegularizationKernel& k, const WaveField& f_begin,
               const WaveField& f_end, ParticleEnsemble& e, double dt) {
    parallel_for(e.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Vec3 p = e.p[i] + 0.5 * dt * force(k, f_begin, e.q[i]);
            Vec3 q = e.q[i] + dt * velocity(p);
            p += 0.5 * dt * force(k, f_end, q);
            e.q[i] = q;
            e.p[i] = p;
        }
    });
}

double speed_bound(std::size_t n_particles, double energy, double ground_energy) {
    // the excess is clamped at the quadrature floor of the energy functional,
    // otherwise near-ground states trip the bound on roundoff
    const double excess = std::max(energy - ground_energy, 1e-5);
    const double a = 1.0 + static_cast<double>(n_particles) * excess;
    return std::sqrt(1.0 - 1.0 / (a * a));
}

double momentum_bound(double p0_max, double rho_l2, double field_energy0, double t) {
    const double at = std::abs(t);
    return p0_max + rho_l2 * std::sqrt(2.0 * field_energy0) * at +
           0.5 * rho_l2 * rho_l2 * t * t;
}

} // namespace wavekin
