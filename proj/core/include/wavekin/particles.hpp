#pragma once

#include "wavekin/field.hpp"
#include "wavekin/geometry.hpp"
#include "wavekin/kernel.hpp"

#include <vector>

namespace wavekin {

/// N phase-space points with nonnegative weights. Probability ensembles use
/// weight 1/N per particle; quadrature ensembles carry general weights that
/// sum to the total mass.
struct ParticleEnsemble {
    std::vector<Vec3> q;
    std::vector<Vec3> p;
    std::vector<double> w;

    std::size_t size() const { return q.size(); }

    void add(const Vec3& q_, const Vec3& p_, double w_) {
        q.push_back(q_);
        p.push_back(p_);
        w.push_back(w_);
    }

    double total_weight() const;
    double max_speed() const;

    static ParticleEnsemble uniform(std::vector<Vec3> q, std::vector<Vec3> p);
};

/// The full state (particles, field) at one time.
struct SystemState {
    ParticleEnsemble particles;
    WaveField field;
};

/// v = p / sqrt(1 + |p|^2); |v| < 1 always.
inline Vec3 velocity(const Vec3& p) {
    return (1.0 / std::sqrt(1.0 + norm2(p))) * p;
}

/// Jacobian dv/dp = I/gamma - p p^T / gamma^3.
Mat3 velocity_jacobian(const Vec3& p);

/// Force -(rho * grad psi)(q), evaluated as (grad rho * psi)(q) on the grid
/// nodes. That form is the exact q-gradient of the collocated coupling term
/// (rho * psi)(q), which keeps the kick-drift-kick push symplectic.
Vec3 force(const RegularizationKernel& k, const WaveField& f, const Vec3& q);

/// Spec'd Gauss-Legendre route, -(rho * grad psi)(q); kept as the generic
/// kernel-local quadrature and used in cross-checks.
Vec3 force_gl(const RegularizationKernel& k, const WaveField& f, const Vec3& q);

/// Samples sum_i w_i rho(x - q_i) on the grid (throws if a support leaves the box).
void smeared_density(const RegularizationKernel& k, const ParticleEnsemble& e,
                     ScalarGrid& out);
ScalarGrid smeared_density(const RegularizationKernel& k, const ParticleEnsemble& e,
                           int grid_n, double halfwidth);

/// Kick-drift-kick push against a frozen pair of field snapshots: the first
/// half-kick sees f_begin, the second sees f_end (test-particle mode passes
/// the same field twice).
void push_step(const RegularizationKernel& k, const WaveField& f_begin,
               const WaveField& f_end, ParticleEnsemble& e, double dt);

/// Speed bound sqrt(1 - (1 + N(E - E_perp))^{-2}) from energy conservation.
double speed_bound(std::size_t n_particles, double energy, double ground_energy);

/// Momentum a-priori bound max|p(0)| + ||rho|| sqrt(2 E_W(0)) t + 1/2 ||rho||^2 t^2.
double momentum_bound(double p0_max, double rho_l2, double field_energy0, double t);

} // namespace wavekin
