#pragma once

#include "wavekin/grid.hpp"
#include "wavekin/kernel.hpp"

#include <optional>

namespace wavekin {

struct ParticleEnsemble; // particles.hpp

/// The wave pair (psi, pi) on a cubic grid. Outside the box psi is the
/// analytic far field -m/(4 pi |x|) when the tail flag is set (pi vanishes
/// there for the whole run by the domain-of-dependence guard). The rim layer
/// of nodes is held at its initial values; box sizing must keep signals away
/// from it for the run horizon.
struct WaveField {
    ScalarGrid psi;
    ScalarGrid pi;
    double time = 0.0;
    bool analytic_tail = false;
    double tail_mass = 0.0;

    WaveField() = default;
    WaveField(int n, double halfwidth) : psi(n, halfwidth), pi(n, halfwidth) {}

    int n() const { return psi.n(); }
    double spacing() const { return psi.spacing(); }
    double halfwidth() const { return psi.halfwidth(); }
};

/// The p = 0 static field of a smeared source: psi = superposition of the
/// kernel's radial ground potentials centered at the particles, pi = 0.
/// Requires every smeared support inside the ball B_R and the grid box.
WaveField init_ground_field(const RegularizationKernel& k, const ParticleEnsemble& e,
                            int grid_n, double halfwidth, double R);

/// One source-free leapfrog step (kick-drift-kick on (pi, psi)).
/// CFL: dt <= h/sqrt(3).
void leapfrog_free_step(WaveField& f, double dt);

/// E_W = 1/2 int (|grad psi|^2 + pi^2), grid quadrature with the analytic
/// tail energy added outside the box when the tail flag is set.
double field_energy(const WaveField& f);

/// The forward-difference pairing of the leapfrog: this is the invariant the
/// integrator actually conserves (up to O(dt^2) oscillation), useful as a
/// drift diagnostic independent of the functional's spatial accuracy.
double field_energy_discrete(const WaveField& f);

/// ||psi||_{H1dot} (tail-corrected) and ||pi||_{L2}.
double psi_h1_norm(const WaveField& f);
double pi_l2_norm(const WaveField& f);

/// Same norms for a difference of two fields with identical tails (tails
/// cancel, pure grid quadrature).
double diff_h1_norm(const ScalarGrid& a, const ScalarGrid& b);
double diff_l2_norm(const ScalarGrid& a, const ScalarGrid& b);

/// int_{outside unit cube} |y|^{-4} dy = int_{S^2} max_i |Omega_i| dOmega,
/// cached; the tail H1dot correction is tail_mass^2 * kappa / (16 pi^2 X).
double cube_tail_constant();

void assert_cfl(double dt, double h);

} // namespace wavekin
