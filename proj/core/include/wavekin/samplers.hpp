#pragma once

#include "wavekin/geometry.hpp"
#include "wavekin/particles.hpp"
#include "wavekin/rng.hpp"

#include <string>
#include <vector>

namespace wavekin {

/// Initial phase-space laws. The default study law is a cold rotating ring:
/// a one-parameter curve u -> (q(u), p(u)) with u uniform on [0,1). Its
/// one-dimensional support gives the empirical measure the N^{-1/2}
/// Kantorovich-Rubinstein sampling rate that the convergence studies fit
/// (full-dimensional laws in R^6 would only decay like N^{-1/6}). The
/// default momentum puts the ring in rotational balance with its own
/// smeared gravity (eps = 0.4), so the curve evolves gently over the
/// study horizons instead of collapsing.
struct RingBeamLaw {
    double radius = 0.8;
    double momentum = 0.3367;

    Phase at(double u) const {
        const double a = 2.0 * 3.14159265358979323846 * u;
        return {{radius * std::cos(a), radius * std::sin(a), 0.0},
                {-momentum * std::sin(a), momentum * std::cos(a), 0.0}};
    }
};

/// Uniform ball x uniform ball law (full dimensional; generic tests).
struct BallClusterLaw {
    double q_radius = 0.8;
    double p_radius = 0.2;
};

struct SamplerSpec {
    std::string kind = "ring"; // ring | ball
    RingBeamLaw ring;
    BallClusterLaw ball;
};

/// i.i.d. sample of N phase points (uniform weights 1/N).
ParticleEnsemble sample_iid(const SamplerSpec& law, std::size_t n, Philox& rng);

/// Deterministic low-discrepancy quadrature ensemble of the same law
/// (equispaced parameter for the ring, Halton points for the ball).
ParticleEnsemble sample_quadrature(const SamplerSpec& law, std::size_t n);

/// Halton sequence entry (1-based index) for the given prime base.
double halton(std::size_t index, int base);

} // namespace wavekin
