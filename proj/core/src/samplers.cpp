#include "wavekin/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace wavekin {

double halton(std::size_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

namespace {

Vec3 ball_point(double u1, double u2, double u3, double radius) {
    // radius by inverse CDF, direction by (cos theta, phi)
    const double r = radius * std::cbrt(u1);
    const double ct = 2.0 * u2 - 1.0;
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = 2.0 * 3.14159265358979323846 * u3;
    return {r * st * std::cos(phi), r * st * std::sin(phi), r * ct};
}

} // namespace

ParticleEnsemble sample_iid(const SamplerSpec& law, std::size_t n, Philox& rng) {
    ParticleEnsemble e;
    const double w = 1.0 / static_cast<double>(n);
    if (law.kind == "ring") {
        for (std::size_t i = 0; i < n; ++i) {
            const Phase z = law.ring.at(rng.uniform());
            e.add(z.q, z.p, w);
        }
    } else if (law.kind == "ball") {
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 q = ball_point(rng.uniform(), rng.uniform(), rng.uniform(),
                                      law.ball.q_radius);
            const Vec3 p = ball_point(rng.uniform(), rng.uniform(), rng.uniform(),
                                      law.ball.p_radius);
            e.add(q, p, w);
        }
    } else {
        throw std::invalid_argument("unknown sampler kind: " + law.kind);
    }
    return e;
}

ParticleEnsemble sample_quadrature(const SamplerSpec& law, std::size_t n) {
    ParticleEnsemble e;
    const double w = 1.0 / static_cast<double>(n);
    if (law.kind == "ring") {
        for (std::size_t i = 0; i < n; ++i) {
            const Phase z = law.ring.at((i + 0.5) / static_cast<double>(n));
            e.add(z.q, z.p, w);
        }
    } else if (law.kind == "ball") {
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 q = ball_point(halton(i + 1, 2), halton(i + 1, 3), halton(i + 1, 5),
                                      law.ball.q_radius);
            const Vec3 p = ball_point(halton(i + 1, 7), halton(i + 1, 11), halton(i + 1, 13),
                                      law.ball.p_radius);
            e.add(q, p, w);
        }
    } else {
        throw std::invalid_argument("unknown sampler kind: " + law.kind);
    }
    return e;
}

} // namespace wavekin
