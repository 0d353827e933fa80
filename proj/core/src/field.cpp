#include "wavekin/field.hpp"

#include "wavekin/numerics.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/particles.hpp"

#include <cmath>
#include <stdexcept>

namespace wavekin {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void assert_cfl(double dt, double h) {
    if (dt > h / std::sqrt(3.0) * (1.0 + 1e-12))
        throw std::invalid_argument("CFL violation: need dt <= h/sqrt(3)");
}

WaveField init_ground_field(const RegularizationKernel& k, const ParticleEnsemble& e,
                            int grid_n, double halfwidth, double R) {
    WaveField f(grid_n, halfwidth);
    const double eps = k.radius();
    for (const Vec3& q : e.q) {
        if (norm(q) + eps > R)
            throw std::domain_error("init_ground_field: smeared source not contained in B_R");
        if (!f.psi.contains_ball(q, eps))
            throw std::domain_error("init_ground_field: source support outside the grid box");
    }
    const int n = grid_n;
    ScalarGrid& psi = f.psi;
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (int j = 0; j < n; ++j)
                for (int k3 = 0; k3 < n; ++k3) {
                    const Vec3 x = psi.node(static_cast<int>(i), j, k3);
                    double v = 0.0;
                    for (std::size_t a = 0; a < e.size(); ++a)
                        v += e.w[a] * k.ground_potential(norm(x - e.q[a]));
                    psi.at(static_cast<int>(i), j, k3) = v;
                }
    });
    f.pi.fill(0.0);
    f.time = 0.0;
    f.analytic_tail = true;
    f.tail_mass = e.total_weight();
    return f;
}

void leapfrog_free_step(WaveField& f, double dt) {
    assert_cfl(dt, f.spacing());
    const int n = f.n();
    ScalarGrid lap(f.n(), f.halfwidth());
    auto half_kick = [&]() {
        parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t ii = lo; ii < hi; ++ii) {
                const int i = static_cast<int>(ii) + 1;
                for (int j = 1; j < n - 1; ++j)
                    for (int k = 1; k < n - 1; ++k)
                        f.pi.at(i, j, k) += 0.5 * dt * f.psi.laplacian_at(i, j, k);
            }
        });
    };
    half_kick();
    parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii) + 1;
            for (int j = 1; j < n - 1; ++j)
                for (int k = 1; k < n - 1; ++k) f.psi.at(i, j, k) += dt * f.pi.at(i, j, k);
        }
    });
    half_kick();
    f.time += dt;
}

double cube_tail_constant() {
    static const double kappa = [] {
        // int_{S^2} max(|O1|,|O2|,|O3|) dOmega by product quadrature.
        const GaussLegendre gl(256);
        double s = 0.0;
        const int nphi = 512;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double ct = gl.nodes[i];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            double row = 0.0;
            for (int j = 0; j < nphi; ++j) {
                const double phi = 2.0 * kPi * (j + 0.5) / nphi;
                const double ox = st * std::cos(phi), oy = st * std::sin(phi);
                row += std::max({std::abs(ox), std::abs(oy), std::abs(ct)});
            }
            s += gl.weights[i] * row * (2.0 * kPi / nphi);
        }
        return s;
    }();
    return kappa;
}

namespace {

double tail_h1_sq(const WaveField& f) {
    if (!f.analytic_tail || f.tail_mass == 0.0) return 0.0;
    const double m = f.tail_mass;
    return m * m * cube_tail_constant() / (16.0 * kPi * kPi * f.halfwidth());
}

// trapezoid weight: 1/2 per boundary axis, so the node sum matches the
// integral over the exact cube (the analytic tail continues it outside)
inline double rim_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

double interior_h1_sq(const ScalarGrid& g) {
    std::vector<double> buf(g.size(), 0.0);
    const int n = g.n();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            const double wi = rim_weight(i, n);
            for (int j = 0; j < n; ++j) {
                const double wj = wi * rim_weight(j, n);
                for (int k = 0; k < n; ++k)
                    buf[g.index(i, j, k)] =
                        wj * rim_weight(k, n) * norm2(g.gradient4_at(i, j, k));
            }
        }
    });
    const double h = g.spacing();
    return h * h * h * pairwise_sum_grid(buf);
}

double l2_sq(const ScalarGrid& g) {
    std::vector<double> buf(g.size());
    const double* p = g.data();
    for (std::size_t i = 0; i < g.size(); ++i) buf[i] = p[i] * p[i];
    const double h = g.spacing();
    return h * h * h * pairwise_sum_grid(buf);
}

} // namespace

double field_energy(const WaveField& f) {
    return 0.5 * (interior_h1_sq(f.psi) + tail_h1_sq(f) + l2_sq(f.pi));
}

double field_energy_discrete(const WaveField& f) {
    const ScalarGrid& g = f.psi;
    const int n = g.n();
    std::vector<double> buf(g.size(), 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    const double v = g.at(i, j, k);
                    if (i + 1 < n) {
                        const double d = (g.at(i + 1, j, k) - v);
                        s += d * d;
                    }
                    if (j + 1 < n) {
                        const double d = (g.at(i, j + 1, k) - v);
                        s += d * d;
                    }
                    if (k + 1 < n) {
                        const double d = (g.at(i, j, k + 1) - v);
                        s += d * d;
                    }
                    buf[g.index(i, j, k)] = s;
                }
        }
    });
    const double h = g.spacing();
    const double grad_sq = h * pairwise_sum_grid(buf); // (d/h)^2 * h^3 = d^2 h
    return 0.5 * (grad_sq + tail_h1_sq(f) + l2_sq(f.pi));
}

double psi_h1_norm(const WaveField& f) {
    return std::sqrt(interior_h1_sq(f.psi) + tail_h1_sq(f));
}

double pi_l2_norm(const WaveField& f) { return std::sqrt(l2_sq(f.pi)); }

double diff_h1_norm(const ScalarGrid& a, const ScalarGrid& b) {
    ScalarGrid d = a;
    d -= b;
    return std::sqrt(interior_h1_sq(d));
}

double diff_l2_norm(const ScalarGrid& a, const ScalarGrid& b) {
    ScalarGrid d = a;
    d -= b;
    return std::sqrt(l2_sq(d));
}

} // namespace wavekin
