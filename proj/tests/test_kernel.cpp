#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wavekin/field.hpp"
#include "wavekin/kernel.hpp"
#include "wavekin/numerics.hpp"
#include "wavekin/rng.hpp"

#include <cmath>
#include <complex>

using namespace wavekin;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent oracle: the inner bump and a 2D adaptive quadrature of the
// self-convolution, avoiding the library's tabulation path entirely.
double chi_oracle(double r, double a) {
    if (r >= a) return 0.0;
    const double c = 3465.0 / (512.0 * kPi * a * a * a);
    const double u = 1.0 - r * r / (a * a);
    return c * u * u * u * u;
}

double rho_oracle(double r, double a) {
    auto inner = [&](double s) {
        return adaptive_simpson(
            [&](double ct) {
                const double d2 = r * r + s * s - 2.0 * r * s * ct;
                return chi_oracle(std::sqrt(std::max(0.0, d2)), a);
            },
            -1.0, 1.0, 1e-12);
    };
    return 2.0 * kPi *
           adaptive_simpson([&](double s) { return s * s * chi_oracle(s, a) * inner(s); },
                            0.0, a, 1e-12);
}

Vec3 random_unit(Philox& rng) {
    const double ct = rng.uniform(-1.0, 1.0);
    const double st = std::sqrt(1.0 - ct * ct);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    return {st * std::cos(phi), st * std::sin(phi), ct};
}

ScalarGrid field_of(int n, double X, const std::function<double(const Vec3&)>& f) {
    ScalarGrid g(n, X);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) g.at(i, j, k) = f(g.node(i, j, k));
    return g;
}

} // namespace

TEST_CASE("profile values match the independent convolution oracle") {
    RegularizationKernel k(1.0);
    // frozen oracle values for eps = 1 (2D adaptive quadrature of chi * chi)
    CHECK(k.radial(0.0) == doctest::Approx(7.354709492153219).epsilon(1e-10));
    CHECK(k.radial(0.25) == doctest::Approx(3.672701505565210).epsilon(1e-10));
    CHECK(k.radial(0.5) == doctest::Approx(0.3517409550007383).epsilon(1e-9));
    // live oracle at one fresh radius
    CHECK(k.radial(0.37) == doctest::Approx(rho_oracle(0.37, 0.5)).epsilon(1e-9));
    // scaling: rho_eps(r) = rho_1(r/eps)/eps^3
    RegularizationKernel k2(0.5);
    CHECK(k2.radial(0.2) == doctest::Approx(k.radial(0.4) * 8.0).epsilon(1e-9));
}

TEST_CASE("unit mass, support, monotonicity, symmetry") {
    RegularizationKernel k(0.75);
    const GaussLegendre gl(512);
    const double mass = 4.0 * kPi * gl_integrate(gl, 0.0, k.radius(), [&](double r) {
        return r * r * k.radial(r);
    });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));

    CHECK(k.eval({0.75, 0, 0}) == 0.0);
    CHECK(k.eval({0.6, 0.6, 0.6}) == 0.0);
    CHECK(k.radial(0.0) > 0.0);
    double prev = k.radial(0.0);
    for (int i = 1; i <= 64; ++i) {
        const double v = k.radial(0.75 * i / 64.0);
        CHECK(v <= prev * (1.0 + 1e-12));
        CHECK(v >= 0.0);
        prev = v;
    }
    // rotational symmetry at random rotations (radial evaluation is exact)
    Philox rng(3);
    for (int it = 0; it < 32; ++it) {
        const Vec3 u = random_unit(rng);
        const double r = rng.uniform(0.0, 0.75);
        CHECK(k.eval(r * u) == doctest::Approx(k.radial(r)).epsilon(1e-14));
    }
}

TEST_CASE("Fourier transform is nonnegative on the 64^3 grid") {
    RegularizationKernel k(1.0);
    const int n = 64;
    const auto vals = k.sample_cube(n, 1.0);
    // separable naive DFT
    std::vector<std::complex<double>> a(vals.begin(), vals.end());
    auto idx = [&](int i, int j, int kk) { return (i * n + j) * n + kk; };
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<std::complex<double>> b(a.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int f = 0; f < n; ++f) {
                    std::complex<double> s = 0.0;
                    for (int t = 0; t < n; ++t) {
                        const double ang = -2.0 * kPi * f * t / n;
                        const int id = axis == 0 ? idx(t, i, j)
                                       : axis == 1 ? idx(i, t, j)
                                                   : idx(i, j, t);
                        s += a[id] * std::complex<double>(std::cos(ang), std::sin(ang));
                    }
                    const int od = axis == 0 ? idx(f, i, j)
                                   : axis == 1 ? idx(i, f, j)
                                               : idx(i, j, f);
                    b[od] = s;
                }
        a.swap(b);
    }
    double minre = 1e300, maxre = -1e300, maxim = 0.0;
    for (const auto& z : a) {
        minre = std::min(minre, z.real());
        maxre = std::max(maxre, z.real());
        maxim = std::max(maxim, std::abs(z.imag()));
    }
    CHECK(minre >= -1e-10 * maxre);
    CHECK(maxim <= 1e-8 * maxre);
}

TEST_CASE("cached constants") {
    RegularizationKernel k(1.0);
    const auto& C = k.constants();
    CHECK(C.support_volume == doctest::Approx(4.0 / 3.0 * kPi).epsilon(1e-14));
    CHECK(C.c_rho == doctest::Approx(std::sqrt(2.0 * C.support_volume) * C.lip).epsilon(1e-14));
    // frozen against the scratch oracle for eps = 1
    CHECK(C.l2 == doctest::Approx(1.6699795241185666).epsilon(1e-8));
    CHECK(C.grad_l2 == doctest::Approx(9.98255688616698).epsilon(1e-6));
    CHECK(C.lip == doctest::Approx(21.340425830739935).epsilon(1e-6));
    // two independent quadrature routes: ||rho||_L2^2 = (rho * rho)(0)
    const double via_oracle =
        4.0 * kPi * adaptive_simpson(
                        [&](double r) {
                            const double v = rho_oracle(r, 0.5);
                            return r * r * v * v;
                        },
                        0.0, 1.0, 1e-11);
    CHECK(C.l2 * C.l2 == doctest::Approx(via_oracle).epsilon(1e-7));
    // ground potential: point value outside the support is exactly Coulomb
    CHECK(k.ground_potential(2.0) == doctest::Approx(-1.0 / (8.0 * kPi)).epsilon(1e-14));
    CHECK(k.ground_potential(0.0) == doctest::Approx(-0.3152018353779954).epsilon(1e-7));
}

TEST_CASE("point convolutions against closed forms") {
    RegularizationKernel k(0.75);
    const int n = 64;
    const double X = 3.0;

    SUBCASE("constant field") {
        const auto g = field_of(n, X, [](const Vec3&) { return 2.5; });
        CHECK(k.convolve_scalar(g, {0.3, -0.2, 0.1}) == doctest::Approx(2.5).epsilon(1e-6));
        const Vec3 gr = k.convolve_grad(g, {0.3, -0.2, 0.1});
        CHECK(norm(gr) < 1e-10);
        const Vec3 tq = k.convolve_torque(g, {0.3, -0.2, 0.1});
        CHECK(norm(tq) < 1e-10);
        // collocated routes
        CHECK(k.convolve_scalar_collocated(g, {0.3, -0.2, 0.1}) ==
              doctest::Approx(2.5).epsilon(1e-6));
        CHECK(norm(k.convolve_gradrho_collocated(g, {0.3, -0.2, 0.1})) < 1e-5);
    }

    SUBCASE("affine field picks out the value and slope at the center") {
        const Vec3 a{0.7, -0.4, 0.2};
        const auto g = field_of(n, X, [&](const Vec3& x) { return dot(a, x) + 0.3; });
        const Vec3 q{0.25, 0.5, -0.75};
        CHECK(k.convolve_scalar(g, q) == doctest::Approx(dot(a, q) + 0.3).epsilon(1e-6));
        const Vec3 gr = k.convolve_grad(g, q);
        CHECK(gr.x == doctest::Approx(a.x).epsilon(1e-6));
        CHECK(gr.y == doctest::Approx(a.y).epsilon(1e-6));
        CHECK(gr.z == doctest::Approx(a.z).epsilon(1e-6));
        // the collocated route integrates by parts onto the kernel:
        // h^3 sum grad_rho g = -(rho * grad g)
        const Vec3 gr2 = -1.0 * k.convolve_gradrho_collocated(g, q);
        CHECK(gr2.x == doctest::Approx(a.x).epsilon(1e-6));
        CHECK(gr2.y == doctest::Approx(a.y).epsilon(1e-6));
    }

    SUBCASE("kernel against itself peaks at the L2 norm squared") {
        const auto g = field_of(n, X, [&](const Vec3& x) { return k.eval(x); });
        const double want = k.constants().l2 * k.constants().l2;
        // the collocated route resolves the peaked product to quadrature level
        CHECK(k.convolve_scalar_collocated(g, {0, 0, 0}) ==
              doctest::Approx(want).epsilon(1e-3));
        // the fixed-order rule needs a high order for this extreme integrand
        RegularizationKernel k24(0.75, 24);
        CHECK(k24.convolve_scalar(g, {0, 0, 0}) == doctest::Approx(want).epsilon(1e-2));
    }

    SUBCASE("odd moments vanish: linear coordinate maps to the center value") {
        const auto g = field_of(n, X, [](const Vec3& x) { return x.x; });
        CHECK(k.convolve_scalar(g, {0.4, 0.1, 0.0}) == doctest::Approx(0.4).epsilon(1e-6));
    }

    SUBCASE("radial ground potential centered at the point gives zero gradient") {
        const Vec3 q{0.2, -0.3, 0.4};
        const auto g =
            field_of(n, X, [&](const Vec3& x) { return k.ground_potential(norm(x - q)); });
        CHECK(norm(k.convolve_grad(g, q)) < 1e-2);     // fixed-order rule floor
        CHECK(norm(k.convolve_gradrho_collocated(g, q)) < 1e-5);
    }

    SUBCASE("support leaving the box throws") {
        const auto g = field_of(32, 1.0, [](const Vec3&) { return 1.0; });
        CHECK_THROWS_AS((void)k.convolve_scalar(g, {0.5, 0, 0}), std::domain_error);
        CHECK_THROWS_AS((void)k.convolve_grad(g, {0.9, 0, 0}), std::domain_error);
    }
}

TEST_CASE("torque diagnostic vanishes at second order under refinement") {
    RegularizationKernel k(0.75, 12); // above the default rule's error floor
    // a generic smooth field
    auto smooth = [](const Vec3& x) {
        return std::sin(1.3 * x.x + 0.4) * std::cos(0.9 * x.y) +
               0.5 * std::exp(-norm2(x - Vec3{0.4, -0.2, 0.3}));
    };
    Philox rng(17);
    double coarse = 0.0, fine = 0.0;
    const auto gc = field_of(48, 3.0, smooth);
    const auto gf = field_of(96, 3.0, smooth);
    for (int it = 0; it < 10; ++it) {
        const Vec3 x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        coarse = std::max(coarse, norm(k.convolve_torque(gc, x)));
        fine = std::max(fine, norm(k.convolve_torque(gf, x)));
    }
    CHECK(coarse < 2e-3);
    CHECK(fine < coarse / 3.0); // ~h^2
}
