#include "wavekin/kernel.hpp"

#include "wavekin/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavekin {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// The inner bump chi(r) = c (1 - r^2/a^2)^4 on [0, a), normalized to unit mass:
/// c = 3465 / (512 pi a^3).
struct Bump {
    double a;
    double c;
    explicit Bump(double a_) : a(a_), c(3465.0 / (512.0 * kPi * a * a * a)) {}

    double operator()(double r) const {
        if (r >= a) return 0.0;
        const double u = 1.0 - (r * r) / (a * a);
        const double u2 = u * u;
        return c * u2 * u2;
    }

    /// G(u) = int_0^u t chi(t) dt, closed form; constant for u >= a.
    double G(double u) const {
        if (u <= 0.0) return 0.0;
        if (u >= a) return c * a * a / 10.0;
        const double w = 1.0 - (u * u) / (a * a);
        const double w5 = w * w * w * w * w;
        return c * a * a * (1.0 - w5) / 10.0;
    }
};

/// (chi * chi)(r) by the radial convolution formula with the inner integral
/// in closed form. The outer integrand is piecewise smooth with breakpoints
/// at s = r and s = |a - r|, so we integrate with Gauss-Legendre per piece.
double self_convolution(const Bump& chi, const GaussLegendre& gl, double r) {
    const double a = chi.a;
    if (r >= 2.0 * a) return 0.0;
    if (r < 1e-9 * a) {
        // limit: (chi*chi)(0) = 4 pi int s^2 chi(s)^2 ds
        auto f = [&](double s) { return s * s * chi(s) * chi(s); };
        return 4.0 * kPi * gl_integrate(gl, 0.0, a, f);
    }
    auto integrand = [&](double s) {
        return s * chi(s) * (chi.G(r + s) - chi.G(std::abs(r - s)));
    };
    std::vector<double> cuts = {0.0, a};
    if (r < a) cuts.push_back(r);
    const double ar = std::abs(a - r);
    if (ar > 0.0 && ar < a) cuts.push_back(ar);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) total += gl_integrate(gl, cuts[i], cuts[i + 1], integrand);
    return (2.0 * kPi / r) * total;
}

} // namespace

RegularizationKernel::RegularizationKernel(double radius, int quad_order_per_axis,
                                           int radial_table_n)
    : eps_(radius), quad_order_(quad_order_per_axis) {
    if (radius <= 0.0) throw std::invalid_argument("kernel radius must be positive");
    if (quad_order_per_axis < 2) throw std::invalid_argument("quadrature order must be >= 2");
    build_tables(radial_table_n);
    build_rule();
}

void RegularizationKernel::build_tables(int table_n) {
    const Bump chi(0.5 * eps_);
    const GaussLegendre gl(128);

    std::vector<double> rho(table_n);
    const double dr = eps_ / (table_n - 1);
    for (int i = 0; i < table_n; ++i) rho[i] = self_convolution(chi, gl, i * dr);
    rho.back() = 0.0;
    rho_ = CubicSpline(0.0, eps_, std::move(rho), /*clamped=*/true, 0.0, 0.0);

    // Cumulative mass M(r) and shell integral S(r) for the ground potential.
    const GaussLegendre gseg(16);
    std::vector<double> mass(table_n), shell(table_n);
    mass[0] = 0.0;
    for (int i = 1; i < table_n; ++i) {
        auto f = [&](double s) { return s * s * rho_.eval(s); };
        mass[i] = mass[i - 1] + 4.0 * kPi * gl_integrate(gseg, (i - 1) * dr, i * dr, f);
    }
    shell[table_n - 1] = 0.0;
    for (int i = table_n - 2; i >= 0; --i) {
        auto f = [&](double s) { return s * rho_.eval(s); };
        shell[i] = shell[i + 1] + 4.0 * kPi * gl_integrate(gseg, i * dr, (i + 1) * dr, f);
    }
    mass_ = CubicSpline(0.0, eps_, std::move(mass), true, 0.0, 0.0);
    shell_ = CubicSpline(0.0, eps_, std::move(shell), true, 0.0, -4.0 * kPi * eps_ * rho_.eval(eps_));

    // Constants by 512-node radial quadrature on the tabulated profile.
    const GaussLegendre g512(512);
    auto r2 = [](double r) { return r * r; };
    const double l2sq = 4.0 * kPi * gl_integrate(g512, 0.0, eps_, [&](double r) {
        const double v = rho_.eval(r);
        return r2(r) * v * v;
    });
    const double gl2sq = 4.0 * kPi * gl_integrate(g512, 0.0, eps_, [&](double r) {
        const double d = rho_.deriv(r);
        return r2(r) * d * d;
    });
    const double hl2sq = 4.0 * kPi * gl_integrate(g512, 1e-9 * eps_, eps_, [&](double r) {
        const double d2 = rho_.deriv2(r);
        const double dr_over_r = rho_.deriv(r) / r;
        return r2(r) * (d2 * d2 + 2.0 * dr_over_r * dr_over_r);
    });
    double lip = 0.0;
    for (int i = 0; i < 8 * table_n; ++i)
        lip = std::max(lip, std::abs(rho_.deriv(eps_ * (i + 0.5) / (8.0 * table_n))));

    constants_.l2 = std::sqrt(l2sq);
    constants_.grad_l2 = std::sqrt(gl2sq);
    constants_.hess_l2 = std::sqrt(hl2sq);
    constants_.lip = lip;
    constants_.support_volume = 4.0 / 3.0 * kPi * eps_ * eps_ * eps_;
    constants_.c_rho = std::sqrt(2.0 * constants_.support_volume) * lip;
}

void RegularizationKernel::build_rule() {
    const GaussLegendre gl(quad_order_);
    std::vector<double> x, w;
    gl_map(gl, -eps_, eps_, x, w);
    rule_.offsets.clear();
    rule_.w_rho.clear();
    rule_.w_grad_rho.clear();
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            for (std::size_t k = 0; k < x.size(); ++k) {
                const Vec3 u{x[i], x[j], x[k]};
                const double r = norm(u);
                if (r >= eps_) continue;
                const double ww = w[i] * w[j] * w[k];
                rule_.offsets.push_back(u);
                rule_.w_rho.push_back(ww * radial(r));
                rule_.w_grad_rho.push_back(ww * grad(u));
            }
    // normalize so the rule preserves the kernel's unit mass exactly; the raw
    // fixed-order quadrature misses by O(1%) at the default order
    double mass = 0.0;
    for (double v : rule_.w_rho) mass += v;
    for (double& v : rule_.w_rho) v /= mass;
    for (Vec3& v : rule_.w_grad_rho) v *= 1.0 / mass;
}

double RegularizationKernel::radial(double r) const {
    if (r >= eps_) return 0.0;
    return rho_.eval(r);
}

double RegularizationKernel::radial_deriv(double r) const {
    if (r >= eps_) return 0.0;
    return rho_.deriv(r);
}

double RegularizationKernel::radial_deriv2(double r) const {
    if (r >= eps_) return 0.0;
    return rho_.deriv2(r);
}

Vec3 RegularizationKernel::grad(const Vec3& x) const {
    const double r = norm(x);
    if (r >= eps_ || r < 1e-14) return {0.0, 0.0, 0.0};
    return (rho_.deriv(r) / r) * x;
}

Mat3 RegularizationKernel::hessian(const Vec3& x) const {
    Mat3 H;
    const double r = norm(x);
    if (r >= eps_) return H;
    if (r < 1e-10 * eps_) {
        const double d2 = rho_.deriv2(0.0);
        H(0, 0) = H(1, 1) = H(2, 2) = d2;
        return H;
    }
    const double d1 = rho_.deriv(r), d2 = rho_.deriv2(r);
    const double inv_r = 1.0 / r;
    const Vec3 u = inv_r * x;
    const double radial_part = d2 - d1 * inv_r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) H(i, j) = radial_part * u[i] * u[j];
    H(0, 0) += d1 * inv_r;
    H(1, 1) += d1 * inv_r;
    H(2, 2) += d1 * inv_r;
    return H;
}

double RegularizationKernel::ground_potential(double r) const {
    if (r >= eps_) return -1.0 / (4.0 * kPi * r);
    const double pot = (r > 1e-12 ? mass_.eval(r) / r : 0.0) + shell_.eval(r);
    return -pot / (4.0 * kPi);
}

double RegularizationKernel::ground_potential_deriv(double r) const {
    if (r >= eps_) return 1.0 / (4.0 * kPi * r * r);
    if (r < 1e-12) return 0.0;
    return mass_.eval(r) / (4.0 * kPi * r * r);
}

double RegularizationKernel::ground_potential_deriv2(double r) const {
    // Poisson: psi'' = rho - 2 psi'/r; at the origin psi'' = rho(0)/3.
    if (r >= eps_) return -2.0 / (4.0 * kPi * r * r * r);
    if (r < 1e-9 * eps_) return rho_.eval(0.0) / 3.0;
    return rho_.eval(r) - 2.0 * ground_potential_deriv(r) / r;
}

double RegularizationKernel::convolve_scalar(const ScalarGrid& g, const Vec3& x) const {
    if (!g.contains_ball(x, eps_))
        throw std::domain_error("convolve_scalar: support ball leaves the grid box");
    double s = 0.0;
    for (std::size_t a = 0; a < rule_.offsets.size(); ++a)
        s += rule_.w_rho[a] * g.interp(x + rule_.offsets[a]);
    return s;
}

Vec3 RegularizationKernel::convolve_grad(const ScalarGrid& g, const Vec3& x) const {
    if (!g.contains_ball(x, eps_))
        throw std::domain_error("convolve_grad: support ball leaves the grid box");
    Vec3 s;
    for (std::size_t a = 0; a < rule_.offsets.size(); ++a)
        s += rule_.w_rho[a] * g.interp_node_gradient(x + rule_.offsets[a]);
    return s;
}

Vec3 RegularizationKernel::convolve_torque(const ScalarGrid& g, const Vec3& x) const {
    if (!g.contains_ball(x, eps_))
        throw std::domain_error("convolve_torque: support ball leaves the grid box");
    Vec3 s;
    for (std::size_t a = 0; a < rule_.offsets.size(); ++a) {
        const Vec3& u = rule_.offsets[a];
        s += rule_.w_rho[a] * cross(u, g.interp_node_gradient(x + u));
    }
    return s;
}

double RegularizationKernel::convolve_scalar_collocated(const ScalarGrid& g,
                                                        const Vec3& x) const {
    if (!g.contains_ball(x, eps_))
        throw std::domain_error("convolve_scalar_collocated: support ball leaves the grid box");
    int ilo, ihi, jlo, jhi, klo, khi;
    g.clamp_range(x.x, eps_, ilo, ihi);
    g.clamp_range(x.y, eps_, jlo, jhi);
    g.clamp_range(x.z, eps_, klo, khi);
    const double h3 = g.spacing() * g.spacing() * g.spacing();
    double s = 0.0;
    for (int i = ilo; i <= ihi; ++i) {
        const double dx = g.coord(i) - x.x;
        for (int j = jlo; j <= jhi; ++j) {
            const double dy = g.coord(j) - x.y;
            const double rxy2 = dx * dx + dy * dy;
            if (rxy2 >= eps_ * eps_) continue;
            for (int k = klo; k <= khi; ++k) {
                const double dz = g.coord(k) - x.z;
                const double r = std::sqrt(rxy2 + dz * dz);
                if (r >= eps_) continue;
                s += rho_.eval(r) * g.at(i, j, k);
            }
        }
    }
    return h3 * s;
}

Vec3 RegularizationKernel::convolve_gradrho_collocated(const ScalarGrid& g,
                                                       const Vec3& x) const {
    if (!g.contains_ball(x, eps_))
        throw std::domain_error("convolve_gradrho_collocated: support ball leaves the grid box");
    int ilo, ihi, jlo, jhi, klo, khi;
    g.clamp_range(x.x, eps_, ilo, ihi);
    g.clamp_range(x.y, eps_, jlo, jhi);
    g.clamp_range(x.z, eps_, klo, khi);
    const double h3 = g.spacing() * g.spacing() * g.spacing();
    Vec3 s;
    for (int i = ilo; i <= ihi; ++i) {
        const double dx = g.coord(i) - x.x;
        for (int j = jlo; j <= jhi; ++j) {
            const double dy = g.coord(j) - x.y;
            const double rxy2 = dx * dx + dy * dy;
            if (rxy2 >= eps_ * eps_) continue;
            for (int k = klo; k <= khi; ++k) {
                const double dz = g.coord(k) - x.z;
                const double r = std::sqrt(rxy2 + dz * dz);
                if (r >= eps_ || r < 1e-14) continue;
                const double f = rho_.deriv(r) / r * g.at(i, j, k);
                s.x += f * dx;
                s.y += f * dy;
                s.z += f * dz;
            }
        }
    }
    return h3 * s;
}

std::vector<double> RegularizationKernel::sample_cube(int n, double halfwidth) const {
    // Periodic sampling with the origin at index 0 (indices past n/2 wrap to
    // negative coordinates): the DFT of this arrangement is the alias sum of
    // the nonnegative continuous transform, so it stays >= 0 up to roundoff.
    std::vector<double> v(static_cast<std::size_t>(n) * n * n);
    const double h = 2.0 * halfwidth / n;
    auto coord = [&](int i) { return (i <= n / 2) ? i * h : (i - n) * h; };
    std::size_t id = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) v[id++] = eval({coord(i), coord(j), coord(k)});
    return v;
}

} // namespace wavekin
