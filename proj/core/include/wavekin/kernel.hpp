#pragma once

#include "wavekin/geometry.hpp"
#include "wavekin/numerics.hpp"

#include <string>
#include <vector>

namespace wavekin {

class ScalarGrid; // grid.hpp

/// Cached norms and seminorms of the smearing density.
struct KernelConstants {
    double l2 = 0.0;        // ||rho||_L2
    double grad_l2 = 0.0;   // ||grad rho||_L2
    double hess_l2 = 0.0;   // ||grad x grad rho||_L2 (Frobenius)
    double lip = 0.0;       // Lipschitz seminorm, max_r |rho'(r)|
    double c_rho = 0.0;     // sqrt(2 |supp rho|) * lip
    double support_volume = 0.0;
};

/// Point-quadrature rule for convolutions: precomputed offsets inside the
/// support ball with weights already multiplied by the kernel factor.
struct ConvolutionRule {
    std::vector<Vec3> offsets;
    std::vector<double> w_rho;      // quad weight * rho(offset)
    std::vector<Vec3> w_grad_rho;   // quad weight * grad rho(offset)
};

/// The smearing density: the self-convolution chi * chi of the normalized
/// polynomial bump chi(x) = c (1 - |x|^2/(eps/2)^2)^4 on |x| < eps/2.
///
/// The self-convolution form keeps the Fourier transform nonnegative, the
/// support equal to the closed eps-ball, and the profile radial, smooth and
/// non-increasing. All radial quantities are tabulated once at construction
/// (512-node Gauss-Legendre pieces on a 4096-point table) and served through
/// cubic splines; the object is immutable afterwards and safe to share.
class RegularizationKernel {
  public:
    explicit RegularizationKernel(double radius, int quad_order_per_axis = 8,
                                  int radial_table_n = 4096);

    double radius() const { return eps_; }
    int quad_order() const { return quad_order_; }
    const KernelConstants& constants() const { return constants_; }

    /// rho(|x|); zero outside the support.
    double eval(const Vec3& x) const { return radial(norm(x)); }
    double radial(double r) const;
    double radial_deriv(double r) const;
    double radial_deriv2(double r) const;

    /// grad rho(x) = rho'(r) x/r.
    Vec3 grad(const Vec3& x) const;
    /// Hessian of rho at x (radial formula).
    Mat3 hessian(const Vec3& x) const;

    /// Ground-state potential psi_rho(r) = -(1/4pi)(|.|^{-1} * rho)(r) and its
    /// radial derivatives; for r >= eps this is exactly -1/(4 pi r).
    double ground_potential(double r) const;
    double ground_potential_deriv(double r) const;
    double ground_potential_deriv2(double r) const;

    /// (rho * g)(x) by fixed-order Gauss-Legendre quadrature over the support
    /// with trilinear interpolation of g. Throws std::domain_error when the
    /// eps-ball around x leaves the grid box.
    double convolve_scalar(const ScalarGrid& g, const Vec3& x) const;

    /// (rho * grad g)(x); the gradient of g by centered differences on the grid.
    Vec3 convolve_grad(const ScalarGrid& g, const Vec3& x) const;

    /// (rho Id *x grad g)(x) = int rho(y-x)(y-x) x grad g(y) dy.
    /// Analytically zero for the radial kernel; the returned magnitude is a
    /// discretization diagnostic.
    Vec3 convolve_torque(const ScalarGrid& g, const Vec3& x) const;

    /// Grid-collocated convolution (rho * g)(x) = h^3 sum_g rho(x_g - x) g_g.
    /// Spectrally accurate for smooth g since the integrand is compactly
    /// supported; used by the energy functional.
    double convolve_scalar_collocated(const ScalarGrid& g, const Vec3& x) const;

    /// Grid-collocated h^3 sum_g grad rho(x_g - x) g_g, which equals
    /// -(rho * grad g)(x) after integration by parts; the force
    /// -(rho * grad psi)(q) is therefore this sum itself. It is the exact
    /// q-gradient of the collocated coupling term, so the particle push
    /// stays symplectic.
    Vec3 convolve_gradrho_collocated(const ScalarGrid& g, const Vec3& x) const;

    const ConvolutionRule& rule() const { return rule_; }

    /// Samples rho on an n^3 grid over [-halfwidth, halfwidth]^3 (row-major,
    /// k fastest) for the Fourier nonnegativity check.
    std::vector<double> sample_cube(int n, double halfwidth) const;

  private:
    double eps_;
    int quad_order_;
    KernelConstants constants_;
    CubicSpline rho_;        // rho(r) on [0, eps]
    CubicSpline mass_;       // M(r) = 4 pi int_0^r s^2 rho(s) ds
    CubicSpline shell_;      // S(r) = 4 pi int_r^eps s rho(s) ds
    ConvolutionRule rule_;

    void build_tables(int table_n);
    void build_rule();
};

} // namespace wavekin
