#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace wavekin {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n);
};

/// Maps a rule to the interval [a, b].
inline void gl_map(const GaussLegendre& gl, double a, double b,
                   std::vector<double>& x, std::vector<double>& w) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    x.resize(gl.nodes.size());
    w.resize(gl.nodes.size());
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        x[i] = c + hw * gl.nodes[i];
        w[i] = hw * gl.weights[i];
    }
}

/// Integrates f over [a, b] with a fixed-order Gauss-Legendre rule.
double gl_integrate(const GaussLegendre& gl, double a, double b,
                    const std::function<double(double)>& f);

/// Natural cubic spline with optional clamped end slopes.
/// Evaluation outside [x_front, x_back] returns the boundary value
/// (used for compactly supported kernels where the value is 0 beyond the edge).
class CubicSpline {
  public:
    CubicSpline() = default;
    /// Uniformly spaced samples y on [a, b]; slopes at the ends are clamped
    /// to d_a, d_b when clamped = true, otherwise natural (y'' = 0).
    CubicSpline(double a, double b, std::vector<double> y,
                bool clamped = false, double d_a = 0.0, double d_b = 0.0);

    double eval(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;

    double a() const { return a_; }
    double b() const { return b_; }

  private:
    double a_ = 0.0, b_ = 1.0, h_ = 1.0;
    std::vector<double> y_;   // values
    std::vector<double> y2_;  // second derivatives at the knots

    void locate(double x, int& i, double& t) const;
};

/// Deterministic pairwise summation; result is independent of threading as
/// long as the element order is fixed.
double pairwise_sum(std::span<const double> v);

/// Adaptive Simpson quadrature (used mostly by test oracles and one-off
/// constants where fixed-order rules are awkward).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 30);

/// Determinant of a small dense matrix (row-major, n <= 8) via partial-pivot LU.
double small_det(std::vector<double> m, int n);

/// Jacobi eigenvalues of a symmetric matrix (row-major n x n), ascending.
std::vector<double> symmetric_eigenvalues(std::vector<double> m, int n);

/// Piecewise-constant function on [0, inf): value v[i] on [t[i], t[i+1]).
struct PiecewiseConstant {
    std::vector<double> knots;  // ascending, knots.front() == 0
    std::vector<double> values; // values.size() == knots.size(); last extends to inf

    double operator()(double t) const {
        if (values.empty()) return 0.0;
        std::size_t i = 0;
        while (i + 1 < knots.size() && t >= knots[i + 1]) ++i;
        return values[i];
    }
};

} // namespace wavekin
