#pragma once

#include "wavekin/geometry.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wavekin {

/// Uniform node-centered cubic grid on [-X, X]^3 with n nodes per axis,
/// spacing h = 2X/(n-1). Storage row-major with the z index fastest.
class ScalarGrid {
  public:
    ScalarGrid() = default;
    ScalarGrid(int n, double halfwidth)
        : n_(n), X_(halfwidth), h_(2.0 * halfwidth / (n - 1)),
          v_(static_cast<std::size_t>(n) * n * n, 0.0) {
        if (n < 4) throw std::invalid_argument("ScalarGrid: n must be >= 4");
    }

    int n() const { return n_; }
    double halfwidth() const { return X_; }
    double spacing() const { return h_; }
    std::size_t size() const { return v_.size(); }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }
    double& at(int i, int j, int k) { return v_[index(i, j, k)]; }
    double at(int i, int j, int k) const { return v_[index(i, j, k)]; }

    double coord(int i) const { return -X_ + h_ * i; }
    Vec3 node(int i, int j, int k) const { return {coord(i), coord(j), coord(k)}; }

    bool contains_ball(const Vec3& c, double r) const {
        return c.x - r >= -X_ && c.x + r <= X_ && c.y - r >= -X_ && c.y + r <= X_ &&
               c.z - r >= -X_ && c.z + r <= X_;
    }

    /// Trilinear interpolation; x must lie inside the box.
    double interp(const Vec3& x) const;

    /// Spatial gradient of the trilinear interpolant at x (exact derivative
    /// of the interpolation, piecewise per cell).
    Vec3 interp_gradient(const Vec3& x) const;

    /// Trilinear interpolation of the centered-difference node gradients;
    /// second-order accurate and smooth enough for kernel quadrature.
    Vec3 interp_node_gradient(const Vec3& x) const;

    /// Centered-difference gradient at a node (one-sided on the rim).
    Vec3 gradient_at(int i, int j, int k) const;

    /// High-order centered gradient (6th order in the deep interior, falling
    /// back to 4th/2nd near the rim); used by the energy and momentum
    /// functionals where quadrature accuracy matters.
    Vec3 gradient4_at(int i, int j, int k) const;

    /// 7-point Laplacian at an interior node.
    double laplacian_at(int i, int j, int k) const {
        const double c = at(i, j, k);
        return (at(i + 1, j, k) + at(i - 1, j, k) + at(i, j + 1, k) + at(i, j - 1, k) +
                at(i, j, k + 1) + at(i, j, k - 1) - 6.0 * c) /
               (h_ * h_);
    }

    /// h^3 * sum of all node values (deterministic pairwise reduction).
    double integral() const;

    /// h^3 * sum f(node, value); f filled into a buffer then pairwise-summed.
    /// Buffer order is fixed, so the result does not depend on threading.
    template <class F>
    double integral_of(F&& f) const;

    void fill(double v) { std::fill(v_.begin(), v_.end(), v); }

    ScalarGrid& operator+=(const ScalarGrid& o);
    ScalarGrid& operator-=(const ScalarGrid& o);
    ScalarGrid& operator*=(double s);

    /// Index range [lo, hi] of nodes within distance r of c along one axis.
    void clamp_range(double c, double r, int& lo, int& hi) const;

  private:
    int n_ = 0;
    double X_ = 0.0, h_ = 1.0;
    std::vector<double> v_;
};

double grid_dot(const ScalarGrid& a, const ScalarGrid& b); // h^3 <a, b>
double pairwise_sum_grid(const std::vector<double>& v);

template <class F>
double ScalarGrid::integral_of(F&& f) const {
    std::vector<double> buf(v_.size());
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) {
                const std::size_t id = index(i, j, k);
                buf[id] = f(i, j, k, v_[id]);
            }
    return h_ * h_ * h_ * pairwise_sum_grid(buf);
}

} // namespace wavekin
