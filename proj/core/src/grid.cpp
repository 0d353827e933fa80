#include "wavekin/grid.hpp"

#include "wavekin/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace wavekin {

double pairwise_sum_grid(const std::vector<double>& v) {
    return pairwise_sum(std::span<const double>(v.data(), v.size()));
}

double ScalarGrid::interp(const Vec3& x) const {
    const double sx = (x.x + X_) / h_, sy = (x.y + X_) / h_, sz = (x.z + X_) / h_;
    int i = static_cast<int>(std::floor(sx));
    int j = static_cast<int>(std::floor(sy));
    int k = static_cast<int>(std::floor(sz));
    i = std::clamp(i, 0, n_ - 2);
    j = std::clamp(j, 0, n_ - 2);
    k = std::clamp(k, 0, n_ - 2);
    const double tx = sx - i, ty = sy - j, tz = sz - k;
    if (tx < -1e-9 || ty < -1e-9 || tz < -1e-9 || tx > 1.0 + 1e-9 || ty > 1.0 + 1e-9 ||
        tz > 1.0 + 1e-9)
        throw std::domain_error("ScalarGrid::interp: point outside box");
    auto v = [&](int a, int b, int c) { return at(i + a, j + b, k + c); };
    const double c00 = v(0, 0, 0) * (1 - tx) + v(1, 0, 0) * tx;
    const double c01 = v(0, 0, 1) * (1 - tx) + v(1, 0, 1) * tx;
    const double c10 = v(0, 1, 0) * (1 - tx) + v(1, 1, 0) * tx;
    const double c11 = v(0, 1, 1) * (1 - tx) + v(1, 1, 1) * tx;
    const double c0 = c00 * (1 - ty) + c10 * ty;
    const double c1 = c01 * (1 - ty) + c11 * ty;
    return c0 * (1 - tz) + c1 * tz;
}

Vec3 ScalarGrid::interp_gradient(const Vec3& x) const {
    const double sx = (x.x + X_) / h_, sy = (x.y + X_) / h_, sz = (x.z + X_) / h_;
    int i = static_cast<int>(std::floor(sx));
    int j = static_cast<int>(std::floor(sy));
    int k = static_cast<int>(std::floor(sz));
    i = std::clamp(i, 0, n_ - 2);
    j = std::clamp(j, 0, n_ - 2);
    k = std::clamp(k, 0, n_ - 2);
    const double tx = sx - i, ty = sy - j, tz = sz - k;
    auto v = [&](int a, int b, int c) { return at(i + a, j + b, k + c); };
    const double v000 = v(0, 0, 0), v100 = v(1, 0, 0), v010 = v(0, 1, 0), v110 = v(1, 1, 0);
    const double v001 = v(0, 0, 1), v101 = v(1, 0, 1), v011 = v(0, 1, 1), v111 = v(1, 1, 1);
    Vec3 g;
    g.x = ((v100 - v000) * (1 - ty) + (v110 - v010) * ty) * (1 - tz) +
          ((v101 - v001) * (1 - ty) + (v111 - v011) * ty) * tz;
    g.y = ((v010 - v000) * (1 - tx) + (v110 - v100) * tx) * (1 - tz) +
          ((v011 - v001) * (1 - tx) + (v111 - v101) * tx) * tz;
    g.z = ((v001 - v000) * (1 - tx) + (v101 - v100) * tx) * (1 - ty) +
          ((v011 - v010) * (1 - tx) + (v111 - v110) * tx) * ty;
    return (1.0 / h_) * g;
}

Vec3 ScalarGrid::interp_node_gradient(const Vec3& x) const {
    const double sx = (x.x + X_) / h_, sy = (x.y + X_) / h_, sz = (x.z + X_) / h_;
    int i = static_cast<int>(std::floor(sx));
    int j = static_cast<int>(std::floor(sy));
    int k = static_cast<int>(std::floor(sz));
    i = std::clamp(i, 0, n_ - 2);
    j = std::clamp(j, 0, n_ - 2);
    k = std::clamp(k, 0, n_ - 2);
    const double tx = sx - i, ty = sy - j, tz = sz - k;
    Vec3 g;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const double w = (a ? tx : 1 - tx) * (b ? ty : 1 - ty) * (c ? tz : 1 - tz);
                if (w == 0.0) continue;
                g += w * gradient_at(i + a, j + b, k + c);
            }
    return g;
}

Vec3 ScalarGrid::gradient_at(int i, int j, int k) const {
    Vec3 g;
    if (i == 0)
        g.x = (at(i + 1, j, k) - at(i, j, k)) / h_;
    else if (i == n_ - 1)
        g.x = (at(i, j, k) - at(i - 1, j, k)) / h_;
    else
        g.x = (at(i + 1, j, k) - at(i - 1, j, k)) / (2.0 * h_);
    if (j == 0)
        g.y = (at(i, j + 1, k) - at(i, j, k)) / h_;
    else if (j == n_ - 1)
        g.y = (at(i, j, k) - at(i, j - 1, k)) / h_;
    else
        g.y = (at(i, j + 1, k) - at(i, j - 1, k)) / (2.0 * h_);
    if (k == 0)
        g.z = (at(i, j, k + 1) - at(i, j, k)) / h_;
    else if (k == n_ - 1)
        g.z = (at(i, j, k) - at(i, j, k - 1)) / h_;
    else
        g.z = (at(i, j, k + 1) - at(i, j, k - 1)) / (2.0 * h_);
    return g;
}

Vec3 ScalarGrid::gradient4_at(int i, int j, int k) const {
    if (i < 3 || i > n_ - 4 || j < 3 || j > n_ - 4 || k < 3 || k > n_ - 4) {
        if (i < 2 || i > n_ - 3 || j < 2 || j > n_ - 3 || k < 2 || k > n_ - 3)
            return gradient_at(i, j, k);
        const double c1 = 8.0 / (12.0 * h_), c2 = 1.0 / (12.0 * h_);
        Vec3 g;
        g.x = c1 * (at(i + 1, j, k) - at(i - 1, j, k)) -
              c2 * (at(i + 2, j, k) - at(i - 2, j, k));
        g.y = c1 * (at(i, j + 1, k) - at(i, j - 1, k)) -
              c2 * (at(i, j + 2, k) - at(i, j - 2, k));
        g.z = c1 * (at(i, j, k + 1) - at(i, j, k - 1)) -
              c2 * (at(i, j, k + 2) - at(i, j, k - 2));
        return g;
    }
    // 6th-order centered stencil in the deep interior
    const double c1 = 45.0 / (60.0 * h_), c2 = 9.0 / (60.0 * h_), c3 = 1.0 / (60.0 * h_);
    Vec3 g;
    g.x = c1 * (at(i + 1, j, k) - at(i - 1, j, k)) - c2 * (at(i + 2, j, k) - at(i - 2, j, k)) +
          c3 * (at(i + 3, j, k) - at(i - 3, j, k));
    g.y = c1 * (at(i, j + 1, k) - at(i, j - 1, k)) - c2 * (at(i, j + 2, k) - at(i, j - 2, k)) +
          c3 * (at(i, j + 3, k) - at(i, j - 3, k));
    g.z = c1 * (at(i, j, k + 1) - at(i, j, k - 1)) - c2 * (at(i, j, k + 2) - at(i, j, k - 2)) +
          c3 * (at(i, j, k + 3) - at(i, j, k - 3));
    return g;
}

double ScalarGrid::integral() const {
    return h_ * h_ * h_ * pairwise_sum(std::span<const double>(v_.data(), v_.size()));
}

ScalarGrid& ScalarGrid::operator+=(const ScalarGrid& o) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}
ScalarGrid& ScalarGrid::operator-=(const ScalarGrid& o) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}
ScalarGrid& ScalarGrid::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

void ScalarGrid::clamp_range(double c, double r, int& lo, int& hi) const {
    lo = static_cast<int>(std::ceil((c - r + X_) / h_));
    hi = static_cast<int>(std::floor((c + r + X_) / h_));
    lo = std::max(lo, 0);
    hi = std::min(hi, n_ - 1);
}

double grid_dot(const ScalarGrid& a, const ScalarGrid& b) {
    std::vector<double> buf(a.size());
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) buf[i] = pa[i] * pb[i];
    const double h = a.spacing();
    return h * h * h * pairwise_sum(std::span<const double>(buf.data(), buf.size()));
}

} // namespace wavekin
