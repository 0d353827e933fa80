#include "wavekin/numerics.hpp"

#include <algorithm>
#include <cstdlib>

namespace wavekin {

GaussLegendre::GaussLegendre(int n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: order must be >= 1");
    nodes.resize(n);
    weights.resize(n);
    const double pi = 3.14159265358979323846;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

double gl_integrate(const GaussLegendre& gl, double a, double b,
                    const std::function<double(double)>& f) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
        s += gl.weights[i] * f(c + hw * gl.nodes[i]);
    return hw * s;
}

CubicSpline::CubicSpline(double a, double b, std::vector<double> y,
                         bool clamped, double d_a, double d_b)
    : a_(a), b_(b), y_(std::move(y)) {
    const std::size_t n = y_.size();
    if (n < 3) throw std::invalid_argument("CubicSpline: need >= 3 samples");
    h_ = (b_ - a_) / static_cast<double>(n - 1);
    y2_.assign(n, 0.0);
    std::vector<double> u(n, 0.0);
    if (clamped) {
        y2_[0] = -0.5;
        u[0] = (3.0 / h_) * ((y_[1] - y_[0]) / h_ - d_a);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double sig = 0.5;
        const double p = sig * y2_[i - 1] + 2.0;
        y2_[i] = (sig - 1.0) / p;
        double t = (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / h_;
        u[i] = (6.0 * t / (2.0 * h_) - sig * u[i - 1]) / p;
    }
    double qn = 0.0, un = 0.0;
    if (clamped) {
        qn = 0.5;
        un = (3.0 / h_) * (d_b - (y_[n - 1] - y_[n - 2]) / h_);
    }
    y2_[n - 1] = (un - qn * u[n - 2]) / (qn * y2_[n - 2] + 1.0);
    for (std::size_t k = n - 1; k-- > 0;)
        y2_[k] = y2_[k] * y2_[k + 1] + u[k];
}

void CubicSpline::locate(double x, int& i, double& t) const {
    const int n = static_cast<int>(y_.size());
    double s = (x - a_) / h_;
    i = static_cast<int>(std::floor(s));
    if (i < 0) i = 0;
    if (i > n - 2) i = n - 2;
    t = s - i;
}

double CubicSpline::eval(double x) const {
    if (x <= a_) return y_.front();
    if (x >= b_) return y_.back();
    int i;
    double t;
    locate(x, i, t);
    const double A = 1.0 - t, B = t;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * y2_[i] + (B * B * B - B) * y2_[i + 1]) * h_ * h_ / 6.0;
}

double CubicSpline::deriv(double x) const {
    if (x <= a_ || x >= b_) return 0.0;
    int i;
    double t;
    locate(x, i, t);
    const double A = 1.0 - t, B = t;
    return (y_[i + 1] - y_[i]) / h_ +
           (-(3.0 * A * A - 1.0) * y2_[i] + (3.0 * B * B - 1.0) * y2_[i + 1]) * h_ / 6.0;
}

double CubicSpline::deriv2(double x) const {
    if (x <= a_ || x >= b_) return 0.0;
    int i;
    double t;
    locate(x, i, t);
    return (1.0 - t) * y2_[i] + t * y2_[i + 1];
}

double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t m = n / 2;
    return pairwise_sum(v.subspan(0, m)) + pairwise_sum(v.subspan(m));
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa,
                            double b, double fb, double m, double fm, double whole,
                            double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double small_det(std::vector<double> m, int n) {
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
        if (m[piv * n + c] == 0.0) return 0.0;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(m[piv * n + k], m[c * n + k]);
            det = -det;
        }
        det *= m[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            const double f = m[r * n + c] / m[c * n + c];
            for (int k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
        }
    }
    return det;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> m, int n) {
    // Cyclic Jacobi; plenty for the small covariance matrices we see.
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m[i * n + j] * m[i * n + j];
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = m[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = m[p * n + p], aqq = m[q * n + q];
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = m[k * n + p], akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = m[p * n + k], aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = m[i * n + i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace wavekin
