#include "wavekin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavekin {

MomentEstimate sample_moments(const std::vector<std::vector<double>>& rows) {
    MomentEstimate m;
    if (rows.empty()) return m;
    m.count = static_cast<int>(rows.size());
    m.dim = static_cast<int>(rows.front().size());
    m.mean.assign(m.dim, 0.0);
    for (const auto& r : rows)
        for (int a = 0; a < m.dim; ++a) m.mean[a] += r[a];
    for (double& v : m.mean) v /= m.count;
    m.cov.assign(static_cast<std::size_t>(m.dim) * m.dim, 0.0);
    if (m.count < 2) return m;
    for (const auto& r : rows)
        for (int a = 0; a < m.dim; ++a)
            for (int b = 0; b < m.dim; ++b)
                m.cov[a * m.dim + b] += (r[a] - m.mean[a]) * (r[b] - m.mean[b]);
    for (double& v : m.cov) v /= (m.count - 1);
    return m;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double anderson_darling_normal(std::vector<double> sample) {
    const int n = static_cast<int>(sample.size());
    if (n < 8) throw std::invalid_argument("anderson_darling: need >= 8 points");
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    var /= (n - 1);
    const double sd = std::sqrt(var);
    std::sort(sample.begin(), sample.end());
    double a2 = -static_cast<double>(n);
    for (int i = 0; i < n; ++i) {
        const double zi = (sample[i] - mean) / sd;
        const double zr = (sample[n - 1 - i] - mean) / sd;
        double Fi = normal_cdf(zi);
        double Fr = normal_cdf(zr);
        Fi = std::clamp(Fi, 1e-300, 1.0 - 1e-16);
        Fr = std::clamp(Fr, 1e-300, 1.0 - 1e-16);
        a2 -= (2.0 * i + 1.0) / n * (std::log(Fi) + std::log1p(-Fr));
    }
    return a2 * (1.0 + 0.75 / n + 2.25 / (static_cast<double>(n) * n));
}

std::vector<double> cholesky(std::vector<double> a, int d) {
    // jitter for near-singular covariances
    double trace = 0.0;
    for (int i = 0; i < d; ++i) trace += a[i * d + i];
    const double jitter = std::max(1e-14 * trace / d, 1e-300);
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<double> L(static_cast<std::size_t>(d) * d, 0.0);
        bool ok = true;
        for (int i = 0; i < d && ok; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = a[i * d + j];
                for (int k = 0; k < j; ++k) s -= L[i * d + k] * L[j * d + k];
                if (i == j) {
                    if (s <= 0.0) {
                        ok = false;
                        break;
                    }
                    L[i * d + i] = std::sqrt(s);
                } else {
                    L[i * d + j] = s / L[j * d + j];
                }
            }
        }
        if (ok) return L;
        for (int i = 0; i < d; ++i) a[i * d + i] += jitter * std::pow(10.0, attempt);
    }
    throw std::runtime_error("cholesky: matrix not positive definite");
}

namespace {

double energy_statistic(const std::vector<std::vector<double>>& x,
                        const std::vector<std::vector<double>>& y) {
    const int n = static_cast<int>(x.size()), m = static_cast<int>(y.size());
    const int d = static_cast<int>(x.front().size());
    auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
        return std::sqrt(s);
    };
    double axy = 0.0, axx = 0.0, ayy = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) axy += dist(x[i], y[j]);
    axy /= static_cast<double>(n) * m;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) axx += dist(x[i], x[j]);
    axx /= static_cast<double>(n) * n;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) ayy += dist(y[i], y[j]);
    ayy /= static_cast<double>(m) * m;
    const double nm = static_cast<double>(n) * m / (n + m);
    return nm * (2.0 * axy - axx - ayy);
}

std::vector<std::vector<double>> gaussian_sample(const std::vector<double>& mean,
                                                 const std::vector<double>& chol, int d,
                                                 int count, Philox& rng) {
    std::vector<std::vector<double>> out(count, std::vector<double>(d, 0.0));
    std::vector<double> z(d);
    for (int s = 0; s < count; ++s) {
        for (int k = 0; k < d; ++k) z[k] = rng.normal();
        for (int i = 0; i < d; ++i) {
            double v = mean[i];
            for (int k = 0; k <= i; ++k) v += chol[i * d + k] * z[k];
            out[s][i] = v;
        }
    }
    return out;
}

} // namespace

double energy_test_pvalue(const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& mean, const std::vector<double>& cov,
                          Philox& rng, int n_bootstrap, int gaussian_n) {
    const int d = static_cast<int>(mean.size());
    const auto L = cholesky(cov, d);
    const auto y = gaussian_sample(mean, L, d, gaussian_n, rng);
    const double t_obs = energy_statistic(rows, y);
    int geq = 0;
    for (int b = 0; b < n_bootstrap; ++b) {
        const auto xb = gaussian_sample(mean, L, d, static_cast<int>(rows.size()), rng);
        const auto yb = gaussian_sample(mean, L, d, gaussian_n, rng);
        if (energy_statistic(xb, yb) >= t_obs) ++geq;
    }
    return (1.0 + geq) / (1.0 + n_bootstrap);
}

double relative_frobenius(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace wavekin
