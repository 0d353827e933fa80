#pragma once

#include "wavekin/rng.hpp"

#include <vector>

namespace wavekin {

/// Sample mean and covariance (rows = observations).
struct MomentEstimate {
    std::vector<double> mean;
    std::vector<double> cov; // d x d row-major
    int dim = 0;
    int count = 0;
};

MomentEstimate sample_moments(const std::vector<std::vector<double>>& rows);

/// Anderson-Darling statistic A^2* (mean/variance estimated, small-sample
/// adjusted). Reject normality at the 1% level when A^2* > 1.035.
double anderson_darling_normal(std::vector<double> sample);
inline bool anderson_darling_reject_1pct(double a2_star) { return a2_star > 1.035; }

/// Energy-distance two-sample test of the rows against N(mean, cov), with a
/// parametric-bootstrap p-value.
double energy_test_pvalue(const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& mean, const std::vector<double>& cov,
                          Philox& rng, int n_bootstrap = 200, int gaussian_n = 256);

/// Cholesky factor (lower) of a PSD matrix with diagonal jitter fallback.
std::vector<double> cholesky(std::vector<double> a, int d);

/// ||A - B||_F / ||B||_F.
double relative_frobenius(const std::vector<double>& a, const std::vector<double>& b);

/// Standard normal CDF.
double normal_cdf(double x);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace wavekin
