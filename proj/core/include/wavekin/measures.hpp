#pragma once

#include "wavekin/geometry.hpp"
#include "wavekin/ot.hpp"
#include "wavekin/particles.hpp"

#include <optional>
#include <vector>

namespace wavekin {

/// A finite weighted point measure on phase space R^6. Probability measures
/// carry nonnegative weights summing to one; signed combinations appear in
/// the extension norm.
struct WeightedPointMeasure {
    std::vector<Phase> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    double total() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
    void add(const Phase& z, double w) {
        points.push_back(z);
        weights.push_back(w);
    }

    /// Collapses coincident atoms and drops zero weights (stable order).
    WeightedPointMeasure compacted(double tol = 0.0) const;
};

/// The empirical measure of an ensemble: atoms (q_i, p_i) with the particle weights.
WeightedPointMeasure empirical(const ParticleEnsemble& e);

struct DistanceOptions {
    /// Exact network-simplex mode is used while m*n stays within this budget;
    /// larger instances fall back to the entropic solver.
    std::int64_t exact_max_entries = 128ll * 1000 * 1000;
    double entropic_eps = 1e-3;
};

struct DistanceResult {
    double value = 0.0;
    bool exact = true;
    double duality_gap = 0.0;
    double entropic_eps = 0.0;
};

/// Kantorovich-Rubinstein (W1) distance with Euclidean cost |z - z'| on R^6.
/// Requires equal total masses.
DistanceResult kr_distance_full(const WeightedPointMeasure& mu,
                                const WeightedPointMeasure& nu,
                                const DistanceOptions& opt = {});
double kr_distance(const WeightedPointMeasure& mu, const WeightedPointMeasure& nu,
                   const DistanceOptions& opt = {});

/// Dual bounded-Lipschitz distance: W1 with truncated cost min{2, |z - z'|}.
DistanceResult bl_distance_full(const WeightedPointMeasure& mu,
                                const WeightedPointMeasure& nu,
                                const DistanceOptions& opt = {});
double bl_distance(const WeightedPointMeasure& mu, const WeightedPointMeasure& nu,
                   const DistanceOptions& opt = {});

/// Norm on the linear span of P_1:
///   ||sigma|| = d((sigma - sigma(R^6) anchor)_+, (sigma - sigma(R^6) anchor)_-)
///             + |sigma(R^6)|,
/// with the anchor defaulting to a unit atom at the origin. For sigma = mu - nu
/// with probability mu, nu this reduces to kr_distance(mu, nu).
double signed_extension_norm(const WeightedPointMeasure& sigma,
                             const std::optional<WeightedPointMeasure>& anchor = {},
                             const DistanceOptions& opt = {});

} // namespace wavekin
