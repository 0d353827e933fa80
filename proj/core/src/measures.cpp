#include "wavekin/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace wavekin {

namespace {

double phase_cost(const Phase& a, const Phase& b) { return phase_dist(a, b); }

/// Scales real weights to integers with exactly matching totals. Rounding
/// moves at most a few ulps of mass per atom; the induced distance error is
/// far below the exact-solver tolerance.
std::vector<std::int64_t> to_integer_weights(const std::vector<double>& w, double total) {
    const double scale = 4.5e15 / total;
    std::vector<std::int64_t> out(w.size());
    std::int64_t sum = 0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = std::max<std::int64_t>(1, std::llround(w[i] * scale));
        sum += out[i];
        if (w[i] > w[largest]) largest = i;
    }
    const std::int64_t target = std::llround(total * scale);
    out[largest] += target - sum;
    if (out[largest] <= 0)
        throw std::invalid_argument("measure weights too unbalanced for integer scaling");
    return out;
}

DistanceResult distance_impl(const WeightedPointMeasure& mu, const WeightedPointMeasure& nu,
                             const DistanceOptions& opt, bool truncated) {
    if (mu.size() == 0 || nu.size() == 0)
        throw std::invalid_argument("distance: empty measure");
    for (double w : mu.weights)
        if (w < 0) throw std::invalid_argument("distance: negative weight");
    for (double w : nu.weights)
        if (w < 0) throw std::invalid_argument("distance: negative weight");
    const double ta = mu.total(), tb = nu.total();
    if (std::abs(ta - tb) > 1e-9 * std::max(1.0, std::max(ta, tb)))
        throw std::invalid_argument("distance: measures have unequal total mass");

    auto cost = [&](int i, int j) {
        const double c = phase_cost(mu.points[i], nu.points[j]);
        return truncated ? std::min(2.0, c) : c;
    };

    DistanceResult res;
    const std::int64_t entries =
        static_cast<std::int64_t>(mu.size()) * static_cast<std::int64_t>(nu.size());
    if (entries <= opt.exact_max_entries) {
        const auto sup = to_integer_weights(mu.weights, ta);
        const auto dem = to_integer_weights(nu.weights, tb);
        const auto t =
            transport_network_simplex_points(mu.points, sup, nu.points, dem, truncated);
        const double scale = 4.5e15 / ta;
        res.value = t.cost / scale;
        res.exact = true;
    } else {
        const auto t = transport_sinkhorn(mu.weights, nu.weights, cost, opt.entropic_eps);
        res.value = t.cost;
        res.exact = false;
        res.duality_gap = t.duality_gap;
        res.entropic_eps = t.entropic_eps;
    }
    return res;
}

} // namespace

WeightedPointMeasure WeightedPointMeasure::compacted(double tol) const {
    WeightedPointMeasure out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (weights[i] == 0.0) continue;
        bool merged = false;
        for (std::size_t j = 0; j < out.points.size(); ++j) {
            if (phase_dist(points[i], out.points[j]) <= tol) {
                out.weights[j] += weights[i];
                merged = true;
                break;
            }
        }
        if (!merged) out.add(points[i], weights[i]);
    }
    // drop weights cancelled to zero
    WeightedPointMeasure cleaned;
    for (std::size_t i = 0; i < out.points.size(); ++i)
        if (out.weights[i] != 0.0) cleaned.add(out.points[i], out.weights[i]);
    return cleaned;
}

WeightedPointMeasure empirical(const ParticleEnsemble& e) {
    WeightedPointMeasure m;
    m.points.reserve(e.size());
    m.weights = e.w;
    for (std::size_t i = 0; i < e.size(); ++i) m.points.push_back({e.q[i], e.p[i]});
    return m;
}

DistanceResult kr_distance_full(const WeightedPointMeasure& mu,
                                const WeightedPointMeasure& nu, const DistanceOptions& opt) {
    return distance_impl(mu, nu, opt, false);
}

double kr_distance(const WeightedPointMeasure& mu, const WeightedPointMeasure& nu,
                   const DistanceOptions& opt) {
    return kr_distance_full(mu, nu, opt).value;
}

DistanceResult bl_distance_full(const WeightedPointMeasure& mu,
                                const WeightedPointMeasure& nu, const DistanceOptions& opt) {
    return distance_impl(mu, nu, opt, true);
}

double bl_distance(const WeightedPointMeasure& mu, const WeightedPointMeasure& nu,
                   const DistanceOptions& opt) {
    return bl_distance_full(mu, nu, opt).value;
}

double signed_extension_norm(const WeightedPointMeasure& sigma,
                             const std::optional<WeightedPointMeasure>& anchor,
                             const DistanceOptions& opt) {
    WeightedPointMeasure tilde;
    if (anchor)
        tilde = *anchor;
    else
        tilde.add(Phase{}, 1.0);

    const double total = sigma.total();
    // shifted = sigma - total * anchor, split into positive and negative parts
    WeightedPointMeasure shifted = sigma;
    for (std::size_t i = 0; i < tilde.size(); ++i)
        shifted.add(tilde.points[i], -total * tilde.weights[i]);
    shifted = shifted.compacted(1e-14);

    WeightedPointMeasure pos, neg;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
        if (shifted.weights[i] > 0)
            pos.add(shifted.points[i], shifted.weights[i]);
        else if (shifted.weights[i] < 0)
            neg.add(shifted.points[i], -shifted.weights[i]);
    }
    double d = 0.0;
    if (pos.size() > 0 && neg.size() > 0)
        d = kr_distance(pos, neg, opt);
    else if (pos.size() > 0 || neg.size() > 0)
        throw std::invalid_argument("signed_extension_norm: parts have unequal mass");
    return d + std::abs(total);
}

} // namespace wavekin
