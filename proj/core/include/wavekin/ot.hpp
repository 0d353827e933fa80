#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace wavekin {

/// Cost callback for the transportation problem (computed on the fly; the
/// dense matrix is never stored).
using CostFn = std::function<double(int, int)>;

struct TransportResult {
    double cost = 0.0;
    bool exact = true;
    double duality_gap = 0.0;   // 0 for the exact solver
    double entropic_eps = 0.0;  // regularization used by the approximate path
    std::int64_t pivots = 0;
};

/// Exact minimum-cost transportation by network simplex on the dense bipartite
/// graph. Supplies and demands are positive integers with equal totals (the
/// measure layer scales rational weights to a common denominator).
TransportResult transport_network_simplex(const std::vector<std::int64_t>& supply,
                                          const std::vector<std::int64_t>& demand,
                                          const CostFn& cost);


struct Phase;

/// Fast path for phase-space point clouds: inlined Euclidean (optionally
/// truncated) cost, no callback indirection.
TransportResult transport_network_simplex_points(const std::vector<Phase>& a,
                                                 const std::vector<std::int64_t>& supply,
                                                 const std::vector<Phase>& b,
                                                 const std::vector<std::int64_t>& demand,
                                                 bool truncated);

/// Entropic-regularized approximation (Sinkhorn) with a feasible rounded plan;
/// reports primal cost and duality gap. Supplies/demands are nonnegative reals
/// with equal totals.
TransportResult transport_sinkhorn(const std::vector<double>& supply,
                                   const std::vector<double>& demand, const CostFn& cost,
                                   double eps_final = 1e-3, int max_iter = 4000);

} // namespace wavekin
