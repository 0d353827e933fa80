#pragma once

// Independent brute-force oracles used by the test suites. These deliberately
// avoid the library's solver/quadrature code paths.

#include "wavekin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

/// Exact transportation optimum by enumerating every spanning-tree basis of
/// the bipartite graph (all cell subsets of size m+n-1 that span and are
/// acyclic, flows recovered by leaf peeling). Exponential; fine for m,n <= 5.
inline double transport_bruteforce(const std::vector<double>& supply,
                                   const std::vector<double>& demand,
                                   const std::function<double(int, int)>& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    const int cells = m * n;
    const int basis_size = m + n - 1;
    double best = std::numeric_limits<double>::infinity();

    std::vector<int> pick(basis_size);
    std::iota(pick.begin(), pick.end(), 0);

    auto evaluate = [&](const std::vector<int>& sel) {
        // union-find spanning check
        std::vector<int> uf(m + n);
        std::iota(uf.begin(), uf.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (uf[x] != x) x = uf[x] = uf[uf[x]];
            return x;
        };
        for (int cell : sel) {
            const int u = cell / n, v = m + cell % n;
            const int ru = find(u), rv = find(v);
            if (ru == rv) return; // cycle
            uf[ru] = rv;
        }
        const int root = find(0);
        for (int x = 1; x < m + n; ++x)
            if (find(x) != root) return; // not spanning

        // peel leaves to recover the unique basic solution
        std::vector<double> bal(m + n);
        for (int i = 0; i < m; ++i) bal[i] = supply[i];
        for (int j = 0; j < n; ++j) bal[m + j] = -demand[j];
        std::vector<std::vector<std::pair<int, int>>> inc(m + n); // (other, cell)
        for (int cell : sel) {
            const int u = cell / n, v = m + cell % n;
            inc[u].push_back({v, cell});
            inc[v].push_back({u, cell});
        }
        std::vector<double> flow(cells, 0.0);
        std::vector<int> deg(m + n);
        for (int x = 0; x < m + n; ++x) deg[x] = static_cast<int>(inc[x].size());
        std::vector<bool> used_cell(cells, false);
        std::vector<int> leaves;
        for (int x = 0; x < m + n; ++x)
            if (deg[x] == 1) leaves.push_back(x);
        std::vector<bool> done(m + n, false);
        while (!leaves.empty()) {
            const int x = leaves.back();
            leaves.pop_back();
            if (done[x]) continue;
            int other = -1, cell = -1;
            for (auto [o, c] : inc[x])
                if (!used_cell[c]) {
                    other = o;
                    cell = c;
                    break;
                }
            if (cell < 0) break;
            // flow on the arc = remaining balance at x (source->sink positive);
            // a source ships its remaining supply, a sink pulls its deficit.
            const double f = (x < m) ? bal[x] : -bal[x];
            flow[cell] = f;
            used_cell[cell] = true;
            done[x] = true;
            bal[x] = 0.0;
            if (x < m)
                bal[other] += f;
            else
                bal[other] -= f;
            if (--deg[other] == 1) leaves.push_back(other);
        }
        double total = 0.0;
        for (int cell : sel) {
            if (flow[cell] < -1e-12) return; // infeasible vertex
            total += flow[cell] * cost(cell / n, cell % n);
        }
        best = std::min(best, total);
    };

    // iterate combinations
    while (true) {
        evaluate(pick);
        int i = basis_size - 1;
        while (i >= 0 && pick[i] == cells - basis_size + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < basis_size; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

/// RK4 integration of u'' = gamma^2 u + g(t) from (u0, v0); used as the
/// Gronwall domination oracle.
inline double ode_second_order(double gamma, double u0, double v0,
                               const std::function<double(double)>& g, double t,
                               int steps = 20000) {
    double u = u0, v = v0;
    const double dt = t / steps;
    auto f = [&](double tt, double uu, double vv, double& du, double& dv) {
        du = vv;
        dv = gamma * gamma * uu + g(tt);
    };
    for (int s = 0; s < steps; ++s) {
        const double tt = s * dt;
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        f(tt, u, v, k1u, k1v);
        f(tt + 0.5 * dt, u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, k2u, k2v);
        f(tt + 0.5 * dt, u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, k3u, k3v);
        f(tt + dt, u + dt * k3u, v + dt * k3v, k4u, k4v);
        u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return u;
}

/// Kepler period of the reduced two-body problem with attraction mu/r^2:
/// T = 2 pi sqrt(a^3 / mu).
inline double kepler_period(double semi_major, double mu) {
    return 2.0 * 3.14159265358979323846 * std::sqrt(semi_major * semi_major * semi_major / mu);
}

} // namespace oracle
