#include "wavekin/ot.hpp"

#include "wavekin/geometry.hpp"
#include "wavekin/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wavekin {

namespace {

// Sparse-arc network simplex with column generation.
//
// Nodes 0..m-1 sources, m..m+n-1 sinks, artificial root at m+n; arcs run
// source -> sink and live in an explicit list (costs cached). The initial
// basis is the big-M star on the root: shallow tree, strongly feasible. The
// solver iterates to optimality over the current list, then prices the full
// dense arc set in one parallel pass; violated arcs are appended and the
// loop repeats, so the final basis is provably optimal for the complete
// problem. Degenerate ties use the first-path-strict / second-path-non-strict
// rule; a pivot cap with a deterministic cost perturbation guards cycling.
template <class Cost>
class SparseTransportSimplex {
  public:
    SparseTransportSimplex(const std::vector<std::int64_t>& supply,
                           const std::vector<std::int64_t>& demand, const Cost& cost)
        : m_(static_cast<int>(supply.size())), n_(static_cast<int>(demand.size())),
          nodes_(m_ + n_ + 1), supply_(supply), demand_(demand), cost_(cost) {}

    bool solve(TransportResult& out, std::int64_t max_pivots);

  private:
    struct Arc {
        int i, j;
        double c;
    };

    int m_, n_, nodes_;
    const std::vector<std::int64_t>& supply_;
    const std::vector<std::int64_t>& demand_;
    Cost cost_;
    double big_m_ = 0.0;

    std::vector<Arc> arcs_;
    std::vector<int> parent_;
    std::vector<double> tree_cost_;
    std::vector<std::int64_t> flow_;
    std::vector<double> pot_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> children_;
    std::vector<int> child_pos_;
    std::int64_t pivots_ = 0;

    void attach(int child, int par, std::int64_t f, double c) {
        parent_[child] = par;
        flow_[child] = f;
        tree_cost_[child] = c;
        child_pos_[child] = static_cast<int>(children_[par].size());
        children_[par].push_back(child);
    }
    void detach(int child) {
        const int par = parent_[child];
        auto& v = children_[par];
        const int pos = child_pos_[child];
        v[pos] = v.back();
        child_pos_[v[pos]] = pos;
        v.pop_back();
        parent_[child] = -1;
    }
    void reroot(int new_root);
    void shift_subtree(int root, double delta);
    void build_initial_basis();
    void seed_nearest_arcs(int per_source);
    bool run_simplex(std::int64_t max_pivots);
    void pivot_on(const Arc& a);
    std::int64_t add_violated_arcs(double tol, int cap_per_source);
};

template <class Cost>
void SparseTransportSimplex<Cost>::reroot(int new_root) {
    int prev = -1;
    std::int64_t prev_flow = 0;
    double prev_cost = 0.0;
    int v = new_root;
    while (v != -1) {
        const int next = parent_[v];
        const std::int64_t f = flow_[v];
        const double c = tree_cost_[v];
        if (next != -1) detach(v);
        if (prev != -1) attach(v, prev, prev_flow, prev_cost);
        prev = v;
        prev_flow = f;
        prev_cost = c;
        v = next;
    }
}

template <class Cost>
void SparseTransportSimplex<Cost>::shift_subtree(int root, double delta) {
    std::vector<int> stack = {root};
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        pot_[u] += (u < m_) ? delta : -delta;
        if (parent_[u] != -1) depth_[u] = depth_[parent_[u]] + 1;
        for (int c : children_[u]) stack.push_back(c);
    }
}

template <class Cost>
void SparseTransportSimplex<Cost>::build_initial_basis() {
    // Big-M star on the artificial root: source arcs are oriented
    // source -> root and root -> sink, matching the "v < m" orientation rule
    // the ratio test uses for real arcs.
    parent_.assign(nodes_, -1);
    tree_cost_.assign(nodes_, 0.0);
    flow_.assign(nodes_, 0);
    pot_.assign(nodes_, 0.0);
    depth_.assign(nodes_, 0);
    children_.assign(nodes_, {});
    child_pos_.assign(nodes_, -1);

    double cmax = 1e-12;
    for (int i = 0; i < m_; i += std::max(1, m_ / 32))
        for (int j = 0; j < n_; j += std::max(1, n_ / 32))
            cmax = std::max(cmax, std::abs(cost_(i, j)));
    big_m_ = 64.0 * cmax;

    const int root = m_ + n_;
    for (int i = 0; i < m_; ++i) {
        attach(i, root, supply_[i], big_m_);
        depth_[i] = 1;
        pot_[i] = big_m_;
    }
    for (int j = 0; j < n_; ++j) {
        attach(m_ + j, root, demand_[j], big_m_);
        depth_[m_ + j] = 1;
        pot_[m_ + j] = big_m_;
    }
}

template <class Cost>
void SparseTransportSimplex<Cost>::seed_nearest_arcs(int per_source) {
    if (per_source <= 0) return;
    std::vector<std::vector<Arc>> rows(m_);
    parallel_for(static_cast<std::size_t>(m_), [&](std::size_t lo, std::size_t hi) {
        std::vector<std::pair<double, int>> best;
        for (std::size_t i = lo; i < hi; ++i) {
            best.clear();
            for (int j = 0; j < n_; ++j) {
                const double c = cost_(static_cast<int>(i), j);
                if (static_cast<int>(best.size()) < per_source) {
                    best.push_back({c, j});
                    if (static_cast<int>(best.size()) == per_source)
                        std::make_heap(best.begin(), best.end());
                } else if (c < best.front().first) {
                    std::pop_heap(best.begin(), best.end());
                    best.back() = {c, j};
                    std::push_heap(best.begin(), best.end());
                }
            }
            std::sort(best.begin(), best.end());
            for (auto& [c, j] : best) rows[i].push_back({static_cast<int>(i), j, c});
        }
    });
    for (auto& r : rows) arcs_.insert(arcs_.end(), r.begin(), r.end());
}

template <class Cost>
void SparseTransportSimplex<Cost>::pivot_on(const Arc& arc) {
    const int ei = arc.i, ejn = m_ + arc.j;
    int a = ei, b = ejn;
    while (a != b) {
        if (depth_[a] >= depth_[b])
            a = parent_[a];
        else
            b = parent_[b];
    }
    const int join = a;

    std::int64_t delta = std::numeric_limits<std::int64_t>::max();
    int out_node = -1;
    bool out_on_ei_side = true;
    for (int v = ei; v != join; v = parent_[v])
        if (v < m_ && flow_[v] < delta) {
            delta = flow_[v];
            out_node = v;
            out_on_ei_side = true;
        }
    for (int v = ejn; v != join; v = parent_[v])
        if (v >= m_ && flow_[v] <= delta) {
            delta = flow_[v];
            out_node = v;
            out_on_ei_side = false;
        }
    if (out_node < 0) throw std::logic_error("transport: no blocking arc on cycle");

    for (int v = ei; v != join; v = parent_[v]) flow_[v] += (v < m_) ? -delta : delta;
    for (int v = ejn; v != join; v = parent_[v]) flow_[v] += (v >= m_) ? -delta : delta;

    const int e_in = out_on_ei_side ? ei : ejn;
    const int e_out = out_on_ei_side ? ejn : ei;
    const double rc = arc.c - pot_[ei] - pot_[m_ + arc.j];
    detach(out_node);
    reroot(e_in);
    attach(e_in, e_out, delta, arc.c);
    shift_subtree(e_in, (e_in < m_) ? rc : -rc);
}

template <class Cost>
bool SparseTransportSimplex<Cost>::run_simplex(std::int64_t max_pivots) {
    const std::size_t n_arcs = arcs_.size();
    const std::size_t block =
        std::max<std::size_t>(256, static_cast<std::size_t>(std::sqrt(double(n_arcs))) * 8);
    std::size_t next = 0;
    while (true) {
        int best_arc = -1;
        double best = -1e-11;
        std::size_t scanned = 0;
        while (scanned < n_arcs) {
            const std::size_t stop = std::min(n_arcs, next + block);
            for (std::size_t a = next; a < stop; ++a) {
                const double rc = arcs_[a].c - pot_[arcs_[a].i] - pot_[m_ + arcs_[a].j];
                if (rc < best) {
                    best = rc;
                    best_arc = static_cast<int>(a);
                }
            }
            scanned += stop - next;
            next = (stop == n_arcs) ? 0 : stop;
            if (best_arc >= 0) break;
        }
        if (best_arc < 0) return true;
        if (++pivots_ > max_pivots) return false;
        pivot_on(arcs_[best_arc]);
    }
}

template <class Cost>
std::int64_t SparseTransportSimplex<Cost>::add_violated_arcs(double tol, int cap_per_source) {
    std::vector<std::vector<Arc>> rows(m_);
    parallel_for(static_cast<std::size_t>(m_), [&](std::size_t lo, std::size_t hi) {
        std::vector<std::pair<double, int>> cand;
        for (std::size_t i = lo; i < hi; ++i) {
            cand.clear();
            const double ui = pot_[i];
            for (int j = 0; j < n_; ++j) {
                const double rc = cost_(static_cast<int>(i), j) - ui - pot_[m_ + j];
                if (rc < -tol) cand.push_back({rc, j});
            }
            if (cand.empty()) continue;
            const int take = std::min<int>(cap_per_source, static_cast<int>(cand.size()));
            std::partial_sort(cand.begin(), cand.begin() + take, cand.end());
            for (int t = 0; t < take; ++t)
                rows[i].push_back({static_cast<int>(i), cand[t].second,
                                   cost_(static_cast<int>(i), cand[t].second)});
        }
    });
    std::int64_t added = 0;
    for (auto& r : rows) {
        arcs_.insert(arcs_.end(), r.begin(), r.end());
        added += static_cast<std::int64_t>(r.size());
    }
    return added;
}

template <class Cost>
bool SparseTransportSimplex<Cost>::solve(TransportResult& out, std::int64_t max_pivots) {
    arcs_.clear();
    build_initial_basis();
    const bool small = static_cast<std::int64_t>(m_) * n_ <= 4'000'000;
    if (small) {
        arcs_.reserve(static_cast<std::size_t>(m_) * n_);
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j) arcs_.push_back({i, j, cost_(i, j)});
    } else {
        seed_nearest_arcs(16);
    }

    for (int round = 0; round < 1000; ++round) {
        if (!run_simplex(max_pivots)) return false;
        if (small) break;
        if (add_violated_arcs(1e-11, 16) == 0) break;
    }

    const int root = m_ + n_;
    double total = 0.0;
    for (int v = 0; v < root; ++v) {
        if (parent_[v] == root) {
            if (flow_[v] != 0)
                throw std::logic_error("transport: artificial arc kept flow (raise big-M)");
            continue;
        }
        if (flow_[v] == 0) continue;
        const int i = (v < m_) ? v : parent_[v];
        const int j = (v < m_) ? parent_[v] - m_ : v - m_;
        total += static_cast<double>(flow_[v]) * cost_(i, j);
    }
    out.cost = total;
    out.exact = true;
    out.duality_gap = 0.0;
    out.pivots = pivots_;
    return true;
}

struct FnCost {
    const CostFn* fn;
    double perturb;
    int n;
    double operator()(int i, int j) const {
        double c = (*fn)(i, j);
        if (perturb > 0.0) c += perturb * (static_cast<double>(i) * n + j + 1.0);
        return c;
    }
};

template <class Cost>
TransportResult solve_with(const std::vector<std::int64_t>& supply,
                           const std::vector<std::int64_t>& demand, const Cost& cost,
                           const Cost& cost_perturbed) {
    TransportResult out;
    const std::int64_t nodes = static_cast<std::int64_t>(supply.size()) + demand.size();
    {
        SparseTransportSimplex<Cost> ns(supply, demand, cost);
        if (ns.solve(out, 500 * nodes + 100000)) return out;
    }
    SparseTransportSimplex<Cost> ns(supply, demand, cost_perturbed);
    if (!ns.solve(out, 4000 * nodes + 1000000))
        throw std::runtime_error("transport: pivot limit exceeded");
    return out;
}

void check_balance(const std::vector<std::int64_t>& supply,
                   const std::vector<std::int64_t>& demand) {
    std::int64_t ts = 0, td = 0;
    for (auto v : supply) {
        if (v <= 0) throw std::invalid_argument("transport: supplies must be positive");
        ts += v;
    }
    for (auto v : demand) {
        if (v <= 0) throw std::invalid_argument("transport: demands must be positive");
        td += v;
    }
    if (ts != td) throw std::invalid_argument("transport: unbalanced problem");
}

} // namespace

TransportResult transport_network_simplex(const std::vector<std::int64_t>& supply,
                                          const std::vector<std::int64_t>& demand,
                                          const CostFn& cost) {
    check_balance(supply, demand);
    double scale = 0.0;
    for (std::size_t i = 0; i < supply.size(); i += std::max<std::size_t>(1, supply.size() / 16))
        for (std::size_t j = 0; j < demand.size();
             j += std::max<std::size_t>(1, demand.size() / 16))
            scale = std::max(scale, std::abs(cost(static_cast<int>(i), static_cast<int>(j))));
    const double xi = (scale > 0 ? scale : 1.0) * 1e-15 /
                      (static_cast<double>(supply.size()) * demand.size());
    const FnCost plain{&cost, 0.0, static_cast<int>(demand.size())};
    const FnCost pert{&cost, xi, static_cast<int>(demand.size())};
    return solve_with(supply, demand, plain, pert);
}

TransportResult transport_network_simplex_points(const std::vector<Phase>& a,
                                                 const std::vector<std::int64_t>& supply,
                                                 const std::vector<Phase>& b,
                                                 const std::vector<std::int64_t>& demand,
                                                 bool truncated) {
    check_balance(supply, demand);
    struct PointCost {
        const Phase* pa;
        const Phase* pb;
        bool trunc;
        double perturb;
        int n;
        double operator()(int i, int j) const {
            double c = phase_dist(pa[i], pb[j]);
            if (trunc) c = std::min(2.0, c);
            if (perturb > 0.0) c += perturb * (static_cast<double>(i) * n + j + 1.0);
            return c;
        }
    };
    double scale = 1.0;
    const double xi =
        scale * 1e-15 / (static_cast<double>(supply.size()) * demand.size());
    const PointCost plain{a.data(), b.data(), truncated, 0.0, static_cast<int>(b.size())};
    const PointCost pert{a.data(), b.data(), truncated, xi, static_cast<int>(b.size())};
    return solve_with(supply, demand, plain, pert);
}

TransportResult transport_sinkhorn(const std::vector<double>& supply,
                                   const std::vector<double>& demand, const CostFn& cost,
                                   double eps_final, int max_iter) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    std::vector<double> f(m, 0.0), g(n, 0.0);
    std::vector<double> log_a(m), log_b(n);
    for (int i = 0; i < m; ++i) log_a[i] = std::log(supply[i]);
    for (int j = 0; j < n; ++j) log_b[j] = std::log(demand[j]);

    double eps = std::max(eps_final, 0.1);
    while (true) {
        for (int it = 0; it < max_iter; ++it) {
            double move = 0.0;
            for (int i = 0; i < m; ++i) {
                double mx = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < n; ++j)
                    mx = std::max(mx, (g[j] - cost(i, j)) / eps + log_b[j]);
                double s = 0.0;
                for (int j = 0; j < n; ++j)
                    s += std::exp((g[j] - cost(i, j)) / eps + log_b[j] - mx);
                const double nf = -eps * (mx + std::log(s)) + eps * log_a[i];
                move = std::max(move, std::abs(nf - f[i]));
                f[i] = nf;
            }
            for (int j = 0; j < n; ++j) {
                double mx = -std::numeric_limits<double>::infinity();
                for (int i = 0; i < m; ++i)
                    mx = std::max(mx, (f[i] - cost(i, j)) / eps + log_a[i]);
                double s = 0.0;
                for (int i = 0; i < m; ++i)
                    s += std::exp((f[i] - cost(i, j)) / eps + log_a[i] - mx);
                g[j] = -eps * (mx + std::log(s)) + eps * log_b[j];
            }
            if (move < 1e-9) break;
        }
        if (eps <= eps_final * (1.0 + 1e-12)) break;
        eps = std::max(eps_final, eps * 0.25);
    }

    std::vector<double> row_sum(m, 0.0), col_sum(n, 0.0);
    auto plan = [&](int i, int j) {
        return std::exp((f[i] + g[j] - cost(i, j)) / eps + log_a[i] + log_b[j]);
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) row_sum[i] += plan(i, j);
    std::vector<double> row_scale(m), col_scale(n);
    for (int i = 0; i < m; ++i) row_scale[i] = std::min(1.0, supply[i] / row_sum[i]);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) col_sum[j] += plan(i, j) * row_scale[i];
    for (int j = 0; j < n; ++j) col_scale[j] = std::min(1.0, demand[j] / col_sum[j]);

    double primal = 0.0;
    std::vector<double> res_row(m, 0.0), res_col(n, 0.0);
    double res_total = 0.0;
    for (int i = 0; i < m; ++i) {
        double kept = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p = plan(i, j) * row_scale[i] * col_scale[j];
            primal += p * cost(i, j);
            kept += p;
        }
        res_row[i] = supply[i] - kept;
        res_total += res_row[i];
    }
    for (int j = 0; j < n; ++j) {
        double kept = 0.0;
        for (int i = 0; i < m; ++i) kept += plan(i, j) * row_scale[i] * col_scale[j];
        res_col[j] = demand[j] - kept;
    }
    if (res_total > 1e-15) {
        for (int i = 0; i < m; ++i) {
            if (res_row[i] <= 0.0) continue;
            for (int j = 0; j < n; ++j) {
                const double p = res_row[i] * std::max(res_col[j], 0.0) / res_total;
                primal += p * cost(i, j);
            }
        }
    }

    std::vector<double> g_c(n);
    for (int j = 0; j < n; ++j) {
        double mn = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) mn = std::min(mn, cost(i, j) - f[i]);
        g_c[j] = mn;
    }
    double dual = 0.0;
    for (int i = 0; i < m; ++i) dual += f[i] * supply[i];
    for (int j = 0; j < n; ++j) dual += g_c[j] * demand[j];

    TransportResult out;
    out.cost = primal;
    out.exact = false;
    out.entropic_eps = eps;
    out.duality_gap = std::max(0.0, primal - dual);
    return out;
}

} // namespace wavekin
