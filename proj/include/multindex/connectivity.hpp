#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "multindex/errors.hpp"
#include "multindex/matrix.hpp"

namespace multindex {

/// Verdict on connectedness of a quantity matrix. Component members and the
/// witness subset are 0-based indices.
struct ConnectivityReport {
    bool connected = false;
    std::vector<std::vector<std::size_t>> country_components;
    std::vector<std::vector<std::size_t>> commodity_components;
    // Present iff not connected: a proper country subset J such that no
    // commodity is consumed both inside J and outside J.
    std::optional<std::vector<std::size_t>> witness;
};

/// Countries as vertices; an edge means the two countries share at least one
/// commonly consumed commodity. Each edge records one witnessing commodity.
struct CountryGraph {
    struct Edge {
        std::size_t a = 0;
        std::size_t b = 0;
        std::size_t commodity = 0;
    };

    std::size_t n_countries = 0;
    std::vector<Edge> edges;

    bool is_connected_graph() const {
        if (n_countries == 0) return true;
        std::vector<std::vector<std::size_t>> adj(n_countries);
        for (const Edge& e : edges) {
            adj[e.a].push_back(e.b);
            adj[e.b].push_back(e.a);
        }
        std::vector<char> seen(n_countries, 0);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = 1;
        std::size_t count = 1;
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop();
            for (std::size_t w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    q.push(w);
                }
        }
        return count == n_countries;
    }
};

/// Outcome of the row/column-sum feasibility test behind the DAD theorem.
struct CompatibilityReport {
    bool compatible = false;
    bool strict = false;
    // On failure: (I^c, J) with A_{I^c J^c} = 0 and sum c over I^c exceeding
    // sum d over J. On a strictness failure: the tight pair that violates it.
    std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> violating_sets;
    double flow_value = 0.0;
};

class DisconnectedError : public Error {
public:
    explicit DisconnectedError(ConnectivityReport report)
        : Error("quantity matrix is disconnected: no basis for multilateral comparison"),
          report(std::move(report)) {}

    ConnectivityReport report;
};

class IncompatibleTripletError : public Error {
public:
    explicit IncompatibleTripletError(CompatibilityReport report)
        : Error("weight triplet fails the compatibility condition"), report(std::move(report)) {}

    CompatibilityReport report;
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

/// Number of strongly connected components of a digraph (iterative Tarjan).
inline std::size_t count_sccs(const std::vector<std::vector<std::size_t>>& adj) {
    const std::size_t n = adj.size();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, none), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::size_t sccs = 0, next = 0;

    struct Frame {
        std::size_t v;
        std::size_t child;
    };
    std::vector<Frame> call;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != none) continue;
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = 1;
        call.push_back({root, 0});
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.child < adj[f.v].size()) {
                std::size_t w = adj[f.v][f.child++];
                if (index[w] == none) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    ++sccs;
                    while (true) {
                        std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        if (w == f.v) break;
                    }
                }
                std::size_t v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    return sccs;
}

/// Dinic max flow on doubles. Capacities are expected to be O(1); residual
/// slack below kEps counts as saturated.
class MaxFlowNetwork {
public:
    static constexpr double kEps = 1e-12;

    explicit MaxFlowNetwork(std::size_t n) : graph_(n) {}

    void add_edge(std::size_t u, std::size_t v, double cap) {
        graph_[u].push_back({v, cap, graph_[v].size()});
        graph_[v].push_back({u, 0.0, graph_[u].size() - 1});
    }

    double max_flow(std::size_t s, std::size_t t) {
        double total = 0.0;
        while (bfs_levels(s, t)) {
            iter_.assign(graph_.size(), 0);
            while (true) {
                double pushed = augment(s, t, std::numeric_limits<double>::infinity());
                if (pushed <= kEps) break;
                total += pushed;
            }
        }
        return total;
    }

    /// Vertices reachable from `from` along residual edges.
    std::vector<char> residual_reachable(std::size_t from) const {
        std::vector<char> seen(graph_.size(), 0);
        std::queue<std::size_t> q;
        q.push(from);
        seen[from] = 1;
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop();
            for (const Edge& e : graph_[v])
                if (!seen[e.to] && e.cap > kEps) {
                    seen[e.to] = 1;
                    q.push(e.to);
                }
        }
        return seen;
    }

private:
    struct Edge {
        std::size_t to;
        double cap; // remaining capacity
        std::size_t rev;
    };

    bool bfs_levels(std::size_t s, std::size_t t) {
        level_.assign(graph_.size(), -1);
        std::queue<std::size_t> q;
        q.push(s);
        level_[s] = 0;
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop();
            for (const Edge& e : graph_[v])
                if (e.cap > kEps && level_[e.to] < 0) {
                    level_[e.to] = level_[v] + 1;
                    q.push(e.to);
                }
        }
        return level_[t] >= 0;
    }

    double augment(std::size_t v, std::size_t t, double limit) {
        if (v == t) return limit;
        for (std::size_t& i = iter_[v]; i < graph_[v].size(); ++i) {
            Edge& e = graph_[v][i];
            if (e.cap > kEps && level_[e.to] == level_[v] + 1) {
                double pushed = augment(e.to, t, std::min(limit, e.cap));
                if (pushed > kEps) {
                    e.cap -= pushed;
                    graph_[e.to][e.rev].cap += pushed;
                    return pushed;
                }
            }
        }
        return 0.0;
    }

    std::vector<std::vector<Edge>> graph_;
    std::vector<int> level_;
    std::vector<std::size_t> iter_;
};

} // namespace detail

/// Decides connectedness of the support of q by union-find on the bipartite
/// commodity-country graph. Connectivity is purely structural: entries are
/// tested exactly against zero.
inline ConnectivityReport is_connected(const Matrix& q) {
    const std::size_t n = q.rows();
    const std::size_t m = q.cols();
    detail::UnionFind uf(n + m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (q(i, j) > 0.0) uf.unite(i, n + j);

    // Group countries (and commodities) by their component root.
    std::vector<std::size_t> roots;
    auto component_of = [&](std::size_t node) {
        std::size_t r = uf.find(node);
        for (std::size_t k = 0; k < roots.size(); ++k)
            if (roots[k] == r) return k;
        roots.push_back(r);
        return roots.size() - 1;
    };

    ConnectivityReport rep;
    std::vector<std::vector<std::size_t>> country_comp, commodity_comp;
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t k = component_of(n + j);
        if (k >= country_comp.size()) country_comp.resize(k + 1);
        country_comp[k].push_back(j);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = component_of(i);
        if (k >= commodity_comp.size()) commodity_comp.resize(k + 1);
        commodity_comp[k].push_back(i);
    }
    // A commodity consumed nowhere would form its own component; dataset
    // invariants exclude that, so both partitions have equal length here.
    std::erase_if(country_comp, [](const auto& c) { return c.empty(); });
    std::erase_if(commodity_comp, [](const auto& c) { return c.empty(); });

    rep.country_components = std::move(country_comp);
    rep.commodity_components = std::move(commodity_comp);
    rep.connected = rep.country_components.size() == 1;
    if (!rep.connected) rep.witness = rep.country_components.front();
    return rep;
}

/// Builds the quantity-adjacent country graph: edge (j,k) iff some commodity
/// is consumed in both j and k.
inline CountryGraph adjacency_graph(const Matrix& q) {
    const std::size_t n = q.rows();
    const std::size_t m = q.cols();
    CountryGraph g;
    g.n_countries = m;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k)
            for (std::size_t i = 0; i < n; ++i)
                if (q(i, j) > 0.0 && q(i, k) > 0.0) {
                    g.edges.push_back({j, k, i});
                    break;
                }
    return g;
}

/// True iff the digraph with an edge i -> j whenever a_ij > 0 is strongly
/// connected (one strongly connected component).
inline bool is_irreducible(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error("is_irreducible: matrix must be square");
    const std::size_t n = a.rows();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (a(i, j) > 0.0) adj[i].push_back(j);
    return detail::count_sccs(adj) == 1;
}

/// Decides whether a non-negative matrix with the support of `a`, row sums
/// c and column sums d exists, by max flow on the bipartite transport
/// network. On failure the min cut yields a violating subset pair; when
/// feasible, strictness of the subset inequalities is checked over all tight
/// cuts via residual reachability.
inline CompatibilityReport compatibility_check(const Matrix& a, const std::vector<double>& c,
                                               const std::vector<double>& d) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    if (c.size() != n || d.size() != m)
        throw Error("compatibility_check: vector lengths do not match the matrix");
    for (double x : c)
        if (!(x > 0.0)) throw Error("compatibility_check: c must be strictly positive");
    for (double x : d)
        if (!(x > 0.0)) throw Error("compatibility_check: d must be strictly positive");
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < m; ++j) any = any || a(i, j) > 0.0;
        if (!any) throw Error("compatibility_check: matrix has an all-zero row");
    }
    for (std::size_t j = 0; j < m; ++j) {
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) any = any || a(i, j) > 0.0;
        if (!any) throw Error("compatibility_check: matrix has an all-zero column");
    }

    double sum_c = 0.0, sum_d = 0.0;
    for (double x : c) sum_c += x;
    for (double x : d) sum_d += x;
    if (std::abs(sum_c - sum_d) > 1e-9 * std::max(sum_c, sum_d))
        throw ScaleMismatchError("sum of c (" + std::to_string(sum_c) +
                                 ") differs from sum of d (" + std::to_string(sum_d) + ")");

    // Normalize the total mass to 1 so tolerances are relative.
    const std::size_t source = 0, sink = n + m + 1;
    detail::MaxFlowNetwork net(n + m + 2);
    for (std::size_t i = 0; i < n; ++i) net.add_edge(source, 1 + i, c[i] / sum_c);
    for (std::size_t j = 0; j < m; ++j) net.add_edge(1 + n + j, sink, d[j] / sum_d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (a(i, j) > 0.0) net.add_edge(1 + i, 1 + n + j, 2.0);

    const double flow = net.max_flow(source, sink);
    constexpr double feas_tol = 1e-9;

    CompatibilityReport rep;
    rep.flow_value = flow * sum_c;
    rep.compatible = flow >= 1.0 - feas_tol;

    if (!rep.compatible) {
        // Min cut: rows and columns on the source side of the residual graph.
        std::vector<char> side = net.residual_reachable(source);
        std::vector<std::size_t> rows, cols;
        for (std::size_t i = 0; i < n; ++i)
            if (side[1 + i]) rows.push_back(i);
        for (std::size_t j = 0; j < m; ++j)
            if (side[1 + n + j]) cols.push_back(j);
        rep.violating_sets = {std::move(rows), std::move(cols)};
        return rep;
    }

    // Every min cut S (closed under residual edges, source in S, sink out)
    // induces a tight pair I^c = S-rows, J = S-cols. The inequality for that
    // pair must not be required strict, i.e. no a_ij > 0 with i outside S
    // and j inside S. The minimal closed set containing column j is its
    // residual reach, so scanning S_j = reach(source) u reach(j) over all
    // columns covers every min cut that could expose a violation.
    rep.strict = true;
    const std::vector<char> from_source = net.residual_reachable(source);
    for (std::size_t j = 0; j < m && rep.strict; ++j) {
        const std::vector<char> from_j = net.residual_reachable(1 + n + j);
        if (from_j[sink]) continue; // no tight cut keeps this column on the source side
        for (std::size_t i = 0; i < n; ++i) {
            if (a(i, j) <= 0.0 || from_source[1 + i] || from_j[1 + i]) continue;
            rep.strict = false;
            std::vector<std::size_t> rows, cols;
            for (std::size_t r = 0; r < n; ++r)
                if (from_source[1 + r] || from_j[1 + r]) rows.push_back(r);
            for (std::size_t col = 0; col < m; ++col)
                if (from_source[1 + n + col] || from_j[1 + n + col]) cols.push_back(col);
            rep.violating_sets = {std::move(rows), std::move(cols)};
            break;
        }
    }
    return rep;
}

} // namespace multindex
