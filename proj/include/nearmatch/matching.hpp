#pragma once

#include <algorithm>
#include <functional>
#include <utility>
#include <vector>

#include "nearmatch/graph.hpp"

namespace nearmatch {

struct Matching {
    std::vector<std::pair<int, int>> edges;

    int size() const { return static_cast<int>(edges.size()); }

    VertexSet covered(int universe) const {
        VertexSet s(universe);
        for (auto [u, v] : edges) {
            s.add(u);
            s.add(v);
        }
        return s;
    }

    // Canonical form: each edge (min,max), edges sorted.
    void normalize() {
        for (auto& e : edges)
            if (e.first > e.second) std::swap(e.first, e.second);
        std::sort(edges.begin(), edges.end());
    }
};

inline void validate_matching(const Graph& g, const Matching& m) {
    VertexSet seen(g.vertex_count());
    for (auto [u, v] : m.edges) {
        if (!g.has_edge(u, v))
            throw std::invalid_argument("matching edge (" + std::to_string(u) + "," +
                                        std::to_string(v) + ") not in graph");
        if (seen.contains(u) || seen.contains(v))
            throw std::invalid_argument("matching edges share endpoint");
        seen.add(u);
        seen.add(v);
    }
}

// True iff no edge of g has both endpoints uncovered by m.
inline bool is_maximal(const Graph& g, const Matching& m) {
    validate_matching(g, m);
    VertexSet cov = m.covered(g.vertex_count());
    VertexSet unc(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v)
        if (!cov.contains(v)) unc.add(v);
    for (int v : unc.vertices())
        if (g.degree_into(v, unc) > 0) return false;
    return true;
}

namespace detail {

// Edmonds blossom algorithm, O(V^3). Classic contracted-base formulation:
// `base` maps vertices to their blossom base, `p` is the alternating forest.
class BlossomMatcher {
public:
    explicit BlossomMatcher(const Graph& g) : g_(g), n_(g.vertex_count()) {}

    std::vector<int> solve() {
        match_.assign(n_, -1);
        // Greedy seed so augmentation only runs from the few leftover vertices.
        for (int v = 0; v < n_; ++v) {
            if (match_[v] != -1) continue;
            for (int u : g_.neighbors(v))
                if (match_[u] == -1) {
                    match_[v] = u;
                    match_[u] = v;
                    break;
                }
        }
        for (int v = 0; v < n_; ++v)
            if (match_[v] == -1) {
                int u = find_path(v);
                while (u != -1) {
                    int pv = p_[u], ppv = match_[pv];
                    match_[u] = pv;
                    match_[pv] = u;
                    u = ppv;
                }
            }
        return match_;
    }

private:
    int lca(int a, int b) {
        std::vector<char> mark(n_, 0);
        int v = a;
        for (;;) {
            v = base_[v];
            mark[v] = 1;
            if (match_[v] == -1) break;
            v = p_[match_[v]];
        }
        v = b;
        for (;;) {
            v = base_[v];
            if (mark[v]) return v;
            v = p_[match_[v]];
        }
    }

    void mark_path(int v, int b, int child) {
        while (base_[v] != b) {
            blossom_[base_[v]] = 1;
            blossom_[base_[match_[v]]] = 1;
            p_[v] = child;
            child = match_[v];
            v = p_[child];
        }
    }

    int find_path(int root) {
        used_.assign(n_, 0);
        p_.assign(n_, -1);
        base_.resize(n_);
        for (int i = 0; i < n_; ++i) base_[i] = i;
        used_[root] = 1;
        std::vector<int> queue = {root};
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int v = queue[qi];
            for (int to : g_.neighbors(v)) {
                if (base_[v] == base_[to] || match_[v] == to) continue;
                if (to == root || (match_[to] != -1 && p_[match_[to]] != -1)) {
                    // Odd cycle: contract the blossom.
                    int curbase = lca(v, to);
                    blossom_.assign(n_, 0);
                    mark_path(v, curbase, to);
                    mark_path(to, curbase, v);
                    for (int i = 0; i < n_; ++i)
                        if (blossom_[base_[i]]) {
                            base_[i] = curbase;
                            if (!used_[i]) {
                                used_[i] = 1;
                                queue.push_back(i);
                            }
                        }
                } else if (p_[to] == -1) {
                    p_[to] = v;
                    if (match_[to] == -1) return to;
                    used_[match_[to]] = 1;
                    queue.push_back(match_[to]);
                }
            }
        }
        return -1;
    }

    const Graph& g_;
    int n_;
    std::vector<int> match_, p_, base_;
    std::vector<char> used_, blossom_;
};

}  // namespace detail

// Maximum matching on a general graph.
inline Matching max_matching(const Graph& g) {
    detail::BlossomMatcher bm(g);
    std::vector<int> mate = bm.solve();
    Matching m;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (mate[v] > v) m.edges.emplace_back(v, mate[v]);
    return m;
}

inline int max_matching_size(const Graph& g) { return max_matching(g).size(); }

// Independent bipartite matcher (Hopcroft-Karp). Only edges crossing
// (left, right) are used. Returns the matching size.
inline int hopcroft_karp(const Graph& g, const VertexSet& left, const VertexSet& right,
                         Matching* out = nullptr) {
    if (left.intersects(right)) throw std::invalid_argument("hopcroft_karp: sides overlap");
    std::vector<int> ls = left.vertices(), rs = right.vertices();
    int nl = static_cast<int>(ls.size()), nr = static_cast<int>(rs.size());
    std::vector<int> rindex(g.vertex_count(), -1);
    for (int j = 0; j < nr; ++j) rindex[rs[j]] = j;
    std::vector<std::vector<int>> adj(nl);
    for (int i = 0; i < nl; ++i)
        for (int u : g.neighbors(ls[i]))
            if (rindex[u] >= 0) adj[i].push_back(rindex[u]);

    constexpr int kInf = 1 << 29;
    std::vector<int> mate_l(nl, -1), mate_r(nr, -1), dist(nl, 0);

    auto bfs = [&]() {
        std::vector<int> q;
        for (int i = 0; i < nl; ++i) {
            dist[i] = mate_l[i] == -1 ? 0 : kInf;
            if (mate_l[i] == -1) q.push_back(i);
        }
        bool found = false;
        for (std::size_t qi = 0; qi < q.size(); ++qi) {
            int i = q[qi];
            for (int j : adj[i]) {
                int i2 = mate_r[j];
                if (i2 == -1)
                    found = true;
                else if (dist[i2] == kInf) {
                    dist[i2] = dist[i] + 1;
                    q.push_back(i2);
                }
            }
        }
        return found;
    };
    std::vector<char> visited;
    std::function<bool(int)> dfs = [&](int i) {
        visited[i] = 1;
        for (int j : adj[i]) {
            int i2 = mate_r[j];
            if (i2 == -1 || (!visited[i2] && dist[i2] == dist[i] + 1 && dfs(i2))) {
                mate_l[i] = j;
                mate_r[j] = i;
                return true;
            }
        }
        return false;
    };

    int size = 0;
    while (bfs()) {
        visited.assign(nl, 0);
        for (int i = 0; i < nl; ++i)
            if (mate_l[i] == -1 && dfs(i)) ++size;
    }
    if (out) {
        out->edges.clear();
        for (int i = 0; i < nl; ++i)
            if (mate_l[i] != -1) out->edges.emplace_back(ls[i], rs[mate_l[i]]);
    }
    return size;
}

}  // namespace nearmatch
