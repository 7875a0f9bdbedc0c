#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <vector>

#include "nearmatch/errors.hpp"
#include "nearmatch/graph.hpp"
#include "nearmatch/matching.hpp"

namespace nearmatch {

// ceil((1-eps)*n) with a guard against values like 2/3*3 landing just above
// an integer in floating point. Ties at the threshold count as covered.
inline int coverage_threshold(int n, double eps) {
    double t = (1.0 - eps) * static_cast<double>(n);
    int c = static_cast<int>(std::ceil(t - 1e-9));
    if (c < 0) c = 0;
    return c;
}

struct CensusResult {
    int n = 0;
    std::map<int, std::uint64_t> by_coverage;  // covered-vertex count 2k -> #maximal matchings of size k

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto& [c, k] : by_coverage) s += k;
        return s;
    }

    // #maximal matchings covering at least ceil((1-eps)*n) vertices.
    std::uint64_t nm_of_eps(double eps) const {
        int thr = coverage_threshold(n, eps);
        std::uint64_t s = 0;
        for (auto& [c, k] : by_coverage)
            if (c >= thr) s += k;
        return s;
    }
};

inline int census_vertex_limit() {
    if (const char* env = std::getenv("NEARMATCH_CENSUS_MAX_N")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 24;
}

namespace detail {

// Depth-first branching on the lowest-indexed undecided vertex: either match
// it to an undecided neighbor or leave it unmatched. Each maximal matching is
// produced exactly once because the decision sequence is determined by the
// matching itself. A vertex may be left unmatched only if it has no
// previously-unmatched neighbor, which enforces maximality at the leaves.
class CensusEnumerator {
public:
    explicit CensusEnumerator(const Graph& g) : g_(g), n_(g.vertex_count()) {}

    template <typename Visit>
    void run(Visit&& visit) {
        partner_.assign(n_, -2);  // -2 undecided, -1 unmatched, else partner
        unmatched_ = VertexSet(n_);
        std::vector<int> stack;
        recurse(0, 0, visit);
    }

private:
    template <typename Visit>
    void recurse(int v, int matched_edges, Visit&& visit) {
        while (v < n_ && partner_[v] != -2) ++v;
        if (v == n_) {
            visit(matched_edges, partner_);
            return;
        }
        // Leave v unmatched: legal only if no unmatched neighbor exists.
        if (g_.degree_into(v, unmatched_) == 0) {
            partner_[v] = -1;
            unmatched_.add(v);
            recurse(v + 1, matched_edges, visit);
            unmatched_.remove(v);
            partner_[v] = -2;
        }
        // Match v to each undecided neighbor (all smaller vertices are decided).
        for (int u : g_.neighbors(v)) {
            if (partner_[u] != -2 || u == v) continue;
            partner_[v] = u;
            partner_[u] = v;
            recurse(v + 1, matched_edges + 1, visit);
            partner_[v] = -2;
            partner_[u] = -2;
        }
    }

    const Graph& g_;
    int n_;
    std::vector<int> partner_;
    VertexSet unmatched_;
};

}  // namespace detail

// Exact census of all maximal matchings, keyed by covered-vertex count.
inline CensusResult census_maximal_matchings(const Graph& g, int max_n = census_vertex_limit()) {
    if (g.vertex_count() > max_n)
        throw ResourceLimitError("census: " + std::to_string(g.vertex_count()) +
                                 " vertices exceeds limit " + std::to_string(max_n));
    CensusResult res;
    res.n = g.vertex_count();
    detail::CensusEnumerator en(g);
    en.run([&](int matched_edges, const std::vector<int>&) {
        res.by_coverage[2 * matched_edges] += 1;
    });
    return res;
}

// Census variant handing every maximal matching to the callback; test hook.
template <typename Visit>
inline void for_each_maximal_matching(const Graph& g, Visit&& visit,
                                      int max_n = census_vertex_limit()) {
    if (g.vertex_count() > max_n)
        throw ResourceLimitError("census: " + std::to_string(g.vertex_count()) +
                                 " vertices exceeds limit " + std::to_string(max_n));
    detail::CensusEnumerator en(g);
    en.run([&](int, const std::vector<int>& partner) {
        Matching m;
        for (int v = 0; v < g.vertex_count(); ++v)
            if (partner[v] > v) m.edges.emplace_back(v, partner[v]);
        visit(m);
    });
}

inline std::uint64_t nm_count(const Graph& g, double eps, int max_n = census_vertex_limit()) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("nm_count: eps outside [0,1]");
    return census_maximal_matchings(g, max_n).nm_of_eps(eps);
}

}  // namespace nearmatch
