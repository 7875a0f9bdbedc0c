#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nearmatch/graph.hpp"
#include "nearmatch/matching.hpp"
#include "nearmatch/regularity.hpp"

namespace nearmatch {

// E1 irregular; E2 regular with density <= n^{sqrt(eps)-1}; E3 density in
// [n^{sqrt(eps)-1}, n^{-sqrt(eps)}]; E4 density >= n^{-sqrt(eps)}.
enum class EdgeClass { E1, E2, E3, E4 };

inline std::string edge_class_name(EdgeClass c) {
    switch (c) {
        case EdgeClass::E1: return "E1";
        case EdgeClass::E2: return "E2";
        case EdgeClass::E3: return "E3";
        case EdgeClass::E4: return "E4";
    }
    return "?";
}

struct QuotientGraph {
    int m = 0;    // number of parts
    int n = 0;    // original vertex count
    int K = 0;    // part count used in the r statistics (equals m)
    double eps = 0.0;  // partition-level parameter; thresholds use sqrt(eps)
    std::vector<std::vector<double>> p;              // m x m, diagonal = internal density
    std::map<std::pair<int, int>, EdgeClass> edge_class;  // keyed i < j
    std::map<std::pair<int, int>, double> r_edge;         // E1 pairs: K*m_ij/n
    std::vector<double> r_vertex;                          // 2K*m_i/n

    double threshold_low() const { return std::pow(static_cast<double>(n), std::sqrt(eps) - 1.0); }
    double threshold_high() const { return std::pow(static_cast<double>(n), -std::sqrt(eps)); }

    double density(int i, int j) const { return p[i][j]; }
    bool has_edge(int i, int j) const { return i != j && p[i][j] != 0.0; }
    EdgeClass cls(int i, int j) const {
        auto it = edge_class.find({std::min(i, j), std::max(i, j)});
        if (it == edge_class.end()) throw std::invalid_argument("quotient: unclassified pair");
        return it->second;
    }

    // Density-only classification; boundaries go to the denser class.
    EdgeClass classify_density(double d) const {
        if (d >= threshold_high() - 1e-12) return EdgeClass::E4;
        if (d >= threshold_low() - 1e-12) return EdgeClass::E3;
        return EdgeClass::E2;
    }

    // Synthetic quotient from a density matrix; every pair regular, r
    // statistics zeroed. Test and classification-layer entry point.
    static QuotientGraph from_matrix(const std::vector<std::vector<double>>& P, int n_total,
                                     double eps) {
        QuotientGraph H;
        H.m = static_cast<int>(P.size());
        H.K = H.m;
        H.n = n_total;
        H.eps = eps;
        H.p = P;
        H.r_vertex.assign(H.m, 0.0);
        for (int i = 0; i < H.m; ++i)
            for (int j = i + 1; j < H.m; ++j) H.edge_class[{i, j}] = H.classify_density(P[i][j]);
        return H;
    }
};

// Quotient of g under an equitable partition with certification reports.
// r_i comes from a blossom matching inside each part; r_ij from the
// bipartite matcher on each irregular pair.
inline QuotientGraph build_quotient(const Graph& g, const EquitablePartition& part,
                                    const std::vector<PairReport>& reports, double eps) {
    QuotientGraph H;
    H.m = part.K();
    H.K = part.K();
    H.n = g.vertex_count();
    H.eps = eps;
    H.p.assign(H.m, std::vector<double>(H.m, 0.0));
    for (int i = 0; i < H.m; ++i) {
        H.p[i][i] = internal_density(g, part.parts[i]);
        for (int j = i + 1; j < H.m; ++j)
            H.p[i][j] = H.p[j][i] = edge_density(g, part.parts[i], part.parts[j]);
    }

    std::map<std::pair<int, int>, bool> irregular;
    for (const auto& rep : reports)
        if (rep.i >= 0 && rep.j >= 0)
            irregular[{std::min(rep.i, rep.j), std::max(rep.i, rep.j)}] = !rep.regular;

    for (int i = 0; i < H.m; ++i)
        for (int j = i + 1; j < H.m; ++j) {
            auto it = irregular.find({i, j});
            if (it != irregular.end() && it->second) {
                H.edge_class[{i, j}] = EdgeClass::E1;
                int mij = hopcroft_karp(g, part.parts[i], part.parts[j]);
                H.r_edge[{i, j}] = static_cast<double>(H.K) * mij / H.n;
            } else {
                H.edge_class[{i, j}] = H.classify_density(H.p[i][j]);
            }
        }

    H.r_vertex.assign(H.m, 0.0);
    for (int i = 0; i < H.m; ++i) {
        InducedGraph sub = induced(g, part.parts[i]);
        int mi = max_matching_size(sub.graph);
        H.r_vertex[i] = 2.0 * H.K * mi / H.n;
    }
    return H;
}

}  // namespace nearmatch
