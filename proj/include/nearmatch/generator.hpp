#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nearmatch/graph.hpp"

namespace nearmatch {

enum class GeneratorKind {
    BipartiteRegular,        // sides of size n each, cross pairs iid with prob p
    Quasirandom,             // G(n, p)
    Generalized,             // n vertices in m equal blocks, pair prob from P
    TightnessCounterexample  // the planted K-part construction with a perfect matching
};

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::BipartiteRegular;
    int n = 0;
    double p = 0.0;
    double eps = 0.0;                     // carried for provenance; sampling ignores it
    std::vector<std::vector<double>> P;   // Generalized only; symmetric, entries in [0,1]
    int K = 0;                            // TightnessCounterexample only
    std::uint64_t seed = 0;

    void validate() const {
        if (n <= 0) throw std::invalid_argument("generator: n must be positive");
        switch (kind) {
            case GeneratorKind::BipartiteRegular:
            case GeneratorKind::Quasirandom:
                if (p < 0.0 || p > 1.0) throw std::invalid_argument("generator: p outside [0,1]");
                break;
            case GeneratorKind::Generalized: {
                std::size_t m = P.size();
                if (m == 0) throw std::invalid_argument("generator: empty P matrix");
                if (n % static_cast<int>(m) != 0)
                    throw std::invalid_argument("generator: n not divisible by part count");
                for (std::size_t i = 0; i < m; ++i) {
                    if (P[i].size() != m) throw std::invalid_argument("generator: P not square");
                    for (std::size_t j = 0; j < m; ++j) {
                        if (P[i][j] < 0.0 || P[i][j] > 1.0)
                            throw std::invalid_argument("generator: P entry outside [0,1]");
                        if (P[i][j] != P[j][i])
                            throw std::invalid_argument("generator: P not symmetric");
                    }
                }
                break;
            }
            case GeneratorKind::TightnessCounterexample:
                if (K < 2 || K % 4 != 2)
                    throw std::invalid_argument("generator: K must satisfy K >= 2 and K == 2 (mod 4)");
                if (n % K != 0) throw std::invalid_argument("generator: n not divisible by K");
                break;
        }
    }
};

namespace detail {

// Stable uniform in [0,1): top 53 bits of the engine output. Keeps generated
// graphs byte-identical across standard library implementations.
inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Deterministic for a fixed spec (including seed). Vertex blocks are
// consecutive index ranges: block i is [i*n/m, (i+1)*n/m).
inline Graph generate(const GeneratorSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    switch (spec.kind) {
        case GeneratorKind::BipartiteRegular: {
            Graph g(2 * spec.n);
            for (int u = 0; u < spec.n; ++u)
                for (int v = 0; v < spec.n; ++v)
                    if (detail::unit_double(rng) < spec.p) g.add_edge(u, spec.n + v);
            return g;
        }
        case GeneratorKind::Quasirandom: {
            Graph g(spec.n);
            for (int u = 0; u < spec.n; ++u)
                for (int v = u + 1; v < spec.n; ++v)
                    if (detail::unit_double(rng) < spec.p) g.add_edge(u, v);
            return g;
        }
        case GeneratorKind::Generalized: {
            int m = static_cast<int>(spec.P.size());
            int part = spec.n / m;
            Graph g(spec.n);
            for (int u = 0; u < spec.n; ++u)
                for (int v = u + 1; v < spec.n; ++v) {
                    double pij = spec.P[static_cast<std::size_t>(u / part)]
                                       [static_cast<std::size_t>(v / part)];
                    if (detail::unit_double(rng) < pij) g.add_edge(u, v);
                }
            return g;
        }
        case GeneratorKind::TightnessCounterexample: {
            // Parts V_1..V_K (1-based). Complete G[V_i] for i >= (K+4)/2,
            // complete bipartite G[V_i, V_{i+1}] for odd i <= K/2, empty elsewhere.
            int K = spec.K;
            int part = spec.n / K;
            Graph g(spec.n);
            auto lo = [&](int i) { return (i - 1) * part; };  // 1-based part index
            for (int i = (K + 4) / 2; i <= K; ++i)
                for (int u = lo(i); u < lo(i) + part; ++u)
                    for (int v = u + 1; v < lo(i) + part; ++v) g.add_edge(u, v);
            for (int i = 1; i <= K / 2; i += 2)
                for (int u = lo(i); u < lo(i) + part; ++u)
                    for (int v = lo(i + 1); v < lo(i + 1) + part; ++v) g.add_edge(u, v);
            return g;
        }
    }
    throw std::logic_error("unreachable");
}

// The pairs the tightness construction plants as irregular in its Szemeredi
// partition: (V_i, V_{i+1}) for odd i <= K/2, 0-based part indices here.
inline std::vector<std::pair<int, int>> tightness_planted_irregular_pairs(int K) {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= K / 2; i += 2) out.emplace_back(i - 1, i);
    return out;
}

inline std::string kind_name(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::BipartiteRegular: return "bipartite-regular";
        case GeneratorKind::Quasirandom: return "quasirandom";
        case GeneratorKind::Generalized: return "generalized";
        case GeneratorKind::TightnessCounterexample: return "tightness-counterexample";
    }
    return "?";
}

inline GeneratorKind kind_from_name(const std::string& s) {
    if (s == "bipartite-regular") return GeneratorKind::BipartiteRegular;
    if (s == "quasirandom") return GeneratorKind::Quasirandom;
    if (s == "generalized") return GeneratorKind::Generalized;
    if (s == "tightness-counterexample") return GeneratorKind::TightnessCounterexample;
    throw std::invalid_argument("unknown generator kind: " + s);
}

}  // namespace nearmatch
