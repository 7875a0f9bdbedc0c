#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nearmatch/errors.hpp"

namespace nearmatch {

// Subset of [0, universe), stored as a bitmask. Word layout matches Graph
// adjacency rows so degree-into-set is a popcount of ANDed words.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(int universe)
        : universe_(universe), words_(static_cast<std::size_t>((universe + 63) / 64), 0) {}

    static VertexSet full(int universe) {
        VertexSet s(universe);
        for (int v = 0; v < universe; ++v) s.add(v);
        return s;
    }
    static VertexSet of(int universe, std::initializer_list<int> vs) {
        VertexSet s(universe);
        for (int v : vs) s.add(v);
        return s;
    }
    static VertexSet from_vertices(int universe, const std::vector<int>& vs) {
        VertexSet s(universe);
        for (int v : vs) s.add(v);
        return s;
    }
    // Consecutive range [lo, hi).
    static VertexSet range(int universe, int lo, int hi) {
        VertexSet s(universe);
        for (int v = lo; v < hi; ++v) s.add(v);
        return s;
    }

    int universe() const { return universe_; }
    int size() const { return count_; }
    bool empty() const { return count_ == 0; }

    bool contains(int v) const {
        return v >= 0 && v < universe_ && (words_[v >> 6] >> (v & 63)) & 1;
    }
    void add(int v) {
        check(v);
        std::uint64_t& w = words_[v >> 6];
        std::uint64_t bit = std::uint64_t{1} << (v & 63);
        if (!(w & bit)) {
            w |= bit;
            ++count_;
        }
    }
    void remove(int v) {
        check(v);
        std::uint64_t& w = words_[v >> 6];
        std::uint64_t bit = std::uint64_t{1} << (v & 63);
        if (w & bit) {
            w &= ~bit;
            --count_;
        }
    }

    bool intersects(const VertexSet& o) const {
        std::size_t k = std::min(words_.size(), o.words_.size());
        for (std::size_t i = 0; i < k; ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }
    int intersection_size(const VertexSet& o) const {
        std::size_t k = std::min(words_.size(), o.words_.size());
        int c = 0;
        for (std::size_t i = 0; i < k; ++i) c += std::popcount(words_[i] & o.words_[i]);
        return c;
    }

    std::vector<int> vertices() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(count_));
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                int b = std::countr_zero(w);
                out.push_back(static_cast<int>(i * 64 + static_cast<std::size_t>(b)));
                w &= w - 1;
            }
        }
        return out;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const VertexSet& o) const {
        return universe_ == o.universe_ && words_ == o.words_;
    }

private:
    void check(int v) const {
        if (v < 0 || v >= universe_)
            throw std::invalid_argument("vertex " + std::to_string(v) + " out of range [0," +
                                        std::to_string(universe_) + ")");
    }
    int universe_ = 0;
    int count_ = 0;
    std::vector<std::uint64_t> words_;
};

// Simple undirected graph on [0, n). Adjacency is a packed bit matrix, so
// edge queries are O(1) and set-degree queries are word-parallel popcounts.
class Graph {
public:
    explicit Graph(int n = 0)
        : n_(n), words_(static_cast<std::size_t>((n + 63) / 64)),
          adj_(static_cast<std::size_t>(n) * static_cast<std::size_t>((n + 63) / 64), 0) {}

    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
        Graph g(n);
        for (auto [u, v] : edges) g.add_edge(u, v);
        return g;
    }

    int vertex_count() const { return n_; }
    std::size_t edge_count() const { return m_; }
    std::size_t words_per_row() const { return words_; }

    void add_edge(int u, int v) {
        check(u);
        check(v);
        if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
        if (has_edge(u, v)) return;
        set_bit(u, v);
        set_bit(v, u);
        ++m_;
    }

    bool has_edge(int u, int v) const {
        check(u);
        check(v);
        if (u == v) return false;
        return (adj_[static_cast<std::size_t>(u) * words_ + static_cast<std::size_t>(v >> 6)] >>
                (v & 63)) &
               1;
    }

    const std::uint64_t* row(int v) const { return adj_.data() + static_cast<std::size_t>(v) * words_; }

    int degree(int v) const {
        check(v);
        const std::uint64_t* r = row(v);
        int c = 0;
        for (std::size_t i = 0; i < words_; ++i) c += std::popcount(r[i]);
        return c;
    }

    int degree_into(int v, const VertexSet& s) const {
        check(v);
        const std::uint64_t* r = row(v);
        const auto& sw = s.words();
        std::size_t k = std::min(words_, sw.size());
        int c = 0;
        for (std::size_t i = 0; i < k; ++i) c += std::popcount(r[i] & sw[i]);
        return c;
    }

    std::vector<int> neighbors(int v) const {
        check(v);
        const std::uint64_t* r = row(v);
        std::vector<int> out;
        for (std::size_t i = 0; i < words_; ++i) {
            std::uint64_t w = r[i];
            while (w) {
                int b = std::countr_zero(w);
                out.push_back(static_cast<int>(i * 64 + static_cast<std::size_t>(b)));
                w &= w - 1;
            }
        }
        return out;
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(m_);
        for (int u = 0; u < n_; ++u)
            for (int v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    // Line-oriented text format: first line "n m", then m lines "u v".
    // Blank lines and '#' comments are ignored.
    static Graph parse(std::istream& in) {
        int lineno = 0;
        std::string line;
        auto next_payload = [&](std::string& out) -> bool {
            while (std::getline(in, line)) {
                ++lineno;
                std::size_t h = line.find('#');
                if (h != std::string::npos) line.resize(h);
                std::size_t a = line.find_first_not_of(" \t\r");
                if (a == std::string::npos) continue;
                out = line;
                return true;
            }
            return false;
        };
        std::string payload;
        if (!next_payload(payload)) throw ParseError(lineno ? lineno : 1, "missing header 'n m'");
        long long n = -1, m = -1;
        {
            std::istringstream ss(payload);
            std::string extra;
            if (!(ss >> n >> m) || (ss >> extra))
                throw ParseError(lineno, "expected header 'n m'");
        }
        if (n < 0 || m < 0) throw ParseError(lineno, "negative counts in header");
        Graph g(static_cast<int>(n));
        for (long long i = 0; i < m; ++i) {
            if (!next_payload(payload))
                throw ParseError(lineno ? lineno : 1,
                                 "expected " + std::to_string(m) + " edges, got " + std::to_string(i));
            long long u = -1, v = -1;
            std::istringstream ss(payload);
            std::string extra;
            if (!(ss >> u >> v) || (ss >> extra)) throw ParseError(lineno, "expected edge 'u v'");
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw ParseError(lineno, "endpoint out of range");
            if (u == v) throw ParseError(lineno, "self-loop");
            g.add_edge(static_cast<int>(u), static_cast<int>(v));
        }
        return g;
    }

    void write(std::ostream& out) const {
        out << n_ << ' ' << m_ << '\n';
        for (auto [u, v] : edges()) out << u << ' ' << v << '\n';
    }

    bool operator==(const Graph& o) const { return n_ == o.n_ && adj_ == o.adj_; }

private:
    void check(int v) const {
        if (v < 0 || v >= n_)
            throw std::invalid_argument("vertex " + std::to_string(v) + " out of range [0," +
                                        std::to_string(n_) + ")");
    }
    void set_bit(int u, int v) {
        adj_[static_cast<std::size_t>(u) * words_ + static_cast<std::size_t>(v >> 6)] |=
            std::uint64_t{1} << (v & 63);
    }

    int n_ = 0;
    std::size_t words_ = 0;
    std::size_t m_ = 0;
    std::vector<std::uint64_t> adj_;
};

inline std::size_t edges_between(const Graph& g, const VertexSet& x, const VertexSet& y) {
    std::size_t e = 0;
    for (int v : x.vertices()) e += static_cast<std::size_t>(g.degree_into(v, y));
    return e;
}

inline std::size_t edges_within(const Graph& g, const VertexSet& x) {
    std::size_t e = 0;
    for (int v : x.vertices()) e += static_cast<std::size_t>(g.degree_into(v, x));
    return e / 2;
}

// d(X,Y) = e(X,Y) / (|X||Y|) for disjoint non-empty X, Y.
inline double edge_density(const Graph& g, const VertexSet& x, const VertexSet& y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("edge_density: empty side");
    if (x.intersects(y)) throw std::invalid_argument("edge_density: overlapping sides");
    return static_cast<double>(edges_between(g, x, y)) /
           (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

// Internal density of one part: e(X) / C(|X|, 2).
inline double internal_density(const Graph& g, const VertexSet& x) {
    if (x.size() < 2) return 0.0;
    double pairs = 0.5 * static_cast<double>(x.size()) * static_cast<double>(x.size() - 1);
    return static_cast<double>(edges_within(g, x)) / pairs;
}

struct InducedGraph {
    Graph graph;
    std::vector<int> to_original;  // new index -> original vertex
};

inline InducedGraph induced(const Graph& g, const VertexSet& x) {
    std::vector<int> verts = x.vertices();
    Graph sub(static_cast<int>(verts.size()));
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j)
            if (g.has_edge(verts[i], verts[j])) sub.add_edge(static_cast<int>(i), static_cast<int>(j));
    return {std::move(sub), std::move(verts)};
}

struct InducedBipartite {
    Graph graph;                   // x vertices first, then y; cross edges only
    std::vector<int> to_original;  // new index -> original vertex
    int left_size;
};

inline InducedBipartite induced_bipartite(const Graph& g, const VertexSet& x, const VertexSet& y) {
    if (x.intersects(y)) throw std::invalid_argument("induced_bipartite: overlapping sides");
    std::vector<int> xs = x.vertices(), ys = y.vertices();
    Graph sub(static_cast<int>(xs.size() + ys.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
            if (g.has_edge(xs[i], ys[j]))
                sub.add_edge(static_cast<int>(i), static_cast<int>(xs.size() + j));
    std::vector<int> map = xs;
    map.insert(map.end(), ys.begin(), ys.end());
    return {std::move(sub), std::move(map), static_cast<int>(xs.size())};
}

}  // namespace nearmatch
