#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nearmatch/graph.hpp"

namespace nearmatch {

struct EquitablePartition {
    std::vector<VertexSet> parts;
    double eps = 0.0;

    int K() const { return static_cast<int>(parts.size()); }
    int n() const {
        int s = 0;
        for (const auto& p : parts) s += p.size();
        return s;
    }
    bool equitable() const {
        int lo = parts.empty() ? 0 : parts[0].size(), hi = lo;
        for (const auto& p : parts) {
            lo = std::min(lo, p.size());
            hi = std::max(hi, p.size());
        }
        return hi - lo <= 1;
    }

    // Consecutive index chunks, sizes differing by at most one.
    static EquitablePartition initial(int n, int k, double eps) {
        if (k <= 0 || k > n) throw std::invalid_argument("partition: need 1 <= K <= n");
        EquitablePartition p;
        p.eps = eps;
        int base = n / k, extra = n % k, at = 0;
        for (int i = 0; i < k; ++i) {
            int sz = base + (i < extra ? 1 : 0);
            p.parts.push_back(VertexSet::range(n, at, at + sz));
            at += sz;
        }
        return p;
    }
};

enum class CertifyMode { Exhaustive, Heuristic };

struct PairReport {
    int i = -1, j = -1;
    double density = 0.0;
    bool regular = true;
    CertifyMode mode = CertifyMode::Exhaustive;
    double effective_eps = 0.0;  // parameter at which the verdict is claimed
    std::optional<std::pair<VertexSet, VertexSet>> witness;
    double witness_density = 0.0;
};

namespace detail {

inline int min_witness_size(double eps, int side) {
    int m = static_cast<int>(std::ceil(eps * side - 1e-12));
    return std::max(1, m);
}

// Exact decision for sides up to 16 vertices. Enumerates all X' subsets in
// Gray-code order; for each X' the extremal Y' of every admissible size is a
// prefix or suffix of y sorted by degree into X', so only those are checked.
inline PairReport certify_exhaustive(const Graph& g, const VertexSet& x, const VertexSet& y,
                                     double eps) {
    std::vector<int> xs = x.vertices(), ys = y.vertices();
    int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
    PairReport rep;
    rep.density = edge_density(g, x, y);
    rep.mode = CertifyMode::Exhaustive;
    rep.effective_eps = eps;

    std::vector<std::uint32_t> ymask(nx, 0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            if (g.has_edge(xs[i], ys[j])) ymask[i] |= std::uint32_t{1} << j;

    int minx = min_witness_size(eps, nx), miny = min_witness_size(eps, ny);
    std::vector<int> cnt(ny, 0);  // degree of each y vertex into current X'

    double best_dev = -1.0;
    std::uint32_t best_mask = 0;
    int best_size = 0;
    bool best_top = true;

    std::uint32_t cur = 0;
    std::uint32_t total = std::uint32_t{1} << nx;
    std::vector<int> order(ny), pref(ny + 1, 0);
    for (std::uint32_t it = 1; it < total; ++it) {
        std::uint32_t gray = it ^ (it >> 1);
        std::uint32_t changed = gray ^ cur;
        int bit = std::countr_zero(changed);
        int sgn = (gray >> bit) & 1 ? 1 : -1;
        std::uint32_t wm = ymask[bit];
        while (wm) {
            cnt[std::countr_zero(wm)] += sgn;
            wm &= wm - 1;
        }
        cur = gray;
        int szx = std::popcount(cur);
        if (szx < minx) continue;

        for (int j = 0; j < ny; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return cnt[a] > cnt[b]; });
        for (int j = 0; j < ny; ++j) pref[j + 1] = pref[j] + cnt[order[j]];
        for (int s = miny; s <= ny; ++s) {
            double denom = static_cast<double>(szx) * s;
            double dtop = pref[s] / denom;
            double dbot = (pref[ny] - pref[ny - s]) / denom;
            double devt = std::abs(dtop - rep.density);
            double devb = std::abs(dbot - rep.density);
            if (devt > best_dev) {
                best_dev = devt;
                best_mask = cur;
                best_size = s;
                best_top = true;
            }
            if (devb > best_dev) {
                best_dev = devb;
                best_mask = cur;
                best_size = s;
                best_top = false;
            }
        }
    }

    if (best_dev >= eps - 1e-12 && best_dev > 0.0) {
        rep.regular = false;
        VertexSet wx(x.universe()), wy(y.universe());
        for (int i = 0; i < nx; ++i)
            if ((best_mask >> i) & 1) wx.add(xs[i]);
        // Rebuild the degree ordering for the winning mask.
        std::fill(cnt.begin(), cnt.end(), 0);
        for (int i = 0; i < nx; ++i)
            if ((best_mask >> i) & 1) {
                std::uint32_t wm = ymask[i];
                while (wm) {
                    cnt[std::countr_zero(wm)] += 1;
                    wm &= wm - 1;
                }
            }
        for (int j = 0; j < ny; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return cnt[a] > cnt[b]; });
        if (best_top)
            for (int j = 0; j < best_size; ++j) wy.add(ys[order[j]]);
        else
            for (int j = ny - best_size; j < ny; ++j) wy.add(ys[order[j]]);
        rep.witness = std::make_pair(wx, wy);
        rep.witness_density = edge_density(g, wx, wy);
    }
    return rep;
}

// Normal tail P(Z >= z).
inline double normal_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Witness hunt for large sides. Candidate X' sets come from degree
// deviations; for each candidate the extremal Y' over all admissible sizes
// is scanned, and a witness is reported only after an exact density check.
// A pair with deviations indistinguishable from sampling noise is accepted
// as regular at the observed parameter.
inline PairReport certify_heuristic(const Graph& g, const VertexSet& x, const VertexSet& y,
                                    double eps) {
    PairReport rep;
    rep.density = edge_density(g, x, y);
    rep.mode = CertifyMode::Heuristic;

    std::vector<int> xs = x.vertices(), ys = y.vertices();
    int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
    double d = rep.density;

    std::vector<int> deg(nx);
    for (int i = 0; i < nx; ++i) deg[i] = g.degree_into(xs[i], y);
    double mean = d * ny;
    double var = ny * std::max(d * (1.0 - d), 1.0 / ny);
    double sigma = std::sqrt(var);

    // Structure gate: a Poisson outlier test on sigma-tier degree deviants.
    bool structured = false;
    for (double tier : {4.0, 6.0, 10.0}) {
        int count = 0;
        for (int i = 0; i < nx; ++i)
            if (std::abs(deg[i] - mean) >= tier * sigma) ++count;
        double expected = nx * 2.0 * normal_tail(tier);
        if (count >= 2.0 * expected + 4.0 * std::sqrt(expected) + 3.0) {
            structured = true;
            break;
        }
    }

    // Codegree gate on a deterministic pair sample.
    std::vector<std::pair<int, int>> pair_sample;
    if (!structured) {
        if (nx <= 256) {
            for (int i = 0; i < nx; ++i)
                for (int j = i + 1; j < nx; ++j) pair_sample.emplace_back(i, j);
        } else {
            for (int stride : {1, 7, 61, 251})
                for (int i = 0; i + stride < nx && pair_sample.size() < 32768; ++i)
                    pair_sample.emplace_back(i, i + stride);
        }
        const auto& yw = y.words();
        double mean_co = d * d * ny;
        double var_co = ny * std::max(d * d * (1.0 - d * d), 1.0 / ny);
        double sigma_co = std::sqrt(var_co);
        for (double tier : {4.0, 6.0, 10.0}) {
            int count = 0;
            for (auto [a, b] : pair_sample) {
                const std::uint64_t* ra = g.row(xs[a]);
                const std::uint64_t* rb = g.row(xs[b]);
                int co = 0;
                for (std::size_t w = 0; w < yw.size(); ++w)
                    co += std::popcount(ra[w] & rb[w] & yw[w]);
                if (std::abs(co - mean_co) >= tier * sigma_co) ++count;
            }
            double expected = pair_sample.size() * 2.0 * normal_tail(tier);
            if (count >= 2.0 * expected + 4.0 * std::sqrt(expected) + 3.0) {
                structured = true;
                break;
            }
        }
    }

    int minx = min_witness_size(eps, nx), miny = min_witness_size(eps, ny);

    auto try_candidate = [&](const VertexSet& wx) -> bool {
        if (wx.size() < minx) return false;
        // Extremal Y' for this X': prefixes/suffixes of y sorted by degree into X'.
        std::vector<std::pair<int, int>> dy(ny);
        for (int j = 0; j < ny; ++j) dy[j] = {g.degree_into(ys[j], wx), j};
        std::sort(dy.begin(), dy.end(), [](auto& a, auto& b) { return a.first > b.first; });
        std::vector<long long> pref(ny + 1, 0);
        for (int j = 0; j < ny; ++j) pref[j + 1] = pref[j] + dy[j].first;
        double best = -1.0;
        int best_s = 0;
        bool best_top = true;
        for (int s = miny; s <= ny; ++s) {
            double denom = static_cast<double>(wx.size()) * s;
            double devt = std::abs(pref[s] / denom - d);
            double devb = std::abs((pref[ny] - pref[ny - s]) / denom - d);
            if (devt > best) {
                best = devt;
                best_s = s;
                best_top = true;
            }
            if (devb > best) {
                best = devb;
                best_s = s;
                best_top = false;
            }
        }
        if (best < eps - 1e-12) return false;
        VertexSet wy(y.universe());
        if (best_top)
            for (int j = 0; j < best_s; ++j) wy.add(ys[dy[j].second]);
        else
            for (int j = ny - best_s; j < ny; ++j) wy.add(ys[dy[j].second]);
        double wd = edge_density(g, wx, wy);
        if (std::abs(wd - d) < eps - 1e-12) return false;
        rep.regular = false;
        rep.witness = std::make_pair(wx, wy);
        rep.witness_density = wd;
        return true;
    };

    if (structured) {
        std::vector<double> taus = {eps * ny, 2.0 * eps * ny, 4.0 * sigma, 6.0 * sigma, sigma};
        for (double tau : taus) {
            if (tau <= 0) continue;
            VertexSet above(x.universe()), below(x.universe());
            for (int i = 0; i < nx; ++i) {
                if (deg[i] >= mean + tau) above.add(xs[i]);
                if (deg[i] <= mean - tau) below.add(xs[i]);
            }
            if (try_candidate(above) || try_candidate(below)) break;
        }
        if (rep.regular) try_candidate(x);
    }

    if (rep.regular) {
        // Smallest eta >= eps at which the degree profile stops refuting
        // regularity: #{v : |deg - d|Y|| >= eta|Y|} < eta|X|.
        std::vector<double> devs(nx);
        for (int i = 0; i < nx; ++i) devs[i] = std::abs(deg[i] - mean) / ny;
        std::sort(devs.begin(), devs.end(), std::greater<double>());
        double eta = eps;
        for (int i = 0; i < nx; ++i) {
            // devs[i] is the (i+1)-th largest deviation; eta must exceed it
            // or admit more than eta*|X| deviants.
            double need = std::min(devs[i], static_cast<double>(i + 1) / nx);
            eta = std::max(eta, need);
        }
        rep.effective_eps = std::max(eps, eta);
    } else {
        rep.effective_eps = eps;
    }
    return rep;
}

}  // namespace detail

// eps-regularity certificate for the pair (x, y). Exhaustive and exact when
// both sides have at most `exhaustive_limit` vertices; witness-hunting
// heuristic otherwise (sound when it reports irregular, conservative when it
// reports regular).
inline PairReport certify_pair(const Graph& g, const VertexSet& x, const VertexSet& y, double eps,
                               int exhaustive_limit = 16) {
    if (x.empty() || y.empty()) throw std::invalid_argument("certify_pair: empty side");
    if (x.intersects(y)) throw std::invalid_argument("certify_pair: sides overlap");
    if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("certify_pair: eps outside (0,1]");
    if (x.size() <= exhaustive_limit && y.size() <= exhaustive_limit)
        return detail::certify_exhaustive(g, x, y, eps);
    return detail::certify_heuristic(g, x, y, eps);
}

// Mean-square density over unordered part pairs, weighted by pair mass.
inline double partition_index(const Graph& g, const EquitablePartition& part) {
    int K = part.K();
    double n = part.n();
    double idx = 0.0;
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j) {
            double d = edge_density(g, part.parts[i], part.parts[j]);
            idx += (part.parts[i].size() * static_cast<double>(part.parts[j].size()) / (n * n)) * d * d;
        }
    return idx;
}

struct RefinementRound {
    int K = 0;
    double index = 0.0;
    int irregular_pairs = 0;
};

struct RefinementResult {
    EquitablePartition partition;
    std::vector<PairReport> reports;
    std::vector<RefinementRound> trace;
    bool converged = false;
    bool hit_cap = false;
};

namespace detail {

// Split parts along their witness atoms, then re-cut into K' near-equal
// parts. Atoms are traversed part-major so most new parts stay inside one
// atom; the re-cut is what keeps the result equitable.
inline EquitablePartition equitable_refine(const EquitablePartition& part,
                                           const std::vector<PairReport>& reports, int new_k) {
    int n = part.n();
    int K = part.K();
    // Witness sets per part, capped to keep atom counts bounded.
    std::vector<std::vector<const VertexSet*>> splitters(K);
    for (const auto& rep : reports) {
        if (rep.regular || !rep.witness) continue;
        if (splitters[rep.i].size() < 16) splitters[rep.i].push_back(&rep.witness->first);
        if (splitters[rep.j].size() < 16) splitters[rep.j].push_back(&rep.witness->second);
    }
    std::vector<int> ordered;
    ordered.reserve(n);
    for (int i = 0; i < K; ++i) {
        std::map<std::uint64_t, std::vector<int>> atoms;  // signature -> vertices (ascending)
        for (int v : part.parts[i].vertices()) {
            std::uint64_t sig = 0;
            for (std::size_t s = 0; s < splitters[i].size(); ++s)
                if (splitters[i][s]->contains(v)) sig |= std::uint64_t{1} << s;
            atoms[sig].push_back(v);
        }
        for (auto& [sig, verts] : atoms)
            for (int v : verts) ordered.push_back(v);
    }
    EquitablePartition out;
    out.eps = part.eps;
    int base = n / new_k, extra = n % new_k, at = 0;
    for (int i = 0; i < new_k; ++i) {
        int sz = base + (i < extra ? 1 : 0);
        VertexSet p(part.parts.empty() ? n : part.parts[0].universe());
        for (int j = 0; j < sz; ++j) p.add(ordered[at + j]);
        out.parts.push_back(p);
        at += sz;
    }
    return out;
}

}  // namespace detail

// Energy-increment refinement toward an eps-regular partition. Rounds that
// would decrease the mean-square-density index are rejected, so the index
// trace is non-decreasing by construction; refinement stops when at most
// eps*K^2 pairs are irregular, or at max_K parts, or when no candidate
// refinement makes progress (reported via hit_cap).
inline RefinementResult refine_partition(const Graph& g, double eps, int k0, int max_K,
                                         int exhaustive_limit = 16) {
    if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("refine_partition: eps outside (0,1]");
    if (k0 < 1) throw std::invalid_argument("refine_partition: k0 < 1");
    if (g.vertex_count() < k0)
        throw std::invalid_argument("refine_partition: n < k0");
    if (max_K < k0) throw std::invalid_argument("refine_partition: max_K < k0");

    RefinementResult res;
    res.partition = EquitablePartition::initial(g.vertex_count(), k0, eps);

    for (;;) {
        int K = res.partition.K();
        res.reports.clear();
        int irregular = 0;
        for (int i = 0; i < K; ++i)
            for (int j = i + 1; j < K; ++j) {
                PairReport rep =
                    certify_pair(g, res.partition.parts[i], res.partition.parts[j], eps,
                                 exhaustive_limit);
                rep.i = i;
                rep.j = j;
                if (!rep.regular) ++irregular;
                res.reports.push_back(std::move(rep));
            }
        double index = partition_index(g, res.partition);
        res.trace.push_back({K, index, irregular});

        if (irregular <= eps * K * K) {
            res.converged = true;
            return res;
        }
        if (K >= max_K || K >= g.vertex_count()) {
            res.hit_cap = true;
            return res;
        }
        bool accepted = false;
        for (int cand : {std::min(2 * K, max_K), std::min(4 * K, max_K), max_K}) {
            if (cand <= K) continue;
            int new_k = std::min(cand, g.vertex_count());
            EquitablePartition next = detail::equitable_refine(res.partition, res.reports, new_k);
            if (partition_index(g, next) >= index - 1e-12) {
                res.partition = std::move(next);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.hit_cap = true;
            return res;
        }
    }
}

}  // namespace nearmatch
