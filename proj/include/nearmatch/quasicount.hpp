#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nearmatch/errors.hpp"
#include "nearmatch/graph.hpp"
#include "nearmatch/matching.hpp"

namespace nearmatch {

// Phase arithmetic for the greedy counter. Defined only when delta < 1,
// i.e. p > sqrt(eps); k or t may round down to zero and the corresponding
// phase block is simply skipped.
struct PhasePlan {
    double eps = 0.0;
    double p = 0.0;
    double sqrt_eps = 0.0;
    double delta = 0.0;  // sqrt(eps)/p
    double q = 0.0;      // (1-delta)*p, the guaranteed degree fraction
    double c = 0.0;      // 1/q
    long long k = 0;     // main phases, floor(1/sqrt(eps) - c)
    long long t = 0;     // tail phases, floor(log q / log(1-q))

    static PhasePlan make(double p, double eps) {
        if (!(eps > 0.0) || eps >= 1.0) throw InvalidPlanError("plan: eps must be in (0,1)");
        if (!(p > 0.0) || p > 1.0) throw InvalidPlanError("plan: p must be in (0,1]");
        PhasePlan pl;
        pl.eps = eps;
        pl.p = p;
        pl.sqrt_eps = std::sqrt(eps);
        pl.delta = pl.sqrt_eps / p;
        if (pl.delta >= 1.0)
            throw InvalidPlanError("plan: delta = sqrt(eps)/p = " + std::to_string(pl.delta) +
                                   " >= 1 (requires p > sqrt(eps))");
        pl.q = (1.0 - pl.delta) * p;
        pl.c = 1.0 / pl.q;
        pl.k = static_cast<long long>(std::floor(1.0 / pl.sqrt_eps - pl.c));
        if (pl.k < 0) pl.k = 0;
        pl.t = static_cast<long long>(std::floor(std::log(pl.q) / std::log(1.0 - pl.q)));
        if (pl.t < 0) pl.t = 0;
        return pl;
    }
};

// Vertices of x whose degree into y lies in [(1-delta)*p*n*shrink,
// (1+delta)*p*n*shrink]. n defaults to |y|; callers tracking the original
// side size through phases pass it explicitly together with the shrink
// factor of the current phase.
inline VertexSet typical_vertices(const Graph& g, const VertexSet& x, const VertexSet& y,
                                  double p, double delta, double shrink = 1.0, int n_side = -1) {
    if (x.intersects(y)) throw std::invalid_argument("typical_vertices: sides overlap");
    double n = n_side >= 0 ? static_cast<double>(n_side) : static_cast<double>(y.size());
    double lo = (1.0 - delta) * p * n * shrink - 1e-9;
    double hi = (1.0 + delta) * p * n * shrink + 1e-9;
    VertexSet t(x.universe());
    for (int v : x.vertices()) {
        int d = g.degree_into(v, y);
        if (d >= lo && d <= hi) t.add(v);
    }
    return t;
}

struct GreedyPhase {
    int index = 0;        // 1-based, counting main then tail phases
    bool tail = false;
    int removals = 0;
    int typical_size = 0;  // |T(X_i)| at phase start
    double factor_base = 0.0;
};

struct GreedyTrace {
    double log_count = 0.0;  // ln of the product of guaranteed choice counts
    Matching matching;       // maximal after greedy extension
    std::vector<GreedyPhase> phases;
    int side = 0;      // original side size n
    int covered = 0;   // vertices covered by the final matching
    bool near_perfect = false;  // covered >= (1-sqrt(eps)) * 2n
};

// Phased greedy lower-bound accumulator for bipartite eps-regular instances
// with density p. log_count multiplies the guaranteed-available choice count
// (1-delta)*p*|Y_i| - j + 1 at each step, so it is independent of which
// typical vertex the seeded rng actually picks.
inline GreedyTrace greedy_count_bipartite(const Graph& g, const VertexSet& x, const VertexSet& y,
                                          double p, double eps, std::uint64_t seed = 0) {
    if (x.empty() || y.empty()) throw std::invalid_argument("greedy: empty side");
    if (x.intersects(y)) throw std::invalid_argument("greedy: sides overlap");
    if (x.size() != y.size()) throw std::invalid_argument("greedy: |x| != |y|");
    PhasePlan plan = PhasePlan::make(p, eps);

    const int n0 = x.size();
    const double stop_size = plan.sqrt_eps * n0 + 1e-9;
    std::mt19937_64 rng(seed);

    VertexSet ax = x, ay = y;
    GreedyTrace trace;
    trace.side = n0;

    auto run_phase = [&](int phase_idx, bool tail, int removals) {
        std::vector<int> typical;
        double lo = plan.q * ay.size() - 1e-9;
        double hi = (1.0 + plan.delta) * p * ay.size() + 1e-9;
        for (int v : ax.vertices()) {
            int d = g.degree_into(v, ay);
            if (d >= lo && d <= hi) typical.push_back(v);
        }
        GreedyPhase ph;
        ph.index = phase_idx;
        ph.tail = tail;
        ph.removals = removals;
        ph.typical_size = static_cast<int>(typical.size());
        ph.factor_base = plan.q * ay.size();
        trace.phases.push_back(ph);

        for (int j = 1; j <= removals; ++j) {
            if (typical.empty())
                throw DegradedInstanceError(phase_idx,
                                            "greedy: typical set empty in phase " +
                                                std::to_string(phase_idx) +
                                                " (input not eps-regular at density p)");
            std::size_t pick = rng() % typical.size();
            int v = typical[pick];
            typical[pick] = typical.back();
            typical.pop_back();
            std::vector<int> nbrs;
            {
                const std::uint64_t* r = g.row(v);
                const auto& yw = ay.words();
                for (std::size_t i = 0; i < yw.size(); ++i) {
                    std::uint64_t w = r[i] & yw[i];
                    while (w) {
                        nbrs.push_back(static_cast<int>(i * 64) + std::countr_zero(w));
                        w &= w - 1;
                    }
                }
            }
            if (nbrs.empty())
                throw DegradedInstanceError(phase_idx, "greedy: typical vertex lost all neighbors in phase " +
                                                           std::to_string(phase_idx));
            int u = nbrs[rng() % nbrs.size()];
            ax.remove(v);
            ay.remove(u);
            trace.matching.edges.emplace_back(v, u);
            double factor = ph.factor_base - (j - 1);
            if (factor < 1.0) factor = 1.0;
            trace.log_count += std::log(factor);
        }
    };

    int phase_idx = 0;
    int s_main = static_cast<int>(std::floor(plan.sqrt_eps * n0));
    if (s_main > 0)
        for (long long i = 0; i < plan.k; ++i) run_phase(++phase_idx, false, s_main);

    long long tail_cap = plan.t + 64;
    for (long long i = 0; ax.size() > stop_size; ++i) {
        if (i >= tail_cap)
            throw DegradedInstanceError(phase_idx + 1, "greedy: tail did not converge");
        int r = static_cast<int>(std::floor(plan.q * ax.size()));
        if (r <= 0)
            throw DegradedInstanceError(phase_idx + 1,
                                        "greedy: remaining side too small for a tail phase");
        run_phase(++phase_idx, true, r);
    }

    // Extend to a maximal matching of G[x + y]; coverage only grows.
    VertexSet unc(ax.universe());
    for (int v : ax.vertices()) unc.add(v);
    for (int v : ay.vertices()) unc.add(v);
    for (int v : unc.vertices()) {
        if (!unc.contains(v)) continue;
        int partner = -1;
        const std::uint64_t* r = g.row(v);
        const auto& uw = unc.words();
        for (std::size_t i = 0; i < uw.size() && partner < 0; ++i) {
            std::uint64_t w = r[i] & uw[i];
            if (w) partner = static_cast<int>(i * 64) + std::countr_zero(w);
        }
        if (partner >= 0 && partner != v) {
            unc.remove(v);
            unc.remove(partner);
            trace.matching.edges.emplace_back(v, partner);
        }
    }

    trace.covered = 2 * trace.matching.size();
    trace.near_perfect =
        trace.covered >= (1.0 - plan.sqrt_eps) * 2.0 * static_cast<double>(n0) - 1e-9;
    return trace;
}

// ln of the Lemma A.1 double product, evaluated with real-valued factorial
// arguments via lgamma:
//   prod_{i=0}^{k-1} ((1-d)p(n-i*se*n))! / ((1-d)p(n-i*se*n) - se*n)!
//   * prod_{i=0}^{t-1} ((1-d)p*c*se*n*(1-(1-d)p)^i)!
inline double lemma_a1_lower_bound(double n, double p, double eps) {
    PhasePlan plan = PhasePlan::make(p, eps);
    double se = plan.sqrt_eps;
    double total = 0.0;
    for (long long i = 0; i < plan.k; ++i) {
        double a = plan.q * (n - static_cast<double>(i) * se * n);
        double b = a - se * n;
        if (a < 0.0 || b < 0.0)
            throw InvalidPlanError("lemma-a1: negative factorial argument in main phase " +
                                   std::to_string(i + 1));
        total += std::lgamma(a + 1.0) - std::lgamma(b + 1.0);
    }
    for (long long i = 0; i < plan.t; ++i) {
        double m = plan.q * plan.c * se * n * std::pow(1.0 - plan.q, static_cast<double>(i));
        if (m < 0.0)
            throw InvalidPlanError("lemma-a1: negative factorial argument in tail phase " +
                                   std::to_string(i + 1));
        total += std::lgamma(m + 1.0);
    }
    return total;
}

struct BoundPair {
    double lower = 0.0;
    double upper = 0.0;
};

// (1 -+ 3*sqrt(eps)) * n * ln(pn) for bipartite eps-regular graphs on 2n vertices.
inline BoundPair thm1_bounds(double n, double p, double eps) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("thm1_bounds: eps outside (0,1)");
    if (p * n <= 1.0) throw std::invalid_argument("thm1_bounds: requires p*n > 1");
    double se = std::sqrt(eps);
    double base = n * std::log(p * n);
    return {(1.0 - 3.0 * se) * base, (1.0 + 3.0 * se) * base};
}

// Non-bipartite quasirandom variant: the same bounds with an extra factor 1/2.
inline BoundPair thm1q_bounds(double n, double p, double eps) {
    BoundPair b = thm1_bounds(n, p, eps);
    return {0.5 * b.lower, 0.5 * b.upper};
}

// A bound on ln NM with the theorem that produced each side.
struct BoundReport {
    double lower = 0.0;
    double upper = 0.0;
    std::string lower_from;
    std::string upper_from;
};

}  // namespace nearmatch
