#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nearmatch/census.hpp"
#include "nearmatch/graph.hpp"
#include "nearmatch/matching.hpp"
#include "nearmatch/quotient.hpp"
#include "nearmatch/quotient_lp.hpp"
#include "nearmatch/regularity.hpp"

namespace nearmatch {

struct PipelineConfig {
    double eps = 0.1;
    int max_K = 64;
    std::uint64_t seed = 0;
    int exhaustive_limit = 16;

    // Step 2 parameters: refine toward an eps^2-regular partition starting
    // from 1/eps parts.
    double refine_eps() const { return eps * eps; }
    int k0(int n) const {
        int k = static_cast<int>(std::floor(1.0 / eps));
        if (k < 1) k = 1;
        if (k > n) k = n;
        if (k > max_K) k = max_K;
        return k;
    }
    double tau() const { return 1.5 * eps * eps; }
    double alpha() const { return 0.5; }
};

enum class PipelineOutcome { NoNearPerfectMatching, Bound };

struct PipelineReport {
    int schema = 1;
    PipelineOutcome outcome = PipelineOutcome::NoNearPerfectMatching;
    double ell = 0.0;    // normalized exponent: claim is NM(G, eps) > n^{ell*n}
    double raw_s = 0.0;  // objective (3) value before normalization
    bool degraded = false;
    std::string degraded_reason;

    // Diagnostics.
    int n = 0;
    double eps = 0.0;
    int max_matching_size = 0;
    int coverage_needed = 0;
    int K = 0;
    bool partition_converged = false;
    bool partition_hit_cap = false;
    std::vector<RefinementRound> refinement_trace;
    std::map<std::string, int> class_counts;
    std::vector<double> r_vertex;
    bool polytope_feasible = false;
    MaximizeMethod objective_method = MaximizeMethod::MultistartAscent;
    bool objective_certified = false;
    double elapsed_ms = 0.0;
};

// Algorithm steps: (1) maximum matching test for eps-near perfect coverage;
// (2) refinement toward an eps^2-regular partition; (3) quotient statistics,
// the feasibility polytope, and ell = (1-4*eps) * s / (n ln n).
inline PipelineReport run_pipeline(const Graph& g, const PipelineConfig& cfg) {
    if (cfg.eps <= 0.0 || cfg.eps >= 1.0)
        throw std::invalid_argument("pipeline: eps outside (0,1)");
    auto t0 = std::chrono::steady_clock::now();
    PipelineReport rep;
    rep.n = g.vertex_count();
    rep.eps = cfg.eps;

    // Step 1: matching-number test only; maximality is not rechecked here.
    Matching mm = max_matching(g);
    rep.max_matching_size = mm.size();
    rep.coverage_needed = coverage_threshold(g.vertex_count(), cfg.eps);
    if (2 * mm.size() < rep.coverage_needed) {
        rep.outcome = PipelineOutcome::NoNearPerfectMatching;
        rep.elapsed_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        return rep;
    }
    rep.outcome = PipelineOutcome::Bound;

    // Step 2.
    double reps = cfg.refine_eps();
    RefinementResult ref =
        refine_partition(g, reps, cfg.k0(g.vertex_count()), cfg.max_K, cfg.exhaustive_limit);
    rep.K = ref.partition.K();
    rep.partition_converged = ref.converged;
    rep.partition_hit_cap = ref.hit_cap;
    rep.refinement_trace = ref.trace;
    if (ref.hit_cap) {
        rep.degraded = true;
        rep.degraded_reason = "partition cap reached before eps^2-regularity";
    }

    // Step 3.
    QuotientGraph H = build_quotient(g, ref.partition, ref.reports, reps);
    for (auto& [pair, c] : H.edge_class) rep.class_counts[edge_class_name(c)] += 1;
    rep.r_vertex = H.r_vertex;

    Polytope2 P = feasible_region(H, reps);
    rep.polytope_feasible = P.feasible;
    double n = static_cast<double>(g.vertex_count());
    if (!P.feasible) {
        // Step 1 passed, so a near perfect matching exists; report the
        // trivial exponent rather than failing.
        rep.degraded = true;
        rep.degraded_reason = "feasibility polytope empty despite step-1 matching";
        rep.raw_s = 0.0;
        rep.ell = 0.0;
    } else {
        ObjectiveResult obj = maximize_objective(P, H, cfg.seed);
        rep.objective_method = obj.method;
        rep.objective_certified = obj.certified;
        rep.raw_s = obj.s;
        double ell = (1.0 - 4.0 * cfg.eps) * obj.s / (n * std::log(n));
        rep.ell = ell > 0.0 ? ell : 0.0;
    }
    rep.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace nearmatch
