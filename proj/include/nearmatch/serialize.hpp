#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nearmatch/census.hpp"
#include "nearmatch/generator.hpp"
#include "nearmatch/pipeline.hpp"
#include "nearmatch/quasicount.hpp"
#include "nearmatch/quotient.hpp"
#include "nearmatch/quotient_lp.hpp"
#include "nearmatch/regularity.hpp"

namespace nearmatch {

using json = nlohmann::json;

inline json to_json(const GeneratorSpec& s) {
    json params;
    params["n"] = s.n;
    switch (s.kind) {
        case GeneratorKind::BipartiteRegular:
        case GeneratorKind::Quasirandom:
            params["p"] = s.p;
            params["eps"] = s.eps;
            break;
        case GeneratorKind::Generalized:
            params["P"] = s.P;
            params["eps"] = s.eps;
            break;
        case GeneratorKind::TightnessCounterexample:
            params["K"] = s.K;
            break;
    }
    return json{{"kind", kind_name(s.kind)}, {"params", params}, {"seed", s.seed}};
}

inline GeneratorSpec generator_spec_from_json(const json& j) {
    GeneratorSpec s;
    s.kind = kind_from_name(j.at("kind").get<std::string>());
    const json& params = j.at("params");
    s.n = params.at("n").get<int>();
    if (params.contains("p")) s.p = params.at("p").get<double>();
    if (params.contains("eps")) s.eps = params.at("eps").get<double>();
    if (params.contains("P")) s.P = params.at("P").get<std::vector<std::vector<double>>>();
    if (params.contains("K")) s.K = params.at("K").get<int>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.validate();
    return s;
}

inline json to_json(const CensusResult& c) {
    json cov = json::object();
    for (auto& [coverage, count] : c.by_coverage) cov[std::to_string(coverage)] = count;
    return json{{"n", c.n}, {"by_coverage", cov}, {"total_maximal", c.total()}};
}

inline json to_json(const Matching& m) {
    json edges = json::array();
    for (auto [u, v] : m.edges) edges.push_back(json::array({u, v}));
    return json{{"size", m.size()}, {"edges", edges}};
}

inline json to_json(const GreedyTrace& t) {
    json phases = json::array();
    for (const auto& ph : t.phases)
        phases.push_back(json{{"index", ph.index},
                              {"tail", ph.tail},
                              {"removals", ph.removals},
                              {"typical_size", ph.typical_size},
                              {"factor_base", ph.factor_base}});
    return json{{"log_count", t.log_count}, {"side", t.side},       {"covered", t.covered},
                {"near_perfect", t.near_perfect}, {"phases", phases}, {"matching_size", t.matching.size()}};
}

inline json to_json(const PairReport& r) {
    json j{{"i", r.i},
           {"j", r.j},
           {"density", r.density},
           {"verdict", r.regular ? "regular" : "irregular"},
           {"mode", r.mode == CertifyMode::Exhaustive ? "exhaustive" : "heuristic"},
           {"effective_eps", r.effective_eps}};
    if (r.witness) {
        j["witness"] = json{{"x", r.witness->first.vertices()},
                            {"y", r.witness->second.vertices()},
                            {"density", r.witness_density}};
    }
    return j;
}

inline json to_json(const EquitablePartition& p) {
    json parts = json::array();
    for (const auto& part : p.parts) parts.push_back(part.vertices());
    return json{{"K", p.K()}, {"eps", p.eps}, {"parts", parts}};
}

inline json to_json(const RefinementResult& r) {
    json reports = json::array();
    for (const auto& rep : r.reports) reports.push_back(to_json(rep));
    json trace = json::array();
    for (const auto& round : r.trace)
        trace.push_back(json{{"K", round.K}, {"index", round.index},
                             {"irregular_pairs", round.irregular_pairs}});
    return json{{"partition", to_json(r.partition)},
                {"reports", reports},
                {"trace", trace},
                {"converged", r.converged},
                {"hit_cap", r.hit_cap}};
}

inline json to_json(const QuotientGraph& H) {
    json classes = json::object();
    for (auto& [pair, c] : H.edge_class)
        classes[std::to_string(pair.first) + "," + std::to_string(pair.second)] =
            edge_class_name(c);
    json redge = json::object();
    for (auto& [pair, r] : H.r_edge)
        redge[std::to_string(pair.first) + "," + std::to_string(pair.second)] = r;
    return json{{"m", H.m},
                {"n", H.n},
                {"K", H.K},
                {"eps", H.eps},
                {"p", H.p},
                {"edge_class", classes},
                {"r_edge", redge},
                {"r_vertex", H.r_vertex},
                {"threshold_low", H.threshold_low()},
                {"threshold_high", H.threshold_high()}};
}

inline json to_json(const SolutionClass& s) {
    json vars = json::array();
    for (auto [i, j] : s.vars) vars.push_back(json::array({i, j}));
    json j{{"vars", vars}};
    switch (s.kind) {
        case SystemKind::Infeasible:
            j["kind"] = "infeasible";
            break;
        case SystemKind::Unique:
            j["kind"] = "unique";
            j["w"] = s.w;
            break;
        case SystemKind::Infinite:
            j["kind"] = "infinite";
            j["w"] = s.w;
            j["free_variables"] = s.free_variables;
            j["null_basis"] = s.null_basis;
            break;
    }
    return j;
}

inline json to_json(const ObjectiveResult& r) {
    return json{{"s", r.s},
                {"w", r.w},
                {"method", r.method == MaximizeMethod::VertexEnumeration ? "vertex-enumeration"
                                                                         : "multistart-ascent"},
                {"certified", r.certified}};
}

inline json to_json(const PipelineReport& r, bool with_timings = false) {
    json j{{"schema", r.schema},
           {"outcome", r.outcome == PipelineOutcome::Bound ? "bound" : "no-near-perfect-matching"},
           {"n", r.n},
           {"eps", r.eps},
           {"max_matching_size", r.max_matching_size},
           {"coverage_needed", r.coverage_needed}};
    if (r.outcome == PipelineOutcome::Bound) {
        j["ell"] = r.ell;
        j["raw_s"] = r.raw_s;
        j["degraded"] = r.degraded;
        if (r.degraded) j["degraded_reason"] = r.degraded_reason;
        j["K"] = r.K;
        j["partition_converged"] = r.partition_converged;
        j["partition_hit_cap"] = r.partition_hit_cap;
        json trace = json::array();
        for (const auto& round : r.refinement_trace)
            trace.push_back(json{{"K", round.K}, {"index", round.index},
                                 {"irregular_pairs", round.irregular_pairs}});
        j["refinement_trace"] = trace;
        j["class_counts"] = r.class_counts;
        j["r_vertex"] = r.r_vertex;
        j["polytope_feasible"] = r.polytope_feasible;
        j["objective_method"] = r.objective_method == MaximizeMethod::VertexEnumeration
                                    ? "vertex-enumeration"
                                    : "multistart-ascent";
        j["objective_certified"] = r.objective_certified;
    }
    // Timings are opt-in so identical seeds produce byte-identical reports.
    if (with_timings) j["elapsed_ms"] = r.elapsed_ms;
    return j;
}

}  // namespace nearmatch
