// Command-line front end: graph generation, the exact census oracle, the
// greedy counter, closed-form bounds, quotient analysis, and the full
// pipeline. All output is deterministic for a fixed seed.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nearmatch/census.hpp"
#include "nearmatch/generator.hpp"
#include "nearmatch/pipeline.hpp"
#include "nearmatch/quasicount.hpp"
#include "nearmatch/serialize.hpp"

using namespace nearmatch;

namespace {

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    return Graph::parse(in);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
    out << text;
}

void emit_json(const json& j, const std::string& out_path) { emit(j.dump(2) + "\n", out_path); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nearmatch: bounds on the number of maximal near perfect matchings"};
    app.require_subcommand(1);
    std::string out_path;
    app.add_option("--out", out_path, "write output to a file instead of stdout");

    // generate
    auto* gen = app.add_subcommand("generate", "emit a graph in the n-m edge-list format");
    std::string kind = "bipartite-regular";
    GeneratorSpec spec;
    std::string p_matrix_json;
    gen->add_option("--kind", kind,
                    "bipartite-regular | quasirandom | generalized | tightness-counterexample");
    gen->add_option("--n", spec.n, "vertex count (side size for bipartite-regular)")->required();
    gen->add_option("--p", spec.p, "edge probability");
    gen->add_option("--eps", spec.eps, "regularity parameter carried in the spec");
    gen->add_option("--K", spec.K, "part count for tightness-counterexample");
    gen->add_option("--P", p_matrix_json, "density matrix as JSON, e.g. [[0,1],[1,0]]");
    gen->add_option("--seed", spec.seed, "random seed");

    // census
    auto* cen = app.add_subcommand("census", "exact census of maximal matchings");
    std::string cen_file;
    double cen_eps = -1.0;
    cen->add_option("file", cen_file, "graph file")->required();
    cen->add_option("--eps", cen_eps, "also report nm_of_eps at this eps");

    // greedy
    auto* gr = app.add_subcommand("greedy", "phased greedy counter on a bipartite graph");
    std::string gr_file;
    double gr_p = 0.5, gr_eps = 0.04;
    std::uint64_t gr_seed = 0;
    int gr_split = -1;
    gr->add_option("file", gr_file, "graph file")->required();
    gr->add_option("--p", gr_p, "density parameter")->required();
    gr->add_option("--eps", gr_eps, "regularity parameter")->required();
    gr->add_option("--seed", gr_seed, "seed for the vertex picks");
    gr->add_option("--split", gr_split, "left side size (default n/2)");

    // bounds
    auto* bo = app.add_subcommand("bounds", "closed-form bounds on ln NM");
    double bo_n = 0, bo_p = 0, bo_eps = 0;
    std::string bo_mode = "bipartite";
    bo->add_option("--n", bo_n, "side size (bipartite) or vertex count (quasirandom)")->required();
    bo->add_option("--p", bo_p, "density")->required();
    bo->add_option("--eps", bo_eps, "regularity parameter")->required();
    bo->add_option("--mode", bo_mode, "bipartite | quasirandom");

    // quotient
    auto* qu = app.add_subcommand("quotient", "regularity partition and quotient analysis");
    std::string qu_file, qu_export_lp;
    double qu_eps = 0.1;
    int qu_k0 = 0, qu_max_k = 64;
    qu->add_option("file", qu_file, "graph file")->required();
    qu->add_option("--eps", qu_eps, "partition regularity parameter")->required();
    qu->add_option("--k0", qu_k0, "initial part count (default 1/eps)");
    qu->add_option("--max-K", qu_max_k, "part count cap");
    qu->add_option("--export-lp", qu_export_lp, "write the feasibility LP in CPLEX LP format");

    // pipeline
    auto* pi = app.add_subcommand("pipeline", "full lower-bound pipeline");
    std::string pi_file;
    PipelineConfig cfg;
    bool pi_timings = false;
    pi->add_option("file", pi_file, "graph file")->required();
    pi->add_option("--eps", cfg.eps, "near-perfectness parameter")->required();
    pi->add_option("--seed", cfg.seed, "seed for multistart ascent");
    pi->add_option("--max-K", cfg.max_K, "part count cap");
    pi->add_flag("--timings", pi_timings, "include elapsed_ms (breaks byte determinism)");

    try {
        app.parse(argc, argv);

        if (*gen) {
            spec.kind = kind_from_name(kind);
            if (!p_matrix_json.empty())
                spec.P = json::parse(p_matrix_json).get<std::vector<std::vector<double>>>();
            Graph g = generate(spec);
            std::ostringstream ss;
            g.write(ss);
            emit(ss.str(), out_path);
        } else if (*cen) {
            Graph g = load_graph(cen_file);
            CensusResult c = census_maximal_matchings(g);
            json j = to_json(c);
            if (cen_eps >= 0.0) {
                j["eps"] = cen_eps;
                j["nm_of_eps"] = c.nm_of_eps(cen_eps);
            }
            emit_json(j, out_path);
        } else if (*gr) {
            Graph g = load_graph(gr_file);
            int split = gr_split > 0 ? gr_split : g.vertex_count() / 2;
            if (split <= 0 || split >= g.vertex_count())
                throw std::invalid_argument("greedy: bad split");
            VertexSet x = VertexSet::range(g.vertex_count(), 0, split);
            VertexSet y = VertexSet::range(g.vertex_count(), split, g.vertex_count());
            GreedyTrace t = greedy_count_bipartite(g, x, y, gr_p, gr_eps, gr_seed);
            emit_json(to_json(t), out_path);
        } else if (*bo) {
            json j;
            j["n"] = bo_n;
            j["p"] = bo_p;
            j["eps"] = bo_eps;
            if (bo_mode == "bipartite") {
                BoundPair b = thm1_bounds(bo_n, bo_p, bo_eps);
                BoundReport rep{b.lower, b.upper, "theorem-1.1", "theorem-1.1"};
                double la = lemma_a1_lower_bound(bo_n, bo_p, bo_eps);
                if (la > rep.lower) {
                    rep.lower = la;
                    rep.lower_from = "lemma-a1";
                }
                j["lower"] = rep.lower;
                j["upper"] = rep.upper;
                j["lower_from"] = rep.lower_from;
                j["upper_from"] = rep.upper_from;
                j["thm1"] = json{{"lower", b.lower}, {"upper", b.upper}};
                j["lemma_a1"] = la;
            } else if (bo_mode == "quasirandom") {
                BoundPair b = thm1q_bounds(bo_n, bo_p, bo_eps);
                j["lower"] = b.lower;
                j["upper"] = b.upper;
                j["lower_from"] = "theorem-3.1";
                j["upper_from"] = "theorem-3.1";
            } else {
                throw std::invalid_argument("bounds: unknown mode " + bo_mode);
            }
            emit_json(j, out_path);
        } else if (*qu) {
            Graph g = load_graph(qu_file);
            int k0 = qu_k0 > 0 ? qu_k0 : std::max(1, static_cast<int>(std::floor(1.0 / qu_eps)));
            k0 = std::min(k0, g.vertex_count());
            RefinementResult ref = refine_partition(g, qu_eps, k0, qu_max_k);
            QuotientGraph H = build_quotient(g, ref.partition, ref.reports, qu_eps);
            SolutionClass cls = classify_system(H);
            Polytope2 P = feasible_region(H, qu_eps);
            json j;
            j["refinement"] = to_json(ref);
            j["quotient"] = to_json(H);
            j["system"] = to_json(cls);
            j["er"] = er_value(H);
            j["polytope_feasible"] = P.feasible;
            if (cls.kind != SystemKind::Infeasible && H.m > 0 && g.vertex_count() % H.m == 0)
                j["generalized_lower_bound"] =
                    generalized_lower_bound(H, g.vertex_count() / H.m, qu_eps);
            if (!qu_export_lp.empty()) {
                std::ofstream lp_out(qu_export_lp);
                if (!lp_out) throw std::invalid_argument("cannot open " + qu_export_lp);
                polytope_lp(P).export_lp(lp_out);
            }
            emit_json(j, out_path);
        } else if (*pi) {
            Graph g = load_graph(pi_file);
            PipelineReport rep = run_pipeline(g, cfg);
            emit_json(to_json(rep, pi_timings), out_path);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ResourceLimitError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
