#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "nearmatch/generator.hpp"
#include "nearmatch/quotient.hpp"
#include "nearmatch/quotient_lp.hpp"

using namespace nearmatch;

namespace {

// Quotient with the given off-diagonal adjacency (unit densities) and zero
// diagonals; n/K chosen large enough that unit pairs classify E4.
QuotientGraph quotient_of(int m, const std::vector<std::pair<int, int>>& edges, int n = 1000,
                          double eps = 0.04) {
    std::vector<std::vector<double>> P(m, std::vector<double>(m, 0.0));
    for (auto [i, j] : edges) P[i][j] = P[j][i] = 1.0;
    QuotientGraph H = QuotientGraph::from_matrix(P, n, eps);
    return H;
}

}  // namespace

TEST_CASE("row system columns touch two rows off-diagonal, one on the diagonal") {
    std::vector<std::vector<double>> P = {{0.3, 1.0, 0.0}, {1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}};
    QuotientSystem sys = quotient_system(QuotientGraph::from_matrix(P, 300, 0.04));
    for (std::size_t v = 0; v < sys.vars.size(); ++v) {
        double col = 0.0;
        for (int i = 0; i < sys.m; ++i) col += sys.A[i][v];
        REQUIRE(col == (sys.vars[v].first == sys.vars[v].second ? 1.0 : 2.0));
    }
}

TEST_CASE("classify: single edge is unique") {
    QuotientGraph H = quotient_of(2, {{0, 1}});
    SolutionClass cls = classify_system(H);
    REQUIRE(cls.kind == SystemKind::Unique);
    REQUIRE(cls.w.size() == 1);
    REQUIRE_THAT(cls.w[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("classify: path of three parts is infeasible") {
    QuotientGraph H = quotient_of(3, {{0, 1}, {1, 2}});
    REQUIRE(classify_system(H).kind == SystemKind::Infeasible);
}

TEST_CASE("classify: 4-cycle has one free variable") {
    QuotientGraph H = quotient_of(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    SolutionClass cls = classify_system(H);
    REQUIRE(cls.kind == SystemKind::Infinite);
    REQUIRE(cls.free_variables.size() == 1);
    REQUIRE(cls.null_basis.size() == 1);
    // particular solution satisfies the system inside the box
    QuotientSystem sys = quotient_system(H);
    for (int i = 0; i < sys.m; ++i) {
        double row = 0.0;
        for (std::size_t v = 0; v < sys.vars.size(); ++v) row += sys.A[i][v] * cls.w[v];
        REQUIRE_THAT(row, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
    for (double w : cls.w) {
        REQUIRE(w >= -1e-9);
        REQUIRE(w <= 1.0 + 1e-9);
    }
    // w == 1/2 on every edge is in the solution family
    REQUIRE_THAT(er_value_of(H, {0.5, 0.5, 0.5, 0.5}), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("classify: triangle is unique at one half") {
    QuotientGraph H = quotient_of(3, {{0, 1}, {1, 2}, {0, 2}});
    SolutionClass cls = classify_system(H);
    REQUIRE(cls.kind == SystemKind::Unique);
    for (double w : cls.w) REQUIRE_THAT(w, Catch::Matchers::WithinAbs(0.5, 1e-9));
}

TEST_CASE("classify: diagonal weights join the row sums once") {
    // one part with a self-density: w(00) = 1 uniquely
    std::vector<std::vector<double>> P = {{0.8}};
    QuotientGraph H = QuotientGraph::from_matrix(P, 100, 0.04);
    SolutionClass cls = classify_system(H);
    REQUIRE(cls.kind == SystemKind::Unique);
    REQUIRE_THAT(cls.w[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("er values on the trichotomy instances") {
    REQUIRE_THAT(er_value(quotient_of(2, {{0, 1}})), Catch::Matchers::WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(er_value(quotient_of(3, {{0, 1}, {1, 2}})),
                 Catch::Matchers::WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(er_value(quotient_of(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}})),
                 Catch::Matchers::WithinAbs(0.0, 1e-9));
    QuotientGraph tri = quotient_of(3, {{0, 1}, {1, 2}, {0, 2}});
    REQUIRE_THAT(er_value(tri), Catch::Matchers::WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(er_value_of(tri, {0.5, 0.5, 0.5}), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("er on the path agrees with a dense grid search") {
    QuotientGraph H = quotient_of(3, {{0, 1}, {1, 2}});
    double best = 1e9;
    for (int a = 0; a <= 100; ++a)
        for (int b = 0; b <= 100; ++b)
            best = std::min(best, er_value_of(H, {a / 100.0, b / 100.0}));
    REQUIRE_THAT(er_value(H), Catch::Matchers::WithinAbs(best, 1e-9));
}

TEST_CASE("er == 0 iff the boxed system is feasible (random small quotients)") {
    std::mt19937_64 rng(12);
    for (int it = 0; it < 60; ++it) {
        int m = 2 + static_cast<int>(rng() % 3);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (rng() % 100 < 55) edges.emplace_back(i, j);
        QuotientGraph H = quotient_of(m, edges);
        bool feasible = classify_system(H).kind != SystemKind::Infeasible;
        double er = er_value(H);
        if (feasible)
            REQUIRE_THAT(er, Catch::Matchers::WithinAbs(0.0, 1e-9));
        else
            REQUIRE(er > 1e-9);
    }
}

TEST_CASE("feasible region: internally matchable parts admit w == 0") {
    QuotientGraph H = quotient_of(3, {{0, 1}, {1, 2}, {0, 2}});
    H.r_vertex = {1.0, 1.0, 1.0};
    Polytope2 P = feasible_region(H, 0.04);
    REQUIRE(P.feasible);
    std::vector<double> zero(P.vars.size(), 0.0);
    REQUIRE(detail::polytope_point_feasible(P, zero));
}

TEST_CASE("feasible region: an isolated part with nothing to offer is infeasible") {
    // part 2 isolated: no incident positive-density pair, r_2 = 0
    QuotientGraph H = quotient_of(3, {{0, 1}});
    Polytope2 P = feasible_region(H, 0.04);
    REQUIRE_FALSE(P.feasible);
}

TEST_CASE("feasible region on the tightness quotient") {
    GeneratorSpec t;
    t.kind = GeneratorKind::TightnessCounterexample;
    t.n = 60;
    t.K = 6;
    Graph g = generate(t);
    EquitablePartition part = EquitablePartition::initial(60, 6, 0.0016);
    std::vector<PairReport> reports;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            PairReport rep;
            rep.i = i;
            rep.j = j;
            rep.regular = true;
            for (auto [a, b] : tightness_planted_irregular_pairs(6))
                if (a == i && b == j) rep.regular = false;
            reports.push_back(rep);
        }
    QuotientGraph H = build_quotient(g, part, reports, 0.0016);
    Polytope2 P = feasible_region(H, 0.0016);
    REQUIRE(P.feasible);
}

TEST_CASE("objective: single dense edge with slack rows maximizes at w = 1") {
    QuotientGraph H = quotient_of(2, {{0, 1}}, 100);
    H.r_vertex = {1.0, 1.0};  // rows are slack
    Polytope2 P = feasible_region(H, 0.04);
    REQUIRE(P.feasible);
    ObjectiveResult r = maximize_objective(P, H);
    REQUIRE(r.certified);
    double scale = 100.0 / 2;
    REQUIRE_THAT(r.s, Catch::Matchers::WithinAbs(scale * std::log(scale), 1e-9));
    REQUIRE_THAT(r.w[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("objective: two-variable budget polytope maximizes at the (1,1) corner") {
    // Direct Polytope2: only the joint budget w1 + w2 >= 1 over the unit box.
    QuotientGraph H = quotient_of(3, {{0, 1}, {0, 2}}, 100);
    Polytope2 P;
    P.vars = {{0, 1}, {0, 2}};
    P.lo = {0.0, 0.0};
    P.hi = {1.0, 1.0};
    Polytope2::Row row;
    row.part = 0;
    row.var_idx = {0, 1};
    row.lb = 1.0;
    row.ub = 2.0;
    P.rows.push_back(row);
    P.feasible = true;
    P.point = {0.5, 0.5};
    ObjectiveResult r = maximize_by_enumeration(P, H);
    REQUIRE_THAT(r.w[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(r.w[1], Catch::Matchers::WithinAbs(1.0, 1e-9));
    double scale = 100.0 / 3;
    REQUIRE_THAT(r.s, Catch::Matchers::WithinAbs(2 * scale * std::log(scale), 1e-9));
}

TEST_CASE("objective: E3 edges use the density-weighted logarithm") {
    std::vector<std::vector<double>> P_mat = {{0.0, 0.05}, {0.05, 0.0}};
    QuotientGraph H = QuotientGraph::from_matrix(P_mat, 100, 0.04);
    REQUIRE(H.cls(0, 1) == EdgeClass::E3);  // 100^{-0.2} ~ 0.398 > 0.05 > 100^{-0.8}
    Polytope2 P;
    P.vars = {{0, 1}};
    P.lo = {0.0};
    P.hi = {1.0};
    P.feasible = true;
        P.point = {1.0};
    double z = 1.0 * 100 / 2;
    REQUIRE_THAT(objective_value(P, H, {1.0}),
                 Catch::Matchers::WithinAbs(z * std::log(0.05 * z), 1e-12));
    // can be negative when p_e * w * n/K < 1
    REQUIRE(objective_value(P, H, {0.2}) < 0.0);
}

TEST_CASE("objective is continuous at zero weight") {
    QuotientGraph H = quotient_of(2, {{0, 1}}, 100);
    Polytope2 P;
    P.vars = {{0, 1}};
    P.lo = {0.0};
    P.hi = {1.0};
    P.feasible = true;
    P.point = {0.0};
    double scale = 100.0 / 2;
    REQUIRE(std::abs(objective_value(P, H, {1e-12}) - 0.0) <= 1e-9 * scale);
    REQUIRE(objective_value(P, H, {0.0}) == 0.0);
}

TEST_CASE("multistart matches enumeration on random feasible polytopes") {
    std::mt19937_64 rng(77);
    int tested = 0;
    while (tested < 25) {
        int m = 3 + static_cast<int>(rng() % 2);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (rng() % 100 < 60 && edges.size() < 6) edges.emplace_back(i, j);
        if (edges.empty()) continue;
        QuotientGraph H = quotient_of(m, edges, 500);
        for (int i = 0; i < m; ++i)
            H.r_vertex[i] = (rng() % 100) / 100.0;
        Polytope2 P = feasible_region(H, 0.04);
        if (!P.feasible) continue;
        ObjectiveResult en = maximize_by_enumeration(P, H);
        ObjectiveResult ms = maximize_by_multistart(P, H, rng());
        REQUIRE(en.s >= ms.s - 1e-6);
        REQUIRE_THAT(ms.s, Catch::Matchers::WithinAbs(en.s, 1e-6));
        ++tested;
    }
}

TEST_CASE("thm12 trichotomy bounds") {
    Thm12Result path = thm12_bounds(quotient_of(3, {{0, 1}, {1, 2}}), 100, 3, 0.04);
    REQUIRE(path.no_matching);

    Thm12Result edge = thm12_bounds(quotient_of(2, {{0, 1}}), 100, 2, 0.04);
    REQUIRE_FALSE(edge.no_matching);
    double base = 100.0 * std::log(100.0);
    REQUIRE_THAT(edge.bounds.lower, Catch::Matchers::WithinRel((1 - 4 * 0.2) * base, 1e-12));
    REQUIRE_THAT(edge.bounds.upper, Catch::Matchers::WithinRel((1 + 7 * 0.2) * base, 1e-12));

    Thm12Result tiny = thm12_bounds(quotient_of(2, {{0, 1}}), 100, 2, 1e-12);
    REQUIRE_THAT(tiny.bounds.lower, Catch::Matchers::WithinRel(base, 1e-5));
    REQUIRE_THAT(tiny.bounds.upper, Catch::Matchers::WithinRel(base, 1e-5));
}

TEST_CASE("thm13 on a complete graph split into four parts") {
    const int n = 200, K = 4;
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
    EquitablePartition part = EquitablePartition::initial(n, K, 0.04);
    std::vector<PairReport> reports;
    QuotientGraph H = build_quotient(g, part, reports, 0.04);
    Polytope2 P = feasible_region(H, 0.04);
    REQUIRE(P.feasible);
    double bound = thm13_lower_bound(P, H, 0.04);
    double expected_s = (n / 2.0) * std::log(static_cast<double>(n) / K);
    REQUIRE(bound >= (1 - 4 * 0.2) * expected_s - 1e-6);
    // and it never exceeds the trivial perfect-matching exponent
    REQUIRE(bound <= 0.5 * n * std::log(n));
}

TEST_CASE("thm13 with no E3/E4 support is zero") {
    QuotientGraph H = quotient_of(2, {{0, 1}}, 100);
    H.edge_class[{0, 1}] = EdgeClass::E1;
    H.r_edge[{0, 1}] = 1.0;
    H.r_vertex = {1.0, 1.0};
    Polytope2 P = feasible_region(H, 0.04);
    REQUIRE(P.feasible);
    REQUIRE_THAT(thm13_lower_bound(P, H, 0.04), Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("infeasible polytope raises on maximize") {
    QuotientGraph H = quotient_of(3, {{0, 1}});
    Polytope2 P = feasible_region(H, 0.04);
    REQUIRE_FALSE(P.feasible);
    REQUIRE_THROWS_AS(maximize_objective(P, H), InfeasibleRegionError);
}

TEST_CASE("generalized lower bound evaluates the split-and-count formula") {
    const double n = 1e4, eps = 0.04;
    // unique solution w(01) = 1: no split, one pair of full parts
    QuotientGraph edge = quotient_of(2, {{0, 1}}, 2 * static_cast<int>(n));
    double v = generalized_lower_bound(edge, n, eps);
    REQUIRE_THAT(v, Catch::Matchers::WithinRel((1 - 4 * 0.2) * n * std::log(n), 1e-9));

    // infeasible path raises
    QuotientGraph path = quotient_of(3, {{0, 1}, {1, 2}}, 300);
    REQUIRE_THROWS_AS(generalized_lower_bound(path, 100, eps), InfeasibleRegionError);

    // 4-cycle: the sqrt(eps)-grid sweep beats both integral corner solutions
    QuotientGraph cyc = quotient_of(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 4 * static_cast<int>(n));
    SolutionClass cls;
    double g = generalized_lower_bound(cyc, n, eps, &cls);
    REQUIRE(cls.kind == SystemKind::Infinite);
    double corners = 2 * (1 - 4 * 0.2) * n * std::log(n);  // two disjoint unit pairs
    REQUIRE(g >= corners - 1e-6);
    // and stays consistent with the blanket (m/2) n ln n theorem scale
    Thm12Result t12 = thm12_bounds(cyc, n, 4, eps);
    REQUIRE(g >= 0.95 * t12.bounds.lower);
    REQUIRE(g <= t12.bounds.upper);
}

TEST_CASE("polytope exports to LP text") {
    QuotientGraph H = quotient_of(3, {{0, 1}, {1, 2}, {0, 2}});
    Polytope2 P = feasible_region(H, 0.04);
    std::ostringstream out;
    polytope_lp(P).export_lp(out);
    std::string text = out.str();
    REQUIRE(text.find("Maximize") != std::string::npos);
    REQUIRE(text.find("Subject To") != std::string::npos);
    REQUIRE(text.find("w_0_1") != std::string::npos);
    REQUIRE(text.find("End") != std::string::npos);
}
