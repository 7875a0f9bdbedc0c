#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nearmatch/generator.hpp"
#include "nearmatch/graph.hpp"
#include "nearmatch/matching.hpp"
#include "nearmatch/quasicount.hpp"

using namespace nearmatch;

namespace {

Graph complete_bipartite(int n) {
    Graph g(2 * n);
    for (int u = 0; u < n; ++u)
        for (int v = n; v < 2 * n; ++v) g.add_edge(u, v);
    return g;
}

struct Sides {
    VertexSet x, y;
};

Sides sides(int n) { return {VertexSet::range(2 * n, 0, n), VertexSet::range(2 * n, n, 2 * n)}; }

}  // namespace

TEST_CASE("phase plan arithmetic") {
    PhasePlan p = PhasePlan::make(0.5, 0.04);
    REQUIRE_THAT(p.delta, Catch::Matchers::WithinAbs(0.4, 1e-12));
    REQUIRE_THAT(p.q, Catch::Matchers::WithinAbs(0.3, 1e-12));
    REQUIRE(p.k == 1);  // floor(5 - 10/3)
    REQUIRE(p.t == 3);  // floor(log 0.3 / log 0.7)

    PhasePlan kn = PhasePlan::make(1.0, 0.04);
    REQUIRE_THAT(kn.delta, Catch::Matchers::WithinAbs(0.2, 1e-12));
    REQUIRE(kn.k == 3);
    REQUIRE(kn.t == 0);

    // k rounds to zero and the plan degrades gracefully
    PhasePlan low = PhasePlan::make(0.3, 0.04);
    REQUIRE(low.k == 0);
    REQUIRE(low.t == 21);

    REQUIRE_THROWS_AS(PhasePlan::make(0.1, 0.04), InvalidPlanError);  // delta = 2
    REQUIRE_THROWS_AS(PhasePlan::make(0.5, 0.0), InvalidPlanError);
}

TEST_CASE("typical vertices on complete and empty pairs") {
    Graph g = complete_bipartite(10);
    auto [x, y] = sides(10);
    VertexSet t = typical_vertices(g, x, y, 1.0, 0.2);
    REQUIRE(t.size() == 10);

    Graph empty(20);
    VertexSet t2 = typical_vertices(empty, x, y, 0.5, 0.2);
    REQUIRE(t2.empty());
}

TEST_CASE("typical vertices window scales with shrink and the tracked side size") {
    Graph g = complete_bipartite(10);
    auto [x, y] = sides(10);
    // window (1 +- 0.2) * 1 * 10 * 0.5 = [4, 6] excludes the actual degree 10
    REQUIRE(typical_vertices(g, x, y, 1.0, 0.2, 0.5).empty());
    // explicit original side size: window (1 +- 0.2) * 20 * 0.5 = [8, 12] keeps it
    REQUIRE(typical_vertices(g, x, y, 1.0, 0.2, 0.5, 20).size() == 10);
}

TEST_CASE("typical vertices cover (1-2*sqrt(eps)) of a random regular instance") {
    const int n = 500;
    const double p = 0.5, eps = 0.04;
    GeneratorSpec s;
    s.kind = GeneratorKind::BipartiteRegular;
    s.n = n;
    s.p = p;
    s.seed = 17;
    Graph g = generate(s);
    auto [x, y] = sides(n);
    double delta = std::sqrt(eps) / p;
    VertexSet t = typical_vertices(g, x, y, p, delta);
    REQUIRE(t.size() >= (1.0 - 2.0 * std::sqrt(eps)) * n);
}

TEST_CASE("greedy on K_{n,n} meets the closed-form bounds") {
    const int n = 200;
    const double eps = 0.04;
    Graph g = complete_bipartite(n);
    auto [x, y] = sides(n);
    GreedyTrace t = greedy_count_bipartite(g, x, y, 1.0, eps, 5);
    double lower = (1.0 - 3.0 * std::sqrt(eps)) * n * std::log(static_cast<double>(n));
    REQUIRE(t.log_count >= lower);
    REQUIRE(t.log_count >= 0.95 * lemma_a1_lower_bound(n, 1.0, eps));
    REQUIRE(t.near_perfect);
    REQUIRE_NOTHROW(validate_matching(g, t.matching));
    REQUIRE(is_maximal(g, t.matching));
}

TEST_CASE("greedy on a random regular instance covers and stays sandwiched") {
    const int n = 2000;
    const double p = 0.5, eps = 0.04;
    GeneratorSpec s;
    s.kind = GeneratorKind::BipartiteRegular;
    s.n = n;
    s.p = p;
    s.seed = 23;
    Graph g = generate(s);
    auto [x, y] = sides(n);
    GreedyTrace t = greedy_count_bipartite(g, x, y, p, eps, 9);
    REQUIRE(t.covered >= (1.0 - std::sqrt(eps)) * 2 * n);
    REQUIRE(t.near_perfect);
    BoundPair b = thm1_bounds(n, p, eps);
    REQUIRE(t.log_count >= 0.95 * lemma_a1_lower_bound(n, p, eps));
    REQUIRE(t.log_count <= b.upper);
    REQUIRE(t.log_count >= 0.95 * b.lower);
}

TEST_CASE("greedy log count is seed independent, picks are seeded") {
    const int n = 300;
    GeneratorSpec s;
    s.kind = GeneratorKind::BipartiteRegular;
    s.n = n;
    s.p = 0.6;
    s.seed = 4;
    Graph g = generate(s);
    auto [x, y] = sides(n);
    GreedyTrace a = greedy_count_bipartite(g, x, y, 0.6, 0.04, 1);
    GreedyTrace b = greedy_count_bipartite(g, x, y, 0.6, 0.04, 2);
    GreedyTrace c = greedy_count_bipartite(g, x, y, 0.6, 0.04, 1);
    REQUIRE(a.log_count == b.log_count);  // the accumulator counts guarantees
    REQUIRE(a.matching.edges == c.matching.edges);
    REQUIRE(a.phases.size() == b.phases.size());
}

TEST_CASE("greedy degrades with a named phase when typical vertices run out") {
    const int n = 100;
    GeneratorSpec s;
    s.kind = GeneratorKind::BipartiteRegular;
    s.n = n;
    s.p = 0.5;
    s.seed = 31;
    Graph g = generate(s);
    // isolate 30 x-vertices: well above the 2*sqrt(eps)*n atypical budget
    Graph crippled(2 * n);
    for (auto [u, v] : g.edges())
        if (u >= 30) crippled.add_edge(u, v);
    auto [x, y] = sides(n);
    try {
        greedy_count_bipartite(crippled, x, y, 0.5, 0.04, 1);
        FAIL("expected DegradedInstanceError");
    } catch (const DegradedInstanceError& e) {
        REQUIRE(e.phase >= 1);
    }
}

TEST_CASE("lemma A.1 evaluation against its closed-form floor") {
    double v = lemma_a1_lower_bound(1e4, 0.5, 0.04);
    double rhs = (1.0 - 3.0 * 0.2) * 1e4 * std::log(0.5 * 1e4);
    REQUIRE(v >= rhs);
    REQUIRE_THROWS_AS(lemma_a1_lower_bound(1e4, 0.1, 0.04), InvalidPlanError);
}

TEST_CASE("lemma A.1 normalized value approaches 1 for p=1 as n grows") {
    const double eps = 1e-4;
    double prev = 0.0;
    for (double n : {1e3, 1e4, 1e5}) {
        double ratio = lemma_a1_lower_bound(n, 1.0, eps) / (n * std::log(n));
        REQUIRE(ratio > prev);
        prev = ratio;
    }
    REQUIRE(prev > 0.9);
}

TEST_CASE("greedy accumulator never exceeds the exact census count") {
    // e^{log_count} distinct choice sequences inject into distinct maximal
    // near perfect matchings, so the census must dominate the accumulator.
    const double eps = 0.04;
    int checked = 0;
    for (double p : {0.7, 0.85, 1.0}) {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            const int n = 9;
            GeneratorSpec s;
            s.kind = GeneratorKind::BipartiteRegular;
            s.n = n;
            s.p = p;
            s.seed = seed;
            Graph g = generate(s);
            auto [x, y] = sides(n);
            GreedyTrace t;
            try {
                t = greedy_count_bipartite(g, x, y, p, eps, seed);
            } catch (const DegradedInstanceError&) {
                continue;  // tiny instances may legitimately run dry
            }
            auto census = census_maximal_matchings(g);
            double truth = static_cast<double>(census.nm_of_eps(std::sqrt(eps)));
            REQUIRE(truth >= 1.0);
            REQUIRE(t.log_count <= std::log(truth) + 1e-9);
            ++checked;
        }
    }
    REQUIRE(checked >= 6);
}

TEST_CASE("theorem 1.1 and 3.1 bound arithmetic") {
    BoundPair b = thm1_bounds(1000, 0.5, 0.04);
    REQUIRE_THAT(b.lower, Catch::Matchers::WithinRel(0.4 * 1000 * std::log(500.0), 1e-12));
    REQUIRE_THAT(b.upper, Catch::Matchers::WithinRel(1.6 * 1000 * std::log(500.0), 1e-12));
    REQUIRE(b.lower <= b.upper);

    BoundPair q = thm1q_bounds(1000, 0.5, 0.04);
    REQUIRE_THAT(q.lower, Catch::Matchers::WithinRel(0.5 * b.lower, 1e-12));
    REQUIRE_THAT(q.upper, Catch::Matchers::WithinRel(0.5 * b.upper, 1e-12));

    // eps -> 0: both sides approach n ln(pn)
    BoundPair tiny = thm1_bounds(1000, 0.5, 1e-10);
    REQUIRE_THAT(tiny.lower, Catch::Matchers::WithinRel(1000 * std::log(500.0), 1e-4));
    REQUIRE_THAT(tiny.upper, Catch::Matchers::WithinRel(1000 * std::log(500.0), 1e-4));

    // boundary behavior: negative coefficient is returned, not rejected
    BoundPair neg = thm1_bounds(1000, 0.5, 0.25);
    REQUIRE(neg.lower < 0.0);

    REQUIRE_THROWS_AS(thm1_bounds(10, 0.05, 0.04), std::invalid_argument);  // pn <= 1
}
