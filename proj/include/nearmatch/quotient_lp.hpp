#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nearmatch/errors.hpp"
#include "nearmatch/lp.hpp"
#include "nearmatch/quasicount.hpp"
#include "nearmatch/quotient.hpp"

namespace nearmatch {

// The linear system (row i): sum over pairs ij in E(H) of w(ij) = 1, with the
// diagonal w(i) = w(ii) counted once in row i. Variables exist only for pairs
// with p_ij != 0.
struct QuotientSystem {
    int m = 0;
    std::vector<std::pair<int, int>> vars;  // i <= j
    std::vector<std::vector<double>> A;     // m rows x vars

    int var_index(int i, int j) const {
        auto key = std::make_pair(std::min(i, j), std::max(i, j));
        for (std::size_t v = 0; v < vars.size(); ++v)
            if (vars[v] == key) return static_cast<int>(v);
        return -1;
    }
};

inline QuotientSystem quotient_system(const QuotientGraph& H) {
    QuotientSystem sys;
    sys.m = H.m;
    for (int i = 0; i < H.m; ++i)
        for (int j = i; j < H.m; ++j)
            if (H.p[i][j] != 0.0) sys.vars.emplace_back(i, j);
    sys.A.assign(H.m, std::vector<double>(sys.vars.size(), 0.0));
    for (std::size_t v = 0; v < sys.vars.size(); ++v) {
        auto [i, j] = sys.vars[v];
        sys.A[i][v] = 1.0;
        if (j != i) sys.A[j][v] = 1.0;
    }
    return sys;
}

enum class SystemKind { Infeasible, Unique, Infinite };

struct SolutionClass {
    SystemKind kind = SystemKind::Infeasible;
    std::vector<std::pair<int, int>> vars;
    std::vector<double> w;                        // box-feasible solution when not infeasible
    std::vector<int> free_variables;              // non-pivot columns (Case 3 parametrization)
    std::vector<std::vector<double>> null_basis;  // one vector per free variable
};

namespace detail {

struct RationalGauss {
    int rank = 0;
    bool consistent = true;
    std::vector<int> pivot_cols, free_cols;
    std::vector<Rational> particular;             // free vars set to 0
    std::vector<std::vector<Rational>> null_basis;
};

// Row-reduce [A | b] over the rationals.
inline RationalGauss gauss_solve(const std::vector<std::vector<double>>& A_in,
                                 const std::vector<double>& b_in) {
    int m = static_cast<int>(A_in.size());
    int h = m ? static_cast<int>(A_in[0].size()) : 0;
    std::vector<std::vector<Rational>> M(m, std::vector<Rational>(h + 1));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < h; ++j) M[i][j] = Rational(A_in[i][j]);
        M[i][h] = Rational(b_in[i]);
    }
    RationalGauss res;
    std::vector<int> pivot_row_of_col(h, -1);
    int row = 0;
    for (int col = 0; col < h && row < m; ++col) {
        int pr = -1;
        for (int i = row; i < m; ++i)
            if (M[i][col] != 0) {
                pr = i;
                break;
            }
        if (pr == -1) continue;
        std::swap(M[row], M[pr]);
        Rational inv = 1 / M[row][col];
        for (int j = col; j <= h; ++j) M[row][j] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == row || M[i][col] == 0) continue;
            Rational f = M[i][col];
            for (int j = col; j <= h; ++j) M[i][j] -= f * M[row][j];
        }
        pivot_row_of_col[col] = row;
        res.pivot_cols.push_back(col);
        ++row;
    }
    res.rank = row;
    for (int i = row; i < m; ++i)
        if (M[i][h] != 0) res.consistent = false;
    for (int col = 0; col < h; ++col)
        if (pivot_row_of_col[col] == -1) res.free_cols.push_back(col);
    if (res.consistent) {
        res.particular.assign(h, Rational(0));
        for (int col : res.pivot_cols) res.particular[col] = M[pivot_row_of_col[col]][h];
        for (int fc : res.free_cols) {
            std::vector<Rational> dir(h, Rational(0));
            dir[fc] = 1;
            for (int col : res.pivot_cols) dir[col] = -M[pivot_row_of_col[col]][fc];
            res.null_basis.push_back(std::move(dir));
        }
    }
    return res;
}

// LP over {A w = 1, 0 <= w <= 1} optimizing `obj`; exact for small systems.
inline LpResult<double> box_system_lp(const QuotientSystem& sys, const std::vector<double>& obj) {
    int h = static_cast<int>(sys.vars.size());
    LpProblem p(h);
    p.c = obj;
    for (int i = 0; i < sys.m; ++i) {
        std::vector<std::pair<int, double>> terms;
        for (int v = 0; v < h; ++v)
            if (sys.A[i][v] != 0.0) terms.emplace_back(v, 1.0);
        p.add_eq(terms, 1.0);
    }
    for (int v = 0; v < h; ++v) p.add_le({{v, 1.0}}, 1.0);
    return (h + sys.m <= 64) ? p.solve_exact() : p.solve();
}

}  // namespace detail

// Trichotomy of the quotient linear system over the [0,1] box: no solution,
// exactly one, or infinitely many (with the free-variable parametrization).
inline SolutionClass classify_system(const QuotientGraph& H) {
    QuotientSystem sys = quotient_system(H);
    int h = static_cast<int>(sys.vars.size());
    SolutionClass out;
    out.vars = sys.vars;

    std::vector<double> ones(H.m, 1.0);
    detail::RationalGauss gauss = detail::gauss_solve(sys.A, ones);
    if (!gauss.consistent) {
        out.kind = SystemKind::Infeasible;
        return out;
    }
    LpResult<double> feas = detail::box_system_lp(sys, std::vector<double>(h, 0.0));
    if (feas.status != LpStatus::Optimal) {
        out.kind = SystemKind::Infeasible;
        return out;
    }
    out.w = feas.x;
    out.free_variables = gauss.free_cols;
    for (const auto& dir : gauss.null_basis) {
        std::vector<double> d(h);
        for (int v = 0; v < h; ++v) d[v] = static_cast<double>(dir[v]);
        out.null_basis.push_back(std::move(d));
    }
    if (gauss.free_cols.empty()) {
        out.kind = SystemKind::Unique;
        return out;
    }
    // Rank-deficient: the box may still pin every free coordinate.
    for (int fc : gauss.free_cols) {
        std::vector<double> obj(h, 0.0);
        obj[fc] = 1.0;
        LpResult<double> hi = detail::box_system_lp(sys, obj);
        obj[fc] = -1.0;
        LpResult<double> lo = detail::box_system_lp(sys, obj);
        if (hi.status == LpStatus::Optimal && lo.status == LpStatus::Optimal &&
            hi.value + lo.value > 1e-9) {  // max - min
            out.kind = SystemKind::Infinite;
            return out;
        }
    }
    out.kind = SystemKind::Unique;
    return out;
}

// Er(H, w) = sum_i |1 - sum_j w(ij)| for w aligned with quotient_system vars.
inline double er_value_of(const QuotientGraph& H, const std::vector<double>& w) {
    QuotientSystem sys = quotient_system(H);
    if (w.size() != sys.vars.size())
        throw std::invalid_argument("er_value_of: wrong number of weights");
    double total = 0.0;
    for (int i = 0; i < sys.m; ++i) {
        double row = 0.0;
        for (std::size_t v = 0; v < sys.vars.size(); ++v) row += sys.A[i][v] * w[v];
        total += std::abs(1.0 - row);
    }
    return total;
}

// Er(H) via the block LP  min sum y_i  s.t.  [A I; -A I] (x,y) >= (b, -b),
// 0 <= (x,y) <= 1. The y_i are the absolute-value splits of the row deficits.
inline double er_value(const QuotientGraph& H, std::vector<double>* argmin = nullptr) {
    QuotientSystem sys = quotient_system(H);
    int h = static_cast<int>(sys.vars.size());
    int m = sys.m;
    LpProblem p(h + m);
    for (int i = 0; i < m; ++i) p.c[h + i] = -1.0;  // max -sum y == min sum y
    for (int i = 0; i < m; ++i) {
        std::vector<std::pair<int, double>> pos, neg;
        for (int v = 0; v < h; ++v)
            if (sys.A[i][v] != 0.0) {
                pos.emplace_back(v, 1.0);
                neg.emplace_back(v, -1.0);
            }
        pos.emplace_back(h + i, 1.0);
        neg.emplace_back(h + i, 1.0);
        p.add_ge(pos, 1.0);   // A x + y >= 1
        p.add_ge(neg, -1.0);  // -A x + y >= -1
    }
    for (int v = 0; v < h + m; ++v) p.add_le({{v, 1.0}}, 1.0);
    LpResult<double> r = (h + m <= 64) ? p.solve_exact() : p.solve();
    if (r.status != LpStatus::Optimal) throw std::runtime_error("er LP did not solve");
    if (argmin) argmin->assign(r.x.begin(), r.x.begin() + h);
    return -r.value;
}

// Feasibility polytope of the edge-weight inequalities: per-edge caps (r_e on
// irregular pairs, 1 elsewhere), per-part row lower bounds
// sum_{j != i} w(ij) >= 1 - r_i - sqrt(eps), and per-part row caps
// sum_{j != i} w(ij) <= 1 so no part is assigned more cross mass than it has
// vertices. Diagonals do not appear; interior matchings enter through r_i.
struct Polytope2 {
    std::vector<std::pair<int, int>> vars;  // cross pairs i < j with p != 0
    std::vector<double> lo, hi;
    struct Row {
        int part = -1;
        std::vector<int> var_idx;
        double lb = 0.0;
        double ub = 1.0;
    };
    std::vector<Row> rows;
    bool feasible = false;
    std::vector<double> point;  // some feasible point when feasible

    int var_index(int i, int j) const {
        auto key = std::make_pair(std::min(i, j), std::max(i, j));
        for (std::size_t v = 0; v < vars.size(); ++v)
            if (vars[v] == key) return static_cast<int>(v);
        return -1;
    }
};

// Feasibility LP for a polytope; also the exportable LP form.
inline LpProblem polytope_lp(const Polytope2& P) {
    int h = static_cast<int>(P.vars.size());
    LpProblem lp(h);
    for (int v = 0; v < h; ++v) {
        auto [i, j] = P.vars[v];
        lp.names[v] = "w_" + std::to_string(i) + "_" + std::to_string(j);
    }
    for (int v = 0; v < h; ++v) lp.add_le({{v, 1.0}}, P.hi[v]);
    for (const auto& row : P.rows) {
        std::vector<std::pair<int, double>> terms;
        for (int v : row.var_idx) terms.emplace_back(v, 1.0);
        if (!terms.empty()) {
            lp.add_ge(terms, row.lb);
            lp.add_le(terms, row.ub);
        } else if (row.lb > 0.0) {
            lp.add_ge({}, row.lb);  // 0 >= lb > 0: records the infeasible row
        }
    }
    return lp;
}

inline Polytope2 feasible_region(const QuotientGraph& H, double eps) {
    Polytope2 P;
    double slack = std::sqrt(eps);
    for (int i = 0; i < H.m; ++i)
        for (int j = i + 1; j < H.m; ++j)
            if (H.p[i][j] != 0.0) {
                P.vars.emplace_back(i, j);
                P.lo.push_back(0.0);
                if (H.cls(i, j) == EdgeClass::E1) {
                    double re = H.r_edge.count({i, j}) ? H.r_edge.at({i, j}) : 0.0;
                    P.hi.push_back(std::min(1.0, re));
                } else {
                    P.hi.push_back(1.0);
                }
            }
    for (int i = 0; i < H.m; ++i) {
        Polytope2::Row row;
        row.part = i;
        for (std::size_t v = 0; v < P.vars.size(); ++v)
            if (P.vars[v].first == i || P.vars[v].second == i)
                row.var_idx.push_back(static_cast<int>(v));
        row.lb = 1.0 - H.r_vertex[i] - slack;
        row.ub = 1.0;
        P.rows.push_back(std::move(row));
    }
    LpProblem lp = polytope_lp(P);
    LpResult<double> r = (P.vars.size() + P.rows.size() <= 48) ? lp.solve_exact() : lp.solve();
    P.feasible = r.status == LpStatus::Optimal;
    if (P.feasible) P.point = r.x;
    return P;
}

// Objective (3): sum over E4 pairs of (wn/K) ln(wn/K) plus sum over E3 pairs
// of (wn/K) ln(p_e wn/K), with 0 ln 0 = 0.
inline double objective_value(const Polytope2& P, const QuotientGraph& H,
                              const std::vector<double>& w) {
    double scale = static_cast<double>(H.n) / H.K;
    double s = 0.0;
    for (std::size_t v = 0; v < P.vars.size(); ++v) {
        auto [i, j] = P.vars[v];
        EdgeClass c = H.cls(i, j);
        double z = w[v] * scale;
        if (z <= 0.0) continue;
        if (c == EdgeClass::E4)
            s += z * std::log(z);
        else if (c == EdgeClass::E3)
            s += z * std::log(H.p[i][j] * z);
    }
    return s;
}

enum class MaximizeMethod { VertexEnumeration, MultistartAscent };

struct ObjectiveResult {
    double s = 0.0;
    std::vector<double> w;
    MaximizeMethod method = MaximizeMethod::MultistartAscent;
    bool certified = false;
};

namespace detail {

inline bool polytope_point_feasible(const Polytope2& P, const std::vector<double>& w,
                                    double tol = 1e-9) {
    for (std::size_t v = 0; v < P.vars.size(); ++v)
        if (w[v] < P.lo[v] - tol || w[v] > P.hi[v] + tol) return false;
    for (const auto& row : P.rows) {
        double s = 0.0;
        for (int v : row.var_idx) s += w[v];
        if (s < row.lb - tol || s > row.ub + tol) return false;
    }
    return true;
}

inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i] - 1e-12) return true;
        if (a[i] > b[i] + 1e-12) return false;
    }
    return false;
}

// Solve the f x f system that pins the free variables of a vertex candidate.
inline bool solve_small(std::vector<std::vector<double>> M, std::vector<double> rhs,
                        std::vector<double>& out) {
    int f = static_cast<int>(rhs.size());
    out.assign(f, 0.0);
    for (int col = 0; col < f; ++col) {
        int pr = -1;
        double best = 1e-9;
        for (int i = col; i < f; ++i)
            if (std::abs(M[i][col]) > best) {
                best = std::abs(M[i][col]);
                pr = i;
            }
        if (pr == -1) return false;
        std::swap(M[col], M[pr]);
        std::swap(rhs[col], rhs[pr]);
        double inv = 1.0 / M[col][col];
        for (int j = col; j < f; ++j) M[col][j] *= inv;
        rhs[col] *= inv;
        for (int i = 0; i < f; ++i) {
            if (i == col || M[i][col] == 0.0) continue;
            double factor = M[i][col];
            for (int j = col; j < f; ++j) M[i][j] -= factor * M[col][j];
            rhs[i] -= factor * rhs[col];
        }
    }
    out = rhs;
    return true;
}

}  // namespace detail

// Exhaustive vertex enumeration: every vertex has each variable tight at a
// bound or pinned by a tight row constraint, so enumerate variable states
// (lo/hi/free) x tight-row subsets x row sides. Exponential in the variable
// count; callers cap it.
inline ObjectiveResult maximize_by_enumeration(const Polytope2& P, const QuotientGraph& H) {
    if (!P.feasible) throw InfeasibleRegionError("maximize: infeasible polytope");
    int h = static_cast<int>(P.vars.size());
    int m = static_cast<int>(P.rows.size());
    ObjectiveResult best;
    best.method = MaximizeMethod::VertexEnumeration;
    best.certified = true;
    best.w = P.point;
    best.s = objective_value(P, H, P.point);

    std::vector<int> state(h, 0);  // 0 lo, 1 hi, 2 free
    std::vector<int> free_vars;
    std::vector<double> w(h), sol;

    auto consider = [&](const std::vector<double>& cand) {
        if (!detail::polytope_point_feasible(P, cand)) return;
        double s = objective_value(P, H, cand);
        if (s > best.s + 1e-12 ||
            (std::abs(s - best.s) <= 1e-12 && detail::lex_less(cand, best.w))) {
            best.s = s;
            best.w = cand;
        }
    };

    std::function<void(int)> rec = [&](int v) {
        if (v == h) {
            free_vars.clear();
            for (int i = 0; i < h; ++i) {
                if (state[i] == 0) w[i] = P.lo[i];
                else if (state[i] == 1) w[i] = P.hi[i];
                else free_vars.push_back(i);
            }
            int f = static_cast<int>(free_vars.size());
            if (f == 0) {
                consider(w);
                return;
            }
            if (f > m) return;
            // Choose f rows and a side (lb/ub) for each; solve for free vars.
            std::vector<int> rowsel(f);
            std::function<void(int, int)> pick = [&](int idx, int from) {
                if (idx == f) {
                    for (int sides = 0; sides < (1 << f); ++sides) {
                        std::vector<std::vector<double>> M(f, std::vector<double>(f, 0.0));
                        std::vector<double> rhs(f);
                        for (int r = 0; r < f; ++r) {
                            const auto& row = P.rows[rowsel[r]];
                            double fixed = 0.0;
                            for (int vi : row.var_idx) {
                                bool is_free = false;
                                for (int c = 0; c < f; ++c)
                                    if (free_vars[c] == vi) {
                                        M[r][c] = 1.0;
                                        is_free = true;
                                    }
                                if (!is_free) fixed += w[vi];
                            }
                            rhs[r] = ((sides >> r) & 1 ? row.ub : row.lb) - fixed;
                        }
                        if (!detail::solve_small(M, rhs, sol)) continue;
                        std::vector<double> cand = w;
                        for (int c = 0; c < f; ++c) cand[free_vars[c]] = sol[c];
                        consider(cand);
                    }
                    return;
                }
                for (int r = from; r < m; ++r) {
                    rowsel[idx] = r;
                    pick(idx + 1, r + 1);
                }
            };
            pick(0, 0);
            return;
        }
        for (int st = 0; st < 3; ++st) {
            state[v] = st;
            rec(v + 1);
        }
    };
    rec(0);
    return best;
}

// Seeded multi-start hill climb over the polytope: LP-generated vertex
// starts, then single-coordinate and coordinate-pair moves to the boundary
// (the objective is convex, so 1-D and 2-D slices maximize at their ends).
inline ObjectiveResult maximize_by_multistart(const Polytope2& P, const QuotientGraph& H,
                                              std::uint64_t seed = 0) {
    if (!P.feasible) throw InfeasibleRegionError("maximize: infeasible polytope");
    int h = static_cast<int>(P.vars.size());
    int m = static_cast<int>(P.rows.size());
    std::mt19937_64 rng(seed);

    std::vector<std::vector<double>> starts;
    starts.push_back(P.point);
    auto lp_start = [&](const std::vector<double>& obj) {
        LpProblem lp = polytope_lp(P);
        lp.c = obj;
        LpResult<double> r = lp.solve();
        if (r.status == LpStatus::Optimal) starts.push_back(r.x);
    };
    if (h <= 64) {
        for (int v = 0; v < h; ++v) {
            std::vector<double> obj(h, 0.0);
            obj[v] = 1.0;
            lp_start(obj);
            obj[v] = -1.0;
            lp_start(obj);
        }
        for (const auto& row : P.rows) {
            std::vector<double> obj(h, 0.0);
            for (int v : row.var_idx) obj[v] = 1.0;
            lp_start(obj);
            for (int v : row.var_idx) obj[v] = -1.0;
            lp_start(obj);
        }
    }
    int nrand = h <= 64 ? 16 : 4;
    for (int r = 0; r < nrand; ++r) {
        std::vector<double> obj(h);
        for (int v = 0; v < h; ++v)
            obj[v] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
        lp_start(obj);
    }

    double scale = static_cast<double>(H.n) / H.K;
    auto term = [&](int v, double wv) {
        auto [i, j] = P.vars[v];
        EdgeClass c = H.cls(i, j);
        double z = wv * scale;
        if (z <= 0.0) return 0.0;
        if (c == EdgeClass::E4) return z * std::log(z);
        if (c == EdgeClass::E3) return z * std::log(H.p[i][j] * z);
        return 0.0;
    };

    // rows_of[v]: indices of rows containing v.
    std::vector<std::vector<int>> rows_of(h);
    for (int r = 0; r < m; ++r)
        for (int v : P.rows[r].var_idx) rows_of[v].push_back(r);

    ObjectiveResult best;
    best.method = MaximizeMethod::MultistartAscent;
    best.certified = false;
    best.w = P.point;
    best.s = objective_value(P, H, P.point);

    // Gradient of the separable objective, with the z -> 0 singularity clamped.
    auto gradient = [&](const std::vector<double>& w) {
        std::vector<double> grad(h, 0.0);
        for (int v = 0; v < h; ++v) {
            auto [i, j] = P.vars[v];
            EdgeClass c = H.cls(i, j);
            double z = std::max(w[v] * scale, 1e-12);
            if (c == EdgeClass::E4)
                grad[v] = (std::log(z) + 1.0) * scale;
            else if (c == EdgeClass::E3)
                grad[v] = (std::log(H.p[i][j] * z) + 1.0) * scale;
        }
        return grad;
    };

    for (auto& start : starts) {
        std::vector<double> w = start;
        std::vector<double> rowsum(m, 0.0);
        for (int r = 0; r < m; ++r)
            for (int v : P.rows[r].var_idx) rowsum[r] += w[v];

        // Conditional-gradient hops: jump to the LP maximizer of the local
        // linearization, which never decreases a convex objective, then
        // polish with coordinate moves below. Escapes edges that 1-D and 2-D
        // moves cannot leave.
        int fw_budget = h <= 64 ? 40 : 8;
        for (int fw = 0; fw < fw_budget; ++fw) {
            LpProblem lp = polytope_lp(P);
            lp.c = gradient(w);
            LpResult<double> r = lp.solve();
            if (r.status != LpStatus::Optimal) break;
            if (objective_value(P, H, r.x) <= objective_value(P, H, w) + 1e-12) break;
            w = r.x;
        }
        for (int r = 0; r < m; ++r) {
            rowsum[r] = 0.0;
            for (int v : P.rows[r].var_idx) rowsum[r] += w[v];
        }

        bool improved = true;
        for (int iter = 0; improved && iter < 200; ++iter) {
            improved = false;
            // Single-coordinate moves.
            for (int v = 0; v < h; ++v) {
                double l = P.lo[v], u = P.hi[v];
                for (int r : rows_of[v]) {
                    double rest = rowsum[r] - w[v];
                    l = std::max(l, P.rows[r].lb - rest);
                    u = std::min(u, P.rows[r].ub - rest);
                }
                if (u < l) continue;
                double cur = term(v, w[v]);
                double cl = term(v, l), cu = term(v, u);
                double target = w[v], gain = 0.0;
                if (cl > cur + 1e-12 && cl >= cu) {
                    target = l;
                    gain = cl - cur;
                } else if (cu > cur + 1e-12) {
                    target = u;
                    gain = cu - cur;
                }
                if (gain > 1e-12) {
                    for (int r : rows_of[v]) rowsum[r] += target - w[v];
                    w[v] = target;
                    improved = true;
                }
            }
            // Pair moves: maximize the 2-D slice over (va, vb) exactly. The
            // slice is a rectangle intersected with a diagonal band (rows
            // containing both variables), and the separable convex objective
            // peaks at one of its corner points.
            auto pair_move = [&](int va, int vb) {
                double la = P.lo[va], ua = P.hi[va];
                double lb2 = P.lo[vb], ub2 = P.hi[vb];
                double band_lo = -1e18, band_hi = 1e18;
                for (int rr : rows_of[va]) {
                    bool has_b = false;
                    for (int vv : P.rows[rr].var_idx)
                        if (vv == vb) has_b = true;
                    double rest = rowsum[rr] - w[va];
                    if (has_b) {
                        rest -= w[vb];
                        band_lo = std::max(band_lo, P.rows[rr].lb - rest);
                        band_hi = std::min(band_hi, P.rows[rr].ub - rest);
                    } else {
                        la = std::max(la, P.rows[rr].lb - rest);
                        ua = std::min(ua, P.rows[rr].ub - rest);
                    }
                }
                for (int rr : rows_of[vb]) {
                    bool has_a = false;
                    for (int vv : P.rows[rr].var_idx)
                        if (vv == va) has_a = true;
                    if (has_a) continue;
                    double rest = rowsum[rr] - w[vb];
                    lb2 = std::max(lb2, P.rows[rr].lb - rest);
                    ub2 = std::min(ub2, P.rows[rr].ub - rest);
                }
                if (ua < la - 1e-12 || ub2 < lb2 - 1e-12) return false;
                std::vector<std::pair<double, double>> cand = {
                    {la, lb2}, {la, ub2}, {ua, lb2}, {ua, ub2}};
                for (double c : {band_lo, band_hi}) {
                    if (c < -1e17 || c > 1e17) continue;
                    for (double a : {la, ua}) cand.emplace_back(a, c - a);
                    for (double b2 : {lb2, ub2}) cand.emplace_back(c - b2, b2);
                }
                double cur = term(va, w[va]) + term(vb, w[vb]);
                double best_gain = 0.0, best_a = w[va], best_b = w[vb];
                for (auto [a, b2] : cand) {
                    if (a < la - 1e-9 || a > ua + 1e-9 || b2 < lb2 - 1e-9 || b2 > ub2 + 1e-9)
                        continue;
                    double s2 = a + b2;
                    if (s2 < band_lo - 1e-9 || s2 > band_hi + 1e-9) continue;
                    double val = term(va, a) + term(vb, b2);
                    if (val - cur > best_gain + 1e-12) {
                        best_gain = val - cur;
                        best_a = a;
                        best_b = b2;
                    }
                }
                if (best_gain <= 1e-12) return false;
                for (int rr : rows_of[va]) rowsum[rr] += best_a - w[va];
                for (int rr : rows_of[vb]) rowsum[rr] += best_b - w[vb];
                w[va] = best_a;
                w[vb] = best_b;
                return true;
            };
            if (h <= 24) {
                for (int va = 0; va < h; ++va)
                    for (int vb = va + 1; vb < h; ++vb)
                        if (pair_move(va, vb)) improved = true;
            } else {
                for (int r = 0; r < m; ++r) {
                    const auto& row = P.rows[r];
                    for (std::size_t a = 0; a < row.var_idx.size(); ++a)
                        for (std::size_t b = a + 1; b < row.var_idx.size(); ++b)
                            if (pair_move(row.var_idx[a], row.var_idx[b])) improved = true;
                }
            }
        }
        if (!detail::polytope_point_feasible(P, w, 1e-7)) continue;
        double s = objective_value(P, H, w);
        if (s > best.s + 1e-12 ||
            (std::abs(s - best.s) <= 1e-12 && detail::lex_less(w, best.w))) {
            best.s = s;
            best.w = w;
        }
    }
    return best;
}

// Certified vertex enumeration when the variable count permits, flagged
// multi-start ascent otherwise.
inline ObjectiveResult maximize_objective(const Polytope2& P, const QuotientGraph& H,
                                          std::uint64_t seed = 0) {
    if (!P.feasible) throw InfeasibleRegionError("maximize: infeasible polytope");
    int h = static_cast<int>(P.vars.size());
    if (h <= 8) return maximize_by_enumeration(P, H);
    return maximize_by_multistart(P, H, seed);
}

struct Thm12Result {
    bool no_matching = false;
    BoundPair bounds;
};

// Instance-specific lower bound for a generalized quasirandom quotient: for a
// solution w of the row system, each part splits into blocks of w(ij)n
// vertices, contributing the multinomial count of the split plus
// (1-4*sqrt(eps)) * w(ij)n * ln(w(ij)n) per used pair. With infinitely many
// solutions the free variables are swept over a sqrt(eps)-step grid and the
// best value is kept.
inline double generalized_lower_bound(const QuotientGraph& H, double n_per_part, double eps,
                                      SolutionClass* cls_out = nullptr) {
    SolutionClass cls = classify_system(H);
    if (cls_out) *cls_out = cls;
    if (cls.kind == SystemKind::Infeasible)
        throw InfeasibleRegionError("generalized_lower_bound: system has no solution");
    QuotientSystem sys = quotient_system(H);
    int h = static_cast<int>(sys.vars.size());
    double coeff = 1.0 - 4.0 * std::sqrt(eps);

    auto evaluate = [&](const std::vector<double>& w) {
        for (double v : w)
            if (v < -1e-9 || v > 1.0 + 1e-9) return -1e300;
        for (int i = 0; i < sys.m; ++i) {
            double row = 0.0;
            for (int v = 0; v < h; ++v) row += sys.A[i][v] * w[v];
            if (std::abs(row - 1.0) > 1e-6) return -1e300;  // grid point left the system
        }
        double total = 0.0;
        // multinomial split of every part
        for (int i = 0; i < sys.m; ++i) {
            double parts = 0.0;
            for (int v = 0; v < h; ++v)
                if (sys.A[i][v] != 0.0) parts += std::lgamma(w[v] * n_per_part + 1.0);
            total += std::lgamma(n_per_part + 1.0) - parts;
        }
        // per-block matching counts
        for (int v = 0; v < h; ++v) {
            double z = w[v] * n_per_part;
            if (z > 1.0) total += coeff * z * std::log(z);
        }
        return total;
    };

    if (cls.kind == SystemKind::Unique || cls.free_variables.empty()) return evaluate(cls.w);

    // Grid over the free variables at step sqrt(eps); completion along the
    // reduced-echelon null basis (identity on the free columns).
    double step = std::sqrt(eps);
    int levels = static_cast<int>(std::floor(1.0 / step)) + 1;
    int t = static_cast<int>(cls.free_variables.size());
    // Budget the sweep: each grid point costs O(m*h) in the worst case.
    double max_points = std::max(256.0, 2e7 / (1.0 + static_cast<double>(sys.m) * h));
    while (t > 1 && std::pow(levels + 1.0, t) > max_points) --t;
    double best = -1e300;
    std::vector<int> idx(t, 0);
    for (;;) {
        std::vector<double> w = cls.w;
        for (int f = 0; f < t; ++f) {
            double target = std::min(1.0, idx[f] * step);
            double delta = target - cls.w[cls.free_variables[f]];
            for (int v = 0; v < h; ++v) w[v] += delta * cls.null_basis[f][v];
        }
        best = std::max(best, evaluate(w));
        int carry = 0;
        while (carry < t && ++idx[carry] > levels) {
            idx[carry] = 0;
            ++carry;
        }
        if (carry == t) break;
    }
    if (best <= -1e299) return evaluate(cls.w);  // grid missed the box; use the LP point
    return best;
}

// Three cases on the quotient system: infeasible => no near perfect
// matchings; otherwise (1 -+ {4,7} sqrt(eps)) * (m/2) * n * ln n with n the
// per-part size.
inline Thm12Result thm12_bounds(const QuotientGraph& H, double n_per_part, int m, double eps) {
    Thm12Result res;
    SolutionClass cls = classify_system(H);
    if (cls.kind == SystemKind::Infeasible) {
        res.no_matching = true;
        return res;
    }
    double se = std::sqrt(eps);
    double base = 0.5 * m * n_per_part * std::log(n_per_part);
    res.bounds.lower = (1.0 - 4.0 * se) * base;
    res.bounds.upper = (1.0 + 7.0 * se) * base;
    return res;
}

// Theorem 1.3 exponent source: (1 - 4 sqrt(eps)) * sup of objective (3).
// eps is the partition-level parameter (H.eps for quotients built in-pipeline).
inline double thm13_lower_bound(const Polytope2& P, const QuotientGraph& H, double eps,
                                std::uint64_t seed = 0) {
    ObjectiveResult r = maximize_objective(P, H, seed);
    return (1.0 - 4.0 * std::sqrt(eps)) * r.s;
}

}  // namespace nearmatch
