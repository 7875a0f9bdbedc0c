#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nearmatch {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class T>
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<T> x;
    T value{};
};

using Rational = boost::multiprecision::cpp_rational;

namespace detail {

template <class T>
struct lp_eps {
    static T value() { return T(0); }
};
template <>
struct lp_eps<double> {
    static double value() { return 1e-9; }
};

template <class T>
T lp_abs(const T& v) {
    return v < T(0) ? T(-v) : v;
}

// Two-phase dense simplex on max c*x s.t. A*x <= b, x >= 0 (b may be
// negative). Standard tableau formulation; entering/leaving ties break on
// variable index, with a fallback to Bland's rule after many pivots so the
// exact instantiation terminates on degenerate systems.
template <class T>
class Simplex {
public:
    Simplex(const std::vector<std::vector<T>>& A, const std::vector<T>& b,
            const std::vector<T>& c)
        : m_(static_cast<int>(b.size())), n_(static_cast<int>(c.size())), N_(n_ + 1), B_(m_),
          D_(m_ + 2, std::vector<T>(n_ + 2)) {
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j) D_[i][j] = A[i][j];
        for (int i = 0; i < m_; ++i) {
            B_[i] = n_ + i;
            D_[i][n_] = T(-1);
            D_[i][n_ + 1] = b[i];
        }
        for (int j = 0; j < n_; ++j) {
            N_[j] = j;
            D_[m_][j] = -c[j];
        }
        N_[n_] = -1;
        D_[m_ + 1][n_] = T(1);
    }

    LpResult<T> solve() {
        LpResult<T> res;
        const T eps = lp_eps<T>::value();
        int r = 0;
        for (int i = 1; i < m_; ++i)
            if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
        if (D_[r][n_ + 1] < -eps) {
            pivot(r, n_);
            if (!run(2) || D_[m_ + 1][n_ + 1] < -eps) {
                res.status = LpStatus::Infeasible;
                return res;
            }
            for (int i = 0; i < m_; ++i)
                if (B_[i] == -1) {
                    int s = -1;
                    for (int j = 0; j <= n_; ++j) {
                        if (!(lp_abs(D_[i][j]) > eps)) continue;
                        if (s == -1 || D_[i][j] < D_[i][s] ||
                            (D_[i][j] == D_[i][s] && N_[j] < N_[s]))
                            s = j;
                    }
                    if (s != -1) pivot(i, s);  // all-zero row: redundant constraint
                }
        }
        bool bounded = run(1);
        res.x.assign(n_, T(0));
        for (int i = 0; i < m_; ++i)
            if (B_[i] >= 0 && B_[i] < n_) res.x[B_[i]] = D_[i][n_ + 1];
        if (!bounded) {
            res.status = LpStatus::Unbounded;
            return res;
        }
        res.status = LpStatus::Optimal;
        res.value = D_[m_][n_ + 1];
        return res;
    }

private:
    bool run(int phase) {
        const T eps = lp_eps<T>::value();
        const int x = m_ + phase - 1;
        const long long bland_after = 50LL * (m_ + n_) + 2000;
        long long iters = 0;
        for (;;) {
            if (++iters > 2000000) throw std::runtime_error("simplex: iteration cap exceeded");
            bool bland = iters > bland_after;
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (N_[j] == -phase) continue;
                if (bland) {
                    if (D_[x][j] < -eps && (s == -1 || N_[j] < N_[s])) s = j;
                } else {
                    if (s == -1 || D_[x][j] < D_[x][s] ||
                        (D_[x][j] == D_[x][s] && N_[j] < N_[s]))
                        s = j;
                }
            }
            if (s == -1 || D_[x][s] >= -eps) return true;
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                if (D_[i][s] <= eps) continue;
                if (r == -1) {
                    r = i;
                    continue;
                }
                // Compare D[i][n+1]/D[i][s] against D[r][n+1]/D[r][s] without division.
                T lhs = D_[i][n_ + 1] * D_[r][s];
                T rhs = D_[r][n_ + 1] * D_[i][s];
                if (lhs < rhs || (lhs == rhs && B_[i] < B_[r])) r = i;
            }
            if (r == -1) return false;  // unbounded in this direction
            pivot(r, s);
        }
    }

    void pivot(int r, int s) {
        const T eps = lp_eps<T>::value();
        T inv = T(1) / D_[r][s];
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == r || !(lp_abs(D_[i][s]) > eps)) continue;
            T factor = D_[i][s] * inv;
            for (int j = 0; j < n_ + 2; ++j) D_[i][j] -= D_[r][j] * factor;
            D_[i][s] = D_[r][s] * factor;  // undo the column update; fixed below
        }
        for (int j = 0; j < n_ + 2; ++j)
            if (j != s) D_[r][j] *= inv;
        for (int i = 0; i < m_ + 2; ++i)
            if (i != r) D_[i][s] *= -inv;
        D_[r][s] = inv;
        std::swap(B_[r], N_[s]);
    }

    int m_, n_;
    std::vector<int> N_, B_;
    std::vector<std::vector<T>> D_;
};

}  // namespace detail

// max c*x s.t. A*x <= b, x >= 0.
template <class T>
LpResult<T> solve_lp(const std::vector<std::vector<T>>& A, const std::vector<T>& b,
                     const std::vector<T>& c) {
    detail::Simplex<T> s(A, b, c);
    return s.solve();
}

// Incrementally built LP in the same canonical form, with helpers for the
// >= and == constraints the quotient layer needs.
struct LpProblem {
    int nvars = 0;
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    std::vector<double> c;
    std::vector<std::string> names;

    explicit LpProblem(int n) : nvars(n), c(n, 0.0), names(n) {
        for (int i = 0; i < n; ++i) names[i] = "x" + std::to_string(i);
    }

    void add_le(const std::vector<std::pair<int, double>>& terms, double rhs) {
        std::vector<double> row(nvars, 0.0);
        for (auto [idx, coef] : terms) row[idx] += coef;
        A.push_back(std::move(row));
        b.push_back(rhs);
    }
    void add_ge(const std::vector<std::pair<int, double>>& terms, double rhs) {
        std::vector<std::pair<int, double>> neg;
        neg.reserve(terms.size());
        for (auto [idx, coef] : terms) neg.emplace_back(idx, -coef);
        add_le(neg, -rhs);
    }
    void add_eq(const std::vector<std::pair<int, double>>& terms, double rhs) {
        add_le(terms, rhs);
        add_ge(terms, rhs);
    }

    LpResult<double> solve() const { return solve_lp(A, b, c); }

    // Exact solve over rationals built from the double data (every double is
    // a rational, so this is exact for the instance as stored).
    LpResult<double> solve_exact() const {
        std::vector<std::vector<Rational>> Ar(A.size(), std::vector<Rational>(nvars));
        std::vector<Rational> br(A.size()), cr(nvars);
        for (std::size_t i = 0; i < A.size(); ++i) {
            for (int j = 0; j < nvars; ++j) Ar[i][j] = Rational(A[i][j]);
            br[i] = Rational(b[i]);
        }
        for (int j = 0; j < nvars; ++j) cr[j] = Rational(c[j]);
        LpResult<Rational> r = solve_lp(Ar, br, cr);
        LpResult<double> out;
        out.status = r.status;
        if (r.status == LpStatus::Optimal) {
            out.value = static_cast<double>(r.value);
            out.x.reserve(r.x.size());
            for (const Rational& v : r.x) out.x.push_back(static_cast<double>(v));
        }
        return out;
    }

    // CPLEX LP text format, for external cross-checking.
    void export_lp(std::ostream& out, bool maximize = true) const {
        out << (maximize ? "Maximize" : "Minimize") << "\n obj:";
        bool any = false;
        for (int j = 0; j < nvars; ++j)
            if (c[j] != 0.0) {
                out << (c[j] >= 0 ? " + " : " - ") << std::abs(c[j]) << ' ' << names[j];
                any = true;
            }
        if (!any) out << " 0 " << (names.empty() ? "x0" : names[0]);
        out << "\nSubject To\n";
        for (std::size_t i = 0; i < A.size(); ++i) {
            out << " c" << i << ":";
            bool row_any = false;
            for (int j = 0; j < nvars; ++j)
                if (A[i][j] != 0.0) {
                    out << (A[i][j] >= 0 ? " + " : " - ") << std::abs(A[i][j]) << ' ' << names[j];
                    row_any = true;
                }
            if (!row_any) out << " 0 " << (names.empty() ? "x0" : names[0]);
            out << " <= " << b[i] << "\n";
        }
        out << "Bounds\n";
        for (int j = 0; j < nvars; ++j) out << ' ' << names[j] << " >= 0\n";
        out << "End\n";
    }
};

}  // namespace nearmatch
