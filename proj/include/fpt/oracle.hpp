#pragma once

// Independent brute-force verifiers. Nothing here is called by the solvers;
// these routines re-derive answers by exhaustive search or direct algebra so
// the closed forms and iterates can be checked against them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpt/linalg.hpp"
#include "fpt/penalty.hpp"

namespace fpt::oracle {

namespace detail {

// Golden-section refinement of a bracketed minimum.
template <typename F>
double golden_min(F&& f, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::fabs(lo) + std::fabs(hi));
         ++it) {
        if (f(c) < f(d)) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - kInvPhi * (hi - lo);
        d = lo + kInvPhi * (hi - lo);
    }
    return (lo + hi) / 2.0;
}

// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.
// Intended for the tiny Gram matrices that appear below (n <= ~64).
inline std::vector<double> sym_eigenvalues(std::vector<double> M, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return M[i * n + j]; };
    double fro = 0.0;
    for (double v : M) fro += v * v;
    fro = std::sqrt(fro);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        }
        if (std::sqrt(2.0 * off) <= 1e-14 * std::max(fro, 1e-300)) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double mip = at(i, p);
                    const double miq = at(i, q);
                    at(i, p) = c * mip - s * miq;
                    at(i, q) = s * mip + c * miq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double mpj = at(p, j);
                    const double mqj = at(q, j);
                    at(p, j) = c * mpj - s * mqj;
                    at(q, j) = s * mpj + c * mqj;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Gram matrix of the columns of A indexed by S.
inline std::vector<double> gram(const DenseMatrix& A, std::span<const std::size_t> S) {
    const std::size_t s = S.size();
    std::vector<double> G(s * s, 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const std::span<const double> row = A.row(i);
        for (std::size_t p = 0; p < s; ++p) {
            for (std::size_t q = p; q < s; ++q) {
                G[p * s + q] += row[S[p]] * row[S[q]];
            }
        }
    }
    for (std::size_t p = 0; p < s; ++p) {
        for (std::size_t q = 0; q < p; ++q) G[p * s + q] = G[q * s + p];
    }
    return G;
}

// In-place Cholesky; returns false when a pivot collapses (rank deficiency).
inline bool cholesky(std::vector<double>& G, std::size_t s) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < s; ++i) max_diag = std::max(max_diag, G[i * s + i]);
    for (std::size_t j = 0; j < s; ++j) {
        double d = G[j * s + j];
        for (std::size_t p = 0; p < j; ++p) d -= G[j * s + p] * G[j * s + p];
        if (!(d > 1e-12 * std::max(max_diag, 1e-300))) return false;
        const double l = std::sqrt(d);
        G[j * s + j] = l;
        for (std::size_t i = j + 1; i < s; ++i) {
            double v = G[i * s + j];
            for (std::size_t p = 0; p < j; ++p) v -= G[i * s + p] * G[j * s + p];
            G[i * s + j] = v / l;
        }
    }
    return true;
}

// Least squares on the column subset S via normal equations. Returns false
// when the subset is rank deficient.
inline bool least_squares_on(const DenseMatrix& A, std::span<const double> b,
                             std::span<const std::size_t> S, std::vector<double>& z,
                             double& residual_norm) {
    const std::size_t s = S.size();
    std::vector<double> G = gram(A, S);
    if (!cholesky(G, s)) return false;
    std::vector<double> rhs(s, 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const std::span<const double> row = A.row(i);
        for (std::size_t p = 0; p < s; ++p) rhs[p] += row[S[p]] * b[i];
    }
    // forward then backward substitution with the Cholesky factor
    for (std::size_t i = 0; i < s; ++i) {
        double v = rhs[i];
        for (std::size_t p = 0; p < i; ++p) v -= G[i * s + p] * rhs[p];
        rhs[i] = v / G[i * s + i];
    }
    for (std::size_t ii = s; ii-- > 0;) {
        double v = rhs[ii];
        for (std::size_t p = ii + 1; p < s; ++p) v -= G[p * s + ii] * rhs[p];
        rhs[ii] = v / G[ii * s + ii];
    }
    z = std::move(rhs);
    double rsq = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const std::span<const double> row = A.row(i);
        double fit = 0.0;
        for (std::size_t p = 0; p < s; ++p) fit += row[S[p]] * z[p];
        const double d = b[i] - fit;
        rsq += d * d;
    }
    residual_norm = std::sqrt(rsq);
    return true;
}

inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
    const std::size_t s = c.size();
    for (std::size_t i = s; i-- > 0;) {
        if (c[i] < n - s + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Exhaustive minimizer of f(y) = (y - x)^2 + lambda_eff * p_a(|y|): full scan
// of [-|x|-1, |x|+1] at grid_step, then golden-section refinement around the
// best grid point and around 0. Zero is always a candidate.
inline double prox_grid_oracle(double x, double lambda_eff, double a, double grid_step = 1e-3) {
    if (!(grid_step > 0.0)) throw std::invalid_argument("prox_grid_oracle: bad grid_step");
    const PenaltyParams params(a);
    auto f = [&](double y) {
        const double d = y - x;
        return d * d + lambda_eff * fraction_penalty(y, params);
    };
    const double lo = -std::fabs(x) - 1.0;
    const double hi = std::fabs(x) + 1.0;
    const std::size_t steps = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step));
    double best = 0.0;
    double fbest = f(0.0);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double y = std::min(lo + static_cast<double>(i) * grid_step, hi);
        const double fy = f(y);
        if (fy < fbest) {
            fbest = fy;
            best = y;
        }
    }
    double cand1 = detail::golden_min(f, best - grid_step, best + grid_step);
    double cand2 = detail::golden_min(f, -grid_step, grid_step);
    double out = 0.0;
    double fout = f(0.0);
    for (double c : {cand1, cand2}) {
        const double fc = f(c);
        if (fc < fout) {
            fout = fc;
            out = c;
        }
    }
    return out;
}

// |2y(ay+1)^2 - 2t(ay+1)^2 + lambda*a| for t >= 0, and the sign-mirrored
// variant |2y(1-ay)^2 - 2t(1-ay)^2 - lambda*a| for t < 0.
inline double cubic_residual(double y, double t, double lambda, double a) {
    if (t >= 0.0) {
        const double s = a * y + 1.0;
        return std::fabs(2.0 * y * s * s - 2.0 * t * s * s + lambda * a);
    }
    const double s = 1.0 - a * y;
    return std::fabs(2.0 * y * s * s - 2.0 * t * s * s - lambda * a);
}

// Stationarity on the support: |2(A^T(b-Ax))_i - lambda*a*sgn(x_i)/(1+a|x_i|)^2| <= tol.
inline bool check_first_order(std::span<const double> x, const DenseMatrix& A,
                              std::span<const double> b, double lambda, double a, double tol) {
    std::vector<double> r = matvec(A, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const std::vector<double> g = matvec_t(A, r);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) continue;
        const double denom = 1.0 + a * std::fabs(x[i]);
        const double target = lambda * a * (x[i] > 0.0 ? 1.0 : -1.0) / (denom * denom);
        if (std::fabs(2.0 * g[i] - target) > tol) return false;
    }
    return true;
}

// Magnitude floor for support entries of an optimal solution:
// |x_i| >= sqrt(lambda)/||a_i|| - 1/a, up to tol.
inline bool check_lower_bound(std::span<const double> x, double lambda, double a,
                              std::span<const double> col_norms, double tol) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) continue;
        const double floor_i = std::sqrt(lambda) / col_norms[i] - 1.0 / a;
        if (std::fabs(x[i]) < floor_i - tol) return false;
    }
    return true;
}

// ||x||_inf <= ||b||^2 / (a (lambda - ||b||^2)); requires lambda > ||b||^2.
inline bool check_linf_bound(std::span<const double> x, std::span<const double> b,
                             double lambda, double a) {
    const double bb = norm2_sq(b);
    if (!(lambda > bb)) {
        throw std::domain_error("check_linf_bound: requires lambda > ||b||^2");
    }
    return norm_inf(x) <= bb / (a * (lambda - bb));
}

struct L0Result {
    std::size_t size = 0;
    std::vector<double> x;
};

// Exhaustive l0 minimization subject to ||A_S z - b|| <= residual_tol,
// enumerating supports by increasing size. residual_tol <= 0 selects the
// default 1e-9 * max(1, ||b||).
inline L0Result exhaustive_l0(const DenseMatrix& A, std::span<const double> b,
                              double residual_tol = 0.0) {
    const std::size_t m = A.rows();
    const std::size_t n = A.cols();
    if (n > 20) throw std::invalid_argument("exhaustive_l0: n must be <= 20");
    if (b.size() != m) throw std::invalid_argument("exhaustive_l0: dimension mismatch");
    const double tol = residual_tol > 0.0 ? residual_tol : 1e-9 * std::max(1.0, norm2(b));
    if (norm2(b) <= tol) {
        return L0Result{0, std::vector<double>(n, 0.0)};
    }
    std::vector<double> z;
    double rn = 0.0;
    for (std::size_t s = 1; s <= m; ++s) {
        std::vector<std::size_t> comb(s);
        for (std::size_t i = 0; i < s; ++i) comb[i] = i;
        do {
            if (!detail::least_squares_on(A, b, comb, z, rn)) continue;
            if (rn <= tol) {
                L0Result out{s, std::vector<double>(n, 0.0)};
                for (std::size_t i = 0; i < s; ++i) out.x[comb[i]] = z[i];
                return out;
            }
        } while (detail::next_combination(comb, n));
    }
    throw std::runtime_error("exhaustive_l0: no support of size <= m fits b");
}

struct TinyInstanceReport {
    std::size_t l0_min = 0;
    std::vector<double> l0_solution;
    double r_const = 0.0;      // min nonzero |z_i| over basic solutions
    double R_const = 0.0;      // max nonzero |z_i| over basic solutions
    double a_star_star = 0.0;  // l0_min / r_const
    double sigma_min = 0.0;    // smallest singular value over full-rank column subsets
    double sigma_min_sq = 0.0;
    // left side of the sufficient condition under which the regularized
    // optimum also solves the constrained problem:
    // 4 m ||A||_2^4 / (lambda a^2) * (lambda/(lambda - ||b||^2))^4 < sigma_min^2
    double equivalence_lhs = 0.0;
    bool equivalence_holds = false;
    std::size_t vertex_count = 0;
};

// Enumerates the basic solutions of Ax = b (the vertex set), the constants
// r, R, a** they induce, the minimal subset singular value, and whether the
// regularized/constrained equivalence condition holds at (lambda, a).
// Guards: m <= 10, n <= 20. residual_tol <= 0 selects 1e-9 * max(1, ||b||).
inline TinyInstanceReport tiny_constants(const DenseMatrix& A, std::span<const double> b,
                                         double lambda, double a, double residual_tol = 0.0) {
    const std::size_t m = A.rows();
    const std::size_t n = A.cols();
    if (m > 10 || n > 20) throw std::invalid_argument("tiny_constants: instance too large");
    if (b.size() != m) throw std::invalid_argument("tiny_constants: dimension mismatch");
    if (!(lambda > 0.0) || !(a > 0.0)) {
        throw std::invalid_argument("tiny_constants: lambda and a must be positive");
    }
    const double tol = residual_tol > 0.0 ? residual_tol : 1e-9 * std::max(1.0, norm2(b));

    TinyInstanceReport rep;
    rep.l0_min = 0;
    const L0Result l0 = exhaustive_l0(A, b, tol);
    rep.l0_min = l0.size;
    rep.l0_solution = l0.x;

    auto snap = [](double v) { return std::round(v * 1e12) / 1e12; };
    std::set<std::string> seen;
    double r = 0.0, R = 0.0;
    std::size_t count = 0;
    std::vector<double> z;
    double rn = 0.0;
    for (std::size_t s = 1; s <= m; ++s) {
        std::vector<std::size_t> comb(s);
        for (std::size_t i = 0; i < s; ++i) comb[i] = i;
        do {
            if (!detail::least_squares_on(A, b, comb, z, rn)) continue;
            if (rn > tol) continue;
            // keep only basic solutions whose support is exactly the subset
            bool exact_support = true;
            std::string key;
            char buf[64];
            for (std::size_t i = 0; i < s; ++i) {
                const double v = snap(z[i]);
                if (v == 0.0) {
                    exact_support = false;
                    break;
                }
                std::snprintf(buf, sizeof(buf), "%zu:%.17g;", comb[i], v);
                key += buf;
            }
            if (!exact_support) continue;
            if (!seen.insert(key).second) continue;
            ++count;
            for (std::size_t i = 0; i < s; ++i) {
                const double mag = std::fabs(z[i]);
                if (count == 1 && i == 0) {
                    r = R = mag;
                } else {
                    r = std::min(r, mag);
                    R = std::max(R, mag);
                }
            }
        } while (detail::next_combination(comb, n));
    }
    if (count == 0) throw std::runtime_error("tiny_constants: vertex set is empty");
    rep.vertex_count = count;
    rep.r_const = r;
    rep.R_const = R;
    rep.a_star_star = static_cast<double>(rep.l0_min) / r;

    // sigma_min over all full-column-rank column subsets (sizes 1..m)
    double smin_sq = -1.0;
    for (std::size_t s = 1; s <= m; ++s) {
        std::vector<std::size_t> comb(s);
        for (std::size_t i = 0; i < s; ++i) comb[i] = i;
        do {
            std::vector<double> G = detail::gram(A, comb);
            std::vector<double> Gc = G;
            if (!detail::cholesky(Gc, s)) continue;
            const std::vector<double> ev = detail::sym_eigenvalues(std::move(G), s);
            const double lo = std::max(ev.front(), 0.0);
            if (smin_sq < 0.0 || lo < smin_sq) smin_sq = lo;
        } while (detail::next_combination(comb, n));
    }
    rep.sigma_min_sq = std::max(smin_sq, 0.0);
    rep.sigma_min = std::sqrt(rep.sigma_min_sq);

    // ||A||_2^2 = largest eigenvalue of A A^T (m x m)
    std::vector<double> AAt(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double v = dot(A.row(i), A.row(j));
            AAt[i * m + j] = v;
            AAt[j * m + i] = v;
        }
    }
    const std::vector<double> ev = detail::sym_eigenvalues(std::move(AAt), m);
    const double norm_a_sq = std::max(ev.back(), 0.0);
    const double bb = norm2_sq(b);
    const double ratio = lambda / (lambda - bb);
    rep.equivalence_lhs = 4.0 * static_cast<double>(m) * norm_a_sq * norm_a_sq /
                          (lambda * a * a) * ratio * ratio * ratio * ratio;
    rep.equivalence_holds = lambda > bb && rep.equivalence_lhs < rep.sigma_min_sq;
    return rep;
}

}  // namespace fpt::oracle
