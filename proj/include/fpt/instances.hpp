#pragma once

// Seeded Gaussian sensing instances: A with i.i.d. N(0,1) entries, a k-sparse
// ground truth with N(0,1) values at uniformly chosen distinct positions, and
// measurements b = A x_true + sigma * g. Matrix, signal and noise use
// separate streams derived from the master seed, so changing sigma leaves A
// and x_true untouched.

#include <cstdint>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpt/linalg.hpp"
#include "fpt/rng.hpp"

namespace fpt {

inline constexpr std::uint64_t kMatrixStreamTag = 1;
inline constexpr std::uint64_t kSignalStreamTag = 2;
inline constexpr std::uint64_t kNoiseStreamTag = 3;

struct SensingProblem {
    DenseMatrix A;
    std::vector<double> b;
    std::vector<double> x_true;  // empty when the ground truth is unknown
    double sigma = 0.0;
    std::uint64_t seed = 0;

    bool has_truth() const { return !x_true.empty(); }
};

inline DenseMatrix gen_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
    DenseMatrix A(m, n);
    rng::Xoshiro256pp gen(rng::derive_stream(seed, kMatrixStreamTag));
    for (double& v : A.data()) v = gen.normal();
    return A;
}

// Exactly k nonzeros; a drawn value of exactly 0 is redrawn so the sparsity
// invariant holds without an epsilon.
inline std::vector<double> gen_sparse_signal(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 1 || k > n) {
        throw std::invalid_argument("gen_sparse_signal: need 1 <= k <= n");
    }
    rng::Xoshiro256pp gen(rng::derive_stream(seed, kSignalStreamTag));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + gen.below(n - i);
        std::swap(idx[i], idx[j]);
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double v = gen.normal();
        while (v == 0.0) v = gen.normal();
        x[idx[i]] = v;
    }
    return x;
}

// b = A x_true + sigma * g. With sigma = 0 the noise stream is never drawn
// and the product is exact.
inline std::vector<double> measure(const DenseMatrix& A, std::span<const double> x_true,
                                   double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("measure: sigma must be nonnegative");
    std::vector<double> b = matvec(A, x_true);
    if (sigma > 0.0) {
        rng::Xoshiro256pp gen(rng::derive_stream(seed, kNoiseStreamTag));
        for (double& v : b) v += sigma * gen.normal();
    }
    return b;
}

inline SensingProblem make_problem(std::size_t m, std::size_t n, std::size_t k, double sigma,
                                   std::uint64_t seed) {
    DenseMatrix A = gen_gaussian_matrix(m, n, seed);
    std::vector<double> x = gen_sparse_signal(n, k, seed);
    std::vector<double> b = measure(A, x, sigma, seed);
    return SensingProblem{std::move(A), std::move(b), std::move(x), sigma, seed};
}

namespace detail {

inline void write_value(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

inline void write_row(std::ostream& os, std::span<const double> row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) os << ' ';
        write_value(os, row[j]);
    }
    os << '\n';
}

}  // namespace detail

// Plain-text archive format, whitespace-delimited with 17 significant digits:
//   line 1: m n k sigma seed        (k = nonzero count of x_true, 0 if absent)
//   lines 2..m+1: rows of A
//   next line: b
//   last line (optional): x_true
inline void save_problem(const SensingProblem& p, std::ostream& os) {
    std::size_t k = 0;
    for (double v : p.x_true) k += v != 0.0;
    os << p.A.rows() << ' ' << p.A.cols() << ' ' << k << ' ';
    detail::write_value(os, p.sigma);
    os << ' ' << p.seed << '\n';
    for (std::size_t i = 0; i < p.A.rows(); ++i) detail::write_row(os, p.A.row(i));
    detail::write_row(os, p.b);
    if (p.has_truth()) detail::write_row(os, p.x_true);
}

inline void save_problem(const SensingProblem& p, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_problem: cannot open " + path);
    save_problem(p, os);
}

inline SensingProblem load_problem(std::istream& is) {
    std::size_t m = 0, n = 0, k = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    if (!(is >> m >> n >> k >> sigma >> seed)) {
        throw std::runtime_error("load_problem: malformed header");
    }
    if (m == 0 || n == 0) throw std::runtime_error("load_problem: empty dimensions");
    DenseMatrix A(m, n);
    for (double& v : A.data()) {
        if (!(is >> v)) throw std::runtime_error("load_problem: truncated matrix");
    }
    std::vector<double> b(m);
    for (double& v : b) {
        if (!(is >> v)) throw std::runtime_error("load_problem: truncated measurements");
    }
    std::vector<double> x;
    double probe = 0.0;
    if (is >> probe) {
        x.resize(n);
        x[0] = probe;
        for (std::size_t i = 1; i < n; ++i) {
            if (!(is >> x[i])) throw std::runtime_error("load_problem: truncated ground truth");
        }
    }
    return SensingProblem{std::move(A), std::move(b), std::move(x), sigma, seed};
}

inline SensingProblem load_problem(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_problem: cannot open " + path);
    return load_problem(is);
}

}  // namespace fpt
