#pragma once

// Dense row-major matrix plus the few kernels the solvers need. Plain loops
// on purpose; instance sizes here never justify a BLAS dependency.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fpt {

class DenseMatrix {
  public:
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("DenseMatrix: dimensions must be positive");
        }
    }

    static DenseMatrix from_data(std::size_t rows, std::size_t cols, std::vector<double> entries) {
        DenseMatrix m(rows, cols);
        if (entries.size() != rows * cols) {
            throw std::invalid_argument("DenseMatrix::from_data: size mismatch");
        }
        for (double v : entries) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("DenseMatrix::from_data: non-finite entry");
            }
        }
        m.data_ = std::move(entries);
        return m;
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2_sq(std::span<const double> x) { return dot(x, x); }

inline double norm2(std::span<const double> x) { return std::sqrt(norm2_sq(x)); }

inline double norm_inf(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::fabs(v));
    return s;
}

inline std::vector<double> matvec(const DenseMatrix& A, std::span<const double> x) {
    if (x.size() != A.cols()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(A.rows(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        y[i] = dot(A.row(i), x);
    }
    return y;
}

// A^T y, accumulated row-by-row to stay sequential in memory.
inline std::vector<double> matvec_t(const DenseMatrix& A, std::span<const double> y) {
    if (y.size() != A.rows()) throw std::invalid_argument("matvec_t: dimension mismatch");
    std::vector<double> out(A.cols(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const double yi = y[i];
        const std::span<const double> row = A.row(i);
        for (std::size_t j = 0; j < A.cols(); ++j) out[j] += row[j] * yi;
    }
    return out;
}

inline std::vector<double> column_norms(const DenseMatrix& A) {
    std::vector<double> out(A.cols(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const std::span<const double> row = A.row(i);
        for (std::size_t j = 0; j < A.cols(); ++j) out[j] += row[j] * row[j];
    }
    for (double& v : out) v = std::sqrt(v);
    return out;
}

// Spectral norm ||A||_2 by power iteration on A^T A. The start vector is the
// normalized all-ones vector, so results are reproducible run to run.
inline double spectral_norm(const DenseMatrix& A, double tol = 1e-8, int max_iter = 10000) {
    if (!(tol > 0.0)) throw std::invalid_argument("spectral_norm: tol must be positive");
    const std::size_t n = A.cols();
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double sigma_prev = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        const std::vector<double> w = matvec(A, v);
        const double sigma = norm2(w);
        if (sigma == 0.0) {
            throw std::runtime_error("spectral_norm: start vector lies in the null space");
        }
        if (sigma_prev >= 0.0 && std::fabs(sigma - sigma_prev) <= tol * sigma) {
            return sigma;
        }
        sigma_prev = sigma;
        std::vector<double> u = matvec_t(A, w);
        const double nu = norm2(u);
        if (nu == 0.0) {
            throw std::runtime_error("spectral_norm: iteration collapsed to zero");
        }
        for (double& x : u) x /= nu;
        v = std::move(u);
    }
    throw std::runtime_error("spectral_norm: power iteration did not converge");
}

}  // namespace fpt
