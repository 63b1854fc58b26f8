#include "chainlab/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "chainlab/error.hpp"
#include "chainlab/kernels.hpp"

namespace chainlab {

Matrix Matrix::identity(std::size_t order) {
    Matrix m(order);
    for (std::size_t i = 0; i < order; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
            throw NotSquare("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                            " entries, expected " + std::to_string(rows.size()));
        std::copy(rows[i].begin(), rows[i].end(), m.a_.begin() + static_cast<std::ptrdiff_t>(i * m.n_));
    }
    return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
    std::vector<std::vector<double>> rows(n_);
    for (std::size_t i = 0; i < n_; ++i) rows[i].assign(row(i).begin(), row(i).end());
    return rows;
}

StochasticMatrix StochasticMatrix::validate(const Matrix& raw, double tol_row) {
    if (raw.order() == 0) throw NotSquare("matrix of order 0");
    Matrix m = raw;
    const std::size_t s = m.order();
    for (std::size_t i = 0; i < s; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            const double v = m(i, j);
            if (!(v >= 0.0) || !std::isfinite(v)) throw NegativeEntry(i, j, v);
            sum += v;
        }
        if (!(std::abs(sum - 1.0) <= tol_row)) throw RowSumViolation(i, sum);
        if (sum != 1.0)
            for (std::size_t j = 0; j < s; ++j) m(i, j) /= sum;
    }
    return StochasticMatrix(std::move(m));
}

StochasticMatrix StochasticMatrix::identity(std::size_t order) {
    return StochasticMatrix(Matrix::identity(order));
}

StochasticMatrix operator*(const StochasticMatrix& lhs, const StochasticMatrix& rhs) {
    if (lhs.order() != rhs.order()) throw OrderMismatch("cannot multiply matrices of different order");
    Matrix out(lhs.order());
    kernels::omp::multiply(lhs.m_.data(), rhs.m_.data(), out.data(), lhs.order());
    return StochasticMatrix(std::move(out));
}

double row_span(const Matrix& m) {
    const std::size_t s = m.order();
    double span = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
        double lo = m(0, j);
        double hi = lo;
        for (std::size_t i = 1; i < s; ++i) {
            lo = std::min(lo, m(i, j));
            hi = std::max(hi, m(i, j));
        }
        span = std::max(span, hi - lo);
    }
    return span;
}

double max_norm_diff(const Matrix& a, const Matrix& b) {
    if (a.order() != b.order()) throw OrderMismatch("max-norm of matrices of different order");
    double d = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
    return d;
}

double max_row_sum_error(const Matrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.order(); ++i) {
        double sum = 0.0;
        for (double v : m.row(i)) sum += v;
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

}  // namespace chainlab
