#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chainlab {

inline constexpr double kDefaultRowTol = 1e-12;

/// Dense square matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t order, double fill = 0.0) : n_(order), a_(order * order, fill) {}

    static Matrix identity(std::size_t order);
    /// Throws NotSquare unless every row has rows.size() entries.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t order() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {a_.data() + i * n_, n_}; }
    std::span<const double> data() const noexcept { return a_; }
    std::span<double> data() noexcept { return a_; }
    std::vector<std::vector<double>> to_rows() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Square nonnegative matrix with unit row sums. Only obtainable through
/// validate() or as a product of stochastic matrices.
class StochasticMatrix {
public:
    /// Rejects negative entries and rows whose sum is more than tol_row away
    /// from 1; rows inside the tolerance are renormalized.
    static StochasticMatrix validate(const Matrix& raw, double tol_row = kDefaultRowTol);
    static StochasticMatrix identity(std::size_t order);

    std::size_t order() const noexcept { return m_.order(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    std::span<const double> row(std::size_t i) const noexcept { return m_.row(i); }
    const Matrix& matrix() const noexcept { return m_; }

    bool operator==(const StochasticMatrix&) const = default;

    /// Left-to-right product lhs * rhs. No renormalization; row sums drift by
    /// at most a few ulps per factor.
    friend StochasticMatrix operator*(const StochasticMatrix& lhs, const StochasticMatrix& rhs);

private:
    explicit StochasticMatrix(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

/// max_j (max_i a_ij - min_i a_ij); zero iff all rows are identical.
double row_span(const Matrix& m);
inline double row_span(const StochasticMatrix& m) { return row_span(m.matrix()); }

/// Max-norm of the difference, max_ij |a_ij - b_ij|. Throws OrderMismatch.
double max_norm_diff(const Matrix& a, const Matrix& b);
inline double max_norm_diff(const StochasticMatrix& a, const StochasticMatrix& b) {
    return max_norm_diff(a.matrix(), b.matrix());
}

double max_row_sum_error(const Matrix& m);

}  // namespace chainlab
