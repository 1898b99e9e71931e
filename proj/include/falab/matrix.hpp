#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace falab {

/// Dense row-major matrix of doubles. Sized at construction; all math in
/// this project runs in 64-bit floating point.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
    const double* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * cols_; }

    std::span<const double> row_span(int i) const { return {row(i), static_cast<std::size_t>(cols_)}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool operator==(const Matrix& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// out = a * b
void matmul(const Matrix& a, const Matrix& b, Matrix& out);

/// out = transpose(a) * b
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out);

/// Sum of squared entries.
double squared_norm(const Matrix& m);

/// True if every entry is finite.
bool all_finite(const Matrix& m);

}  // namespace falab
