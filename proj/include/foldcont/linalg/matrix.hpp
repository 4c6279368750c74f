#pragma once

#include "foldcont/linalg/vector.hpp"

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace foldcont {

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] const std::vector<double>& values() const noexcept { return data_; }

    [[nodiscard]] Vector row(std::size_t i) const;
    [[nodiscard]] Vector column(std::size_t j) const;
    void set_column(std::size_t j, const Vector& v);

    [[nodiscard]] Matrix transposed() const;

    /// max |a_ij|
    [[nodiscard]] double norm_max() const noexcept;
    [[nodiscard]] double norm_frobenius() const noexcept;
    /// max row sum; bounds the spectral norm of symmetric matrices.
    [[nodiscard]] double norm_inf() const noexcept;

    /// Relative symmetry check: |a_ij - a_ji| <= rel_tol * max|a|.
    [[nodiscard]] bool is_symmetric(double rel_tol = 1e-12) const noexcept;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    friend Vector operator*(const Matrix& a, const Vector& x);
    friend Matrix operator*(const Matrix& a, const Matrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a * b^T
[[nodiscard]] Matrix outer(const Vector& a, const Vector& b);

}  // namespace foldcont
