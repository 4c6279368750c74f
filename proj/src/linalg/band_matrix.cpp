#include "foldcont/linalg/band_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace foldcont {

BandMatrix::BandMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), lower_(std::min(lower, n == 0 ? 0 : n - 1)), upper_(std::min(upper, n == 0 ? 0 : n - 1)),
      data_(n * (lower_ + upper_ + 1), 0.0)
{
}

double BandMatrix::operator()(std::size_t i, std::size_t j) const noexcept
{
    if (!in_band(i, j)) return 0.0;
    return data_[i * width() + (j + lower_ - i)];
}

double& BandMatrix::at(std::size_t i, std::size_t j)
{
    if (i >= n_ || j >= n_ || !in_band(i, j)) throw std::out_of_range("BandMatrix::at outside band");
    return data_[i * width() + (j + lower_ - i)];
}

void BandMatrix::add_to_diagonal(double value)
{
    for (std::size_t i = 0; i < n_; ++i) data_[i * width() + lower_] += value;
}

void BandMatrix::add_to_diagonal(const Vector& values)
{
    if (values.size() != n_) throw std::invalid_argument("BandMatrix::add_to_diagonal: size");
    for (std::size_t i = 0; i < n_; ++i) data_[i * width() + lower_] += values[i];
}

Vector BandMatrix::apply(const Vector& x) const
{
    if (x.size() != n_) throw std::invalid_argument("BandMatrix::apply: size");
    Vector y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= lower_ ? i - lower_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + upper_);
        const double* row = data_.data() + i * width();
        double s = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) s += row[j + lower_ - i] * x[j];
        y[i] = s;
    }
    return y;
}

Vector BandMatrix::apply_transposed(const Vector& x) const
{
    if (x.size() != n_) throw std::invalid_argument("BandMatrix::apply_transposed: size");
    Vector y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= lower_ ? i - lower_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + upper_);
        const double* row = data_.data() + i * width();
        for (std::size_t j = j0; j <= j1; ++j) y[j] += row[j + lower_ - i] * x[i];
    }
    return y;
}

Matrix BandMatrix::to_dense() const
{
    Matrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= lower_ ? i - lower_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + upper_);
        for (std::size_t j = j0; j <= j1; ++j) m(i, j) = (*this)(i, j);
    }
    return m;
}

double BandMatrix::norm_max() const noexcept
{
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double BandMatrix::norm_inf() const noexcept
{
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < width(); ++k) s += std::abs(data_[i * width() + k]);
        m = std::max(m, s);
    }
    return m;
}

bool BandMatrix::is_symmetric(double rel_tol) const noexcept
{
    const double tol = rel_tol * std::max(norm_max(), 1e-300);
    const std::size_t b = std::max(lower_, upper_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j <= std::min(n_ - 1, i + b); ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

}  // namespace foldcont
