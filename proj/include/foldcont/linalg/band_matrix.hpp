#pragma once

#include "foldcont/linalg/matrix.hpp"
#include "foldcont/linalg/vector.hpp"

#include <cstddef>
#include <vector>

namespace foldcont {

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
///
/// Row-wise storage: row i keeps columns i-lower .. i+upper. Grid
/// Laplacians and Sturm-Liouville operators live here; everything that
/// needs dense algebra goes through to_dense().
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(std::size_t n, std::size_t lower, std::size_t upper);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t lower() const noexcept { return lower_; }
    [[nodiscard]] std::size_t upper() const noexcept { return upper_; }

    [[nodiscard]] bool in_band(std::size_t i, std::size_t j) const noexcept
    {
        return j + lower_ >= i && j <= i + upper_;
    }

    /// Zero outside the band.
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept;
    /// Reference to an in-band entry; throws std::out_of_range outside it.
    double& at(std::size_t i, std::size_t j);

    void add_to_diagonal(double value);
    void add_to_diagonal(const Vector& values);

    [[nodiscard]] Vector apply(const Vector& x) const;
    [[nodiscard]] Vector apply_transposed(const Vector& x) const;
    [[nodiscard]] Matrix to_dense() const;

    [[nodiscard]] double norm_max() const noexcept;
    [[nodiscard]] double norm_inf() const noexcept;
    [[nodiscard]] bool is_symmetric(double rel_tol = 1e-12) const noexcept;

private:
    [[nodiscard]] std::size_t width() const noexcept { return lower_ + upper_ + 1; }

    std::size_t n_ = 0;
    std::size_t lower_ = 0;
    std::size_t upper_ = 0;
    std::vector<double> data_;
};

}  // namespace foldcont
