#pragma once

#include "foldcont/linalg/matrix.hpp"
#include "foldcont/linalg/square_matrix.hpp"
#include "foldcont/linalg/vector.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace foldcont {

/// A real eigenvalue with a unit-norm eigenvector.
struct EigenPair {
    double value = 0.0;
    Vector vector;
};

/// Full spectrum of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. Eigenvectors are orthonormal; each is signed so that its
/// first non-negligible coordinate is positive.
///
/// Throws NotSymmetric when the relative symmetry check fails and
/// NoConvergence if the sweeps do not drive the off-diagonal mass below
/// 1e-12 * ||A||_F.
[[nodiscard]] std::vector<EigenPair> sym_eigen(const Matrix& a);

/// Eigenpair nearest the shift (hint->value, or 0 without hint) by shifted
/// block inverse iteration.
///
/// The eigenvector is oriented so that <phi, hint->vector> >= 0, or with
/// first non-negligible coordinate positive when no hint is given; this
/// keeps phi continuous along continuation branches. Throws NoConvergence
/// after 200 iterations.
[[nodiscard]] EigenPair smallest_magnitude_eigenpair(const SquareMatrix& a,
                                                     const std::optional<EigenPair>& hint = std::nullopt);

/// The `count` eigenpairs of a symmetric matrix nearest to `shift`, sorted
/// ascending by value. `start` (optional) holds warm-start vectors.
struct SubspaceResult {
    std::vector<EigenPair> pairs;
    std::size_t iterations = 0;
};

[[nodiscard]] SubspaceResult eigenpairs_near(const SquareMatrix& a, double shift, std::size_t count,
                                             const std::vector<Vector>& start = {}, double rel_tol = 1e-10,
                                             std::size_t max_iter = 500);

/// The `count` algebraically smallest eigenpairs of a symmetric matrix.
[[nodiscard]] SubspaceResult lowest_eigenpairs(const SquareMatrix& a, std::size_t count,
                                               const std::vector<Vector>& start = {}, double rel_tol = 1e-10);

/// Orients v so that its first coordinate with |v_i| > 1e-8 ||v||_inf is positive.
void canonical_sign(Vector& v);

}  // namespace foldcont
