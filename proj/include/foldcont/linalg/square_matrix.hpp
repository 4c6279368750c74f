#pragma once

#include "foldcont/linalg/band_matrix.hpp"
#include "foldcont/linalg/matrix.hpp"
#include "foldcont/linalg/vector.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace foldcont {

/// A square matrix in dense or banded storage.
///
/// Jacobians of the planar and Sturm-Liouville maps are dense; grid
/// operators are banded. Algorithms that only need products, solves and
/// spectral information are written against this type.
class SquareMatrix {
public:
    SquareMatrix() = default;
    SquareMatrix(Matrix dense);      // NOLINT(google-explicit-constructor)
    SquareMatrix(BandMatrix band);   // NOLINT(google-explicit-constructor)

    [[nodiscard]] std::size_t size() const noexcept;
    [[nodiscard]] bool is_banded() const noexcept { return std::holds_alternative<BandMatrix>(storage_); }
    [[nodiscard]] const Matrix& dense() const { return std::get<Matrix>(storage_); }
    [[nodiscard]] const BandMatrix& band() const { return std::get<BandMatrix>(storage_); }

    [[nodiscard]] Vector apply(const Vector& x) const;
    [[nodiscard]] Vector apply_transposed(const Vector& x) const;
    [[nodiscard]] Matrix to_dense() const;

    [[nodiscard]] double norm_max() const noexcept;
    [[nodiscard]] double norm_inf() const noexcept;
    [[nodiscard]] bool is_symmetric(double rel_tol = 1e-12) const noexcept;

    /// this - sigma * I
    [[nodiscard]] SquareMatrix shifted(double sigma) const;
    /// this + diag(d)
    [[nodiscard]] SquareMatrix plus_diagonal(const Vector& d) const;

private:
    std::variant<Matrix, BandMatrix> storage_;
};

/// LU factorization with partial pivoting, dense or banded.
///
/// Throws SingularMatrix when a pivot falls below 1e-13 * max|a_ij|.
class LUFactorization {
public:
    static constexpr double kPivotTolerance = 1e-13;

    explicit LUFactorization(const SquareMatrix& a);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] Vector solve(const Vector& b) const;
    [[nodiscard]] int det_sign() const noexcept { return det_sign_; }
    /// Smallest |pivot| relative to max|a|; a cheap conditioning hint.
    [[nodiscard]] double min_relative_pivot() const noexcept { return min_rel_pivot_; }

private:
    void factor_dense(const Matrix& a);
    void factor_band(const BandMatrix& a);

    std::size_t n_ = 0;
    bool banded_ = false;
    std::size_t lower_ = 0;
    std::size_t width_ = 0;  // row window of the banded factor
    std::vector<double> lu_;
    std::vector<std::size_t> pivots_;
    int det_sign_ = 1;
    double min_rel_pivot_ = 0.0;
};

/// Solves A x = b by LU with partial pivoting.
[[nodiscard]] Vector lu_solve(const SquareMatrix& a, const Vector& b);

/// Sign of det(A) from the LU pivot sequence; 0 when the pivot threshold is hit.
[[nodiscard]] int det_sign(const SquareMatrix& a);

/// Solves (A + alpha * phi phi^T) x = b.
///
/// Sherman-Morrison on the factorization of A when A is invertible, with
/// iterative refinement against the perturbed operator; dense LU on the
/// explicitly formed matrix otherwise.
[[nodiscard]] Vector rank_one_solve(const SquareMatrix& a, const Vector& phi, double alpha, const Vector& b);

/// General form: solves (A + alpha * psi phi^T) x = b. rank_one_solve is psi == phi.
[[nodiscard]] Vector rank_one_solve(const SquareMatrix& a, const Vector& psi, const Vector& phi, double alpha,
                                    const Vector& b);

/// Solution of the bordered system [A, c; r^T, d] (x, y) = (f, g).
struct BorderedSolution {
    Vector x;
    double y = 0.0;
};

/// Block elimination on a factorization of A with iterative refinement,
/// falling back to dense LU of the full (n+1)x(n+1) matrix when A is
/// singular or the refinement stalls.
[[nodiscard]] BorderedSolution bordered_solve(const SquareMatrix& a, const Vector& c, const Vector& r, double d,
                                              const Vector& f, double g);

/// Number of negative eigenvalues of a symmetric matrix (Sylvester inertia
/// of an unpivoted LDL^T; the shift is nudged when a pivot is tiny).
[[nodiscard]] std::size_t negative_eigenvalue_count(const SquareMatrix& a);

}  // namespace foldcont
