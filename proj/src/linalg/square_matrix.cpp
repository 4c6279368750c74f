#include "foldcont/linalg/square_matrix.hpp"

#include "foldcont/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace foldcont {

SquareMatrix::SquareMatrix(Matrix dense) : storage_(std::move(dense))
{
    if (!std::get<Matrix>(storage_).is_square()) throw std::invalid_argument("SquareMatrix: not square");
}

SquareMatrix::SquareMatrix(BandMatrix band) : storage_(std::move(band)) {}

std::size_t SquareMatrix::size() const noexcept
{
    return std::visit([](const auto& m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Matrix>)
            return m.rows();
        else
            return m.size();
    }, storage_);
}

Vector SquareMatrix::apply(const Vector& x) const
{
    if (is_banded()) return band().apply(x);
    return dense() * x;
}

Vector SquareMatrix::apply_transposed(const Vector& x) const
{
    if (is_banded()) return band().apply_transposed(x);
    const Matrix& a = dense();
    if (x.size() != a.rows()) throw std::invalid_argument("apply_transposed: size");
    Vector y(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
    return y;
}

Matrix SquareMatrix::to_dense() const { return is_banded() ? band().to_dense() : dense(); }

double SquareMatrix::norm_max() const noexcept { return is_banded() ? band().norm_max() : dense().norm_max(); }

double SquareMatrix::norm_inf() const noexcept { return is_banded() ? band().norm_inf() : dense().norm_inf(); }

bool SquareMatrix::is_symmetric(double rel_tol) const noexcept
{
    return is_banded() ? band().is_symmetric(rel_tol) : dense().is_symmetric(rel_tol);
}

SquareMatrix SquareMatrix::shifted(double sigma) const
{
    if (is_banded()) {
        BandMatrix b = band();
        b.add_to_diagonal(-sigma);
        return b;
    }
    Matrix m = dense();
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) -= sigma;
    return m;
}

SquareMatrix SquareMatrix::plus_diagonal(const Vector& d) const
{
    if (d.size() != size()) throw std::invalid_argument("plus_diagonal: size");
    if (is_banded()) {
        BandMatrix b = band();
        b.add_to_diagonal(d);
        return b;
    }
    Matrix m = dense();
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += d[i];
    return m;
}

// ---------------------------------------------------------------------------

LUFactorization::LUFactorization(const SquareMatrix& a) : n_(a.size()), banded_(a.is_banded())
{
    if (banded_)
        factor_band(a.band());
    else
        factor_dense(a.dense());
}

void LUFactorization::factor_dense(const Matrix& a)
{
    const std::size_t n = n_;
    lu_ = a.values();
    pivots_.assign(n, 0);
    det_sign_ = 1;
    const double scale = a.norm_max();
    if (n == 0) return;
    if (scale == 0.0) throw SingularMatrix("LU: zero matrix");
    const double tol = kPivotTolerance * scale;
    min_rel_pivot_ = 1.0e300;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_[i * n + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        pivots_[k] = p;
        if (best <= tol) throw SingularMatrix("LU: pivot below threshold");
        min_rel_pivot_ = std::min(min_rel_pivot_, best / scale);
        if (p != k) {
            std::swap_ranges(lu_.begin() + static_cast<std::ptrdiff_t>(k * n),
                             lu_.begin() + static_cast<std::ptrdiff_t>((k + 1) * n),
                             lu_.begin() + static_cast<std::ptrdiff_t>(p * n));
            det_sign_ = -det_sign_;
        }
        const double piv = lu_[k * n + k];
        if (piv < 0) det_sign_ = -det_sign_;
        for (std::size_t i = k + 1; i < n; ++i) {
            double& l = lu_[i * n + k];
            if (l == 0.0) continue;
            l /= piv;
            const double* urow = lu_.data() + k * n;
            double* row = lu_.data() + i * n;
            for (std::size_t j = k + 1; j < n; ++j) row[j] -= l * urow[j];
        }
    }
}

// Column-major band storage as in LAPACK gbtrf: entry (i, j) sits at
// j * width_ + (kv + i - j) with kv = lower + upper, leaving room for the
// fill-in produced by row interchanges.
void LUFactorization::factor_band(const BandMatrix& a)
{
    const std::size_t n = n_;
    const std::size_t kl = a.lower();
    const std::size_t ku = a.upper();
    const std::size_t kv = kl + ku;
    lower_ = kl;
    width_ = 2 * kl + ku + 1;
    lu_.assign(n * width_, 0.0);
    pivots_.assign(n, 0);
    det_sign_ = 1;
    const double scale = a.norm_max();
    if (n == 0) return;
    if (scale == 0.0) throw SingularMatrix("LU: zero matrix");
    const double tol = kPivotTolerance * scale;
    min_rel_pivot_ = 1.0e300;

    auto at = [&](std::size_t i, std::size_t j) -> double& { return lu_[j * width_ + (kv + i - j)]; };
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = i >= kl ? i - kl : 0;
        const std::size_t j1 = std::min(n - 1, i + ku);
        for (std::size_t j = j0; j <= j1; ++j) at(i, j) = a(i, j);
    }

    std::size_t ju = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t km = std::min(kl, n - 1 - j);
        std::size_t p = 0;
        double best = std::abs(at(j, j));
        for (std::size_t r = 1; r <= km; ++r) {
            const double v = std::abs(at(j + r, j));
            if (v > best) {
                best = v;
                p = r;
            }
        }
        pivots_[j] = j + p;
        if (best <= tol) throw SingularMatrix("band LU: pivot below threshold");
        min_rel_pivot_ = std::min(min_rel_pivot_, best / scale);
        ju = std::max(ju, std::min(j + ku + p, n - 1));
        if (p != 0) {
            for (std::size_t c = j; c <= ju; ++c) std::swap(at(j, c), at(j + p, c));
            det_sign_ = -det_sign_;
        }
        const double piv = at(j, j);
        if (piv < 0) det_sign_ = -det_sign_;
        for (std::size_t r = 1; r <= km; ++r) at(j + r, j) /= piv;
        for (std::size_t c = j + 1; c <= ju; ++c) {
            const double u = at(j, c);
            if (u == 0.0) continue;
            for (std::size_t r = 1; r <= km; ++r) at(j + r, c) -= at(j + r, j) * u;
        }
    }
}

Vector LUFactorization::solve(const Vector& b) const
{
    if (b.size() != n_) throw std::invalid_argument("LU solve: size mismatch");
    const std::size_t n = n_;
    Vector x = b;
    if (!banded_) {
        // rows were swapped across the full width, so L is stored in the
        // final permuted order
        for (std::size_t k = 0; k < n; ++k)
            if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
        for (std::size_t k = 0; k < n; ++k) {
            const double xk = x[k];
            if (xk == 0.0) continue;
            for (std::size_t i = k + 1; i < n; ++i) x[i] -= lu_[i * n + k] * xk;
        }
        for (std::size_t k = n; k-- > 0;) {
            const double* row = lu_.data() + k * n;
            double s = x[k];
            for (std::size_t j = k + 1; j < n; ++j) s -= row[j] * x[j];
            x[k] = s / row[k];
        }
        return x;
    }

    const std::size_t kl = lower_;
    const std::size_t kv = width_ - 1 - kl;
    auto at = [&](std::size_t i, std::size_t j) { return lu_[j * width_ + (kv + i - j)]; };
    for (std::size_t j = 0; j < n; ++j) {
        if (pivots_[j] != j) std::swap(x[j], x[pivots_[j]]);
        const std::size_t km = std::min(kl, n - 1 - j);
        const double xj = x[j];
        if (xj == 0.0) continue;
        for (std::size_t r = 1; r <= km; ++r) x[j + r] -= at(j + r, j) * xj;
    }
    for (std::size_t j = n; j-- > 0;) {
        x[j] /= at(j, j);
        const double xj = x[j];
        if (xj == 0.0) continue;
        const std::size_t i0 = j >= kv ? j - kv : 0;
        for (std::size_t i = i0; i < j; ++i) x[i] -= at(i, j) * xj;
    }
    return x;
}

Vector lu_solve(const SquareMatrix& a, const Vector& b) { return LUFactorization(a).solve(b); }

int det_sign(const SquareMatrix& a)
{
    try {
        return LUFactorization(a).det_sign();
    } catch (const SingularMatrix&) {
        return 0;
    }
}

// ---------------------------------------------------------------------------

namespace {

Matrix explicit_rank_one(const SquareMatrix& a, const Vector& psi, const Vector& phi, double alpha)
{
    Matrix m = a.to_dense();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += alpha * psi[i] * phi[j];
    return m;
}

Vector rank_one_apply(const SquareMatrix& a, const Vector& psi, const Vector& phi, double alpha, const Vector& x)
{
    Vector y = a.apply(x);
    y.axpy(alpha * dot(phi, x), psi);
    return y;
}

}  // namespace

Vector rank_one_solve(const SquareMatrix& a, const Vector& phi, double alpha, const Vector& b)
{
    return rank_one_solve(a, phi, phi, alpha, b);
}

Vector rank_one_solve(const SquareMatrix& a, const Vector& psi, const Vector& phi, double alpha, const Vector& b)
{
    const std::size_t n = a.size();
    if (psi.size() != n || phi.size() != n || b.size() != n)
        throw std::invalid_argument("rank_one_solve: size mismatch");
    const double bnorm = std::max(norm_inf(b), 1e-300);
    const double anorm = a.norm_inf() + std::abs(alpha) * norm_inf(psi) * norm_inf(phi);

    // Sherman-Morrison is unreliable when A itself is close to singular,
    // which is exactly the fold case; the threshold routes those to the
    // explicit factorization.
    try {
        const LUFactorization lu(a);
        if (lu.min_relative_pivot() > 1e-8) {
            const Vector z = lu.solve(psi);
            const double denom = 1.0 + alpha * dot(phi, z);
            if (std::abs(denom) > 1e-10 * (1.0 + std::abs(alpha) * norm2(phi) * norm2(z))) {
                auto sm = [&](const Vector& rhs) {
                    Vector y = lu.solve(rhs);
                    y.axpy(-alpha * dot(phi, y) / denom, z);
                    return y;
                };
                Vector x = sm(b);
                for (int it = 0; it < 3; ++it) {
                    const Vector r = b - rank_one_apply(a, psi, phi, alpha, x);
                    if (norm_inf(r) <= 1e-14 * (anorm * norm_inf(x) + bnorm)) return x;
                    x += sm(r);
                }
                const Vector r = b - rank_one_apply(a, psi, phi, alpha, x);
                if (norm_inf(r) <= 1e-11 * (anorm * norm_inf(x) + bnorm)) return x;
            }
        }
    } catch (const SingularMatrix&) {
    }
    return LUFactorization(SquareMatrix(explicit_rank_one(a, psi, phi, alpha))).solve(b);
}

BorderedSolution bordered_solve(const SquareMatrix& a, const Vector& c, const Vector& r, double d, const Vector& f,
                                double g)
{
    const std::size_t n = a.size();
    if (c.size() != n || r.size() != n || f.size() != n) throw std::invalid_argument("bordered_solve: size mismatch");

    auto residual = [&](const BorderedSolution& s, Vector& rf, double& rg) {
        rf = f - a.apply(s.x);
        rf.axpy(-s.y, c);
        rg = g - dot(r, s.x) - d * s.y;
    };
    const double scale = a.norm_inf() + norm_inf(c) + norm_inf(r) + std::abs(d);
    const double rhs = std::max(norm_inf(f), std::abs(g));

    try {
        const LUFactorization lu(a);
        if (lu.min_relative_pivot() > 1e-9) {
            const Vector w = lu.solve(c);
            const double schur = d - dot(r, w);
            if (std::abs(schur) > 1e-10 * (std::abs(d) + norm2(r) * norm2(w))) {
                auto block = [&](const Vector& ff, double gg) {
                    const Vector v = lu.solve(ff);
                    BorderedSolution s;
                    s.y = (gg - dot(r, v)) / schur;
                    s.x = v - s.y * w;
                    return s;
                };
                BorderedSolution s = block(f, g);
                Vector rf;
                double rg = 0.0;
                for (int it = 0; it < 3; ++it) {
                    residual(s, rf, rg);
                    const double size = scale * std::max(norm_inf(s.x), std::abs(s.y)) + rhs;
                    if (std::max(norm_inf(rf), std::abs(rg)) <= 1e-14 * size) return s;
                    const BorderedSolution ds = block(rf, rg);
                    s.x += ds.x;
                    s.y += ds.y;
                }
                residual(s, rf, rg);
                const double size = scale * std::max(norm_inf(s.x), std::abs(s.y)) + rhs;
                if (std::max(norm_inf(rf), std::abs(rg)) <= 1e-11 * size) return s;
            }
        }
    } catch (const SingularMatrix&) {
    }

    Matrix m(n + 1, n + 1);
    const Matrix ad = a.to_dense();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = ad(i, j);
        m(i, n) = c[i];
        m(n, i) = r[i];
    }
    m(n, n) = d;
    const Vector z = LUFactorization(SquareMatrix(std::move(m))).solve(append(f, g));
    BorderedSolution s;
    s.x = Vector(std::vector<double>(z.begin(), z.end() - 1));
    s.y = z[n];
    return s;
}

// ---------------------------------------------------------------------------

namespace {

// Unpivoted symmetric elimination on the lower band; returns false when a
// pivot is too small to trust its sign.
bool ldlt_negative_count(const SquareMatrix& a, double shift, std::size_t& negatives)
{
    const std::size_t n = a.size();
    const std::size_t b = a.is_banded() ? std::max(a.band().lower(), a.band().upper()) : (n == 0 ? 0 : n - 1);
    const std::size_t w = b + 1;
    std::vector<double> low(n * w, 0.0);  // low[i*w + (i-j)] = a_ij, j <= i
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = i >= b ? i - b : 0;
        for (std::size_t j = j0; j <= i; ++j) {
            const double v = a.is_banded() ? a.band()(i, j) : a.dense()(i, j);
            low[i * w + (i - j)] = v;
        }
        low[i * w] += shift;
    }
    const double tiny = 1e-13 * std::max(a.norm_inf(), 1e-300);
    negatives = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dk = low[k * w];
        if (std::abs(dk) <= tiny || !std::isfinite(dk)) return false;
        if (dk < 0) ++negatives;
        const std::size_t i1 = std::min(n - 1, k + b);
        for (std::size_t i = k + 1; i <= i1; ++i) {
            const double aik = low[i * w + (i - k)];
            if (aik == 0.0) continue;
            const double lik = aik / dk;
            for (std::size_t j = k + 1; j <= i; ++j) low[i * w + (i - j)] -= lik * low[j * w + (j - k)];
        }
    }
    return true;
}

}  // namespace

std::size_t negative_eigenvalue_count(const SquareMatrix& a)
{
    if (!a.is_symmetric(1e-10)) throw NotSymmetric("negative_eigenvalue_count: matrix is not symmetric");
    std::size_t neg = 0;
    const double scale = std::max(a.norm_inf(), 1e-300);
    double shift = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        if (ldlt_negative_count(a, shift, neg)) return neg;
        shift = scale * 1e-11 * std::pow(4.0, attempt);
    }
    throw NoConvergence("negative_eigenvalue_count: no usable pivot sequence");
}

}  // namespace foldcont
