#include "foldcont/linalg/eigen.hpp"

#include "foldcont/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace foldcont {

void canonical_sign(Vector& v)
{
    const double m = norm_inf(v);
    for (double x : v) {
        if (std::abs(x) > 1e-8 * m) {
            if (x < 0) v *= -1.0;
            return;
        }
    }
}

std::vector<EigenPair> sym_eigen(const Matrix& a)
{
    if (!a.is_square() || !a.is_symmetric()) throw NotSymmetric("sym_eigen: matrix is not symmetric");
    const std::size_t n = a.rows();
    Matrix m = a;
    Matrix v = Matrix::identity(n);
    const double target = 1e-12 * std::max(a.norm_frobenius(), 1e-300);

    auto off = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * m(i, j) * m(i, j);
        return std::sqrt(s);
    };

    bool converged = off() <= target;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        converged = off() <= target;
    }
    if (!converged) throw NoConvergence("sym_eigen: Jacobi sweeps did not converge");

    std::vector<EigenPair> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].value = m(i, i);
        out[i].vector = v.column(i);
        canonical_sign(out[i].vector);
    }
    std::stable_sort(out.begin(), out.end(), [](const EigenPair& x, const EigenPair& y) { return x.value < y.value; });
    return out;
}

namespace {

// Modified Gram-Schmidt, applied twice; drops columns that vanish.
std::vector<Vector> orthonormalize(std::vector<Vector> cols)
{
    std::vector<Vector> q;
    for (auto& c : cols) {
        const double n0 = norm2(c);
        if (n0 == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& e : q) c.axpy(-dot(e, c), e);
        const double n1 = norm2(c);
        if (n1 <= 1e-10 * n0) continue;
        q.push_back(c / n1);
    }
    return q;
}

std::vector<Vector> seeded_block(std::size_t n, std::size_t m, const std::vector<Vector>& start)
{
    std::vector<Vector> x;
    for (const auto& s : start)
        if (s.size() == n && x.size() < m) x.push_back(s);
    std::mt19937_64 rng(0x5eedULL + n);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    while (x.size() < m + 2) {
        Vector v(n);
        for (auto& e : v) e = dist(rng);
        x.push_back(v);
    }
    return x;
}

struct Ritz {
    double value;
    Vector vector;
    double residual;
};

// Shifted block inverse iteration with Rayleigh-Ritz on a symmetric matrix.
// Returns Ritz pairs sorted by distance to the shift.
std::vector<Ritz> inverse_subspace(const SquareMatrix& a, double shift, std::size_t count, std::size_t block,
                                   const std::vector<Vector>& start, double rel_tol, std::size_t max_iter,
                                   std::size_t& iterations)
{
    const std::size_t n = a.size();
    const double anorm = std::max(a.norm_inf(), 1e-300);

    std::optional<LUFactorization> lu;
    double sigma = shift;
    // A shift sitting on an eigenvalue makes the solves pure noise; move it
    // off by a little. Ritz values come from A itself, so nothing is lost.
    for (int attempt = 0; attempt < 6 && !lu; ++attempt) {
        try {
            lu.emplace(a.shifted(sigma));
            if (lu->min_relative_pivot() < 1e-10 && attempt < 5) lu.reset();
        } catch (const SingularMatrix&) {
        }
        if (!lu) sigma = shift + anorm * 1e-8 * std::pow(10.0, attempt);
    }
    if (!lu) throw NoConvergence("inverse_subspace: shifted operator stays singular");

    std::vector<Vector> x = orthonormalize(seeded_block(n, block, start));
    if (x.size() > block) x.resize(block);
    std::vector<Ritz> ritz;
    for (iterations = 1; iterations <= max_iter; ++iterations) {
        std::vector<Vector> y;
        y.reserve(x.size());
        for (const auto& v : x) y.push_back(lu->solve(v));
        y = orthonormalize(std::move(y));
        const std::size_t m = y.size();
        std::vector<Vector> ay;
        ay.reserve(m);
        for (const auto& v : y) ay.push_back(a.apply(v));
        Matrix h(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                const double hij = 0.5 * (dot(y[i], ay[j]) + dot(y[j], ay[i]));
                h(i, j) = hij;
                h(j, i) = hij;
            }
        const auto small = sym_eigen(h);
        ritz.clear();
        x.clear();
        for (const auto& p : small) {
            Vector v(n);
            Vector av(n);
            for (std::size_t j = 0; j < m; ++j) {
                v.axpy(p.vector[j], y[j]);
                av.axpy(p.vector[j], ay[j]);
            }
            const double nv = norm2(v);
            v /= nv;
            av /= nv;
            av.axpy(-p.value, v);
            ritz.push_back({p.value, v, norm2(av)});
            x.push_back(v);
        }
        std::stable_sort(ritz.begin(), ritz.end(), [&](const Ritz& r1, const Ritz& r2) {
            return std::abs(r1.value - shift) < std::abs(r2.value - shift);
        });
        bool done = ritz.size() >= count;
        for (std::size_t i = 0; i < std::min(count, ritz.size()); ++i)
            done = done && ritz[i].residual <= rel_tol * anorm;
        if (done) return ritz;
    }
    throw NoConvergence("inverse_subspace: no convergence within iteration budget");
}

}  // namespace

EigenPair smallest_magnitude_eigenpair(const SquareMatrix& a, const std::optional<EigenPair>& hint)
{
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("smallest_magnitude_eigenpair: empty matrix");
    if (!a.is_symmetric(1e-10)) throw NotSymmetric("smallest_magnitude_eigenpair: matrix is not symmetric");
    const double shift = hint ? hint->value : 0.0;
    if (!a.is_banded() && n <= 12) {
        // small dense problems: the full spectrum is cheaper and exact
        auto all = sym_eigen(a.dense());
        auto it = std::min_element(all.begin(), all.end(), [&](const EigenPair& p, const EigenPair& q) {
            return std::abs(p.value - shift) < std::abs(q.value - shift);
        });
        EigenPair out = *it;
        if (hint && hint->vector.size() == n && dot(out.vector, hint->vector) < 0) out.vector *= -1.0;
        return out;
    }
    std::vector<Vector> start;
    if (hint && hint->vector.size() == n) start.push_back(hint->vector);
    std::size_t iters = 0;
    const auto ritz = inverse_subspace(a, shift, 1, std::min<std::size_t>(n, 4), start, 1e-12, 200, iters);
    EigenPair out{ritz.front().value, ritz.front().vector};
    if (hint && hint->vector.size() == n) {
        if (dot(out.vector, hint->vector) < 0) out.vector *= -1.0;
    } else {
        canonical_sign(out.vector);
    }
    return out;
}

SubspaceResult eigenpairs_near(const SquareMatrix& a, double shift, std::size_t count, const std::vector<Vector>& start,
                               double rel_tol, std::size_t max_iter)
{
    const std::size_t n = a.size();
    if (count == 0 || n == 0) return {};
    if (!a.is_symmetric(1e-10)) throw NotSymmetric("eigenpairs_near: matrix is not symmetric");
    count = std::min(count, n);
    SubspaceResult res;
    if (!a.is_banded() && n <= 40) {
        auto all = sym_eigen(a.to_dense());
        std::stable_sort(all.begin(), all.end(), [&](const EigenPair& p, const EigenPair& q) {
            return std::abs(p.value - shift) < std::abs(q.value - shift);
        });
        all.resize(count);
        res.pairs = std::move(all);
        res.iterations = 0;
    } else {
        const std::size_t block = std::min(n, count + std::max<std::size_t>(4, count / 2));
        const auto ritz = inverse_subspace(a, shift, count, block, start, rel_tol, max_iter, res.iterations);
        for (std::size_t i = 0; i < count; ++i) {
            EigenPair p{ritz[i].value, ritz[i].vector};
            canonical_sign(p.vector);
            res.pairs.push_back(std::move(p));
        }
    }
    std::stable_sort(res.pairs.begin(), res.pairs.end(),
                     [](const EigenPair& p, const EigenPair& q) { return p.value < q.value; });
    return res;
}

SubspaceResult lowest_eigenpairs(const SquareMatrix& a, std::size_t count, const std::vector<Vector>& start,
                                 double rel_tol)
{
    const std::size_t n = a.size();
    if (n == 0) return {};
    // Gershgorin lower bound: every eigenvalue lies above it, so the pairs
    // nearest to it are the lowest ones.
    double lo = 1e300;
    const Matrix* dense = a.is_banded() ? nullptr : &a.dense();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        double diag = 0.0;
        const std::size_t j0 = a.is_banded() ? (i >= a.band().lower() ? i - a.band().lower() : 0) : 0;
        const std::size_t j1 = a.is_banded() ? std::min(n - 1, i + a.band().upper()) : n - 1;
        for (std::size_t j = j0; j <= j1; ++j) {
            const double v = dense ? (*dense)(i, j) : a.band()(i, j);
            if (j == i)
                diag = v;
            else
                radius += std::abs(v);
        }
        lo = std::min(lo, diag - radius);
    }
    const double shift = lo - 1e-6 * std::max(a.norm_inf(), 1.0);
    return eigenpairs_near(a, shift, count, start, rel_tol);
}

}  // namespace foldcont
