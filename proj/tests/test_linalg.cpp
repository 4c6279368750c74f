#include "foldcont/linalg.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace foldcont;

namespace {

Matrix sl_matrix(std::size_t n)
{
    const double h = std::numbers::pi / static_cast<double>(n + 1);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = 2.0 / (h * h);
        if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -1.0 / (h * h);
    }
    return a;
}

Matrix random_symmetric(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> d;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = d(rng);
    return a;
}

Vector random_vector(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> d;
    Vector v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

double backward_error(const SquareMatrix& a, const Vector& x, const Vector& b)
{
    return norm_inf(a.apply(x) - b) / (a.norm_inf() * norm_inf(x) + norm_inf(b));
}

}  // namespace

TEST_CASE("vector rejects non-finite entries")
{
    CHECK_THROWS_AS(Vector({1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(Vector(std::vector<double>{INFINITY}), std::invalid_argument);
    CHECK(norm2(Vector{3.0, 4.0}) == doctest::Approx(5.0));
    CHECK(norm2(Vector{3e200, 4e200}) == doctest::Approx(5e200));
}

TEST_CASE("lu_solve small cases")
{
    const Vector x = lu_solve(Matrix::identity(3), Vector{1, 2, 3});
    CHECK(x == Vector{1, 2, 3});
    const Vector y = lu_solve(Matrix::from_rows({{2, 0}, {0, 4}}), Vector{2, 8});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)lu_solve(Matrix::from_rows({{1, 2}, {2, 4}}), Vector{1, 1}), SingularMatrix);
}

TEST_CASE("two-point problem in the positive orthant")
{
    // A^h - 4 I with g = -1000 sin(x_i); both grid nodes sit at sin = sqrt(3)/2
    Matrix a = sl_matrix(2);
    for (std::size_t i = 0; i < 2; ++i) a(i, i) -= 4.0;
    const double s = std::sin(std::numbers::pi / 3.0);
    const Vector x = lu_solve(a, Vector{-1000.0 * s, -1000.0 * s});
    CHECK(x[0] == doctest::Approx(280.4396).epsilon(0).scale(1).epsilon(1e-3 / 280.0));
    CHECK(std::abs(x[1] - 280.4396) < 1e-3);
    CHECK(std::abs(x[0] - x[1]) < 1e-12);
}

TEST_CASE("det_sign")
{
    CHECK(det_sign(Matrix::identity(2)) == 1);
    CHECK(det_sign(Matrix::diagonal(Vector{1, -1})) == -1);
    CHECK(det_sign(Matrix::from_rows({{1, 1}, {1, 1}})) == 0);

    // parity of eigenvalues of A^h below 4, from the closed form
    const double h = std::numbers::pi / 3.0;
    int below = 0;
    for (int k = 1; k <= 2; ++k)
        if ((2.0 / (h * h)) * (1.0 - std::cos(k * h)) < 4.0) ++below;
    Matrix a = sl_matrix(2);
    for (std::size_t i = 0; i < 2; ++i) a(i, i) -= 4.0;
    CHECK(det_sign(a) == (below % 2 == 0 ? 1 : -1));
}

TEST_CASE("band LU agrees with dense LU")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> d;
    const std::size_t n = 60;
    BandMatrix b(n, 3, 5);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i >= 3 ? i - 3 : 0); j <= std::min(n - 1, i + 5); ++j) b.at(i, j) = d(rng);
    const Vector rhs = random_vector(n, rng);
    const SquareMatrix sb(b);
    const Vector xb = lu_solve(sb, rhs);
    const Vector xd = lu_solve(SquareMatrix(b.to_dense()), rhs);
    CHECK(distance_inf(xb, xd) <= 1e-9 * norm_inf(xd));
    CHECK(backward_error(sb, xb, rhs) < 1e-10);
    CHECK(det_sign(sb) == det_sign(SquareMatrix(b.to_dense())));
    CHECK(distance_inf(b.apply_transposed(rhs), b.to_dense().transposed() * rhs) < 1e-12 * norm_inf(rhs) * 10);
}

TEST_CASE("sym_eigen spectra")
{
    const auto d = sym_eigen(Matrix::diagonal(Vector{3, 1, 2}));
    REQUIRE(d.size() == 3);
    CHECK(d[0].value == doctest::Approx(1.0));
    CHECK(d[1].value == doctest::Approx(2.0));
    CHECK(d[2].value == doctest::Approx(3.0));

    const auto two = sym_eigen(sl_matrix(2));
    CHECK(std::abs(two[0].value - 0.9119) < 1e-4);
    CHECK(std::abs(two[1].value - 2.7357) < 1e-4);

    const std::size_t n = 15;
    const double h = std::numbers::pi / 16.0;
    const auto e = sym_eigen(sl_matrix(n));
    for (std::size_t k = 1; k <= n; ++k)
        CHECK(std::abs(e[k - 1].value - (2.0 / (h * h)) * (1.0 - std::cos(static_cast<double>(k) * h))) < 1e-10);

    CHECK_THROWS_AS((void)sym_eigen(Matrix::from_rows({{1, 2}, {0, 1}})), NotSymmetric);
}

TEST_CASE("sym_eigen reconstruction and orthogonality on random matrices")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 12);
        const Matrix a = random_symmetric(n, rng);
        const auto pairs = sym_eigen(a);
        Matrix q(n, n);
        Matrix lam(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            q.set_column(k, pairs[k].vector);
            lam(k, k) = pairs[k].value;
            if (k > 0) CHECK(pairs[k - 1].value <= pairs[k].value);
        }
        CHECK((q * lam * q.transposed() - a).norm_frobenius() <= 1e-9 * a.norm_frobenius());
        CHECK((q.transposed() * q - Matrix::identity(n)).norm_max() <= 1e-10);

        // det sign is the product of eigenvalue signs
        int sign = 1;
        bool near_zero = false;
        for (const auto& p : pairs) {
            if (std::abs(p.value) < 1e-12) near_zero = true;
            if (p.value < 0) sign = -sign;
        }
        if (!near_zero) CHECK(det_sign(a) == sign);

        std::size_t negatives = 0;
        for (const auto& p : pairs) negatives += p.value < 0 ? 1 : 0;
        CHECK(negative_eigenvalue_count(a) == negatives);

        double best = pairs[0].value;
        for (const auto& p : pairs)
            if (std::abs(p.value) < std::abs(best)) best = p.value;
        CHECK(std::abs(smallest_magnitude_eigenpair(a).value - best) <= 1e-9 * std::max(1.0, a.norm_inf()));
    }
}

TEST_CASE("smallest magnitude eigenpair")
{
    const EigenPair p = smallest_magnitude_eigenpair(Matrix::diagonal(Vector{5, -0.1, 3}));
    CHECK(p.value == doctest::Approx(-0.1));
    CHECK(distance(p.vector, Vector{0, 1, 0}) < 1e-10);

    Matrix a = sl_matrix(15);
    for (std::size_t i = 0; i < 15; ++i) a(i, i) -= 19.1248;
    const auto all = sym_eigen(a);
    double best = all[0].value;
    for (const auto& q : all)
        if (std::abs(q.value) < std::abs(best)) best = q.value;
    const EigenPair s = smallest_magnitude_eigenpair(a);
    CHECK(std::abs(s.value - best) < 1e-9);
    CHECK(norm2(a * s.vector - s.value * s.vector) <= 1e-10 * a.norm_inf());

    // hint orientation is respected
    EigenPair hint{s.value, -1.0 * s.vector};
    const EigenPair t = smallest_magnitude_eigenpair(a, hint);
    CHECK(dot(t.vector, hint.vector) > 0);
}

TEST_CASE("banded eigenpairs against dense spectra")
{
    const std::size_t n = 120;
    const double h = std::numbers::pi / static_cast<double>(n + 1);
    BandMatrix b(n, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        b.at(i, i) = 2.0 / (h * h) - 30.0;
        if (i + 1 < n) b.at(i, i + 1) = b.at(i + 1, i) = -1.0 / (h * h);
    }
    auto exact = [&](std::size_t k) {
        return (2.0 / (h * h)) * (1.0 - std::cos(static_cast<double>(k) * h)) - 30.0;
    };
    const auto low = lowest_eigenpairs(b, 6);
    REQUIRE(low.pairs.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(low.pairs[k].value - exact(k + 1)) < 1e-8);

    const EigenPair s = smallest_magnitude_eigenpair(b);
    double best = exact(1);
    for (std::size_t k = 1; k <= n; ++k)
        if (std::abs(exact(k)) < std::abs(best)) best = exact(k);
    CHECK(std::abs(s.value - best) < 1e-8);

    std::size_t neg = 0;
    for (std::size_t k = 1; k <= n; ++k) neg += exact(k) < 0 ? 1 : 0;
    CHECK(negative_eigenvalue_count(b) == neg);
}

TEST_CASE("rank one solves")
{
    const Vector x = rank_one_solve(Matrix::identity(2), Vector{1, 0}, 1.0, Vector{2, 1});
    CHECK(distance(x, Vector{1, 1}) < 1e-12);
    const Vector y = rank_one_solve(Matrix::diagonal(Vector{0, 2}), Vector{1, 0}, 1.0, Vector{1, 2});
    CHECK(distance(y, Vector{1, 1}) < 1e-12);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = random_symmetric(10, rng);
        const Vector phi = random_vector(10, rng);
        const Vector b = random_vector(10, rng);
        const Vector got = rank_one_solve(a, phi, 1.0, b);
        const Vector ref = lu_solve(SquareMatrix(a + outer(phi, phi)), b);
        CHECK(distance(got, ref) <= 1e-9 * norm2(ref));
    }

    // nonsymmetric perturbation psi phi^T
    const Matrix a = random_symmetric(6, rng);
    const Vector psi = random_vector(6, rng);
    const Vector phi = random_vector(6, rng);
    const Vector b = random_vector(6, rng);
    const Vector got = rank_one_solve(a, psi, phi, 0.7, b);
    const Vector ref = lu_solve(SquareMatrix(a + 0.7 * outer(psi, phi)), b);
    CHECK(distance(got, ref) <= 1e-9 * norm2(ref));
}

TEST_CASE("bordered solve")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 8;
        Matrix a = random_symmetric(n, rng);
        if (trial % 4 == 0) {
            // exactly singular block: elimination must fall back
            const auto e = sym_eigen(a);
            a -= e[3].value * Matrix::identity(n);
        }
        const Vector c = random_vector(n, rng);
        const Vector r = random_vector(n, rng);
        const Vector f = random_vector(n, rng);
        const double d = 0.3;
        const double g = -1.2;
        const BorderedSolution s = bordered_solve(a, c, r, d, f, g);
        Matrix m(n + 1, n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
            m(i, n) = c[i];
            m(n, i) = r[i];
        }
        m(n, n) = d;
        const Vector z = lu_solve(m, append(f, g));
        CHECK(distance(append(s.x, s.y), z) <= 1e-9 * norm2(z));
    }
}
