#include "foldcont/spectral_fold.hpp"
#include "foldcont/sturm_liouville.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace foldcont;

namespace {

constexpr double kPi = std::numbers::pi;

NonlinearMap linear_map(const Matrix& a)
{
    NonlinearMap m;
    m.dim = a.rows();
    m.name = "linear";
    m.eval = [a](const Vector& u) { return a * u; };
    m.jacobian = [a](const Vector&) { return SquareMatrix(a); };
    m.symmetric_jacobian = a.is_symmetric();
    return m;
}

NonlinearMap cube_first()
{
    NonlinearMap m;
    m.dim = 2;
    m.name = "cube";
    m.eval = [](const Vector& u) { return Vector{u[0] * u[0] * u[0], u[1]}; };
    m.jacobian = [](const Vector& u) { return SquareMatrix(Matrix::diagonal(Vector{3 * u[0] * u[0], 1.0})); };
    m.symmetric_jacobian = true;
    return m;
}

double pleat_f(double x) { return std::cos(x) - x * x * std::cos(x) + 2 * x * std::sin(x); }

// Point s * phi_1 (s > 0) of the smooth Sturm-Liouville map near its first crossing
// of C where lambda = target: bracket by the inertia, then bisect.
Vector sl_point_with_lambda(const NonlinearMap& f, const Vector& phi1, double target)
{
    auto index = [&](double s) { return negative_eigenvalue_count(f.jacobian(s * phi1)); };
    const std::size_t i0 = index(0.0);
    double lo = 0.0, hi = 1.0;
    while (index(hi) == i0) {
        lo = hi;
        hi *= 2;
        REQUIRE(hi < 1e8);
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (index(mid) == i0 ? lo : hi) = mid;
        if (hi - lo < 1e-3 * hi) break;
    }
    lo -= 0.1 * (hi - lo);
    auto lam = [&](double s) { return spectral_frame(f, s * phi1).lambda - target; };
    REQUIRE(lam(lo) * lam(hi) < 0);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (lam(mid) * lam(lo) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) * phi1;
}

}  // namespace

TEST_CASE("image paths and their derivatives")
{
    const auto seg = ImagePath::segment(Vector{1, 2}, Vector{3, -2});
    CHECK(distance(seg(0.25), Vector{1.5, 1}) < 1e-15);
    CHECK(distance(seg.deriv(0.7), Vector{2, -4}) < 1e-15);
    const auto half = ImagePath::halfline(Vector{0, 1}, Vector{1, 1});
    CHECK(distance(half(2.0), Vector{2, 3}) < 1e-15);
    CHECK_FALSE(half.domain_point(1.0).has_value());

    const auto zc = zcubic_map(2.4);
    const auto line = ImagePath::mapped_line(zc, Vector{0.3, -0.2}, Vector{0.6, 0.8});
    for (double t : {-1.0, 0.0, 0.4, 2.0}) {
        CHECK(distance(line(t), zc(Vector{0.3 + 0.6 * t, -0.2 + 0.8 * t})) < 1e-14);
        const double h = 1e-6;
        const Vector fd = (line(t + h) - line(t - h)) / (2 * h);
        CHECK(distance(line.deriv(t), fd) < 1e-6 * (1 + norm2(fd)));
    }
    CHECK_THROWS_AS((void)ImagePath::segment(Vector{1, 1}, Vector{1, 1}), std::invalid_argument);
}

TEST_CASE("symmetric frame is the smallest-magnitude eigenpair")
{
    const auto f = spectral_frame(SquareMatrix(Matrix::diagonal(Vector{5, -0.1, 3})), true);
    CHECK(f.lambda == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(std::abs(std::abs(f.phi[1]) - 1.0) < 1e-12);
    CHECK(f.gap == doctest::Approx(3.1).epsilon(1e-10));
    CHECK(distance(f.phi, f.psi) == 0.0);
    CHECK_THROWS_AS((void)spectral_frame(SquareMatrix(Matrix::from_rows({{1, 2}, {0, 1}})), true), NotSymmetric);

    // one negative eigenvalue elsewhere: lambda carries the sign of det
    const Matrix d = Matrix::diagonal(Vector{-2, 0.1});
    const auto g = spectral_frame(SquareMatrix(d), true);
    CHECK(g.eigenvalue == doctest::Approx(0.1));
    CHECK(g.lambda == doctest::Approx(-0.1));
    CHECK(distance(d * g.phi, g.lambda * g.psi) < 1e-14);
    CHECK(distance(g.phi, -1.0 * g.psi) < 1e-14);
}

TEST_CASE("lambda is continuous where eigenvalues of opposite sign tie")
{
    // diag(s, 1): mu jumps from -1 to 1 at s = -1, lambda does not
    for (double s : {-0.999, -1.0, -1.001}) {
        const auto f = spectral_frame(SquareMatrix(Matrix::diagonal(Vector{s, 1.0})), true);
        CHECK(f.lambda == doctest::Approx(-1.0).epsilon(2e-3));
    }
}

TEST_CASE("nonsymmetric frame in three dimensions")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix j(3, 3);
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c) j(r, c) = u(rng);
        const auto f = spectral_frame(SquareMatrix(j), false);
        CHECK(distance(j * f.phi, f.lambda * f.psi) < 1e-10);
        CHECK(distance(j.transposed() * f.psi, f.lambda * f.phi) < 1e-10);
        CHECK((f.lambda < 0) == (det_sign(SquareMatrix(j)) < 0));
    }
}

TEST_CASE("planar frame: J phi = lambda psi, J^T psi = lambda phi")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix j = Matrix::from_rows({{u(rng), u(rng)}, {u(rng), u(rng)}});
        const double det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
        // sigma_min from the closed-form eigenvalues of J^T J
        const double fro2 = j.norm_frobenius() * j.norm_frobenius();
        const double smin = std::sqrt(0.5 * (fro2 - std::sqrt(std::max(fro2 * fro2 - 4 * det * det, 0.0))));
        const auto f = spectral_frame(SquareMatrix(j), false);
        CHECK(std::abs(f.lambda) == doctest::Approx(smin).epsilon(1e-8));
        CHECK((f.lambda < 0) == (det < 0));
        CHECK(distance(j * f.phi, f.lambda * f.psi) < 1e-10 * (1 + std::abs(det)));
        CHECK(distance(j.transposed() * f.psi, f.lambda * f.phi) < 1e-10 * (1 + std::abs(det)));
        CHECK(norm2(f.psi) == doctest::Approx(1.0));
    }
}

TEST_CASE("crossing index counts negative eigenvalues or det sign")
{
    const auto lin = linear_map(Matrix::diagonal(Vector{-1, 2, -3}));
    CHECK(crossing_index(lin, lin.jacobian(Vector(3))) == 2);
    const auto zc = zcubic_map(2.4);
    CHECK(crossing_index(zc, zc.jacobian(Vector{0, 0})) == 0);       // J = I
    CHECK(crossing_index(zc, zc.jacobian(Vector{0, 0.5})) == 1);     // inside the small loop of C
}

TEST_CASE("fold test on the pleat and a cusp-free degenerate map")
{
    const auto p = pleat_map();
    for (int k = 1; k <= 3; ++k) {
        const Vector uc{k * kPi, 0.0};
        const FoldFrame f = fold_test(p, uc);
        CHECK(std::abs(f.lambda) < 1e-12);
        CHECK(f.fold);
        // d/dx (1 + x^2) sin x at k pi
        CHECK(std::abs(f.transversality) == doctest::Approx(1 + k * k * kPi * kPi).epsilon(1e-6));
        const FoldFrame half = fold_test(p, uc, 0.5 * default_fd_step(uc));
        CHECK(std::abs(half.transversality - f.transversality) < 0.05 * std::abs(f.transversality));
    }
    const FoldFrame c = fold_test(cube_first(), Vector{0, 0});
    CHECK(std::abs(c.transversality) < 1e-8);
    CHECK_FALSE(c.fold);
}

TEST_CASE("fold test on the quad map's critical circle")
{
    const auto q = quad_map();
    const auto contours = trace_critical_contour(q, Box::square(-1, 1), 120);
    REQUIRE(contours.size() == 1);
    std::size_t folds = 0, total = 0;
    for (const Vector& v : contours[0].vertices) {
        const FoldFrame f = fold_test(q, v);
        ++total;
        if (f.fold) {
            ++folds;
            const FoldFrame half = fold_test(q, v, 0.5 * default_fd_step(v));
            CHECK(std::abs(half.transversality - f.transversality) < 0.05 * std::abs(f.transversality));
        }
    }
    // Folds everywhere except near the three cusps.
    CHECK(folds >= total - 6);
}

TEST_CASE("regular tangent")
{
    const auto id = linear_map(Matrix::identity(3));
    const Vector v{1, -2, 0.5};
    const auto [uh, th] = regular_tangent(id, Vector(3), v);
    CHECK(distance(uh, v) < 1e-15);
    CHECK(th == 1.0);

    // Deep in the negative regime DF -> A - ell_minus I, and sin(I_h) is its
    // eigenvector with eigenvalue lambda_1 - ell_minus.
    const auto disc = build_discretization(15);
    const PLParams p = slope_params_for_k(disc, 4);
    const auto f = sl_smooth_map(disc, ArctanNonlinearity(p.ell_minus, p.ell_plus));
    const Vector s1 = disc.sin_mode(1);
    const Vector u = -1e9 * s1;
    const Vector gp = -1.0 * s1;
    const auto rt = regular_tangent(f, u, gp);
    const Vector oracle = -1.0 / (disc.lambda(1) - p.ell_minus) * s1;
    CHECK(distance(rt.first, oracle) < 1e-6 * norm2(oracle));
    CHECK(distance(f.jacobian(u).apply(rt.first), gp) < 1e-10 * norm2(gp));
}

TEST_CASE("fold tangent identities")
{
    SUBCASE("diagonal toy")
    {
        FoldFrame fr;
        fr.u = Vector{0, 0};
        fr.phi = Vector{1, 0};
        fr.psi = fr.phi;
        const auto r = fold_tangent(SquareMatrix(Matrix::diagonal(Vector{0, 1})), fr, Vector{1, 1});
        CHECK(distance(r.first, Vector{-1, 0}) < 1e-14);
        CHECK(r.second == 0.0);
        const Vector tau = homotopy_tangent(r);
        CHECK(tau.size() == 3);
        CHECK(tau[2] == 0.0);
    }
    SUBCASE("random near-singular symmetric Jacobians")
    {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> nd;
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 2 + trial % 6;
            Matrix b(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) b(i, j) = nd(rng);
            Matrix a = b + b.transposed();
            const auto eig = sym_eigen(a);
            std::size_t k = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (std::abs(eig[i].value) < std::abs(eig[k].value)) k = i;
            // shift so the smallest-magnitude eigenvalue is tiny
            const double lam = (trial % 3 == 0) ? 0.0 : 1e-3 * nd(rng);
            for (std::size_t i = 0; i < n; ++i) a(i, i) += lam - eig[k].value;
            const auto sf = spectral_frame(SquareMatrix(a), true);
            FoldFrame fr;
            fr.u = Vector(n);
            fr.lambda = sf.lambda;
            fr.phi = sf.phi;
            fr.psi = sf.psi;
            Vector gp(n);
            for (auto& x : gp) x = nd(rng);
            const auto [uh, l] = fold_tangent(SquareMatrix(a), fr, gp);
            CHECK(distance(a * uh, -l * gp) < 1e-8 * (1 + norm2(gp)));
            // u_hat = v_hat - <psi, gamma'> phi with v_hat orthogonal to phi
            const Vector vhat = uh + dot(fr.psi, gp) * fr.phi;
            CHECK(std::abs(dot(vhat, fr.phi)) < 1e-8 * (1 + norm2(uh)));
        }
    }
    SUBCASE("gamma' in the range is rejected")
    {
        FoldFrame fr;
        fr.u = Vector{0, 0};
        fr.phi = Vector{1, 0};
        fr.psi = fr.phi;
        CHECK_THROWS_AS((void)fold_tangent(SquareMatrix(Matrix::diagonal(Vector{0, 1})), fr, Vector{0, 1}),
                        TransversalityFailure);
    }
}

TEST_CASE("fold tangent continues the regular tangent near a fold")
{
    const auto disc = build_discretization(15);
    const PLParams p = slope_params_for_k(disc, 3);
    const auto f = sl_smooth_map(disc, ArctanNonlinearity(p.ell_minus, p.ell_plus));
    const Vector phi1 = disc.eigenvectors[0];
    // generic direction: sin(I_h) itself can lie in the range by symmetry
    Vector gp(disc.n);
    for (std::size_t i = 0; i < disc.n; ++i) gp[i] = -std::exp(disc.mesh[i]);
    for (double target : {1e-5, -1e-5}) {
        const Vector u = sl_point_with_lambda(f, phi1, target);
        const SpectralFrame sf = spectral_frame(f, u);
        CHECK(std::abs(sf.lambda - target) < 1e-9);
        const Vector reg = normalized(append(regular_tangent(f, u, gp).first, 1.0));
        FoldFrame fr;
        fr.u = u;
        fr.lambda = sf.lambda;
        fr.phi = sf.phi;
        fr.psi = sf.psi;
        const Vector fold = normalized(homotopy_tangent(fold_tangent(f, fr, gp)));
        const double c = std::min(1.0, std::abs(dot(reg, fold)));
        CHECK(std::acos(c) < 1e-3);
    }
}

TEST_CASE("mirror property at certified folds")
{
    SUBCASE("pleat")
    {
        const Vector uc{kPi, 0};
        const FoldFrame fr = fold_test(pleat_map(), uc);
        REQUIRE(fr.fold);
        for (double s : {1e-3, 1e-2}) {
            const double scale = 1 + norm2(uc);
            const double plus = dot(fr.psi, pleat_map()(uc + s * scale * fr.phi) - pleat_map()(uc));
            const double minus = dot(fr.psi, pleat_map()(uc - s * scale * fr.phi) - pleat_map()(uc));
            CHECK(plus * minus > 0);
            CHECK(plus == doctest::Approx(pleat_f(kPi + s * scale) - pleat_f(kPi)).epsilon(1e-9));
        }
    }
    SUBCASE("smooth Sturm-Liouville map")
    {
        const auto disc = build_discretization(15);
        const PLParams p = slope_params_for_k(disc, 3);
        const auto f = sl_smooth_map(disc, ArctanNonlinearity(p.ell_minus, p.ell_plus));
        const Vector uc = sl_point_with_lambda(f, disc.eigenvectors[0], 0.0);
        const FoldFrame fr = fold_test(f, uc);
        REQUIRE(fr.fold);
        const double scale = 1 + norm2(uc);
        for (double s : {1e-3, 1e-2}) {
            const double plus = dot(fr.psi, f(uc + s * scale * fr.phi) - f(uc));
            const double minus = dot(fr.psi, f(uc - s * scale * fr.phi) - f(uc));
            CHECK(plus * minus > 0);
        }
    }
}
