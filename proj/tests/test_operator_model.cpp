#include "foldcont/operator_model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <complex>
#include <random>

using namespace foldcont;

namespace {

const std::vector<Vector> kZcubicZeros = {
    {0.2141, 0.3313},  {-0.5367, 0.0},    {-0.7893, 2.5802},  {1.7752, 1.3903},
    {0.2141, -0.3313}, {-0.7893, -2.5802}, {1.7752, -1.3903}, {-1.8633, 0.0},
};

bool has_point(const std::vector<Vector>& pts, const Vector& p, double tol)
{
    for (const auto& q : pts)
        if (distance_inf(p, q) <= tol) return true;
    return false;
}

}  // namespace

TEST_CASE("quad map values and critical circle")
{
    const auto f = quad_map();
    CHECK(distance(f(Vector{0, 0}), Vector{0, 0}) == 0.0);
    CHECK(distance(f(Vector{1, 0}), Vector{2, 0}) < 1e-15);
    // det DF = 4x^2 + 4y^2 - 1
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-2, 2);
    for (int i = 0; i < 20; ++i) {
        const Vector u{d(rng), d(rng)};
        CHECK(jacobian_det2(f, u) == doctest::Approx(4 * u[0] * u[0] + 4 * u[1] * u[1] - 1));
    }
}

TEST_CASE("pleat map")
{
    const auto f = pleat_map();
    CHECK(distance(f(Vector{0, 5}), Vector{1, 5}) < 1e-15);
    for (int k = -3; k <= 3; ++k)
        CHECK(std::abs(jacobian_det2(f, Vector{k * std::numbers::pi, 0.7})) < 1e-12 * (1 + k * k * 10));
    // the x-derivative of the first component is (1 + x^2) sin x
    for (double x : {-2.0, -0.3, 0.4, 1.0, 5.5}) {
        const Matrix fd = finite_difference_jacobian(f, Vector{x, 0.0});
        CHECK(fd(0, 0) == doctest::Approx((1 + x * x) * std::sin(x)).epsilon(1e-7));
    }
}

TEST_CASE("zcubic map values")
{
    const auto f = zcubic_map();
    CHECK(norm2(f(Vector{0, 0})) == 0.0);
    CHECK(distance(f(Vector{1, 0}), Vector{4.5, 0}) < 1e-14);
    // against complex arithmetic
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(-2, 2);
    for (double c : {2.4, 2.5}) {
        const auto fc = zcubic_map(c);
        for (int i = 0; i < 10; ++i) {
            const std::complex<double> z(d(rng), d(rng));
            const std::complex<double> w = z * z * z + c * std::conj(z) * std::conj(z) + z;
            const Vector v = fc(Vector{z.real(), z.imag()});
            CHECK(std::abs(v[0] - w.real()) < 1e-12);
            CHECK(std::abs(v[1] - w.imag()) < 1e-12);
        }
    }
    // the reported real zero is a zero of the 2.4 cubic
    CHECK(norm2(zcubic_map(2.4)(Vector{-0.5367, 0.0})) < 1e-3);
}

TEST_CASE("analytic Jacobians agree with finite differences")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-3, 3);
    for (const auto& f : {quad_map(), pleat_map(), zcubic_map(), zcubic_map(2.4)}) {
        for (int i = 0; i < 100; ++i) {
            const Vector u{d(rng), d(rng)};
            const Matrix a = f.jacobian(u).to_dense();
            const Matrix fd = finite_difference_jacobian(f, u, 1e-6);
            CHECK((a - fd).norm_max() <= 1e-5 * std::max(1.0, a.norm_max()));
        }
    }
}

TEST_CASE("multistart preimages")
{
    const auto quad = multistart_preimages(quad_map(), Vector{0, 0}, Box::square(-2, 2), 30);
    CHECK(quad.size() == 4);

    const auto zeros = multistart_preimages(zcubic_map(2.4), Vector{0, 0}, Box::square(-3, 3), 40);
    CHECK(zeros.size() == 9);
    CHECK(has_point(zeros, Vector{0, 0}, 1e-12));
    for (const auto& p : kZcubicZeros) CHECK(has_point(zeros, p, 1e-3));

    CHECK(multistart_preimages(pleat_map(), Vector{1e6, 0}, Box::square(-1, 1), 10).empty());
}

TEST_CASE("damped newton reports failure on singular starts")
{
    const auto r = damped_newton(quad_map(), Vector{0.0, 0.0}, Vector{0.0, 0.5});
    CHECK(std::isfinite(r.residual));
}

TEST_CASE("critical contours")
{
    const auto quad = trace_critical_contour(quad_map(), Box::square(-2, 2), 80);
    REQUIRE(quad.size() == 1);
    CHECK(quad[0].closed);
    for (const auto& v : quad[0].vertices) {
        CHECK(std::abs(norm2(v) - 0.5) < 1e-3);
        CHECK(std::abs(jacobian_det2(quad_map(), v)) < 1e-8);
    }

    const auto pleat = trace_critical_contour(pleat_map(), Box(Vector{-10, -1}, Vector{10, 1}), 120);
    CHECK(pleat.size() == 7);
    std::vector<double> xs;
    for (const auto& line : pleat) {
        CHECK_FALSE(line.closed);
        for (const auto& v : line.vertices) CHECK(std::abs(jacobian_det2(pleat_map(), v)) < 1e-8);
        xs.push_back(line.vertices.front()[0]);
    }
    std::sort(xs.begin(), xs.end());
    for (int k = -3; k <= 3; ++k) CHECK(std::abs(xs[static_cast<std::size_t>(k + 3)] - k * std::numbers::pi) < 1e-8);

    for (double c : {2.4, 2.5}) {
        const auto z = trace_critical_contour(zcubic_map(c), Box::square(-3, 3), 120);
        CHECK(z.size() == 2);
        for (const auto& line : z) {
            CHECK(line.closed);
            for (const auto& v : line.vertices) CHECK(std::abs(jacobian_det2(zcubic_map(c), v)) < 1e-8);
        }
    }
}
