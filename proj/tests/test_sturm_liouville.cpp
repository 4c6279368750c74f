#include "foldcont/sturm_liouville.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace foldcont;

namespace {

// Independent check of a diagonal-plus-tridiagonal determinant sign by the
// three-term recurrence.
int tridiagonal_det_sign(const SLDiscretization& d, const PLParams& p, const OrthantSignature& sig)
{
    const double off = 1.0 / (d.h * d.h);
    double prev = 1.0;
    double cur = 2.0 * off - p.slope_for_sign(sig[0]);
    for (std::size_t i = 1; i < d.n; ++i) {
        const double next = (2.0 * off - p.slope_for_sign(sig[i])) * cur - off * off * prev;
        prev = cur;
        cur = next;
        const double scale = std::max(std::abs(prev), std::abs(cur));
        prev /= scale;
        cur /= scale;
    }
    return cur > 0 ? 1 : (cur < 0 ? -1 : 0);
}

Vector lm_line_k4(const SLDiscretization& d)
{
    return d.sin_mode(1) - 0.1 * d.sin_mode(2) - 0.1 * d.sin_mode(3) - 0.1 * d.sin_mode(4);
}

}  // namespace

TEST_CASE("discretization spectrum")
{
    const auto d2 = build_discretization(2);
    CHECK(std::abs(d2.lambda(1) - 0.9119) < 1e-4);
    CHECK(std::abs(d2.lambda(2) - 2.7357) < 1e-4);

    const auto d = build_discretization(15);
    CHECK(std::abs(d.lambda(1) - 0.9968) < 1e-4);
    for (std::size_t k = 1; k <= 15; ++k) {
        CHECK(norm2(d.a * d.eigenvectors[k - 1] - d.lambda(k) * d.eigenvectors[k - 1]) < 1e-10);
        if (k > 1) CHECK(d.lambda(k) > d.lambda(k - 1));
    }
    for (double x : d.sin_mode(1)) CHECK(x > 0);
    CHECK(d.a.is_symmetric());
}

TEST_CASE("piecewise-linear evaluation")
{
    const auto d = build_discretization(15);
    const auto p = slope_params_for_k(d, 4);
    CHECK(norm2(pl_eval(d, p, Vector(15))) == 0.0);
    const Vector g = sl_rhs(d, 1000);
    const Vector up = (1000.0 / (p.ell_plus - d.lambda(1))) * d.sin_mode(1);
    const Vector um = (1000.0 / (p.ell_minus - d.lambda(1))) * d.sin_mode(1);
    CHECK(norm_inf(pl_eval(d, p, up) - g) < 1e-10);
    CHECK(norm_inf(pl_eval(d, p, um) - g) < 1e-10);
    for (double x : um) CHECK(x < 0);
}

TEST_CASE("orthant matrices")
{
    const auto d = build_discretization(2);
    const PLParams p{-1, 4};
    const Matrix plus = orthant_matrix(d, p, OrthantSignature::parse("++"));
    const Matrix minus = orthant_matrix(d, p, OrthantSignature::parse("--"));
    CHECK((plus - (d.a - 4.0 * Matrix::identity(2))).norm_max() == 0.0);
    CHECK((minus - (d.a + 1.0 * Matrix::identity(2))).norm_max() == 0.0);
    const Matrix mixed = orthant_matrix(d, p, OrthantSignature::parse("+-"));
    const double h2 = d.h * d.h;
    CHECK(mixed(0, 0) == doctest::Approx(2 / h2 - 4));
    CHECK(mixed(1, 1) == doctest::Approx(2 / h2 + 1));

    // determinant signs by an independent recurrence
    const auto d15 = build_discretization(15);
    const auto p8 = slope_params_for_k(d15, 8);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const auto sig = OrthantSignature::from_bits(15, rng() & 0x7fff);
        CHECK(det_sign(orthant_matrix(d15, p8, sig)) == tridiagonal_det_sign(d15, p8, sig));
    }
}

TEST_CASE("oracle on two points")
{
    const auto d = build_discretization(2);
    const PLParams p{-1, 4};
    const auto rep = orthant_oracle(d, p, sl_rhs(d, 1000));
    CHECK(rep.bank.size() == 4);
    CHECK(rep.degenerate.empty());
    const auto pos = lazer_mckenna_pair(d, p, 1000).first;
    CHECK(std::abs(pos[0] - 280.4396) < 1e-3);
    CHECK(rep.bank.contains(pos, 1e-8));
}

TEST_CASE("oracle soundness at n = 15")
{
    const auto d = build_discretization(15);
    const Vector g = sl_rhs(d, 1000);
    for (std::size_t k : {4u, 8u, 11u}) {
        const auto p = slope_params_for_k(d, k);
        const auto rep = orthant_oracle(d, p, g, 2);
        for (const auto& r : rep.bank.records()) {
            CHECK(norm2(pl_eval(d, p, r.u) - g) / norm2(g) < 1e-10);
            REQUIRE(r.signature);
            CHECK(r.signature->admits(r.u));
            CHECK(r.morse_index == morse_index(d, p, r.u));
        }
    }
    CHECK(orthant_oracle(d, slope_params_for_k(d, 4), g).bank.size() == 8);
}

TEST_CASE("explicit solution pair")
{
    const auto d = build_discretization(15);
    const auto p = slope_params_for_k(d, 4);
    const auto [pos, neg] = lazer_mckenna_pair(d, p, 1000);
    const Vector s = d.sin_mode(1);
    CHECK(std::abs(pos[3] / s[3] - 55.1633) < 1e-3);
    for (double x : pos) CHECK(x > 0);
    for (double x : neg) CHECK(x < 0);
    CHECK(morse_index(d, p, pos) == 4);
    CHECK(morse_index(d, p, neg) == 0);
    CHECK_THROWS_AS((void)morse_index(d, p, Vector(15)), OnCriticalBoundary);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u01(0, 1);
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 20);
        const auto dn = build_discretization(n);
        const double t = 1 + 1e4 * u01(rng);
        PLParams q;
        q.ell_minus = dn.lambda(1) * (u01(rng) - 0.5) * 2;
        q.ell_plus = dn.lambda(1) + (dn.lambda(n) - dn.lambda(1) + 5) * u01(rng) + 1e-3;
        const auto [a, b] = lazer_mckenna_pair(dn, q, t);
        const Vector gn = sl_rhs(dn, t);
        CHECK(norm2(pl_eval(dn, q, a) - gn) / norm2(gn) < 1e-12);
        CHECK(norm2(pl_eval(dn, q, b) - gn) / norm2(gn) < 1e-12);
    }
}

TEST_CASE("diagram through two points recovers the missing solutions")
{
    const auto d = build_discretization(2);
    const PLParams p{-1, 4};
    const Vector g = sl_rhs(d, 1000);
    const auto oracle = orthant_oracle(d, p, g).bank;
    const Vector p0 = lazer_mckenna_pair(d, p, 1000).first;
    const auto dg = pl_bifurcation_diagram(d, p, p0, 0.2 * d.sin_mode(2) - 0.8 * d.sin_mode(1));
    CHECK(dg.solutions.size() == 4);
    const auto cmp = compare_banks(dg.solutions, oracle, 1e-8);
    CHECK(cmp.matched == 4);
    CHECK(cmp.spurious == 0);
}

TEST_CASE("diagram structure at k = 4")
{
    const auto d = build_discretization(15);
    const auto p = slope_params_for_k(d, 4);
    const Vector g = sl_rhs(d, 1000);
    const auto oracle = orthant_oracle(d, p, g).bank;
    const Vector p0 = lazer_mckenna_pair(d, p, 1000).first;
    const auto dg = pl_bifurcation_diagram(d, p, p0, lm_line_k4(d));

    const auto cmp = compare_banks(dg.solutions, oracle);
    CHECK(cmp.matched == 8);
    CHECK(cmp.missed == 0);
    CHECK(cmp.spurious == 0);
    CHECK(dg.max_depth() <= 6);

    // every crossing flips the determinant sign of the adjacent orthant matrices
    std::size_t crossings = 0;
    for (const auto& br : dg.branches) {
        for (const auto& x : br.crossings) {
            std::size_t i = 0;
            while (x.frame.phi[i] == 0.0) ++i;
            Vector up = x.frame.u, dn = x.frame.u;
            up[i] = 1.0;
            dn[i] = -1.0;
            CHECK(det_sign(orthant_matrix(d, p, OrthantSignature::of(up))) ==
                  -det_sign(orthant_matrix(d, p, OrthantSignature::of(dn))));
            ++crossings;
        }
        // consecutive samples of a branch map onto the image of r
        for (const auto& s : br.samples) {
            const Vector target = pl_eval(d, p, p0 + s.t * lm_line_k4(d));
            CHECK(norm2(pl_eval(d, p, s.u) - target) <= 1e-9 * (1 + norm2(target)));
        }
    }
    CHECK(crossings > 0);

    PLDiagramOptions none;
    none.max_depth = 0;
    const auto root_only = pl_bifurcation_diagram(d, p, p0, lm_line_k4(d), none);
    CHECK(root_only.solutions.size() == 1);
    CHECK(root_only.solutions.contains(p0, 1e-9));
}

TEST_CASE("random orthant sampling")
{
    const auto d = build_discretization(8);
    const auto p = slope_params_for_k(d, 5);
    const Vector g = sl_rhs(d, 1000);
    const auto oracle = orthant_oracle(d, p, g).bank;
    const auto full = random_orthant_sampling(d, p, g, 256, 3);
    const auto cmp = compare_banks(full.bank, oracle, 1e-12);
    CHECK(cmp.matched == oracle.size());
    CHECK(cmp.spurious == 0);
    CHECK(full.draws == 256);

    CHECK(random_orthant_sampling(d, p, g, 1, 5).bank.size() <= 1);

    const auto a = random_orthant_sampling(d, p, g, 40, 17);
    const auto b = random_orthant_sampling(d, p, g, 40, 17);
    REQUIRE(a.bank.size() == b.bank.size());
    for (std::size_t i = 0; i < a.bank.size(); ++i) CHECK(a.bank.records()[i].u == b.bank.records()[i].u);
    CHECK(a.first_hit == b.first_hit);
}

TEST_CASE("bank CSV round trip")
{
    const auto d = build_discretization(6);
    const auto p = slope_params_for_k(d, 3);
    const auto bank = orthant_oracle(d, p, sl_rhs(d, 1000)).bank;
    std::ostringstream first;
    write_bank_csv(bank, first);
    std::istringstream in(first.str());
    const auto back = read_bank_csv(in);
    REQUIRE(back.size() == bank.size());
    for (std::size_t i = 0; i < bank.size(); ++i) {
        CHECK(back.records()[i].u == bank.records()[i].u);
        CHECK(back.records()[i].morse_index == bank.records()[i].morse_index);
        CHECK(back.records()[i].residual == bank.records()[i].residual);
        CHECK(back.records()[i].signature == bank.records()[i].signature);
    }
    std::ostringstream second;
    write_bank_csv(back, second);
    CHECK(first.str() == second.str());
    CHECK(first.str().rfind("index,morse,residual,signature,u_1,", 0) == 0);
}

TEST_CASE("smooth variant Jacobian")
{
    const auto d = build_discretization(10);
    const auto p = slope_params_for_k(d, 3);
    const auto map = sl_smooth_map(d, ArctanNonlinearity(p.ell_minus, p.ell_plus));
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd(0, 3);
    for (int i = 0; i < 20; ++i) {
        Vector u(10);
        for (auto& x : u) x = nd(rng);
        const Matrix a = map.jacobian(u).to_dense();
        CHECK((a - finite_difference_jacobian(map, u)).norm_max() <= 1e-5 * a.norm_max());
        CHECK(a.is_symmetric());
    }
}
