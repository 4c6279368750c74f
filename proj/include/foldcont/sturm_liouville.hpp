#pragma once

#include "foldcont/diagram.hpp"
#include "foldcont/linalg.hpp"
#include "foldcont/nonlinearity.hpp"
#include "foldcont/operator_model.hpp"
#include "foldcont/solution_bank.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <unordered_set>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace foldcont {

/// Second-difference Dirichlet operator on (0, pi) with n interior nodes.
struct SLDiscretization {
    std::size_t n = 0;
    double h = 0.0;
    Matrix a;                         // 2/h^2 on the diagonal, -1/h^2 off it
    std::vector<double> eigenvalues;  // ascending: (2/h^2)(1 - cos kh)
    std::vector<Vector> eigenvectors; // unit sin(k I_h)
    Vector mesh;                      // (i h), i = 1..n

    /// sin(k I_h), not normalized.
    [[nodiscard]] Vector sin_mode(std::size_t k) const;
    [[nodiscard]] double lambda(std::size_t k) const { return eigenvalues.at(k - 1); }
};

[[nodiscard]] SLDiscretization build_discretization(std::size_t n);

/// ell_minus = lambda_1 / 2 and ell_plus halfway between lambda_k and
/// lambda_{k+1}; for k = n, ell_plus = lambda_n + lambda_1 / 2.
[[nodiscard]] PLParams slope_params_for_k(const SLDiscretization& disc, std::size_t k);

/// Throws std::invalid_argument when ell_minus >= lambda_1 or a slope sits on
/// the spectrum.
void validate_params(const SLDiscretization& disc, const PLParams& p);

[[nodiscard]] Vector pl_eval(const SLDiscretization& disc, const PLParams& p, const Vector& u);
[[nodiscard]] Matrix orthant_matrix(const SLDiscretization& disc, const PLParams& p, const OrthantSignature& sig);
[[nodiscard]] NonlinearMap pl_map(const SLDiscretization& disc, const PLParams& p);

/// u -> A u - f(u) with the smooth arctan profile; symmetric tridiagonal Jacobian.
[[nodiscard]] NonlinearMap sl_smooth_map(const SLDiscretization& disc, const ArctanNonlinearity& f);

/// -1000 sin(I_h) style right-hand side: -t sin(I_h).
[[nodiscard]] Vector sl_rhs(const SLDiscretization& disc, double t);

struct OracleReport {
    SolutionBank bank;
    std::vector<OrthantSignature> degenerate;  // singular orthant matrices
    std::size_t orthants = 0;
};

/// Solves the linear system of every orthant and keeps the solutions that
/// lie in their own orthant. n <= 24.
[[nodiscard]] OracleReport orthant_oracle(const SLDiscretization& disc, const PLParams& p, const Vector& g,
                                          unsigned threads = 1);

/// The explicit positive and negative solutions of F(u) = -t sin(I_h).
[[nodiscard]] std::pair<Vector, Vector> lazer_mckenna_pair(const SLDiscretization& disc, const PLParams& p, double t);

/// Number of negative eigenvalues of the orthant matrix at u. Throws
/// OnCriticalBoundary when some |u_i| <= 1e-10.
[[nodiscard]] std::size_t morse_index(const SLDiscretization& disc, const PLParams& p, const Vector& u);

struct PLDiagramOptions {
    double s_min = -1e4;
    double s_max = 1e4;
    std::size_t max_depth = 6;
    std::size_t step_budget = 100000;
    double residual_filter = 1e-8;
};

/// Connected component of F^{-1}(F(r)) through P0 for r(s) = P0 + s d.
///
/// F is linear on each orthant and F(r(s)) is linear between the points
/// where r crosses a coordinate hyperplane, so every branch is traced
/// exactly, cell by cell. When a branch crosses a hyperplane whose two
/// orthant matrices have determinants of opposite sign, it turns back in s.
/// Mirror branches start where r itself crosses such a hyperplane. Depth
/// counts these bifurcations from r.
[[nodiscard]] BifurcationDiagram pl_bifurcation_diagram(const SLDiscretization& disc, const PLParams& p,
                                                        const Vector& p0, const Vector& direction,
                                                        const PLDiagramOptions& opts = {});

struct SamplingReport {
    SolutionBank bank;
    std::size_t draws = 0;
    std::optional<std::size_t> first_hit;  // 1-based draw count
};

/// Distinct signatures drawn uniformly at random (without replacement) up to
/// the budget, each tested like the oracle. Reproducible for a fixed seed.
[[nodiscard]] SamplingReport random_orthant_sampling(const SLDiscretization& disc, const PLParams& p, const Vector& g,
                                                     std::size_t budget, std::uint64_t seed);

/// Stateful uniform draws of distinct signatures; random_orthant_sampling
/// and the campaign driver share it so one seed gives one stream.
class OrthantSampler {
public:
    OrthantSampler(const SLDiscretization& disc, const PLParams& p, Vector g, std::uint64_t seed);

    /// Draws until a solution approved by `accept` turns up or max_draws
    /// more signatures have been tried. Every solution met on the way is
    /// added to bank().
    std::optional<SolutionRecord> next_solution(std::size_t max_draws,
                                                const std::function<bool(const SolutionRecord&)>& accept = {});

    [[nodiscard]] std::size_t draws() const noexcept { return draws_; }
    [[nodiscard]] bool exhausted() const noexcept { return draws_ >= total_; }
    [[nodiscard]] const SolutionBank& bank() const noexcept { return bank_; }

private:
    const SLDiscretization& disc_;
    PLParams p_;
    Vector g_;
    std::mt19937_64 rng_;
    std::uint64_t total_;
    std::size_t draws_ = 0;
    std::unordered_set<std::uint64_t> seen_;
    SolutionBank bank_;
};

struct SLSearchLine {
    enum class Base { lazer_mckenna_positive, lazer_mckenna_negative, sampled };
    Base base = Base::lazer_mckenna_positive;
    Vector direction;
    PLDiagramOptions options;
};

struct SLCampaignOptions {
    std::vector<SLSearchLine> lines;
    std::size_t sampling_budget = 20000;  // total draws shared by all sampled bases
    std::uint64_t seed = 1;
    bool include_sampled = true;          // merge solutions met while sampling
};

struct SLCampaignResult {
    std::vector<BifurcationDiagram> diagrams;
    std::vector<Vector> bases;
    std::vector<std::size_t> draws_at_base;  // sampler draw count when each base was fixed
    SolutionBank bank;
    SolutionBank sampled;
    std::size_t draws = 0;
};

/// Runs diagrams along several lines. A sampled base is the first sampled
/// solution not yet in the bank, so every new line starts from a solution
/// the previous diagrams missed.
[[nodiscard]] SLCampaignResult run_sl_campaign(const SLDiscretization& disc, const PLParams& p, const Vector& g,
                                               const SLCampaignOptions& opts);

/// The orthant solution for a signature, if it lies in that orthant.
[[nodiscard]] std::optional<SolutionRecord> solve_in_orthant(const SLDiscretization& disc, const PLParams& p,
                                                             const Vector& g, const OrthantSignature& sig,
                                                             Provenance provenance);

}  // namespace foldcont
