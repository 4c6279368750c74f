#pragma once

#include "foldcont/diagram.hpp"
#include "foldcont/operator_model.hpp"
#include "foldcont/spectral_fold.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace foldcont {

struct ContinuationConfig {
    double step_init = 0.1;
    double step_min = 1e-8;
    double step_max = 1.0;
    double corrector_tol = 1e-10;  // on ||F(u) - gamma(t)|| / (1 + ||gamma(t)||)
    std::size_t corrector_max_iter = 20;
    std::size_t max_steps = 20000;
    double crossing_tol = 1e-8;    // |lambda| at a refined crossing
    std::optional<double> spawn_offset;  // default 1e-2 (1 + ||u_c||)
    std::size_t max_depth = 6;
    double alpha = 1.0;
    double t_min = -1e4;
    double t_max = 1e4;
    std::optional<double> region_radius;  // default 1e4 (1 + ||P0||)
    double merge_tol = 1e-6;
};

/// A point of the extended space together with its unit tangent.
struct PathPoint {
    Vector u;
    double t = 0.0;
    Vector tangent;  // (u_dot, t_dot), unit length
};

/// Result of one pseudo-arclength correction.
struct CorrectorResult {
    bool converged = false;
    Vector u;
    double t = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
};

/// Newton on F(u) - gamma(t) = 0 restricted to the hyperplane through
/// (u_pred, t_pred) orthogonal to `tangent`.
[[nodiscard]] CorrectorResult correct(const NonlinearMap& map, const ImagePath& gamma, const Vector& u_pred,
                                      double t_pred, const Vector& tangent, const ContinuationConfig& cfg);

/// Unit kernel vector of [DF(u), -gamma'(t)]. The spectral fold tangent is
/// used where |lambda| < kCriticalThreshold, the regular tangent elsewhere;
/// a bordered solve against `previous` covers points where gamma' lies in
/// the range of DF. Oriented along `previous` when given, else with
/// positive t component.
[[nodiscard]] Vector path_tangent(const NonlinearMap& map, const ImagePath& gamma, const Vector& u, double t,
                                  const SpectralFrame& frame, const std::optional<Vector>& previous,
                                  double alpha = 1.0);

/// Where a branch is allowed to go.
struct PathLimits {
    double t_min = -1e4;
    double t_max = 1e4;
    double region_radius = INFINITY;
    /// Called after every accepted sample; returning true ends the branch
    /// as merged.
    std::function<bool(const Vector& u, double t)> on_existing_branch;
};

/// Pseudo-arclength continuation of F(u) = gamma(t) from a point on the
/// branch, along the initial tangent (or the one with positive t
/// component). Samples satisfy the corrector tolerance; crossings of C
/// are refined to |lambda| < crossing_tol and carry a fold test.
///
/// Step control: halve on corrector failure, on |d lambda| >= gap / 2 or on
/// more than one crossing in a step; grow by 1.3 after three successes.
[[nodiscard]] Branch continue_path(const NonlinearMap& map, const ImagePath& gamma, const Vector& u0, double t0,
                                   const ContinuationConfig& cfg, const PathLimits& limits = {},
                                   const std::optional<Vector>& initial_tangent = std::nullopt);

/// Re-locates every sign change of lambda between consecutive samples,
/// correcting along the secant at each trial point.
[[nodiscard]] std::vector<Crossing> detect_crossings(const NonlinearMap& map, const ImagePath& gamma,
                                                     const Branch& branch, const ContinuationConfig& cfg);

/// A starting point for a new branch with the direction to follow.
struct BranchSeed {
    Vector u;
    double t = 0.0;
    Vector tangent;
};

/// Mirror tangent of a branch crossing C at a fold: reflects the branch
/// tangent (v, t_dot) across the kernel direction, w = v - 2 (Dl.v)/(Dl.phi) phi.
[[nodiscard]] Vector mirror_tangent(const NonlinearMap& map, const FoldFrame& frame, const Vector& branch_tangent);

/// Seeds for the mirror branch through a fold crossing of a branch whose
/// image is a line, offset by +-spawn_offset along the mirror tangent and
/// corrected back onto F^-1(gamma). Returns nothing at turning points
/// (gamma' transversal to Ran DF) or non-folds.
[[nodiscard]] std::vector<BranchSeed> spawn_at_fold(const NonlinearMap& map, const ImagePath& gamma,
                                                    const FoldFrame& frame, double t_c,
                                                    const Vector& branch_tangent, const ContinuationConfig& cfg);

/// Exact root branch u = P0 + t d over [t_min, t_max] with crossings.
[[nodiscard]] Branch trace_root(const NonlinearMap& map, const Vector& p0, const Vector& dir,
                                const ContinuationConfig& cfg);

/// Solutions of F(u) = gamma(t_target) on a branch, one Newton polish per
/// passage of t through t_target.
[[nodiscard]] std::vector<SolutionRecord> harvest(const NonlinearMap& map, const Vector& target, const Branch& branch,
                                                  double t_target, double max_residual = 1e-8);

/// Morse index for symmetric Jacobians; [det < 0] for planar ones.
[[nodiscard]] std::size_t solution_index(const NonlinearMap& map, const Vector& u);

/// Preimage diagram of the line through the solution P0 along d: the root
/// branch, mirror branches spawned at its folds (recursively up to
/// max_depth) and every solution met at t = 0.
[[nodiscard]] BifurcationDiagram build_diagram(const NonlinearMap& map, const Vector& p0, const Vector& dir,
                                               const ContinuationConfig& cfg);

}  // namespace foldcont
