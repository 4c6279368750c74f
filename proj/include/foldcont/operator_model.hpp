#pragma once

#include "foldcont/linalg.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace foldcont {

/// F : R^n -> R^n together with whatever structure the algorithms can use.
struct NonlinearMap {
    std::size_t dim = 0;
    std::string name;
    std::function<Vector(const Vector&)> eval;
    /// Empty for nonsmooth maps.
    std::function<SquareMatrix(const Vector&)> jacobian;
    bool is_orthant_linear = false;
    bool symmetric_jacobian = false;

    [[nodiscard]] bool smooth() const noexcept { return static_cast<bool>(jacobian); }
    [[nodiscard]] Vector operator()(const Vector& u) const { return eval(u); }
};

/// (x, y) -> (x^2 - y^2 + x, 2xy - y). Critical set: x^2 + y^2 = 1/4.
[[nodiscard]] NonlinearMap quad_map();

/// (x, y) -> (cos x - x^2 cos x + 2x sin x, y). Critical set: x = k pi.
[[nodiscard]] NonlinearMap pleat_map();

/// Real form of z -> z^3 + c conj(z)^2 + z on (Re z, Im z).
[[nodiscard]] NonlinearMap zcubic_map(double coeff = 2.5);

/// Central-difference Jacobian, column j with step h * (1 + |u_j|).
[[nodiscard]] Matrix finite_difference_jacobian(const NonlinearMap& map, const Vector& u, double h = 1e-6);

/// ||F(u) - g|| / max(||g||, 1): relative for large targets, absolute near g = 0.
[[nodiscard]] double relative_residual(const NonlinearMap& map, const Vector& u, const Vector& g);

/// Axis-aligned search region.
struct Box {
    Vector lower;
    Vector upper;

    Box() = default;
    Box(Vector lo, Vector hi);
    static Box square(double lo, double hi, std::size_t dim = 2);

    [[nodiscard]] std::size_t dim() const noexcept { return lower.size(); }
    [[nodiscard]] double diameter() const { return distance(lower, upper); }
    [[nodiscard]] bool contains(const Vector& u) const;
};

struct Polyline {
    std::vector<Vector> vertices;
    bool closed = false;
};

struct NewtonOptions {
    double tol = 1e-10;          // on relative_residual
    std::size_t max_iter = 60;
    std::size_t max_halvings = 30;
};

struct NewtonResult {
    Vector u;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Damped Newton for F(u) = g: the full step is halved until the residual
/// decreases. A singular Jacobian or a failed line search ends the run
/// unconverged.
[[nodiscard]] NewtonResult damped_newton(const NonlinearMap& map, const Vector& g, Vector u0,
                                         const NewtonOptions& opts = {});

/// Damped Newton from every node of a grid_n^dim lattice over the box.
/// Converged points outside the box are dropped; the rest are deduplicated at 1e-6 * diam(box) and returned in
/// lexicographic order.
[[nodiscard]] std::vector<Vector> multistart_preimages(const NonlinearMap& map, const Vector& g, const Box& box,
                                                       std::size_t grid_n, unsigned threads = 1);

/// Zero level set of det DF over a planar box: marching squares on a
/// grid_n x grid_n sampling, vertices refined by bisection along cell edges.
[[nodiscard]] std::vector<Polyline> trace_critical_contour(const NonlinearMap& map, const Box& box,
                                                           std::size_t grid_n);

/// det DF(u) for planar maps.
[[nodiscard]] double jacobian_det2(const NonlinearMap& map, const Vector& u);

/// Sorts lexicographically and drops points within tol (Euclidean) of an
/// earlier kept point.
[[nodiscard]] std::vector<Vector> dedup_points(std::vector<Vector> points, double tol);

}  // namespace foldcont
