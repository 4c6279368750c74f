#pragma once

#include "foldcont/continuation.hpp"
#include "foldcont/diagram.hpp"
#include "foldcont/linalg.hpp"
#include "foldcont/nonlinearity.hpp"
#include "foldcont/operator_model.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace foldcont {

/// Masked Cartesian grid on the unit disk minus the disk of radius 0.2
/// about (-0.3, -0.3), with the 5-point Dirichlet Laplacian.
struct AnnulusGrid {
    double spacing = 0.0;
    std::vector<double> x;  // node coordinates
    std::vector<double> y;
    BandMatrix laplacian;
    std::vector<double> eigenvalues;   // lowest six, ascending
    std::vector<Vector> eigenvectors;  // h^2 sum phi^2 = 1; phi_1 > 0

    [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
    /// Discrete L^2 inner product h^2 sum u_i v_i.
    [[nodiscard]] double inner(const Vector& u, const Vector& v) const;
};

inline constexpr std::size_t kAnnulusModes = 6;

/// Active nodes are the grid points (i h, j h) with |p| < 1 and
/// |p - (-0.3, -0.3)| > 0.2. Throws std::invalid_argument unless
/// 0 < spacing < 0.2, EmptyDomain if no node is active.
[[nodiscard]] AnnulusGrid build_annulus(double spacing);

/// F(u) = L u - f(u) with Jacobian L - diag(f'(u)).
[[nodiscard]] NonlinearMap elliptic_map(const AnnulusGrid& grid, const ArctanNonlinearity& f);

/// Number of sign changes of the lowest six eigenvalues of DF(w + t phi_1)
/// for t in [t_min, t_max], with multiplicity.
[[nodiscard]] std::size_t vertical_crossing_count(const AnnulusGrid& grid, const ArctanNonlinearity& f,
                                                  const Vector& w, double t_min, double t_max,
                                                  std::size_t samples = 400);

/// Continuation defaults sized for the annulus: the domain line is long in
/// Euclidean units, so steps and the s-range scale with it.
[[nodiscard]] ContinuationConfig default_elliptic_continuation();

struct EllipticConfig {
    double ell_minus = -1.0;
    std::optional<double> ell_plus;  // default lambda_3 + 0.1 (lambda_4 - lambda_3)
    double amplitude = 1000.0;       // g = -amplitude phi_1
    std::vector<double> line{0.8, -0.1, -0.1};  // direction in the phi_1, phi_2, ... basis
    ContinuationConfig continuation = default_elliptic_continuation();
};

struct EllipticResult {
    ArctanNonlinearity f;
    Vector g;
    Vector p0;
    Vector direction;
    BifurcationDiagram diagram;
};

/// P0 by homotopy from the linear problem: f replaced by beta x, then
/// (1 - s) beta x + s f(x) followed by pseudo-arclength up to s = 1.
[[nodiscard]] Vector bootstrap_p0(const AnnulusGrid& grid, const ArctanNonlinearity& f, const Vector& g);

/// The six-solution experiment: g = -amplitude phi_1, P0 by bootstrap, the
/// diagram of the line P0 + s (0.8 phi_1 - 0.1 phi_2 - 0.1 phi_3).
[[nodiscard]] EllipticResult solimini_experiment(const AnnulusGrid& grid, const EllipticConfig& cfg = {});

/// x,y,u per node.
void write_field_csv(const AnnulusGrid& grid, const Vector& u, std::ostream& out);
/// spacing, node count and eigenvalues as key,value lines.
void write_grid_header(const AnnulusGrid& grid, std::ostream& out);

}  // namespace foldcont
