#pragma once

#include "foldcont/linalg.hpp"
#include "foldcont/operator_model.hpp"

#include <optional>
#include <utility>

namespace foldcont {

/// A curve gamma(t) in the codomain whose preimage is continued.
class ImagePath {
public:
    enum class Kind { segment, halfline, mapped_line };

    ImagePath() = default;

    /// gamma(t) = (1 - t) g0 + t g1
    static ImagePath segment(Vector g0, Vector g1);
    /// gamma(t) = base + t dir
    static ImagePath halfline(Vector base, Vector dir);
    /// gamma(t) = F(base + t dir), the image of a domain line.
    static ImagePath mapped_line(NonlinearMap map, Vector base, Vector dir);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] Vector operator()(double t) const;
    [[nodiscard]] Vector deriv(double t) const;

    /// Endpoints, base point or domain base depending on the kind.
    [[nodiscard]] const Vector& a() const noexcept { return a_; }
    /// Second endpoint, or the direction.
    [[nodiscard]] const Vector& b() const noexcept { return b_; }
    /// base + t dir for mapped lines; empty otherwise.
    [[nodiscard]] std::optional<Vector> domain_point(double t) const;

private:
    Kind kind_ = Kind::segment;
    Vector a_;
    Vector b_;
    std::optional<NonlinearMap> map_;
};

/// Spectral data at a point: lambda with J phi = lambda psi and
/// J^T psi = lambda phi, ||phi|| = ||psi|| = 1.
///
/// lambda is the signed modulus sign(det J) * (smallest singular value): for
/// symmetric J that is (-1)^(negative eigenvalues) |mu| with mu the
/// smallest-magnitude eigenvalue, phi its eigenvector and psi = +-phi. For
/// nonsymmetric J, phi is the smallest right singular vector and psi the
/// matching left one (in 2D psi = adj(J)^T phi / sigma_max, which stays
/// continuous through det J = 0). Unlike mu itself, lambda never jumps
/// where two eigenvalues of opposite sign tie in magnitude, and it changes
/// sign exactly where det J does.
struct SpectralFrame {
    double lambda = 0.0;
    Vector phi;
    Vector psi;
    /// Distance from mu to the next-nearest eigenvalue (symmetric case) or
    /// sigma_2 - sigma_min.
    double gap = 0.0;
    /// mu, the smallest-magnitude eigenvalue itself (symmetric case).
    double eigenvalue = 0.0;
};

/// `symmetric` selects the eigenvalue frame; otherwise the planar singular
/// frame is used even if J happens to be symmetric at this point, so that
/// lambda means the same thing along a whole branch.
[[nodiscard]] SpectralFrame spectral_frame(const SquareMatrix& jac, bool symmetric,
                                           const std::optional<SpectralFrame>& hint = {});

/// spectral_frame with the map's own symmetry flag.
[[nodiscard]] SpectralFrame spectral_frame(const NonlinearMap& map, const Vector& u,
                                           const std::optional<SpectralFrame>& hint = {});

/// Integer that changes by one at every simple crossing of C: the number of
/// negative eigenvalues for symmetric maps, [det < 0] for planar ones.
[[nodiscard]] std::size_t crossing_index(const NonlinearMap& map, const SquareMatrix& jac);

/// Smallest-magnitude eigenpair of DF(u), warm-started and sign-aligned with
/// the hint. Symmetric Jacobians only.
[[nodiscard]] EigenPair track_eigenpair(const NonlinearMap& map, const Vector& u,
                                        const std::optional<EigenPair>& hint = std::nullopt);

struct FoldFrame {
    Vector u;
    double lambda = 0.0;
    Vector phi;
    Vector psi;
    double transversality = 0.0;  // D lambda . phi
    bool fold = false;
};

inline constexpr double kFoldThreshold = 1e-4;
inline constexpr double kCriticalThreshold = 1e-6;

/// Default finite-difference step 1e-5 (1 + ||u||).
[[nodiscard]] double default_fd_step(const Vector& u);

/// D lambda(u) . dir by central differences, lambda tracked from `hint`.
[[nodiscard]] double lambda_derivative(const NonlinearMap& map, const Vector& u, const Vector& dir, double fd_step,
                                       const SpectralFrame& hint);

/// Frame at u with the transversality D lambda . phi; fold when its
/// magnitude exceeds kFoldThreshold. Meant for points with
/// |lambda| < kCriticalThreshold.
[[nodiscard]] FoldFrame fold_test(const NonlinearMap& map, const Vector& u, double fd_step,
                                  const std::optional<SpectralFrame>& hint = std::nullopt);
[[nodiscard]] FoldFrame fold_test(const NonlinearMap& map, const Vector& u);

/// (u_hat, 1) with DF(u) u_hat = gamma'. Throws SingularMatrix near C.
[[nodiscard]] std::pair<Vector, double> regular_tangent(const NonlinearMap& map, const Vector& u,
                                                        const Vector& gprime);

/// Solves (DF + alpha psi phi^T) u_hat = -lambda gamma' - alpha <psi, gamma'> psi
/// and returns (u_hat, lambda). Then DF u_hat = -lambda gamma' and
/// <u_hat, phi> = -<psi, gamma'>. The homotopy tangent is (u_hat, -lambda),
/// see homotopy_tangent.
///
/// Throws TransversalityFailure when |<psi, gamma'>| < 1e-10 ||gamma'||.
[[nodiscard]] std::pair<Vector, double> fold_tangent(const NonlinearMap& map, const FoldFrame& frame,
                                                     const Vector& gprime, double alpha = 1.0);

/// Same solve with an explicit Jacobian.
[[nodiscard]] std::pair<Vector, double> fold_tangent(const SquareMatrix& jac, const FoldFrame& frame,
                                                     const Vector& gprime, double alpha = 1.0);

/// Kernel vector of DH(u, t) = [DF, -gamma'] from a fold_tangent result.
[[nodiscard]] Vector homotopy_tangent(const std::pair<Vector, double>& fold_tangent_result);

}  // namespace foldcont
