#include "foldcont/spectral_fold.hpp"

#include "foldcont/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace foldcont {

ImagePath ImagePath::segment(Vector g0, Vector g1)
{
    if (g0.size() != g1.size()) throw std::invalid_argument("ImagePath::segment: dimension mismatch");
    ImagePath p;
    p.kind_ = Kind::segment;
    p.a_ = std::move(g0);
    p.b_ = std::move(g1);
    if (distance(p.a_, p.b_) == 0.0) throw std::invalid_argument("ImagePath::segment: degenerate segment");
    return p;
}

ImagePath ImagePath::halfline(Vector base, Vector dir)
{
    if (base.size() != dir.size()) throw std::invalid_argument("ImagePath::halfline: dimension mismatch");
    if (norm2(dir) == 0.0) throw std::invalid_argument("ImagePath::halfline: zero direction");
    ImagePath p;
    p.kind_ = Kind::halfline;
    p.a_ = std::move(base);
    p.b_ = std::move(dir);
    return p;
}

ImagePath ImagePath::mapped_line(NonlinearMap map, Vector base, Vector dir)
{
    if (base.size() != map.dim || dir.size() != map.dim)
        throw std::invalid_argument("ImagePath::mapped_line: dimension mismatch");
    if (norm2(dir) == 0.0) throw std::invalid_argument("ImagePath::mapped_line: zero direction");
    ImagePath p;
    p.kind_ = Kind::mapped_line;
    p.a_ = std::move(base);
    p.b_ = std::move(dir);
    p.map_ = std::move(map);
    return p;
}

Vector ImagePath::operator()(double t) const
{
    switch (kind_) {
    case Kind::segment: return (1.0 - t) * a_ + t * b_;
    case Kind::halfline: return a_ + t * b_;
    case Kind::mapped_line: return (*map_)(a_ + t * b_);
    }
    return {};
}

Vector ImagePath::deriv(double t) const
{
    switch (kind_) {
    case Kind::segment: return b_ - a_;
    case Kind::halfline: return b_;
    case Kind::mapped_line: {
        const Vector u = a_ + t * b_;
        if (map_->smooth()) return map_->jacobian(u).apply(b_);
        const double h = 1e-7 * (1.0 + std::abs(t));
        return ((*map_)(u + h * b_) - (*map_)(u - h * b_)) / (2.0 * h);
    }
    }
    return {};
}

std::optional<Vector> ImagePath::domain_point(double t) const
{
    if (kind_ != Kind::mapped_line) return std::nullopt;
    return a_ + t * b_;
}

// ---------------------------------------------------------------------------

SpectralFrame spectral_frame(const SquareMatrix& jac, bool symmetric, const std::optional<SpectralFrame>& hint)
{
    const std::size_t n = jac.size();
    const bool hinted = hint && hint->phi.size() == n;
    SpectralFrame f;
    if (symmetric) {
        if (!jac.is_symmetric(1e-10)) throw NotSymmetric("spectral_frame: Jacobian is not symmetric");
        std::vector<Vector> start;
        if (hinted) start.push_back(hint->phi);
        const std::size_t count = std::min<std::size_t>(n, 2);
        const auto near = eigenpairs_near(jac, 0.0, count, start, 1e-12);
        std::size_t k = 0;
        if (count == 2 && std::abs(near.pairs[1].value) < std::abs(near.pairs[0].value)) k = 1;
        f.eigenvalue = near.pairs[k].value;
        f.phi = near.pairs[k].vector;
        f.gap = count == 2 ? std::abs(near.pairs[1 - k].value - f.eigenvalue) : INFINITY;
        if (hinted) {
            if (dot(f.phi, hint->phi) < 0) f.phi *= -1.0;
        } else {
            canonical_sign(f.phi);
        }
        const bool odd = negative_eigenvalue_count(jac) % 2 == 1;
        f.lambda = odd ? -std::abs(f.eigenvalue) : std::abs(f.eigenvalue);
        // J phi = mu phi = lambda psi
        f.psi = (f.eigenvalue < 0) == (f.lambda < 0) ? f.phi : -1.0 * f.phi;
        return f;
    }
    if (jac.is_banded()) throw NotSymmetric("spectral_frame: nonsymmetric banded Jacobians are not supported");

    const Matrix& a = jac.dense();
    const auto right = sym_eigen(a.transposed() * a);  // ascending squares of the singular values
    const double smin = std::sqrt(std::max(right[0].value, 0.0));
    f.phi = right[0].vector;
    if (hinted) {
        if (dot(f.phi, hint->phi) < 0) f.phi *= -1.0;
    } else {
        canonical_sign(f.phi);
    }
    if (n == 2) {
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        const double smax = std::sqrt(std::max(right[1].value, 0.0));
        if (smax == 0.0) throw SingularMatrix("spectral_frame: zero Jacobian");
        f.lambda = det / smax;
        f.gap = smax - std::abs(f.lambda);
        const Matrix adj = Matrix::from_rows({{a(1, 1), -a(0, 1)}, {-a(1, 0), a(0, 0)}});
        f.psi = adj.transposed() * f.phi / smax;
        const double pn = norm2(f.psi);
        if (pn > 0) f.psi /= pn;
        f.eigenvalue = f.lambda;
        return f;
    }
    const int sign = det_sign(jac) < 0 ? -1 : 1;
    f.lambda = sign * smin;
    f.gap = std::sqrt(std::max(right[1].value, 0.0)) - smin;
    const auto left = sym_eigen(a * a.transposed());
    f.psi = left[0].vector;
    // J phi = lambda psi fixes the orientation of psi away from C; on C
    // follow the hint.
    const Vector jphi = a * f.phi;
    if (norm2(jphi) > 1e-12 * a.norm_max()) {
        if (dot(jphi, f.psi) * sign < 0) f.psi *= -1.0;
    } else if (hint && hint->psi.size() == n && dot(f.psi, hint->psi) < 0) {
        f.psi *= -1.0;
    }
    f.eigenvalue = f.lambda;
    return f;
}

SpectralFrame spectral_frame(const NonlinearMap& map, const Vector& u, const std::optional<SpectralFrame>& hint)
{
    return spectral_frame(map.jacobian(u), map.symmetric_jacobian, hint);
}

std::size_t crossing_index(const NonlinearMap& map, const SquareMatrix& jac)
{
    if (map.symmetric_jacobian) return negative_eigenvalue_count(jac);
    return det_sign(jac) < 0 ? 1 : 0;
}

EigenPair track_eigenpair(const NonlinearMap& map, const Vector& u, const std::optional<EigenPair>& hint)
{
    if (!map.smooth()) throw std::invalid_argument("track_eigenpair: map has no Jacobian");
    const SquareMatrix jac = map.jacobian(u);
    if (!jac.is_symmetric(1e-10)) throw NotSymmetric("track_eigenpair: Jacobian is not symmetric");
    return smallest_magnitude_eigenpair(jac, hint);
}

double default_fd_step(const Vector& u) { return 1e-5 * (1.0 + norm2(u)); }

double lambda_derivative(const NonlinearMap& map, const Vector& u, const Vector& dir, double fd_step,
                         const SpectralFrame& hint)
{
    const SpectralFrame fp = spectral_frame(map, u + fd_step * dir, hint);
    const SpectralFrame fm = spectral_frame(map, u - fd_step * dir, hint);
    return (fp.lambda - fm.lambda) / (2.0 * fd_step);
}

FoldFrame fold_test(const NonlinearMap& map, const Vector& u, double fd_step, const std::optional<SpectralFrame>& hint)
{
    if (!map.smooth()) throw std::invalid_argument("fold_test: map has no Jacobian");
    const SpectralFrame centre = spectral_frame(map, u, hint);
    FoldFrame frame;
    frame.u = u;
    frame.lambda = centre.lambda;
    frame.phi = centre.phi;
    frame.psi = centre.psi;
    frame.transversality = lambda_derivative(map, u, centre.phi, fd_step, centre);
    frame.fold = std::abs(frame.transversality) > kFoldThreshold;
    return frame;
}

FoldFrame fold_test(const NonlinearMap& map, const Vector& u) { return fold_test(map, u, default_fd_step(u)); }

std::pair<Vector, double> regular_tangent(const NonlinearMap& map, const Vector& u, const Vector& gprime)
{
    return {lu_solve(map.jacobian(u), gprime), 1.0};
}

std::pair<Vector, double> fold_tangent(const SquareMatrix& jac, const FoldFrame& frame, const Vector& gprime,
                                       double alpha)
{
    const Vector& psi = frame.psi.empty() ? frame.phi : frame.psi;
    const double proj = dot(psi, gprime);
    if (std::abs(proj) < 1e-10 * norm2(gprime))
        throw TransversalityFailure("fold_tangent: gamma' lies in the range of DF");
    Vector rhs = -frame.lambda * gprime;
    rhs.axpy(-alpha * proj, psi);
    return {rank_one_solve(jac, psi, frame.phi, alpha, rhs), frame.lambda};
}

std::pair<Vector, double> fold_tangent(const NonlinearMap& map, const FoldFrame& frame, const Vector& gprime,
                                       double alpha)
{
    return fold_tangent(map.jacobian(frame.u), frame, gprime, alpha);
}

Vector homotopy_tangent(const std::pair<Vector, double>& r) { return append(r.first, -r.second); }

}  // namespace foldcont
