#include "foldcont/elliptic.hpp"

#include "foldcont/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace foldcont {

namespace {

bool inside(double x, double y)
{
    const double cx = x + 0.3;
    const double cy = y + 0.3;
    return x * x + y * y < 1.0 && cx * cx + cy * cy > 0.04;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Vector u_part_of(const Vector& z) { return Vector(std::vector<double>(z.begin(), z.end() - 1)); }
double t_part_of(const Vector& z) { return z[z.size() - 1]; }

std::size_t count_negative_lowest(const NonlinearMap& map, const Vector& u)
{
    return std::min(negative_eigenvalue_count(map.jacobian(u)), kAnnulusModes);
}

}  // namespace

double AnnulusGrid::inner(const Vector& u, const Vector& v) const { return spacing * spacing * dot(u, v); }

AnnulusGrid build_annulus(double spacing)
{
    if (!(spacing > 0.0 && spacing < 0.2)) throw std::invalid_argument("build_annulus: spacing must lie in (0, 0.2)");
    AnnulusGrid g;
    g.spacing = spacing;
    const long m = static_cast<long>(std::ceil(1.0 / spacing));
    std::map<std::pair<long, long>, std::size_t> index;
    for (long j = -m; j <= m; ++j)
        for (long i = -m; i <= m; ++i) {
            const double x = static_cast<double>(i) * spacing;
            const double y = static_cast<double>(j) * spacing;
            if (!inside(x, y)) continue;
            index[{j, i}] = g.x.size();
            g.x.push_back(x);
            g.y.push_back(y);
        }
    const std::size_t n = g.x.size();
    if (n == 0) throw EmptyDomain("build_annulus: no grid point inside the domain");

    // Row-major numbering: the vertical neighbours set the bandwidth.
    std::size_t bw = 0;
    for (const auto& [key, row] : index)
        if (auto it = index.find({key.first + 1, key.second}); it != index.end()) bw = std::max(bw, it->second - row);

    const double h2 = spacing * spacing;
    g.laplacian = BandMatrix(n, bw, bw);
    for (const auto& [key, row] : index) {
        g.laplacian.at(row, row) = 4.0 / h2;
        const std::pair<long, long> nbrs[] = {{key.first, key.second - 1},
                                              {key.first, key.second + 1},
                                              {key.first - 1, key.second},
                                              {key.first + 1, key.second}};
        for (const auto& k : nbrs)
            if (auto it = index.find(k); it != index.end()) g.laplacian.at(row, it->second) = -1.0 / h2;
    }

    const auto pairs = lowest_eigenpairs(SquareMatrix(g.laplacian), std::min(kAnnulusModes, n), {}, 1e-12);
    for (const auto& p : pairs.pairs) {
        g.eigenvalues.push_back(p.value);
        Vector v = p.vector / (spacing * norm2(p.vector));
        g.eigenvectors.push_back(std::move(v));
    }
    double s = 0.0;
    for (double v : g.eigenvectors.front()) s += v;
    if (s < 0) g.eigenvectors.front() *= -1.0;
    return g;
}

NonlinearMap elliptic_map(const AnnulusGrid& grid, const ArctanNonlinearity& f)
{
    NonlinearMap m;
    m.dim = grid.size();
    m.name = "elliptic";
    const BandMatrix& lap = grid.laplacian;
    m.eval = [lap, f](const Vector& u) {
        Vector r = lap.apply(u);
        for (std::size_t i = 0; i < u.size(); ++i) r[i] -= f.value(u[i]);
        return r;
    };
    m.jacobian = [lap, f](const Vector& u) {
        BandMatrix j = lap;
        Vector d(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) d[i] = -f.slope(u[i]);
        j.add_to_diagonal(d);
        return SquareMatrix(std::move(j));
    };
    m.symmetric_jacobian = true;
    return m;
}

std::size_t vertical_crossing_count(const AnnulusGrid& grid, const ArctanNonlinearity& f, const Vector& w,
                                    double t_min, double t_max, std::size_t samples)
{
    if (!(t_min < t_max)) throw std::invalid_argument("vertical_crossing_count: empty range");
    samples = std::max<std::size_t>(samples, 2);
    const auto map = elliptic_map(grid, f);
    const Vector& phi = grid.eigenvectors.front();
    auto index = [&](double t) { return count_negative_lowest(map, w + t * phi); };

    // The inertia difference over an interval counts its crossings with
    // multiplicity, so no eigenvalue needs to be followed individually.
    std::size_t total = 0;
    double ta = t_min;
    std::size_t ia = index(ta);
    for (std::size_t k = 1; k < samples; ++k) {
        const double tb = t_min + (t_max - t_min) * static_cast<double>(k) / static_cast<double>(samples - 1);
        const std::size_t ib = index(tb);
        total += ia > ib ? ia - ib : ib - ia;
        ta = tb;
        ia = ib;
    }
    return total;
}

ContinuationConfig default_elliptic_continuation()
{
    ContinuationConfig c;
    c.step_init = 2.0;
    c.step_max = 200.0;
    c.step_min = 1e-6;
    c.t_min = -1000.0;
    c.t_max = 1000.0;
    c.corrector_tol = 1e-11;
    return c;
}

Vector bootstrap_p0(const AnnulusGrid& grid, const ArctanNonlinearity& f, const Vector& g)
{
    // H(u, s) = L u - (1 - s) beta u - s f(u) - g, from the linear problem at
    // s = 0 to the real one at s = 1, by pseudo-arclength in (u / U, s).
    const BandMatrix& lap = grid.laplacian;
    const double beta = f.beta;
    const std::size_t n = grid.size();
    auto h_eval = [&](const Vector& u, double s) {
        Vector r = lap.apply(u);
        for (std::size_t i = 0; i < n; ++i) r[i] -= (1.0 - s) * beta * u[i] + s * f.value(u[i]) + g[i];
        return r;
    };
    auto h_u = [&](const Vector& u, double s) {
        BandMatrix j = lap;
        Vector d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = -((1.0 - s) * beta + s * f.slope(u[i]));
        j.add_to_diagonal(d);
        return SquareMatrix(std::move(j));
    };
    auto h_s = [&](const Vector& u) {
        Vector r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = beta * u[i] - f.value(u[i]);
        return r;
    };

    BandMatrix shifted = lap;
    shifted.add_to_diagonal(-beta);
    Vector u = lu_solve(SquareMatrix(shifted), g);
    const double scale = std::max(norm2(u), 1.0);
    const double gn = std::max(norm2(g), 1.0);
    double s = 0.0;

    // tangent in scaled coordinates (w, s), w = u / scale
    auto tangent = [&](const Vector& uu, double ss, const std::optional<Vector>& prev) {
        const Vector ref = prev ? *prev : append(Vector(n), 1.0);
        const auto b = bordered_solve(h_u(uu, ss), h_s(uu), u_part_of(ref) * scale, t_part_of(ref), Vector(n), 1.0);
        Vector t = append(b.x / scale, b.y);
        t = normalized(t);
        if (dot(t, ref) < 0) t *= -1.0;
        return t;
    };

    std::optional<Vector> tau;
    double step = 0.05;
    for (std::size_t k = 0; k < 20000 && s < 1.0; ++k) {
        tau = tangent(u, s, tau);
        bool ok = false;
        Vector un;
        double sn = 0.0;
        while (!ok && step > 1e-10) {
            const Vector up = u + (step * scale) * u_part_of(*tau);
            const double sp = s + step * t_part_of(*tau);
            un = up;
            sn = sp;
            for (int it = 0; it < 12; ++it) {
                const Vector r = h_eval(un, sn);
                if (norm2(r) <= 1e-11 * gn) {
                    ok = true;
                    break;
                }
                const double off = dot(u_part_of(*tau), (un - up) / scale) + t_part_of(*tau) * (sn - sp);
                BorderedSolution b;
                try {
                    b = bordered_solve(h_u(un, sn), h_s(un), u_part_of(*tau) / scale, t_part_of(*tau), -r, -off);
                } catch (const Error&) {
                    break;
                }
                if (!std::isfinite(b.y) || std::hypot(norm2(b.x) / scale, b.y) > step) break;
                un += b.x;
                sn += b.y;
            }
            if (!ok) step *= 0.5;
        }
        if (!ok) throw NoConvergence("bootstrap_p0: homotopy stalled");
        if (sn >= 1.0) {
            // back onto s = 1 along the secant
            const double w = (1.0 - s) / (sn - s);
            u = u + w * (un - u);
            s = 1.0;
            break;
        }
        u = std::move(un);
        s = sn;
        step = std::min(step * 1.5, 0.2);
    }
    if (s < 1.0) throw NoConvergence("bootstrap_p0: homotopy did not reach the nonlinear problem");
    NewtonOptions opts;
    opts.tol = 1e-14;
    const auto nr = damped_newton(elliptic_map(grid, f), g, u, opts);
    if (!nr.converged && nr.residual > 1e-12) throw NoConvergence("bootstrap_p0: Newton polish failed");
    return nr.u;
}

EllipticResult solimini_experiment(const AnnulusGrid& grid, const EllipticConfig& cfg)
{
    if (grid.eigenvalues.size() < 4) throw std::invalid_argument("solimini_experiment: need four eigenvalues");
    if (cfg.line.size() > grid.eigenvectors.size())
        throw std::invalid_argument("solimini_experiment: line has more coefficients than modes");
    const auto& lam = grid.eigenvalues;
    const double ell_plus = cfg.ell_plus.value_or(lam[2] + 0.1 * (lam[3] - lam[2]));
    EllipticResult r;
    r.f = ArctanNonlinearity(cfg.ell_minus, ell_plus);
    r.g = -cfg.amplitude * grid.eigenvectors.front();
    r.p0 = bootstrap_p0(grid, r.f, r.g);
    r.direction = Vector(grid.size());
    for (std::size_t k = 0; k < cfg.line.size(); ++k) r.direction.axpy(cfg.line[k], grid.eigenvectors[k]);
    r.diagram = build_diagram(elliptic_map(grid, r.f), r.p0, r.direction, cfg.continuation);
    return r;
}

void write_field_csv(const AnnulusGrid& grid, const Vector& u, std::ostream& out)
{
    if (u.size() != grid.size()) throw std::invalid_argument("write_field_csv: size mismatch");
    out << "x,y,u\n";
    for (std::size_t i = 0; i < grid.size(); ++i) out << fmt(grid.x[i]) << ',' << fmt(grid.y[i]) << ',' << fmt(u[i]) << '\n';
}

void write_grid_header(const AnnulusGrid& grid, std::ostream& out)
{
    out << "spacing," << fmt(grid.spacing) << '\n';
    out << "nodes," << grid.size() << '\n';
    for (std::size_t k = 0; k < grid.eigenvalues.size(); ++k)
        out << "lambda_" << k + 1 << ',' << fmt(grid.eigenvalues[k]) << '\n';
}

}  // namespace foldcont
