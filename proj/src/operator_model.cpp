#include "foldcont/operator_model.hpp"

#include "foldcont/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace foldcont {

NonlinearMap quad_map()
{
    NonlinearMap m;
    m.dim = 2;
    m.name = "quad";
    m.eval = [](const Vector& u) {
        const double x = u[0], y = u[1];
        return Vector{x * x - y * y + x, 2 * x * y - y};
    };
    m.jacobian = [](const Vector& u) {
        const double x = u[0], y = u[1];
        return SquareMatrix(Matrix::from_rows({{2 * x + 1, -2 * y}, {2 * y, 2 * x - 1}}));
    };
    return m;
}

NonlinearMap pleat_map()
{
    NonlinearMap m;
    m.dim = 2;
    m.name = "pleat";
    m.eval = [](const Vector& u) {
        const double x = u[0];
        return Vector{std::cos(x) - x * x * std::cos(x) + 2 * x * std::sin(x), u[1]};
    };
    m.jacobian = [](const Vector& u) {
        const double x = u[0];
        return SquareMatrix(Matrix::from_rows({{(1 + x * x) * std::sin(x), 0.0}, {0.0, 1.0}}));
    };
    m.symmetric_jacobian = true;
    return m;
}

NonlinearMap zcubic_map(double coeff)
{
    NonlinearMap m;
    m.dim = 2;
    m.name = "zcubic";
    m.eval = [c = coeff](const Vector& u) {
        const double x = u[0], y = u[1];
        return Vector{x * x * x - 3 * x * y * y + c * (x * x - y * y) + x,
                      3 * x * x * y - y * y * y - 2 * c * x * y + y};
    };
    m.jacobian = [c = coeff](const Vector& u) {
        const double x = u[0], y = u[1];
        return SquareMatrix(Matrix::from_rows({{3 * x * x - 3 * y * y + 2 * c * x + 1, -6 * x * y - 2 * c * y},
                                               {6 * x * y - 2 * c * y, 3 * x * x - 3 * y * y - 2 * c * x + 1}}));
    };
    return m;
}

Matrix finite_difference_jacobian(const NonlinearMap& map, const Vector& u, double h)
{
    const std::size_t n = map.dim;
    Matrix jac(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double step = h * (1.0 + std::abs(u[j]));
        Vector up = u, um = u;
        up[j] += step;
        um[j] -= step;
        jac.set_column(j, (map(up) - map(um)) / (2.0 * step));
    }
    return jac;
}

double relative_residual(const NonlinearMap& map, const Vector& u, const Vector& g)
{
    const double r = norm2(map(u) - g);
    const double gn = norm2(g);
    return r / std::max(gn, 1.0);
}

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi))
{
    if (lower.size() != upper.size() || lower.empty()) throw std::invalid_argument("Box: dimension mismatch");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i])) throw std::invalid_argument("Box: lower must be below upper");
}

Box Box::square(double lo, double hi, std::size_t dim) { return Box(Vector(dim, lo), Vector(dim, hi)); }

bool Box::contains(const Vector& u) const
{
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (u[i] < lower[i] || u[i] > upper[i]) return false;
    return true;
}

NewtonResult damped_newton(const NonlinearMap& map, const Vector& g, Vector u0, const NewtonOptions& opts)
{
    if (!map.smooth()) throw std::invalid_argument("damped_newton: map has no Jacobian");
    NewtonResult res;
    res.u = std::move(u0);
    const double gn = norm2(g);
    const double scale = std::max(gn, 1.0);
    Vector r = map(res.u) - g;
    res.residual = norm2(r) / scale;
    int polish = 0;
    for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
        if (!std::isfinite(res.residual)) return res;
        if (res.residual <= opts.tol) {
            res.converged = true;
            // one polishing step; kept only if it helps
            if (polish++ > 0) return res;
        }
        Vector du;
        try {
            du = lu_solve(map.jacobian(res.u), -1.0 * r);
        } catch (const SingularMatrix&) {
            return res;
        }
        double step = 1.0;
        bool accepted = false;
        for (std::size_t k = 0; k <= opts.max_halvings; ++k, step *= 0.5) {
            Vector trial = res.u;
            trial.axpy(step, du);
            if (!all_finite(trial.span())) continue;
            Vector rt = map(trial) - g;
            const double rn = norm2(rt) / scale;
            if (std::isfinite(rn) && rn < res.residual) {
                res.u = std::move(trial);
                r = std::move(rt);
                res.residual = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) return res;
    }
    res.converged = res.residual <= opts.tol;
    return res;
}

std::vector<Vector> dedup_points(std::vector<Vector> points, double tol)
{
    std::vector<Vector> kept;
    for (auto& p : points) {
        const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Vector& q) { return distance(p, q) <= tol; });
        if (!dup) kept.push_back(std::move(p));
    }
    std::sort(kept.begin(), kept.end(), [](const Vector& a, const Vector& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    return kept;
}

std::vector<Vector> multistart_preimages(const NonlinearMap& map, const Vector& g, const Box& box,
                                         std::size_t grid_n, unsigned threads)
{
    if (grid_n < 2) throw std::invalid_argument("multistart_preimages: grid_n must be >= 2");
    const std::size_t n = map.dim;
    if (box.dim() != n || g.size() != n) throw std::invalid_argument("multistart_preimages: dimension mismatch");
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= grid_n;

    std::vector<std::optional<Vector>> found(total);
    parallel_for(total, threads, [&](std::size_t idx) {
        Vector u0(n);
        std::size_t rest = idx;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = rest % grid_n;
            rest /= grid_n;
            u0[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * static_cast<double>(k) /
                                       static_cast<double>(grid_n - 1);
        }
        const NewtonResult res = damped_newton(map, g, u0);
        if (res.converged && box.contains(res.u)) found[idx] = res.u;
    });

    std::vector<Vector> pts;
    for (auto& f : found)
        if (f) pts.push_back(std::move(*f));
    return dedup_points(std::move(pts), 1e-6 * box.diameter());
}

double jacobian_det2(const NonlinearMap& map, const Vector& u)
{
    if (map.dim != 2) throw std::invalid_argument("jacobian_det2: planar maps only");
    const Matrix j = map.jacobian(u).to_dense();
    return j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
}

namespace {

Vector refine_on_edge(const NonlinearMap& map, Vector a, double fa, Vector b)
{
    for (int it = 0; it < 200; ++it) {
        Vector m = 0.5 * (a + b);
        const double fm = jacobian_det2(map, m);
        if (std::abs(fm) < 1e-8 && distance_inf(a, b) < 1e-9) return m;
        if (fm == 0.0) return m;
        if ((fm < 0) == (fa < 0)) {
            a = std::move(m);
            fa = fm;
        } else {
            b = std::move(m);
        }
        if (distance_inf(a, b) < 1e-15 * (1.0 + norm_inf(a))) return 0.5 * (a + b);
    }
    return 0.5 * (a + b);
}

}  // namespace

std::vector<Polyline> trace_critical_contour(const NonlinearMap& map, const Box& box, std::size_t grid_n)
{
    if (map.dim != 2 || !map.smooth()) throw std::invalid_argument("trace_critical_contour: smooth planar maps only");
    if (grid_n < 2) throw std::invalid_argument("trace_critical_contour: grid_n must be >= 2");
    const std::size_t m = grid_n;
    auto node = [&](std::size_t i, std::size_t j) {
        const double fx = static_cast<double>(i) / static_cast<double>(m - 1);
        const double fy = static_cast<double>(j) / static_cast<double>(m - 1);
        return Vector{box.lower[0] + fx * (box.upper[0] - box.lower[0]),
                      box.lower[1] + fy * (box.upper[1] - box.lower[1])};
    };
    std::vector<double> val(m * m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i) val[j * m + i] = jacobian_det2(map, node(i, j));
    auto v = [&](std::size_t i, std::size_t j) { return val[j * m + i]; };
    auto neg = [](double x) { return x < 0.0; };

    // edge ids: horizontal (i,j)-(i+1,j) -> 2*(j*m+i); vertical (i,j)-(i,j+1) -> 2*(j*m+i)+1
    auto hid = [&](std::size_t i, std::size_t j) { return 2 * (j * m + i); };
    auto vid = [&](std::size_t i, std::size_t j) { return 2 * (j * m + i) + 1; };

    std::map<std::size_t, std::vector<std::size_t>> adjacency;
    auto link = [&](std::size_t a, std::size_t b) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    };

    for (std::size_t j = 0; j + 1 < m; ++j) {
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const bool s00 = neg(v(i, j)), s10 = neg(v(i + 1, j)), s11 = neg(v(i + 1, j + 1)), s01 = neg(v(i, j + 1));
            const std::size_t bottom = hid(i, j), right = vid(i + 1, j), top = hid(i, j + 1), left = vid(i, j);
            std::vector<std::size_t> cut;
            if (s00 != s10) cut.push_back(bottom);
            if (s10 != s11) cut.push_back(right);
            if (s11 != s01) cut.push_back(top);
            if (s01 != s00) cut.push_back(left);
            if (cut.size() == 2) {
                link(cut[0], cut[1]);
            } else if (cut.size() == 4) {
                const Vector centre = 0.5 * (node(i, j) + node(i + 1, j + 1));
                const bool sc = neg(jacobian_det2(map, centre));
                if (sc == s00) {
                    link(bottom, right);
                    link(top, left);
                } else {
                    link(left, bottom);
                    link(right, top);
                }
            }
        }
    }

    auto edge_point = [&](std::size_t id) {
        const std::size_t cell = id / 2;
        const std::size_t i = cell % m, j = cell / m;
        const Vector a = node(i, j);
        const Vector b = (id % 2 == 0) ? node(i + 1, j) : node(i, j + 1);
        const double fa = v(i, j);
        if (fa == 0.0) return a;
        return refine_on_edge(map, a, fa, b);
    };

    std::vector<Polyline> out;
    std::map<std::size_t, bool> used;
    auto walk = [&](std::size_t start) {
        Polyline line;
        std::size_t prev = start, cur = start;
        used[start] = true;
        line.vertices.push_back(edge_point(start));
        for (;;) {
            std::size_t next = cur;
            bool found = false;
            for (std::size_t cand : adjacency[cur]) {
                if (cand == prev && adjacency[cur].size() > 1 && cur != start) continue;
                if (cand == start && cur != start && line.vertices.size() > 2) {
                    line.closed = true;
                    return line;
                }
                if (!used[cand]) {
                    next = cand;
                    found = true;
                    break;
                }
            }
            if (!found) return line;
            used[next] = true;
            line.vertices.push_back(edge_point(next));
            prev = cur;
            cur = next;
        }
    };
    for (const auto& [id, nbrs] : adjacency)
        if (nbrs.size() == 1 && !used[id]) out.push_back(walk(id));
    for (const auto& [id, nbrs] : adjacency)
        if (!used[id]) out.push_back(walk(id));
    return out;
}

}  // namespace foldcont
