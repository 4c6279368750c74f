#include "foldcont/continuation.hpp"

#include "foldcont/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>

namespace foldcont {

namespace {

double znorm(const Vector& u, double t) { return std::hypot(norm2(u), t); }

double zdist(const Vector& ua, double ta, const Vector& ub, double tb) { return std::hypot(distance(ua, ub), ta - tb); }

Vector u_part(const Vector& z) { return Vector(std::vector<double>(z.begin(), z.end() - 1)); }

double t_part(const Vector& z) { return z[z.size() - 1]; }

// One traced sample with what the stepper needs to keep.
struct Node {
    Vector u;
    double t = 0.0;
    Vector tangent;
    SpectralFrame frame;
    std::size_t index = 0;  // crossing_index of DF(u)
};

// How a tracer moves: the generic one predicts and corrects, the root one
// walks the domain line exactly.
struct Stepper {
    std::function<std::optional<Node>(const Node& from, double h)> step;
    // Point at arclength sigma along the secant from a to b, back on the branch.
    std::function<std::optional<std::pair<Vector, double>>(const Node& a, const Node& b, double sigma)> on_secant;
};

std::optional<Node> make_node(const NonlinearMap& map, Vector u, double t, const std::optional<SpectralFrame>& hint)
{
    try {
        const SquareMatrix jac = map.jacobian(u);
        Node n;
        n.frame = spectral_frame(jac, map.symmetric_jacobian, hint);
        n.index = crossing_index(map, jac);
        n.u = std::move(u);
        n.t = t;
        return n;
    } catch (const Error&) {
        return std::nullopt;
    }
}

struct TraceOutcome {
    std::vector<Node> nodes;
    Termination terminated_by = Termination::range_end;
};

// Adaptive stepping shared by every branch.
TraceOutcome trace(const Node& start, const Stepper& stepper, const ContinuationConfig& cfg, const PathLimits& limits)
{
    TraceOutcome out;
    out.nodes.push_back(start);
    double h = std::clamp(cfg.step_init, cfg.step_min, cfg.step_max);
    std::size_t successes = 0;
    std::size_t merged_run = 0;
    for (std::size_t step = 0;; ++step) {
        if (step >= cfg.max_steps) {
            out.terminated_by = Termination::step_limit;
            break;
        }
        const Node& cur = out.nodes.back();
        std::optional<Node> next = stepper.step(cur, h);
        bool ok = next.has_value();
        if (ok) {
            const std::size_t jumps = next->index > cur.index ? next->index - cur.index : cur.index - next->index;
            if (jumps > 1) ok = false;
            if (std::abs(next->frame.lambda - cur.frame.lambda) >= 0.5 * cur.frame.gap) ok = false;
            if (dot(next->tangent, cur.tangent) < 0.8) ok = false;
        }
        if (!ok) {
            successes = 0;
            if (h <= cfg.step_min) {
                if (next) {
                    // Accept at the minimal step rather than stall on a
                    // gap estimate; a failed corrector is a real stop.
                    ok = true;
                } else {
                    out.terminated_by = Termination::no_progress;
                    break;
                }
            } else {
                h = std::max(0.5 * h, cfg.step_min);
                continue;
            }
        }
        if (!all_finite(next->u.span()) || !std::isfinite(next->t)) {
            out.terminated_by = Termination::divergence;
            break;
        }
        out.nodes.push_back(std::move(*next));
        const Node& n = out.nodes.back();
        if (norm2(n.u) > limits.region_radius) {
            out.terminated_by = Termination::left_region;
            break;
        }
        if (n.t < limits.t_min || n.t > limits.t_max) {
            out.terminated_by = Termination::range_end;
            break;
        }
        if (out.nodes.size() > 8) {
            // A closed curve comes back to its start.
            const Node& prev = out.nodes[out.nodes.size() - 2];
            const double back = zdist(n.u, n.t, out.nodes.front().u, out.nodes.front().t);
            if (back <= zdist(n.u, n.t, prev.u, prev.t)) {
                out.terminated_by = Termination::merged;
                break;
            }
        }
        if (limits.on_existing_branch && limits.on_existing_branch(n.u, n.t)) {
            if (++merged_run >= 3) {
                out.terminated_by = Termination::merged;
                break;
            }
        } else {
            merged_run = 0;
        }
        if (++successes >= 3) {
            h = std::min(1.3 * h, cfg.step_max);
            successes = 0;
        }
    }
    return out;
}

// Illinois iteration on lambda along the secant of a step with one crossing,
// safeguarded by the crossing index.
std::optional<Crossing> refine(const NonlinearMap& map, const Stepper& stepper, const Node& a, const Node& b,
                               std::size_t index, const ContinuationConfig& cfg)
{
    const double len = zdist(a.u, a.t, b.u, b.t);
    double lo = 0.0;
    double hi = len;
    double flo = a.frame.lambda;
    double fhi = b.frame.lambda;
    const std::size_t idx_lo = a.index;
    int side = 0;
    std::optional<Node> best;
    for (int it = 0; it < 200; ++it) {
        double sigma = 0.5 * (lo + hi);
        if (flo * fhi < 0) {
            sigma = lo + (hi - lo) * flo / (flo - fhi);
            const double w = hi - lo;
            sigma = std::clamp(sigma, lo + 1e-3 * w, hi - 1e-3 * w);
        }
        auto p = stepper.on_secant(a, b, sigma);
        if (!p) {
            sigma = 0.5 * (lo + hi);
            p = stepper.on_secant(a, b, sigma);
            if (!p) break;
        }
        auto node = make_node(map, p->first, p->second, a.frame);
        if (!node) break;
        const double f = node->frame.lambda;
        best = std::move(node);
        if (std::abs(f) < cfg.crossing_tol) break;
        if (best->index == idx_lo) {
            lo = sigma;
            flo = f;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = sigma;
            fhi = f;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
        if (hi - lo <= 1e-15 * (1.0 + znorm(a.u, a.t))) break;
    }
    if (!best || std::abs(best->frame.lambda) >= kCriticalThreshold) return std::nullopt;
    Crossing c;
    c.index = index;
    c.t = best->t;
    c.frame = fold_test(map, best->u, default_fd_step(best->u), best->frame);
    return c;
}

std::vector<Crossing> refine_all(const NonlinearMap& map, const Stepper& stepper, const std::vector<Node>& nodes,
                                 const ContinuationConfig& cfg, std::vector<std::string>* log)
{
    std::vector<Crossing> out;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i].index == nodes[i + 1].index) continue;
        if (auto c = refine(map, stepper, nodes[i], nodes[i + 1], i, cfg)) {
            out.push_back(std::move(*c));
        } else if (log) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "crossing between samples %zu and %zu not refined", i, i + 1);
            log->emplace_back(buf);
        }
    }
    return out;
}

Stepper general_stepper(const NonlinearMap& map, const ImagePath& gamma, const ContinuationConfig& cfg)
{
    Stepper s;
    s.step = [&map, &gamma, &cfg](const Node& from, double h) -> std::optional<Node> {
        const Vector tu = u_part(from.tangent);
        const double tt = t_part(from.tangent);
        const CorrectorResult c = correct(map, gamma, from.u + h * tu, from.t + h * tt, from.tangent, cfg);
        if (!c.converged) return std::nullopt;
        if (zdist(c.u, c.t, from.u + h * tu, from.t + h * tt) > h) return std::nullopt;
        auto node = make_node(map, c.u, c.t, from.frame);
        if (!node) return std::nullopt;
        try {
            node->tangent = path_tangent(map, gamma, node->u, node->t, node->frame, from.tangent, cfg.alpha);
        } catch (const Error&) {
            return std::nullopt;
        }
        return node;
    };
    s.on_secant = [&map, &gamma, &cfg](const Node& a, const Node& b,
                                       double sigma) -> std::optional<std::pair<Vector, double>> {
        Vector sec = append(b.u - a.u, b.t - a.t);
        const double len = norm2(sec);
        if (len == 0.0) return std::nullopt;
        sec /= len;
        const CorrectorResult c =
            correct(map, gamma, a.u + sigma * u_part(sec), a.t + sigma * t_part(sec), sec, cfg);
        if (!c.converged) return std::nullopt;
        return std::make_pair(c.u, c.t);
    };
    return s;
}

Branch to_branch(const TraceOutcome& trace)
{
    Branch b;
    b.terminated_by = trace.terminated_by;
    for (const Node& n : trace.nodes) b.samples.push_back({n.t, n.u, n.frame.lambda});
    return b;
}

}  // namespace

// ---------------------------------------------------------------------------

CorrectorResult correct(const NonlinearMap& map, const ImagePath& gamma, const Vector& u_pred, double t_pred,
                        const Vector& tangent, const ContinuationConfig& cfg)
{
    CorrectorResult r;
    r.u = u_pred;
    r.t = t_pred;
    const Vector tu = u_part(tangent);
    const double tt = t_part(tangent);
    double last_step = INFINITY;
    for (std::size_t it = 0;; ++it) {
        const Vector g = gamma(r.t);
        const Vector res = map(r.u) - g;
        r.residual = norm2(res) / (1.0 + norm2(g));
        r.iterations = it;
        if (!std::isfinite(r.residual)) return r;
        if (r.residual <= cfg.corrector_tol) {
            r.converged = true;
            return r;
        }
        if (it >= cfg.corrector_max_iter) return r;
        BorderedSolution s;
        try {
            const double off = dot(tu, r.u - u_pred) + tt * (r.t - t_pred);
            s = bordered_solve(map.jacobian(r.u), -gamma.deriv(r.t), tu, tt, -res, -off);
        } catch (const Error&) {
            return r;
        }
        const double step = znorm(s.x, s.y);
        if (!std::isfinite(step)) return r;
        if (it >= 1 && step > last_step && step > 1e-12 * (1.0 + znorm(r.u, r.t))) return r;
        last_step = step;
        r.u += s.x;
        r.t += s.y;
    }
}

Vector path_tangent(const NonlinearMap& map, const ImagePath& gamma, const Vector& u, double t,
                    const SpectralFrame& frame, const std::optional<Vector>& previous, double alpha)
{
    const SquareMatrix jac = map.jacobian(u);
    const Vector gp = gamma.deriv(t);
    std::optional<Vector> tau;
    try {
        if (std::abs(frame.lambda) >= kCriticalThreshold) {
            tau = append(lu_solve(jac, gp), 1.0);
        } else if (std::abs(dot(frame.psi, gp)) > 1e-6 * norm2(gp)) {
            FoldFrame ff;
            ff.u = u;
            ff.lambda = frame.lambda;
            ff.phi = frame.phi;
            ff.psi = frame.psi;
            tau = homotopy_tangent(fold_tangent(jac, ff, gp, alpha));
        }
    } catch (const Error&) {
        tau.reset();
    }
    if (!tau || !all_finite(tau->span())) {
        if (!previous) throw SingularMatrix("path_tangent: no tangent at a singular point without a reference");
        const BorderedSolution s =
            bordered_solve(jac, -gp, u_part(*previous), t_part(*previous), Vector(u.size()), 1.0);
        tau = append(s.x, s.y);
    }
    Vector out = normalized(*tau);
    if (previous ? dot(out, *previous) < 0 : t_part(out) < 0) out *= -1.0;
    return out;
}

Branch continue_path(const NonlinearMap& map, const ImagePath& gamma, const Vector& u0, double t0,
                     const ContinuationConfig& cfg, const PathLimits& limits, const std::optional<Vector>& initial)
{
    if (!map.smooth()) throw std::invalid_argument("continue_path: map has no Jacobian");
    auto start = make_node(map, u0, t0, std::nullopt);
    if (!start) throw SingularMatrix("continue_path: no spectral frame at the start point");
    try {
        start->tangent = path_tangent(map, gamma, u0, t0, start->frame, initial, cfg.alpha);
    } catch (const Error&) {
        // Singular start (e.g. on a bifurcation point): trust the caller.
        if (!initial) throw;
        start->tangent = normalized(*initial);
    }
    const Stepper stepper = general_stepper(map, gamma, cfg);
    const TraceOutcome tr = trace(*start, stepper, cfg, limits);
    Branch b = to_branch(tr);
    b.crossings = refine_all(map, stepper, tr.nodes, cfg, nullptr);
    return b;
}

std::vector<Crossing> detect_crossings(const NonlinearMap& map, const ImagePath& gamma, const Branch& branch,
                                       const ContinuationConfig& cfg)
{
    std::vector<Node> nodes;
    std::optional<SpectralFrame> hint;
    for (const auto& s : branch.samples) {
        auto n = make_node(map, s.u, s.t, hint);
        if (!n) throw SingularMatrix("detect_crossings: no spectral frame at a sample");
        hint = n->frame;
        nodes.push_back(std::move(*n));
    }
    return refine_all(map, general_stepper(map, gamma, cfg), nodes, cfg, nullptr);
}

Vector mirror_tangent(const NonlinearMap& map, const FoldFrame& frame, const Vector& branch_tangent)
{
    const std::size_t n = frame.u.size();
    const Vector v = u_part(branch_tangent);
    const double tdot = t_part(branch_tangent);
    if (frame.transversality == 0.0) throw TransversalityFailure("mirror_tangent: not a fold");
    const double vn = norm2(v);
    double dv = 0.0;
    if (vn > 0) {
        SpectralFrame hint;
        hint.lambda = frame.lambda;
        hint.phi = frame.phi;
        hint.psi = frame.psi;
        dv = vn * lambda_derivative(map, frame.u, v / vn, default_fd_step(frame.u), hint);
    }
    Vector w = v;
    w.axpy(-2.0 * dv / frame.transversality, frame.phi);
    (void)n;
    return normalized(append(w, tdot));
}

std::vector<BranchSeed> spawn_at_fold(const NonlinearMap& map, const ImagePath& gamma, const FoldFrame& frame,
                                      double t_c, const Vector& branch_tangent, const ContinuationConfig& cfg)
{
    if (!frame.fold) return {};
    const Vector gp = gamma.deriv(t_c);
    const Vector& psi = frame.psi.empty() ? frame.phi : frame.psi;
    // Only points where gamma' is in Ran DF carry a second branch.
    if (std::abs(dot(psi, gp)) > 1e-6 * norm2(gp) + 10.0 * std::abs(frame.lambda)) return {};
    const Vector m = mirror_tangent(map, frame, branch_tangent);
    const double delta = cfg.spawn_offset.value_or(1e-2 * (1.0 + norm2(frame.u)));
    std::vector<BranchSeed> seeds;
    for (double sgn : {1.0, -1.0}) {
        const Vector dir = sgn * m;
        const Vector up = frame.u + delta * u_part(dir);
        const double tp = t_c + delta * t_part(dir);
        const CorrectorResult c = correct(map, gamma, up, tp, dir, cfg);
        if (!c.converged || zdist(c.u, c.t, up, tp) > 0.5 * delta) continue;
        seeds.push_back({c.u, c.t, dir});
    }
    return seeds;
}

Branch trace_root(const NonlinearMap& map, const Vector& p0, const Vector& dir, const ContinuationConfig& cfg)
{
    if (!map.smooth()) throw std::invalid_argument("trace_root: map has no Jacobian");
    const double scale = std::hypot(norm2(dir), 1.0);
    const Vector tangent = append(dir, 1.0) / scale;
    auto at = [&](double t, const std::optional<SpectralFrame>& hint) -> std::optional<Node> {
        auto n = make_node(map, p0 + t * dir, t, hint);
        if (n) n->tangent = tangent;
        return n;
    };
    auto half = [&](double sgn) {
        Stepper s;
        s.step = [&, sgn](const Node& from, double h) { return at(from.t + sgn * h / scale, from.frame); };
        PathLimits limits;
        limits.t_min = cfg.t_min;
        limits.t_max = cfg.t_max;
        auto start = at(0.0, std::nullopt);
        if (!start) throw SingularMatrix("trace_root: no spectral frame at P0");
        return trace(*start, s, cfg, limits);
    };
    TraceOutcome back = half(-1.0);
    TraceOutcome fwd = half(1.0);
    std::vector<Node> nodes(back.nodes.rbegin(), back.nodes.rend());
    nodes.insert(nodes.end(), fwd.nodes.begin() + 1, fwd.nodes.end());

    Stepper exact;
    exact.on_secant = [&](const Node& a, const Node& b, double sigma) -> std::optional<std::pair<Vector, double>> {
        const double len = zdist(a.u, a.t, b.u, b.t);
        const double t = a.t + (b.t - a.t) * sigma / len;
        return std::make_pair(p0 + t * dir, t);
    };
    TraceOutcome whole;
    whole.nodes = std::move(nodes);
    Branch b = to_branch(whole);
    // Ends at whichever side stopped for the more telling reason.
    b.terminated_by = fwd.terminated_by != Termination::range_end ? fwd.terminated_by : back.terminated_by;
    b.crossings = refine_all(map, exact, whole.nodes, cfg, nullptr);
    return b;
}

std::size_t solution_index(const NonlinearMap& map, const Vector& u)
{
    return crossing_index(map, map.jacobian(u));
}

std::vector<SolutionRecord> harvest(const NonlinearMap& map, const Vector& target, const Branch& branch,
                                    double t_target, double max_residual)
{
    std::vector<SolutionRecord> out;
    const auto& s = branch.samples;
    if (s.empty()) return out;
    NewtonOptions opts;
    opts.tol = 1e-14;
    opts.max_iter = 40;
    auto polish = [&](const Vector& guess, double reach) {
        const NewtonResult nr = damped_newton(map, target, guess, opts);
        if (!all_finite(nr.u.span()) || nr.residual >= max_residual) return;
        if (distance(nr.u, guess) > reach) return;
        SolutionRecord rec;
        rec.u = nr.u;
        rec.residual = nr.residual;
        rec.morse_index = solution_index(map, nr.u);
        rec.provenance = Provenance::continuation;
        out.push_back(std::move(rec));
    };
    auto spacing = [&](std::size_t i) {
        double h = 0.0;
        if (i > 0) h = std::max(h, distance(s[i].u, s[i - 1].u));
        if (i + 1 < s.size()) h = std::max(h, distance(s[i].u, s[i + 1].u));
        return 2.0 * h + 1e-8 * (1.0 + norm2(s[i].u));
    };
    // Passages of t through t_target.
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if ((s[i].t - t_target) * (s[i + 1].t - t_target) >= 0 && s[i].t != t_target) continue;
        const double th = s[i].t == s[i + 1].t ? 0.0 : (t_target - s[i].t) / (s[i + 1].t - s[i].t);
        polish(s[i].u + th * (s[i + 1].u - s[i].u), spacing(i));
    }
    if (s.back().t == t_target) polish(s.back().u, spacing(s.size() - 1));
    // The image curve may return to the target elsewhere: local minima of
    // the sampled residual.
    std::vector<double> r(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) r[i] = norm2(map(s[i].u) - target);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool left = i == 0 || r[i] <= r[i - 1];
        const bool right = i + 1 == s.size() || r[i] <= r[i + 1];
        if (left && right) polish(s[i].u, spacing(i));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Whether (u, t) lies on the curve traced by `b`: project onto the nearest
// secant, correct onto the branch inside the same hyperplane and compare.
bool lies_on(const NonlinearMap& map, const ImagePath& gamma, const Branch& b, const Vector& u, double t,
             const ContinuationConfig& cfg, std::size_t skip_tail = 0)
{
    const auto& s = b.samples;
    if (s.size() < 2 + skip_tail) return false;
    const double tol = cfg.merge_tol * (1.0 + znorm(u, t));
    for (std::size_t i = 0; i + 1 + skip_tail < s.size(); ++i) {
        Vector sec = append(s[i + 1].u - s[i].u, s[i + 1].t - s[i].t);
        const double len = norm2(sec);
        if (len == 0.0) continue;
        sec /= len;
        const Vector rel = append(u - s[i].u, t - s[i].t);
        const double sigma = dot(rel, sec);
        if (sigma < -tol || sigma > len + tol) continue;
        const double off = norm2(rel - sigma * sec);
        if (off > 0.5 * len + tol) continue;
        if (off <= tol) return true;
        const CorrectorResult c = correct(map, gamma, s[i].u + sigma * u_part(sec), s[i].t + sigma * t_part(sec), sec, cfg);
        if (c.converged && zdist(c.u, c.t, u, t) <= tol) return true;
    }
    return false;
}

}  // namespace

BifurcationDiagram build_diagram(const NonlinearMap& map, const Vector& p0, const Vector& dir,
                                 const ContinuationConfig& cfg)
{
    BifurcationDiagram d;
    d.solutions = SolutionBank(1e-6 * (1.0 + norm_inf(p0)));
    d.search_line = ImagePath::mapped_line(map, p0, dir);
    d.base_point = p0;
    d.direction = dir;
    const Vector target = map(p0);
    const double radius = cfg.region_radius.value_or(1e4 * (1.0 + norm2(p0)));
    char buf[256];

    Branch root = trace_root(map, p0, dir, cfg);
    root.id = 0;
    d.branches.push_back(std::move(root));
    {
        SolutionRecord r;
        r.u = p0;
        r.residual = relative_residual(map, p0, target);
        r.morse_index = solution_index(map, p0);
        r.provenance = Provenance::continuation;
        d.solutions.insert(std::move(r));
    }

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        const std::size_t bi = queue.front();
        queue.pop_front();
        if (d.branches[bi].depth >= cfg.max_depth) continue;
        const std::vector<Crossing> crossings = d.branches[bi].crossings;
        for (const Crossing& c : crossings) {
            if (!c.frame.fold) {
                std::snprintf(buf, sizeof buf, "branch %zu: crossing at t=%.6g is not a fold (D lambda . phi = %.3g)",
                              bi, c.t, c.frame.transversality);
                d.log.emplace_back(buf);
                continue;
            }
            // The kernel of [DF, -gamma'] is two-dimensional where branches
            // meet, so the branch tangent comes from the bracketing samples.
            const auto& s = d.branches[bi].samples;
            Vector tangent;
            try {
                if (bi == 0) {
                    tangent = normalized(append(dir, 1.0));
                } else {
                    const auto& a = s[c.index];
                    const auto& b = s[c.index + 1];
                    const Vector sec = normalized(append(b.u - a.u, b.t - a.t));
                    const Vector ta = path_tangent(map, d.search_line, a.u, a.t, spectral_frame(map, a.u), sec, cfg.alpha);
                    const Vector tb = path_tangent(map, d.search_line, b.u, b.t, spectral_frame(map, b.u), sec, cfg.alpha);
                    tangent = normalized(ta + tb);
                }
            } catch (const Error& e) {
                d.log.emplace_back(std::string("tangent at crossing failed: ") + e.what());
                continue;
            }
            std::vector<BranchSeed> seeds;
            try {
                seeds = spawn_at_fold(map, d.search_line, c.frame, c.t, tangent, cfg);
            } catch (const Error& e) {
                d.log.emplace_back(std::string("spawn failed: ") + e.what());
                continue;
            }
            for (const BranchSeed& seed : seeds) {
                bool known = false;
                for (const Branch& b : d.branches) known = known || lies_on(map, d.search_line, b, seed.u, seed.t, cfg);
                if (known) continue;
                PathLimits limits;
                limits.t_min = cfg.t_min;
                limits.t_max = cfg.t_max;
                limits.region_radius = radius;
                const std::size_t nb = d.branches.size();
                limits.on_existing_branch = [&, nb](const Vector& u, double t) {
                    for (std::size_t k = 0; k < nb; ++k)
                        if (lies_on(map, d.search_line, d.branches[k], u, t, cfg)) return true;
                    return false;
                };
                Branch child;
                try {
                    child = continue_path(map, d.search_line, seed.u, seed.t, cfg, limits, seed.tangent);
                } catch (const Error& e) {
                    d.log.emplace_back(std::string("continuation failed: ") + e.what());
                    continue;
                }
                child.id = nb;
                child.parent = bi;
                child.depth = d.branches[bi].depth + 1;
                std::snprintf(buf, sizeof buf, "branch %zu from branch %zu at t=%.6g: %zu samples, %s", nb, bi, c.t,
                              child.samples.size(), to_string(child.terminated_by));
                d.log.emplace_back(buf);
                d.branches.push_back(std::move(child));
                queue.push_back(nb);
            }
        }
    }

    for (const Branch& b : d.branches)
        for (SolutionRecord& r : harvest(map, target, b, 0.0)) d.solutions.insert(std::move(r));
    return d;
}

}  // namespace foldcont
