#include "foldcont/sturm_liouville.hpp"

#include "foldcont/errors.hpp"
#include "foldcont/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace foldcont {

Vector SLDiscretization::sin_mode(std::size_t k) const
{
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(static_cast<double>(k) * mesh[i]);
    return v;
}

SLDiscretization build_discretization(std::size_t n)
{
    if (n < 2) throw std::invalid_argument("build_discretization: n must be >= 2");
    SLDiscretization d;
    d.n = n;
    d.h = std::numbers::pi / static_cast<double>(n + 1);
    const double h2 = d.h * d.h;
    d.a = Matrix(n, n);
    d.mesh = Vector(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.mesh[i] = static_cast<double>(i + 1) * d.h;
        d.a(i, i) = 2.0 / h2;
        if (i + 1 < n) d.a(i, i + 1) = d.a(i + 1, i) = -1.0 / h2;
    }
    for (std::size_t k = 1; k <= n; ++k) {
        d.eigenvalues.push_back((2.0 / h2) * (1.0 - std::cos(static_cast<double>(k) * d.h)));
        d.eigenvectors.push_back(normalized(d.sin_mode(k)));
    }
    if (n <= 200) {
        const auto check = sym_eigen(d.a);
        const double tol = 1e-10 * std::max(1.0, d.eigenvalues.back());
        for (std::size_t k = 0; k < n; ++k)
            if (std::abs(check[k].value - d.eigenvalues[k]) > tol)
                throw NoConvergence("build_discretization: closed-form spectrum disagrees with Jacobi");
    }
    return d;
}

PLParams slope_params_for_k(const SLDiscretization& disc, std::size_t k)
{
    if (k < 1 || k > disc.n) throw std::invalid_argument("slope_params_for_k: k out of range");
    PLParams p;
    p.ell_minus = disc.lambda(1) / 2.0;
    p.ell_plus = k < disc.n ? 0.5 * (disc.lambda(k) + disc.lambda(k + 1)) : disc.lambda(disc.n) + disc.lambda(1) / 2.0;
    return p;
}

void validate_params(const SLDiscretization& disc, const PLParams& p)
{
    if (!(p.ell_minus < disc.lambda(1))) throw std::invalid_argument("PLParams: ell_minus must lie below lambda_1");
    for (double l : disc.eigenvalues)
        if (std::abs(l - p.ell_minus) < 1e-10 || std::abs(l - p.ell_plus) < 1e-10)
            throw std::invalid_argument("PLParams: slope coincides with an eigenvalue");
}

Vector pl_eval(const SLDiscretization& disc, const PLParams& p, const Vector& u)
{
    Vector r = disc.a * u;
    for (std::size_t i = 0; i < u.size(); ++i) r[i] -= p.value(u[i]);
    return r;
}

Matrix orthant_matrix(const SLDiscretization& disc, const PLParams& p, const OrthantSignature& sig)
{
    if (sig.size() != disc.n) throw std::invalid_argument("orthant_matrix: signature length");
    Matrix m = disc.a;
    for (std::size_t i = 0; i < disc.n; ++i) m(i, i) -= p.slope_for_sign(sig[i]);
    return m;
}

NonlinearMap pl_map(const SLDiscretization& disc, const PLParams& p)
{
    NonlinearMap m;
    m.dim = disc.n;
    m.name = "sl-pl";
    m.eval = [disc, p](const Vector& u) { return pl_eval(disc, p, u); };
    m.is_orthant_linear = true;
    m.symmetric_jacobian = true;
    return m;
}

NonlinearMap sl_smooth_map(const SLDiscretization& disc, const ArctanNonlinearity& f)
{
    NonlinearMap m;
    m.dim = disc.n;
    m.name = "sl-smooth";
    BandMatrix band(disc.n, 1, 1);
    for (std::size_t i = 0; i < disc.n; ++i) {
        band.at(i, i) = disc.a(i, i);
        if (i + 1 < disc.n) {
            band.at(i, i + 1) = disc.a(i, i + 1);
            band.at(i + 1, i) = disc.a(i + 1, i);
        }
    }
    m.eval = [band, f](const Vector& u) {
        Vector r = band.apply(u);
        for (std::size_t i = 0; i < u.size(); ++i) r[i] -= f.value(u[i]);
        return r;
    };
    m.jacobian = [band, f](const Vector& u) {
        BandMatrix j = band;
        Vector d(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) d[i] = -f.slope(u[i]);
        j.add_to_diagonal(d);
        return SquareMatrix(std::move(j));
    };
    m.symmetric_jacobian = true;
    return m;
}

Vector sl_rhs(const SLDiscretization& disc, double t) { return -t * disc.sin_mode(1); }

namespace {

double pl_residual(const SLDiscretization& disc, const PLParams& p, const Vector& u, const Vector& g)
{
    const double r = norm2(pl_eval(disc, p, u) - g);
    const double gn = norm2(g);
    return r / std::max(gn, 1.0);
}

}  // namespace

std::optional<SolutionRecord> solve_in_orthant(const SLDiscretization& disc, const PLParams& p, const Vector& g,
                                               const OrthantSignature& sig, Provenance provenance)
{
    const Matrix m = orthant_matrix(disc, p, sig);
    const LUFactorization lu{SquareMatrix(m)};
    Vector u = lu.solve(g);
    if (!sig.admits(u)) return std::nullopt;
    SolutionRecord rec;
    rec.residual = pl_residual(disc, p, u, g);
    rec.morse_index = negative_eigenvalue_count(m);
    rec.signature = sig;
    rec.provenance = provenance;
    rec.u = std::move(u);
    return rec;
}

OracleReport orthant_oracle(const SLDiscretization& disc, const PLParams& p, const Vector& g, unsigned threads)
{
    const std::size_t n = disc.n;
    if (n > 24) throw std::invalid_argument("orthant_oracle: n must be <= 24");
    const std::size_t total = std::size_t{1} << n;
    const std::size_t chunk = 4096;
    const std::size_t chunks = (total + chunk - 1) / chunk;

    struct Partial {
        std::vector<SolutionRecord> found;
        std::vector<OrthantSignature> degenerate;
    };
    std::vector<Partial> parts(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        Partial& part = parts[c];
        const std::size_t end = std::min(total, (c + 1) * chunk);
        for (std::size_t bits = c * chunk; bits < end; ++bits) {
            const OrthantSignature sig = OrthantSignature::from_bits(n, bits);
            try {
                if (auto rec = solve_in_orthant(disc, p, g, sig, Provenance::oracle)) part.found.push_back(*rec);
            } catch (const SingularMatrix&) {
                part.degenerate.push_back(sig);
            }
        }
    });

    OracleReport report;
    report.orthants = total;
    for (auto& part : parts) {
        for (auto& r : part.found) report.bank.insert(std::move(r));
        for (auto& s : part.degenerate) report.degenerate.push_back(std::move(s));
    }
    return report;
}

std::pair<Vector, Vector> lazer_mckenna_pair(const SLDiscretization& disc, const PLParams& p, double t)
{
    if (!(t > 0)) throw std::invalid_argument("lazer_mckenna_pair: t must be positive");
    const double l1 = disc.lambda(1);
    if (!(p.ell_plus > l1) || !(p.ell_minus < l1))
        throw std::invalid_argument("lazer_mckenna_pair: need ell_minus < lambda_1 < ell_plus");
    const Vector s = disc.sin_mode(1);
    return {(t / (p.ell_plus - l1)) * s, (t / (p.ell_minus - l1)) * s};
}

std::size_t morse_index(const SLDiscretization& disc, const PLParams& p, const Vector& u)
{
    for (double x : u)
        if (std::abs(x) <= 1e-10) throw OnCriticalBoundary("morse_index: point lies on a switching hyperplane");
    return negative_eigenvalue_count(orthant_matrix(disc, p, OrthantSignature::of(u)));
}

// ---------------------------------------------------------------------------

namespace {

struct Cell {
    std::optional<LUFactorization> lu;
    int det = 0;
    double lambda = 0.0;  // sign(det) * smallest |eigenvalue|
    std::size_t morse = 0;
};

class CellCache {
public:
    CellCache(const SLDiscretization& disc, const PLParams& p) : disc_(disc), p_(p) {}

    const Cell& get(const OrthantSignature& sig)
    {
        auto it = cells_.find(sig);
        if (it != cells_.end()) return it->second;
        Cell c;
        const Matrix m = orthant_matrix(disc_, p_, sig);
        try {
            c.lu.emplace(SquareMatrix(m));
            c.det = c.lu->det_sign();
            c.lambda = c.det * std::abs(smallest_magnitude_eigenpair(m).value);
            c.morse = negative_eigenvalue_count(m);
        } catch (const SingularMatrix&) {
            c.det = 0;
        }
        return cells_.emplace(sig, std::move(c)).first->second;
    }

private:
    const SLDiscretization& disc_;
    const PLParams& p_;
    std::map<OrthantSignature, Cell> cells_;
};

struct Start {
    Vector u;
    double s;
    OrthantSignature sig;
    int sigma;
    std::size_t parent;
};

}  // namespace

BifurcationDiagram pl_bifurcation_diagram(const SLDiscretization& disc, const PLParams& p, const Vector& p0,
                                          const Vector& direction, const PLDiagramOptions& opts)
{
    const std::size_t n = disc.n;
    if (p0.size() != n || direction.size() != n) throw std::invalid_argument("pl_bifurcation_diagram: dimension");
    if (norm2(direction) == 0.0) throw std::invalid_argument("pl_bifurcation_diagram: zero direction");
    if (!(opts.s_min < opts.s_max)) throw std::invalid_argument("pl_bifurcation_diagram: empty s-range");

    const Vector g = pl_eval(disc, p, p0);
    auto line = [&](double s) { return p0 + s * direction; };
    auto gamma = [&](double s) { return pl_eval(disc, p, line(s)); };

    BifurcationDiagram diagram;
    diagram.base_point = p0;
    diagram.direction = direction;
    diagram.search_line = ImagePath::mapped_line(pl_map(disc, p), p0, direction);
    diagram.solutions = SolutionBank(1e-6, opts.residual_filter);

    // pieces of r between hyperplane crossings
    std::vector<double> edges{opts.s_min};
    {
        std::vector<double> bps;
        for (std::size_t i = 0; i < n; ++i) {
            if (direction[i] == 0.0) continue;
            const double b = -p0[i] / direction[i];
            if (b > opts.s_min && b < opts.s_max) bps.push_back(b);
        }
        std::sort(bps.begin(), bps.end());
        for (double b : bps)
            if (b > edges.back()) edges.push_back(b);
        edges.push_back(opts.s_max);
    }
    const std::size_t pieces = edges.size() - 1;
    std::vector<OrthantSignature> piece_sig(pieces);
    std::vector<Vector> piece_gprime(pieces);
    for (std::size_t j = 0; j < pieces; ++j) {
        piece_sig[j] = OrthantSignature::of(line(0.5 * (edges[j] + edges[j + 1])));
        piece_gprime[j] = orthant_matrix(disc, p, piece_sig[j]) * direction;
    }
    auto piece_of = [&](double s, int sigma) -> std::optional<std::size_t> {
        if (sigma > 0) {
            if (s < edges.front() || s >= edges.back()) return std::nullopt;
            const auto it = std::upper_bound(edges.begin(), edges.end(), s);
            return static_cast<std::size_t>(it - edges.begin()) - 1;
        }
        if (s <= edges.front() || s > edges.back()) return std::nullopt;
        const auto it = std::lower_bound(edges.begin(), edges.end(), s);
        return static_cast<std::size_t>(it - edges.begin()) - 1;
    };

    CellCache cache(disc, p);
    std::set<std::pair<OrthantSignature, std::size_t>> visited;

    auto harvest = [&](const Vector& u, const Cell& cell, const OrthantSignature& sig) {
        SolutionRecord rec;
        rec.residual = pl_residual(disc, p, u, g);
        rec.morse_index = cell.morse;
        rec.signature = sig;
        rec.provenance = Provenance::diagram;
        rec.u = u;
        if (!(rec.residual < opts.residual_filter)) {
            diagram.log.push_back("discarded candidate with relative residual " + format_number(rec.residual));
            return;
        }
        diagram.solutions.insert(std::move(rec));
    };

    // root branch: r itself
    Branch root;
    root.id = 0;
    std::deque<Start> queue;
    for (std::size_t j = 0; j < pieces; ++j) {
        const Cell& c = cache.get(piece_sig[j]);
        visited.insert({piece_sig[j], j});
        root.samples.push_back({edges[j], line(edges[j]), c.lambda});
        if (j + 1 == pieces) root.samples.push_back({edges[j + 1], line(edges[j + 1]), c.lambda});
        if (edges[j] <= 0.0 && 0.0 < edges[j + 1]) harvest(p0, c, OrthantSignature::of(p0));
        if (j + 1 == pieces) break;

        const double b = edges[j + 1];
        const Vector ub = line(b);
        const OrthantSignature& before = piece_sig[j];
        const OrthantSignature& after = piece_sig[j + 1];
        std::size_t flips = 0, flip_index = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (before[i] != after[i]) {
                ++flips;
                flip_index = i;
            }
        if (flips != 1) {
            diagram.log.push_back("r crosses several hyperplanes at s=" + format_number(b) + "; no spawn");
            continue;
        }
        const Cell& cb = cache.get(before);
        const Cell& ca = cache.get(after);
        if (cb.det == 0 || ca.det == 0 || cb.det == ca.det) continue;
        Crossing x;
        x.index = root.samples.size() - 1;
        x.t = b;
        x.frame.u = ub;
        x.frame.lambda = 0.0;
        x.frame.phi = unit_vector(n, flip_index);
        x.frame.psi = x.frame.phi;
        x.frame.transversality = ca.lambda - cb.lambda;
        x.frame.fold = true;
        root.crossings.push_back(x);
        if (opts.max_depth >= 1) {
            queue.push_back({ub, b, after, -1, 0});
            queue.push_back({ub, b, before, +1, 0});
        }
    }
    diagram.branches.push_back(std::move(root));

    while (!queue.empty()) {
        Start st = std::move(queue.front());
        queue.pop_front();
        Branch br;
        br.id = diagram.branches.size();
        br.parent = st.parent;
        br.depth = diagram.branches[st.parent].depth + 1;
        double s = st.s;
        int sigma = st.sigma;
        OrthantSignature sig = st.sig;
        Vector u = st.u;
        std::size_t steps = 0;
        for (;;) {
            if (++steps > opts.step_budget) {
                br.terminated_by = Termination::step_limit;
                diagram.log.push_back("branch " + std::to_string(br.id) + " hit the step budget");
                break;
            }
            const auto j = piece_of(s, sigma);
            if (!j) {
                br.terminated_by = Termination::range_end;
                break;
            }
            if (!visited.insert({sig, *j}).second) {
                br.terminated_by = Termination::merged;
                break;
            }
            const Cell& cell = cache.get(sig);
            if (cell.det == 0) {
                br.terminated_by = Termination::degenerate_crossing;
                diagram.log.push_back("singular orthant " + sig.str());
                break;
            }
            u = cell.lu->solve(gamma(s));
            const Vector v = cell.lu->solve(piece_gprime[*j]);
            br.samples.push_back({s, u, cell.lambda});

            double ev = sigma > 0 ? edges[*j + 1] - s : s - edges[*j];
            std::optional<std::size_t> evi;
            for (std::size_t i = 0; i < n; ++i) {
                const double rate = sigma * v[i];
                if (rate == 0.0 || (rate > 0) == (sig[i] > 0)) continue;
                const double dist = -u[i] / rate;
                if (dist > 1e-12 * (1.0 + std::abs(s)) && dist < ev) {
                    ev = dist;
                    evi = i;
                }
            }
            if ((0.0 - s) * sigma > 0 && std::abs(s) <= ev) harvest(cell.lu->solve(g), cell, sig);

            const double s_next = evi ? s + sigma * ev : (sigma > 0 ? edges[*j + 1] : edges[*j]);
            u.axpy(s_next - s, v);
            s = s_next;
            if (!evi) continue;

            u[*evi] = 0.0;
            std::size_t small = 0;
            for (double x : u) small += std::abs(x) < 1e-8 ? 1 : 0;
            if (small >= 2) {
                br.samples.push_back({s, u, cell.lambda});
                br.terminated_by = Termination::degenerate_crossing;
                diagram.log.push_back("branch " + std::to_string(br.id) + " met a degenerate crossing at s=" +
                                      format_number(s));
                break;
            }
            const OrthantSignature next = sig.flipped(*evi);
            const Cell& nc = cache.get(next);
            if (nc.det != 0 && nc.det != cell.det) {
                Crossing x;
                x.index = br.samples.size() - 1;
                x.t = s;
                x.frame.u = u;
                x.frame.phi = unit_vector(n, *evi);
                x.frame.psi = x.frame.phi;
                x.frame.transversality = nc.lambda - cell.lambda;
                x.frame.fold = true;
                br.crossings.push_back(std::move(x));
                br.samples.push_back({s, u, 0.0});
                sigma = -sigma;
            }
            sig = next;
        }
        if (br.samples.size() >= 1) diagram.branches.push_back(std::move(br));
    }
    return diagram;
}

OrthantSampler::OrthantSampler(const SLDiscretization& disc, const PLParams& p, Vector g, std::uint64_t seed)
    : disc_(disc), p_(p), g_(std::move(g)), rng_(seed)
{
    if (disc.n > 62) throw std::invalid_argument("OrthantSampler: n too large");
    total_ = std::uint64_t{1} << disc.n;
}

std::optional<SolutionRecord> OrthantSampler::next_solution(std::size_t max_draws,
                                                            const std::function<bool(const SolutionRecord&)>& accept)
{
    for (std::size_t k = 0; k < max_draws && !exhausted(); ++k) {
        std::uint64_t bits = 0;
        do {
            bits = rng_() & (total_ - 1);
        } while (!seen_.insert(bits).second);
        ++draws_;
        const OrthantSignature sig = OrthantSignature::from_bits(disc_.n, bits);
        std::optional<SolutionRecord> rec;
        try {
            rec = solve_in_orthant(disc_, p_, g_, sig, Provenance::sampling);
        } catch (const SingularMatrix&) {
        }
        if (!rec) continue;
        bank_.insert(*rec);
        if (!accept || accept(*rec)) return rec;
    }
    return std::nullopt;
}

SamplingReport random_orthant_sampling(const SLDiscretization& disc, const PLParams& p, const Vector& g,
                                       std::size_t budget, std::uint64_t seed)
{
    if (budget < 1) throw std::invalid_argument("random_orthant_sampling: budget must be >= 1");
    OrthantSampler sampler(disc, p, g, seed);
    SamplingReport report;
    while (!sampler.exhausted() && sampler.draws() < budget) {
        const bool hit = sampler.next_solution(budget - sampler.draws()).has_value();
        if (hit && !report.first_hit) report.first_hit = sampler.draws();
    }
    report.draws = sampler.draws();
    report.bank = sampler.bank();
    return report;
}

SLCampaignResult run_sl_campaign(const SLDiscretization& disc, const PLParams& p, const Vector& g,
                                 const SLCampaignOptions& opts)
{
    SLCampaignResult result;
    OrthantSampler sampler(disc, p, g, opts.seed);
    for (const auto& line : opts.lines) {
        Vector base;
        if (line.base == SLSearchLine::Base::sampled) {
            const auto rec = sampler.next_solution(opts.sampling_budget > sampler.draws()
                                                       ? opts.sampling_budget - sampler.draws()
                                                       : 0,
                                                   [&](const SolutionRecord& r) { return !result.bank.contains(r.u, 1e-6); });
            if (!rec) break;
            base = rec->u;
        } else {
            // the explicit pair solves F(u) = -t sin(I_h); recover t from g
            const Vector s1 = disc.sin_mode(1);
            const double t = -dot(g, s1) / dot(s1, s1);
            const auto pair = lazer_mckenna_pair(disc, p, t);
            base = line.base == SLSearchLine::Base::lazer_mckenna_positive ? pair.first : pair.second;
            if (pl_residual(disc, p, base, g) > 1e-10)
                throw std::invalid_argument("run_sl_campaign: right-hand side is not a multiple of sin(I_h)");
        }
        result.bases.push_back(base);
        result.draws_at_base.push_back(sampler.draws());
        result.diagrams.push_back(pl_bifurcation_diagram(disc, p, base, line.direction, line.options));
        result.bank.merge(result.diagrams.back().solutions);
    }
    result.sampled = sampler.bank();
    result.draws = sampler.draws();
    if (opts.include_sampled) result.bank.merge(result.sampled);
    return result;
}
}  // namespace foldcont
