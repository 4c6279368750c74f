#include "foldcont/experiments.hpp"

#include "foldcont/continuation.hpp"
#include "foldcont/elliptic.hpp"
#include "foldcont/errors.hpp"
#include "foldcont/sturm_liouville.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace foldcont {

namespace fs = std::filesystem;

StagedOutput::StagedOutput(fs::path target) : target_(std::move(target))
{
    if (target_.filename().empty()) target_ = target_.parent_path();
    const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
    fs::create_directories(parent);
    tmp_ = parent / (target_.filename().string() + ".partial-" + std::to_string(::getpid()));
    fs::remove_all(tmp_);
    fs::create_directory(tmp_);
}

StagedOutput::~StagedOutput()
{
    if (!committed_) {
        std::error_code ec;
        fs::remove_all(tmp_, ec);
    }
}

void StagedOutput::write(const std::string& name, const std::string& content)
{
    std::ofstream out(tmp_ / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (tmp_ / name).string());
}

void StagedOutput::commit()
{
    fs::path old;
    if (fs::exists(target_)) {
        old = target_;
        old += ".old-" + std::to_string(::getpid());
        fs::remove_all(old);
        fs::rename(target_, old);
    }
    fs::rename(tmp_, target_);
    committed_ = true;
    if (!old.empty()) fs::remove_all(old);
}

Plot diagram_plot(const std::vector<BifurcationDiagram>& diagrams,
                  const std::function<Point2(const BranchSample&)>& project, std::string title, std::string x_label,
                  std::string y_label, std::string note)
{
    Plot plot;
    plot.title = std::move(title);
    plot.x_label = std::move(x_label);
    plot.y_label = std::move(y_label);
    plot.note = std::move(note);
    static const char* const colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    for (std::size_t di = 0; di < diagrams.size(); ++di) {
        const std::string colour = colours[di % 4];
        const std::string tag = diagrams.size() > 1 ? "line " + std::to_string(di + 1) + ": " : "";
        for (const auto& b : diagrams[di].branches) {
            if (b.samples.empty()) continue;
            if (b.depth == 0) {
                PlotSeries pos{tag + "s >= 0", {}, PlotSeries::Style::solid, colour};
                PlotSeries neg{tag + "s <= 0", {}, PlotSeries::Style::dotted, colour};
                for (const auto& s : b.samples) {
                    if (s.t >= 0) pos.points.push_back(project(s));
                    if (s.t <= 0) neg.points.push_back(project(s));
                }
                plot.series.push_back(std::move(pos));
                plot.series.push_back(std::move(neg));
                continue;
            }
            const bool up = b.samples.back().t >= b.samples.front().t;
            PlotSeries s{"", {}, up ? PlotSeries::Style::solid : PlotSeries::Style::dotted, colour};
            for (const auto& p : b.samples) s.points.push_back(project(p));
            plot.series.push_back(std::move(s));
        }
    }
    return plot;
}

namespace {

struct CheckFailed : Error {
    using Error::Error;
};

std::string bank_csv(SolutionBank bank)
{
    bank.sort_canonical();
    std::ostringstream os;
    write_bank_csv(bank, os);
    return os.str();
}

std::string diagram_csv(const BifurcationDiagram& d)
{
    std::ostringstream os;
    write_diagram_csv(d, os);
    return os.str();
}

std::string join(const std::vector<std::size_t>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

PlotSeries solution_markers(const SolutionBank& bank, const std::function<Point2(const Vector&)>& project)
{
    PlotSeries s{"solutions", {}, PlotSeries::Style::markers, "#000000"};
    for (const auto& r : bank.records()) s.points.push_back(project(r.u));
    return s;
}

ContinuationConfig line_continuation(const ExperimentConfig& cfg, const LineSpec& l)
{
    ContinuationConfig c = cfg.continuation;
    if (l.s_min) c.t_min = *l.s_min;
    if (l.s_max) c.t_max = *l.s_max;
    if (l.max_depth) c.max_depth = *l.max_depth;
    if (!(c.t_min < 0 && c.t_max > 0)) throw ConfigError("line s-range must contain 0");
    return c;
}

NonlinearMap planar_map(const ExperimentConfig& cfg)
{
    if (cfg.map == "quad") return quad_map();
    if (cfg.map == "pleat") return pleat_map();
    return zcubic_map(cfg.coefficient);
}

int cmd_planar(const ExperimentConfig& cfg, StagedOutput& out, const RunOptions&, std::ostream& log)
{
    const auto map = planar_map(cfg);
    const Vector g = map(cfg.target_point ? *cfg.target_point : Vector(parse_reals(cfg.lines.front().base)));
    const Box box(cfg.box_min, cfg.box_max);

    std::vector<BifurcationDiagram> diagrams;
    SolutionBank all;
    std::ostringstream summary;
    for (std::size_t i = 0; i < cfg.lines.size(); ++i) {
        const LineSpec& l = cfg.lines[i];
        Vector base(parse_reals(l.base));
        if (l.polish) {
            const auto nr = damped_newton(map, g, base);
            if (!nr.converged) throw NoConvergence("line " + std::to_string(i + 1) + ": Newton from the base failed");
            base = nr.u;
        } else if (relative_residual(map, base, g) > 1e-8) {
            throw ConfigError("line " + std::to_string(i + 1) + ": base is not a preimage of g (set polish = true)");
        }
        log << "line " << i + 1 << ": diagram from (" << format_number(base[0]) << ", " << format_number(base[1])
            << ")\n";
        diagrams.push_back(build_diagram(map, base, Vector(l.direction), line_continuation(cfg, l)));
        const auto& d = diagrams.back();
        std::size_t folds = 0;
        for (const auto& c : d.branches.front().crossings) folds += c.frame.fold ? 1 : 0;
        summary << "line" << i + 1 << ": branches=" << d.branches.size() << " root_folds=" << folds
                << " solutions=" << d.solutions.size() << '\n';
        out.write("diagram_" + std::to_string(i + 1) + ".csv", diagram_csv(d));
        all.merge(d.solutions);
    }

    const auto starts = multistart_preimages(map, g, box, cfg.multistart_grid, cfg.threads);
    SolutionBank multi;
    for (const auto& u : starts) {
        SolutionRecord r;
        r.u = u;
        r.residual = relative_residual(map, u, g);
        r.morse_index = solution_index(map, u);
        r.provenance = Provenance::multistart;
        multi.insert(r);
    }
    const std::size_t before = all.size();
    const std::size_t added = all.merge(multi);
    summary << "multistart: found=" << multi.size() << " new=" << added << '\n';
    summary << "diagrams: solutions=" << before << '\n';
    summary << "total: solutions=" << all.size() << '\n';
    out.write("solutions.csv", bank_csv(all));
    out.write("summary.txt", summary.str());
    log << summary.str();

    const auto contours = trace_critical_contour(map, box, cfg.contour_grid);
    auto xy = [](const Vector& u) { return Point2{u[0], u[1]}; };

    Plot cp;
    cp.title = map.name + ": critical set";
    cp.x_label = "x";
    cp.y_label = "y";
    for (const auto& c : contours) {
        PlotSeries s{"", {}, PlotSeries::Style::solid, "#444444"};
        for (const auto& v : c.vertices) s.points.push_back(xy(v));
        if (c.closed && !c.vertices.empty()) s.points.push_back(xy(c.vertices.front()));
        cp.series.push_back(std::move(s));
    }
    if (!cp.series.empty()) cp.series.front().label = "det DF = 0";
    cp.series.push_back(solution_markers(all, xy));
    out.write("contours.svg", render_svg(cp));

    Plot dp = diagram_plot(diagrams, [](const BranchSample& s) { return Point2{s.u[0], s.u[1]}; },
                           map.name + ": bifurcation diagram", "x", "y", "preimages of F(r) in the domain");
    for (const auto& c : contours) {
        PlotSeries s{"", {}, PlotSeries::Style::solid, "#bbbbbb"};
        for (const auto& v : c.vertices) s.points.push_back(xy(v));
        if (c.closed && !c.vertices.empty()) s.points.push_back(xy(c.vertices.front()));
        dp.series.push_back(std::move(s));
    }
    dp.series.push_back(solution_markers(all, xy));
    out.write("diagram.svg", render_svg(dp));
    return kExitOk;
}

struct SLSetup {
    SLDiscretization disc;
    PLParams p;
    Vector g;
    std::size_t k = 0;
};

SLSetup sl_setup(const ExperimentConfig& cfg)
{
    SLSetup s;
    s.disc = build_discretization(cfg.n);
    if (cfg.k) {
        s.p = slope_params_for_k(s.disc, *cfg.k);
    } else {
        s.p.ell_minus = *cfg.ell_minus;
        s.p.ell_plus = *cfg.ell_plus;
    }
    try {
        validate_params(s.disc, s.p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    s.g = sl_rhs(s.disc, cfg.amplitude);
    for (double l : s.disc.eigenvalues) s.k += l < s.p.ell_plus ? 1 : 0;
    return s;
}

int cmd_sl_oracle(const ExperimentConfig& cfg, StagedOutput& out, const RunOptions& opts, std::ostream& log)
{
    if (cfg.n > 24) throw ConfigError("sl-oracle: n must be at most 24");
    const SLSetup s = sl_setup(cfg);
    const auto rep = orthant_oracle(s.disc, s.p, s.g, cfg.threads);
    std::ostringstream line;
    line << "n=" << cfg.n << " k=" << s.k << " count=" << rep.bank.size() << '\n';
    log << line.str();
    if (!rep.degenerate.empty()) {
        log << "degenerate orthants: " << rep.degenerate.size() << '\n';
        if (opts.strict) throw CheckFailed("degenerate orthant matrices encountered");
    }
    std::ostringstream summary;
    summary << line.str() << "ell_minus=" << format_number(s.p.ell_minus) << " ell_plus=" << format_number(s.p.ell_plus)
            << "\northants=" << rep.orthants << " degenerate=" << rep.degenerate.size()
            << "\nmorse_histogram=" << join(rep.bank.morse_histogram()) << '\n';
    out.write("bank.csv", bank_csv(rep.bank));
    out.write("summary.txt", summary.str());
    return kExitOk;
}

int cmd_sl_diagram(const ExperimentConfig& cfg, StagedOutput& out, const RunOptions& opts, std::ostream& log)
{
    if (cfg.lines.empty()) throw ConfigError("sl-diagram needs at least one [line1] section");
    const SLSetup s = sl_setup(cfg);
    SLCampaignOptions co;
    co.seed = cfg.seed;
    co.sampling_budget = cfg.sampling_budget;
    for (const auto& l : cfg.lines) {
        SLSearchLine sl;
        sl.base = l.base == "lazer_mckenna_positive"   ? SLSearchLine::Base::lazer_mckenna_positive
                  : l.base == "lazer_mckenna_negative" ? SLSearchLine::Base::lazer_mckenna_negative
                                                       : SLSearchLine::Base::sampled;
        sl.direction = Vector(cfg.n);
        for (std::size_t j = 0; j < l.direction.size(); ++j) sl.direction.axpy(l.direction[j], s.disc.sin_mode(j + 1));
        if (l.s_min) sl.options.s_min = *l.s_min;
        if (l.s_max) sl.options.s_max = *l.s_max;
        sl.options.max_depth = l.max_depth.value_or(cfg.continuation.max_depth);
        co.lines.push_back(std::move(sl));
    }
    const auto res = run_sl_campaign(s.disc, s.p, s.g, co);

    SolutionBank reference;
    std::string ref_source;
    if (!cfg.oracle_bank.empty()) {
        std::ifstream in(cfg.oracle_bank);
        if (!in) throw ConfigError("cannot open oracle bank " + cfg.oracle_bank);
        reference = read_bank_csv(in);
        ref_source = cfg.oracle_bank;
    } else if (cfg.n <= 24) {
        reference = orthant_oracle(s.disc, s.p, s.g, cfg.threads).bank;
        ref_source = "orthant oracle";
    }

    std::ostringstream report;
    report << "n=" << cfg.n << " k=" << s.k << '\n';
    for (std::size_t i = 0; i < res.diagrams.size(); ++i) {
        report << "line" << i + 1 << ": base_s1=" << format_number(dot(res.bases[i], s.disc.eigenvectors[0]))
               << " branches=" << res.diagrams[i].branches.size() << " solutions=" << res.diagrams[i].solutions.size()
               << '\n';
        out.write("diagram_" + std::to_string(i + 1) + ".csv", diagram_csv(res.diagrams[i]));
    }
    report << "sampling_draws=" << res.draws << " sampled_solutions=" << res.sampled.size() << '\n';
    report << "solutions=" << res.bank.size() << '\n';
    report << "morse_histogram=" << join(res.bank.morse_histogram()) << '\n';
    bool mismatch = false;
    if (!ref_source.empty()) {
        const auto c = compare_banks(res.bank, reference, cfg.verify_tol);
        report << "reference=" << ref_source << " size=" << reference.size() << '\n';
        report << "matched=" << c.matched << " missed=" << c.missed << " spurious=" << c.spurious << '\n';
        mismatch = c.missed > 0 || c.spurious > 0;
    } else {
        report << "reference=none\n";
    }
    log << report.str();
    if (mismatch && opts.strict) throw CheckFailed("verification against the reference bank failed");

    out.write("solutions.csv", bank_csv(res.bank));
    out.write("report.txt", report.str());
    const Vector& phi1 = s.disc.eigenvectors[0];
    Plot dp = diagram_plot(res.diagrams, [&](const BranchSample& b) { return Point2{b.t, dot(phi1, b.u)}; },
                           "Sturm-Liouville bifurcation diagram", "s", "<phi_1, u>",
                           "projection (s, <phi_1, u>), phi_1 = unit sin(I_h)");
    out.write("diagram.svg", render_svg(dp));
    return kExitOk;
}

int cmd_elliptic(const ExperimentConfig& cfg, StagedOutput& out, const RunOptions& opts, std::ostream& log)
{
    const AnnulusGrid grid = build_annulus(cfg.spacing);
    const auto& lam = grid.eigenvalues;
    const LineSpec& l = cfg.lines.front();
    EllipticConfig ec;
    ec.ell_minus = cfg.ell_minus.value_or(-1.0);
    ec.ell_plus = cfg.ell_plus.value_or(lam[2] + cfg.gap_fraction * (lam[3] - lam[2]));
    if (!(ec.ell_minus < *ec.ell_plus)) throw ConfigError("need ell_minus < ell_plus");
    if (!(ec.ell_minus < lam[0])) throw ConfigError("ell_minus must lie below lambda_1");
    ec.amplitude = cfg.amplitude;
    ec.line = l.direction;
    ec.continuation = line_continuation(cfg, l);
    log << "grid: spacing=" << format_number(cfg.spacing) << " nodes=" << grid.size() << '\n';

    const auto r = solimini_experiment(grid, ec);
    const auto map = elliptic_map(grid, r.f);

    SolutionBank bank(r.diagram.solutions.dedup_tol(), 1.0);
    double max_res = 0.0;
    double fmin = INFINITY, fmax = -INFINITY;
    for (auto rec : r.diagram.solutions.records()) {
        rec.residual = relative_residual(map, rec.u, r.g);
        max_res = std::max(max_res, rec.residual);
        for (double x : rec.u) {
            fmin = std::min(fmin, r.f.slope(x));
            fmax = std::max(fmax, r.f.slope(x));
        }
        bank.insert(rec);
    }
    bank.sort_canonical();
    const std::size_t crossings =
        vertical_crossing_count(grid, r.f, Vector(grid.size()), -cfg.vertical_range, cfg.vertical_range);

    std::vector<std::size_t> morse;
    for (const auto& rec : bank.records()) morse.push_back(rec.morse_index);
    std::ostringstream report;
    report << "spacing=" << format_number(cfg.spacing) << " nodes=" << grid.size() << '\n';
    report << "ell_minus=" << format_number(r.f.ell_minus) << " ell_plus=" << format_number(r.f.ell_plus) << '\n';
    report << "n_solutions=" << bank.size() << " expected=" << cfg.expected_solutions
           << (bank.size() == cfg.expected_solutions ? "" : " FLAG: count differs from the expected value") << '\n';
    report << "morse=" << join(morse) << '\n';
    report << "max_relative_residual=" << format_number(max_res) << '\n';
    report << "slope_range=" << format_number(fmin) << "," << format_number(fmax) << '\n';
    report << "vertical_crossings=" << crossings << '\n';
    report << "branches=" << r.diagram.branches.size() << '\n';
    log << report.str();
    if (opts.strict && max_res >= 1e-12) throw CheckFailed("a solution has relative residual >= 1e-12");

    std::ostringstream spectrum;
    write_grid_header(grid, spectrum);
    out.write("spectrum.csv", spectrum.str());
    out.write("report.txt", report.str());
    out.write("solutions.csv", bank_csv(bank));
    out.write("diagram.csv", diagram_csv(r.diagram));
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const auto& rec = bank.records()[i];
        std::ostringstream f;
        write_field_csv(grid, rec.u, f);
        const std::string stem = "solution_" + std::to_string(i + 1);
        out.write(stem + ".csv", f.str());
        out.write(stem + ".svg", render_heatmap(grid.x, grid.y, std::vector<double>(rec.u.begin(), rec.u.end()),
                                                grid.spacing,
                                                "solution " + std::to_string(i + 1) + ", k = " +
                                                    std::to_string(rec.morse_index)));
    }

    const Vector& phi1 = grid.eigenvectors[0];
    Plot dp = diagram_plot({r.diagram}, [&](const BranchSample& b) { return Point2{b.t, grid.inner(phi1, b.u)}; },
                           "elliptic bifurcation diagram", "s", "<phi_1, u>", "projection (s, <phi_1, u>_h)");
    out.write("diagram.svg", render_svg(dp));

    // the four smallest eigenvalues of DF along the line
    std::ostringstream track;
    track << "s,mu_1,mu_2,mu_3,mu_4\n";
    Plot tp;
    tp.title = "four smallest eigenvalues of DF along r";
    tp.x_label = "s";
    tp.y_label = "mu";
    tp.series.resize(4);
    for (std::size_t j = 0; j < 4; ++j) tp.series[j].label = "mu_" + std::to_string(j + 1);
    const std::size_t m = std::max<std::size_t>(cfg.track_samples, 2);
    std::vector<Vector> start;
    for (std::size_t i = 0; i < m; ++i) {
        const double s = ec.continuation.t_min +
                         (ec.continuation.t_max - ec.continuation.t_min) * static_cast<double>(i) / static_cast<double>(m - 1);
        const auto pairs = lowest_eigenpairs(map.jacobian(r.p0 + s * r.direction), 4, start, 1e-10);
        start.clear();
        track << format_number(s);
        for (std::size_t j = 0; j < 4; ++j) {
            track << ',' << format_number(pairs.pairs[j].value);
            tp.series[j].points.push_back({s, pairs.pairs[j].value});
            start.push_back(pairs.pairs[j].vector);
        }
        track << '\n';
    }
    tp.series.push_back({"zero", {{ec.continuation.t_min, 0.0}, {ec.continuation.t_max, 0.0}}, PlotSeries::Style::dotted,
                         "#888888"});
    out.write("eigen_track.csv", track.str());
    out.write("eigen_track.svg", render_svg(tp));
    return kExitOk;
}

ProblemKind kind_for(Command c)
{
    switch (c) {
    case Command::planar: return ProblemKind::planar;
    case Command::sl_oracle:
    case Command::sl_diagram: return ProblemKind::sl;
    case Command::elliptic: return ProblemKind::elliptic;
    }
    return ProblemKind::planar;
}

}  // namespace

int run_command(Command cmd, const ExperimentConfig& config, const fs::path& out, const RunOptions& opts,
                std::ostream& log, std::ostream& err)
{
    ExperimentConfig cfg = config;
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.threads) cfg.threads = std::max(1u, *opts.threads);
    if (cfg.kind != kind_for(cmd)) {
        err << "config error: problem kind '" << to_string(cfg.kind) << "' does not match this subcommand\n";
        return kExitConfig;
    }
    try {
        StagedOutput staged(out);
        int code = kExitOk;
        switch (cmd) {
        case Command::planar: code = cmd_planar(cfg, staged, opts, log); break;
        case Command::sl_oracle: code = cmd_sl_oracle(cfg, staged, opts, log); break;
        case Command::sl_diagram: code = cmd_sl_diagram(cfg, staged, opts, log); break;
        case Command::elliptic: code = cmd_elliptic(cfg, staged, opts, log); break;
        }
        if (code == kExitOk) staged.commit();
        return code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const CheckFailed& e) {
        err << "check failed: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

int run_command(Command cmd, const fs::path& config, const fs::path& out, const RunOptions& opts, std::ostream& log,
                std::ostream& err)
{
    ExperimentConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return run_command(cmd, cfg, out, opts, log, err);
}

}  // namespace foldcont
