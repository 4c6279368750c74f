#include "foldcont/config.hpp"

#include "foldcont/elliptic.hpp"
#include "foldcont/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace foldcont {

namespace pt = boost::property_tree;

const char* to_string(ProblemKind k) noexcept
{
    switch (k) {
    case ProblemKind::planar: return "planar";
    case ProblemKind::sl: return "sl";
    case ProblemKind::elliptic: return "elliptic";
    }
    return "?";
}

std::vector<double> parse_reals(const std::string& text)
{
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + tok + "'");
        }
        if (used != tok.size() || !std::isfinite(v)) throw ConfigError("not a finite number: '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

namespace {

// Reads typed values from one section and remembers which keys were used,
// so leftovers can be reported as unknown.
class Section {
public:
    Section(const std::string& name, const pt::ptree& tree) : name_(name), tree_(tree) {}

    [[nodiscard]] std::optional<std::string> text(const std::string& key)
    {
        used_.insert(key);
        const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        std::string s = *v;
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
    }

    [[nodiscard]] std::optional<double> real(const std::string& key)
    {
        const auto t = text(key);
        if (!t) return std::nullopt;
        const auto v = wrap(key, [&] { return parse_reals(*t); });
        if (v.size() != 1) fail(key, "expected one number");
        return v.front();
    }

    [[nodiscard]] std::optional<std::size_t> count(const std::string& key)
    {
        const auto v = real(key);
        if (!v) return std::nullopt;
        if (*v < 0 || std::floor(*v) != *v || *v > 1e15) fail(key, "expected a non-negative integer");
        return static_cast<std::size_t>(*v);
    }

    [[nodiscard]] std::optional<std::vector<double>> reals(const std::string& key)
    {
        const auto t = text(key);
        if (!t) return std::nullopt;
        return wrap(key, [&] { return parse_reals(*t); });
    }

    [[nodiscard]] std::optional<bool> flag(const std::string& key)
    {
        const auto t = text(key);
        if (!t) return std::nullopt;
        if (*t == "true" || *t == "1" || *t == "yes") return true;
        if (*t == "false" || *t == "0" || *t == "no") return false;
        fail(key, "expected true or false");
    }

    void finish() const
    {
        for (const auto& [key, child] : tree_) {
            if (!child.empty()) fail(key, "nested keys are not supported");
            if (!used_.count(key)) fail(key, "unknown key");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const
    {
        throw ConfigError("[" + name_ + "] " + key + ": " + why);
    }

private:
    template <class F>
    auto wrap(const std::string& key, F&& f) -> decltype(f())
    {
        try {
            return f();
        } catch (const ConfigError& e) {
            fail(key, e.what());
        }
    }

    std::string name_;
    const pt::ptree& tree_;
    std::set<std::string> used_;
};

template <class T>
void set_if(T& dst, const std::optional<T>& v)
{
    if (v) dst = *v;
}

void apply_continuation(Section& s, ContinuationConfig& c)
{
    set_if(c.step_init, s.real("step_init"));
    set_if(c.step_min, s.real("step_min"));
    set_if(c.step_max, s.real("step_max"));
    set_if(c.corrector_tol, s.real("corrector_tol"));
    set_if(c.corrector_max_iter, s.count("corrector_max_iter"));
    set_if(c.max_steps, s.count("max_steps"));
    set_if(c.crossing_tol, s.real("crossing_tol"));
    set_if(c.max_depth, s.count("max_depth"));
    set_if(c.alpha, s.real("alpha"));
    set_if(c.t_min, s.real("t_min"));
    set_if(c.t_max, s.real("t_max"));
    set_if(c.merge_tol, s.real("merge_tol"));
    if (auto v = s.real("spawn_offset")) c.spawn_offset = *v;
    if (auto v = s.real("region_radius")) c.region_radius = *v;
    if (!(c.step_min > 0 && c.step_min <= c.step_init && c.step_init <= c.step_max))
        s.fail("step_*", "need 0 < step_min <= step_init <= step_max");
    if (!(c.t_min < c.t_max)) s.fail("t_min", "need t_min < t_max");
    if (!(c.corrector_tol > 0)) s.fail("corrector_tol", "must be positive");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    ExperimentConfig cfg;
    std::map<std::size_t, const pt::ptree*> line_sections;
    const pt::ptree empty;
    auto section = [&](const std::string& name) -> const pt::ptree& {
        const auto it = tree.find(name);
        return it == tree.not_found() ? empty : it->second;
    };
    for (const auto& [name, child] : tree) {
        static const std::set<std::string> known = {"problem", "continuation", "multistart", "sampling", "verify", "run"};
        if (child.empty() && !child.data().empty()) throw ConfigError("key outside a section: " + name);
        if (known.count(name)) continue;
        if (name.rfind("line", 0) == 0 && name.size() > 4 &&
            std::all_of(name.begin() + 4, name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            const std::size_t idx = std::stoul(name.substr(4));
            if (idx == 0 || idx > 64) throw ConfigError("line sections are numbered 1..64: " + name);
            line_sections[idx] = &child;
            continue;
        }
        throw ConfigError("unknown section [" + name + "]");
    }

    {
        Section s("problem", section("problem"));
        const auto kind = s.text("kind");
        if (!kind) s.fail("kind", "missing");
        if (*kind == "planar")
            cfg.kind = ProblemKind::planar;
        else if (*kind == "sl")
            cfg.kind = ProblemKind::sl;
        else if (*kind == "elliptic")
            cfg.kind = ProblemKind::elliptic;
        else
            s.fail("kind", "expected planar, sl or elliptic");
        if (cfg.kind == ProblemKind::elliptic) cfg.continuation = default_elliptic_continuation();

        set_if(cfg.map, s.text("map"));
        set_if(cfg.coefficient, s.real("coefficient"));
        if (auto v = s.reals("target")) cfg.target_point = Vector(*v);
        set_if(cfg.n, s.count("n"));
        if (auto v = s.count("k")) cfg.k = *v;
        if (auto v = s.real("ell_minus")) cfg.ell_minus = *v;
        if (auto v = s.real("ell_plus")) cfg.ell_plus = *v;
        set_if(cfg.amplitude, s.real("amplitude"));
        set_if(cfg.spacing, s.real("spacing"));
        set_if(cfg.gap_fraction, s.real("gap_fraction"));
        set_if(cfg.vertical_range, s.real("vertical_range"));
        set_if(cfg.expected_solutions, s.count("expected_solutions"));
        set_if(cfg.track_samples, s.count("track_samples"));
        s.finish();

        if (cfg.kind == ProblemKind::planar) {
            if (cfg.map != "quad" && cfg.map != "pleat" && cfg.map != "zcubic")
                s.fail("map", "expected quad, pleat or zcubic");
            if (cfg.target_point && cfg.target_point->size() != 2) s.fail("target", "expected two coordinates");
        }
        if (cfg.kind == ProblemKind::sl) {
            if (cfg.n < 2) s.fail("n", "must be at least 2");
            if (cfg.k && (*cfg.k < 1 || *cfg.k > cfg.n)) s.fail("k", "must lie in 1..n");
            if (cfg.k && (cfg.ell_minus || cfg.ell_plus)) s.fail("k", "give either k or ell_minus/ell_plus");
            if (!cfg.k && !(cfg.ell_minus && cfg.ell_plus)) s.fail("k", "give k or both ell_minus and ell_plus");
            if (cfg.ell_minus && cfg.ell_plus && !(*cfg.ell_minus < *cfg.ell_plus))
                s.fail("ell_minus", "need ell_minus < ell_plus");
        }
        if (cfg.kind == ProblemKind::elliptic) {
            if (!(cfg.spacing > 0 && cfg.spacing < 0.2)) s.fail("spacing", "must lie in (0, 0.2)");
            if (!(cfg.gap_fraction > 0 && cfg.gap_fraction < 1)) s.fail("gap_fraction", "must lie in (0, 1)");
            if (cfg.k) s.fail("k", "not used by the elliptic problem");
            if (cfg.ell_plus && cfg.ell_minus && !(*cfg.ell_minus < *cfg.ell_plus))
                s.fail("ell_minus", "need ell_minus < ell_plus");
        }
    }
    {
        Section s("multistart", section("multistart"));
        if (auto v = s.reals("box_min")) cfg.box_min = Vector(*v);
        if (auto v = s.reals("box_max")) cfg.box_max = Vector(*v);
        set_if(cfg.multistart_grid, s.count("grid"));
        set_if(cfg.contour_grid, s.count("contour_grid"));
        s.finish();
        if (cfg.box_min.size() != 2 || cfg.box_max.size() != 2) s.fail("box_min", "expected two coordinates");
        if (!(cfg.box_min[0] < cfg.box_max[0] && cfg.box_min[1] < cfg.box_max[1])) s.fail("box_min", "empty box");
    }
    {
        Section s("sampling", section("sampling"));
        set_if(cfg.sampling_budget, s.count("budget"));
        s.finish();
    }
    {
        Section s("verify", section("verify"));
        set_if(cfg.oracle_bank, s.text("oracle_bank"));
        set_if(cfg.verify_tol, s.real("tol"));
        s.finish();
    }
    {
        Section s("run", section("run"));
        if (auto v = s.count("seed")) cfg.seed = *v;
        if (auto v = s.count("threads")) cfg.threads = static_cast<unsigned>(std::max<std::size_t>(*v, 1));
        s.finish();
    }
    {
        Section s("continuation", section("continuation"));
        apply_continuation(s, cfg.continuation);
        s.finish();
    }

    std::size_t expect = 1;
    for (const auto& [idx, tree_ptr] : line_sections) {
        const std::string name = "line" + std::to_string(idx);
        Section s(name, *tree_ptr);
        if (idx != expect++) s.fail("", "line sections must be numbered consecutively from 1");
        LineSpec l;
        set_if(l.base, s.text("base"));
        set_if(l.polish, s.flag("polish"));
        if (auto v = s.reals("direction")) l.direction = *v;
        if (auto v = s.real("s_min")) l.s_min = *v;
        if (auto v = s.real("s_max")) l.s_max = *v;
        if (auto v = s.count("max_depth")) l.max_depth = *v;
        s.finish();
        if (l.direction.empty()) s.fail("direction", "missing");
        if (std::all_of(l.direction.begin(), l.direction.end(), [](double x) { return x == 0.0; }))
            s.fail("direction", "must not vanish");
        if (l.s_min && l.s_max && !(*l.s_min < *l.s_max)) s.fail("s_min", "need s_min < s_max");
        switch (cfg.kind) {
        case ProblemKind::planar:
            if (l.direction.size() != 2) s.fail("direction", "expected two coordinates");
            if (parse_reals(l.base).size() != 2) s.fail("base", "expected two coordinates");
            break;
        case ProblemKind::sl:
            if (l.base != "lazer_mckenna_positive" && l.base != "lazer_mckenna_negative" && l.base != "sampled")
                s.fail("base", "expected lazer_mckenna_positive, lazer_mckenna_negative or sampled");
            if (l.direction.size() > cfg.n) s.fail("direction", "more coefficients than n");
            break;
        case ProblemKind::elliptic:
            if (!l.base.empty() && l.base != "p0") s.fail("base", "only p0 is supported");
            if (l.direction.size() > kAnnulusModes) s.fail("direction", "at most six coefficients");
            break;
        }
        cfg.lines.push_back(std::move(l));
    }
    if (cfg.lines.empty() && cfg.kind != ProblemKind::sl) throw ConfigError("at least one [line1] section is needed");
    if (cfg.kind == ProblemKind::elliptic && cfg.lines.size() != 1)
        throw ConfigError("the elliptic problem takes exactly one line");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in);
}

}  // namespace foldcont
