#include "foldcont/config.hpp"
#include "foldcont/errors.hpp"
#include "foldcont/experiments.hpp"
#include "foldcont/solution_bank.hpp"
#include "foldcont/svg.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace foldcont;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t count_of(const std::string& hay, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

std::size_t data_rows(const fs::path& csv)
{
    std::istringstream in(slurp(csv));
    std::string line;
    std::size_t n = 0;
    std::getline(in, line);
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

// Fresh scratch directory per test case.
struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& tag)
    {
        dir = fs::temp_directory_path() / ("foldcont_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    fs::path file(const std::string& name, const std::string& content) const
    {
        const fs::path p = dir / name;
        std::ofstream(p) << content;
        return p;
    }
};

int run(Command cmd, const fs::path& config, const fs::path& out, RunOptions opts = {})
{
    std::ostringstream log, err;
    return run_command(cmd, config, out, opts, log, err);
}

const char* kSlN2 = R"([problem]
kind = sl
n = 2
ell_minus = -1
ell_plus = 4
amplitude = 1000

[line1]
base = lazer_mckenna_positive
direction = -0.8, 0.2
)";

}  // namespace

TEST_CASE("config: valid files parse")
{
    const auto c = parse(R"(# comment
[problem]
kind = planar
map = pleat
target = 0.5, -0.25

[line1]
base = 1, 2
direction = 0, 1
s_min = -3
s_max = 5
max_depth = 2

[continuation]
step_max = 0.25

[run]
seed = 7
)");
    CHECK(c.kind == ProblemKind::planar);
    CHECK(c.map == "pleat");
    REQUIRE(c.target_point);
    CHECK((*c.target_point)[1] == -0.25);
    REQUIRE(c.lines.size() == 1);
    CHECK(c.lines[0].direction == std::vector<double>{0.0, 1.0});
    CHECK(*c.lines[0].s_min == -3.0);
    CHECK(*c.lines[0].max_depth == 2);
    CHECK(c.continuation.step_max == 0.25);
    CHECK(c.seed == 7);

    const auto s = parse("[problem]\nkind = sl\nn = 15\nk = 9\n");
    CHECK(s.kind == ProblemKind::sl);
    CHECK(*s.k == 9);
    CHECK(s.lines.empty());

    for (const char* name : {"zcubic.ini", "pleat.ini", "quad.ini", "sl_oracle.ini", "sl_n2.ini", "sl_k4.ini",
                             "sl_k8.ini", "elliptic.ini"}) {
        CAPTURE(name);
        CHECK_NOTHROW((void)load_config(fs::path(FOLDCONT_CONFIG_DIR) / name));
    }
}

TEST_CASE("config: rejected input")
{
    CHECK_THROWS_AS((void)parse("[problem]\nkind = sl\nn = 15\nk = 9\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[problem]\nkind = sl\nn = 15\nk = 9\n[nonsense]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[problem]\nkind = sl\nn = 15\nk = 16\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[problem]\nkind = sl\nn = 15\nk = 0\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[problem]\nkind = sl\nn = 15\nk = 3\nell_plus = 2\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[problem]\nkind = sl\nn = 15\nk = abc\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[problem]\nkind = torus\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[problem]\nkind = planar\nmap = zcubic\n"), ConfigError);  // no line
    CHECK_THROWS_AS((void)parse("[problem]\nkind = planar\nmap = zcubic\n[line2]\nbase = 0, 0\ndirection = 0, 1\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse("[problem]\nkind = elliptic\nspacing = 0.5\n[line1]\nbase = p0\ndirection = 1\n"),
                    ConfigError);
    CHECK(parse_reals("1, 2.5 -3e2") == std::vector<double>{1.0, 2.5, -300.0});
}

TEST_CASE("svg: empty plot is still a complete document")
{
    const std::string svg = render_svg(Plot{"empty", "x", "y", "", {}});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<line") != std::string::npos);
    CHECK(parse_svg_polylines(svg).empty());
}

TEST_CASE("svg: styles, round trip and determinism")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    Plot p{"two branches", "s", "u", "note", {}};
    PlotSeries a{"a", {}, PlotSeries::Style::solid, ""};
    PlotSeries b{"b", {}, PlotSeries::Style::dotted, ""};
    for (int i = 0; i < 50; ++i) {
        a.points.push_back({u(rng), u(rng)});
        b.points.push_back({u(rng) * 1e-3, u(rng)});
    }
    p.series = {a, b};
    const std::string svg = render_svg(p);

    CHECK(count_of(svg, "<polyline") == 2);
    CHECK(count_of(svg, "stroke-dasharray") == 2);  // the dotted polyline and its legend swatch

    const auto back = parse_svg_polylines(svg);
    REQUIRE(back.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& src = p.series[k].points;
        REQUIRE(back[k].size() == src.size());
        for (std::size_t i = 0; i < src.size(); ++i)
            for (int c = 0; c < 2; ++c) CHECK(std::abs(back[k][i][c] - src[i][c]) <= 1e-9 * (1 + std::abs(src[i][c])));
    }
    CHECK(render_svg(p) == svg);
}

TEST_CASE("bank csv: write, read, write is idempotent")
{
    Scratch s("csv");
    REQUIRE(run(Command::sl_oracle, s.file("o.ini", "[problem]\nkind = sl\nn = 6\nk = 4\n"), s.dir / "out") == kExitOk);
    const std::string first = slurp(s.dir / "out" / "bank.csv");
    std::istringstream in(first);
    const SolutionBank bank = read_bank_csv(in);
    CHECK(bank.size() == data_rows(s.dir / "out" / "bank.csv"));
    CHECK(bank.size() > 1);
    std::ostringstream again;
    write_bank_csv(bank, again);
    CHECK(again.str() == first);
}

TEST_CASE("staged output: failures leave nothing behind")
{
    Scratch s("staged");
    const fs::path out = s.dir / "out";

    CHECK(run(Command::sl_oracle, s.file("bad.ini", "[problem]\nkind = sl\nn = 15\nk = 99\n"), out) == kExitConfig);
    CHECK_FALSE(fs::exists(out));
    CHECK(run(Command::planar, s.file("sl.ini", "[problem]\nkind = sl\nn = 4\nk = 2\n"), out) == kExitConfig);
    CHECK_FALSE(fs::exists(out));
    CHECK(run(Command::sl_oracle, s.dir / "missing.ini", out) == kExitConfig);
    CHECK_FALSE(fs::exists(out));

    for (const auto& e : fs::directory_iterator(s.dir))
        CHECK(e.path().filename().string().find("partial") == std::string::npos);

    CHECK(run(Command::sl_oracle, s.dir / "sl.ini", out) == kExitOk);
    CHECK(fs::exists(out / "bank.csv"));
    CHECK(fs::exists(out / "summary.txt"));
}

TEST_CASE("runs are reproducible byte for byte")
{
    Scratch s("det");
    const fs::path cfg = s.file("n2.ini", kSlN2);
    RunOptions o;
    o.seed = 3;
    REQUIRE(run(Command::sl_diagram, cfg, s.dir / "a", o) == kExitOk);
    REQUIRE(run(Command::sl_diagram, cfg, s.dir / "b", o) == kExitOk);
    for (const char* f : {"solutions.csv", "diagram_1.csv", "report.txt", "diagram.svg"}) {
        CAPTURE(f);
        const std::string a = slurp(s.dir / "a" / f);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(s.dir / "b" / f));
    }
}

TEST_CASE("sl-oracle counts at n = 15")
{
    Scratch s("oracle");
    for (auto [k, expect] : {std::pair{10, 100}, std::pair{13, 972}}) {
        const fs::path out = s.dir / ("k" + std::to_string(k));
        const fs::path cfg =
            s.file("k" + std::to_string(k) + ".ini", "[problem]\nkind = sl\nn = 15\nk = " + std::to_string(k) + "\n");
        REQUIRE(run(Command::sl_oracle, cfg, out) == kExitOk);
        const std::string summary = slurp(out / "summary.txt");
        CHECK(summary.find("count=" + std::to_string(expect) + "\n") != std::string::npos);
        CHECK(data_rows(out / "bank.csv") == static_cast<std::size_t>(expect));
    }
}

TEST_CASE("sl-diagram without mirror spawning returns the base only")
{
    Scratch s("depth");
    const fs::path out0 = s.dir / "d0";
    REQUIRE(run(Command::sl_diagram, s.file("d0.ini", std::string(kSlN2) + "[continuation]\nmax_depth = 0\n"), out0) ==
            kExitOk);
    CHECK(data_rows(out0 / "solutions.csv") == 1);

    const fs::path out1 = s.dir / "d1";
    RunOptions strict;
    strict.strict = true;
    REQUIRE(run(Command::sl_diagram, s.file("d1.ini", kSlN2), out1, strict) == kExitOk);
    CHECK(data_rows(out1 / "solutions.csv") == 4);
}

TEST_CASE("planar zcubic finds all nine zeros")
{
    Scratch s("planar");
    const fs::path out = s.dir / "z";
    REQUIRE(run(Command::planar, fs::path(FOLDCONT_CONFIG_DIR) / "zcubic.ini", out) == kExitOk);
    CHECK(data_rows(out / "solutions.csv") == 9);
    CHECK(fs::exists(out / "contours.svg"));
    CHECK(parse_svg_polylines(slurp(out / "diagram.svg")).size() >= 2);
}

TEST_CASE("elliptic below the first eigenvalue has a single solution")
{
    Scratch s("ell");
    const fs::path out = s.dir / "e";
    const fs::path cfg = s.file("e.ini", R"([problem]
kind = elliptic
spacing = 0.1
ell_minus = -1
ell_plus = 5
expected_solutions = 1
track_samples = 11

[line1]
base = p0
direction = 0.8, -0.1, -0.1
)");
    RunOptions strict;
    strict.strict = true;
    REQUIRE(run(Command::elliptic, cfg, out, strict) == kExitOk);
    CHECK(data_rows(out / "solutions.csv") == 1);
    const std::string report = slurp(out / "report.txt");
    CHECK(report.find("FLAG") == std::string::npos);
}
