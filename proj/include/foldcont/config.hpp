#pragma once

#include "foldcont/continuation.hpp"
#include "foldcont/linalg/vector.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace foldcont {

enum class ProblemKind { planar, sl, elliptic };

[[nodiscard]] const char* to_string(ProblemKind k) noexcept;

/// One search line. The base is a point ("x,y") for planar problems, one of
/// lazer_mckenna_positive / lazer_mckenna_negative / sampled for
/// Sturm-Liouville, and always P0 for the elliptic problem. The direction
/// holds coordinates (planar) or coefficients of the first eigenvectors.
struct LineSpec {
    std::string base;
    bool polish = false;  // planar: Newton the base onto F(u) = g first
    std::vector<double> direction;
    std::optional<double> s_min;
    std::optional<double> s_max;
    std::optional<std::size_t> max_depth;
};

struct ExperimentConfig {
    ProblemKind kind = ProblemKind::planar;

    // planar
    std::string map = "zcubic";
    double coefficient = 2.5;           // zcubic only
    std::optional<Vector> target_point;  // g = F(point); default: base of the first line
    Vector box_min{-4.0, -4.0};
    Vector box_max{4.0, 4.0};
    std::size_t multistart_grid = 41;
    std::size_t contour_grid = 200;

    // Sturm-Liouville
    std::size_t n = 15;
    std::optional<std::size_t> k;
    std::optional<double> ell_minus;
    std::optional<double> ell_plus;
    double amplitude = 1000.0;  // g = -amplitude sin(I_h) or -amplitude phi_1
    std::size_t sampling_budget = 20000;
    std::string oracle_bank;  // optional bank.csv to verify against
    double verify_tol = 1e-6;

    // elliptic
    double spacing = 0.05;
    double gap_fraction = 0.1;
    double vertical_range = 1e4;
    std::size_t expected_solutions = 6;
    std::size_t track_samples = 201;

    std::vector<LineSpec> lines;
    ContinuationConfig continuation;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// INI text: [problem], [line1]..[lineN], [continuation], [multistart],
/// [sampling], [verify], [run]. Unknown sections or keys, unparsable values
/// and inconsistent settings throw ConfigError.
[[nodiscard]] ExperimentConfig parse_config(std::istream& in);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Comma- or whitespace-separated reals.
[[nodiscard]] std::vector<double> parse_reals(const std::string& text);

}  // namespace foldcont
