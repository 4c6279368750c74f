#pragma once

#include "foldcont/config.hpp"
#include "foldcont/diagram.hpp"
#include "foldcont/svg.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace foldcont {

enum class Command { planar, sl_oracle, sl_diagram, elliptic };

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunOptions {
    bool strict = false;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

/// Files go to a sibling temporary directory; commit() renames it onto the
/// target in one step. Without commit() the temporary directory is removed.
class StagedOutput {
public:
    explicit StagedOutput(std::filesystem::path target);
    ~StagedOutput();
    StagedOutput(const StagedOutput&) = delete;
    StagedOutput& operator=(const StagedOutput&) = delete;

    void write(const std::string& name, const std::string& content);
    void commit();
    [[nodiscard]] const std::filesystem::path& staging() const noexcept { return tmp_; }

private:
    std::filesystem::path target_;
    std::filesystem::path tmp_;
    bool committed_ = false;
};

/// Runs one subcommand. The config must describe the matching problem kind.
/// Returns kExitOk, kExitConfig (bad or mismatched config; nothing written)
/// or kExitNumerical (numerical failure or, with strict, a failed check;
/// nothing written). Progress goes to `log`, diagnostics to `err`.
int run_command(Command cmd, const ExperimentConfig& cfg, const std::filesystem::path& out, const RunOptions& opts,
                std::ostream& log, std::ostream& err);

/// Same, loading the config first; a config that fails to parse gives
/// kExitConfig.
int run_command(Command cmd, const std::filesystem::path& config, const std::filesystem::path& out,
                const RunOptions& opts, std::ostream& log, std::ostream& err);

/// Branches as polylines under `project`. Along the root, s >= 0 is solid
/// and s <= 0 dotted; other branches are solid when traced with s
/// increasing, dotted otherwise.
[[nodiscard]] Plot diagram_plot(const std::vector<BifurcationDiagram>& diagrams,
                                const std::function<Point2(const BranchSample&)>& project, std::string title,
                                std::string x_label, std::string y_label, std::string note);

}  // namespace foldcont
