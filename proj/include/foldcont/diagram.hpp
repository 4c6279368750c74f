#pragma once

#include "foldcont/linalg/vector.hpp"
#include "foldcont/solution_bank.hpp"
#include "foldcont/spectral_fold.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace foldcont {

enum class Termination {
    range_end,
    step_limit,
    divergence,
    left_region,
    merged,               // ran onto an existing branch
    degenerate_crossing,  // crossed C where two or more coordinates vanish
    no_progress,
};

[[nodiscard]] const char* to_string(Termination t) noexcept;

struct BranchSample {
    double t = 0.0;
    Vector u;
    double lambda = 0.0;
};

struct Crossing {
    std::size_t index = 0;  // crossing lies between samples index and index + 1
    double t = 0.0;
    FoldFrame frame;
};

struct Branch {
    std::size_t id = 0;
    std::optional<std::size_t> parent;
    std::size_t depth = 0;
    std::vector<BranchSample> samples;
    std::vector<Crossing> crossings;
    Termination terminated_by = Termination::range_end;
};

/// Tree of preimage branches of the image of a search line.
struct BifurcationDiagram {
    std::vector<Branch> branches;
    SolutionBank solutions;
    ImagePath search_line;
    Vector base_point;
    Vector direction;
    std::vector<std::string> log;

    [[nodiscard]] std::size_t max_depth() const noexcept;
};

/// branch_id,parent_id,t,lambda,u_1..u_n; the root's parent_id is -1.
void write_diagram_csv(const BifurcationDiagram& diagram, std::ostream& out);

}  // namespace foldcont
