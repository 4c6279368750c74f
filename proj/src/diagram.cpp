#include "foldcont/diagram.hpp"

#include <algorithm>
#include <ostream>

namespace foldcont {

const char* to_string(Termination t) noexcept
{
    switch (t) {
    case Termination::range_end: return "range_end";
    case Termination::step_limit: return "step_limit";
    case Termination::divergence: return "divergence";
    case Termination::left_region: return "left_region";
    case Termination::merged: return "merged";
    case Termination::degenerate_crossing: return "degenerate_crossing";
    case Termination::no_progress: return "no_progress";
    }
    return "unknown";
}

std::size_t BifurcationDiagram::max_depth() const noexcept
{
    std::size_t d = 0;
    for (const auto& b : branches) d = std::max(d, b.depth);
    return d;
}

void write_diagram_csv(const BifurcationDiagram& diagram, std::ostream& out)
{
    const std::size_t n = diagram.base_point.size();
    out << "branch_id,parent_id,t,lambda";
    for (std::size_t i = 1; i <= n; ++i) out << ",u_" << i;
    out << '\n';
    for (const auto& b : diagram.branches) {
        const std::string parent = b.parent ? std::to_string(*b.parent) : std::string("-1");
        for (const auto& s : b.samples) {
            out << b.id << ',' << parent << ',' << format_number(s.t) << ',' << format_number(s.lambda);
            for (double x : s.u) out << ',' << format_number(x);
            out << '\n';
        }
    }
}

}  // namespace foldcont
