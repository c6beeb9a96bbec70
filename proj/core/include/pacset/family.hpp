#ifndef PACSET_FAMILY_HPP
#define PACSET_FAMILY_HPP

#include "pacset/ast.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace pacset {

inline constexpr double kNoBudget = std::numeric_limits<double>::infinity();

/// Strictly decreasing NLL budgets; level 0 is the loosest.
class LevelGrid {
public:
    explicit LevelGrid(std::vector<double> budgets);

    std::size_t size() const noexcept { return budgets_.size(); }
    double operator[](std::size_t level) const { return budgets_.at(level); }
    const std::vector<double>& budgets() const noexcept { return budgets_; }

    friend bool operator==(const LevelGrid&, const LevelGrid&) = default;

private:
    std::vector<double> budgets_;
};

/// Whether a retained NLL mass fits a budget, with a relative slack of 1e-9
/// so that budgets derived from the same sums compare as met.
bool budget_met(double retained_nll, double budget);

struct PlanLevel {
    std::vector<NodeId> roots;   // maximal removed subtree roots, sorted
    std::vector<NodeId> removed; // every removed node, sorted
    bool feasible = true;        // false when a heuristic fell back to root removal
};

struct RemovalPlan {
    std::vector<PlanLevel> levels;
    /// Removed leaves summed over all levels.
    std::size_t objective = 0;

    std::size_t total_holes() const;

    friend bool operator==(const RemovalPlan& a, const RemovalPlan& b);
};

/// Expands removal roots to the full removed-node set of each level and
/// recomputes the objective.
RemovalPlan make_plan(const AstTree& tree, std::vector<std::vector<NodeId>> roots_per_level);

/// Checks every plan invariant against `tree`, `grid` and `max_holes`.
/// Returns an empty string when valid, otherwise a description of the first
/// violation.
std::string check_plan(const AstTree& tree, const LevelGrid& grid, std::size_t max_holes,
                       const RemovalPlan& plan);

/// Exact minimum-objective plan, by dynamic programming over antichains of
/// at most `max_holes` removal roots, from the tightest level up.
///
/// Ties are broken by fewer holes summed over levels, then by the
/// lexicographically smallest per-level root id lists.
/// Throws InfeasibleError when `max_holes == 0` and a finite budget is below
/// the tree's NLL.
RemovalPlan solve_ilp_family(const AstTree& tree, const LevelGrid& grid, std::size_t max_holes);

inline constexpr std::size_t kBruteForceNodeLimit = 12;
inline constexpr std::size_t kBruteForceLevelLimit = 3;

/// Exhaustive enumeration of monotone chains; same tie-break as the solver.
/// Throws OracleLimitError above `node_limit` nodes or three levels.
RemovalPlan brute_force_family(const AstTree& tree, const LevelGrid& grid, std::size_t max_holes,
                               std::size_t node_limit = kBruteForceNodeLimit);

/// Baseline: per level, repeatedly hole the retained subtree with the highest
/// NLL removed per node removed until the budget is met.
RemovalPlan greedy_family(const AstTree& tree, const LevelGrid& grid, std::size_t max_holes);

/// Nested completion sets indexed by grid level, loosest first.
struct MonotoneFamily {
    TreePtr source;
    LevelGrid grid{{kNoBudget}};
    std::vector<PartialTree> levels;
};

/// Throws InputError when the plan does not fit the tree or the grid.
MonotoneFamily family_from_plan(TreePtr tree, const LevelGrid& grid, const RemovalPlan& plan);

struct GridOptions {
    /// Append a zero budget when the lowest quantile is positive.
    bool append_zero = false;
};

/// +inf followed by `levels - 1` quantiles of `nll_samples` at probabilities
/// (L-2)/(L-1), ..., 1/(L-1), 0 (linear interpolation), deduplicated.
LevelGrid build_grid(std::span<const double> nll_samples, std::size_t levels,
                     GridOptions options = {});

enum class Method { Ilp, Greedy };

const char* to_string(Method method);
Method parse_method(std::string_view text);

RemovalPlan solve_family(Method method, const AstTree& tree, const LevelGrid& grid,
                         std::size_t max_holes);

/// Plans and materialises a family in one step.
MonotoneFamily build_family(Method method, TreePtr tree, const LevelGrid& grid,
                            std::size_t max_holes);

} // namespace pacset

#endif // PACSET_FAMILY_HPP
