#include "pacset/family.hpp"

#include "pacset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pacset {

LevelGrid::LevelGrid(std::vector<double> budgets)
    : budgets_(std::move(budgets)) {
    if (budgets_.empty()) throw InputError("level grid must not be empty");
    for (std::size_t i = 0; i < budgets_.size(); ++i) {
        const double b = budgets_[i];
        if (std::isnan(b) || b < 0.0) {
            throw InputError("level grid budgets must be non-negative numbers");
        }
        if (i > 0 && !(b < budgets_[i - 1])) {
            throw InputError("level grid budgets must be strictly decreasing");
        }
    }
}

bool budget_met(double retained_nll, double budget) {
    if (std::isinf(budget)) return true;
    return retained_nll <= budget + 1e-9 * std::max(1.0, std::abs(budget));
}

std::size_t RemovalPlan::total_holes() const {
    std::size_t holes = 0;
    for (const auto& level : levels) holes += level.roots.size();
    return holes;
}

bool operator==(const RemovalPlan& a, const RemovalPlan& b) {
    if (a.objective != b.objective || a.levels.size() != b.levels.size()) return false;
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        if (a.levels[i].roots != b.levels[i].roots || a.levels[i].removed != b.levels[i].removed
            || a.levels[i].feasible != b.levels[i].feasible) {
            return false;
        }
    }
    return true;
}

RemovalPlan make_plan(const AstTree& tree, std::vector<std::vector<NodeId>> roots_per_level) {
    RemovalPlan plan;
    for (auto& roots : roots_per_level) {
        PlanLevel level;
        level.roots = maximal_roots(tree, roots);
        for (NodeId r : level.roots) {
            for (NodeId v = r; v < tree.subtree_end(r); ++v) level.removed.push_back(v);
            plan.objective += tree.leaf_count(r);
        }
        plan.levels.push_back(std::move(level));
    }
    return plan;
}

std::string check_plan(const AstTree& tree, const LevelGrid& grid, std::size_t max_holes,
                       const RemovalPlan& plan) {
    if (plan.levels.size() != grid.size()) {
        return "plan has " + std::to_string(plan.levels.size()) + " levels but grid has "
               + std::to_string(grid.size());
    }
    std::size_t objective = 0;
    std::vector<bool> previous(tree.size(), false);
    for (std::size_t i = 0; i < plan.levels.size(); ++i) {
        const auto& level = plan.levels[i];
        const std::string where = "level " + std::to_string(i) + ": ";
        for (NodeId v : level.roots) {
            if (v >= tree.size()) return where + "unknown root id " + std::to_string(v);
        }
        for (NodeId v : level.removed) {
            if (v >= tree.size()) return where + "unknown removed id " + std::to_string(v);
        }
        if (maximal_roots(tree, level.roots) != level.roots) {
            return where + "roots are not sorted maximal elements";
        }
        if (level.feasible && level.roots.size() > max_holes) {
            return where + "uses more than " + std::to_string(max_holes) + " holes";
        }
        // removed must be exactly the downward closure of roots.
        std::vector<bool> removed(tree.size(), false);
        for (NodeId v : level.removed) removed[v] = true;
        std::vector<bool> closure(tree.size(), false);
        for (NodeId r : level.roots) {
            for (NodeId v = r; v < tree.subtree_end(r); ++v) closure[v] = true;
        }
        if (removed != closure) return where + "removed set is not the closure of its roots";
        if (!std::is_sorted(level.removed.begin(), level.removed.end())) {
            return where + "removed ids are not sorted";
        }
        double retained = 0.0;
        for (NodeId v = 0; v < tree.size(); ++v) {
            if (previous[v] && !removed[v]) return where + "drops a node removed at a looser level";
            if (tree.is_leaf(v)) {
                if (removed[v]) {
                    ++objective;
                } else {
                    retained += tree.nll(v).value_or(0.0);
                }
            }
        }
        if (!budget_met(retained, grid[i])) {
            return where + "retained nll " + std::to_string(retained) + " exceeds budget "
                   + std::to_string(grid[i]);
        }
        previous = std::move(removed);
    }
    if (objective != plan.objective) return "objective does not match removed leaf count";
    return {};
}

// --- greedy baseline -------------------------------------------------------

RemovalPlan greedy_family(const AstTree& tree, const LevelGrid& grid, std::size_t max_holes) {
    std::vector<NodeId> holes;
    std::vector<bool> removed(tree.size(), false);
    double retained = leaf_nll_total(tree);

    std::vector<std::vector<NodeId>> roots_per_level;
    std::vector<bool> feasible;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool ok = true;
        while (!budget_met(retained, grid[i])) {
            std::optional<NodeId> pick;
            double pick_score = -1.0;
            for (NodeId v = 0; v < tree.size(); ++v) {
                if (removed[v]) continue;
                double gain = tree.subtree_nll(v);
                std::size_t count = tree.subtree_size(v);
                std::size_t absorbed = 0;
                for (NodeId h : holes) {
                    if (tree.in_subtree(v, h)) {
                        gain -= tree.subtree_nll(h);
                        count -= tree.subtree_size(h);
                        ++absorbed;
                    }
                }
                if (holes.size() - absorbed + 1 > max_holes) continue;
                const double score = gain / static_cast<double>(count);
                if (score > pick_score) {
                    pick_score = score;
                    pick = v;
                }
            }
            if (!pick) {
                ok = false;
                holes.assign(1, AstTree::root());
                removed.assign(tree.size(), true);
                retained = 0.0;
                break;
            }
            const NodeId v = *pick;
            std::erase_if(holes, [&](NodeId h) { return tree.in_subtree(v, h); });
            holes.insert(std::upper_bound(holes.begin(), holes.end(), v), v);
            for (NodeId u = v; u < tree.subtree_end(v); ++u) removed[u] = true;
            retained = 0.0;
            for (NodeId u = 0; u < tree.size(); ++u) {
                if (tree.is_leaf(u) && !removed[u]) retained += tree.nll(u).value_or(0.0);
            }
        }
        roots_per_level.push_back(holes);
        feasible.push_back(ok);
    }
    RemovalPlan plan = make_plan(tree, std::move(roots_per_level));
    for (std::size_t i = 0; i < feasible.size(); ++i) plan.levels[i].feasible = feasible[i];
    return plan;
}

// --- materialisation -------------------------------------------------------

MonotoneFamily family_from_plan(TreePtr tree, const LevelGrid& grid, const RemovalPlan& plan) {
    if (!tree) throw InputError("family_from_plan: null tree");
    if (plan.levels.size() != grid.size()) {
        throw InputError("plan has " + std::to_string(plan.levels.size())
                         + " levels but the grid has " + std::to_string(grid.size()));
    }
    std::vector<bool> previous(tree->size(), false);
    MonotoneFamily family{tree, grid, {}};
    for (const auto& level : plan.levels) {
        for (NodeId v : level.roots) {
            if (v >= tree->size()) {
                throw InputError("plan references node " + std::to_string(v)
                                 + " outside a tree of " + std::to_string(tree->size()) + " nodes");
            }
        }
        PartialTree partial = remove_subtrees(tree, level.roots);
        for (NodeId v = 0; v < tree->size(); ++v) {
            if (previous[v] && !partial.is_removed(v)) {
                throw InputError("plan is not monotone: node " + std::to_string(v)
                                 + " reappears at a tighter level");
            }
            previous[v] = partial.is_removed(v);
        }
        family.levels.push_back(std::move(partial));
    }
    return family;
}

// --- grid ------------------------------------------------------------------

LevelGrid build_grid(std::span<const double> nll_samples, std::size_t levels,
                     GridOptions options) {
    if (levels < 2) throw InputError("grid needs at least 2 levels");
    if (nll_samples.empty()) throw InputError("grid needs at least one nll sample");
    std::vector<double> sorted(nll_samples.begin(), nll_samples.end());
    for (double x : sorted) {
        if (!std::isfinite(x) || x < 0.0) throw InputError("nll samples must be finite and >= 0");
    }
    std::sort(sorted.begin(), sorted.end());

    auto quantile = [&](double p) {
        const double h = p * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };

    std::vector<double> budgets{kNoBudget};
    const double steps = static_cast<double>(levels - 1);
    for (std::size_t j = 1; j < levels; ++j) {
        const double q = quantile(static_cast<double>(levels - 1 - j) / steps);
        if (q < budgets.back()) budgets.push_back(q);
    }
    if (options.append_zero && budgets.back() > 0.0) budgets.push_back(0.0);
    return LevelGrid(std::move(budgets));
}

// --- dispatch --------------------------------------------------------------

const char* to_string(Method method) {
    switch (method) {
    case Method::Ilp:
        return "ilp";
    case Method::Greedy:
        return "greedy";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    if (text == "ilp") return Method::Ilp;
    if (text == "greedy") return Method::Greedy;
    throw InputError("unknown method '" + std::string(text) + "' (expected ilp or greedy)");
}

RemovalPlan solve_family(Method method, const AstTree& tree, const LevelGrid& grid,
                         std::size_t max_holes) {
    return method == Method::Ilp ? solve_ilp_family(tree, grid, max_holes)
                                 : greedy_family(tree, grid, max_holes);
}

MonotoneFamily build_family(Method method, TreePtr tree, const LevelGrid& grid,
                            std::size_t max_holes) {
    const RemovalPlan plan = solve_family(method, *tree, grid, max_holes);
    return family_from_plan(std::move(tree), grid, plan);
}

} // namespace pacset
