// Exhaustive oracle for solve_ilp_family on tiny trees. Works on node
// bitmasks and shares no search code with the branch-and-bound solver.

#include "pacset/errors.hpp"
#include "pacset/family.hpp"

#include <bit>
#include <cstdint>
#include <map>

namespace pacset {

namespace {

using Mask = std::uint32_t;

struct Removal {
    Mask closure = 0;
    std::vector<NodeId> roots;
    std::size_t leaves = 0;
    double retained = 0.0;
};

struct Key {
    std::size_t objective = 0;
    std::size_t holes = 0;
    std::vector<std::vector<NodeId>> roots;
};

bool key_less(const Key& a, const Key& b) {
    if (a.objective != b.objective) return a.objective < b.objective;
    if (a.holes != b.holes) return a.holes < b.holes;
    return a.roots < b.roots;
}

} // namespace

RemovalPlan brute_force_family(const AstTree& tree, const LevelGrid& grid, std::size_t max_holes,
                               std::size_t node_limit) {
    const std::size_t n = tree.size();
    if (n > node_limit || n > 20) {
        throw OracleLimitError("brute force oracle refuses trees with " + std::to_string(n)
                               + " nodes (limit " + std::to_string(node_limit) + ")");
    }
    if (grid.size() > kBruteForceLevelLimit) {
        throw OracleLimitError("brute force oracle refuses grids with more than "
                               + std::to_string(kBruteForceLevelLimit) + " levels");
    }

    std::vector<Mask> subtree(n, 0);
    Mask leaf_mask = 0;
    for (NodeId v = 0; v < n; ++v) {
        for (NodeId u = v; u < tree.subtree_end(v); ++u) subtree[v] |= Mask{1} << u;
        if (tree.is_leaf(v)) leaf_mask |= Mask{1} << v;
    }

    // Every distinct closure reachable with at most max_holes alpha choices.
    std::map<Mask, Removal> closures;
    for (Mask alpha = 0; alpha < (Mask{1} << n); ++alpha) {
        if (static_cast<std::size_t>(std::popcount(alpha)) > max_holes) continue;
        Mask beta = 0;
        for (NodeId v = 0; v < n; ++v) {
            if (alpha & (Mask{1} << v)) beta |= subtree[v];
        }
        if (closures.contains(beta)) continue;
        Removal r;
        r.closure = beta;
        for (NodeId v = 0; v < n; ++v) {
            const bool in = beta & (Mask{1} << v);
            const auto parent = tree.parent(v);
            if (in && (!parent || !(beta & (Mask{1} << *parent)))) r.roots.push_back(v);
            if (tree.is_leaf(v) && !in) r.retained += tree.nll(v).value_or(0.0);
        }
        r.leaves = static_cast<std::size_t>(std::popcount(beta & leaf_mask));
        closures.emplace(beta, std::move(r));
    }

    std::vector<std::vector<const Removal*>> options(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (const auto& [mask, r] : closures) {
            if (budget_met(r.retained, grid[i])) options[i].push_back(&r);
        }
        if (options[i].empty()) {
            throw InfeasibleError("no removal with at most " + std::to_string(max_holes)
                                  + " holes meets level " + std::to_string(i) + " budget");
        }
    }

    bool found = false;
    Key best;
    Key current;
    auto walk = [&](auto&& self, std::size_t level, Mask previous) -> void {
        if (level == grid.size()) {
            if (!found || key_less(current, best)) {
                best = current;
                found = true;
            }
            return;
        }
        for (const Removal* r : options[level]) {
            if ((previous & ~r->closure) != 0) continue;
            current.objective += r->leaves;
            current.holes += r->roots.size();
            current.roots.push_back(r->roots);
            self(self, level + 1, r->closure);
            current.roots.pop_back();
            current.holes -= r->roots.size();
            current.objective -= r->leaves;
        }
    };
    walk(walk, 0, 0);
    if (!found) throw InfeasibleError("no monotone chain satisfies every level");
    return make_plan(tree, best.roots);
}

} // namespace pacset
