// Exact solver for the nested subtree-removal program.
//
// Variables per level i and node v: alpha (v roots a hole) and beta (v is
// removed). A level is fully described by its maximal roots, an antichain
// of at most m nodes. Level i+1 must cover every root of level i (beta
// monotone) and retained leaf NLL must fit tau_i. The objective is removed
// leaves summed over levels.
//
// Dynamic program from the last level down. For each antichain A:
//   own_i(A) = best suffix of levels i.. that starts with A (A feasible at i)
//   up_i(A)  = the B covering A with the best own_i(B)
// B covers A iff B is reachable from A by lifting a root to its parent
// (absorbing the roots beneath it) or adding a disjoint root. Each move
// grows the removed node set, so up_i is filled from larger sets down.
// Cost is O(levels * antichains * nodes).

#include "pacset/errors.hpp"
#include "pacset/family.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

namespace pacset {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct State {
    std::vector<NodeId> roots;
    std::size_t leaves = 0;
    std::size_t nodes = 0;
    double removed_nll = 0.0;
    std::vector<std::size_t> moves; // states covering this one in one step
};

struct Suffix {
    std::size_t cost = kNone; // kNone: infeasible
    std::size_t holes = 0;
    std::size_t next = kNone; // state chosen at the following level
};

class AntichainDp {
public:
    AntichainDp(const AstTree& tree, std::size_t max_holes) : tree_(tree), m_(max_holes) {
        std::vector<NodeId> current;
        enumerate(0, current);
        for (std::size_t s = 0; s < states_.size(); ++s) link(s);
        order_.resize(states_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            return states_[a].nodes > states_[b].nodes;
        });
    }

    std::vector<std::vector<NodeId>> solve(const LevelGrid& grid) const {
        const double total = tree_.subtree_nll(AstTree::root());
        const std::size_t n = states_.size();
        const std::size_t levels = grid.size();
        std::vector<std::vector<Suffix>> own(levels, std::vector<Suffix>(n));
        std::vector<std::size_t> up;

        for (std::size_t level = levels; level-- > 0;) {
            auto& cur = own[level];
            for (std::size_t s = 0; s < n; ++s) {
                const State& st = states_[s];
                if (!budget_met(total - st.removed_nll, grid[level])) continue;
                if (level + 1 == levels) {
                    cur[s] = {st.leaves, st.roots.size(), kNone};
                } else if (up[s] != kNone) {
                    const Suffix& rest = own[level + 1][up[s]];
                    cur[s] = {st.leaves + rest.cost, st.roots.size() + rest.holes, up[s]};
                }
            }
            up = best_cover(cur);
        }

        std::size_t s = up[empty_];
        if (s == kNone) {
            throw InfeasibleError("no removal plan with at most " + std::to_string(m_)
                                  + " holes meets every level budget");
        }
        std::vector<std::vector<NodeId>> path;
        for (std::size_t level = 0; level < levels; ++level) {
            path.push_back(states_[s].roots);
            s = own[level][s].next;
        }
        return path;
    }

private:
    std::vector<std::size_t> best_cover(const std::vector<Suffix>& own) const {
        auto key = [&](std::size_t s) {
            return std::tie(own[s].cost, own[s].holes, states_[s].roots);
        };
        std::vector<std::size_t> up(states_.size(), kNone);
        for (std::size_t s : order_) {
            std::size_t best = own[s].cost == kNone ? kNone : s;
            for (std::size_t t : states_[s].moves) {
                const std::size_t u = up[t];
                if (u != kNone && (best == kNone || key(u) < key(best))) best = u;
            }
            up[s] = best;
        }
        return up;
    }

    void enumerate(NodeId from, std::vector<NodeId>& current) {
        add_state(current);
        if (current.size() == m_) return;
        for (NodeId v = from; v < tree_.size(); ++v) {
            current.push_back(v);
            enumerate(tree_.subtree_end(v), current);
            current.pop_back();
        }
    }

    void add_state(const std::vector<NodeId>& roots) {
        State st;
        st.roots = roots;
        for (NodeId r : roots) {
            st.leaves += tree_.leaf_count(r);
            st.nodes += tree_.subtree_size(r);
            st.removed_nll += tree_.subtree_nll(r);
        }
        if (roots.empty()) empty_ = states_.size();
        index_.emplace(roots, states_.size());
        states_.push_back(std::move(st));
    }

    void link(std::size_t s) {
        const std::vector<NodeId> roots = states_[s].roots;
        std::vector<std::size_t> moves;
        for (NodeId r : roots) {
            const auto p = tree_.parent(r);
            if (!p) continue;
            std::vector<NodeId> lifted;
            for (NodeId q : roots) {
                if (!tree_.in_subtree(*p, q)) lifted.push_back(q);
            }
            lifted.insert(std::upper_bound(lifted.begin(), lifted.end(), *p), *p);
            moves.push_back(index_.at(lifted));
        }
        if (roots.size() < m_) {
            for (NodeId v = 0; v < tree_.size(); ++v) {
                const bool overlaps = std::any_of(roots.begin(), roots.end(), [&](NodeId q) {
                    return tree_.in_subtree(q, v) || tree_.in_subtree(v, q);
                });
                if (overlaps) continue;
                std::vector<NodeId> grown = roots;
                grown.insert(std::upper_bound(grown.begin(), grown.end(), v), v);
                moves.push_back(index_.at(grown));
            }
        }
        std::sort(moves.begin(), moves.end());
        moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
        states_[s].moves = std::move(moves);
    }

    const AstTree& tree_;
    std::size_t m_;
    std::vector<State> states_;
    std::map<std::vector<NodeId>, std::size_t> index_;
    std::vector<std::size_t> order_;
    std::size_t empty_ = 0;
};

} // namespace

RemovalPlan solve_ilp_family(const AstTree& tree, const LevelGrid& grid, std::size_t max_holes) {
    const AntichainDp dp(tree, max_holes);
    return make_plan(tree, dp.solve(grid));
}

} // namespace pacset
