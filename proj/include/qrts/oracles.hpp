#pragma once

#include <variant>
#include <vector>

#include "qrts/graph.hpp"

namespace qrts {

enum class Task { Path, Steiner };

struct PathQuery {
    int source;
    int target;
    bool operator==(const PathQuery&) const = default;
};

struct SteinerQuery {
    std::vector<int> terminals; // distinct, stored sorted ascending
    bool operator==(const SteinerQuery&) const = default;
};

using Query = std::variant<PathQuery, SteinerQuery>;

inline Task task_of(const Query& q) {
    return std::holds_alternative<PathQuery>(q) ? Task::Path : Task::Steiner;
}

/** Edge id set; stored sorted ascending, no duplicates. */
struct Decision {
    Decision() = default;
    explicit Decision(std::vector<int> ids);

    std::vector<int> edge_ids;
    bool operator==(const Decision&) const = default;
};

/** Validate node ids against a topology; throws ValidationError. */
void validate_query(const Query& q, const GraphTopology& topo);

/**
 * Path query: true iff the edges form a simple path with endpoints exactly
 * {source, target}. Steiner query: true iff the edges form a tree whose node
 * set contains all terminals, or the set is empty and |terminals| == 1.
 */
bool is_feasible(const Query& query, const Decision& decision,
                 const GraphTopology& topo);

/** Sum of edge weights (ascending edge id) if feasible, +infinity otherwise. */
double decision_value(const Query& query, const Decision& decision,
                      const WeightedGraph& g);

/**
 * Deterministic Dijkstra. Equal-distance settle ties go to the smaller node
 * id; equal-distance predecessor ties go to the smaller edge id.
 */
Decision shortest_path(const WeightedGraph& g, int source, int target);

/**
 * Mehlhorn-style 2-approximation: Voronoi partition by multi-source shortest
 * paths, minimum spanning tree of terminal bridges, expansion, spanning tree
 * of the union, then pruning of non-terminal leaves. |terminals| == 2 is
 * delegated to shortest_path; |terminals| == 1 yields the empty decision.
 */
Decision steiner_tree_2approx(const WeightedGraph& g,
                              const std::vector<int>& terminals);

/** Exhaustive minimum Steiner tree; topology capped at 16 edges. */
Decision exact_steiner_bruteforce(const WeightedGraph& g,
                                  const std::vector<int>& terminals);

/** Exhaustive minimum simple path; topology capped at 10 nodes. */
Decision exact_path_bruteforce(const WeightedGraph& g, int source, int target);

/** Dispatch to shortest_path / steiner_tree_2approx on a combined graph. */
Decision infer(Task task, const WeightedGraph& combined, const Query& query);

} // namespace qrts
