#include "qrts/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

namespace qrts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

struct UnionFind {
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
    std::vector<int> parent;
};

// Min-heap ordered by (distance, node id): equal-distance settles go to the
// smaller node id.
using DistQueue = std::priority_queue<std::pair<double, int>,
                                      std::vector<std::pair<double, int>>,
                                      std::greater<>>;

struct ShortestPathTree {
    std::vector<double> dist;
    std::vector<int> pred_edge; // -1 at sources
    std::vector<int> source;    // owning source node, -1 if unreachable
};

// Dijkstra from one or more sources with pinned tie-breaking: strict-<
// relaxation, and an equal-distance predecessor switch only to a smaller
// edge id. Sources must be sorted ascending.
ShortestPathTree dijkstra_tree(const WeightedGraph& g, const std::vector<int>& sources) {
    int n = g.topology->node_count();
    ShortestPathTree t{std::vector<double>(n, kInf), std::vector<int>(n, -1),
                       std::vector<int>(n, -1)};
    std::vector<char> settled(n, 0);
    DistQueue queue;
    for (int s : sources) {
        t.dist[s] = 0.0;
        t.source[s] = s;
        queue.emplace(0.0, s);
    }
    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (settled[u]) continue;
        settled[u] = 1;
        for (auto [v, eid] : g.topology->adjacent(u)) {
            if (settled[v]) continue;
            double nd = d + g.weights[eid];
            if (nd < t.dist[v]) {
                t.dist[v] = nd;
                t.pred_edge[v] = eid;
                t.source[v] = t.source[u];
                queue.emplace(nd, v);
            } else if (nd == t.dist[v] && eid < t.pred_edge[v]) {
                t.pred_edge[v] = eid;
                t.source[v] = t.source[u];
            }
        }
    }
    return t;
}

// Walk predecessor edges from `node` back to its tree source.
void collect_chain(const ShortestPathTree& t, const GraphTopology& topo, int node,
                   std::set<int>& out) {
    int cur = node;
    while (t.pred_edge[cur] != -1) {
        int eid = t.pred_edge[cur];
        out.insert(eid);
        auto [a, b] = topo.edge(eid);
        cur = (cur == a) ? b : a;
    }
}

std::vector<int> sorted_terminals(const std::vector<int>& terminals,
                                  const GraphTopology& topo) {
    std::vector<int> t = terminals;
    std::sort(t.begin(), t.end());
    require(!t.empty(), "steiner: no terminals");
    require(std::adjacent_find(t.begin(), t.end()) == t.end(),
            "steiner: duplicate terminals");
    require(t.front() >= 0 && t.back() < topo.node_count(),
            "steiner: terminal out of range");
    return t;
}

} // namespace

Decision::Decision(std::vector<int> ids) : edge_ids(std::move(ids)) {
    std::sort(edge_ids.begin(), edge_ids.end());
    require(std::adjacent_find(edge_ids.begin(), edge_ids.end()) == edge_ids.end(),
            "decision: duplicate edge ids");
}

void validate_query(const Query& q, const GraphTopology& topo) {
    if (const auto* p = std::get_if<PathQuery>(&q)) {
        require(p->source >= 0 && p->source < topo.node_count() && p->target >= 0 &&
                    p->target < topo.node_count(),
                "path query: node out of range");
        require(p->source != p->target, "path query: source equals target");
    } else {
        sorted_terminals(std::get<SteinerQuery>(q).terminals, topo);
    }
}

bool is_feasible(const Query& query, const Decision& decision,
                 const GraphTopology& topo) {
    for (int id : decision.edge_ids)
        require(id >= 0 && id < topo.edge_count(), "decision: edge id out of range");

    // Incidence restricted to the decision's edges.
    std::map<int, std::vector<int>> incident;
    for (int id : decision.edge_ids) {
        auto [u, v] = topo.edge(id);
        incident[u].push_back(id);
        incident[v].push_back(id);
    }

    if (const auto* p = std::get_if<PathQuery>(&query)) {
        if (decision.edge_ids.empty()) return false;
        for (const auto& [node, edges] : incident) {
            std::size_t want = (node == p->source || node == p->target) ? 1 : 2;
            if (edges.size() != want) return false;
        }
        if (!incident.count(p->source) || !incident.count(p->target)) return false;
        // Walk from source consuming each edge once; must end at target having
        // used every edge (rules out a disjoint path plus separate cycles).
        std::set<int> unused(decision.edge_ids.begin(), decision.edge_ids.end());
        int cur = p->source;
        while (cur != p->target) {
            int next_edge = -1;
            for (int id : incident[cur])
                if (unused.count(id)) {
                    next_edge = id;
                    break;
                }
            if (next_edge == -1) return false;
            unused.erase(next_edge);
            auto [a, b] = topo.edge(next_edge);
            cur = (cur == a) ? b : a;
        }
        return unused.empty();
    }

    const auto& terminals = std::get<SteinerQuery>(query).terminals;
    if (decision.edge_ids.empty()) return terminals.size() == 1 && !terminals.empty();
    // Tree check: acyclic via union-find, then single component, then coverage.
    std::map<int, int> index;
    for (const auto& [node, _] : incident) index.emplace(node, static_cast<int>(index.size()));
    UnionFind uf(static_cast<int>(index.size()));
    for (int id : decision.edge_ids) {
        auto [u, v] = topo.edge(id);
        if (!uf.unite(index[u], index[v])) return false; // cycle
    }
    int root = uf.find(0);
    for (int i = 1; i < static_cast<int>(index.size()); ++i)
        if (uf.find(i) != root) return false;
    for (int t : terminals)
        if (!index.count(t)) return false;
    return true;
}

double decision_value(const Query& query, const Decision& decision,
                      const WeightedGraph& g) {
    if (!is_feasible(query, decision, *g.topology)) return kInf;
    double total = 0.0;
    for (int id : decision.edge_ids) total += g.weights[id];
    return total;
}

Decision shortest_path(const WeightedGraph& g, int source, int target) {
    validate_query(PathQuery{source, target}, *g.topology);
    auto tree = dijkstra_tree(g, {source});
    if (tree.source[target] == -1)
        throw NoRouteError("no route from " + std::to_string(source) + " to " +
                           std::to_string(target));
    std::set<int> edges;
    collect_chain(tree, *g.topology, target, edges);
    return Decision(std::vector<int>(edges.begin(), edges.end()));
}

Decision steiner_tree_2approx(const WeightedGraph& g,
                              const std::vector<int>& terminals) {
    const auto& topo = *g.topology;
    auto terms = sorted_terminals(terminals, topo);
    if (terms.size() == 1) return Decision{};
    if (terms.size() == 2) return shortest_path(g, terms[0], terms[1]);

    auto tree = dijkstra_tree(g, terms);

    // Cheapest bridge per unordered pair of adjacent shortest-path cells;
    // ascending edge id iteration makes strict-< keep the smallest edge id.
    struct Bridge {
        double length;
        int edge;
    };
    std::map<std::pair<int, int>, Bridge> bridges;
    for (int eid = 0; eid < topo.edge_count(); ++eid) {
        auto [u, v] = topo.edge(eid);
        int su = tree.source[u], sv = tree.source[v];
        if (su == -1 || sv == -1 || su == sv) continue;
        double len = tree.dist[u] + g.weights[eid] + tree.dist[v];
        auto key = std::minmax(su, sv);
        auto it = bridges.find(key);
        if (it == bridges.end() || len < it->second.length)
            bridges[key] = Bridge{len, eid};
    }

    // Spanning tree over terminals through the bridges.
    std::vector<std::pair<Bridge, std::pair<int, int>>> order;
    order.reserve(bridges.size());
    for (const auto& [key, b] : bridges) order.emplace_back(b, key);
    std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
        return std::tie(x.first.length, x.first.edge) <
               std::tie(y.first.length, y.first.edge);
    });
    std::map<int, int> tindex;
    for (std::size_t i = 0; i < terms.size(); ++i) tindex[terms[i]] = static_cast<int>(i);
    UnionFind uf(static_cast<int>(terms.size()));
    std::set<int> expanded;
    int joined = 0;
    for (const auto& [b, key] : order) {
        if (!uf.unite(tindex[key.first], tindex[key.second])) continue;
        ++joined;
        auto [u, v] = topo.edge(b.edge);
        expanded.insert(b.edge);
        collect_chain(tree, topo, u, expanded);
        collect_chain(tree, topo, v, expanded);
    }
    if (joined + 1 < static_cast<int>(terms.size()))
        throw NoRouteError("terminals are not in one connected component");

    // Spanning tree of the expanded union, by (weight, edge id).
    std::vector<int> union_edges(expanded.begin(), expanded.end());
    std::sort(union_edges.begin(), union_edges.end(), [&](int a, int b) {
        return std::tie(g.weights[a], a) < std::tie(g.weights[b], b);
    });
    std::map<int, int> nindex;
    for (int eid : union_edges) {
        auto [u, v] = topo.edge(eid);
        nindex.emplace(u, static_cast<int>(nindex.size()));
        nindex.emplace(v, static_cast<int>(nindex.size()));
    }
    UnionFind span(static_cast<int>(nindex.size()));
    std::set<int> kept;
    for (int eid : union_edges) {
        auto [u, v] = topo.edge(eid);
        if (span.unite(nindex[u], nindex[v])) kept.insert(eid);
    }

    // Prune non-terminal leaves.
    std::set<int> terminal_set(terms.begin(), terms.end());
    std::map<int, std::set<int>> deg;
    for (int eid : kept) {
        auto [u, v] = topo.edge(eid);
        deg[u].insert(eid);
        deg[v].insert(eid);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = deg.begin(); it != deg.end();) {
            if (it->second.size() == 1 && !terminal_set.count(it->first)) {
                int eid = *it->second.begin();
                auto [u, v] = topo.edge(eid);
                int other = (it->first == u) ? v : u;
                kept.erase(eid);
                deg[other].erase(eid);
                it = deg.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    return Decision(std::vector<int>(kept.begin(), kept.end()));
}

Decision exact_steiner_bruteforce(const WeightedGraph& g,
                                  const std::vector<int>& terminals) {
    const auto& topo = *g.topology;
    if (topo.edge_count() > 16)
        throw TooLargeError("exact steiner: more than 16 edges");
    auto terms = sorted_terminals(terminals, topo);
    Query q = SteinerQuery{terms};

    double best = kInf;
    std::vector<int> best_edges;
    bool found = false;
    int m = topo.edge_count();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> ids;
        for (int e = 0; e < m; ++e)
            if (mask & (1u << e)) ids.push_back(e);
        Decision d(std::move(ids));
        double val = decision_value(q, d, g);
        if (val < best) {
            best = val;
            best_edges = d.edge_ids;
            found = true;
        }
    }
    if (!found) throw NoRouteError("exact steiner: no feasible tree");
    return Decision(std::move(best_edges));
}

Decision exact_path_bruteforce(const WeightedGraph& g, int source, int target) {
    const auto& topo = *g.topology;
    if (topo.node_count() > 10)
        throw TooLargeError("exact path: more than 10 nodes");
    validate_query(PathQuery{source, target}, topo);

    double best = kInf;
    std::vector<int> best_edges;
    std::vector<char> visited(topo.node_count(), 0);
    std::vector<int> path;
    bool found = false;

    auto dfs = [&](auto&& self, int u, double value) -> void {
        if (u == target) {
            if (value < best) {
                best = value;
                best_edges = path;
                found = true;
            }
            return;
        }
        visited[u] = 1;
        for (auto [v, eid] : topo.adjacent(u)) {
            if (visited[v]) continue;
            path.push_back(eid);
            self(self, v, value + g.weights[eid]);
            path.pop_back();
        }
        visited[u] = 0;
    };
    dfs(dfs, source, 0.0);
    if (!found) throw NoRouteError("exact path: target unreachable");
    return Decision(std::move(best_edges));
}

Decision infer(Task task, const WeightedGraph& combined, const Query& query) {
    require(task == task_of(query), "infer: task does not match query kind");
    if (const auto* p = std::get_if<PathQuery>(&query))
        return shortest_path(combined, p->source, p->target);
    return steiner_tree_2approx(combined, std::get<SteinerQuery>(query).terminals);
}

} // namespace qrts
