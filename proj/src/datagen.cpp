#include "qrts/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace qrts {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

std::uint64_t pair_key(int u, int v, int n) {
    return static_cast<std::uint64_t>(std::min(u, v)) * n +
           static_cast<std::uint64_t>(std::max(u, v));
}

std::vector<std::pair<int, int>> gen_ba_edges(int n, int m, Rng& rng) {
    require(m >= 1, "ba: m must be >= 1");
    require(n > m, "ba: need more nodes than the initial clique");
    std::vector<std::pair<int, int>> edges;
    std::vector<int> repeated; // one entry per edge endpoint, degree-proportional
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            edges.emplace_back(i, j);
            repeated.push_back(i);
            repeated.push_back(j);
        }
    for (int nv = m; nv < n; ++nv) {
        std::set<int> targets;
        while (static_cast<int>(targets.size()) < std::min(m, nv)) {
            int t = repeated.empty()
                        ? static_cast<int>(rng.uniform_int(nv))
                        : repeated[rng.uniform_int(repeated.size())];
            if (targets.insert(t).second) edges.emplace_back(t, nv);
        }
        for (int t : targets) repeated.push_back(t);
        for (std::size_t i = 0; i < targets.size(); ++i) repeated.push_back(nv);
    }
    return edges;
}

std::vector<std::pair<int, int>> gen_ws_edges(int n, int k, double p, Rng& rng) {
    require(k >= 2 && k % 2 == 0, "ws: k must be even and >= 2");
    require(k < n, "ws: k must be below the node count");
    require(p >= 0.0 && p <= 1.0, "ws: p must lie in [0, 1]");
    std::vector<std::pair<int, int>> edges;
    std::set<std::uint64_t> present;
    std::vector<int> degree(n, 0);
    for (int j = 1; j <= k / 2; ++j)
        for (int u = 0; u < n; ++u) {
            int v = (u + j) % n;
            edges.emplace_back(u, v);
            present.insert(pair_key(u, v, n));
            ++degree[u];
            ++degree[v];
        }
    // Rewire each lattice edge in construction order, replacing it in place so
    // edge ids stay dense and deterministic.
    for (std::size_t id = 0; id < edges.size(); ++id) {
        if (rng.uniform01() >= p) continue;
        auto [u, v] = edges[id];
        if (degree[u] >= n - 1) continue; // saturated, nothing to rewire to
        int w;
        do {
            w = static_cast<int>(rng.uniform_int(n));
        } while (w == u || present.count(pair_key(u, w, n)));
        present.erase(pair_key(u, v, n));
        present.insert(pair_key(u, w, n));
        --degree[v];
        ++degree[w];
        edges[id] = {u, w};
    }
    return edges;
}

std::vector<std::pair<int, int>> gen_kronecker_edges(const std::array<double, 4>& init,
                                                     int t, Rng& rng) {
    require(t >= 1, "kronecker: power must be >= 1");
    require(t <= 13, "kronecker: power above 13 is not supported");
    for (double x : init)
        require(x >= 0.0 && x <= 1.0, "kronecker: initiator entries must lie in [0, 1]");
    int n = 1 << t;
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double prob = 1.0;
            for (int l = 0; l < t; ++l) {
                int bu = (u >> l) & 1;
                int bv = (v >> l) & 1;
                prob *= init[bu * 2 + bv];
            }
            if (rng.uniform01() < prob) edges.emplace_back(u, v);
        }
    return edges;
}

} // namespace

GraphTopology extract_largest_component(const GraphTopology& topo) {
    int n = topo.node_count();
    std::vector<int> comp(n, -1);
    int best_root = -1, best_size = 0;
    for (int start = 0; start < n; ++start) {
        if (comp[start] != -1) continue;
        int size = 0;
        std::vector<int> stack{start};
        comp[start] = start;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            ++size;
            for (auto [v, eid] : topo.adjacent(u))
                if (comp[v] == -1) {
                    comp[v] = start;
                    stack.push_back(v);
                }
        }
        if (size > best_size) {
            best_size = size;
            best_root = start;
        }
    }
    std::vector<int> remap(n, -1);
    int next = 0;
    for (int u = 0; u < n; ++u)
        if (comp[u] == best_root) remap[u] = next++;
    std::vector<std::pair<int, int>> edges;
    for (const auto& [u, v] : topo.edges())
        if (remap[u] != -1 && remap[v] != -1)
            edges.emplace_back(remap[u], remap[v]);
    return GraphTopology(next, std::move(edges));
}

GraphTopology gen_topology(Family family, const FamilyParams& params,
                           std::uint64_t seed) {
    require(params.nodes >= 2, "generator: need at least 2 nodes");
    Rng rng(seed);
    std::vector<std::pair<int, int>> edges;
    switch (family) {
        case Family::BA: edges = gen_ba_edges(params.nodes, params.ba_m, rng); break;
        case Family::WS:
            edges = gen_ws_edges(params.nodes, params.ws_k, params.ws_p, rng);
            break;
        case Family::Kronecker:
            require(params.nodes == (1 << params.kro_t),
                    "kronecker: node count must equal 2^power");
            edges = gen_kronecker_edges(params.kro_init, params.kro_t, rng);
            break;
    }
    return extract_largest_component(GraphTopology(params.nodes, std::move(edges)));
}

const std::vector<Preset>& desk_presets() {
    static const std::vector<Preset> presets = [] {
        std::vector<Preset> p;
        FamilyParams kro;
        kro.nodes = 128;
        kro.kro_t = 7;
        kro.kro_init = {0.95, 0.6, 0.6, 0.4};
        p.push_back({"kro-128", Family::Kronecker, kro});
        FamilyParams ba;
        ba.nodes = 128;
        ba.ba_m = 1;
        p.push_back({"ba-128", Family::BA, ba});
        FamilyParams ws_sparse;
        ws_sparse.nodes = 128;
        ws_sparse.ws_k = 10;
        ws_sparse.ws_p = 0.1;
        p.push_back({"ws-sparse-128", Family::WS, ws_sparse});
        FamilyParams ws_dense = ws_sparse;
        ws_dense.ws_k = 20;
        p.push_back({"ws-dense-128", Family::WS, ws_dense});
        return p;
    }();
    return presets;
}

std::optional<Preset> find_preset(const std::string& name) {
    for (const auto& p : desk_presets())
        if (p.name == name) return p;
    return std::nullopt;
}

GraphTopology load_dimacs_gr(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    int lineno = 0, n = -1;
    std::vector<std::pair<int, int>> edges;
    std::set<std::uint64_t> seen;
    auto fail = [&](const std::string& msg) {
        throw ParseError(path + ": line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue; // blank
        if (tag == "c") continue;
        if (tag == "p") {
            if (n != -1) fail("duplicate problem line");
            std::string kind;
            long long nn = 0, mm = 0;
            if (!(ls >> kind >> nn >> mm) || kind != "sp" || nn < 1 || mm < 0)
                fail("malformed problem line, expected 'p sp N M'");
            n = static_cast<int>(nn);
        } else if (tag == "a") {
            if (n == -1) fail("arc before problem line");
            long long u = 0, v = 0;
            if (!(ls >> u >> v)) fail("malformed arc line, expected 'a u v w'");
            if (u < 1 || u > n || v < 1 || v > n) fail("node id out of range");
            if (u == v) continue; // self-loop arc, skipped
            auto key = pair_key(static_cast<int>(u - 1), static_cast<int>(v - 1), n);
            if (seen.insert(key).second)
                edges.emplace_back(static_cast<int>(u - 1), static_cast<int>(v - 1));
        } else {
            fail("unknown line type '" + tag + "'");
        }
    }
    if (n == -1) throw ParseError(path + ": missing problem line");
    return GraphTopology(n, std::move(edges));
}

GraphDistribution gen_truth_weibull(TopologyPtr topo, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<EdgeDistribution> dists;
    dists.reserve(topo->edge_count());
    for (int e = 0; e < topo->edge_count(); ++e) {
        double shape = static_cast<double>(1 + rng.uniform_int(20));
        double scale = static_cast<double>(1 + rng.uniform_int(20));
        dists.push_back(EdgeDistribution::weibull(shape, scale));
    }
    return GraphDistribution(std::move(topo), std::move(dists));
}

Query sample_query(Task task, const GraphTopology& topo, Rng& rng,
                   SteinerSizeRange range) {
    int n = topo.node_count();
    if (task == Task::Path) {
        require(n >= 2, "query: need at least 2 nodes");
        int u = static_cast<int>(rng.uniform_int(n));
        int v = static_cast<int>(rng.uniform_int(n - 1));
        if (v >= u) ++v;
        return PathQuery{u, v};
    }
    require(range.lo >= 1 && range.lo <= range.hi, "query: bad terminal size range");
    int lo = std::min(range.lo, n);
    int hi = std::min(range.hi, n);
    int size = static_cast<int>(rng.uniform_range(lo, hi));
    std::set<int> terminals;
    while (static_cast<int>(terminals.size()) < size)
        terminals.insert(static_cast<int>(rng.uniform_int(n)));
    return SteinerQuery{std::vector<int>(terminals.begin(), terminals.end())};
}

SamplePool generate_pool(Task task, const GraphDistribution& truth, int n,
                         std::uint64_t seed, SteinerSizeRange range) {
    require(n >= 0, "pool: negative size");
    WeightedGraph mg = mean_graph(truth);
    SamplePool pool;
    pool.task = task;
    pool.seed = seed;
    pool.truth_fingerprint = fingerprint_distribution(truth);
    pool.samples.reserve(n);
    double alpha = (task == Task::Path) ? 1.0 : 2.0;
    for (int j = 0; j < n; ++j) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
        bool done = false;
        for (int attempt = 0; attempt < 100 && !done; ++attempt) {
            Query q = sample_query(task, *truth.topology, rng, range);
            try {
                Decision d = infer(task, mg, q);
                pool.samples.push_back(QuerySample{std::move(q), std::move(d), alpha});
                done = true;
            } catch (const NoRouteError&) {
                // disconnected corner; resample within the same stream
            }
        }
        if (!done)
            throw ValidationError("pool: query " + std::to_string(j) +
                                  " unreachable after 100 retries");
    }
    return pool;
}

} // namespace qrts
