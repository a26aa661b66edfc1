#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrts/oracles.hpp"

namespace qrts {

/** One (query, decision, alpha) record; alpha >= 1 is the decision's
    approximation guarantee on the generating mean graph. */
struct QuerySample {
    Query query;
    Decision decision;
    double alpha = 1.0;
};

struct SamplePool {
    Task task = Task::Path;
    std::vector<QuerySample> samples;
    std::string truth_fingerprint;
    std::uint64_t seed = 0;
};

enum class Family { BA, WS, Kronecker };

struct FamilyParams {
    int nodes = 0;
    int ba_m = 1;                                 // BA: edges per new node
    int ws_k = 4;                                 // WS: even lattice degree
    double ws_p = 0.0;                            // WS: rewire probability
    int kro_t = 1;                                // Kronecker: power
    std::array<double, 4> kro_init{0.9, 0.5, 0.5, 0.1}; // row-major 2x2
};

/**
 * Generate a topology, keep the largest connected component, renumber nodes
 * densely preserving relative order. Deterministic given the seed.
 */
GraphTopology gen_topology(Family family, const FamilyParams& params,
                           std::uint64_t seed);

/** Largest connected component, nodes renumbered, edges in original order.
    Component ties go to the one with the smallest original node id. */
GraphTopology extract_largest_component(const GraphTopology& topo);

/** Desk-scale presets: kro-128, ba-128, ws-sparse-128, ws-dense-128. */
struct Preset {
    std::string name;
    Family family;
    FamilyParams params;
};
const std::vector<Preset>& desk_presets();
std::optional<Preset> find_preset(const std::string& name);

/** DIMACS ".gr" reader: 1-indexed arcs re-based to 0, duplicate unordered
    pairs merged, self-loop arcs skipped, weights discarded. */
GraphTopology load_dimacs_gr(const std::string& path);

/** Ground truth: independent Weibull edges with shape and scale each drawn
    uniformly from the integers {1..20} (shape first, ascending edge id). */
GraphDistribution gen_truth_weibull(TopologyPtr topo, std::uint64_t seed);

struct SteinerSizeRange {
    int lo = 3;
    int hi = 6;
};

/** Path: uniform ordered pair of distinct nodes. Steiner: uniform subset of
    size drawn uniformly from the range (capped at node count). */
Query sample_query(Task task, const GraphTopology& topo, Rng& rng,
                   SteinerSizeRange range = {});

/**
 * n samples solved by infer() on mean_graph(truth); alpha = 1.0 for Path,
 * 2.0 for Steiner. The per-query stream is derived from (seed, query index)
 * so output order is deterministic regardless of how work is distributed.
 * Unreachable queries are resampled at most 100 times, then error.
 */
SamplePool generate_pool(Task task, const GraphDistribution& truth, int n,
                         std::uint64_t seed, SteinerSizeRange range = {});

} // namespace qrts
