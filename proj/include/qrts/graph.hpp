#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qrts/errors.hpp"
#include "qrts/rng.hpp"

namespace qrts {

// Combined edge weights below this floor are clamped up to it so shortest-path
// positivity holds even for all-zero importance vectors.
inline constexpr double kWeightClamp = 1e-12;

/**
 * Undirected simple graph: node ids 0..node_count-1, edge ids dense and equal
 * to the position in `edges`. Immutable after construction.
 */
class GraphTopology {
public:
    GraphTopology(int node_count, std::vector<std::pair<int, int>> edges);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::pair<int, int>& edge(int id) const { return edges_[id]; }

    /** Incident (neighbor, edge id) pairs in ascending edge id order. */
    const std::vector<std::pair<int, int>>& adjacent(int node) const {
        return adj_[node];
    }

    bool operator==(const GraphTopology& other) const {
        return node_count_ == other.node_count_ && edges_ == other.edges_;
    }

private:
    int node_count_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
};

using TopologyPtr = std::shared_ptr<const GraphTopology>;

/** One nonnegative finite weight per edge id on a shared topology. */
struct WeightedGraph {
    WeightedGraph(TopologyPtr topology, std::vector<double> weights);

    TopologyPtr topology;
    std::vector<double> weights;
};

/** Independent per-edge weight distribution. */
struct EdgeDistribution {
    enum class Kind { Weibull, Exponential, PointMass };

    static EdgeDistribution weibull(double shape, double scale);
    static EdgeDistribution exponential(double rate);
    static EdgeDistribution point_mass(double value);

    double mean() const;
    double sample(Rng& rng) const;
    /** Log density at x; PointMass has none (throws ValidationError). */
    double log_density(double x) const;

    Kind kind;
    double a = 0.0; // shape / rate / value
    double b = 0.0; // scale (Weibull only)
};

/** Product distribution over graphs: one EdgeDistribution per edge id. */
struct GraphDistribution {
    GraphDistribution() = default; // empty placeholder, fill before use
    GraphDistribution(TopologyPtr topology, std::vector<EdgeDistribution> edge_dists);

    TopologyPtr topology;
    std::vector<EdgeDistribution> edge_dists;
};

/** Draw one graph; weights drawn independently in edge id order. */
WeightedGraph sample_graph(const GraphDistribution& dist, Rng& rng);

/** Graph of per-edge closed-form means. */
WeightedGraph mean_graph(const GraphDistribution& dist);

/**
 * Edge-wise linear combination sum_i w[i]*graphs[i]; combined weights below
 * kWeightClamp are clamped up to it. Errors on mismatched topologies and on
 * an all-zero w.
 */
WeightedGraph combine_graphs(const std::vector<WeightedGraph>& graphs,
                             const std::vector<double>& w);

/** FNV-1a 64-bit over the canonical serialized form, as a hex string. */
std::string fingerprint_topology(const GraphTopology& topo);
std::string fingerprint_distribution(const GraphDistribution& dist);

} // namespace qrts
