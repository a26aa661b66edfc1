#include "qrts/graph.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_set>

namespace qrts {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

} // namespace

GraphTopology::GraphTopology(int node_count, std::vector<std::pair<int, int>> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
    require(node_count_ > 0, "topology: node_count must be positive");
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges_.size() * 2);
    for (std::size_t id = 0; id < edges_.size(); ++id) {
        auto [u, v] = edges_[id];
        require(u >= 0 && u < node_count_ && v >= 0 && v < node_count_,
                "topology: edge " + std::to_string(id) + " endpoint out of range");
        require(u != v, "topology: edge " + std::to_string(id) + " is a self-loop");
        std::uint64_t key = static_cast<std::uint64_t>(std::min(u, v)) * node_count_ +
                            static_cast<std::uint64_t>(std::max(u, v));
        require(seen.insert(key).second,
                "topology: duplicate unordered pair at edge " + std::to_string(id));
    }
    adj_.resize(node_count_);
    for (std::size_t id = 0; id < edges_.size(); ++id) {
        auto [u, v] = edges_[id];
        adj_[u].emplace_back(v, static_cast<int>(id));
        adj_[v].emplace_back(u, static_cast<int>(id));
    }
}

WeightedGraph::WeightedGraph(TopologyPtr topology_in, std::vector<double> weights_in)
    : topology(std::move(topology_in)), weights(std::move(weights_in)) {
    require(topology != nullptr, "weighted graph: null topology");
    require(static_cast<int>(weights.size()) == topology->edge_count(),
            "weighted graph: weight count != edge count");
    for (double w : weights)
        require(w >= 0.0 && std::isfinite(w),
                "weighted graph: weights must be finite and nonnegative");
}

EdgeDistribution EdgeDistribution::weibull(double shape, double scale) {
    if (!(shape > 0.0 && std::isfinite(shape) && scale > 0.0 && std::isfinite(scale)))
        throw ValidationError("weibull: shape and scale must be positive finite");
    EdgeDistribution d{Kind::Weibull, shape, scale};
    if (!std::isfinite(d.mean())) throw ValidationError("weibull: mean not finite");
    return d;
}

EdgeDistribution EdgeDistribution::exponential(double rate) {
    if (!(rate > 0.0 && std::isfinite(rate)))
        throw ValidationError("exponential: rate must be positive finite");
    return EdgeDistribution{Kind::Exponential, rate, 0.0};
}

EdgeDistribution EdgeDistribution::point_mass(double value) {
    if (!(value > 0.0 && std::isfinite(value)))
        throw ValidationError("point mass: value must be positive finite");
    return EdgeDistribution{Kind::PointMass, value, 0.0};
}

double EdgeDistribution::mean() const {
    switch (kind) {
        case Kind::Weibull: return b * std::tgamma(1.0 + 1.0 / a);
        case Kind::Exponential: return 1.0 / a;
        case Kind::PointMass: return a;
    }
    return 0.0;
}

double EdgeDistribution::sample(Rng& rng) const {
    switch (kind) {
        case Kind::Weibull:
            // inverse CDF; U in the open (0,1) keeps samples positive finite
            return b * std::pow(-std::log(rng.uniform01()), 1.0 / a);
        case Kind::Exponential:
            return -std::log(rng.uniform01()) / a;
        case Kind::PointMass:
            return a;
    }
    return 0.0;
}

double EdgeDistribution::log_density(double x) const {
    switch (kind) {
        case Kind::Weibull: {
            if (x <= 0.0) return -std::numeric_limits<double>::infinity();
            double z = x / b;
            return std::log(a / b) + (a - 1.0) * std::log(z) - std::pow(z, a);
        }
        case Kind::Exponential:
            if (x < 0.0) return -std::numeric_limits<double>::infinity();
            return std::log(a) - a * x;
        case Kind::PointMass:
            throw ValidationError("point mass has no density");
    }
    return 0.0;
}

GraphDistribution::GraphDistribution(TopologyPtr topology_in,
                                     std::vector<EdgeDistribution> edge_dists_in)
    : topology(std::move(topology_in)), edge_dists(std::move(edge_dists_in)) {
    require(topology != nullptr, "graph distribution: null topology");
    require(static_cast<int>(edge_dists.size()) == topology->edge_count(),
            "graph distribution: distribution count != edge count");
}

WeightedGraph sample_graph(const GraphDistribution& dist, Rng& rng) {
    std::vector<double> w(dist.edge_dists.size());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = dist.edge_dists[e].sample(rng);
    return WeightedGraph(dist.topology, std::move(w));
}

WeightedGraph mean_graph(const GraphDistribution& dist) {
    std::vector<double> w(dist.edge_dists.size());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = dist.edge_dists[e].mean();
    return WeightedGraph(dist.topology, std::move(w));
}

WeightedGraph combine_graphs(const std::vector<WeightedGraph>& graphs,
                             const std::vector<double>& w) {
    require(!graphs.empty(), "combine: no graphs");
    require(w.size() == graphs.size(), "combine: weight count != graph count");
    const auto& topo = graphs[0].topology;
    for (const auto& g : graphs)
        require(g.topology == topo || *g.topology == *topo,
                "combine: mismatched topologies");
    bool any_positive = false;
    for (double wi : w) {
        require(wi >= 0.0 && std::isfinite(wi), "combine: weights must be >= 0 and finite");
        if (wi > 0.0) any_positive = true;
    }
    require(any_positive, "combine: all-zero combination weights");

    std::vector<double> out(topo->edge_count(), 0.0);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const auto& gw = graphs[i].weights;
        for (std::size_t e = 0; e < out.size(); ++e) out[e] += w[i] * gw[e];
    }
    for (double& x : out)
        if (x < kWeightClamp) x = kWeightClamp;
    return WeightedGraph(topo, std::move(out));
}

namespace {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, x);
    return buf;
}

void append_hexfloat(std::string& s, double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", x);
    s += buf;
}

std::string topology_bytes(const GraphTopology& topo) {
    std::string s = "n=" + std::to_string(topo.node_count()) + ";";
    for (const auto& [u, v] : topo.edges())
        s += std::to_string(u) + "-" + std::to_string(v) + ";";
    return s;
}

} // namespace

std::string fingerprint_topology(const GraphTopology& topo) {
    return hex64(fnv1a64(topology_bytes(topo)));
}

std::string fingerprint_distribution(const GraphDistribution& dist) {
    std::string s = topology_bytes(*dist.topology) + "|";
    for (const auto& d : dist.edge_dists) {
        switch (d.kind) {
            case EdgeDistribution::Kind::Weibull: s += "w:"; break;
            case EdgeDistribution::Kind::Exponential: s += "x:"; break;
            case EdgeDistribution::Kind::PointMass: s += "p:"; break;
        }
        append_hexfloat(s, d.a);
        s += ":";
        append_hexfloat(s, d.b);
        s += ";";
    }
    return hex64(fnv1a64(s));
}

} // namespace qrts
