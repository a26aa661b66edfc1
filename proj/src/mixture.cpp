#include "qrts/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrts {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

void check_shared_topology(const std::vector<WeightedGraph>& basis) {
    require(!basis.empty(), "mixture: empty basis");
    for (const auto& g : basis)
        require(g.topology == basis[0].topology || *g.topology == *basis[0].topology,
                "mixture: basis graphs on different topologies");
}

} // namespace

double score(const MixtureModel& model, const Query& query,
             const Decision& decision, Task target_task) {
    require(target_task == task_of(query), "score: task does not match query kind");
    check_shared_topology(model.basis);
    require(model.importance.size() == model.basis.size(),
            "score: importance length != basis size");
    if (!is_feasible(query, decision, *model.basis[0].topology))
        return std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t i = 0; i < model.basis.size(); ++i) {
        double value = 0.0;
        for (int e : decision.edge_ids) value += model.basis[i].weights[e];
        total += model.importance[i] * value;
    }
    return total;
}

CuttingPlaneResult importance_learning(const std::vector<WeightedGraph>& basis,
                                       const SamplePool& samples, Task source_task,
                                       double C, double epsilon, int max_rounds) {
    check_shared_topology(basis);
    require(!samples.samples.empty(), "importance learning: empty sample pool");
    require(samples.task == source_task, "importance learning: pool task != source task");
    double alpha = samples.samples.front().alpha;
    for (const auto& s : samples.samples)
        require(s.alpha == alpha, "importance learning: mixed alpha values in pool");
    MarginProblem problem{basis[0].topology, basis, source_task, alpha,
                          samples.samples};
    return cutting_plane_train(problem, C, epsilon, max_rounds);
}

std::vector<double> fit_exponential_rates(const std::vector<WeightedGraph>& basis,
                                          const std::vector<double>& p) {
    check_shared_topology(basis);
    require(p.size() == basis.size(), "fit: probability count != basis size");
    int m = basis[0].topology->edge_count();
    std::vector<double> rates(m);
    for (int e = 0; e < m; ++e) {
        double mean = 0.0;
        for (std::size_t i = 0; i < basis.size(); ++i)
            mean += p[i] * basis[i].weights[e];
        rates[e] = 1.0 / std::max(mean, kWeightClamp);
    }
    return rates;
}

GraphDistribution tune_distribution(const std::vector<WeightedGraph>& basis,
                                    const std::vector<double>& importance,
                                    const GraphDistribution& current) {
    check_shared_topology(basis);
    require(importance.size() == basis.size(),
            "tune: importance length != basis size");
    require(*current.topology == *basis[0].topology, "tune: topology mismatch");
    require(std::any_of(importance.begin(), importance.end(),
                        [](double w) { return w > 0.0; }),
            "tune: all-zero importance");

    // p_i proportional to w_i * density(current, g_i), in log space.
    std::vector<double> logp(basis.size(), -std::numeric_limits<double>::infinity());
    double max_logp = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (importance[i] <= 0.0) continue;
        double ld = std::log(importance[i]);
        for (int e = 0; e < current.topology->edge_count(); ++e)
            ld += current.edge_dists[e].log_density(basis[i].weights[e]);
        logp[i] = ld;
        max_logp = std::max(max_logp, ld);
    }
    require(std::isfinite(max_logp), "tune: degenerate importance weighting");
    std::vector<double> p(basis.size(), 0.0);
    double norm = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (!std::isfinite(logp[i])) continue;
        p[i] = std::exp(logp[i] - max_logp);
        norm += p[i];
    }
    for (double& x : p) x /= norm;

    auto rates = fit_exponential_rates(basis, p);
    std::vector<EdgeDistribution> dists;
    dists.reserve(rates.size());
    for (double r : rates) dists.push_back(EdgeDistribution::exponential(r));
    return GraphDistribution(current.topology, std::move(dists));
}

GraphDistribution default_mixture_init(TopologyPtr topo) {
    std::vector<EdgeDistribution> dists(topo->edge_count(),
                                        EdgeDistribution::exponential(1.0));
    return GraphDistribution(std::move(topo), std::move(dists));
}

MixtureTrainResult train_qrts_d(const SamplePool& samples, Task source_task,
                                TopologyPtr truth_topo, int K, int T, double C,
                                double epsilon, const GraphDistribution& init,
                                std::uint64_t seed, bool tune, int max_rounds) {
    require(K >= 1, "train: K must be >= 1");
    require(T >= 1, "train: T must be >= 1");
    require(*init.topology == *truth_topo, "train: init distribution topology mismatch");

    GraphDistribution dist = init;
    MixtureTrainResult out{
        MixtureModel{{}, {}, dist, T, fingerprint_topology(*truth_topo)}, {}, {}};
    for (int t = 0; t < T; ++t) {
        std::vector<WeightedGraph> basis;
        basis.reserve(K);
        for (int i = 0; i < K; ++i) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t),
                                static_cast<std::uint64_t>(i)));
            basis.push_back(sample_graph(dist, rng));
        }
        auto learned = importance_learning(basis, samples, source_task, C, epsilon,
                                           max_rounds);
        out.segments.push_back(learned.log);
        out.model.basis = std::move(basis);
        out.model.importance = std::move(learned.w);
        out.model.empirical_params = dist; // the distribution this basis came from
        if (tune && t < T - 1)
            dist = tune_distribution(out.model.basis, out.model.importance, dist);
    }
    return out;
}

MixtureTrainResult train_qrts_pd(const SamplePool& samples, Task source_task,
                                 TopologyPtr truth_topo, int K, int T, double C,
                                 double epsilon, std::uint64_t seed, bool tune,
                                 int max_rounds) {
    auto point = train_qrts_p(samples, source_task, truth_topo, C, epsilon, max_rounds);
    // Per-edge MLE within the exponential family: mean w_e, i.e. rate 1/w_e.
    std::vector<EdgeDistribution> dists;
    dists.reserve(point.model.weights.size());
    for (double w : point.model.weights)
        dists.push_back(EdgeDistribution::exponential(1.0 / std::max(w, kWeightClamp)));
    GraphDistribution init(truth_topo, std::move(dists));

    auto out = train_qrts_d(samples, source_task, truth_topo, K, T, C, epsilon, init,
                            seed, tune, max_rounds);
    out.segments.insert(out.segments.begin(), point.log);
    out.qrts_p_weights = std::move(point.model.weights);
    return out;
}

Decision predict(const MixtureModel& model, const Query& query, Task target_task) {
    check_shared_topology(model.basis);
    require(model.importance.size() == model.basis.size(),
            "predict: importance length != basis size");
    WeightedGraph combined = clamped_combination(model.basis[0].topology, model.basis,
                                                 model.importance);
    return infer(target_task, combined, query);
}

Decision predict(const EdgeWeightModel& model, TopologyPtr topo, const Query& query,
                 Task target_task) {
    WeightedGraph combined = clamped_combination(std::move(topo), {}, model.weights);
    return infer(target_task, combined, query);
}

} // namespace qrts
