#pragma once

#include "qrts/learn.hpp"

namespace qrts {

/** Importance-weighted mixture of K sampled graphs plus the distribution that
    produced them. */
struct MixtureModel {
    std::vector<WeightedGraph> basis;   // the K sampled graphs
    std::vector<double> importance;     // w >= 0, length K
    GraphDistribution empirical_params; // distribution the basis was drawn from
    int rounds = 1;                     // outer iterations run
    std::string topology_fingerprint;
};

/** h(x, y) = sum_i w_i * f(x, y, g_i); +infinity for infeasible decisions. */
double score(const MixtureModel& model, const Query& query,
             const Decision& decision, Task target_task);

/** Learn the importance vector over a fixed basis (cutting plane on the
    graph-basis margin problem). */
CuttingPlaneResult importance_learning(const std::vector<WeightedGraph>& basis,
                                       const SamplePool& samples, Task source_task,
                                       double C = kDefaultC,
                                       double epsilon = kDefaultEpsilon,
                                       int max_rounds = kDefaultMaxRounds);

/**
 * Weighted maximum-likelihood exponential refit: p_i proportional to
 * w_i * density(current, g_i), computed in log space;
 * new rate_e = 1 / max(sum_i p_i*g_i(e), clamp).
 */
GraphDistribution tune_distribution(const std::vector<WeightedGraph>& basis,
                                    const std::vector<double>& importance,
                                    const GraphDistribution& current);

/** The weighted-MLE core of tune_distribution, probabilities given directly. */
std::vector<double> fit_exponential_rates(const std::vector<WeightedGraph>& basis,
                                          const std::vector<double>& p);

inline constexpr int kDefaultK = 240;
inline constexpr int kDefaultT = 1;

struct MixtureTrainResult {
    MixtureModel model;
    std::vector<TrainLog> segments;      // one per outer round
    std::vector<double> qrts_p_weights;  // set by train_qrts_pd step (a)
};

/**
 * Outer loop: per round, sample K graphs iid from the current distribution,
 * learn importance, then refit the distribution (skipped on the final round,
 * whose basis the returned model keeps; `tune` = false disables refitting
 * entirely, the "minus" variant).
 */
MixtureTrainResult train_qrts_d(const SamplePool& samples, Task source_task,
                                TopologyPtr truth_topo, int K, int T, double C,
                                double epsilon, const GraphDistribution& init,
                                std::uint64_t seed, bool tune = true,
                                int max_rounds = kDefaultMaxRounds);

/** Exponential(rate 1) on every edge: the default, uninformed init. */
GraphDistribution default_mixture_init(TopologyPtr topo);

/**
 * Three steps: train_qrts_p; per-edge MLE init (Exponential with mean equal
 * to each learned weight, clamped before inversion); train_qrts_d from it.
 */
MixtureTrainResult train_qrts_pd(const SamplePool& samples, Task source_task,
                                 TopologyPtr truth_topo, int K, int T, double C,
                                 double epsilon, std::uint64_t seed,
                                 bool tune = true,
                                 int max_rounds = kDefaultMaxRounds);

/** Inference on the model-combined (clamped) graph. */
Decision predict(const MixtureModel& model, const Query& query, Task target_task);
Decision predict(const EdgeWeightModel& model, TopologyPtr topo,
                 const Query& query, Task target_task);

} // namespace qrts
