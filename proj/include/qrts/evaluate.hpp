#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qrts/mixture.hpp"

namespace qrts {

using Model = std::variant<EdgeWeightModel, MixtureModel>;

struct PerQueryRecord {
    int id = 0;
    double predicted = 0.0;
    double reference = 0.0;
};

struct EvalReport {
    double ratio = 0.0;
    std::optional<double> stddev; // multi-seed sweeps only
    int n_test = 0;
    nlohmann::json config = nlohmann::json::object();
    std::map<std::string, double> baselines;
    std::vector<PerQueryRecord> per_query;
};

/** First n samples of a pool (training subsets nest across sizes). */
SamplePool pool_head(const SamplePool& pool, int n);
/** Last n samples of a pool (test split, disjoint from the head). */
SamplePool pool_tail(const SamplePool& pool, int n);

/**
 * ratio = sum(predicted) / sum(reference), both on mean_graph(truth); lower is
 * better. Predictions come from predict(model, ...); references are the pooled
 * decisions. Infeasible values anywhere are a hard error, and the pool task,
 * the truth fingerprint, and the model's topology fingerprint must all match.
 */
EvalReport evaluate(const Model& model, const SamplePool& test,
                    const GraphDistribution& truth, Task target_task);

/** Metric core with an arbitrary predictor; used by evaluate and by tests. */
EvalReport evaluate_with(const std::function<Decision(const Query&)>& predictor,
                         const SamplePool& test, const WeightedGraph& mg);

enum class BaselineKind { Unit, Rand };

/** Unit: all weights 1. Rand: weights iid Uniform(0, 1] from the seed. */
EdgeWeightModel baseline(BaselineKind kind, const GraphTopology& topo,
                         std::uint64_t seed = 0);

/** DOT text: decision edges colored per label (overlaps list every color),
    remaining edges gray. */
std::string export_dot(
    const GraphTopology& topo,
    const std::vector<std::pair<std::string, Decision>>& decisions);

enum class Method { P, D, PD, PDMinus };

std::optional<Method> parse_method(const std::string& name);
std::string method_name(Method m);

/** Hyperparameters of one training run. */
struct TrainConfig {
    Method method = Method::P;
    Task source = Task::Path;
    Task target = Task::Steiner;
    int train_size = 0; // 0 = whole pool
    int K = kDefaultK;
    int T = kDefaultT;
    double C = kDefaultC;
    double epsilon = kDefaultEpsilon;
    int max_rounds = kDefaultMaxRounds;
    std::uint64_t seed = 0;
};

/** Train per config on the pool head; the pool task must equal config.source. */
struct TrainOutput {
    Model model;
    std::vector<TrainLog> segments;
    std::vector<double> qrts_p_weights; // pd/pd- only
};
TrainOutput train_model(const SamplePool& pool, TopologyPtr topo,
                        const TrainConfig& cfg);

struct SeedRunResult {
    int seed_index = 0;
    double ratio = 0.0;
    double pre_ratio = 0.0; // round-0 (all-zero weights) model, Method::P only
    std::map<std::string, double> baselines;
};

struct SweepConfig {
    TrainConfig train;
    int test_size = 1000;
    int n_seeds = 5;
    std::uint64_t base_seed = 0;
    SteinerSizeRange steiner_range;
    bool with_baselines = false;
    bool with_pre = false;
};

struct SweepResult {
    double mean_ratio = 0.0;
    std::optional<double> stddev;
    int n_test = 0;
    std::vector<SeedRunResult> runs;
};

/**
 * Repeat train+eval over n_seeds run seeds on one fixed topology: per seed,
 * draw a fresh truth, a source-task training pool, and a target-task test
 * pool from splitmix-derived sub-seeds, then report mean and sample stddev.
 */
SweepResult run_sweep(TopologyPtr topo, const SweepConfig& cfg);

} // namespace qrts
