#include "qrts/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qrts/errors.hpp"

namespace qrts {

SamplePool pool_head(const SamplePool& pool, int n) {
    if (n < 0 || n > static_cast<int>(pool.samples.size())) {
        std::ostringstream msg;
        msg << "pool head of " << n << " from " << pool.samples.size()
            << " samples";
        throw ValidationError(msg.str());
    }
    SamplePool out = pool;
    out.samples.assign(pool.samples.begin(), pool.samples.begin() + n);
    return out;
}

SamplePool pool_tail(const SamplePool& pool, int n) {
    if (n < 0 || n > static_cast<int>(pool.samples.size())) {
        std::ostringstream msg;
        msg << "pool tail of " << n << " from " << pool.samples.size()
            << " samples";
        throw ValidationError(msg.str());
    }
    SamplePool out = pool;
    out.samples.assign(pool.samples.end() - n, pool.samples.end());
    return out;
}

EvalReport evaluate_with(const std::function<Decision(const Query&)>& predictor,
                         const SamplePool& test, const WeightedGraph& mg) {
    if (test.samples.empty()) throw ValidationError("empty test pool");
    EvalReport report;
    report.n_test = static_cast<int>(test.samples.size());
    report.per_query.reserve(test.samples.size());
    double predicted_total = 0.0;
    double reference_total = 0.0;
    for (int j = 0; j < static_cast<int>(test.samples.size()); ++j) {
        const QuerySample& sample = test.samples[static_cast<std::size_t>(j)];
        Decision predicted = predictor(sample.query);
        double pv = decision_value(sample.query, predicted, mg);
        double rv = decision_value(sample.query, sample.decision, mg);
        if (!std::isfinite(pv)) {
            std::ostringstream msg;
            msg << "infeasible predicted decision for test query " << j;
            throw ValidationError(msg.str());
        }
        if (!std::isfinite(rv)) {
            std::ostringstream msg;
            msg << "infeasible reference decision for test query " << j;
            throw ValidationError(msg.str());
        }
        predicted_total += pv;
        reference_total += rv;
        report.per_query.push_back({j, pv, rv});
    }
    if (reference_total <= 0.0) {
        throw ValidationError("reference decisions have zero total value");
    }
    report.ratio = predicted_total / reference_total;
    return report;
}

namespace {

std::string model_fingerprint(const Model& model) {
    if (const auto* p = std::get_if<EdgeWeightModel>(&model)) {
        return p->topology_fingerprint;
    }
    return std::get<MixtureModel>(model).topology_fingerprint;
}

} // namespace

EvalReport evaluate(const Model& model, const SamplePool& test,
                    const GraphDistribution& truth, Task target_task) {
    if (test.task != target_task) {
        throw ValidationError("test pool task does not match the target task");
    }
    std::string truth_fp = fingerprint_distribution(truth);
    if (test.truth_fingerprint != truth_fp) {
        throw ValidationError("test pool was generated from a different truth (" +
                              test.truth_fingerprint + " vs " + truth_fp + ")");
    }
    std::string topo_fp = fingerprint_topology(*truth.topology);
    if (model_fingerprint(model) != topo_fp) {
        throw ValidationError("model topology fingerprint " +
                              model_fingerprint(model) +
                              " does not match the truth topology " + topo_fp);
    }
    WeightedGraph mg = mean_graph(truth);
    auto predictor = [&](const Query& q) {
        if (const auto* p = std::get_if<EdgeWeightModel>(&model)) {
            return predict(*p, truth.topology, q, target_task);
        }
        return predict(std::get<MixtureModel>(model), q, target_task);
    };
    return evaluate_with(predictor, test, mg);
}

EdgeWeightModel baseline(BaselineKind kind, const GraphTopology& topo,
                         std::uint64_t seed) {
    EdgeWeightModel model;
    model.topology_fingerprint = fingerprint_topology(topo);
    model.weights.resize(topo.edges().size());
    if (kind == BaselineKind::Unit) {
        std::fill(model.weights.begin(), model.weights.end(), 1.0);
    } else {
        Rng rng(seed);
        for (double& w : model.weights) w = rng.uniform01_inclusive();
    }
    return model;
}

std::string export_dot(
    const GraphTopology& topo,
    const std::vector<std::pair<std::string, Decision>>& decisions) {
    static const char* kPalette[] = {"red",    "blue",  "green", "orange",
                                     "purple", "brown", "cyan",  "magenta"};
    constexpr int kPaletteSize = 8;
    std::vector<std::vector<int>> edge_labels(topo.edges().size());
    for (int d = 0; d < static_cast<int>(decisions.size()); ++d) {
        for (int e : decisions[static_cast<std::size_t>(d)].second.edge_ids) {
            if (e < 0 || e >= static_cast<int>(topo.edges().size())) {
                throw ValidationError("decision edge id out of range for DOT export");
            }
            edge_labels[static_cast<std::size_t>(e)].push_back(d);
        }
    }
    std::ostringstream out;
    out << "graph g {\n";
    out << "  node [shape=circle fontsize=10];\n";
    for (int v = 0; v < topo.node_count(); ++v) {
        out << "  " << v << ";\n";
    }
    if (!decisions.empty()) {
        out << "  label=\"";
        for (int d = 0; d < static_cast<int>(decisions.size()); ++d) {
            if (d > 0) out << "  ";
            out << decisions[static_cast<std::size_t>(d)].first << " = "
                << kPalette[d % kPaletteSize];
        }
        out << "\";\n";
    }
    for (std::size_t e = 0; e < topo.edges().size(); ++e) {
        const auto& [u, v] = topo.edges()[e];
        out << "  " << u << " -- " << v << " [";
        const std::vector<int>& labels = edge_labels[e];
        if (labels.empty()) {
            out << "color=gray";
        } else {
            out << "color=\"";
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (i > 0) out << ":";
                out << kPalette[labels[i] % kPaletteSize];
            }
            out << "\" penwidth=2";
        }
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::optional<Method> parse_method(const std::string& name) {
    if (name == "p") return Method::P;
    if (name == "d") return Method::D;
    if (name == "pd") return Method::PD;
    if (name == "pd-") return Method::PDMinus;
    return std::nullopt;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::P: return "p";
        case Method::D: return "d";
        case Method::PD: return "pd";
        case Method::PDMinus: return "pd-";
    }
    throw ValidationError("unknown method");
}

TrainOutput train_model(const SamplePool& pool, TopologyPtr topo,
                        const TrainConfig& cfg) {
    if (pool.task != cfg.source) {
        throw ValidationError("sample pool task does not match the source task");
    }
    SamplePool train =
        cfg.train_size > 0 ? pool_head(pool, cfg.train_size) : pool;
    TrainOutput out;
    switch (cfg.method) {
        case Method::P: {
            QrtsPResult r = train_qrts_p(train, cfg.source, topo, cfg.C,
                                         cfg.epsilon, cfg.max_rounds);
            out.model = r.model;
            out.segments.push_back(r.log);
            break;
        }
        case Method::D: {
            MixtureTrainResult r = train_qrts_d(
                train, cfg.source, topo, cfg.K, cfg.T, cfg.C, cfg.epsilon,
                default_mixture_init(topo), cfg.seed, true, cfg.max_rounds);
            out.model = r.model;
            out.segments = r.segments;
            break;
        }
        case Method::PD:
        case Method::PDMinus: {
            MixtureTrainResult r = train_qrts_pd(
                train, cfg.source, topo, cfg.K, cfg.T, cfg.C, cfg.epsilon,
                cfg.seed, cfg.method == Method::PD, cfg.max_rounds);
            out.model = r.model;
            out.segments = r.segments;
            out.qrts_p_weights = r.qrts_p_weights;
            break;
        }
    }
    return out;
}

SweepResult run_sweep(TopologyPtr topo, const SweepConfig& cfg) {
    if (cfg.n_seeds < 1) throw ValidationError("sweep needs at least one seed");
    if (cfg.test_size < 1) throw ValidationError("sweep needs a positive test size");
    SweepResult result;
    result.n_test = cfg.test_size;
    for (int s = 0; s < cfg.n_seeds; ++s) {
        std::uint64_t run = cfg.base_seed;
        GraphDistribution truth =
            gen_truth_weibull(topo, derive_seed(run, static_cast<std::uint64_t>(s), 11));
        int train_n = cfg.train.train_size > 0 ? cfg.train.train_size : 240;
        SamplePool source_pool = generate_pool(
            cfg.train.source, truth, train_n,
            derive_seed(run, static_cast<std::uint64_t>(s), 12), cfg.steiner_range);
        SamplePool test_pool = generate_pool(
            cfg.train.target, truth, cfg.test_size,
            derive_seed(run, static_cast<std::uint64_t>(s), 13), cfg.steiner_range);

        TrainConfig train_cfg = cfg.train;
        train_cfg.seed = derive_seed(run, static_cast<std::uint64_t>(s), 14);
        TrainOutput trained = train_model(source_pool, topo, train_cfg);

        SeedRunResult seed_result;
        seed_result.seed_index = s;
        seed_result.ratio =
            evaluate(trained.model, test_pool, truth, cfg.train.target).ratio;
        if (cfg.with_pre) {
            EdgeWeightModel pre;
            pre.topology_fingerprint = fingerprint_topology(*topo);
            pre.weights.assign(topo->edges().size(), 0.0);
            seed_result.pre_ratio =
                evaluate(Model{pre}, test_pool, truth, cfg.train.target).ratio;
        }
        if (cfg.with_baselines) {
            EdgeWeightModel unit = baseline(BaselineKind::Unit, *topo);
            EdgeWeightModel rand = baseline(
                BaselineKind::Rand, *topo,
                derive_seed(run, static_cast<std::uint64_t>(s), 15));
            seed_result.baselines["unit"] =
                evaluate(Model{unit}, test_pool, truth, cfg.train.target).ratio;
            seed_result.baselines["rand"] =
                evaluate(Model{rand}, test_pool, truth, cfg.train.target).ratio;
        }
        result.runs.push_back(std::move(seed_result));
    }
    double mean = 0.0;
    for (const SeedRunResult& r : result.runs) mean += r.ratio;
    mean /= static_cast<double>(result.runs.size());
    result.mean_ratio = mean;
    if (cfg.n_seeds >= 2) {
        double ss = 0.0;
        for (const SeedRunResult& r : result.runs) {
            ss += (r.ratio - mean) * (r.ratio - mean);
        }
        result.stddev = std::sqrt(ss / static_cast<double>(cfg.n_seeds - 1));
    }
    return result;
}

} // namespace qrts
