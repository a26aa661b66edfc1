// Acceptance suite: one timed pass/fail line per criterion, exit 1 on any
// failure. Criteria 5-7 share three desk-scale sweeps on a 128-node
// Kronecker-style topology; the rest run on purpose-built small instances.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qrts/cli.hpp"
#include "qrts/evaluate.hpp"
#include "qrts/io.hpp"

using namespace qrts;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
            .count();
    }
};

bool g_all_passed = true;

void report(int id, const char* name, bool pass, double seconds,
            const std::string& detail = "") {
    std::printf("ACCEPT %02d %s: %s (%.1fs)\n", id, name,
                pass ? "PASS" : "FAIL", seconds);
    if (!pass && !detail.empty()) {
        std::printf("  detail: %s\n", detail.c_str());
    }
    if (!pass) g_all_passed = false;
}

void criterion(int id, const char* name,
               const std::function<bool(std::string&)>& body) {
    Timer timer;
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(id, name, pass, timer.seconds(), detail);
}

WeightedGraph random_graph(Rng& rng, int n, int extra_edges) {
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) {
        edges.emplace_back(static_cast<int>(rng.uniform_int(v)), v);
    }
    for (int k = 0; k < extra_edges; ++k) {
        int u = static_cast<int>(rng.uniform_int(n));
        int v = static_cast<int>(rng.uniform_int(n));
        if (u == v) continue;
        std::pair<int, int> e{std::min(u, v), std::max(u, v)};
        bool dup = false;
        for (const auto& existing : edges) {
            if (existing == e) dup = true;
        }
        if (!dup) edges.push_back(e);
    }
    auto topo = std::make_shared<const GraphTopology>(n, std::move(edges));
    std::vector<double> weights(topo->edge_count());
    for (double& w : weights) w = 0.1 + 9.9 * rng.uniform01();
    return WeightedGraph(std::move(topo), std::move(weights));
}

double edge_sum(const Decision& d, const WeightedGraph& g) {
    double total = 0.0;
    for (int e : d.edge_ids) total += g.weights[e];
    return total;
}

// ---- shared desk-scale fixtures (criteria 5-7) ----

TopologyPtr desk_topology() {
    static TopologyPtr topo = [] {
        Preset preset = *find_preset("kro-128");
        return std::make_shared<const GraphTopology>(
            gen_topology(preset.family, preset.params, 0));
    }();
    return topo;
}

SweepConfig desk_config(Task source, Task target, int train_size) {
    SweepConfig cfg;
    cfg.train.method = Method::P;
    cfg.train.source = source;
    cfg.train.target = target;
    cfg.train.train_size = train_size;
    cfg.test_size = 1000;
    cfg.n_seeds = 5;
    cfg.base_seed = 100;
    return cfg;
}

const SweepResult& path_to_tree_240() {
    static SweepResult r = [] {
        SweepConfig cfg = desk_config(Task::Path, Task::Steiner, 240);
        cfg.with_pre = true;
        cfg.with_baselines = true;
        return run_sweep(desk_topology(), cfg);
    }();
    return r;
}

const SweepResult& tree_to_path_240() {
    static SweepResult r = [] {
        SweepConfig cfg = desk_config(Task::Steiner, Task::Path, 240);
        cfg.with_baselines = true;
        return run_sweep(desk_topology(), cfg);
    }();
    return r;
}

const SweepResult& path_to_tree_60() {
    static SweepResult r =
        run_sweep(desk_topology(), desk_config(Task::Path, Task::Steiner, 60));
    return r;
}

// ---- criteria ----

bool oracle_exactness(std::string& detail) {
    Timer timer;
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_int(9));
        WeightedGraph g = random_graph(rng, n, static_cast<int>(rng.uniform_int(8)));
        for (int s = 0; s < n; ++s) {
            for (int t = 0; t < n; ++t) {
                if (s == t) continue;
                Decision fast = shortest_path(g, s, t);
                Decision exact = exact_path_bruteforce(g, s, t);
                double fv = decision_value(PathQuery{s, t}, fast, g);
                double ev = decision_value(PathQuery{s, t}, exact, g);
                if (fv != ev) {
                    detail = "value mismatch on trial " + std::to_string(trial);
                    return false;
                }
            }
        }
    }
    if (timer.seconds() >= 10.0) {
        detail = "exceeded the 10s budget";
        return false;
    }
    return true;
}

bool approximation_bound(std::string& detail) {
    Timer timer;
    Rng rng(102);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 5 + static_cast<int>(rng.uniform_int(6));
        WeightedGraph g = random_graph(rng, n, 3);
        while (g.topology->edge_count() > 16) g = random_graph(rng, n, 3);
        int k = 2 + static_cast<int>(rng.uniform_int(4));
        std::vector<int> terminals;
        while (static_cast<int>(terminals.size()) < k) {
            int v = static_cast<int>(rng.uniform_int(n));
            bool seen = false;
            for (int t : terminals) {
                if (t == v) seen = true;
            }
            if (!seen) terminals.push_back(v);
        }
        Decision approx = steiner_tree_2approx(g, terminals);
        Decision exact = exact_steiner_bruteforce(g, terminals);
        SteinerQuery q{terminals};
        double av = decision_value(q, approx, g);
        double ev = decision_value(q, exact, g);
        if (!(av <= 2.0 * ev + 1e-9)) {
            detail = "bound violated on trial " + std::to_string(trial);
            return false;
        }
    }
    if (timer.seconds() >= 30.0) {
        detail = "exceeded the 30s budget";
        return false;
    }
    return true;
}

bool qp_correctness(std::string& detail) {
    Rng rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        int dim = 1 + static_cast<int>(rng.uniform_int(6));
        int m = 1 + static_cast<int>(rng.uniform_int(8));
        double C = std::vector<double>{0.1, 1.0, 10.0}[rng.uniform_int(3)];
        std::vector<QpConstraint> cons;
        for (int k = 0; k < m; ++k) {
            QpConstraint con;
            con.b = 2.0 * rng.uniform01() - 1.0;
            for (int i = 0; i < dim; ++i) {
                con.a.push_back(2.0 * rng.uniform01() - 1.0);
            }
            cons.push_back(std::move(con));
        }
        QpResult r = qp_solve(dim, cons, C);
        for (const auto& con : cons) {
            double aw = 0.0;
            for (int i = 0; i < dim; ++i) aw += con.a[i] * r.w[i];
            if (aw < con.b - r.xi - 1e-8) {
                detail = "constraint violated on trial " + std::to_string(trial);
                return false;
            }
        }
        for (int probe = 0; probe < 10000; ++probe) {
            std::vector<double> w(dim);
            double objective = 0.0;
            for (double& x : w) {
                x = 3.0 * rng.uniform01();
                objective += 0.5 * x * x;
            }
            double need = 0.0;
            for (const auto& con : cons) {
                double aw = 0.0;
                for (int i = 0; i < dim; ++i) aw += con.a[i] * w[i];
                need = std::max(need, con.b - aw);
            }
            if (objective + C * need < r.objective - 1e-7) {
                detail = "beaten by a feasible point on trial " +
                         std::to_string(trial);
                return false;
            }
        }
    }
    QpResult big = qp_solve(1, {{{1.0}, 1.0}}, 10.0);
    QpResult small = qp_solve(1, {{{1.0}, 1.0}}, 0.25);
    if (std::abs(big.w[0] - 1.0) > 1e-6 || std::abs(big.xi) > 1e-6 ||
        std::abs(small.w[0] - 0.25) > 1e-6 || std::abs(small.xi - 0.75) > 1e-6) {
        detail = "hand-derived optima missed";
        return false;
    }
    return true;
}

bool cutting_plane_contract(std::string& detail) {
    auto topo = std::make_shared<const GraphTopology>(
        4, std::vector<std::pair<int, int>>{
               {0, 1}, {1, 3}, {0, 2}, {2, 3}, {0, 3}});
    GraphDistribution truth(topo, {EdgeDistribution::point_mass(1.0),
                                   EdgeDistribution::point_mass(1.0),
                                   EdgeDistribution::point_mass(2.0),
                                   EdgeDistribution::point_mass(2.0),
                                   EdgeDistribution::point_mass(5.0)});
    SamplePool pool = generate_pool(Task::Path, truth, 20, 104);
    MarginProblem problem{topo, {}, Task::Path, 1.0, pool.samples};
    CuttingPlaneResult r = cutting_plane_train(problem, 1.0, 1e-3, 50);
    if (!r.log.converged) {
        detail = "did not converge within 50 rounds";
        return false;
    }
    const RoundRecord& last = r.log.rounds.back();
    if (last.violation > last.xi + 1e-3) {
        detail = "final violation above the tolerance";
        return false;
    }
    for (std::size_t i = 1; i < r.log.rounds.size(); ++i) {
        if (r.log.rounds[i].objective < r.log.rounds[i - 1].objective - 1e-9) {
            detail = "objective decreased at round " + std::to_string(i);
            return false;
        }
    }
    return true;
}

bool training_helps(std::string& detail) {
    Timer timer;
    const SweepResult& sweep = path_to_tree_240();
    int better = 0;
    for (const SeedRunResult& run : sweep.runs) {
        if (run.ratio < run.pre_ratio) ++better;
    }
    if (better < 4) {
        detail = "trained model beat the round-0 model on only " +
                 std::to_string(better) + "/5 seeds";
        return false;
    }
    if (timer.seconds() >= 600.0) {
        detail = "exceeded the 10min budget";
        return false;
    }
    return true;
}

bool baseline_ordering(std::string& detail) {
    for (const SweepResult* sweep : {&path_to_tree_240(), &tree_to_path_240()}) {
        int beats_unit = 0;
        int beats_rand = 0;
        for (const SeedRunResult& run : sweep->runs) {
            double rand_ratio = run.baselines.at("rand");
            if (run.ratio < run.baselines.at("unit")) ++beats_unit;
            if (run.ratio < rand_ratio) ++beats_rand;
            if (rand_ratio <= 1.0) {
                detail = "rand baseline at or below 1";
                return false;
            }
        }
        if (beats_unit < 4 || beats_rand < 4) {
            detail = "trained model beat unit on " + std::to_string(beats_unit) +
                     "/5 and rand on " + std::to_string(beats_rand) + "/5 seeds";
            return false;
        }
    }
    return true;
}

bool sample_size_monotonicity(std::string& detail) {
    double at_240 = path_to_tree_240().mean_ratio;
    double at_60 = path_to_tree_60().mean_ratio;
    if (at_240 > at_60) {
        detail = "mean ratio rose from " + std::to_string(at_60) + " at 60 to " +
                 std::to_string(at_240) + " at 240 training samples";
        return false;
    }
    return true;
}

bool indicator_basis_reduction(std::string& detail) {
    FamilyParams params;
    params.nodes = 32;
    params.ws_k = 4;
    params.ws_p = 0.1;
    auto topo = std::make_shared<const GraphTopology>(
        gen_topology(Family::WS, params, 108));
    GraphDistribution truth = gen_truth_weibull(topo, 109);
    SamplePool pool = generate_pool(Task::Path, truth, 60, 110);
    QrtsPResult point = train_qrts_p(pool, Task::Path, topo);

    MixtureModel mixture;
    mixture.topology_fingerprint = point.model.topology_fingerprint;
    mixture.importance = point.model.weights;
    for (int e = 0; e < topo->edge_count(); ++e) {
        std::vector<double> indicator(topo->edge_count(), 0.0);
        indicator[e] = 1.0;
        mixture.basis.emplace_back(topo, std::move(indicator));
    }

    Rng rng(111);
    for (int trial = 0; trial < 100; ++trial) {
        Task task = trial % 2 == 0 ? Task::Path : Task::Steiner;
        Query q = sample_query(task, *topo, rng);
        Decision from_weights = predict(point.model, topo, q, task);
        Decision from_mixture = predict(mixture, q, task);
        if (!(from_weights == from_mixture)) {
            detail = "prediction diverged on trial " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

bool mean_graph_linearity(std::string& detail) {
    FamilyParams params;
    params.nodes = 15;
    params.ws_k = 4;
    params.ws_p = 0.1;
    auto topo = std::make_shared<const GraphTopology>(
        gen_topology(Family::WS, params, 112));
    if (topo->edge_count() != 30) {
        detail = "fixture expected 30 edges, got " +
                 std::to_string(topo->edge_count());
        return false;
    }
    GraphDistribution truth = gen_truth_weibull(topo, 113);
    WeightedGraph mg = mean_graph(truth);

    Rng query_rng(114);
    std::vector<Decision> decisions;
    std::vector<double> expected;
    for (int i = 0; i < 50; ++i) {
        Task task = i % 2 == 0 ? Task::Path : Task::Steiner;
        Query q = sample_query(task, *topo, query_rng);
        Decision d = infer(task, mg, q);
        expected.push_back(edge_sum(d, mg));
        decisions.push_back(std::move(d));
    }

    const int reps = 10000;
    Rng sample_rng(115);
    std::vector<double> mean(decisions.size(), 0.0);
    std::vector<double> m2(decisions.size(), 0.0);
    for (int rep = 0; rep < reps; ++rep) {
        WeightedGraph g = sample_graph(truth, sample_rng);
        for (std::size_t i = 0; i < decisions.size(); ++i) {
            double value = edge_sum(decisions[i], g);
            double delta = value - mean[i];
            mean[i] += delta / static_cast<double>(rep + 1);
            m2[i] += delta * (value - mean[i]);
        }
    }
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        double se = std::sqrt(m2[i] / (reps - 1.0) / reps);
        if (std::abs(mean[i] - expected[i]) > 3.0 * se) {
            detail = "pair " + std::to_string(i) + " off by " +
                     std::to_string(std::abs(mean[i] - expected[i])) +
                     " with standard error " + std::to_string(se);
            return false;
        }
    }
    return true;
}

bool pipeline_determinism(std::string& detail) {
    std::string dir = "acceptance_tmp";
    std::string topo = dir + "/topo.json";
    std::string truth = dir + "/truth.json";
    std::string train_pool = dir + "/train.jsonl";
    std::string test_pool = dir + "/test.jsonl";
    std::string model = dir + "/model.json";
    std::string report_path = dir + "/report.json";

    auto pipeline = [&]() -> bool {
        if (cli::run({"gen-graph", "--family", "ws", "--nodes", "32", "--ws-k",
                      "4", "--ws-p", "0.1", "--seed", "116", "-o", topo}) != 0)
            return false;
        if (cli::run({"gen-truth", "--topology", topo, "--seed", "117", "-o",
                      truth}) != 0)
            return false;
        if (cli::run({"gen-samples", "--truth", truth, "--task", "path", "--n",
                      "120", "--seed", "118", "-o", train_pool}) != 0)
            return false;
        if (cli::run({"gen-samples", "--truth", truth, "--task", "steiner",
                      "--n", "30", "--seed", "119", "-o", test_pool}) != 0)
            return false;
        if (cli::run({"train", "--method", "pd", "--source", "path",
                      "--samples", train_pool, "--topology", topo, "--K", "60",
                      "--iterations", "3", "--seed", "120", "-o", model}) != 0)
            return false;
        return cli::run({"eval", "--model", model, "--truth", truth, "--test",
                         test_pool, "-o", report_path}) == 0;
    };

    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    if (!pipeline()) {
        detail = "first pipeline run failed";
        return false;
    }
    std::string model_a = io::read_file(model);
    std::string report_a = io::read_file(report_path);
    if (!pipeline()) {
        detail = "second pipeline run failed";
        return false;
    }
    bool same = model_a == io::read_file(model) &&
                report_a == io::read_file(report_path);
    std::filesystem::remove_all(dir);
    if (!same) detail = "model or report bytes changed between runs";
    return same;
}

} // namespace

int main() {
    criterion(1, "oracle-exactness", oracle_exactness);
    criterion(2, "approximation-bound", approximation_bound);
    criterion(3, "qp-correctness", qp_correctness);
    criterion(4, "cutting-plane-contract", cutting_plane_contract);
    criterion(5, "training-helps", training_helps);
    criterion(6, "baseline-ordering", baseline_ordering);
    criterion(7, "sample-size-monotonicity", sample_size_monotonicity);
    criterion(8, "indicator-basis-reduction", indicator_basis_reduction);
    criterion(9, "mean-graph-linearity", mean_graph_linearity);
    criterion(10, "pipeline-determinism", pipeline_determinism);
    return g_all_passed ? 0 : 1;
}
