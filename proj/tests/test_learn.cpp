#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "qrts/learn.hpp"

using namespace qrts;

namespace {

TopologyPtr heavy_triangle_topo() {
    return std::make_shared<const GraphTopology>(
        3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 2}});
}

// point-mass truth on the triangle: direct edge 0-2 is the expensive one
GraphDistribution heavy_triangle_truth() {
    return GraphDistribution(heavy_triangle_topo(),
                             {EdgeDistribution::point_mass(1.0),
                              EdgeDistribution::point_mass(1.0),
                              EdgeDistribution::point_mass(3.0)});
}

SamplePool triangle_pool() {
    GraphDistribution truth = heavy_triangle_truth();
    WeightedGraph mg = mean_graph(truth);
    SamplePool pool;
    pool.task = Task::Path;
    pool.truth_fingerprint = fingerprint_distribution(truth);
    pool.samples.push_back(
        QuerySample{PathQuery{0, 2}, infer(Task::Path, mg, PathQuery{0, 2}), 1.0});
    return pool;
}

double qp_objective(const std::vector<double>& w, double xi, double C) {
    double s = 0.0;
    for (double x : w) s += x * x;
    return 0.5 * s + C * xi;
}

} // namespace

TEST_CASE("clamped_combination covers both basis forms") {
    auto topo = heavy_triangle_topo();
    // empty basis: the weights are the coefficients themselves, clamped
    WeightedGraph direct = clamped_combination(topo, {}, {0.5, 0.0, 2.0});
    CHECK(direct.weights[0] == 0.5);
    CHECK(direct.weights[1] == kWeightClamp);
    CHECK(direct.weights[2] == 2.0);
    // all-zero coefficients are allowed here, unlike combine_graphs
    WeightedGraph floor = clamped_combination(topo, {}, {0.0, 0.0, 0.0});
    for (double w : floor.weights) CHECK(w == kWeightClamp);

    std::vector<WeightedGraph> basis{WeightedGraph(topo, {1.0, 2.0, 3.0}),
                                     WeightedGraph(topo, {2.0, 0.0, 1.0})};
    WeightedGraph mixed = clamped_combination(topo, basis, {1.0, 0.5});
    CHECK(mixed.weights[0] == doctest::Approx(2.0));
    CHECK(mixed.weights[1] == doctest::Approx(2.0));
    CHECK(mixed.weights[2] == doctest::Approx(3.5));
    WeightedGraph zeroed = clamped_combination(topo, basis, {0.0, 0.0});
    for (double w : zeroed.weights) CHECK(w == kWeightClamp);

    CHECK_THROWS_AS(clamped_combination(topo, {}, {1.0}), ValidationError);
    CHECK_THROWS_AS(clamped_combination(topo, basis, {1.0}), ValidationError);
}

TEST_CASE("qp with no constraints is the origin") {
    QpResult r = qp_solve(3, {}, 1.0);
    CHECK(r.w == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(r.xi == 0.0);
    CHECK(r.objective == 0.0);
}

TEST_CASE("qp one-dimensional anchors") {
    std::vector<QpConstraint> cons{{{1.0}, 1.0}};
    QpResult big = qp_solve(1, cons, 10.0);
    CHECK(big.w[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(big.xi == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(big.objective == doctest::Approx(0.5).epsilon(1e-6));

    QpResult small = qp_solve(1, cons, 0.25);
    CHECK(small.w[0] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(small.xi == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(small.objective == doctest::Approx(0.21875).epsilon(1e-6));
}

TEST_CASE("qp clips negative directions to the slack") {
    // a = -1 pushes w negative, so w stays 0 and the slack absorbs b
    QpResult r = qp_solve(1, {{{-1.0}, 1.0}}, 2.0);
    CHECK(r.w[0] == doctest::Approx(0.0));
    CHECK(r.xi == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-9));

    // a = 0 makes the slack the only lever
    QpResult z = qp_solve(2, {{{0.0, 0.0}, 1.0}}, 0.5);
    CHECK(z.w == std::vector<double>{0.0, 0.0});
    CHECK(z.xi == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("qp decouples independent coordinates") {
    std::vector<QpConstraint> cons{{{1.0, 0.0}, 1.0}, {{0.0, 1.0}, 1.0}};
    QpResult r = qp_solve(2, cons, 10.0);
    CHECK(r.w[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.w[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("qp input validation") {
    CHECK_THROWS_AS(qp_solve(0, {}, 1.0), ValidationError);
    CHECK_THROWS_AS(qp_solve(1, {}, 0.0), ValidationError);
    CHECK_THROWS_AS(qp_solve(2, {{{1.0}, 1.0}}, 1.0), ValidationError);
    CHECK_THROWS_AS(qp_solve(1, {{{std::nan("")}, 1.0}}, 1.0), ValidationError);
}

TEST_CASE("qp solutions are feasible and beat random feasible points") {
    Rng rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        int dim = 1 + static_cast<int>(rng.uniform_int(6));
        int m = 1 + static_cast<int>(rng.uniform_int(8));
        double C = std::vector<double>{0.1, 1.0, 10.0}[rng.uniform_int(3)];
        std::vector<QpConstraint> cons;
        for (int k = 0; k < m; ++k) {
            QpConstraint con;
            con.b = 2.0 * rng.uniform01() - 1.0;
            for (int i = 0; i < dim; ++i)
                con.a.push_back(2.0 * rng.uniform01() - 1.0);
            cons.push_back(std::move(con));
        }
        QpResult r = qp_solve(dim, cons, C);

        for (double w : r.w) REQUIRE(w >= 0.0);
        REQUIRE(r.xi >= 0.0);
        double worst = 0.0;
        for (const auto& con : cons) {
            double aw = 0.0;
            for (int i = 0; i < dim; ++i) aw += con.a[i] * r.w[i];
            worst = std::max(worst, con.b - aw);
            REQUIRE(aw >= con.b - r.xi - 1e-8);
        }
        // xi is exactly the positive part of the worst violation
        REQUIRE(r.xi == doctest::Approx(std::max(0.0, worst)).epsilon(1e-9));
        REQUIRE(r.objective ==
                doctest::Approx(qp_objective(r.w, r.xi, C)).epsilon(1e-12));

        for (int probe = 0; probe < 1000; ++probe) {
            std::vector<double> w(dim);
            for (double& x : w) x = 3.0 * rng.uniform01();
            double need = 0.0;
            for (const auto& con : cons) {
                double aw = 0.0;
                for (int i = 0; i < dim; ++i) aw += con.a[i] * w[i];
                need = std::max(need, con.b - aw);
            }
            REQUIRE(qp_objective(w, need, C) >= r.objective - 1e-7);
        }
    }
}

TEST_CASE("qp objective grows as constraints accumulate") {
    Rng rng(18);
    int dim = 4;
    std::vector<QpConstraint> cons;
    double last = 0.0;
    for (int k = 0; k < 10; ++k) {
        QpConstraint con;
        con.b = rng.uniform01();
        for (int i = 0; i < dim; ++i) con.a.push_back(2.0 * rng.uniform01() - 1.0);
        cons.push_back(std::move(con));
        QpResult r = qp_solve(dim, cons, 1.0);
        CHECK(r.objective >= last - 1e-9);
        last = r.objective;
    }
}

TEST_CASE("qp is deterministic") {
    Rng rng(19);
    std::vector<QpConstraint> cons;
    for (int k = 0; k < 6; ++k) {
        QpConstraint con;
        con.b = rng.uniform01();
        for (int i = 0; i < 5; ++i) con.a.push_back(2.0 * rng.uniform01() - 1.0);
        cons.push_back(std::move(con));
    }
    QpResult a = qp_solve(5, cons, 1.0);
    QpResult b = qp_solve(5, cons, 1.0);
    CHECK(a.w == b.w);
    CHECK(a.xi == b.xi);
    CHECK(a.objective == b.objective);
}

TEST_CASE("margin problem dimensions and features") {
    auto topo = heavy_triangle_topo();
    MarginProblem edges{topo, {}, Task::Path, 1.0, {}};
    CHECK(edges.dimension() == 3);
    std::vector<double> phi(3, 0.0);
    edges.accumulate_phi(Decision(std::vector<int>{0, 2}), 2.0, phi);
    CHECK(phi == std::vector<double>{2.0, 0.0, 2.0});

    std::vector<WeightedGraph> basis{WeightedGraph(topo, {1.0, 2.0, 3.0}),
                                     WeightedGraph(topo, {2.0, 0.0, 1.0})};
    MarginProblem graphs{topo, basis, Task::Path, 1.0, {}};
    CHECK(graphs.dimension() == 2);
    std::vector<double> psi(2, 0.0);
    // decision value per basis graph: edges {0, 1} cost 3 and 2
    graphs.accumulate_phi(Decision(std::vector<int>{0, 1}), 1.0, psi);
    CHECK(psi[0] == doctest::Approx(3.0));
    CHECK(psi[1] == doctest::Approx(2.0));
}

TEST_CASE("separation at the origin proposes cheaper-by-count candidates") {
    SamplePool pool = triangle_pool();
    REQUIRE(pool.samples.front().decision == Decision(std::vector<int>{0, 1}));
    MarginProblem problem{heavy_triangle_topo(), {}, Task::Path, 1.0,
                          pool.samples};
    SeparationResult sep = separation_oracle(problem, {0.0, 0.0, 0.0});
    // on the uniform floor graph the one-edge route wins
    CHECK(sep.candidates[0] == Decision(std::vector<int>{2}));
    CHECK(sep.constraint.a == std::vector<double>{-1.0, -1.0, 1.0});
    CHECK(sep.constraint.b == 1.0);
    CHECK(sep.violation == 1.0);
}

TEST_CASE("separation at the true weights sees no violation") {
    SamplePool pool = triangle_pool();
    MarginProblem problem{heavy_triangle_topo(), {}, Task::Path, 1.0,
                          pool.samples};
    SeparationResult sep = separation_oracle(problem, {1.0, 1.0, 3.0});
    CHECK(sep.candidates[0] == pool.samples[0].decision);
    CHECK(sep.constraint.b == 0.0);
    CHECK(std::abs(sep.violation) <= 1e-12);
}

TEST_CASE("cutting plane solves the realizable triangle") {
    SamplePool pool = triangle_pool();
    MarginProblem problem{heavy_triangle_topo(), {}, Task::Path, 1.0,
                          pool.samples};
    CuttingPlaneResult r = cutting_plane_train(problem, 1.0, 1e-3, 200);
    CHECK(r.log.converged);
    REQUIRE(r.log.rounds.size() == 2);
    const RoundRecord& last = r.log.rounds.back();
    CHECK(last.violation <= last.xi + 1e-3);
    CHECK(r.w[2] == doctest::Approx(1.0).epsilon(1e-6));
    // the learned graph reproduces the pooled decision
    WeightedGraph combined = problem.combined(r.w);
    CHECK(infer(Task::Path, combined, PathQuery{0, 2}) ==
          pool.samples[0].decision);
}

TEST_CASE("cutting plane respects the round cap") {
    SamplePool pool = triangle_pool();
    MarginProblem problem{heavy_triangle_topo(), {}, Task::Path, 1.0,
                          pool.samples};
    CuttingPlaneResult zero = cutting_plane_train(problem, 1.0, 1e-3, 0);
    CHECK(zero.w == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(zero.log.rounds.empty());
    CHECK_FALSE(zero.log.converged);

    // a huge tolerance stops after the first look
    CuttingPlaneResult one = cutting_plane_train(problem, 1.0, 1e6, 200);
    CHECK(one.log.converged);
    CHECK(one.log.rounds.size() == 1);

    CHECK_THROWS_AS(cutting_plane_train(problem, 1.0, 0.0, 10), ValidationError);
    CHECK_THROWS_AS(cutting_plane_train(problem, 1.0, 1e-3, -1), ValidationError);
}

TEST_CASE("cutting plane objective trace never decreases") {
    Rng rng(23);
    // larger point-mass instance: WS-like chain with shortcuts
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 11; ++i) edges.emplace_back(i, i + 1);
    edges.emplace_back(0, 6);
    edges.emplace_back(3, 9);
    edges.emplace_back(2, 8);
    auto topo = std::make_shared<const GraphTopology>(12, edges);
    std::vector<EdgeDistribution> dists;
    for (int e = 0; e < topo->edge_count(); ++e)
        dists.push_back(
            EdgeDistribution::point_mass(1.0 + rng.uniform_int(5)));
    GraphDistribution truth(topo, dists);
    SamplePool pool = generate_pool(Task::Path, truth, 30, 91);

    MarginProblem problem{topo, {}, Task::Path, 1.0, pool.samples};
    CuttingPlaneResult r = cutting_plane_train(problem, 1.0, 1e-3, 200);
    CHECK(r.log.converged);
    for (std::size_t i = 1; i < r.log.rounds.size(); ++i)
        CHECK(r.log.rounds[i].objective >= r.log.rounds[i - 1].objective - 1e-9);
    const RoundRecord& last = r.log.rounds.back();
    CHECK(last.violation <= last.xi + 1e-3);
}

TEST_CASE("train_qrts_p returns a fingerprinted edge model") {
    SamplePool pool = triangle_pool();
    auto topo = heavy_triangle_topo();
    QrtsPResult r = train_qrts_p(pool, Task::Path, topo);
    CHECK(r.model.topology_fingerprint == fingerprint_topology(*topo));
    REQUIRE(r.model.weights.size() == 3);
    CHECK(r.log.converged);
    CHECK(r.log.dimension == 3);
    CHECK(r.log.n_samples == 1);
    CHECK(r.log.alpha == 1.0);

    // re-inference on the learned weights matches the pooled decision values
    WeightedGraph combined = clamped_combination(topo, {}, r.model.weights);
    WeightedGraph mg = mean_graph(heavy_triangle_truth());
    for (const auto& s : pool.samples) {
        Decision predicted = infer(Task::Path, combined, s.query);
        CHECK(decision_value(s.query, predicted, mg) ==
              decision_value(s.query, s.decision, mg));
    }
}

TEST_CASE("train_qrts_p validates its inputs") {
    auto topo = heavy_triangle_topo();
    SamplePool empty;
    empty.task = Task::Path;
    CHECK_THROWS_AS(train_qrts_p(empty, Task::Path, topo), ValidationError);

    SamplePool pool = triangle_pool();
    CHECK_THROWS_AS(train_qrts_p(pool, Task::Steiner, topo), ValidationError);

    SamplePool bad_alpha = triangle_pool();
    bad_alpha.samples[0].alpha = 0.5;
    CHECK_THROWS_AS(train_qrts_p(bad_alpha, Task::Path, topo), ValidationError);

    SamplePool bad_edge = triangle_pool();
    bad_edge.samples[0].decision = Decision(std::vector<int>{7});
    CHECK_THROWS_AS(train_qrts_p(bad_edge, Task::Path, topo), ValidationError);

    SamplePool bad_query = triangle_pool();
    bad_query.samples[0].query = PathQuery{0, 9};
    CHECK_THROWS_AS(train_qrts_p(bad_query, Task::Path, topo), ValidationError);
}

TEST_CASE("train_qrts_p single edge graph") {
    auto topo = std::make_shared<const GraphTopology>(
        2, std::vector<std::pair<int, int>>{{0, 1}});
    SamplePool pool;
    pool.task = Task::Path;
    pool.samples.push_back(
        QuerySample{PathQuery{0, 1}, Decision(std::vector<int>{0}), 1.0});
    QrtsPResult r = train_qrts_p(pool, Task::Path, topo);
    CHECK(r.log.converged);
    // the only decision is already optimal at the origin
    CHECK(r.log.rounds.size() == 1);
    CHECK(r.model.weights == std::vector<double>{0.0});
}

TEST_CASE("steiner-source training uses alpha two") {
    Rng rng(29);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 9; ++i) edges.emplace_back(i, i + 1);
    edges.emplace_back(0, 5);
    edges.emplace_back(4, 9);
    auto topo = std::make_shared<const GraphTopology>(10, edges);
    std::vector<EdgeDistribution> dists;
    for (int e = 0; e < topo->edge_count(); ++e)
        dists.push_back(EdgeDistribution::point_mass(1.0 + rng.uniform_int(4)));
    GraphDistribution truth(topo, dists);
    SamplePool pool = generate_pool(Task::Steiner, truth, 20, 31, {3, 4});
    QrtsPResult r = train_qrts_p(pool, Task::Steiner, topo);
    CHECK(r.log.alpha == 2.0);
    CHECK(r.log.converged);
    const RoundRecord& last = r.log.rounds.back();
    CHECK(last.violation <= last.xi + 1e-3);
}
