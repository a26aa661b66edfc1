#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrts/datagen.hpp"

namespace qrts {

/**
 * Shared shape of the two training QPs. The feature vector phi(j, y) has one
 * entry per basis element: the decision's value on that basis graph. An empty
 * `basis` means the implicit single-edge indicator basis (dimension = edge
 * count, phi entries are 0/1 edge indicators).
 */
struct MarginProblem {
    TopologyPtr topology;
    std::vector<WeightedGraph> basis; // empty => single-edge indicators
    Task source_task = Task::Path;
    double alpha = 1.0;
    std::vector<QuerySample> samples;

    int dimension() const;
    /** out += coef * phi(j, decision); out must have size dimension(). */
    void accumulate_phi(const Decision& decision, double coef,
                        std::vector<double>& out) const;
    /** Model-combined graph for inference; clamps, accepts all-zero w. */
    WeightedGraph combined(const std::vector<double>& w) const;
};

/** Decision-level zero-one loss. */
inline double zero_one_loss(const Decision& a, const Decision& b) {
    return a == b ? 0.0 : 1.0;
}

/**
 * Basis combination for model inference: sum_i w[i]*basis[i], every edge
 * clamped to >= kWeightClamp. Unlike combine_graphs it accepts an all-zero w
 * (round-0 inference on the uniform floor graph). An empty basis means the
 * single-edge indicator basis, i.e. the weights are w itself.
 */
WeightedGraph clamped_combination(TopologyPtr topo,
                                  const std::vector<WeightedGraph>& basis,
                                  const std::vector<double>& w);

struct QpConstraint {
    std::vector<double> a;
    double b = 0.0;
};

struct QpResult {
    std::vector<double> w; // >= 0
    double xi = 0.0;       // max(0, max_k(b_k - a_k.w))
    double objective = 0.0;
};

/**
 * min 1/2 |w|^2 + C*xi  s.t.  a_k.w >= b_k - xi, w >= 0, xi >= 0.
 * Solved in the dual by coordinate ascent with exact line search; optimality
 * certified by duality gap. Throws QpError with residuals on non-convergence.
 */
QpResult qp_solve(int dim, const std::vector<QpConstraint>& constraints, double C);

struct SeparationResult {
    std::vector<Decision> candidates; // per sample, in sample order
    QpConstraint constraint;          // a = (1/n) sum(alpha*phi(Phat) - phi(P)), b = mean loss
    double violation = 0.0;           // b - a.w for the incoming w
};

/**
 * Per-sample source-task inference on the combined graph; assembles the
 * most-violated joint constraint. Samples whose inference finds no route are
 * skipped for the round (n shrinks accordingly).
 */
SeparationResult separation_oracle(const MarginProblem& problem,
                                   const std::vector<double>& w);

struct RoundRecord {
    int round = 0;
    double objective = 0.0;
    double xi = 0.0;
    double violation = 0.0;
    int working_set = 0; // constraints in the QP solved this round
};

struct TrainLog {
    double C = 1.0;
    double epsilon = 1e-3;
    int max_rounds = 200;
    double alpha = 1.0;
    int n_samples = 0;
    int dimension = 0;
    std::vector<RoundRecord> rounds;
    bool converged = false;
};

struct CuttingPlaneResult {
    std::vector<double> w;
    TrainLog log;
};

inline constexpr double kDefaultC = 1.0;
inline constexpr double kDefaultEpsilon = 1e-3;
inline constexpr int kDefaultMaxRounds = 200;

/**
 * One-slack cutting plane: solve QP over the working set, call the separation
 * oracle, add the joint constraint; stop when violation <= xi + epsilon.
 */
CuttingPlaneResult cutting_plane_train(const MarginProblem& problem, double C,
                                       double epsilon, int max_rounds);

/** Per-edge weights >= 0 plus the fingerprint of the topology they index. */
struct EdgeWeightModel {
    std::vector<double> weights;
    std::string topology_fingerprint;
};

struct QrtsPResult {
    EdgeWeightModel model;
    TrainLog log;
};

/** Instantiate the single-edge-basis problem from the pool head and train. */
QrtsPResult train_qrts_p(const SamplePool& samples, Task source_task,
                         TopologyPtr topo, double C = kDefaultC,
                         double epsilon = kDefaultEpsilon,
                         int max_rounds = kDefaultMaxRounds);

} // namespace qrts
