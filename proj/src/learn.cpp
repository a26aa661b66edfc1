#include "qrts/learn.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace qrts {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

// ---- dual QP ----------------------------------------------------------
//
// Primal: min 1/2 |w|^2 + C*xi  s.t.  a_k.w >= b_k - xi, w >= 0, xi >= 0.
// Dual:   max D(lambda) = lambda.b - 1/2 |[A'lambda]+|^2
//         over lambda >= 0, sum(lambda) <= C,
// with primal recovery w = [A'lambda]+ and xi from the max constraint
// violation. D is smooth and concave; coordinate and pair steps with exact
// line maximization converge, and the duality gap certifies the result.

struct DualState {
    const std::vector<QpConstraint>* constraints;
    int dim;
    double C;
    std::vector<double> lambda;
    std::vector<double> v; // A' lambda
    double sum_lambda = 0.0;

    void recompute() {
        std::fill(v.begin(), v.end(), 0.0);
        sum_lambda = 0.0;
        for (std::size_t k = 0; k < lambda.size(); ++k) {
            sum_lambda += lambda[k];
            if (lambda[k] == 0.0) continue;
            const auto& a = (*constraints)[k].a;
            for (int i = 0; i < dim; ++i) v[i] += lambda[k] * a[i];
        }
    }

    std::vector<double> primal_w() const {
        std::vector<double> w(dim);
        for (int i = 0; i < dim; ++i) w[i] = std::max(0.0, v[i]);
        return w;
    }

    double dual_value() const {
        double s = 0.0;
        for (std::size_t k = 0; k < lambda.size(); ++k)
            s += lambda[k] * (*constraints)[k].b;
        for (int i = 0; i < dim; ++i) {
            double p = std::max(0.0, v[i]);
            s -= 0.5 * p * p;
        }
        return s;
    }
};

// Exact maximization of D(lambda + t*delta) for t in [tlo, thi], where the
// direction enters v as c = A'delta. phi'(t) = db - sum_i c_i*max(0, v_i+t*c_i)
// is piecewise linear non-increasing; walk its breakpoints.
double line_max(const DualState& st, const std::vector<double>& c, double db,
                double tlo, double thi) {
    auto deriv = [&](double t) {
        double s = db;
        for (int i = 0; i < st.dim; ++i) {
            if (c[i] == 0.0) continue;
            double val = st.v[i] + t * c[i];
            if (val > 0.0) s -= c[i] * val;
        }
        return s;
    };
    if (deriv(tlo) <= 0.0) return tlo;
    if (deriv(thi) >= 0.0) return thi;
    std::vector<double> breaks;
    for (int i = 0; i < st.dim; ++i) {
        if (c[i] == 0.0) continue;
        double t = -st.v[i] / c[i];
        if (t > tlo && t < thi) breaks.push_back(t);
    }
    std::sort(breaks.begin(), breaks.end());
    double lo = tlo;
    double dlo = deriv(tlo);
    for (double bp : breaks) {
        double dbp = deriv(bp);
        if (dbp <= 0.0) {
            // root inside [lo, bp]; phi' linear there
            return (dlo == dbp) ? lo : lo + (bp - lo) * dlo / (dlo - dbp);
        }
        lo = bp;
        dlo = dbp;
    }
    double dhi = deriv(thi);
    return (dlo == dhi) ? thi : lo + (thi - lo) * dlo / (dlo - dhi);
}

// One step along lambda_k; returns the change applied.
double coordinate_step(DualState& st, int k) {
    const auto& con = (*st.constraints)[k];
    double tlo = -st.lambda[k];
    double thi = st.C - st.sum_lambda;
    if (thi < tlo) thi = tlo;
    double t = line_max(st, con.a, con.b, tlo, thi);
    if (t == 0.0) return 0.0;
    st.lambda[k] += t;
    st.sum_lambda += t;
    for (int i = 0; i < st.dim; ++i) st.v[i] += t * con.a[i];
    return t;
}

// Mass-shifting step lambda_k += t, lambda_l -= t (keeps the cap tight).
double pair_step(DualState& st, int k, int l) {
    const auto& ck = (*st.constraints)[k];
    const auto& cl = (*st.constraints)[l];
    std::vector<double> c(st.dim);
    for (int i = 0; i < st.dim; ++i) c[i] = ck.a[i] - cl.a[i];
    double t = line_max(st, c, ck.b - cl.b, -st.lambda[k], st.lambda[l]);
    if (t == 0.0) return 0.0;
    st.lambda[k] += t;
    st.lambda[l] -= t;
    for (int i = 0; i < st.dim; ++i) st.v[i] += t * c[i];
    return t;
}

struct QpSolution {
    std::vector<double> w;
    double xi;
    double objective;
};

QpSolution solve_dual(int dim, const std::vector<QpConstraint>& constraints, double C,
                      std::vector<double>& lambda_warm) {
    require(dim >= 1, "qp: dimension must be >= 1");
    require(C > 0.0 && std::isfinite(C), "qp: C must be positive finite");
    for (const auto& con : constraints) {
        require(static_cast<int>(con.a.size()) == dim, "qp: constraint dimension mismatch");
        for (double x : con.a) require(std::isfinite(x), "qp: non-finite coefficient");
        require(std::isfinite(con.b), "qp: non-finite offset");
    }
    lambda_warm.resize(constraints.size(), 0.0);

    DualState st{&constraints, dim, C, lambda_warm, std::vector<double>(dim, 0.0), 0.0};
    st.recompute();

    auto assemble = [&]() {
        QpSolution sol;
        sol.w = st.primal_w();
        sol.xi = 0.0;
        for (const auto& con : constraints)
            sol.xi = std::max(sol.xi, con.b - dot(con.a, sol.w));
        sol.objective = 0.5 * dot(sol.w, sol.w) + C * sol.xi;
        return sol;
    };

    int K = static_cast<int>(constraints.size());
    if (K == 0) {
        lambda_warm = st.lambda;
        return assemble();
    }

    const int max_passes = 20000;
    for (int pass = 0; pass < max_passes; ++pass) {
        double moved = 0.0;
        for (int k = 0; k < K; ++k) moved += std::abs(coordinate_step(st, k));
        // When the cap binds, shift mass between the steepest pair.
        for (int inner = 0; inner < K; ++inner) {
            if (C - st.sum_lambda > 1e-12 * std::max(1.0, C)) break;
            auto w = st.primal_w();
            int best_up = -1, best_dn = -1;
            double gmax = -std::numeric_limits<double>::infinity();
            double gmin = std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k) {
                double gk = constraints[k].b - dot(constraints[k].a, w);
                if (gk > gmax) {
                    gmax = gk;
                    best_up = k;
                }
                if (st.lambda[k] > 0.0 && gk < gmin) {
                    gmin = gk;
                    best_dn = k;
                }
            }
            if (best_up < 0 || best_dn < 0 || best_up == best_dn) break;
            if (gmax - gmin <= 1e-14 * std::max(1.0, std::abs(gmax))) break;
            moved += std::abs(pair_step(st, best_up, best_dn));
        }

        auto sol = assemble();
        double gap = sol.objective - st.dual_value();
        if (gap <= 1e-9 * std::max(1.0, std::abs(sol.objective))) {
            lambda_warm = st.lambda;
            return sol;
        }
        if (moved == 0.0) {
            // No feasible ascent direction found yet the gap persists.
            st.recompute();
            if (pass > 2) {
                double maxviol = 0.0;
                for (const auto& con : constraints)
                    maxviol = std::max(maxviol, con.b - sol.xi - dot(con.a, sol.w));
                throw QpError("qp: stalled before reaching tolerance", gap, maxviol);
            }
        }
        if (pass % 64 == 63) st.recompute(); // shed accumulated drift
    }
    auto sol = assemble();
    double gap = sol.objective - st.dual_value();
    double maxviol = 0.0;
    for (const auto& con : constraints)
        maxviol = std::max(maxviol, con.b - sol.xi - dot(con.a, sol.w));
    throw QpError("qp: iteration cap reached (gap " + std::to_string(gap) + ")", gap,
                  maxviol);
}

} // namespace

WeightedGraph clamped_combination(TopologyPtr topo,
                                  const std::vector<WeightedGraph>& basis,
                                  const std::vector<double>& w) {
    std::vector<double> out;
    if (basis.empty()) {
        require(static_cast<int>(w.size()) == topo->edge_count(),
                "combination: weight count != edge count");
        out = w;
    } else {
        require(w.size() == basis.size(), "combination: weight count != basis size");
        out.assign(topo->edge_count(), 0.0);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const auto& gw = basis[i].weights;
            for (std::size_t e = 0; e < out.size(); ++e) out[e] += w[i] * gw[e];
        }
    }
    for (double& x : out)
        if (x < kWeightClamp) x = kWeightClamp;
    return WeightedGraph(std::move(topo), std::move(out));
}

int MarginProblem::dimension() const {
    return basis.empty() ? topology->edge_count() : static_cast<int>(basis.size());
}

void MarginProblem::accumulate_phi(const Decision& decision, double coef,
                                   std::vector<double>& out) const {
    if (basis.empty()) {
        for (int e : decision.edge_ids) out[e] += coef;
        return;
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
        double value = 0.0;
        for (int e : decision.edge_ids) value += basis[i].weights[e];
        out[i] += coef * value;
    }
}

WeightedGraph MarginProblem::combined(const std::vector<double>& w) const {
    require(static_cast<int>(w.size()) == dimension(), "combined: dimension mismatch");
    return clamped_combination(topology, basis, w);
}

QpResult qp_solve(int dim, const std::vector<QpConstraint>& constraints, double C) {
    std::vector<double> lambda;
    auto sol = solve_dual(dim, constraints, C, lambda);
    return QpResult{std::move(sol.w), sol.xi, sol.objective};
}

SeparationResult separation_oracle(const MarginProblem& problem,
                                   const std::vector<double>& w) {
    require(!problem.samples.empty(), "separation: no samples");
    int d = problem.dimension();
    WeightedGraph combined = problem.combined(w);

    SeparationResult res;
    res.candidates.resize(problem.samples.size());
    res.constraint.a.assign(d, 0.0);
    double loss_sum = 0.0;
    int used = 0;
    for (std::size_t j = 0; j < problem.samples.size(); ++j) {
        const auto& sample = problem.samples[j];
        Decision cand;
        try {
            cand = infer(problem.source_task, combined, sample.query);
        } catch (const NoRouteError& err) {
            std::cerr << "separation: sample " << j << " skipped (" << err.what()
                      << ")\n";
            continue;
        }
        loss_sum += zero_one_loss(sample.decision, cand);
        problem.accumulate_phi(cand, problem.alpha, res.constraint.a);
        problem.accumulate_phi(sample.decision, -1.0, res.constraint.a);
        res.candidates[j] = std::move(cand);
        ++used;
    }
    require(used > 0, "separation: every sample was skipped");
    for (double& x : res.constraint.a) x /= used;
    res.constraint.b = loss_sum / used;
    res.violation = res.constraint.b - dot(res.constraint.a, w);
    return res;
}

CuttingPlaneResult cutting_plane_train(const MarginProblem& problem, double C,
                                       double epsilon, int max_rounds) {
    require(epsilon > 0.0, "cutting plane: epsilon must be positive");
    require(max_rounds >= 0, "cutting plane: negative round cap");
    int d = problem.dimension();

    CuttingPlaneResult out;
    out.w.assign(d, 0.0);
    out.log.C = C;
    out.log.epsilon = epsilon;
    out.log.max_rounds = max_rounds;
    out.log.alpha = problem.alpha;
    out.log.n_samples = static_cast<int>(problem.samples.size());
    out.log.dimension = d;

    std::vector<QpConstraint> working_set;
    std::vector<double> lambda;
    for (int round = 0; round < max_rounds; ++round) {
        auto sol = solve_dual(d, working_set, C, lambda);
        out.w = sol.w;
        auto sep = separation_oracle(problem, out.w);
        out.log.rounds.push_back(RoundRecord{round, sol.objective, sol.xi,
                                             sep.violation,
                                             static_cast<int>(working_set.size())});
        if (sep.violation <= sol.xi + epsilon) {
            out.log.converged = true;
            break;
        }
        working_set.push_back(std::move(sep.constraint));
        lambda.push_back(0.0);
    }
    return out;
}

QrtsPResult train_qrts_p(const SamplePool& samples, Task source_task,
                         TopologyPtr topo, double C, double epsilon,
                         int max_rounds) {
    require(!samples.samples.empty(), "train: empty sample pool");
    require(samples.task == source_task, "train: pool task != source task");
    double alpha = samples.samples.front().alpha;
    for (const auto& s : samples.samples) {
        require(s.alpha == alpha, "train: mixed alpha values in pool");
        validate_query(s.query, *topo);
        for (int e : s.decision.edge_ids)
            require(e >= 0 && e < topo->edge_count(), "train: decision edge out of range");
    }
    require(alpha >= 1.0, "train: alpha must be >= 1");

    MarginProblem problem{topo, {}, source_task, alpha, samples.samples};
    auto trained = cutting_plane_train(problem, C, epsilon, max_rounds);
    QrtsPResult res;
    res.model = EdgeWeightModel{trained.w, fingerprint_topology(*topo)};
    res.log = std::move(trained.log);
    return res;
}

} // namespace qrts
