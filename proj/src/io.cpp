#include "qrts/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrts/errors.hpp"

namespace qrts::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const json& field(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object()) fail(ctx + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(ctx + ": missing \"" + key + "\"");
    return *it;
}

json parse_text(const std::string& text, const std::string& ctx) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ctx + ": " + e.what());
    }
}

std::string task_to_string(Task task) {
    return task == Task::Path ? "path" : "steiner";
}

Task task_from_string(const std::string& s, const std::string& ctx) {
    if (s == "path") return Task::Path;
    if (s == "steiner") return Task::Steiner;
    fail(ctx + ": unknown task \"" + s + "\"");
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

} // namespace

json topology_to_json(const GraphTopology& topo) {
    json edges = json::array();
    for (const auto& [u, v] : topo.edges()) edges.push_back(json::array({u, v}));
    return json{{"nodes", topo.node_count()}, {"edges", edges}};
}

GraphTopology topology_from_json(const json& j) {
    const std::string ctx = "topology";
    int nodes = field(j, "nodes", ctx).get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const json& e : field(j, "edges", ctx)) {
        if (!e.is_array() || e.size() != 2) {
            fail(ctx + ": each edge must be a [u, v] pair");
        }
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return GraphTopology(nodes, std::move(edges));
}

void save_topology(const std::string& path, const GraphTopology& topo) {
    write_file(path, topology_to_json(topo).dump(2) + "\n");
}

TopologyPtr load_topology(const std::string& path) {
    json j = parse_text(read_file(path), path);
    try {
        return std::make_shared<const GraphTopology>(topology_from_json(j));
    } catch (const json::exception& e) {
        fail(path + ": " + e.what());
    }
}

namespace {

json edge_dist_to_json(const EdgeDistribution& d) {
    switch (d.kind) {
        case EdgeDistribution::Kind::Weibull:
            return json{{"kind", "weibull"}, {"shape", d.a}, {"scale", d.b}};
        case EdgeDistribution::Kind::Exponential:
            return json{{"kind", "exponential"}, {"rate", d.a}};
        case EdgeDistribution::Kind::PointMass:
            return json{{"kind", "point_mass"}, {"value", d.a}};
    }
    throw ValidationError("unknown edge distribution kind");
}

EdgeDistribution edge_dist_from_json(const json& j, const std::string& ctx) {
    std::string kind = field(j, "kind", ctx).get<std::string>();
    if (kind == "weibull") {
        return EdgeDistribution::weibull(field(j, "shape", ctx).get<double>(),
                                         field(j, "scale", ctx).get<double>());
    }
    if (kind == "exponential") {
        return EdgeDistribution::exponential(field(j, "rate", ctx).get<double>());
    }
    if (kind == "point_mass") {
        return EdgeDistribution::point_mass(field(j, "value", ctx).get<double>());
    }
    fail(ctx + ": unknown edge distribution kind \"" + kind + "\"");
}

} // namespace

json distribution_to_json(const GraphDistribution& dist, const json& meta) {
    json edges = json::array();
    for (const EdgeDistribution& d : dist.edge_dists) {
        edges.push_back(edge_dist_to_json(d));
    }
    json out{{"topology", topology_to_json(*dist.topology)}, {"edges", edges}};
    if (!meta.empty()) out["meta"] = meta;
    return out;
}

GraphDistribution distribution_from_json(const json& j,
                                         const std::string& base_dir) {
    const std::string ctx = "distribution";
    const json& topo_field = field(j, "topology", ctx);
    TopologyPtr topo;
    if (topo_field.is_string()) {
        topo = load_topology(resolve(topo_field.get<std::string>(), base_dir));
    } else {
        topo = std::make_shared<const GraphTopology>(
            topology_from_json(topo_field));
    }
    std::vector<EdgeDistribution> dists;
    for (const json& e : field(j, "edges", ctx)) {
        dists.push_back(edge_dist_from_json(e, ctx));
    }
    return GraphDistribution(std::move(topo), std::move(dists));
}

void save_distribution(const std::string& path, const GraphDistribution& dist,
                       const json& meta) {
    write_file(path, distribution_to_json(dist, meta).dump(2) + "\n");
}

GraphDistribution load_distribution(const std::string& path) {
    json j = parse_text(read_file(path), path);
    try {
        std::string base = std::filesystem::path(path).parent_path().string();
        return distribution_from_json(j, base);
    } catch (const json::exception& e) {
        fail(path + ": " + e.what());
    }
}

json query_to_json(const Query& q) {
    if (const auto* p = std::get_if<PathQuery>(&q)) {
        return json{{"kind", "path"}, {"s", p->source}, {"t", p->target}};
    }
    const auto& st = std::get<SteinerQuery>(q);
    return json{{"kind", "steiner"}, {"terminals", st.terminals}};
}

Query query_from_json(const json& j) {
    const std::string ctx = "query";
    std::string kind = field(j, "kind", ctx).get<std::string>();
    if (kind == "path") {
        return PathQuery{field(j, "s", ctx).get<int>(),
                         field(j, "t", ctx).get<int>()};
    }
    if (kind == "steiner") {
        return SteinerQuery(
            field(j, "terminals", ctx).get<std::vector<int>>());
    }
    fail(ctx + ": unknown kind \"" + kind + "\"");
}

void save_pool(const std::string& path, const SamplePool& pool) {
    std::ostringstream out;
    json header{{"task", task_to_string(pool.task)},
                {"seed", pool.seed},
                {"truth_fingerprint", pool.truth_fingerprint},
                {"n", pool.samples.size()}};
    out << header.dump() << "\n";
    for (const QuerySample& s : pool.samples) {
        json line{{"query", query_to_json(s.query)},
                  {"decision", s.decision.edge_ids},
                  {"alpha", s.alpha}};
        out << line.dump() << "\n";
    }
    write_file(path, out.str());
}

SamplePool load_pool(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) fail(path + ": empty pool file");
    json header = parse_text(line, path + " header");
    SamplePool pool;
    try {
        pool.task = task_from_string(
            field(header, "task", "pool header").get<std::string>(), path);
        pool.seed = field(header, "seed", "pool header").get<std::uint64_t>();
        pool.truth_fingerprint =
            field(header, "truth_fingerprint", "pool header").get<std::string>();
    } catch (const json::exception& e) {
        fail(path + ": " + e.what());
    }
    std::size_t declared =
        field(header, "n", "pool header").get<std::size_t>();
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string ctx = path + " line " + std::to_string(lineno);
        json j = parse_text(line, ctx);
        try {
            QuerySample sample{
                query_from_json(field(j, "query", ctx)),
                Decision(field(j, "decision", ctx).get<std::vector<int>>()),
                field(j, "alpha", ctx).get<double>()};
            pool.samples.push_back(std::move(sample));
        } catch (const json::exception& e) {
            fail(ctx + ": " + e.what());
        }
    }
    if (pool.samples.size() != declared) {
        fail(path + ": header declares " + std::to_string(declared) +
             " samples but the file has " + std::to_string(pool.samples.size()));
    }
    return pool;
}

json model_to_json(const Model& model) {
    if (const auto* p = std::get_if<EdgeWeightModel>(&model)) {
        return json{{"type", "edge_weights"},
                    {"topology_fingerprint", p->topology_fingerprint},
                    {"weights", p->weights}};
    }
    const auto& m = std::get<MixtureModel>(model);
    json basis = json::array();
    for (const WeightedGraph& g : m.basis) basis.push_back(g.weights);
    std::vector<double> rates;
    rates.reserve(m.empirical_params.edge_dists.size());
    for (const EdgeDistribution& d : m.empirical_params.edge_dists) {
        if (d.kind != EdgeDistribution::Kind::Exponential) {
            throw ValidationError(
                "only exponential mixture parameters are serializable");
        }
        rates.push_back(d.a);
    }
    return json{{"type", "subgraph_mixture"},
                {"topology_fingerprint", m.topology_fingerprint},
                {"K", m.basis.size()},
                {"importance", m.importance},
                {"basis", basis},
                {"empirical_rates", rates},
                {"rounds", m.rounds}};
}

Model model_from_json(const json& j, TopologyPtr topo) {
    const std::string ctx = "model";
    std::string type = field(j, "type", ctx).get<std::string>();
    std::string fp = field(j, "topology_fingerprint", ctx).get<std::string>();
    std::string topo_fp = fingerprint_topology(*topo);
    if (fp != topo_fp) {
        throw ValidationError("model topology fingerprint " + fp +
                              " does not match the supplied topology " + topo_fp);
    }
    if (type == "edge_weights") {
        EdgeWeightModel m;
        m.topology_fingerprint = fp;
        m.weights = field(j, "weights", ctx).get<std::vector<double>>();
        if (m.weights.size() != topo->edges().size()) {
            fail(ctx + ": weight count does not match the topology edge count");
        }
        return m;
    }
    if (type == "subgraph_mixture") {
        MixtureModel m;
        m.topology_fingerprint = fp;
        m.rounds = field(j, "rounds", ctx).get<int>();
        m.importance = field(j, "importance", ctx).get<std::vector<double>>();
        std::size_t k = field(j, "K", ctx).get<std::size_t>();
        const json& basis = field(j, "basis", ctx);
        if (basis.size() != k || m.importance.size() != k) {
            fail(ctx + ": basis and importance sizes must both equal K");
        }
        for (const json& row : basis) {
            auto weights = row.get<std::vector<double>>();
            if (weights.size() != topo->edges().size()) {
                fail(ctx + ": basis row size does not match the topology");
            }
            m.basis.emplace_back(topo, std::move(weights));
        }
        auto rates =
            field(j, "empirical_rates", ctx).get<std::vector<double>>();
        if (rates.size() != topo->edges().size()) {
            fail(ctx + ": empirical_rates size does not match the topology");
        }
        std::vector<EdgeDistribution> dists;
        dists.reserve(rates.size());
        for (double r : rates) dists.push_back(EdgeDistribution::exponential(r));
        m.empirical_params = GraphDistribution(topo, std::move(dists));
        return m;
    }
    fail(ctx + ": unknown model type \"" + type + "\"");
}

void save_model(const std::string& path, const Model& model) {
    write_file(path, model_to_json(model).dump(2) + "\n");
}

Model load_model(const std::string& path, TopologyPtr topo) {
    json j = parse_text(read_file(path), path);
    try {
        return model_from_json(j, std::move(topo));
    } catch (const json::exception& e) {
        fail(path + ": " + e.what());
    }
}

json report_to_json(const EvalReport& report) {
    json per_query = json::array();
    for (const PerQueryRecord& r : report.per_query) {
        per_query.push_back({{"id", r.id},
                             {"predicted", r.predicted},
                             {"reference", r.reference}});
    }
    json out{{"ratio", report.ratio},
             {"n_test", report.n_test},
             {"config", report.config},
             {"per_query", per_query}};
    if (report.stddev) out["std"] = *report.stddev;
    if (!report.baselines.empty()) out["baselines"] = report.baselines;
    return out;
}

EvalReport report_from_json(const json& j) {
    const std::string ctx = "report";
    EvalReport report;
    try {
        report.ratio = field(j, "ratio", ctx).get<double>();
        report.n_test = field(j, "n_test", ctx).get<int>();
        report.config = field(j, "config", ctx);
        if (j.contains("std")) report.stddev = j.at("std").get<double>();
        if (j.contains("baselines")) {
            report.baselines =
                j.at("baselines").get<std::map<std::string, double>>();
        }
        for (const json& r : field(j, "per_query", ctx)) {
            report.per_query.push_back({field(r, "id", ctx).get<int>(),
                                        field(r, "predicted", ctx).get<double>(),
                                        field(r, "reference", ctx).get<double>()});
        }
    } catch (const json::exception& e) {
        fail(ctx + ": " + e.what());
    }
    return report;
}

void save_report(const std::string& path, const EvalReport& report) {
    write_file(path, report_to_json(report).dump(2) + "\n");
}

json sweep_to_json(const SweepResult& result, const json& config) {
    json runs = json::array();
    bool with_pre = config.value("with_pre", false);
    for (const SeedRunResult& r : result.runs) {
        json run{{"seed_index", r.seed_index}, {"ratio", r.ratio}};
        if (with_pre) run["pre_ratio"] = r.pre_ratio;
        if (!r.baselines.empty()) run["baselines"] = r.baselines;
        runs.push_back(std::move(run));
    }
    json out{{"ratio", result.mean_ratio},
             {"n_test", result.n_test},
             {"config", config},
             {"runs", runs}};
    if (result.stddev) out["std"] = *result.stddev;
    if (!result.runs.empty() && !result.runs.front().baselines.empty()) {
        json means = json::object();
        for (const auto& entry : result.runs.front().baselines) {
            double sum = 0.0;
            for (const SeedRunResult& r : result.runs) {
                sum += r.baselines.at(entry.first);
            }
            means[entry.first] = sum / static_cast<double>(result.runs.size());
        }
        out["baselines"] = means;
    }
    return out;
}

void save_train_log(const std::string& path,
                    const std::vector<TrainLog>& segments,
                    const std::vector<double>& qrts_p_weights) {
    std::ostringstream out;
    if (!qrts_p_weights.empty()) {
        out << json{{"qrts_p_weights", qrts_p_weights}}.dump() << "\n";
    }
    for (const TrainLog& log : segments) {
        json header{{"C", log.C},
                    {"epsilon", log.epsilon},
                    {"max_rounds", log.max_rounds},
                    {"alpha", log.alpha},
                    {"n", log.n_samples},
                    {"dimension", log.dimension}};
        out << header.dump() << "\n";
        for (const RoundRecord& r : log.rounds) {
            json line{{"round", r.round},
                      {"objective", r.objective},
                      {"xi", r.xi},
                      {"violation", r.violation},
                      {"working_set", r.working_set}};
            out << line.dump() << "\n";
        }
        json footer{{"converged", log.converged},
                    {"rounds", log.rounds.size()}};
        out << footer.dump() << "\n";
    }
    write_file(path, out.str());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) fail("failed writing " + path);
}

} // namespace qrts::io
