#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qrts/evaluate.hpp"

namespace qrts::io {

using nlohmann::json;

// {"nodes": N, "edges": [[u,v], ...]}; edge id = array index.
json topology_to_json(const GraphTopology& topo);
GraphTopology topology_from_json(const json& j);
void save_topology(const std::string& path, const GraphTopology& topo);
TopologyPtr load_topology(const std::string& path);

// {"topology": path or inline object, "edges": [{"kind": ...}, ...],
//  "meta": optional free-form object}. Saved files inline the topology;
// a path value is resolved relative to the file's directory.
json distribution_to_json(const GraphDistribution& dist,
                          const json& meta = json::object());
GraphDistribution distribution_from_json(const json& j,
                                         const std::string& base_dir);
void save_distribution(const std::string& path, const GraphDistribution& dist,
                       const json& meta = json::object());
GraphDistribution load_distribution(const std::string& path);

json query_to_json(const Query& q);
Query query_from_json(const json& j);

// JSON Lines: header {"task","seed","truth_fingerprint","n"} then one
// {"query","decision","alpha"} object per sample.
void save_pool(const std::string& path, const SamplePool& pool);
SamplePool load_pool(const std::string& path);

// {"type":"edge_weights",...} or {"type":"subgraph_mixture",...}.
json model_to_json(const Model& model);
Model model_from_json(const json& j, TopologyPtr topo);
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path, TopologyPtr topo);

json report_to_json(const EvalReport& report);
EvalReport report_from_json(const json& j);
void save_report(const std::string& path, const EvalReport& report);

json sweep_to_json(const SweepResult& result, const json& config);

// JSON Lines: per segment a header {"C","epsilon","max_rounds","alpha","n",
// "dimension"}, one line per round, a {"converged",...} footer; pd runs
// prepend {"qrts_p_weights": [...]}.
void save_train_log(const std::string& path,
                    const std::vector<TrainLog>& segments,
                    const std::vector<double>& qrts_p_weights);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace qrts::io
