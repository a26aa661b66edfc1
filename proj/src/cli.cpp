#include "qrts/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qrts/errors.hpp"
#include "qrts/evaluate.hpp"
#include "qrts/io.hpp"

namespace qrts::cli {

namespace {

using nlohmann::json;

Task parse_task(const std::string& s) {
    return s == "path" ? Task::Path : Task::Steiner;
}

Family parse_family(const std::string& s) {
    if (s == "ba") return Family::BA;
    if (s == "ws") return Family::WS;
    return Family::Kronecker;
}

GraphTopology build_topology(const std::string& preset_name,
                             const std::string& family, int nodes, int ba_m,
                             int ws_k, double ws_p, int kro_t,
                             const std::vector<double>& kro_init,
                             std::uint64_t seed) {
    if (!preset_name.empty()) {
        std::optional<Preset> preset = find_preset(preset_name);
        if (!preset) {
            throw CLI::ValidationError("--preset",
                                       "unknown preset \"" + preset_name + "\"");
        }
        return gen_topology(preset->family, preset->params, seed);
    }
    if (family.empty()) {
        throw CLI::RequiredError("either --family or --preset");
    }
    if (nodes <= 0) {
        throw CLI::ValidationError("--nodes", "required with --family");
    }
    FamilyParams params;
    params.nodes = nodes;
    params.ba_m = ba_m;
    params.ws_k = ws_k;
    params.ws_p = ws_p;
    params.kro_t = kro_t;
    if (!kro_init.empty()) {
        std::copy(kro_init.begin(), kro_init.end(), params.kro_init.begin());
    }
    return gen_topology(parse_family(family), params, seed);
}

std::vector<int> parse_id_list(const std::string& text) {
    std::vector<int> ids;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t comma = text.find(',', start);
        std::size_t len =
            comma == std::string::npos ? std::string::npos : comma - start;
        std::string token = text.substr(start, len);
        try {
            std::size_t used = 0;
            int value = std::stoi(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            ids.push_back(value);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--decision",
                                       "bad edge id \"" + token + "\"");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return ids;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Query-decision regression across graph tasks"};
    app.name("qrts");
    app.require_subcommand(1);

    auto task_values = CLI::IsMember({"path", "steiner"});
    auto method_values = CLI::IsMember({"p", "d", "pd", "pd-"});

    // gen-graph
    auto* gen_graph = app.add_subcommand(
        "gen-graph", "Generate a random graph topology");
    std::string gg_family, gg_preset, gg_output;
    int gg_nodes = 0, gg_ba_m = 1, gg_ws_k = 4, gg_kro_t = 1;
    double gg_ws_p = 0.0;
    std::vector<double> gg_kro_init;
    std::uint64_t gg_seed = 0;
    auto* gg_family_opt =
        gen_graph->add_option("--family", gg_family, "ba, ws, or kronecker")
            ->check(CLI::IsMember({"ba", "ws", "kronecker"}));
    gen_graph
        ->add_option("--preset", gg_preset,
                     "named preset (kro-128, ba-128, ws-sparse-128, ws-dense-128)")
        ->excludes(gg_family_opt);
    gen_graph->add_option("--nodes", gg_nodes, "node count before pruning");
    gen_graph->add_option("--ba-m", gg_ba_m, "edges per new node");
    gen_graph->add_option("--ws-k", gg_ws_k, "even ring-lattice degree");
    gen_graph->add_option("--ws-p", gg_ws_p, "rewire probability");
    gen_graph->add_option("--kro-t", gg_kro_t, "Kronecker power");
    gen_graph
        ->add_option("--kro-init", gg_kro_init,
                     "row-major 2x2 initiator, four values")
        ->delimiter(',')
        ->expected(4);
    gen_graph->add_option("--seed", gg_seed, "generation seed")->required();
    gen_graph->add_option("-o,--output", gg_output, "output path")->required();
    gen_graph->callback([&] {
        GraphTopology topo =
            build_topology(gg_preset, gg_family, gg_nodes, gg_ba_m, gg_ws_k,
                           gg_ws_p, gg_kro_t, gg_kro_init, gg_seed);
        io::save_topology(gg_output, topo);
    });

    // load-dimacs
    auto* load_dimacs = app.add_subcommand(
        "load-dimacs", "Convert a DIMACS .gr file to a topology");
    std::string ld_input, ld_output;
    load_dimacs->add_option("--input", ld_input, "DIMACS .gr path")->required();
    load_dimacs->add_option("-o,--output", ld_output, "output path")->required();
    load_dimacs->callback(
        [&] { io::save_topology(ld_output, load_dimacs_gr(ld_input)); });

    // gen-truth
    auto* gen_truth = app.add_subcommand(
        "gen-truth", "Draw a ground-truth edge distribution for a topology");
    std::string gt_topology, gt_output;
    std::uint64_t gt_seed = 0;
    gen_truth->add_option("--topology", gt_topology, "topology path")->required();
    gen_truth->add_option("--seed", gt_seed, "draw seed")->required();
    gen_truth->add_option("-o,--output", gt_output, "output path")->required();
    gen_truth->callback([&] {
        TopologyPtr topo = io::load_topology(gt_topology);
        io::save_distribution(gt_output, gen_truth_weibull(topo, gt_seed),
                              json{{"seed", gt_seed}});
    });

    // gen-samples
    auto* gen_samples = app.add_subcommand(
        "gen-samples", "Generate a solved query pool from a truth distribution");
    std::string gs_truth, gs_task, gs_output;
    int gs_n = 0, gs_steiner_min = 3, gs_steiner_max = 6;
    std::uint64_t gs_seed = 0;
    gen_samples->add_option("--truth", gs_truth, "truth distribution path")
        ->required();
    gen_samples->add_option("--task", gs_task, "path or steiner")
        ->required()
        ->check(task_values);
    gen_samples->add_option("--n", gs_n, "sample count")->required();
    gen_samples->add_option("--seed", gs_seed, "pool seed")->required();
    gen_samples->add_option("--steiner-min", gs_steiner_min,
                            "smallest terminal set");
    gen_samples->add_option("--steiner-max", gs_steiner_max,
                            "largest terminal set");
    gen_samples->add_option("-o,--output", gs_output, "output path")->required();
    gen_samples->callback([&] {
        GraphDistribution truth = io::load_distribution(gs_truth);
        SamplePool pool =
            generate_pool(parse_task(gs_task), truth, gs_n, gs_seed,
                          {gs_steiner_min, gs_steiner_max});
        io::save_pool(gs_output, pool);
    });

    // train
    auto* train = app.add_subcommand("train", "Train a model from a sample pool");
    std::string tr_method, tr_source, tr_target, tr_samples, tr_topology,
        tr_log, tr_output;
    int tr_train_size = 0, tr_K = kDefaultK, tr_iterations = kDefaultT,
        tr_max_rounds = kDefaultMaxRounds;
    double tr_C = kDefaultC, tr_epsilon = kDefaultEpsilon;
    std::uint64_t tr_seed = 0;
    train->add_option("--method", tr_method, "p, d, pd, or pd-")
        ->required()
        ->check(method_values);
    train->add_option("--source", tr_source, "task the samples were solved for")
        ->required()
        ->check(task_values);
    train->add_option("--target", tr_target, "task the model will be queried on")
        ->check(task_values);
    train->add_option("--samples", tr_samples, "sample pool path")->required();
    train->add_option("--topology", tr_topology, "topology path")->required();
    train->add_option("--train-size", tr_train_size,
                      "train on the first N samples (0 = all)");
    train->add_option("--K", tr_K, "mixture size");
    train->add_option("--iterations", tr_iterations, "outer rounds (d, pd, pd-)");
    train->add_option("--C", tr_C, "slack penalty");
    train->add_option("--epsilon", tr_epsilon, "cutting-plane tolerance");
    train->add_option("--max-rounds", tr_max_rounds,
                      "cutting-plane round limit");
    train->add_option("--seed", tr_seed, "mixture sampling seed");
    train->add_option("--log", tr_log, "training log path (JSON lines)");
    train->add_option("-o,--output", tr_output, "model output path")->required();
    train->callback([&] {
        TopologyPtr topo = io::load_topology(tr_topology);
        SamplePool pool = io::load_pool(tr_samples);
        TrainConfig cfg;
        cfg.method = *parse_method(tr_method);
        cfg.source = parse_task(tr_source);
        cfg.target = tr_target.empty()
                         ? (cfg.source == Task::Path ? Task::Steiner : Task::Path)
                         : parse_task(tr_target);
        cfg.train_size = tr_train_size;
        cfg.K = tr_K;
        cfg.T = tr_iterations;
        cfg.C = tr_C;
        cfg.epsilon = tr_epsilon;
        cfg.max_rounds = tr_max_rounds;
        cfg.seed = tr_seed;
        TrainOutput out = train_model(pool, topo, cfg);
        io::save_model(tr_output, out.model);
        if (!tr_log.empty()) {
            io::save_train_log(tr_log, out.segments, out.qrts_p_weights);
        }
    });

    // eval
    auto* eval = app.add_subcommand(
        "eval", "Evaluate a model on a test pool against the true mean graph");
    std::string ev_model, ev_truth, ev_test, ev_output;
    int ev_test_size = 0;
    std::vector<std::string> ev_baselines;
    std::uint64_t ev_seed = 0;
    eval->add_option("--model", ev_model, "model path")->required();
    eval->add_option("--truth", ev_truth, "truth distribution path")->required();
    eval->add_option("--test", ev_test, "test pool path")->required();
    eval->add_option("--test-size", ev_test_size,
                     "evaluate on the last N samples (0 = all)");
    eval->add_option("--baselines", ev_baselines, "comma list of unit, rand")
        ->delimiter(',')
        ->check(CLI::IsMember({"unit", "rand"}));
    auto* ev_seed_opt =
        eval->add_option("--seed", ev_seed, "seed for the rand baseline");
    eval->add_option("-o,--output", ev_output, "report output path")->required();
    eval->callback([&] {
        bool wants_rand =
            std::find(ev_baselines.begin(), ev_baselines.end(), "rand") !=
            ev_baselines.end();
        if (wants_rand && ev_seed_opt->count() == 0) {
            throw CLI::ValidationError("--seed",
                                       "required for the rand baseline");
        }
        GraphDistribution truth = io::load_distribution(ev_truth);
        Model model = io::load_model(ev_model, truth.topology);
        SamplePool pool = io::load_pool(ev_test);
        SamplePool test = ev_test_size > 0 ? pool_tail(pool, ev_test_size) : pool;
        EvalReport report = evaluate(model, test, truth, test.task);
        for (const std::string& name : ev_baselines) {
            EdgeWeightModel bl =
                name == "unit"
                    ? baseline(BaselineKind::Unit, *truth.topology)
                    : baseline(BaselineKind::Rand, *truth.topology, ev_seed);
            report.baselines[name] =
                evaluate(Model{bl}, test, truth, test.task).ratio;
        }
        report.config = json{{"model", ev_model},
                             {"truth", ev_truth},
                             {"test", ev_test},
                             {"test_size", test.samples.size()},
                             {"baselines", ev_baselines}};
        if (ev_seed_opt->count() > 0) report.config["seed"] = ev_seed;
        io::save_report(ev_output, report);
    });

    // baseline
    auto* baseline_cmd = app.add_subcommand(
        "baseline", "Write a unit or rand baseline model for a topology");
    std::string bl_kind, bl_topology, bl_output;
    std::uint64_t bl_seed = 0;
    baseline_cmd->add_option("--kind", bl_kind, "unit or rand")
        ->required()
        ->check(CLI::IsMember({"unit", "rand"}));
    baseline_cmd->add_option("--topology", bl_topology, "topology path")
        ->required();
    auto* bl_seed_opt =
        baseline_cmd->add_option("--seed", bl_seed, "seed for rand weights");
    baseline_cmd->add_option("-o,--output", bl_output, "model output path")
        ->required();
    baseline_cmd->callback([&] {
        if (bl_kind == "rand" && bl_seed_opt->count() == 0) {
            throw CLI::ValidationError("--seed", "required for kind rand");
        }
        TopologyPtr topo = io::load_topology(bl_topology);
        BaselineKind kind =
            bl_kind == "unit" ? BaselineKind::Unit : BaselineKind::Rand;
        io::save_model(bl_output, Model{baseline(kind, *topo, bl_seed)});
    });

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "Train and evaluate across several run seeds on one topology");
    std::string sw_preset, sw_topology, sw_method = "p", sw_source = "path",
                sw_target = "steiner", sw_output;
    int sw_train_size = 240, sw_K = kDefaultK, sw_iterations = kDefaultT,
        sw_max_rounds = kDefaultMaxRounds, sw_seeds = 5, sw_test_size = 1000,
        sw_steiner_min = 3, sw_steiner_max = 6;
    double sw_C = kDefaultC, sw_epsilon = kDefaultEpsilon;
    std::uint64_t sw_seed = 0, sw_topo_seed = 0;
    bool sw_with_baselines = false, sw_with_pre = false;
    auto* sw_topo_opt =
        sweep->add_option("--topology", sw_topology, "topology path");
    sweep->add_option("--preset", sw_preset, "named preset to generate")
        ->excludes(sw_topo_opt);
    sweep->add_option("--topo-seed", sw_topo_seed, "preset generation seed");
    sweep->add_option("--method", sw_method, "p, d, pd, or pd-")
        ->check(method_values);
    sweep->add_option("--source", sw_source, "training task")->check(task_values);
    sweep->add_option("--target", sw_target, "evaluation task")
        ->check(task_values);
    sweep->add_option("--train-size", sw_train_size, "training pool size");
    sweep->add_option("--K", sw_K, "mixture size");
    sweep->add_option("--iterations", sw_iterations, "outer rounds");
    sweep->add_option("--C", sw_C, "slack penalty");
    sweep->add_option("--epsilon", sw_epsilon, "cutting-plane tolerance");
    sweep->add_option("--max-rounds", sw_max_rounds, "cutting-plane round limit");
    sweep->add_option("--seeds", sw_seeds, "number of run seeds");
    sweep->add_option("--seed", sw_seed, "base seed for the run streams");
    sweep->add_option("--test-size", sw_test_size, "test pool size per seed");
    sweep->add_option("--steiner-min", sw_steiner_min, "smallest terminal set");
    sweep->add_option("--steiner-max", sw_steiner_max, "largest terminal set");
    sweep->add_flag("--with-baselines", sw_with_baselines,
                    "also evaluate unit and rand baselines");
    sweep->add_flag("--with-pre", sw_with_pre,
                    "also evaluate the untrained round-0 model");
    sweep->add_option("-o,--output", sw_output, "summary output path")
        ->required();
    sweep->callback([&] {
        TopologyPtr topo;
        json config;
        if (!sw_preset.empty()) {
            std::optional<Preset> preset = find_preset(sw_preset);
            if (!preset) {
                throw CLI::ValidationError("--preset",
                                           "unknown preset \"" + sw_preset + "\"");
            }
            topo = std::make_shared<const GraphTopology>(
                gen_topology(preset->family, preset->params, sw_topo_seed));
            config["preset"] = sw_preset;
            config["topo_seed"] = sw_topo_seed;
        } else if (!sw_topology.empty()) {
            topo = io::load_topology(sw_topology);
            config["topology"] = sw_topology;
        } else {
            throw CLI::RequiredError("either --topology or --preset");
        }
        SweepConfig cfg;
        cfg.train.method = *parse_method(sw_method);
        cfg.train.source = parse_task(sw_source);
        cfg.train.target = parse_task(sw_target);
        cfg.train.train_size = sw_train_size;
        cfg.train.K = sw_K;
        cfg.train.T = sw_iterations;
        cfg.train.C = sw_C;
        cfg.train.epsilon = sw_epsilon;
        cfg.train.max_rounds = sw_max_rounds;
        cfg.test_size = sw_test_size;
        cfg.n_seeds = sw_seeds;
        cfg.base_seed = sw_seed;
        cfg.steiner_range = {sw_steiner_min, sw_steiner_max};
        cfg.with_baselines = sw_with_baselines;
        cfg.with_pre = sw_with_pre;
        SweepResult result = run_sweep(topo, cfg);
        config["method"] = sw_method;
        config["source"] = sw_source;
        config["target"] = sw_target;
        config["train_size"] = sw_train_size;
        config["K"] = sw_K;
        config["iterations"] = sw_iterations;
        config["C"] = sw_C;
        config["epsilon"] = sw_epsilon;
        config["max_rounds"] = sw_max_rounds;
        config["seeds"] = sw_seeds;
        config["base_seed"] = sw_seed;
        config["test_size"] = sw_test_size;
        config["steiner_min"] = sw_steiner_min;
        config["steiner_max"] = sw_steiner_max;
        config["with_baselines"] = sw_with_baselines;
        config["with_pre"] = sw_with_pre;
        io::write_file(sw_output,
                       io::sweep_to_json(result, config).dump(2) + "\n");
    });

    // export-dot
    auto* export_dot_cmd = app.add_subcommand(
        "export-dot", "Render a topology with highlighted decisions as DOT");
    std::string xd_topology, xd_output;
    std::vector<std::string> xd_decisions;
    export_dot_cmd->add_option("--topology", xd_topology, "topology path")
        ->required();
    export_dot_cmd->add_option("--decision", xd_decisions,
                               "label:id,id,... (repeatable)");
    export_dot_cmd->add_option("-o,--output", xd_output, "DOT output path")
        ->required();
    export_dot_cmd->callback([&] {
        TopologyPtr topo = io::load_topology(xd_topology);
        std::vector<std::pair<std::string, Decision>> decisions;
        for (const std::string& entry : xd_decisions) {
            std::size_t colon = entry.find(':');
            if (colon == std::string::npos) {
                throw CLI::ValidationError("--decision",
                                           "expected label:id,id,...");
            }
            decisions.emplace_back(entry.substr(0, colon),
                                   Decision(parse_id_list(entry.substr(colon + 1))));
        }
        io::write_file(xd_output, export_dot(*topo, decisions));
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace qrts::cli
