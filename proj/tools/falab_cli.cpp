// falab command line: synthetic benchmark generation, single attacks,
// training, evaluation, experiment sweeps and chart emission.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "falab/attack.hpp"
#include "falab/chart.hpp"
#include "falab/metrics.hpp"
#include "falab/dataio.hpp"
#include "falab/gcn.hpp"
#include "falab/seeds.hpp"
#include "falab/sweep.hpp"
#include "falab/synth.hpp"

namespace fs = std::filesystem;
using namespace falab;

namespace {

struct SweepFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    int workers = -1;
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config file")->required();
    cmd->add_option("--seed", flags.seed, "override the master seed")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--out", flags.out_dir, "override the output directory");
    cmd->add_option("--workers", flags.workers, "override the worker count");
}

ExperimentConfig resolve_config(const SweepFlags& flags) {
    ExperimentConfig cfg = load_experiment_config(flags.config_path);
    if (flags.seed_set) cfg.master_seed = flags.seed;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.workers >= 0) cfg.workers = flags.workers;
    return cfg;
}

void write_outputs(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
    const auto aggregates = aggregate(rows);
    save_aggregates_csv(cfg.out_dir + "/aggregates.csv", aggregates);
    std::cout << "wrote " << rows.size() << " rows to " << cfg.out_dir << "/results.csv and "
              << aggregates.size() << " aggregate rows\n";
}

int run_synth(const std::string& preset_text, std::uint64_t seed, const std::string& out_dir,
              int labeled_count, double variance) {
    const SynthPreset preset = parse_preset(preset_text);
    SynthOptions options;
    options.labeled_count = labeled_count;
    options.variance = variance;
    const SyntheticGraph sg = make_synthetic(preset, seed, options);

    fs::create_directories(out_dir);
    save_graph(sg.graph, out_dir + "/edges.txt", out_dir + "/nodes.csv");

    Splits splits;
    splits.train = sg.labeled.nodes;
    std::vector<char> in_train(sg.graph.node_count(), 0);
    for (int u : splits.train) in_train[u] = 1;
    for (int u = 0; u < sg.graph.node_count(); ++u)
        if (!in_train[u]) splits.test.push_back(u);
    save_splits(out_dir + "/splits.csv", splits);

    const auto density = preset_density(preset);
    nlohmann::json meta{{"preset", preset_name(preset)},
                        {"seed", seed},
                        {"nodes", sg.graph.node_count()},
                        {"edges", sg.graph.edge_count()},
                        {"labeled_count", labeled_count},
                        {"feature_variance", variance},
                        {"density",
                         {{"intra_label", density[0][0]}, {"inter_label", density[0][2]}}}};
    std::ofstream(out_dir + "/meta.json") << meta.dump(2) << "\n";

    std::cout << "wrote " << sg.graph.node_count() << " nodes, " << sg.graph.edge_count()
              << " edges to " << out_dir << "\n";
    return 0;
}

int run_attack(const std::string& edges, const std::string& nodes, const std::string& strategy,
               const std::string& anchor, double delta, std::uint64_t seed,
               const std::string& out_dir, const std::string& labeled_path) {
    const AttributedGraph g = load_graph(edges, nodes);
    const Strategy strat = parse_strategy(strategy);

    std::vector<int> attacker_labeled;
    if (!labeled_path.empty()) attacker_labeled = load_splits(labeled_path).train;

    AttackResult result = [&] {
        if (strat == Strategy::Random) return random_attack(g, delta, seed);
        std::vector<int> known = attacker_labeled;
        if (known.empty()) {
            for (int u = 0; u < g.node_count(); ++u)
                if (g.labels()[u] != kUnknownLabel) known.push_back(u);
        }
        if (strat == Strategy::DICE) {
            TrainConfig surrogate = surrogate_config();
            surrogate.seed = derive_seed(seed, "surrogate");
            const auto labels = surrogate_complete_labels(g, known, surrogate);
            return dice_attack(g, labels, delta, seed);
        }
        AttackSpec spec;
        spec.strategy = strat;
        spec.anchor = parse_subset(anchor);
        spec.delta = delta;
        spec.seed = seed;
        spec.attacker_labeled = std::move(known);
        return fa_gnn_attack(g, spec);
    }();

    fs::create_directories(out_dir);
    save_graph(result.graph, out_dir + "/edges.txt", out_dir + "/nodes.csv");
    std::vector<ProvenanceRecord> records;
    for (const Edge& e : result.injected)
        records.push_back({ProvenanceRecord::Action::Add, e.u, e.v});
    for (const Edge& e : result.removed)
        records.push_back({ProvenanceRecord::Action::Remove, e.u, e.v});
    save_provenance(out_dir + "/provenance.jsonl", records);

    std::cout << "budget " << result.budget << ": injected " << result.injected.size()
              << ", removed " << result.removed.size();
    if (result.shortfall > 0) std::cout << ", shortfall " << result.shortfall;
    std::cout << "; perturbed graph in " << out_dir << "\n";
    return 0;
}

TrainConfig train_flags_to_config(double lr, int epochs, double dropout, double weight_decay,
                                  int hidden, std::uint64_t seed, const std::string& selection) {
    TrainConfig cfg = empirical_victim_config();
    cfg.learning_rate = lr;
    cfg.epochs = epochs;
    cfg.dropout = dropout;
    cfg.weight_decay = weight_decay;
    cfg.hidden_dim = hidden;
    cfg.seed = seed;
    if (selection == "final") cfg.selection = ModelSelection::FinalEpoch;
    else if (selection == "best-val") cfg.selection = ModelSelection::BestValidation;
    else throw std::invalid_argument("selection must be final or best-val");
    return cfg;
}

int run_train(const std::string& edges, const std::string& nodes, const std::string& splits_path,
              const std::string& out_path, const TrainConfig& cfg_in) {
    const AttributedGraph g = load_graph(edges, nodes);
    const Splits splits = load_splits(splits_path);
    TrainConfig cfg = cfg_in;
    if (splits.val.empty()) cfg.selection = ModelSelection::FinalEpoch;
    const TrainResult result = train_gcn(g, splits.train, splits.val, cfg);
    save_checkpoint(out_path, result.model);
    std::cout << "trained " << cfg.epochs << " epochs, final loss "
              << result.log.back().loss << ", kept epoch " << result.selected_epoch
              << ", checkpoint " << out_path << "\n";
    return 0;
}

int run_eval(const std::string& edges, const std::string& nodes, const std::string& splits_path,
             const std::string& model_path, const std::string& out_path) {
    const AttributedGraph g = load_graph(edges, nodes);
    const Splits splits = load_splits(splits_path);
    if (splits.test.empty()) throw std::runtime_error("splits file has no test rows");
    const GcnModel model = load_checkpoint(model_path);
    const Predictions preds = predict(model, g);
    const Evaluation ev = evaluate(preds.labels, g.labels(), g.sensitive(), splits.test);

    ResultRow row;
    row.dataset = fs::path(nodes).stem().string();
    row.strategy = "eval";
    row.anchor = "-";
    row.spd = ev.report.spd;
    row.eod = ev.report.eod;
    row.eqd = ev.report.eqd;
    row.accuracy = ev.report.accuracy;
    row.fpr_s0 = ev.report.fpr[0];
    row.fnr_s0 = ev.report.fnr[0];
    row.fpr_s1 = ev.report.fpr[1];
    row.fnr_s1 = ev.report.fnr[1];
    row.edge_count = g.edge_count();
    std::vector<int> everyone(g.node_count());
    for (int u = 0; u < g.node_count(); ++u) everyone[u] = u;
    bool fully_labeled = true;
    for (std::int8_t y : g.labels())
        if (y == kUnknownLabel) fully_labeled = false;
    row.homophily_anchor =
        fully_labeled ? label_homophily_ratio_nonisolated(g, g.labels(), everyone) : std::nan("");

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << result_csv_header() << "\n" << result_row_csv(row) << "\n";
    }
    std::cout << "accuracy " << ev.report.accuracy << "  SPD " << ev.report.spd << "  EOD "
              << ev.report.eod << "  EQD " << ev.report.eqd << "\n"
              << "FPR_s0 " << ev.report.fpr[0] << "  FNR_s0 " << ev.report.fnr[0] << "  FPR_s1 "
              << ev.report.fpr[1] << "  FNR_s1 " << ev.report.fnr[1] << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairness attack laboratory for GNN node classifiers"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark graph");
    std::string synth_preset = "homophilic", synth_out = "out/synth";
    std::uint64_t synth_seed = 1;
    int synth_labeled = 20;
    double synth_variance = 0.5;
    synth->add_option("--preset", synth_preset, "homophilic, heterophilic or random");
    synth->add_option("--seed", synth_seed, "generation seed");
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--labeled-count", synth_labeled, "size of the labeled set");
    synth->add_option("--variance", synth_variance, "feature noise variance");

    // attack
    auto* attack = app.add_subcommand("attack", "perturb a graph with one attack");
    std::string atk_edges, atk_nodes, atk_strategy, atk_anchor = "y1s1", atk_out = "out/attack",
                atk_labeled;
    double atk_delta = 0.1;
    std::uint64_t atk_seed = 1;
    attack->add_option("--edges", atk_edges, "clean edge list")->required();
    attack->add_option("--nodes", atk_nodes, "node table")->required();
    attack->add_option("--strategy", atk_strategy, "DD, DE, ED, EE, Random or DICE")->required();
    attack->add_option("--anchor", atk_anchor, "anchor subset for DD/DE/ED/EE");
    attack->add_option("--delta", atk_delta, "perturbation rate")->required();
    attack->add_option("--seed", atk_seed, "attack seed");
    attack->add_option("--out", atk_out, "output directory");
    attack->add_option("--labeled", atk_labeled,
                       "splits file; its train rows become the attacker's labels");

    // train
    auto* train = app.add_subcommand("train", "train a victim model");
    std::string tr_edges, tr_nodes, tr_splits, tr_out = "model.ckpt", tr_selection = "best-val";
    double tr_lr = 0.001, tr_dropout = 0.6, tr_wd = 5e-4;
    int tr_epochs = 500, tr_hidden = 64;
    std::uint64_t tr_seed = 1;
    train->add_option("--edges", tr_edges)->required();
    train->add_option("--nodes", tr_nodes)->required();
    train->add_option("--splits", tr_splits)->required();
    train->add_option("--out", tr_out, "checkpoint path");
    train->add_option("--lr", tr_lr);
    train->add_option("--epochs", tr_epochs);
    train->add_option("--dropout", tr_dropout);
    train->add_option("--weight-decay", tr_wd);
    train->add_option("--hidden", tr_hidden);
    train->add_option("--seed", tr_seed);
    train->add_option("--selection", tr_selection, "final or best-val");

    // eval
    auto* evalc = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
    std::string ev_edges, ev_nodes, ev_splits, ev_model, ev_out;
    evalc->add_option("--edges", ev_edges)->required();
    evalc->add_option("--nodes", ev_nodes)->required();
    evalc->add_option("--splits", ev_splits)->required();
    evalc->add_option("--model", ev_model)->required();
    evalc->add_option("--out", ev_out, "write a one-row results CSV here");

    // sweep / baselines
    auto* sweep = app.add_subcommand("sweep", "run an experiment sweep from a config file");
    SweepFlags sweep_flags;
    add_sweep_flags(sweep, sweep_flags);
    auto* baselines =
        app.add_subcommand("baselines", "compare Random, DICE and DD on shared seeds");
    SweepFlags baseline_flags;
    add_sweep_flags(baselines, baseline_flags);

    // plot
    auto* plot = app.add_subcommand("plot", "render an aggregates CSV as an SVG chart");
    std::string plot_in, plot_metric = "spd", plot_out = "chart.svg", plot_x = "delta",
                plot_title;
    plot->add_option("--in", plot_in, "aggregates CSV")->required();
    plot->add_option("--metric", plot_metric, "metric column to plot");
    plot->add_option("--out", plot_out, "SVG path");
    plot->add_option("--x", plot_x, "delta or labeled_fraction");
    plot->add_option("--title", plot_title);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return run_synth(synth_preset, synth_seed, synth_out, synth_labeled,
                                     synth_variance);
        if (*attack) return run_attack(atk_edges, atk_nodes, atk_strategy, atk_anchor, atk_delta,
                                       atk_seed, atk_out, atk_labeled);
        if (*train)
            return run_train(tr_edges, tr_nodes, tr_splits, tr_out,
                             train_flags_to_config(tr_lr, tr_epochs, tr_dropout, tr_wd, tr_hidden,
                                                   tr_seed, tr_selection));
        if (*evalc) return run_eval(ev_edges, ev_nodes, ev_splits, ev_model, ev_out);
        if (*sweep) {
            const ExperimentConfig cfg = resolve_config(sweep_flags);
            write_outputs(cfg, run_sweep(cfg));
            return 0;
        }
        if (*baselines) {
            const ExperimentConfig cfg = resolve_config(baseline_flags);
            write_outputs(cfg, compare_baselines(cfg));
            return 0;
        }
        if (*plot) {
            ChartOptions options;
            options.x_field = plot_x;
            options.title = plot_title;
            emit_chart(load_aggregates_csv(plot_in), plot_metric, plot_out, options);
            std::cout << "wrote " << plot_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
