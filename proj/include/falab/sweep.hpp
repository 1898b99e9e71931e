#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "falab/attack.hpp"
#include "falab/gcn.hpp"
#include "falab/synth.hpp"

namespace falab {

struct StrategySpec {
    Strategy strategy = Strategy::DD;
    Subset anchor = Subset::y1s1;  // meaningful for DD/DE/ED/EE only
};

std::string strategy_label(const StrategySpec& s);  // "DD:y1s1", "Random", ...
StrategySpec parse_strategy_spec(const std::string& text);

enum class SweepMode { Sweep, Efficiency };

/// One experiment protocol: dataset source, attack grid, run count, victim
/// training setup and output location.
struct ExperimentConfig {
    std::string name;                      // row label; defaulted from the source
    bool synthetic = true;
    SynthPreset preset = SynthPreset::Homophilic;
    SynthOptions synth_options;            // labeled count, variance
    std::string edges_path, nodes_path;    // when synthetic == false

    std::vector<StrategySpec> strategies;
    std::vector<double> deltas;            // sweep-mode grid
    int runs = 100;
    SweepMode mode = SweepMode::Sweep;
    std::vector<double> labeled_fractions; // efficiency-mode grid
    double efficiency_delta = 0.15;

    TrainConfig victim;
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";
    int workers = 0;                       // 0 = number of cores

    void validate() const;
    std::string dataset_label() const;
};

/// Paper-style defaults: delta 0.05..0.30 step 0.025, 100 runs, synthetic
/// victim setup.
ExperimentConfig synthetic_experiment_defaults(SynthPreset preset);

/// Loaded-dataset defaults: delta 0.05..0.30 step 0.05, 5 runs, 50/25/25
/// splits with validation-based model selection.
ExperimentConfig empirical_experiment_defaults(const std::string& edges_path,
                                               const std::string& nodes_path);

/// Flat key=value config file; '#' starts a comment. Unknown keys are
/// rejected.
ExperimentConfig load_experiment_config(const std::string& path);

/// One evaluated run at one grid point. Error rows keep their key fields and
/// carry the failure message in `error`; their metric fields serialize
/// empty.
struct ResultRow {
    std::string dataset;
    std::string strategy;  // "clean" or a strategy name
    std::string anchor;    // subset name or "-"
    double delta = 0.0;
    double labeled_fraction = 0.0;  // share of labels the attacker saw; 0 for clean rows
    std::uint64_t seed = 0;
    double spd = 0.0, eod = 0.0, eqd = 0.0, accuracy = 0.0;
    double fpr_s0 = 0.0, fnr_s0 = 0.0, fpr_s1 = 0.0, fnr_s1 = 0.0;
    long edge_count = 0;
    long injected = 0;
    double homophily_anchor = 0.0;
    double runtime_ms = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
};

std::string result_csv_header();
std::string result_row_csv(const ResultRow& row);

/// Runs the whole grid, appending rows to <out_dir>/results.csv in a fixed
/// order as they complete. A clean (delta = 0) row is produced once per run.
/// Rerunning continues after the last complete row, so an interrupted sweep
/// converges to the same file as an uninterrupted one (runtime_ms excepted).
/// Per-row failures become error rows and are detailed in
/// <out_dir>/errors.log.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg);

/// The baseline comparison protocol: Random, DICE, DD on y1s1 and DD on
/// y1s0 over the same graphs and seeds.
std::vector<ResultRow> compare_baselines(ExperimentConfig cfg);

std::vector<ResultRow> load_results_csv(const std::string& path);

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;  // sample std, 0 when n == 1
};

struct AggregateRow {
    std::string dataset, strategy, anchor;
    double delta = 0.0;
    double labeled_fraction = 0.0;
    long n = 0;       // ok rows
    long errors = 0;  // excluded rows
    Stat spd, abs_spd, eod, eqd, accuracy;
    Stat fpr_s0, fnr_s0, fpr_s1, fnr_s1;
    Stat homophily_anchor;
};

/// Mean and sample standard deviation per group. `keys` picks the grouping
/// fields from {dataset, strategy, anchor, delta, labeled_fraction}; a field
/// left out of the keys shows "*" (or NaN) when its values differ within a
/// group.
std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows,
                                    const std::vector<std::string>& keys = {
                                        "dataset", "strategy", "anchor", "delta",
                                        "labeled_fraction"});

void save_aggregates_csv(const std::string& path, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> load_aggregates_csv(const std::string& path);

}  // namespace falab
