#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <set>
#include <sstream>

#include "falab/chart.hpp"
#include "falab/sweep.hpp"

using namespace falab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("falab_harness_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

ExperimentConfig quick_config(const std::string& out_dir) {
    ExperimentConfig cfg = synthetic_experiment_defaults(SynthPreset::Homophilic);
    cfg.strategies = {parse_strategy_spec("DD:y1s1")};
    cfg.deltas = {0.15};
    cfg.runs = 2;
    cfg.victim.epochs = 25;  // keep unit tests quick
    cfg.master_seed = 11;
    cfg.out_dir = out_dir;
    cfg.workers = 2;
    return cfg;
}

// Everything except the wall-clock column.
std::vector<std::string> stable_fields(const std::string& csv_line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(csv_line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!fields.empty()) fields.pop_back();
    return fields;
}

std::vector<std::vector<std::string>> stable_csv(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) rows.push_back(stable_fields(line));
    return rows;
}

ResultRow metric_row(const std::string& strategy, double delta, double spd_value,
                     bool failed = false) {
    ResultRow row;
    row.dataset = "synthetic:homophilic";
    row.strategy = strategy;
    row.anchor = strategy == "clean" ? "-" : "y1s1";
    row.delta = delta;
    row.spd = spd_value;
    row.accuracy = 0.9;
    row.homophily_anchor = 0.7;
    if (failed) row.error = "boom";
    return row;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("row accounting: one clean row per run plus the attack grid") {
    TempDir dir("rows");
    const ExperimentConfig cfg = quick_config(dir.file("out"));
    const auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 4);  // 2 clean + 2 attacked
    int clean = 0, attacked = 0;
    for (const ResultRow& row : rows) {
        CHECK(row.ok());
        if (row.strategy == "clean") {
            ++clean;
            CHECK(row.delta == 0.0);
        } else {
            ++attacked;
            CHECK(row.strategy == "DD");
            CHECK(row.anchor == "y1s1");
            CHECK(row.delta == 0.15);
            CHECK(row.injected > 0);
        }
    }
    CHECK(clean == 2);
    CHECK(attacked == 2);
}

TEST_CASE("sweeps are deterministic up to the runtime column") {
    TempDir dir("det");
    ExperimentConfig cfg = quick_config(dir.file("a"));
    run_sweep(cfg);
    cfg.out_dir = dir.file("b");
    run_sweep(cfg);
    CHECK(stable_csv(dir.file("a") + "/results.csv") ==
          stable_csv(dir.file("b") + "/results.csv"));
}

TEST_CASE("an interrupted sweep resumes to the same results") {
    TempDir dir("resume");
    ExperimentConfig cfg = quick_config(dir.file("full"));
    run_sweep(cfg);

    // Replay: keep the header and first row only, then resume.
    cfg.out_dir = dir.file("partial");
    run_sweep(cfg);
    const std::string partial_csv = dir.file("partial") + "/results.csv";
    std::vector<std::string> lines;
    {
        std::ifstream in(partial_csv);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    REQUIRE(lines.size() == 5);
    {
        std::ofstream out(partial_csv, std::ios::trunc);
        out << lines[0] << "\n" << lines[1] << "\n";
        out << "synthetic:homophilic,DD,y1s1,0.15,1,torn";  // torn tail must be dropped
    }
    run_sweep(cfg);
    CHECK(stable_csv(partial_csv) == stable_csv(dir.file("full") + "/results.csv"));
}

TEST_CASE("clean rows do not depend on the strategy list") {
    TempDir dir("clean");
    ExperimentConfig a = quick_config(dir.file("a"));
    const auto rows_a = run_sweep(a);
    ExperimentConfig b = quick_config(dir.file("b"));
    b.strategies = {parse_strategy_spec("EE:y1s1")};
    const auto rows_b = run_sweep(b);
    for (std::size_t i = 0; i < rows_a.size(); ++i) {
        if (rows_a[i].strategy != "clean") continue;
        CHECK(rows_b[i].strategy == "clean");
        CHECK(rows_a[i].spd == rows_b[i].spd);
        CHECK(rows_a[i].accuracy == rows_b[i].accuracy);
        CHECK(rows_a[i].seed == rows_b[i].seed);
    }
}

TEST_CASE("efficiency mode completes with surrogate-labeled attacks") {
    TempDir dir("eff");
    ExperimentConfig cfg = quick_config(dir.file("out"));
    cfg.mode = SweepMode::Efficiency;
    cfg.labeled_fractions = {0.5};
    cfg.runs = 1;
    const auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 2);
    for (const ResultRow& row : rows) {
        CHECK(row.ok());
        if (row.strategy == "DD") {
            CHECK(row.labeled_fraction == 0.5);
            CHECK(row.delta == 0.15);
        }
    }
}

TEST_CASE("aggregate reproduces the hand-computed mean and std") {
    std::vector<ResultRow> rows = {metric_row("DD", 0.15, 0.1), metric_row("DD", 0.15, 0.3)};
    const auto agg = aggregate(rows);
    REQUIRE(agg.size() == 1);
    CHECK(agg[0].n == 2);
    CHECK(agg[0].spd.mean == doctest::Approx(0.2));
    CHECK(agg[0].spd.stddev == doctest::Approx(std::sqrt(0.02)));  // 0.14142...
    CHECK(agg[0].abs_spd.mean == doctest::Approx(0.2));
}

TEST_CASE("aggregate flags single-row groups and excludes error rows") {
    std::vector<ResultRow> rows = {metric_row("DD", 0.15, 0.1),
                                   metric_row("DD", 0.15, 0.0, true)};
    const auto agg = aggregate(rows);
    REQUIRE(agg.size() == 1);
    CHECK(agg[0].n == 1);
    CHECK(agg[0].errors == 1);
    CHECK(agg[0].spd.stddev == 0.0);
}

TEST_CASE("grouping by strategy and delta gives 44 plus 1 aggregate rows") {
    std::vector<ResultRow> rows;
    const char* names[] = {"DD", "DE", "ED", "EE"};
    for (int run = 0; run < 3; ++run) {
        rows.push_back(metric_row("clean", 0.0, 0.01));
        for (const char* name : names) {
            for (int k = 0; k < 11; ++k)
                rows.push_back(metric_row(name, 0.05 + 0.025 * k, 0.1));
        }
    }
    const auto agg = aggregate(rows, {"strategy", "delta"});
    CHECK(agg.size() == 45);
    for (const AggregateRow& a : agg) CHECK(a.n == 3);
}

TEST_CASE("results csv round-trips through the parser") {
    TempDir dir("csv");
    std::vector<ResultRow> rows = {metric_row("clean", 0.0, 0.02), metric_row("DD", 0.15, 0.31),
                                   metric_row("DD", 0.3, 0.0, true)};
    const std::string path = dir.file("results.csv");
    {
        std::ofstream out(path);
        out << result_csv_header() << "\n";
        for (const ResultRow& row : rows) out << result_row_csv(row) << "\n";
    }
    const auto loaded = load_results_csv(path);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0].spd == rows[0].spd);
    CHECK(loaded[1].strategy == "DD");
    CHECK(loaded[1].spd == 0.31);
    CHECK_FALSE(loaded[2].ok());
}

TEST_CASE("aggregates csv round-trips") {
    TempDir dir("agg");
    std::vector<ResultRow> rows = {metric_row("DD", 0.15, 0.1), metric_row("DD", 0.15, 0.3)};
    const auto agg = aggregate(rows);
    const std::string path = dir.file("aggregates.csv");
    save_aggregates_csv(path, agg);
    const auto loaded = load_aggregates_csv(path);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].spd.mean == doctest::Approx(agg[0].spd.mean));
    CHECK(loaded[0].n == 2);
}

TEST_CASE("config files parse with defaults and reject unknown keys") {
    TempDir dir("cfg");
    const std::string path = dir.file("exp.cfg");
    {
        std::ofstream out(path);
        out << "# example\n"
               "dataset = synthetic\n"
               "preset = heterophilic\n"
               "strategies = DD:y1s1, EE:y1s1\n"
               "deltas = 0.05:0.15:0.05\n"
               "runs = 7\n"
               "victim_epochs = 123\n"
               "seed = 99\n"
               "out = somewhere\n";
    }
    const ExperimentConfig cfg = load_experiment_config(path);
    CHECK(cfg.preset == SynthPreset::Heterophilic);
    CHECK(cfg.strategies.size() == 2);
    CHECK(cfg.deltas == std::vector<double>{0.05, 0.1, 0.15});
    CHECK(cfg.runs == 7);
    CHECK(cfg.victim.epochs == 123);
    CHECK(cfg.victim.learning_rate == 0.01);  // synthetic default
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.out_dir == "somewhere");

    {
        std::ofstream out(path, std::ios::app);
        out << "mystery = 1\n";
    }
    CHECK_THROWS_WITH_AS(load_experiment_config(path), doctest::Contains("mystery"),
                         std::runtime_error);
}

TEST_CASE("strategy specs parse and validate anchors") {
    CHECK(strategy_label(parse_strategy_spec("DD:y0s1")) == "DD:y0s1");
    CHECK(strategy_label(parse_strategy_spec("Random")) == "Random");
    CHECK_THROWS_AS(parse_strategy_spec("DD"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy_spec("Random:y1s1"), std::invalid_argument);
}

TEST_CASE("baseline comparison covers exactly four methods on shared seeds") {
    TempDir dir("base");
    ExperimentConfig cfg = quick_config(dir.file("out"));
    cfg.runs = 1;
    const auto rows = compare_baselines(cfg);
    REQUIRE(rows.size() == 5);  // clean + 4 methods
    std::set<std::string> labels;
    for (const ResultRow& row : rows) {
        if (row.strategy != "clean") labels.insert(row.strategy + "/" + row.anchor);
    }
    CHECK(labels == std::set<std::string>{"Random/-", "DICE/-", "DD/y1s1", "DD/y1s0"});
}

TEST_CASE("charts are deterministic and structurally sound") {
    TempDir dir("chart");
    std::vector<ResultRow> rows = {metric_row("DD", 0.1, 0.2), metric_row("DD", 0.1, 0.25),
                                   metric_row("DD", 0.2, 0.3), metric_row("DD", 0.2, 0.32)};
    const auto agg = aggregate(rows);
    const std::string path = dir.file("chart.svg");
    emit_chart(agg, "spd", path);
    std::stringstream buf_a, buf_b;
    buf_a << std::ifstream(path).rdbuf();
    emit_chart(agg, "spd", path);
    buf_b << std::ifstream(path).rdbuf();
    const std::string svg = buf_a.str();
    CHECK(svg == buf_b.str());

    // One series, two vertices, plus the dashed zero line (spd range spans 0
    // only when negative values appear; here it does not, so no zero line).
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        ++pos;
    }
    CHECK(polylines == 1);
    const auto points_at = svg.find("<polyline points=\"");
    REQUIRE(points_at != std::string::npos);
    const auto points_end = svg.find('"', points_at + 18);
    const std::string points = svg.substr(points_at + 18, points_end - points_at - 18);
    CHECK(std::count(points.begin(), points.end(), ' ') == 1);  // two x,y vertices
}

TEST_CASE("a four-strategy chart draws four lines and the zero line") {
    TempDir dir("chart4");
    std::vector<ResultRow> rows;
    for (const char* name : {"DD", "DE", "ED", "EE"}) {
        for (double delta : {0.05, 0.15, 0.3}) {
            rows.push_back(metric_row(name, delta, name[0] == 'E' ? -0.1 : 0.2));
            rows.push_back(metric_row(name, delta, name[0] == 'E' ? -0.15 : 0.25));
        }
    }
    const std::string path = dir.file("chart.svg");
    emit_chart(aggregate(rows), "spd", path);
    std::stringstream buf;
    buf << std::ifstream(path).rdbuf();
    const std::string svg = buf.str();
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        ++pos;
    }
    CHECK(polylines == 4);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);  // zero reference line
}

TEST_CASE("chart errors are informative") {
    std::vector<AggregateRow> empty;
    CHECK_THROWS_AS(emit_chart(empty, "spd", "unused.svg"), std::invalid_argument);
    std::vector<ResultRow> rows = {metric_row("DD", 0.1, 0.2)};
    CHECK_THROWS_WITH_AS(emit_chart(aggregate(rows), "sdp", "unused.svg"),
                         doctest::Contains("valid metrics"), std::invalid_argument);
}

}  // TEST_SUITE
