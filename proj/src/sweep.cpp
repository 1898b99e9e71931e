#include "falab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "falab/dataio.hpp"
#include "falab/metrics.hpp"
#include "falab/seeds.hpp"

namespace falab {

namespace {

constexpr const char* kCleanStrategy = "clean";
constexpr const char* kNoAnchor = "-";

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string format_double(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

long code_of(double v) { return std::lround(v * 1e6); }

/// "lo:hi:step" range, comma list, or single value.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        double lo, hi, step;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0)
            throw std::invalid_argument("bad grid '" + text + "', expected lo:hi:step");
        for (int k = 0;; ++k) {
            const double v = lo + k * step;
            if (v > hi + step * 1e-9) break;
            values.push_back(v);
        }
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) values.push_back(std::stod(item));
        }
    }
    if (values.empty()) throw std::invalid_argument("empty grid '" + text + "'");
    return values;
}

}  // namespace

std::string strategy_label(const StrategySpec& s) {
    if (!needs_anchor(s.strategy)) return strategy_name(s.strategy);
    return strategy_name(s.strategy) + ":" + subset_name(s.anchor);
}

StrategySpec parse_strategy_spec(const std::string& text) {
    StrategySpec spec;
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        spec.strategy = parse_strategy(text);
        if (needs_anchor(spec.strategy))
            throw std::invalid_argument("strategy " + text + " needs an anchor, e.g. " + text +
                                        ":y1s1");
        return spec;
    }
    spec.strategy = parse_strategy(text.substr(0, colon));
    if (!needs_anchor(spec.strategy))
        throw std::invalid_argument("strategy " + text.substr(0, colon) + " takes no anchor");
    spec.anchor = parse_subset(text.substr(colon + 1));
    return spec;
}

void ExperimentConfig::validate() const {
    if (strategies.empty()) throw std::invalid_argument("config lists no strategies");
    if (runs < 1) throw std::invalid_argument("run count must be >= 1");
    if (mode == SweepMode::Sweep) {
        if (deltas.empty()) throw std::invalid_argument("config lists no perturbation rates");
        for (double d : deltas) {
            if (d <= 0.0 || d > 1.0)
                throw std::invalid_argument("perturbation rates must lie in (0, 1]");
        }
    } else {
        if (labeled_fractions.empty())
            throw std::invalid_argument("efficiency mode needs labeled fractions");
        for (double f : labeled_fractions) {
            if (f <= 0.0 || f > 1.0)
                throw std::invalid_argument("labeled fractions must lie in (0, 1]");
        }
        if (efficiency_delta <= 0.0 || efficiency_delta > 1.0)
            throw std::invalid_argument("efficiency delta must lie in (0, 1]");
    }
    if (!synthetic && (edges_path.empty() || nodes_path.empty()))
        throw std::invalid_argument("file-backed config needs edges and nodes paths");
    victim.validate();
}

std::string ExperimentConfig::dataset_label() const {
    if (!name.empty()) return name;
    if (synthetic) return "synthetic:" + preset_name(preset);
    return "files:" + std::filesystem::path(nodes_path).stem().string();
}

ExperimentConfig synthetic_experiment_defaults(SynthPreset preset) {
    ExperimentConfig cfg;
    cfg.synthetic = true;
    cfg.preset = preset;
    cfg.deltas = parse_grid("0.05:0.30:0.025");
    cfg.runs = 100;
    cfg.labeled_fractions = parse_grid("0.10:0.50:0.10");
    cfg.victim = synthetic_victim_config();
    return cfg;
}

ExperimentConfig empirical_experiment_defaults(const std::string& edges_path,
                                               const std::string& nodes_path) {
    ExperimentConfig cfg;
    cfg.synthetic = false;
    cfg.edges_path = edges_path;
    cfg.nodes_path = nodes_path;
    cfg.deltas = parse_grid("0.05:0.30:0.05");
    cfg.runs = 5;
    cfg.labeled_fractions = parse_grid("0.10:0.50:0.10");
    cfg.victim = empirical_victim_config();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!kv.emplace(key, trim(line.substr(eq + 1))).second)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": duplicate key '" +
                                     key + "'");
    }

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string value = it->second;
        kv.erase(it);
        return value;
    };

    const std::string kind = take("dataset").value_or("synthetic");
    ExperimentConfig cfg;
    if (kind == "synthetic") {
        cfg = synthetic_experiment_defaults(parse_preset(take("preset").value_or("homophilic")));
    } else if (kind == "files") {
        const auto edges = take("edges"), nodes = take("nodes");
        if (!edges || !nodes)
            throw std::runtime_error(path + ": dataset = files needs edges and nodes keys");
        cfg = empirical_experiment_defaults(*edges, *nodes);
    } else {
        throw std::runtime_error(path + ": dataset must be synthetic or files");
    }

    if (auto v = take("name")) {
        cfg.name = *v;
        std::replace(cfg.name.begin(), cfg.name.end(), ',', '_');
    }
    if (auto v = take("strategies")) {
        cfg.strategies.clear();
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.strategies.push_back(parse_strategy_spec(item));
        }
    }
    if (auto v = take("deltas")) cfg.deltas = parse_grid(*v);
    if (auto v = take("runs")) cfg.runs = std::stoi(*v);
    if (auto v = take("mode")) {
        if (*v == "sweep") cfg.mode = SweepMode::Sweep;
        else if (*v == "efficiency") cfg.mode = SweepMode::Efficiency;
        else throw std::runtime_error(path + ": mode must be sweep or efficiency");
    }
    if (auto v = take("labeled_fractions")) cfg.labeled_fractions = parse_grid(*v);
    if (auto v = take("efficiency_delta")) cfg.efficiency_delta = std::stod(*v);
    if (auto v = take("victim_lr")) cfg.victim.learning_rate = std::stod(*v);
    if (auto v = take("victim_epochs")) cfg.victim.epochs = std::stoi(*v);
    if (auto v = take("victim_dropout")) cfg.victim.dropout = std::stod(*v);
    if (auto v = take("victim_weight_decay")) cfg.victim.weight_decay = std::stod(*v);
    if (auto v = take("victim_hidden")) cfg.victim.hidden_dim = std::stoi(*v);
    if (auto v = take("victim_train_fraction")) cfg.victim.train_fraction = std::stod(*v);
    if (auto v = take("victim_val_fraction")) cfg.victim.val_fraction = std::stod(*v);
    if (auto v = take("victim_test_fraction")) cfg.victim.test_fraction = std::stod(*v);
    if (auto v = take("labeled_count")) cfg.synth_options.labeled_count = std::stoi(*v);
    if (auto v = take("feature_variance")) cfg.synth_options.variance = std::stod(*v);
    if (auto v = take("seed")) cfg.master_seed = std::stoull(*v);
    if (auto v = take("out")) cfg.out_dir = *v;
    if (auto v = take("workers")) cfg.workers = std::stoi(*v);

    if (!kv.empty()) throw std::runtime_error(path + ": unknown key '" + kv.begin()->first + "'");
    cfg.validate();
    return cfg;
}

std::string result_csv_header() {
    return "dataset,strategy,anchor,delta,labeled_fraction,seed,spd,eod,eqd,accuracy,"
           "fpr_s0,fnr_s0,fpr_s1,fnr_s1,edges,injected,homophily_anchor,runtime_ms";
}

std::string result_row_csv(const ResultRow& row) {
    std::ostringstream out;
    out << row.dataset << ',' << row.strategy << ',' << row.anchor << ','
        << format_double(row.delta, "%.6g") << ',' << format_double(row.labeled_fraction, "%.6g")
        << ',' << row.seed << ',';
    if (row.ok()) {
        out << format_double(row.spd, "%.17g") << ',' << format_double(row.eod, "%.17g") << ','
            << format_double(row.eqd, "%.17g") << ',' << format_double(row.accuracy, "%.17g")
            << ',' << format_double(row.fpr_s0, "%.17g") << ','
            << format_double(row.fnr_s0, "%.17g") << ',' << format_double(row.fpr_s1, "%.17g")
            << ',' << format_double(row.fnr_s1, "%.17g") << ',' << row.edge_count << ','
            << row.injected << ',' << format_double(row.homophily_anchor, "%.17g");
    } else {
        out << ",,,,,,,,,,";  // error rows leave the measured fields empty
    }
    out << ',' << format_double(row.runtime_ms, "%.3f");
    return out.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::optional<ResultRow> parse_result_row(const std::string& line) {
    const auto f = split_fields(line);
    if (f.size() != 18) return std::nullopt;
    try {
        ResultRow row;
        row.dataset = f[0];
        row.strategy = f[1];
        row.anchor = f[2];
        row.delta = std::stod(f[3]);
        row.labeled_fraction = std::stod(f[4]);
        row.seed = std::stoull(f[5]);
        if (f[6].empty()) {
            row.error = "recorded failure (see errors.log)";
        } else {
            row.spd = std::stod(f[6]);
            row.eod = std::stod(f[7]);
            row.eqd = std::stod(f[8]);
            row.accuracy = std::stod(f[9]);
            row.fpr_s0 = std::stod(f[10]);
            row.fnr_s0 = std::stod(f[11]);
            row.fpr_s1 = std::stod(f[12]);
            row.fnr_s1 = std::stod(f[13]);
            row.edge_count = std::stol(f[14]);
            row.injected = std::stol(f[15]);
            row.homophily_anchor = std::stod(f[16]);
        }
        row.runtime_ms = std::stod(f[17]);
        return row;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

struct Task {
    int run = 0;
    int strategy_index = -1;  // -1 = clean baseline
    double delta = 0.0;
    double labeled_fraction = 0.0;  // efficiency grid value, 0 otherwise
};

std::vector<Task> plan_tasks(const ExperimentConfig& cfg) {
    std::vector<Task> tasks;
    for (int run = 0; run < cfg.runs; ++run) {
        tasks.push_back({run, -1, 0.0, 0.0});
        for (int s = 0; s < static_cast<int>(cfg.strategies.size()); ++s) {
            if (cfg.mode == SweepMode::Sweep) {
                for (double d : cfg.deltas) tasks.push_back({run, s, d, 0.0});
            } else {
                for (double f : cfg.labeled_fractions)
                    tasks.push_back({run, s, cfg.efficiency_delta, f});
            }
        }
    }
    return tasks;
}

/// Shared label completions: strategies at one (run, fraction) reuse the
/// same surrogate output.
class SurrogateCache {
public:
    const std::vector<std::int8_t>& get(long key,
                                        const std::function<std::vector<std::int8_t>()>& compute) {
        std::shared_ptr<Entry> entry;
        {
            std::lock_guard lock(mutex_);
            auto& slot = entries_[key];
            if (!slot) slot = std::make_shared<Entry>();
            entry = slot;
        }
        std::call_once(entry->once, [&] { entry->labels = compute(); });
        return entry->labels;
    }

private:
    struct Entry {
        std::once_flag once;
        std::vector<std::int8_t> labels;
    };
    std::mutex mutex_;
    std::unordered_map<long, std::shared_ptr<Entry>> entries_;
};

struct RunContext {
    const AttributedGraph* graph = nullptr;
    NormalizedAdjacency adj;
    std::vector<int> train_nodes, val_nodes, eval_nodes;
    std::vector<int> attacker_pool;  // nodes the attacker may learn labels of
};

std::vector<int> complement_of(int n, std::span<const int> sorted_subset) {
    std::vector<int> out;
    out.reserve(n - sorted_subset.size());
    std::size_t i = 0;
    for (int u = 0; u < n; ++u) {
        if (i < sorted_subset.size() && sorted_subset[i] == u) {
            ++i;
        } else {
            out.push_back(u);
        }
    }
    return out;
}

std::vector<int> sample_attacker_labels(std::span<const int> pool,
                                        std::span<const std::int8_t> labels, double fraction,
                                        std::uint64_t seed) {
    const long want = std::max(2L, static_cast<long>(std::floor(fraction * pool.size())));
    std::vector<int> nodes(pool.begin(), pool.end());
    std::mt19937_64 rng(seed);
    while (true) {
        for (long i = 0; i < want; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, nodes.size() - 1);
            std::swap(nodes[i], nodes[pick(rng)]);
        }
        bool has0 = false, has1 = false;
        for (long i = 0; i < want; ++i) (labels[nodes[i]] == 0 ? has0 : has1) = true;
        if (has0 && has1) break;
    }
    std::vector<int> chosen(nodes.begin(), nodes.begin() + want);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

class SweepRunner {
public:
    SweepRunner(const ExperimentConfig& cfg) : cfg_(cfg) {
        if (!cfg_.synthetic)
            loaded_ = std::make_shared<AttributedGraph>(load_graph(cfg_.edges_path, cfg_.nodes_path));
    }

    ResultRow compute(const Task& task) {
        ResultRow row;
        row.dataset = cfg_.dataset_label();
        row.seed = derive_seed(cfg_.master_seed, "graph", task.run);
        const auto start = std::chrono::steady_clock::now();
        try {
            fill(task, row);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.runtime_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        return row;
    }

private:
    RunContext make_context(const Task& task, std::optional<SyntheticGraph>& storage) {
        RunContext ctx;
        if (cfg_.synthetic) {
            storage.emplace(make_synthetic(cfg_.preset,
                                           derive_seed(cfg_.master_seed, "graph", task.run),
                                           cfg_.synth_options));
            ctx.graph = &storage->graph;
            ctx.train_nodes = storage->labeled.nodes;
            ctx.eval_nodes = complement_of(ctx.graph->node_count(), ctx.train_nodes);
            ctx.attacker_pool.resize(ctx.graph->node_count());
            for (int u = 0; u < ctx.graph->node_count(); ++u) ctx.attacker_pool[u] = u;
        } else {
            ctx.graph = loaded_.get();
            std::vector<int> labeled;
            for (int u = 0; u < ctx.graph->node_count(); ++u) {
                if (ctx.graph->labels()[u] != kUnknownLabel) labeled.push_back(u);
            }
            const Splits splits = make_splits(
                labeled, ctx.graph->labels(), cfg_.victim.train_fraction,
                cfg_.victim.val_fraction, cfg_.victim.test_fraction,
                derive_seed(cfg_.master_seed, "split", task.run));
            ctx.train_nodes = splits.train;
            ctx.val_nodes = splits.val;
            ctx.eval_nodes = splits.test;
            ctx.attacker_pool = std::move(labeled);
        }
        ctx.adj = normalize_adjacency(*ctx.graph);
        return ctx;
    }

    void fill(const Task& task, ResultRow& row) {
        std::optional<SyntheticGraph> storage;
        RunContext ctx = make_context(task, storage);

        TrainConfig victim = cfg_.victim;
        victim.seed = derive_seed(cfg_.master_seed, "victim", task.run);

        if (task.strategy_index < 0) {
            row.strategy = kCleanStrategy;
            row.anchor = kNoAnchor;
            const TrainResult trained =
                train_gcn(*ctx.graph, ctx.adj, ctx.train_nodes, ctx.val_nodes, victim);
            const Predictions preds = predict(trained.model, ctx.adj, ctx.graph->features());
            finish_row(row, *ctx.graph, preds, ctx.eval_nodes, ctx.graph->labels(), nullptr, 0);
            return;
        }

        const StrategySpec& spec = cfg_.strategies[task.strategy_index];
        row.strategy = strategy_name(spec.strategy);
        row.anchor = needs_anchor(spec.strategy) ? subset_name(spec.anchor) : kNoAnchor;
        row.delta = task.delta;

        // Label assignment available to the attacker.
        const std::vector<std::int8_t>* attacker_labels = nullptr;
        if (cfg_.synthetic && cfg_.mode == SweepMode::Sweep) {
            attacker_labels = &ctx.graph->labels();  // fully labeled, no surrogate
            row.labeled_fraction = 1.0;
        } else {
            const double fraction =
                cfg_.mode == SweepMode::Efficiency
                    ? task.labeled_fraction
                    : static_cast<double>(ctx.train_nodes.size()) / ctx.attacker_pool.size();
            const long cache_key =
                static_cast<long>(task.run) * 2000003L + code_of(task.labeled_fraction);
            attacker_labels = &surrogates_.get(cache_key, [&] {
                std::vector<int> known =
                    cfg_.mode == SweepMode::Efficiency
                        ? sample_attacker_labels(
                              ctx.attacker_pool, ctx.graph->labels(), task.labeled_fraction,
                              derive_seed(cfg_.master_seed, "attacker-labels",
                                          code_of(task.labeled_fraction), task.run))
                        : ctx.train_nodes;
                TrainConfig surrogate = surrogate_config();
                surrogate.seed = derive_seed(cfg_.master_seed, "surrogate",
                                             code_of(task.labeled_fraction), task.run);
                return surrogate_complete_labels(*ctx.graph, known, surrogate);
            });
            row.labeled_fraction = fraction;
        }

        const std::uint64_t attack_seed = derive_seed(
            cfg_.master_seed, "attack:" + strategy_label(spec), code_of(task.delta), task.run);
        AttackResult attack = [&] {
            switch (spec.strategy) {
                case Strategy::Random:
                    return random_attack(*ctx.graph, task.delta, attack_seed);
                case Strategy::DICE:
                    return dice_attack(*ctx.graph, *attacker_labels, task.delta, attack_seed);
                default: {
                    AttackSpec aspec;
                    aspec.strategy = spec.strategy;
                    aspec.anchor = spec.anchor;
                    aspec.delta = task.delta;
                    aspec.seed = attack_seed;
                    return fa_gnn_attack(*ctx.graph, aspec, attacker_labels);
                }
            }
        }();

        const NormalizedAdjacency attacked_adj = normalize_adjacency(attack.graph);
        const TrainResult trained =
            train_gcn(attack.graph, attacked_adj, ctx.train_nodes, ctx.val_nodes, victim);
        const Predictions preds = predict(trained.model, attacked_adj, attack.graph.features());
        finish_row(row, attack.graph, preds, ctx.eval_nodes, attack.labels_used,
                   needs_anchor(spec.strategy) ? &spec.anchor : nullptr,
                   static_cast<long>(attack.injected.size()));
    }

    void finish_row(ResultRow& row, const AttributedGraph& g, const Predictions& preds,
                    std::span<const int> eval_nodes, std::span<const std::int8_t> homophily_labels,
                    const Subset* anchor, long injected) {
        const Evaluation ev = evaluate(preds.labels, g.labels(), g.sensitive(), eval_nodes);
        row.spd = ev.report.spd;
        row.eod = ev.report.eod;
        row.eqd = ev.report.eqd;
        row.accuracy = ev.report.accuracy;
        row.fpr_s0 = ev.report.fpr[0];
        row.fnr_s0 = ev.report.fnr[0];
        row.fpr_s1 = ev.report.fpr[1];
        row.fnr_s1 = ev.report.fnr[1];
        row.edge_count = g.edge_count();
        row.injected = injected;

        bool fully_labeled = true;
        for (std::int8_t y : homophily_labels) {
            if (y == kUnknownLabel) {
                fully_labeled = false;
                break;
            }
        }
        if (!fully_labeled) {
            row.homophily_anchor = std::nan("");
        } else if (anchor) {
            const SubsetPartition part = build_partition(homophily_labels, g.sensitive());
            row.homophily_anchor =
                label_homophily_ratio_nonisolated(g, homophily_labels, part.of(*anchor));
        } else {
            std::vector<int> everyone(g.node_count());
            for (int u = 0; u < g.node_count(); ++u) everyone[u] = u;
            row.homophily_anchor =
                label_homophily_ratio_nonisolated(g, homophily_labels, everyone);
        }
    }

    const ExperimentConfig& cfg_;
    std::shared_ptr<AttributedGraph> loaded_;
    SurrogateCache surrogates_;
};

}  // namespace

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const std::string csv_path = cfg.out_dir + "/results.csv";
    const std::string errors_path = cfg.out_dir + "/errors.log";

    // Resume: keep every complete row already on disk, drop a torn tail.
    std::vector<ResultRow> rows;
    std::vector<std::string> kept_lines;
    if (std::filesystem::exists(csv_path)) {
        std::ifstream in(csv_path);
        std::string line;
        if (std::getline(in, line)) {
            if (line != result_csv_header())
                throw std::runtime_error(csv_path + " has a different schema; refusing to append");
            while (std::getline(in, line)) {
                auto row = parse_result_row(line);
                if (!row) break;
                rows.push_back(std::move(*row));
                kept_lines.push_back(line);
            }
        }
    }
    {
        std::ofstream out(csv_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + csv_path);
        out << result_csv_header() << "\n";
        for (const std::string& line : kept_lines) out << line << "\n";
    }

    const std::vector<Task> tasks = plan_tasks(cfg);
    const std::size_t done = rows.size();
    if (done > tasks.size())
        throw std::runtime_error(csv_path + " holds more rows than this config produces");
    if (done == tasks.size()) return rows;

    SweepRunner runner(cfg);
    std::vector<std::optional<ResultRow>> computed(tasks.size());
    std::mutex mutex;
    std::condition_variable done_cv;
    std::atomic<std::size_t> next{done};

    const unsigned worker_count =
        cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                        : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < worker_count; ++w) {
        workers.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                ResultRow row = runner.compute(tasks[i]);
                {
                    std::lock_guard lock(mutex);
                    computed[i] = std::move(row);
                }
                done_cv.notify_all();
            }
        });
    }

    std::ofstream out(csv_path, std::ios::app);
    std::ofstream errlog;
    for (std::size_t i = done; i < tasks.size(); ++i) {
        std::unique_lock lock(mutex);
        done_cv.wait(lock, [&] { return computed[i].has_value(); });
        ResultRow row = std::move(*computed[i]);
        computed[i].reset();
        lock.unlock();
        out << result_row_csv(row) << "\n" << std::flush;
        if (!row.ok()) {
            if (!errlog.is_open()) errlog.open(errors_path, std::ios::app);
            errlog << row.dataset << " " << row.strategy << " " << row.anchor << " delta="
                   << row.delta << " fraction=" << row.labeled_fraction << " seed=" << row.seed
                   << ": " << row.error << "\n";
        }
        rows.push_back(std::move(row));
    }
    for (std::thread& t : workers) t.join();
    return rows;
}

std::vector<ResultRow> compare_baselines(ExperimentConfig cfg) {
    cfg.strategies = {
        StrategySpec{Strategy::Random, Subset::y1s1},
        StrategySpec{Strategy::DICE, Subset::y1s1},
        StrategySpec{Strategy::DD, Subset::y1s1},
        StrategySpec{Strategy::DD, Subset::y1s0},
    };
    return run_sweep(cfg);
}

std::vector<ResultRow> load_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results file " + path);
    std::string line;
    if (!std::getline(in, line) || line != result_csv_header())
        throw std::runtime_error(path + " does not start with the results header");
    std::vector<ResultRow> rows;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto row = parse_result_row(line);
        if (!row)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
        rows.push_back(std::move(*row));
    }
    return rows;
}

namespace {

struct StatAccumulator {
    long n = 0;
    double sum = 0.0, sum_sq = 0.0;

    void add(double v) {
        if (!std::isfinite(v)) return;
        ++n;
        sum += v;
        sum_sq += v * v;
    }
    Stat finish() const {
        Stat s;
        if (n == 0) return s;
        s.mean = sum / n;
        if (n > 1) {
            const double var = (sum_sq - sum * sum / n) / (n - 1);
            s.stddev = std::sqrt(std::max(var, 0.0));
        }
        return s;
    }
};

struct GroupAccumulator {
    ResultRow first;
    bool dataset_uniform = true, strategy_uniform = true, anchor_uniform = true;
    bool delta_uniform = true, fraction_uniform = true;
    long n = 0, errors = 0;
    StatAccumulator spd, abs_spd, eod, eqd, accuracy;
    StatAccumulator fpr_s0, fnr_s0, fpr_s1, fnr_s1, homophily;
};

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows,
                                    const std::vector<std::string>& keys) {
    if (rows.empty()) throw std::invalid_argument("no rows to aggregate");
    bool key_dataset = false, key_strategy = false, key_anchor = false, key_delta = false,
         key_fraction = false;
    for (const std::string& k : keys) {
        if (k == "dataset") key_dataset = true;
        else if (k == "strategy") key_strategy = true;
        else if (k == "anchor") key_anchor = true;
        else if (k == "delta") key_delta = true;
        else if (k == "labeled_fraction") key_fraction = true;
        else throw std::invalid_argument("unknown aggregation key '" + k + "'");
    }

    std::vector<std::string> order;
    std::unordered_map<std::string, GroupAccumulator> groups;
    for (const ResultRow& row : rows) {
        std::string key;
        if (key_dataset) key += row.dataset;
        key += '\x1f';
        if (key_strategy) key += row.strategy;
        key += '\x1f';
        if (key_anchor) key += row.anchor;
        key += '\x1f';
        if (key_delta) key += format_double(row.delta, "%.9g");
        key += '\x1f';
        if (key_fraction) key += format_double(row.labeled_fraction, "%.9g");

        auto [it, inserted] = groups.try_emplace(key);
        GroupAccumulator& g = it->second;
        if (inserted) {
            order.push_back(key);
            g.first = row;
        } else {
            g.dataset_uniform &= g.first.dataset == row.dataset;
            g.strategy_uniform &= g.first.strategy == row.strategy;
            g.anchor_uniform &= g.first.anchor == row.anchor;
            g.delta_uniform &= g.first.delta == row.delta;
            g.fraction_uniform &= g.first.labeled_fraction == row.labeled_fraction;
        }
        if (!row.ok()) {
            ++g.errors;
            continue;
        }
        ++g.n;
        g.spd.add(row.spd);
        g.abs_spd.add(std::abs(row.spd));
        g.eod.add(row.eod);
        g.eqd.add(row.eqd);
        g.accuracy.add(row.accuracy);
        g.fpr_s0.add(row.fpr_s0);
        g.fnr_s0.add(row.fnr_s0);
        g.fpr_s1.add(row.fpr_s1);
        g.fnr_s1.add(row.fnr_s1);
        g.homophily.add(row.homophily_anchor);
    }

    std::vector<AggregateRow> out;
    out.reserve(order.size());
    for (const std::string& key : order) {
        const GroupAccumulator& g = groups.at(key);
        AggregateRow a;
        a.dataset = g.dataset_uniform ? g.first.dataset : "*";
        a.strategy = g.strategy_uniform ? g.first.strategy : "*";
        a.anchor = g.anchor_uniform ? g.first.anchor : "*";
        a.delta = g.delta_uniform ? g.first.delta : std::nan("");
        a.labeled_fraction = g.fraction_uniform ? g.first.labeled_fraction : std::nan("");
        a.n = g.n;
        a.errors = g.errors;
        a.spd = g.spd.finish();
        a.abs_spd = g.abs_spd.finish();
        a.eod = g.eod.finish();
        a.eqd = g.eqd.finish();
        a.accuracy = g.accuracy.finish();
        a.fpr_s0 = g.fpr_s0.finish();
        a.fnr_s0 = g.fnr_s0.finish();
        a.fpr_s1 = g.fpr_s1.finish();
        a.fnr_s1 = g.fnr_s1.finish();
        a.homophily_anchor = g.homophily.finish();
        out.push_back(std::move(a));
    }
    return out;
}

namespace {

constexpr const char* kAggregateHeader =
    "dataset,strategy,anchor,delta,labeled_fraction,n,errors,"
    "spd_mean,spd_std,abs_spd_mean,abs_spd_std,eod_mean,eod_std,eqd_mean,eqd_std,"
    "accuracy_mean,accuracy_std,fpr_s0_mean,fpr_s0_std,fnr_s0_mean,fnr_s0_std,"
    "fpr_s1_mean,fpr_s1_std,fnr_s1_mean,fnr_s1_std,homophily_anchor_mean,homophily_anchor_std";

}  // namespace

void save_aggregates_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << kAggregateHeader << "\n";
    auto stat = [](const Stat& s) {
        return format_double(s.mean, "%.10g") + "," + format_double(s.stddev, "%.10g");
    };
    for (const AggregateRow& a : rows) {
        out << a.dataset << ',' << a.strategy << ',' << a.anchor << ','
            << format_double(a.delta, "%.6g") << ',' << format_double(a.labeled_fraction, "%.6g")
            << ',' << a.n << ',' << a.errors << ',' << stat(a.spd) << ',' << stat(a.abs_spd)
            << ',' << stat(a.eod) << ',' << stat(a.eqd) << ',' << stat(a.accuracy) << ','
            << stat(a.fpr_s0) << ',' << stat(a.fnr_s0) << ',' << stat(a.fpr_s1) << ','
            << stat(a.fnr_s1) << ',' << stat(a.homophily_anchor) << "\n";
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

std::vector<AggregateRow> load_aggregates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open aggregates file " + path);
    std::string line;
    if (!std::getline(in, line) || line != kAggregateHeader)
        throw std::runtime_error(path + " does not start with the aggregates header");
    std::vector<AggregateRow> rows;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 27)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
        AggregateRow a;
        a.dataset = f[0];
        a.strategy = f[1];
        a.anchor = f[2];
        a.delta = std::stod(f[3]);
        a.labeled_fraction = std::stod(f[4]);
        a.n = std::stol(f[5]);
        a.errors = std::stol(f[6]);
        Stat* stats[] = {&a.spd,    &a.abs_spd, &a.eod,    &a.eqd,    &a.accuracy,
                         &a.fpr_s0, &a.fnr_s0,  &a.fpr_s1, &a.fnr_s1, &a.homophily_anchor};
        for (int i = 0; i < 10; ++i) {
            stats[i]->mean = std::stod(f[7 + 2 * i]);
            stats[i]->stddev = std::stod(f[8 + 2 * i]);
        }
        rows.push_back(std::move(a));
    }
    return rows;
}

}  // namespace falab
