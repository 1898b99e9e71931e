// Acceptance suite: one pass/fail line per criterion. Exact and
// property-style checks run first, then the desk-scale statistical
// reproduction sweeps (50 runs each, parallelized across cores).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "falab/attack.hpp"
#include "falab/dataio.hpp"
#include "falab/gcn.hpp"
#include "falab/metrics.hpp"
#include "falab/seeds.hpp"
#include "falab/sweep.hpp"
#include "falab/synth.hpp"

using namespace falab;

namespace {

constexpr std::uint64_t kMasterSeed = 20240801;
constexpr int kRuns = 50;
const std::string kOutRoot = "acceptance_out";

struct Criterion {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};
std::vector<Criterion> g_results;

void record(int id, const std::string& name, bool pass, const std::string& detail) {
    g_results.push_back({id, name, pass, detail});
    std::printf("[%s] criterion %2d  %-34s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... values) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, values...);
    return buf;
}

// ---- statistics over result rows ----------------------------------------

using Selector = std::function<double(const ResultRow&)>;

struct SampleStats {
    double mean = 0.0, se = 0.0;
    long n = 0;
};

SampleStats stats_of(const std::vector<ResultRow>& rows, const std::string& strategy,
                     double delta, const Selector& pick) {
    double sum = 0.0, sum_sq = 0.0;
    long n = 0;
    for (const ResultRow& row : rows) {
        if (!row.ok() || row.strategy != strategy) continue;
        if (strategy != "clean" && std::abs(row.delta - delta) > 1e-9) continue;
        const double v = pick(row);
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    SampleStats s;
    s.n = n;
    if (n == 0) return s;
    s.mean = sum / n;
    if (n > 1) s.se = std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1)) / n);
    return s;
}

double se_diff(const SampleStats& a, const SampleStats& b) {
    return std::sqrt(a.se * a.se + b.se * b.se);
}

// ---- criteria 1..5: exact / property checks ------------------------------

void criterion_1_decomposition() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(404);
    const int n = 200;
    std::vector<int> nodes(n);
    for (int u = 0; u < n; ++u) nodes[u] = u;
    double max_dev = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::int8_t> y(n), s(n), pred(n);
        for (int u = 0; u < n; ++u) {
            y[u] = static_cast<std::int8_t>(rng() % 2);
            s[u] = static_cast<std::int8_t>(rng() % 2);
            pred[u] = static_cast<std::int8_t>(rng() % 2);
        }
        const double direct = spd(pred, s, nodes);
        const double decomposed = spd_decomposed(confusion_by_group(pred, y, s, nodes));
        max_dev = std::max(max_dev, std::abs(direct - decomposed));
    }
    const double elapsed = seconds_since(start);
    record(1, "decomposition identity", max_dev <= 1e-12 && elapsed < 5.0,
           fmt("max deviation %.2e over 1000 draws, %.2fs", max_dev, elapsed));
}

void criterion_2_degenerate_classifiers() {
    std::mt19937_64 rng(405);
    bool pass = true;
    std::string detail = "perfect = label gap, constant = 0, both exact";
    for (int trial = 0; trial < 200 && pass; ++trial) {
        const int n = 8 + static_cast<int>(rng() % 120);
        std::vector<std::int8_t> y(n), s(n), ones(n, 1), zeros(n, 0);
        std::vector<int> nodes(n);
        for (int u = 0; u < n; ++u) {
            nodes[u] = u;
            y[u] = static_cast<std::int8_t>(rng() % 2);
            s[u] = static_cast<std::int8_t>(u % 2);
        }
        const GroupConfusion cm = confusion_by_group(y, y, s, nodes);
        const double expected = static_cast<double>(cm.cell[1][0]) / cm.group_total[0] -
                                static_cast<double>(cm.cell[1][1]) / cm.group_total[1];
        if (spd(y, s, nodes) != expected) {
            pass = false;
            detail = "perfect-classifier SPD differs from the label distribution gap";
        }
        if (spd(ones, s, nodes) != 0.0 || spd(zeros, s, nodes) != 0.0) {
            pass = false;
            detail = "constant classifier has nonzero SPD";
        }
    }
    record(2, "degenerate classifier SPD", pass, detail);
}

void criterion_3_gradient_check() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(406);
    const int n = 12, f = 5, h = 7;
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng() % 3 == 0) edges.push_back({u, v});
        }
    }
    Matrix x(n, f);
    std::normal_distribution<double> noise(0.0, 0.6);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = noise(rng);
    std::vector<std::int8_t> labels(n), sensitive(n, 0);
    for (int u = 0; u < n; ++u) labels[u] = static_cast<std::int8_t>(u % 2);
    const AttributedGraph g(n, edges, x, labels, sensitive);
    const NormalizedAdjacency adj = normalize_adjacency(g);

    GcnModel model;
    model.w1 = Matrix(f, h);
    model.w2 = Matrix(h, 2);
    model.b1.assign(h, 0.0);
    model.b2.assign(2, 0.0);
    std::uniform_real_distribution<double> unit(-0.8, 0.8);
    for (std::size_t i = 0; i < model.w1.size(); ++i) model.w1.data()[i] = unit(rng);
    for (std::size_t i = 0; i < model.w2.size(); ++i) model.w2.data()[i] = unit(rng);
    for (double& b : model.b1) b = unit(rng);
    for (double& b : model.b2) b = unit(rng);

    std::vector<int> labeled = {0, 1, 3, 4, 6, 7, 9, 10};
    const double wd = 5e-4, eps = 1e-5;
    const auto analytic = loss_and_gradients(model, adj, x, labeled, labels, wd);
    auto loss_at = [&] {
        return loss_and_gradients(model, adj, x, labeled, labels, wd).loss;
    };
    double max_rel = 0.0;
    auto probe = [&](double* value, double grad) {
        const double keep = *value;
        *value = keep + eps;
        const double up = loss_at();
        *value = keep - eps;
        const double down = loss_at();
        *value = keep;
        const double numeric = (up - down) / (2.0 * eps);
        max_rel = std::max(max_rel, std::abs(grad - numeric) /
                                        std::max({std::abs(grad), std::abs(numeric), 1e-3}));
    };
    for (std::size_t i = 0; i < model.w1.size(); ++i)
        probe(model.w1.data() + i, analytic.grads.w1.data()[i]);
    for (std::size_t i = 0; i < model.w2.size(); ++i)
        probe(model.w2.data() + i, analytic.grads.w2.data()[i]);
    for (std::size_t i = 0; i < model.b1.size(); ++i)
        probe(model.b1.data() + i, analytic.grads.b1[i]);
    for (std::size_t i = 0; i < model.b2.size(); ++i)
        probe(model.b2.data() + i, analytic.grads.b2[i]);

    const double elapsed = seconds_since(start);
    record(3, "gradient finite differences", max_rel < 1e-5 && elapsed < 10.0,
           fmt("max relative error %.2e, %.2fs", max_rel, elapsed));
}

bool check_fa_contract(const AttributedGraph& g, const AttackResult& r, Subset a, Subset b,
                       std::string& why) {
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : r.injected) {
        if (e.u >= e.v) {
            why = "non-canonical injected pair";
            return false;
        }
        if (!seen.emplace(e.u, e.v).second) {
            why = "duplicate injected pair";
            return false;
        }
        if (g.has_edge(e.u, e.v)) {
            why = "injected pair already existed";
            return false;
        }
        const Subset su = subset_of(r.labels_used[e.u], g.sensitive()[e.u]);
        const Subset sv = subset_of(r.labels_used[e.v], g.sensitive()[e.v]);
        if (std::minmax(su, sv) != std::minmax(a, b)) {
            why = "endpoint outside the resolved subsets";
            return false;
        }
    }
    return true;
}

void criterion_4_attack_contracts() {
    const auto start = std::chrono::steady_clock::now();
    const SyntheticGraph sg = make_synthetic(SynthPreset::Homophilic, 777);
    const AttributedGraph& g = sg.graph;
    bool pass = true;
    std::string why;
    for (const double delta : {0.05, 0.15, 0.30}) {
        const long budget = static_cast<long>(std::floor(delta * g.edge_count()));
        for (const Strategy strategy :
             {Strategy::DD, Strategy::DE, Strategy::ED, Strategy::EE}) {
            AttackSpec spec;
            spec.strategy = strategy;
            spec.anchor = Subset::y1s1;
            spec.delta = delta;
            spec.seed = derive_seed(555, strategy_name(strategy), std::lround(delta * 1000));
            const AttackResult r = fa_gnn_attack(g, spec);
            const AttackResult r2 = fa_gnn_attack(g, spec);
            const auto [a, b] = resolve_subsets(strategy, spec.anchor);
            if (static_cast<long>(r.injected.size()) != budget) {
                pass = false;
                why = fmt("%s budget %ld != %zu", strategy_name(strategy).c_str(), budget,
                          r.injected.size());
            } else if (!check_fa_contract(g, r, a, b, why)) {
                pass = false;
                why = strategy_name(strategy) + ": " + why;
            } else if (r2.injected != r.injected) {
                pass = false;
                why = strategy_name(strategy) + ": rerun differed";
            }
            if (!pass) break;
        }
        if (!pass) break;

        const AttackResult rnd = random_attack(g, delta, 91);
        const AttackResult rnd2 = random_attack(g, delta, 91);
        if (static_cast<long>(rnd.injected.size()) != budget ||
            rnd.injected != rnd2.injected) {
            pass = false;
            why = "Random budget or determinism failed";
            break;
        }
        for (const Edge& e : rnd.injected) {
            if (g.has_edge(e.u, e.v) || e.u >= e.v) {
                pass = false;
                why = "Random injected an existing or non-canonical pair";
                break;
            }
        }

        const AttackResult dice = dice_attack(g, g.labels(), delta, 92);
        const AttackResult dice2 = dice_attack(g, g.labels(), delta, 92);
        if (static_cast<long>(dice.injected.size() + dice.removed.size()) != budget ||
            dice.injected != dice2.injected || dice.removed != dice2.removed) {
            pass = false;
            why = "DICE budget or determinism failed";
            break;
        }
        for (const Edge& e : dice.injected) {
            if (g.labels()[e.u] == g.labels()[e.v] || g.has_edge(e.u, e.v)) {
                pass = false;
                why = "DICE addition violated the inter-label contract";
            }
        }
        for (const Edge& e : dice.removed) {
            if (g.labels()[e.u] != g.labels()[e.v] || !g.has_edge(e.u, e.v)) {
                pass = false;
                why = "DICE removal violated the intra-label contract";
            }
        }
        if (!pass) break;
    }
    const double elapsed = seconds_since(start);
    record(4, "attack contracts", pass && elapsed < 30.0,
           pass ? fmt("six strategies, three rates, %.2fs", elapsed) : why);
}

void criterion_5_permutation() {
    std::mt19937_64 rng(407);
    const int n = 6, f = 3;
    const std::vector<Edge> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 2}};
    Matrix x(n, f);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
    const std::vector<std::int8_t> labels = {0, 0, 0, 1, 1, 1};
    const std::vector<std::int8_t> sensitive = {0, 1, 0, 1, 0, 1};
    const AttributedGraph g(n, edges, x, labels, sensitive);

    GcnModel model;
    model.w1 = Matrix(f, 4);
    model.w2 = Matrix(4, 2);
    model.b1.assign(4, 0.0);
    model.b2.assign(2, 0.0);
    for (std::size_t i = 0; i < model.w1.size(); ++i) model.w1.data()[i] = unit(rng);
    for (std::size_t i = 0; i < model.w2.size(); ++i) model.w2.data()[i] = unit(rng);

    const std::vector<int> perm = {3, 5, 0, 4, 2, 1};
    std::vector<Edge> pedges;
    for (const Edge& e : edges) pedges.push_back({perm[e.u], perm[e.v]});
    Matrix px(n, f);
    std::vector<std::int8_t> plabels(n), psensitive(n);
    for (int u = 0; u < n; ++u) {
        for (int k = 0; k < f; ++k) px(perm[u], k) = x(u, k);
        plabels[perm[u]] = labels[u];
        psensitive[perm[u]] = sensitive[u];
    }
    const AttributedGraph pg(n, pedges, px, plabels, psensitive);

    const Predictions preds = predict(model, g);
    const Predictions ppreds = predict(model, pg);
    bool pass = true;
    for (int u = 0; u < n; ++u) {
        if (ppreds.labels[perm[u]] != preds.labels[u]) pass = false;
    }
    std::vector<int> nodes(n), pnodes(n);
    for (int u = 0; u < n; ++u) {
        nodes[u] = u;
        pnodes[u] = perm[u];
    }
    const Evaluation ev = evaluate(preds.labels, labels, sensitive, nodes);
    const Evaluation pev = evaluate(ppreds.labels, plabels, psensitive, pnodes);
    pass = pass && ev.report.spd == pev.report.spd && ev.report.eod == pev.report.eod &&
           ev.report.eqd == pev.report.eqd && ev.report.accuracy == pev.report.accuracy &&
           ev.report.fpr == pev.report.fpr && ev.report.fnr == pev.report.fnr;
    record(5, "permutation equivariance", pass,
           pass ? "predictions equivariant, metrics invariant, exact"
                : "permutation changed predictions or metrics");
}

// ---- criteria 6..11: desk-scale statistical reproduction ------------------

ExperimentConfig base_config(SynthPreset preset, const std::string& out_name) {
    ExperimentConfig cfg = synthetic_experiment_defaults(preset);
    cfg.runs = kRuns;
    cfg.master_seed = kMasterSeed;
    cfg.out_dir = kOutRoot + "/" + out_name;
    return cfg;
}

void criteria_6_to_10() {
    ExperimentConfig main_cfg = base_config(SynthPreset::Homophilic, "homophilic_d15");
    main_cfg.strategies = {parse_strategy_spec("DD:y1s1"), parse_strategy_spec("ED:y1s1"),
                           parse_strategy_spec("EE:y1s1"), parse_strategy_spec("Random"),
                           parse_strategy_spec("DICE")};
    main_cfg.deltas = {0.15};
    const auto main_rows = run_sweep(main_cfg);
    save_aggregates_csv(main_cfg.out_dir + "/aggregates.csv", aggregate(main_rows));

    const Selector spd_of = [](const ResultRow& r) { return r.spd; };
    const SampleStats clean = stats_of(main_rows, "clean", 0.0, spd_of);
    const SampleStats dd = stats_of(main_rows, "DD", 0.15, spd_of);
    const SampleStats ed = stats_of(main_rows, "ED", 0.15, spd_of);
    const SampleStats ee = stats_of(main_rows, "EE", 0.15, spd_of);

    {
        const bool dd_up = dd.mean > clean.mean + 3.0 * se_diff(dd, clean) && dd.mean > 0.0;
        const bool ee_down = ee.mean < clean.mean - 3.0 * se_diff(ee, clean);
        const bool ed_flat = std::abs(ed.mean) < 0.05;
        record(6, "SPD sign structure", dd_up && ee_down && ed_flat,
               fmt("SPD means: clean %.3f, DD %.3f (se %.3f), EE %.3f, ED %.3f", clean.mean,
                   dd.mean, dd.se, ee.mean, ed.mean));
    }

    ExperimentConfig grid_cfg = base_config(SynthPreset::Homophilic, "homophilic_dd_grid");
    grid_cfg.strategies = {parse_strategy_spec("DD:y1s1")};
    grid_cfg.deltas = {0.10, 0.20, 0.30};
    const auto grid_rows = run_sweep(grid_cfg);
    save_aggregates_csv(grid_cfg.out_dir + "/aggregates.csv", aggregate(grid_rows));
    {
        const SampleStats at_10 = stats_of(grid_rows, "DD", 0.10, spd_of);
        const SampleStats at_20 = stats_of(grid_rows, "DD", 0.20, spd_of);
        const SampleStats at_30 = stats_of(grid_rows, "DD", 0.30, spd_of);
        const double early_peak = std::max({at_10.mean, dd.mean, at_20.mean});
        record(7, "DD rises then falls", early_peak > at_30.mean,
               fmt("DD SPD mean: 0.10->%.3f 0.15->%.3f 0.20->%.3f 0.30->%.3f", at_10.mean,
                   dd.mean, at_20.mean, at_30.mean));
    }

    {
        const Selector fpr0 = [](const ResultRow& r) { return r.fpr_s0; };
        const Selector fnr0 = [](const ResultRow& r) { return r.fnr_s0; };
        const Selector fnr1 = [](const ResultRow& r) { return r.fnr_s1; };
        const SampleStats clean_fpr0 = stats_of(main_rows, "clean", 0.0, fpr0);
        const SampleStats clean_fnr0 = stats_of(main_rows, "clean", 0.0, fnr0);
        const SampleStats clean_fnr1 = stats_of(main_rows, "clean", 0.0, fnr1);
        const SampleStats dd_fpr0 = stats_of(main_rows, "DD", 0.15, fpr0);
        const SampleStats dd_fnr1 = stats_of(main_rows, "DD", 0.15, fnr1);
        const SampleStats ee_fnr1 = stats_of(main_rows, "EE", 0.15, fnr1);
        const SampleStats ed_fnr0 = stats_of(main_rows, "ED", 0.15, fnr0);
        const SampleStats ed_fnr1 = stats_of(main_rows, "ED", 0.15, fnr1);
        const bool dd_up = dd_fpr0.mean > clean_fpr0.mean + 3.0 * se_diff(dd_fpr0, clean_fpr0) &&
                           dd_fnr1.mean > clean_fnr1.mean + 3.0 * se_diff(dd_fnr1, clean_fnr1);
        const bool ee_down =
            ee_fnr1.mean < clean_fnr1.mean - 3.0 * se_diff(ee_fnr1, clean_fnr1);
        const bool ed_down =
            ed_fnr0.mean < clean_fnr0.mean - 3.0 * se_diff(ed_fnr0, clean_fnr0) &&
            ed_fnr1.mean < clean_fnr1.mean - 3.0 * se_diff(ed_fnr1, clean_fnr1);
        record(8, "error-rate directions", dd_up && ee_down && ed_down,
               fmt("FPRs0 clean %.4f DD %.4f; FNRs1 clean %.4f DD %.4f EE %.4f ED %.4f",
                   clean_fpr0.mean, dd_fpr0.mean, clean_fnr1.mean, dd_fnr1.mean, ee_fnr1.mean,
                   ed_fnr1.mean));
    }

    {
        // Per-run |SPD shift| against the paired clean row.
        std::map<std::uint64_t, double> clean_by_seed, acc_by_seed;
        for (const ResultRow& row : main_rows) {
            if (row.ok() && row.strategy == "clean") {
                clean_by_seed[row.seed] = row.spd;
                acc_by_seed[row.seed] = row.accuracy;
            }
        }
        auto mean_shift = [&](const std::string& strategy, const std::string& anchor) {
            double total = 0.0;
            long n = 0;
            for (const ResultRow& row : main_rows) {
                if (!row.ok() || row.strategy != strategy) continue;
                if (!anchor.empty() && row.anchor != anchor) continue;
                total += std::abs(row.spd - clean_by_seed.at(row.seed));
                ++n;
            }
            return total / std::max(n, 1L);
        };
        const double random_shift = mean_shift("Random", "");
        const double dd_shift = mean_shift("DD", "y1s1");
        const SampleStats clean_acc =
            stats_of(main_rows, "clean", 0.0, [](const ResultRow& r) { return r.accuracy; });
        const SampleStats dd_acc =
            stats_of(main_rows, "DD", 0.15, [](const ResultRow& r) { return r.accuracy; });
        const bool contrast = random_shift < 0.5 * dd_shift;
        const bool deceptive = std::abs(dd_acc.mean - clean_acc.mean) <= 0.03;
        record(10, "baseline contrast", contrast && deceptive,
               fmt("|SPD shift| Random %.4f vs DD %.4f; accuracy clean %.3f DD %.3f",
                   random_shift, dd_shift, clean_acc.mean, dd_acc.mean));
    }
}

void criterion_9_heterophilic() {
    ExperimentConfig cfg = base_config(SynthPreset::Heterophilic, "heterophilic_d15");
    cfg.strategies = {parse_strategy_spec("DD:y1s1")};
    cfg.deltas = {0.15};
    const auto rows = run_sweep(cfg);
    save_aggregates_csv(cfg.out_dir + "/aggregates.csv", aggregate(rows));
    const Selector spd_of = [](const ResultRow& r) { return r.spd; };
    const SampleStats clean = stats_of(rows, "clean", 0.0, spd_of);
    const SampleStats dd = stats_of(rows, "DD", 0.15, spd_of);
    record(9, "heterophilic sign flip", dd.mean < clean.mean - 3.0 * se_diff(dd, clean),
           fmt("SPD means: clean %.3f, DD %.3f (se %.3f)", clean.mean, dd.mean, dd.se));
}

void criterion_11_surrogate() {
    // Label-completion fidelity with half the nodes known.
    const int seeds = 20;
    std::vector<double> agreement(seeds, 0.0);
    std::atomic<int> next{0};
    auto work = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= seeds) return;
            const SyntheticGraph sg = make_synthetic(SynthPreset::Homophilic, 3000 + i);
            const int n = sg.graph.node_count();
            std::vector<int> pool(n);
            for (int u = 0; u < n; ++u) pool[u] = u;
            std::mt19937_64 rng(derive_seed(kMasterSeed, "surrogate-check", i));
            for (int k = 0; k < n / 2; ++k) {
                std::uniform_int_distribution<int> pick(k, n - 1);
                std::swap(pool[k], pool[pick(rng)]);
            }
            std::vector<int> known(pool.begin(), pool.begin() + n / 2);
            std::sort(known.begin(), known.end());
            TrainConfig cfg = surrogate_config();
            cfg.seed = derive_seed(kMasterSeed, "surrogate-seed", i);
            const auto completed = surrogate_complete_labels(sg.graph, known, cfg);
            std::vector<char> is_known(n, 0);
            for (int u : known) is_known[u] = 1;
            long match = 0, total = 0;
            for (int u = 0; u < n; ++u) {
                if (is_known[u]) continue;
                ++total;
                match += completed[u] == sg.graph.labels()[u];
            }
            agreement[i] = static_cast<double>(match) / total;
        }
    };
    {
        std::vector<std::thread> threads;
        const unsigned count = std::max(1u, std::thread::hardware_concurrency());
        for (unsigned t = 0; t < count; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    double mean_agreement = 0.0;
    for (double a : agreement) mean_agreement += a;
    mean_agreement /= seeds;

    // Efficiency protocol end to end: 10%..50% labeled at delta 0.15.
    ExperimentConfig cfg = base_config(SynthPreset::Homophilic, "efficiency");
    cfg.mode = SweepMode::Efficiency;
    cfg.strategies = {parse_strategy_spec("DD:y1s1")};
    cfg.runs = 2;
    const auto rows = run_sweep(cfg);
    const auto agg = aggregate(rows);
    save_aggregates_csv(cfg.out_dir + "/aggregates.csv", agg);
    bool sweep_ok = rows.size() == 2 + 2 * cfg.labeled_fractions.size();
    for (const ResultRow& row : rows) sweep_ok = sweep_ok && row.ok();
    long attack_groups = 0;
    for (const AggregateRow& a : agg) {
        if (a.strategy == "DD") {
            ++attack_groups;
            sweep_ok = sweep_ok && a.n == 2 && a.errors == 0 && std::isfinite(a.spd.mean) &&
                       std::isfinite(a.spd.stddev);
        }
    }
    sweep_ok = sweep_ok && attack_groups == static_cast<long>(cfg.labeled_fractions.size());

    record(11, "surrogate fidelity + efficiency", mean_agreement > 0.85 && sweep_ok,
           fmt("label agreement %.3f over %d seeds; efficiency sweep %s", mean_agreement, seeds,
               sweep_ok ? "well-formed" : "malformed"));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::remove_all(kOutRoot);
    std::filesystem::create_directories(kOutRoot);

    criterion_1_decomposition();
    criterion_2_degenerate_classifiers();
    criterion_3_gradient_check();
    criterion_4_attack_contracts();
    criterion_5_permutation();
    criteria_6_to_10();
    criterion_9_heterophilic();
    criterion_11_surrogate();

    std::sort(g_results.begin(), g_results.end(),
              [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
    int failures = 0;
    for (const Criterion& c : g_results) failures += c.pass ? 0 : 1;
    std::printf("---\n%zu criteria, %d failed, %.1fs total\n", g_results.size(), failures,
                seconds_since(start));
    return failures == 0 ? 0 : 1;
}
