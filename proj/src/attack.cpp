#include "falab/attack.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "falab/seeds.hpp"

namespace falab {

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::DD: return "DD";
        case Strategy::DE: return "DE";
        case Strategy::ED: return "ED";
        case Strategy::EE: return "EE";
        case Strategy::Random: return "Random";
        case Strategy::DICE: return "DICE";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name) {
    for (Strategy s : {Strategy::DD, Strategy::DE, Strategy::ED, Strategy::EE, Strategy::Random,
                       Strategy::DICE}) {
        if (name == strategy_name(s)) return s;
    }
    throw std::invalid_argument("unknown strategy '" + name +
                                "' (expected DD, DE, ED, EE, Random or DICE)");
}

void AttackSpec::validate() const {
    if (delta <= 0.0 || delta > 1.0)
        throw std::invalid_argument("perturbation rate must lie in (0, 1]");
}

std::pair<Subset, Subset> resolve_subsets(Strategy strategy, Subset anchor) {
    const int label = subset_label(anchor), group = subset_group(anchor);
    switch (strategy) {
        case Strategy::DD: return {anchor, subset_of(1 - label, 1 - group)};
        case Strategy::DE: return {anchor, subset_of(1 - label, group)};
        case Strategy::ED: return {anchor, subset_of(label, 1 - group)};
        case Strategy::EE: return {anchor, anchor};
        default: throw std::invalid_argument("strategy has no subset pair");
    }
}

namespace {

long floor_budget(double delta, long edge_count) {
    return static_cast<long>(std::floor(delta * static_cast<double>(edge_count)));
}

// Missing pairs between two node sets (unordered pairs within one set when
// same_set). Sets must be disjoint unless same_set.
struct PairPool {
    const std::vector<int>& a;
    const std::vector<int>& b;
    bool same_set;
    long capacity = 0;  // candidate pairs
    long missing = 0;   // candidates that are not edges

    PairPool(const AttributedGraph& g, const std::vector<int>& a_, const std::vector<int>& b_,
             bool same_set_)
        : a(a_), b(b_), same_set(same_set_) {
        const long na = static_cast<long>(a.size()), nb = static_cast<long>(b.size());
        capacity = same_set ? na * (na - 1) / 2 : na * nb;
        std::vector<char> in_a(g.node_count(), 0), in_b(g.node_count(), 0);
        for (int u : a) in_a[u] = 1;
        for (int u : b) in_b[u] = 1;
        long present = 0;
        for (const Edge& e : g.edges()) {
            if ((in_a[e.u] && in_b[e.v]) || (in_a[e.v] && in_b[e.u])) ++present;
        }
        missing = capacity - present;
    }
};

std::vector<Edge> sample_missing_pairs(const AttributedGraph& g, const PairPool& pool, long k,
                                       std::mt19937_64& rng) {
    std::vector<Edge> chosen;
    if (k <= 0) return chosen;
    chosen.reserve(k);
    std::unordered_set<std::int64_t> taken;
    taken.reserve(k * 2);

    if (k * 4 <= pool.missing) {
        // Sparse regime: rejection sampling stays cheap and exactly uniform.
        std::uniform_int_distribution<std::size_t> pick_a(0, pool.a.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_b(0, pool.b.size() - 1);
        while (static_cast<long>(chosen.size()) < k) {
            const int u = pool.a[pick_a(rng)];
            const int v = pool.same_set ? pool.a[pick_a(rng)] : pool.b[pick_b(rng)];
            if (u == v) continue;
            if (g.has_edge(u, v)) continue;
            if (!taken.insert(edge_key(u, v, g.node_count())).second) continue;
            chosen.push_back(canonical({u, v}));
        }
        return chosen;
    }

    // Dense regime: enumerate the pool and draw without replacement.
    std::vector<Edge> candidates;
    candidates.reserve(pool.missing);
    if (pool.same_set) {
        for (std::size_t i = 0; i < pool.a.size(); ++i) {
            for (std::size_t j = i + 1; j < pool.a.size(); ++j) {
                if (!g.has_edge(pool.a[i], pool.a[j]))
                    candidates.push_back(canonical({pool.a[i], pool.a[j]}));
            }
        }
    } else {
        for (int u : pool.a) {
            for (int v : pool.b) {
                if (u != v && !g.has_edge(u, v)) candidates.push_back(canonical({u, v}));
            }
        }
    }
    for (long i = 0; i < k; ++i) {
        std::uniform_int_distribution<long> pick(i, static_cast<long>(candidates.size()) - 1);
        std::swap(candidates[i], candidates[pick(rng)]);
        chosen.push_back(candidates[i]);
    }
    return chosen;
}

std::vector<int> all_known_labeled(const AttributedGraph& g) {
    std::vector<int> nodes;
    nodes.reserve(g.node_count());
    for (int u = 0; u < g.node_count(); ++u) {
        if (g.labels()[u] != kUnknownLabel) nodes.push_back(u);
    }
    return nodes;
}

}  // namespace

AttackResult fa_gnn_attack(const AttributedGraph& g, const AttackSpec& spec,
                           const std::vector<std::int8_t>* precomputed_labels) {
    spec.validate();
    if (!needs_anchor(spec.strategy))
        throw std::invalid_argument("fa_gnn_attack handles the DD/DE/ED/EE strategies only");

    const long budget = floor_budget(spec.delta, g.edge_count());
    if (budget == 0) return AttackResult{g, {}, {}, g.labels(), 0, 0};

    std::vector<std::int8_t> completed;
    if (precomputed_labels) {
        completed = *precomputed_labels;
    } else {
        std::vector<int> known =
            spec.attacker_labeled.empty() ? all_known_labeled(g) : spec.attacker_labeled;
        TrainConfig surrogate = surrogate_config();
        surrogate.seed = derive_seed(spec.seed, "surrogate");
        completed = surrogate_complete_labels(g, known, surrogate);
    }

    const SubsetPartition partition = build_partition(completed, g.sensitive());
    const auto [a, b] = resolve_subsets(spec.strategy, spec.anchor);
    const PairPool pool(g, partition.of(a), partition.of(b), a == b);
    if (budget > pool.missing)
        throw std::runtime_error("budget exceeds available pairs: requested " +
                                 std::to_string(budget) + ", feasible " +
                                 std::to_string(pool.missing));

    std::mt19937_64 rng(spec.seed);
    std::vector<Edge> injected = sample_missing_pairs(g, pool, budget, rng);
    AttributedGraph perturbed = add_edges(g, injected);
    return AttackResult{std::move(perturbed), std::move(injected), {}, std::move(completed),
                        budget, 0};
}

AttackResult random_attack(const AttributedGraph& g, double delta, std::uint64_t seed) {
    if (delta <= 0.0 || delta > 1.0)
        throw std::invalid_argument("perturbation rate must lie in (0, 1]");
    const long budget = floor_budget(delta, g.edge_count());
    if (budget == 0) return AttackResult{g, {}, {}, g.labels(), 0, 0};

    std::vector<int> everyone(g.node_count());
    for (int u = 0; u < g.node_count(); ++u) everyone[u] = u;
    const PairPool pool(g, everyone, everyone, true);
    if (budget > pool.missing)
        throw std::runtime_error("budget exceeds available pairs: requested " +
                                 std::to_string(budget) + ", feasible " +
                                 std::to_string(pool.missing));

    std::mt19937_64 rng(seed);
    std::vector<Edge> injected = sample_missing_pairs(g, pool, budget, rng);
    AttributedGraph perturbed = add_edges(g, injected);
    return AttackResult{std::move(perturbed), std::move(injected), {}, g.labels(), budget, 0};
}

AttackResult dice_attack(const AttributedGraph& g, std::span<const std::int8_t> labels,
                         double delta, std::uint64_t seed) {
    if (delta <= 0.0 || delta > 1.0)
        throw std::invalid_argument("perturbation rate must lie in (0, 1]");
    if (static_cast<int>(labels.size()) != g.node_count())
        throw std::invalid_argument("DICE needs a label for every node");
    for (std::size_t u = 0; u < labels.size(); ++u) {
        if (labels[u] != 0 && labels[u] != 1)
            throw std::invalid_argument("DICE label for node " + std::to_string(u) +
                                        " must be 0 or 1");
    }
    const long budget = floor_budget(delta, g.edge_count());
    if (budget == 0) return AttackResult{g, {}, {}, {labels.begin(), labels.end()}, 0, 0};

    long remove_target = budget / 2;
    long add_target = budget - remove_target;  // odd budgets favor additions

    std::vector<Edge> intra_edges;
    for (const Edge& e : g.edges()) {
        if (labels[e.u] == labels[e.v]) intra_edges.push_back(e);
    }
    if (remove_target > static_cast<long>(intra_edges.size())) {
        add_target += remove_target - static_cast<long>(intra_edges.size());
        remove_target = static_cast<long>(intra_edges.size());
    }

    std::mt19937_64 rng(seed);
    std::vector<Edge> removed;
    removed.reserve(remove_target);
    for (long i = 0; i < remove_target; ++i) {
        std::uniform_int_distribution<long> pick(i, static_cast<long>(intra_edges.size()) - 1);
        std::swap(intra_edges[i], intra_edges[pick(rng)]);
        removed.push_back(intra_edges[i]);
    }

    std::vector<int> class0, class1;
    for (int u = 0; u < g.node_count(); ++u) (labels[u] == 0 ? class0 : class1).push_back(u);
    const PairPool pool(g, class0, class1, false);
    long shortfall = 0;
    if (add_target > pool.missing) {
        shortfall = add_target - pool.missing;
        add_target = pool.missing;
        std::cerr << "warning: DICE addition pool exhausted, short by " << shortfall
                  << " perturbations\n";
    }
    std::vector<Edge> injected = sample_missing_pairs(g, pool, add_target, rng);

    std::unordered_set<std::int64_t> removed_keys;
    for (const Edge& e : removed) removed_keys.insert(edge_key(e.u, e.v, g.node_count()));
    std::vector<Edge> edges;
    edges.reserve(g.edges().size() - removed.size() + injected.size());
    for (const Edge& e : g.edges()) {
        if (!removed_keys.count(edge_key(e.u, e.v, g.node_count()))) edges.push_back(e);
    }
    edges.insert(edges.end(), injected.begin(), injected.end());

    AttributedGraph perturbed(g.node_count(), std::move(edges), g.features(), g.labels(),
                              g.sensitive());
    return AttackResult{std::move(perturbed), std::move(injected), std::move(removed),
                        {labels.begin(), labels.end()}, budget, shortfall};
}

}  // namespace falab
