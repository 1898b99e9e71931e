#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <set>

#include "falab/attack.hpp"
#include "falab/synth.hpp"

using namespace falab;

namespace {

std::set<std::pair<int, int>> edge_set(const std::vector<Edge>& edges) {
    std::set<std::pair<int, int>> s;
    for (const Edge& e : edges) s.emplace(e.u, e.v);
    return s;
}

AttributedGraph labeled_graph(int n, std::vector<Edge> edges, std::vector<std::int8_t> y,
                              std::vector<std::int8_t> s) {
    return AttributedGraph(n, std::move(edges), Matrix(n, 2, 0.0), std::move(y), std::move(s));
}

}  // namespace

TEST_SUITE("attack") {

TEST_CASE("subset resolution flips the right coordinates") {
    CHECK(resolve_subsets(Strategy::DD, Subset::y1s1) ==
          std::pair{Subset::y1s1, Subset::y0s0});
    CHECK(resolve_subsets(Strategy::DE, Subset::y1s1) ==
          std::pair{Subset::y1s1, Subset::y0s1});
    CHECK(resolve_subsets(Strategy::ED, Subset::y0s1) ==
          std::pair{Subset::y0s1, Subset::y0s0});
    CHECK(resolve_subsets(Strategy::EE, Subset::y1s1) ==
          std::pair{Subset::y1s1, Subset::y1s1});
    CHECK_THROWS_WITH_AS(resolve_subsets(Strategy::Random, Subset::y1s1),
                         doctest::Contains("no subset pair"), std::invalid_argument);
}

TEST_CASE("DD anchored at either end of the pair targets the same pool") {
    const auto [a1, b1] = resolve_subsets(Strategy::DD, Subset::y1s1);
    const auto [a2, b2] = resolve_subsets(Strategy::DD, Subset::y0s0);
    CHECK(std::minmax(a1, b1) == std::minmax(a2, b2));
}

TEST_CASE("a sub-unit budget leaves the graph untouched") {
    const AttributedGraph g = labeled_graph(4, {{0, 1}}, {1, 0, 1, 0}, {1, 0, 0, 1});
    AttackSpec spec;
    spec.strategy = Strategy::DD;
    spec.anchor = Subset::y1s1;
    spec.delta = 0.5;  // floor(0.5 * 1) = 0
    const AttackResult result = fa_gnn_attack(g, spec);
    CHECK(result.graph.edges() == g.edges());
    CHECK(result.injected.empty());
    CHECK(result.budget == 0);
}

TEST_CASE("DD on the synthetic benchmark meets budget and endpoint contracts") {
    const SyntheticGraph sg = make_synthetic(SynthPreset::Homophilic, 77);
    AttackSpec spec;
    spec.strategy = Strategy::DD;
    spec.anchor = Subset::y1s1;
    spec.delta = 0.15;
    spec.seed = 5;
    const AttackResult result = fa_gnn_attack(sg.graph, spec);  // full labels, no surrogate

    const long expected = static_cast<long>(std::floor(0.15 * sg.graph.edge_count()));
    CHECK(result.graph.edge_count() - sg.graph.edge_count() == expected);
    CHECK(static_cast<long>(result.injected.size()) == expected);
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : result.injected) {
        CHECK(e.u < e.v);
        CHECK(seen.emplace(e.u, e.v).second);
        CHECK_FALSE(sg.graph.has_edge(e.u, e.v));
        // One endpoint in y1s1, the other in y0s0.
        const Subset su = subset_of(result.labels_used[e.u], sg.graph.sensitive()[e.u]);
        const Subset sv = subset_of(result.labels_used[e.v], sg.graph.sensitive()[e.v]);
        CHECK(std::minmax(su, sv) == std::minmax(Subset::y1s1, Subset::y0s0));
    }

    const AttackResult again = fa_gnn_attack(sg.graph, spec);
    CHECK(again.injected == result.injected);

    // Structure-only poisoning.
    CHECK(result.graph.features() == sg.graph.features());
    CHECK(result.graph.labels() == sg.graph.labels());
    CHECK(result.graph.sensitive() == sg.graph.sensitive());
}

TEST_CASE("a heavy DD attack lowers the anchor subset's homophily") {
    const SyntheticGraph sg = make_synthetic(SynthPreset::Homophilic, 78);
    const SubsetPartition p = build_partition(sg.graph.labels(), sg.graph.sensitive());
    const auto& anchor_nodes = p.of(Subset::y1s1);
    AttackSpec spec;
    spec.strategy = Strategy::DD;
    spec.anchor = Subset::y1s1;
    spec.delta = 0.30;
    spec.seed = 6;
    const AttackResult result = fa_gnn_attack(sg.graph, spec);
    const double before =
        label_homophily_ratio_nonisolated(sg.graph, sg.graph.labels(), anchor_nodes);
    const double after =
        label_homophily_ratio_nonisolated(result.graph, sg.graph.labels(), anchor_nodes);
    CHECK(after < before);
}

TEST_CASE("EE injects canonical pairs inside the anchor subset") {
    const SyntheticGraph sg = make_synthetic(SynthPreset::Homophilic, 79);
    AttackSpec spec;
    spec.strategy = Strategy::EE;
    spec.anchor = Subset::y1s1;
    spec.delta = 0.05;
    spec.seed = 7;
    const AttackResult result = fa_gnn_attack(sg.graph, spec);
    CHECK_FALSE(result.injected.empty());
    for (const Edge& e : result.injected) {
        CHECK(e.u < e.v);
        CHECK(subset_of(result.labels_used[e.u], sg.graph.sensitive()[e.u]) == Subset::y1s1);
        CHECK(subset_of(result.labels_used[e.v], sg.graph.sensitive()[e.v]) == Subset::y1s1);
    }
}

TEST_CASE("an exhausted pool is a hard error naming the feasible budget") {
    // y1s1 = {0}, y0s0 = {1,2,3}, and all three cross pairs already exist.
    const AttributedGraph g =
        labeled_graph(4, {{0, 1}, {0, 2}, {0, 3}}, {1, 0, 0, 0}, {1, 0, 0, 0});
    AttackSpec spec;
    spec.strategy = Strategy::DD;
    spec.anchor = Subset::y1s1;
    spec.delta = 0.5;  // budget 1, pool 0
    CHECK_THROWS_WITH_AS(fa_gnn_attack(g, spec), doctest::Contains("feasible 0"),
                         std::runtime_error);
}

TEST_CASE("random attack adds only absent pairs and fails on a complete graph") {
    const SyntheticGraph sg = make_synthetic(SynthPreset::Random, 80);
    const AttackResult result = random_attack(sg.graph, 0.1, 9);
    CHECK(static_cast<long>(result.injected.size()) ==
          static_cast<long>(std::floor(0.1 * sg.graph.edge_count())));
    for (const Edge& e : result.injected) CHECK_FALSE(sg.graph.has_edge(e.u, e.v));

    std::vector<Edge> complete;
    for (int u = 0; u < 8; ++u) {
        for (int v = u + 1; v < 8; ++v) complete.push_back({u, v});
    }
    const AttributedGraph full = labeled_graph(8, complete, std::vector<std::int8_t>(8, 0),
                                               std::vector<std::int8_t>(8, 0));
    CHECK_THROWS_WITH_AS(random_attack(full, 0.5, 1), doctest::Contains("exceeds"),
                         std::runtime_error);
}

TEST_CASE("random attack with a sub-unit budget is the identity") {
    const AttributedGraph g = labeled_graph(4, {{0, 1}}, {0, 0, 1, 1}, {0, 1, 0, 1});
    const AttackResult result = random_attack(g, 0.9, 3);
    CHECK(result.graph.edges() == g.edges());
}

TEST_CASE("DICE splits the budget and respects the label contracts") {
    const SyntheticGraph sg = make_synthetic(SynthPreset::Homophilic, 81);
    const double delta = 0.15;
    const AttackResult result = dice_attack(sg.graph, sg.graph.labels(), delta, 11);
    const long budget = static_cast<long>(std::floor(delta * sg.graph.edge_count()));
    CHECK(static_cast<long>(result.injected.size() + result.removed.size()) == budget);
    CHECK(static_cast<long>(result.injected.size()) == budget - budget / 2);
    CHECK(static_cast<long>(result.removed.size()) == budget / 2);
    CHECK(result.shortfall == 0);

    const auto clean = edge_set(sg.graph.edges());
    for (const Edge& e : result.removed) {
        CHECK(clean.count({e.u, e.v}) == 1);
        CHECK(sg.graph.labels()[e.u] == sg.graph.labels()[e.v]);
    }
    for (const Edge& e : result.injected) {
        CHECK(clean.count({e.u, e.v}) == 0);
        CHECK(sg.graph.labels()[e.u] != sg.graph.labels()[e.v]);
    }
    CHECK(result.graph.edge_count() ==
          sg.graph.edge_count() + static_cast<long>(result.injected.size()) -
              static_cast<long>(result.removed.size()));

    const AttackResult again = dice_attack(sg.graph, sg.graph.labels(), delta, 11);
    CHECK(again.injected == result.injected);
    CHECK(again.removed == result.removed);
}

TEST_CASE("DICE shifts the whole budget to additions when nothing can be deleted") {
    // Only inter-label edges exist, so the deletion pool is empty.
    const AttributedGraph g = labeled_graph(
        6, {{0, 3}, {0, 4}, {1, 3}, {1, 5}, {2, 4}, {2, 5}},
        {0, 0, 0, 1, 1, 1}, {0, 1, 0, 1, 0, 1});
    const AttackResult result = dice_attack(g, g.labels(), 0.5, 13);  // budget 3
    CHECK(result.removed.empty());
    CHECK(result.injected.size() == 3);
    for (const Edge& e : result.injected) CHECK(g.labels()[e.u] != g.labels()[e.v]);
}

TEST_CASE("strategy names parse both ways") {
    CHECK(parse_strategy("DD") == Strategy::DD);
    CHECK(parse_strategy("DICE") == Strategy::DICE);
    CHECK(strategy_name(Strategy::EE) == "EE");
    CHECK_THROWS_AS(parse_strategy("XX"), std::invalid_argument);
    CHECK(parse_subset("y1s0") == Subset::y1s0);
    CHECK_THROWS_AS(parse_subset("y2s0"), std::invalid_argument);
}

}  // TEST_SUITE
