#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "falab/gcn.hpp"
#include "falab/graph.hpp"

namespace falab {

/// Linking strategies joining Different/Equal class and Different/Equal
/// group relative to an anchor subset, plus the Random and DICE baselines.
enum class Strategy { DD, DE, ED, EE, Random, DICE };

std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);
inline bool needs_anchor(Strategy s) {
    return s == Strategy::DD || s == Strategy::DE || s == Strategy::ED || s == Strategy::EE;
}

struct AttackSpec {
    Strategy strategy = Strategy::DD;
    Subset anchor = Subset::y1s1;   // required for DD/DE/ED/EE
    double delta = 0.0;             // budget = floor(delta * |E|), in (0, 1]
    std::uint64_t seed = 0;
    /// Nodes whose ground-truth labels the attacker knows. Empty means all
    /// nodes with a known label.
    std::vector<int> attacker_labeled;

    void validate() const;
};

struct AttackResult {
    AttributedGraph graph;
    std::vector<Edge> injected;
    std::vector<Edge> removed;             // DICE only
    std::vector<std::int8_t> labels_used;  // label assignment behind the subsets
    long budget = 0;
    long shortfall = 0;  // perturbations skipped because a pool ran dry
};

/// Anchor and target subsets of a linking strategy: DD flips class and
/// group, DE flips class, ED flips group, EE keeps both.
std::pair<Subset, Subset> resolve_subsets(Strategy strategy, Subset anchor);

/// Injects floor(delta * |E|) new edges sampled uniformly from the missing
/// pairs between the two resolved subsets. Labels come from the surrogate
/// unless the attacker already knows every node (or `precomputed_labels`
/// carries a completed assignment).
AttackResult fa_gnn_attack(const AttributedGraph& g, const AttackSpec& spec,
                           const std::vector<std::int8_t>* precomputed_labels = nullptr);

/// Injects floor(delta * |E|) uniform random missing pairs anywhere.
AttackResult random_attack(const AttributedGraph& g, double delta, std::uint64_t seed);

/// Splits the budget between inter-label additions and intra-label
/// deletions (odd budgets favor additions). Needs a full label assignment.
AttackResult dice_attack(const AttributedGraph& g, std::span<const std::int8_t> labels,
                         double delta, std::uint64_t seed);

}  // namespace falab
