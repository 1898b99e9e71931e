#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "falab/matrix.hpp"

namespace falab {

/// Node labels are 0/1, or kUnknownLabel for nodes whose class the dataset
/// does not reveal. The sensitive attribute is always 0/1.
inline constexpr std::int8_t kUnknownLabel = -1;

struct Edge {
    int u = 0;
    int v = 0;
    bool operator==(const Edge&) const = default;
};

/// Canonical form: smaller endpoint first.
inline Edge canonical(Edge e) { return e.u <= e.v ? e : Edge{e.v, e.u}; }

inline std::int64_t edge_key(int u, int v, int n) {
    if (u > v) std::swap(u, v);
    return static_cast<std::int64_t>(u) * n + v;
}

/// Undirected simple graph with dense node features, 0/1/unknown labels and
/// a 0/1 sensitive attribute per node. Immutable after construction;
/// mutation-style operations build new graphs.
class AttributedGraph {
public:
    AttributedGraph(int node_count, std::vector<Edge> edges, Matrix features,
                    std::vector<std::int8_t> labels, std::vector<std::int8_t> sensitive);

    int node_count() const { return node_count_; }
    int feature_count() const { return features_.cols(); }
    long edge_count() const { return static_cast<long>(edges_.size()); }

    /// Canonical (u < v), lexicographically sorted.
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const int> neighbors(int u) const {
        return {adj_targets_.data() + adj_offsets_[u],
                static_cast<std::size_t>(adj_offsets_[u + 1] - adj_offsets_[u])};
    }
    int degree(int u) const { return adj_offsets_[u + 1] - adj_offsets_[u]; }
    bool has_edge(int u, int v) const {
        return u != v && edge_keys_.count(edge_key(u, v, node_count_)) > 0;
    }

    const Matrix& features() const { return features_; }
    const std::vector<std::int8_t>& labels() const { return labels_; }
    const std::vector<std::int8_t>& sensitive() const { return sensitive_; }

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<int> adj_offsets_;  // node_count_ + 1
    std::vector<int> adj_targets_;  // 2 * |E|
    std::unordered_set<std::int64_t> edge_keys_;
    Matrix features_;
    std::vector<std::int8_t> labels_;
    std::vector<std::int8_t> sensitive_;
};

/// Nodes with known ground-truth labels available for training.
struct LabeledSet {
    std::vector<int> nodes;
};

/// One of the four (label, group) subsets y_i s_j.
enum class Subset : int { y0s0 = 0, y0s1 = 1, y1s0 = 2, y1s1 = 3 };

inline constexpr int subset_label(Subset s) { return static_cast<int>(s) >> 1; }
inline constexpr int subset_group(Subset s) { return static_cast<int>(s) & 1; }
inline constexpr Subset subset_of(int label, int group) {
    return static_cast<Subset>((label << 1) | group);
}
std::string subset_name(Subset s);
Subset parse_subset(const std::string& name);

/// The four disjoint subsets y_i s_j plus their tallies.
struct SubsetPartition {
    std::array<std::vector<int>, 4> members;  // indexed by Subset, index-ascending
    std::array<long, 4> cell_count{};         // n_{y_i s_j}
    std::array<long, 2> group_count{};        // n_{s_j}

    const std::vector<int>& of(Subset s) const { return members[static_cast<int>(s)]; }
    long cells(int label, int group) const {
        return cell_count[static_cast<int>(subset_of(label, group))];
    }
};

/// Partition nodes by (label, group). Every label must be known.
SubsetPartition build_partition(std::span<const std::int8_t> labels,
                                std::span<const std::int8_t> sensitive);

/// Symmetric propagation operator D^-1/2 (A + I) D^-1/2 in CSR form, where D
/// is the degree matrix of A + I. Row u holds deg(u)+1 entries.
struct NormalizedAdjacency {
    int n = 0;
    std::vector<int> row_offsets;  // n + 1
    std::vector<int> col_indices;
    std::vector<double> values;
};

NormalizedAdjacency normalize_adjacency(const AttributedGraph& g);

/// out = adj * m
void spmm(const NormalizedAdjacency& adj, const Matrix& m, Matrix& out);

/// New graph with the given edges added. Pairs may come in either
/// orientation but must be new, in range and free of self-loops.
AttributedGraph add_edges(const AttributedGraph& g, std::span<const Edge> new_edges);

/// Mean over `nodes` of the fraction of each node's neighbors sharing its
/// label. Every listed node needs degree >= 1 and known labels all around.
double label_homophily_ratio(const AttributedGraph& g, std::span<const std::int8_t> labels,
                             std::span<const int> nodes);

/// label_homophily_ratio restricted to the listed nodes with degree >= 1.
/// Returns NaN if none qualify. Sweep reporting uses this to tolerate the
/// occasional isolated node in sampled graphs.
double label_homophily_ratio_nonisolated(const AttributedGraph& g,
                                         std::span<const std::int8_t> labels,
                                         std::span<const int> nodes);

}  // namespace falab
