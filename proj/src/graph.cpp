#include "falab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace falab {

namespace {

std::string edge_str(Edge e) {
    return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
}

}  // namespace

AttributedGraph::AttributedGraph(int node_count, std::vector<Edge> edges, Matrix features,
                                 std::vector<std::int8_t> labels,
                                 std::vector<std::int8_t> sensitive)
    : node_count_(node_count),
      features_(std::move(features)),
      labels_(std::move(labels)),
      sensitive_(std::move(sensitive)) {
    if (node_count_ <= 0) throw std::invalid_argument("graph needs a positive node count");
    if (features_.rows() != node_count_)
        throw std::invalid_argument("feature matrix row count must equal node count");
    if (static_cast<int>(labels_.size()) != node_count_)
        throw std::invalid_argument("label vector size must equal node count");
    if (static_cast<int>(sensitive_.size()) != node_count_)
        throw std::invalid_argument("sensitive vector size must equal node count");
    for (int u = 0; u < node_count_; ++u) {
        if (labels_[u] != 0 && labels_[u] != 1 && labels_[u] != kUnknownLabel)
            throw std::invalid_argument("label of node " + std::to_string(u) +
                                        " must be 0, 1 or unknown");
        if (sensitive_[u] != 0 && sensitive_[u] != 1)
            throw std::invalid_argument("sensitive attribute of node " + std::to_string(u) +
                                        " must be 0 or 1");
    }

    edges_.reserve(edges.size());
    edge_keys_.reserve(edges.size() * 2);
    for (Edge e : edges) {
        e = canonical(e);
        if (e.u == e.v) throw std::invalid_argument("self-loop edge " + edge_str(e));
        if (e.u < 0 || e.v >= node_count_)
            throw std::invalid_argument("edge " + edge_str(e) + " out of range");
        if (!edge_keys_.insert(edge_key(e.u, e.v, node_count_)).second)
            throw std::invalid_argument("duplicate edge " + edge_str(e));
        edges_.push_back(e);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](Edge a, Edge b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });

    // CSR view with both directions.
    adj_offsets_.assign(node_count_ + 1, 0);
    for (Edge e : edges_) {
        ++adj_offsets_[e.u + 1];
        ++adj_offsets_[e.v + 1];
    }
    for (int u = 0; u < node_count_; ++u) adj_offsets_[u + 1] += adj_offsets_[u];
    adj_targets_.resize(edges_.size() * 2);
    std::vector<int> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
    for (Edge e : edges_) {
        adj_targets_[cursor[e.u]++] = e.v;
        adj_targets_[cursor[e.v]++] = e.u;
    }
    for (int u = 0; u < node_count_; ++u)
        std::sort(adj_targets_.begin() + adj_offsets_[u], adj_targets_.begin() + adj_offsets_[u + 1]);
}

std::string subset_name(Subset s) {
    static const char* names[4] = {"y0s0", "y0s1", "y1s0", "y1s1"};
    return names[static_cast<int>(s)];
}

Subset parse_subset(const std::string& name) {
    for (int i = 0; i < 4; ++i) {
        if (name == subset_name(static_cast<Subset>(i))) return static_cast<Subset>(i);
    }
    throw std::invalid_argument("unknown subset '" + name + "' (expected y0s0, y0s1, y1s0 or y1s1)");
}

SubsetPartition build_partition(std::span<const std::int8_t> labels,
                                std::span<const std::int8_t> sensitive) {
    if (labels.size() != sensitive.size())
        throw std::invalid_argument("labels and sensitive attributes must cover the same nodes");
    SubsetPartition p;
    for (std::size_t u = 0; u < labels.size(); ++u) {
        if (labels[u] == kUnknownLabel)
            throw std::invalid_argument("incomplete labels: node " + std::to_string(u) +
                                        " has no label");
        const Subset s = subset_of(labels[u], sensitive[u]);
        p.members[static_cast<int>(s)].push_back(static_cast<int>(u));
    }
    for (int i = 0; i < 4; ++i) p.cell_count[i] = static_cast<long>(p.members[i].size());
    p.group_count[0] = p.cells(0, 0) + p.cells(1, 0);
    p.group_count[1] = p.cells(0, 1) + p.cells(1, 1);
    return p;
}

NormalizedAdjacency normalize_adjacency(const AttributedGraph& g) {
    const int n = g.node_count();
    NormalizedAdjacency adj;
    adj.n = n;
    adj.row_offsets.assign(n + 1, 0);
    std::vector<double> inv_sqrt_deg(n);
    for (int u = 0; u < n; ++u) {
        adj.row_offsets[u + 1] = adj.row_offsets[u] + g.degree(u) + 1;
        inv_sqrt_deg[u] = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) + 1.0);
    }
    adj.col_indices.resize(adj.row_offsets[n]);
    adj.values.resize(adj.row_offsets[n]);
    for (int u = 0; u < n; ++u) {
        int pos = adj.row_offsets[u];
        bool self_done = false;
        for (int v : g.neighbors(u)) {
            if (!self_done && u < v) {  // keep column indices sorted
                adj.col_indices[pos] = u;
                adj.values[pos] = inv_sqrt_deg[u] * inv_sqrt_deg[u];
                ++pos;
                self_done = true;
            }
            adj.col_indices[pos] = v;
            adj.values[pos] = inv_sqrt_deg[u] * inv_sqrt_deg[v];
            ++pos;
        }
        if (!self_done) {
            adj.col_indices[pos] = u;
            adj.values[pos] = inv_sqrt_deg[u] * inv_sqrt_deg[u];
        }
    }
    return adj;
}

void spmm(const NormalizedAdjacency& adj, const Matrix& m, Matrix& out) {
    assert(adj.n == m.rows());
    const int cols = m.cols();
    if (out.rows() != adj.n || out.cols() != cols) {
        out = Matrix(adj.n, cols);
    } else {
        out.fill(0.0);
    }
    for (int u = 0; u < adj.n; ++u) {
        double* orow = out.row(u);
        for (int idx = adj.row_offsets[u]; idx < adj.row_offsets[u + 1]; ++idx) {
            const double w = adj.values[idx];
            const double* mrow = m.row(adj.col_indices[idx]);
            for (int j = 0; j < cols; ++j) orow[j] += w * mrow[j];
        }
    }
}

AttributedGraph add_edges(const AttributedGraph& g, std::span<const Edge> new_edges) {
    std::vector<Edge> combined = g.edges();
    std::unordered_set<std::int64_t> seen;
    seen.reserve(new_edges.size() * 2);
    for (Edge e : new_edges) {
        e = canonical(e);
        if (e.u == e.v) throw std::invalid_argument("cannot add self-loop " + edge_str(e));
        if (e.u < 0 || e.v >= g.node_count())
            throw std::invalid_argument("cannot add out-of-range edge " + edge_str(e));
        if (g.has_edge(e.u, e.v))
            throw std::invalid_argument("edge " + edge_str(e) + " already present");
        if (!seen.insert(edge_key(e.u, e.v, g.node_count())).second)
            throw std::invalid_argument("edge " + edge_str(e) + " listed twice");
        combined.push_back(e);
    }
    return AttributedGraph(g.node_count(), std::move(combined), g.features(), g.labels(),
                           g.sensitive());
}

double label_homophily_ratio(const AttributedGraph& g, std::span<const std::int8_t> labels,
                             std::span<const int> nodes) {
    if (nodes.empty()) throw std::invalid_argument("homophily set is empty");
    double total = 0.0;
    for (int u : nodes) {
        if (g.degree(u) == 0)
            throw std::invalid_argument("isolated node in homophily set: " + std::to_string(u));
        if (labels[u] == kUnknownLabel)
            throw std::invalid_argument("node " + std::to_string(u) + " has no label");
        int same = 0;
        for (int v : g.neighbors(u)) {
            if (labels[v] == kUnknownLabel)
                throw std::invalid_argument("neighbor " + std::to_string(v) + " has no label");
            if (labels[v] == labels[u]) ++same;
        }
        total += static_cast<double>(same) / g.degree(u);
    }
    return total / static_cast<double>(nodes.size());
}

double label_homophily_ratio_nonisolated(const AttributedGraph& g,
                                         std::span<const std::int8_t> labels,
                                         std::span<const int> nodes) {
    std::vector<int> kept;
    kept.reserve(nodes.size());
    for (int u : nodes) {
        if (g.degree(u) > 0) kept.push_back(u);
    }
    if (kept.empty()) return std::nan("");
    return label_homophily_ratio(g, labels, kept);
}

}  // namespace falab
