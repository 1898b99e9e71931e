#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "falab/graph.hpp"

namespace falab {

/// Disjoint node splits over the labeled part of a dataset.
struct Splits {
    std::vector<int> train, val, test;
};

/// A loaded dataset with its splits and where it came from.
struct DatasetBundle {
    AttributedGraph graph;
    Splits splits;
    std::string source;
    std::uint64_t split_seed = 0;
};

/// Edge list: one `u v` pair per line, 0-based, canonical u < v, no
/// duplicates; '#' starts a comment line. Loaders reject malformed input
/// with the offending line number instead of repairing it.
AttributedGraph load_graph(const std::string& edge_path, const std::string& node_path);
void save_graph(const AttributedGraph& g, const std::string& edge_path,
                const std::string& node_path);

/// Uniform random disjoint partition of the labeled nodes, cut by cumulative
/// flooring so exact fractions give exact sizes. Membership depends only on
/// the node set and seed, not on input order. Throws if a nonempty split
/// ends up without one of the classes.
Splits make_splits(std::span<const int> labeled, std::span<const std::int8_t> labels,
                   double train_fraction, double val_fraction, double test_fraction,
                   std::uint64_t seed);

void save_splits(const std::string& path, const Splits& splits);
Splits load_splits(const std::string& path);

struct ProvenanceRecord {
    enum class Action { Add, Remove } action = Action::Add;
    int u = 0;
    int v = 0;
    bool operator==(const ProvenanceRecord&) const = default;
};

/// JSON-lines attack provenance: a version header record followed by one
/// record per perturbation.
void save_provenance(const std::string& path, const std::vector<ProvenanceRecord>& records);
std::vector<ProvenanceRecord> load_provenance(const std::string& path);

}  // namespace falab
