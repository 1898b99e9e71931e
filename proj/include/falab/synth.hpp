#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "falab/graph.hpp"

namespace falab {

/// Stochastic block model over the four subsets: block sizes in the fixed
/// order y0s0, y0s1, y1s0, y1s1 and a symmetric 4x4 density matrix.
struct SbmSpec {
    std::array<int, 4> block_sizes{};
    std::array<std::array<double, 4>, 4> density{};

    int total_nodes() const {
        return block_sizes[0] + block_sizes[1] + block_sizes[2] + block_sizes[3];
    }
    void validate() const;
};

/// Class-conditioned Gaussian features: 10 per node, mean vector chosen by
/// the node's class, shared variance.
struct FeatureSpec {
    static constexpr int kFeatureCount = 10;
    std::array<double, kFeatureCount> mean_class0{};
    std::array<double, kFeatureCount> mean_class1{};
    double variance = 0.5;

    void validate() const;
};

/// Each cross- or intra-block pair becomes an edge independently with the
/// block pair's density. Deterministic per seed; expected cost O(|E|).
std::vector<Edge> sample_sbm(const SbmSpec& spec, std::uint64_t seed);

/// One row of Gaussian draws per node, mean vector picked by the node's
/// class. Features depend on class only, never on group.
Matrix sample_features(const SubsetPartition& partition, const FeatureSpec& spec,
                       std::uint64_t seed);

enum class SynthPreset { Homophilic, Heterophilic, Random };

std::string preset_name(SynthPreset p);
SynthPreset parse_preset(const std::string& name);

/// Density matrix of a preset for equal blocks: homophilic 0.004 within a
/// label and 0.0016 across, heterophilic the reverse, random 0.0028 flat.
std::array<std::array<double, 4>, 4> preset_density(SynthPreset p);

struct SyntheticGraph {
    AttributedGraph graph;
    LabeledSet labeled;
    SynthPreset preset;
    std::uint64_t seed;
};

struct SynthOptions {
    /// Fixed class means for debugging; fresh uniform draws from [-1,1]
    /// otherwise.
    std::optional<std::pair<std::array<double, FeatureSpec::kFeatureCount>,
                            std::array<double, FeatureSpec::kFeatureCount>>>
        fixed_means;
    double variance = 0.5;
    int labeled_count = 20;
};

/// The synthetic benchmark: 4000 nodes, 1000 per subset, SBM structure from
/// the preset, class-conditioned features, and a uniformly sampled labeled
/// set that always contains both classes.
SyntheticGraph make_synthetic(SynthPreset preset, std::uint64_t seed,
                              const SynthOptions& options = {});

}  // namespace falab
