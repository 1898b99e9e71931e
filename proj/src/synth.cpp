#include "falab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "falab/seeds.hpp"

namespace falab {

void SbmSpec::validate() const {
    for (int i = 0; i < 4; ++i) {
        if (block_sizes[i] < 0) throw std::invalid_argument("block sizes must be non-negative");
        for (int j = 0; j < 4; ++j) {
            if (density[i][j] < 0.0 || density[i][j] > 1.0)
                throw std::invalid_argument("densities must lie in [0,1]");
            if (density[i][j] != density[j][i])
                throw std::invalid_argument("density matrix must be symmetric");
        }
    }
    if (total_nodes() <= 0) throw std::invalid_argument("at least one node required");
}

void FeatureSpec::validate() const {
    if (variance <= 0.0) throw std::invalid_argument("feature variance must be positive");
    for (int k = 0; k < kFeatureCount; ++k) {
        if (std::abs(mean_class0[k]) > 1.0 || std::abs(mean_class1[k]) > 1.0)
            throw std::invalid_argument("class mean entries must lie in [-1,1]");
    }
}

namespace {

// Pairs before row i when enumerating (i<j) pairs of an n-block
// lexicographically.
long pairs_before(long i, long n) { return i * (n - 1) - i * (i - 1) / 2; }

// Inverse of the enumeration: candidate index -> (i, j) offsets inside the
// block.
std::pair<int, int> unrank_intra_pair(long idx, long n) {
    double disc = static_cast<double>(2 * n - 1) * static_cast<double>(2 * n - 1) -
                  8.0 * static_cast<double>(idx);
    long i = static_cast<long>((static_cast<double>(2 * n - 1) - std::sqrt(std::max(disc, 0.0))) / 2.0);
    i = std::clamp(i, 0L, n - 2);
    while (i + 1 <= n - 2 && pairs_before(i + 1, n) <= idx) ++i;
    while (i > 0 && pairs_before(i, n) > idx) --i;
    const long j = i + 1 + (idx - pairs_before(i, n));
    return {static_cast<int>(i), static_cast<int>(j)};
}

// Visit each of `count` candidates independently with probability p, via
// geometric skips so sparse blocks cost O(edges) instead of O(candidates).
template <typename Fn>
void bernoulli_scan(long count, double p, std::mt19937_64& rng, Fn&& emit) {
    if (count <= 0 || p <= 0.0) return;
    if (p >= 1.0) {
        for (long i = 0; i < count; ++i) emit(i);
        return;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double log_q = std::log1p(-p);
    long i = -1;
    while (true) {
        const double u = 1.0 - unit(rng);  // (0, 1]
        const double skip = std::floor(std::log(u) / log_q);
        if (skip >= static_cast<double>(count - i)) break;
        i += 1 + static_cast<long>(skip);
        if (i >= count) break;
        emit(i);
    }
}

}  // namespace

std::vector<Edge> sample_sbm(const SbmSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::array<int, 4> start{};
    for (int b = 1; b < 4; ++b) start[b] = start[b - 1] + spec.block_sizes[b - 1];

    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
            const long na = spec.block_sizes[a], nb = spec.block_sizes[b];
            const double p = spec.density[a][b];
            if (a == b) {
                bernoulli_scan(na * (na - 1) / 2, p, rng, [&](long idx) {
                    auto [i, j] = unrank_intra_pair(idx, na);
                    edges.push_back({start[a] + i, start[a] + j});
                });
            } else {
                bernoulli_scan(na * nb, p, rng, [&](long idx) {
                    edges.push_back({start[a] + static_cast<int>(idx / nb),
                                     start[b] + static_cast<int>(idx % nb)});
                });
            }
        }
    }
    return edges;
}

Matrix sample_features(const SubsetPartition& partition, const FeatureSpec& spec,
                       std::uint64_t seed) {
    spec.validate();
    const long n = partition.group_count[0] + partition.group_count[1];
    std::vector<std::int8_t> label_of(n, kUnknownLabel);
    for (int s = 0; s < 4; ++s) {
        for (int u : partition.members[s]) label_of[u] = static_cast<std::int8_t>(s >> 1);
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(spec.variance));
    Matrix x(static_cast<int>(n), FeatureSpec::kFeatureCount);
    for (long u = 0; u < n; ++u) {
        const auto& mean = label_of[u] == 0 ? spec.mean_class0 : spec.mean_class1;
        for (int k = 0; k < FeatureSpec::kFeatureCount; ++k)
            x(static_cast<int>(u), k) = mean[k] + noise(rng);
    }
    return x;
}

std::string preset_name(SynthPreset p) {
    switch (p) {
        case SynthPreset::Homophilic: return "homophilic";
        case SynthPreset::Heterophilic: return "heterophilic";
        case SynthPreset::Random: return "random";
    }
    return "?";
}

SynthPreset parse_preset(const std::string& name) {
    if (name == "homophilic") return SynthPreset::Homophilic;
    if (name == "heterophilic") return SynthPreset::Heterophilic;
    if (name == "random") return SynthPreset::Random;
    throw std::invalid_argument("unknown preset '" + name +
                                "' (expected homophilic, heterophilic or random)");
}

std::array<std::array<double, 4>, 4> preset_density(SynthPreset p) {
    // The random density matches the homophilic preset's expected edge count.
    double intra = 0.004, inter = 0.0016;
    if (p == SynthPreset::Heterophilic) std::swap(intra, inter);
    if (p == SynthPreset::Random) intra = inter = 0.0028;
    std::array<std::array<double, 4>, 4> m{};
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const bool same_label = (a >> 1) == (b >> 1);
            m[a][b] = same_label ? intra : inter;
        }
    }
    return m;
}

SyntheticGraph make_synthetic(SynthPreset preset, std::uint64_t seed,
                              const SynthOptions& options) {
    constexpr int kBlock = 1000;
    const int n = 4 * kBlock;

    SbmSpec sbm;
    sbm.block_sizes = {kBlock, kBlock, kBlock, kBlock};
    sbm.density = preset_density(preset);

    std::vector<std::int8_t> labels(n), sensitive(n);
    for (int u = 0; u < n; ++u) {
        labels[u] = static_cast<std::int8_t>(u / (2 * kBlock));
        sensitive[u] = static_cast<std::int8_t>((u / kBlock) % 2);
    }
    const SubsetPartition partition = build_partition(labels, sensitive);

    FeatureSpec features;
    features.variance = options.variance;
    if (options.fixed_means) {
        features.mean_class0 = options.fixed_means->first;
        features.mean_class1 = options.fixed_means->second;
    } else {
        std::mt19937_64 mu_rng(derive_seed(seed, "mu"));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int k = 0; k < FeatureSpec::kFeatureCount; ++k) features.mean_class0[k] = unit(mu_rng);
        for (int k = 0; k < FeatureSpec::kFeatureCount; ++k) features.mean_class1[k] = unit(mu_rng);
    }

    std::vector<Edge> edges = sample_sbm(sbm, derive_seed(seed, "sbm"));
    Matrix x = sample_features(partition, features, derive_seed(seed, "features"));
    AttributedGraph graph(n, std::move(edges), std::move(x), labels, sensitive);

    // Uniform labeled sample, redrawn whenever a class is missing: training
    // on a one-class set would make the run meaningless.
    if (options.labeled_count < 2 || options.labeled_count > n)
        throw std::invalid_argument("labeled count must lie in [2, node count]");
    std::mt19937_64 pick_rng(derive_seed(seed, "labeled"));
    std::vector<int> pool(n);
    for (int u = 0; u < n; ++u) pool[u] = u;
    LabeledSet labeled;
    while (true) {
        for (int i = 0; i < options.labeled_count; ++i) {
            std::uniform_int_distribution<int> pick(i, n - 1);
            std::swap(pool[i], pool[pick(pick_rng)]);
        }
        labeled.nodes.assign(pool.begin(), pool.begin() + options.labeled_count);
        std::sort(labeled.nodes.begin(), labeled.nodes.end());
        bool has0 = false, has1 = false;
        for (int u : labeled.nodes) (labels[u] == 0 ? has0 : has1) = true;
        if (has0 && has1) break;
    }

    return SyntheticGraph{std::move(graph), std::move(labeled), preset, seed};
}

}  // namespace falab
