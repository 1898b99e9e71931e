#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace falab {

/// Per-group confusion counts plus the cell and group tallies they must be
/// consistent with: tn + fp = n_{y0 sj} and fn + tp = n_{y1 sj}.
struct GroupConfusion {
    std::array<long, 2> tp{}, fp{}, tn{}, fn{};
    std::array<std::array<long, 2>, 2> cell{};  // cell[label][group]
    std::array<long, 2> group_total{};
    long eval_count = 0;
    std::uint64_t eval_set_hash = 0;
};

/// Signed fairness metrics plus the per-group error rates used by the
/// decomposition. Error rates are normalized by group size, not by the
/// conditioning cell.
struct FairnessReport {
    double spd = 0.0;
    double eod = 0.0;
    double eqd = 0.0;
    double accuracy = 0.0;
    std::array<double, 2> fpr{};  // FP_{sj} / n_{sj}
    std::array<double, 2> fnr{};  // FN_{sj} / n_{sj}
};

struct Evaluation {
    GroupConfusion confusion;
    FairnessReport report;
};

/// Changes in SPD and in the error counts between a clean-graph evaluation
/// and a perturbed-graph evaluation of the same node set.
struct DecompositionDelta {
    double d_spd = 0.0;
    std::array<double, 2> d_fp{};
    std::array<double, 2> d_fn{};
};

GroupConfusion confusion_by_group(std::span<const std::int8_t> predicted,
                                  std::span<const std::int8_t> labels,
                                  std::span<const std::int8_t> sensitive,
                                  std::span<const int> eval_nodes);

/// Statistical parity difference P(pred=1 | s=0) - P(pred=1 | s=1); positive
/// means group s0 receives positive predictions more often.
double spd(std::span<const std::int8_t> predicted, std::span<const std::int8_t> sensitive,
           std::span<const int> eval_nodes);

/// Equality of opportunity difference: signed gap in true positive rates.
double eod(std::span<const std::int8_t> predicted, std::span<const std::int8_t> labels,
           std::span<const std::int8_t> sensitive, std::span<const int> eval_nodes);

/// Equalized odds difference: signed TPR gap plus signed FPR gap, each rate
/// conditioned on the true class.
double eqd(std::span<const std::int8_t> predicted, std::span<const std::int8_t> labels,
           std::span<const std::int8_t> sensitive, std::span<const int> eval_nodes);

/// SPD rewritten through error terms: (FP-FN)/n per group plus the label
/// distribution gap. Agrees with spd() to 1e-12 on every input.
double spd_decomposed(const GroupConfusion& cm);

/// Full evaluation over one node set; throws if any metric is undefined
/// (empty group or cell).
Evaluation evaluate(std::span<const std::int8_t> predicted, std::span<const std::int8_t> labels,
                    std::span<const std::int8_t> sensitive, std::span<const int> eval_nodes);

/// Element-wise differences, attacked minus clean. Both evaluations must
/// cover the same node set.
DecompositionDelta delta_report(const Evaluation& clean, const Evaluation& attacked);

}  // namespace falab
