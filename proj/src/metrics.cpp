#include "falab/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "falab/seeds.hpp"

namespace falab {

namespace {

std::uint64_t hash_node_set(std::span<const int> nodes) {
    std::vector<int> sorted(nodes.begin(), nodes.end());
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (int u : sorted) h = splitmix64(h ^ static_cast<std::uint64_t>(u));
    return h;
}

}  // namespace

GroupConfusion confusion_by_group(std::span<const std::int8_t> predicted,
                                  std::span<const std::int8_t> labels,
                                  std::span<const std::int8_t> sensitive,
                                  std::span<const int> eval_nodes) {
    if (eval_nodes.empty()) throw std::invalid_argument("evaluation set is empty");
    GroupConfusion cm;
    for (int u : eval_nodes) {
        const int y = labels[u];
        const int s = sensitive[u];
        const int p = predicted[u];
        if (y != 0 && y != 1)
            throw std::invalid_argument("evaluation node " + std::to_string(u) + " has no label");
        if (p == 1) {
            (y == 1 ? cm.tp[s] : cm.fp[s]) += 1;
        } else {
            (y == 0 ? cm.tn[s] : cm.fn[s]) += 1;
        }
        cm.cell[y][s] += 1;
        cm.group_total[s] += 1;
        cm.eval_count += 1;
    }
    cm.eval_set_hash = hash_node_set(eval_nodes);
    return cm;
}

double spd(std::span<const std::int8_t> predicted, std::span<const std::int8_t> sensitive,
           std::span<const int> eval_nodes) {
    std::array<long, 2> positive{}, total{};
    for (int u : eval_nodes) {
        total[sensitive[u]] += 1;
        if (predicted[u] == 1) positive[sensitive[u]] += 1;
    }
    if (total[0] == 0 || total[1] == 0) throw std::invalid_argument("empty group");
    return static_cast<double>(positive[0]) / total[0] - static_cast<double>(positive[1]) / total[1];
}

double eod(std::span<const std::int8_t> predicted, std::span<const std::int8_t> labels,
           std::span<const std::int8_t> sensitive, std::span<const int> eval_nodes) {
    const GroupConfusion cm = confusion_by_group(predicted, labels, sensitive, eval_nodes);
    if (cm.cell[1][0] == 0 || cm.cell[1][1] == 0)
        throw std::invalid_argument("undefined EOD: a group has no positive-class nodes");
    return static_cast<double>(cm.tp[0]) / cm.cell[1][0] -
           static_cast<double>(cm.tp[1]) / cm.cell[1][1];
}

double eqd(std::span<const std::int8_t> predicted, std::span<const std::int8_t> labels,
           std::span<const std::int8_t> sensitive, std::span<const int> eval_nodes) {
    const GroupConfusion cm = confusion_by_group(predicted, labels, sensitive, eval_nodes);
    for (int y = 0; y < 2; ++y) {
        for (int s = 0; s < 2; ++s) {
            if (cm.cell[y][s] == 0)
                throw std::invalid_argument("undefined EQD: empty cell y" + std::to_string(y) +
                                            "s" + std::to_string(s));
        }
    }
    const double tpr_gap = static_cast<double>(cm.tp[0]) / cm.cell[1][0] -
                           static_cast<double>(cm.tp[1]) / cm.cell[1][1];
    const double fpr_gap = static_cast<double>(cm.fp[0]) / cm.cell[0][0] -
                           static_cast<double>(cm.fp[1]) / cm.cell[0][1];
    return tpr_gap + fpr_gap;
}

double spd_decomposed(const GroupConfusion& cm) {
    if (cm.group_total[0] == 0 || cm.group_total[1] == 0)
        throw std::invalid_argument("empty group");
    const double n0 = static_cast<double>(cm.group_total[0]);
    const double n1 = static_cast<double>(cm.group_total[1]);
    return (cm.fp[0] - cm.fn[0]) / n0 - (cm.fp[1] - cm.fn[1]) / n1 + cm.cell[1][0] / n0 -
           cm.cell[1][1] / n1;
}

Evaluation evaluate(std::span<const std::int8_t> predicted, std::span<const std::int8_t> labels,
                    std::span<const std::int8_t> sensitive, std::span<const int> eval_nodes) {
    Evaluation ev;
    ev.confusion = confusion_by_group(predicted, labels, sensitive, eval_nodes);
    ev.report.spd = spd(predicted, sensitive, eval_nodes);
    ev.report.eod = eod(predicted, labels, sensitive, eval_nodes);
    ev.report.eqd = eqd(predicted, labels, sensitive, eval_nodes);
    long correct = 0;
    for (int u : eval_nodes) {
        if (predicted[u] == labels[u]) ++correct;
    }
    ev.report.accuracy = static_cast<double>(correct) / static_cast<double>(eval_nodes.size());
    for (int s = 0; s < 2; ++s) {
        ev.report.fpr[s] = static_cast<double>(ev.confusion.fp[s]) / ev.confusion.group_total[s];
        ev.report.fnr[s] = static_cast<double>(ev.confusion.fn[s]) / ev.confusion.group_total[s];
    }
    return ev;
}

DecompositionDelta delta_report(const Evaluation& clean, const Evaluation& attacked) {
    if (clean.confusion.eval_set_hash != attacked.confusion.eval_set_hash ||
        clean.confusion.eval_count != attacked.confusion.eval_count)
        throw std::invalid_argument("delta_report: evaluations cover different node sets");
    DecompositionDelta d;
    d.d_spd = attacked.report.spd - clean.report.spd;
    for (int s = 0; s < 2; ++s) {
        d.d_fp[s] = static_cast<double>(attacked.confusion.fp[s] - clean.confusion.fp[s]);
        d.d_fn[s] = static_cast<double>(attacked.confusion.fn[s] - clean.confusion.fn[s]);
    }
    return d;
}

}  // namespace falab
