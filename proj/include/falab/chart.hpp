#pragma once

#include <string>
#include <vector>

namespace falab {

struct AggregateRow;  // sweep.hpp

struct ChartOptions {
    std::string x_field = "delta";  // or "labeled_fraction"
    std::string title;
    int width = 640;
    int height = 420;
};

/// Names accepted by emit_chart.
const std::vector<std::string>& chart_metrics();

/// Self-contained SVG: one line per (strategy, anchor) series over the x
/// field, a shaded band of one standard deviation, and a zero reference
/// line. Byte-deterministic for identical input.
void emit_chart(const std::vector<AggregateRow>& aggregates, const std::string& metric,
                const std::string& path, const ChartOptions& options = {});

}  // namespace falab
