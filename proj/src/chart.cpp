#include "falab/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "falab/sweep.hpp"

namespace falab {

namespace {

struct Point {
    double x, mean, stddev;
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

Stat pick_metric(const AggregateRow& row, const std::string& metric) {
    if (metric == "spd") return row.spd;
    if (metric == "abs_spd") return row.abs_spd;
    if (metric == "eod") return row.eod;
    if (metric == "eqd") return row.eqd;
    if (metric == "accuracy") return row.accuracy;
    if (metric == "fpr_s0") return row.fpr_s0;
    if (metric == "fnr_s0") return row.fnr_s0;
    if (metric == "fpr_s1") return row.fpr_s1;
    if (metric == "fnr_s1") return row.fnr_s1;
    if (metric == "homophily_anchor") return row.homophily_anchor;
    std::string valid;
    for (const std::string& m : chart_metrics()) valid += (valid.empty() ? "" : ", ") + m;
    throw std::invalid_argument("unknown metric '" + metric + "'; valid metrics: " + valid);
}

// Round ticks to a friendly step: 1, 2 or 5 times a power of ten.
std::vector<double> make_ticks(double lo, double hi, int target) {
    if (hi <= lo) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step)
        ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return ticks;
}

}  // namespace

const std::vector<std::string>& chart_metrics() {
    static const std::vector<std::string> metrics = {
        "spd",    "abs_spd", "eod",    "eqd",    "accuracy",
        "fpr_s0", "fnr_s0",  "fpr_s1", "fnr_s1", "homophily_anchor"};
    return metrics;
}

void emit_chart(const std::vector<AggregateRow>& aggregates, const std::string& metric,
                const std::string& path, const ChartOptions& options) {
    if (aggregates.empty()) throw std::invalid_argument("no aggregates to plot");
    if (options.x_field != "delta" && options.x_field != "labeled_fraction")
        throw std::invalid_argument("x field must be delta or labeled_fraction");

    // One series per (strategy, anchor), clean rows included at x with their
    // stored coordinate (delta 0 for the clean baseline).
    std::map<std::string, std::vector<Point>> series;
    for (const AggregateRow& row : aggregates) {
        const Stat stat = pick_metric(row, metric);
        if (row.n == 0) continue;
        const double x = options.x_field == "delta" ? row.delta : row.labeled_fraction;
        if (!std::isfinite(x) || !std::isfinite(stat.mean)) continue;
        std::string label = row.strategy;
        if (row.anchor != "-" && row.anchor != "*") label += ":" + row.anchor;
        series[label].push_back({x, stat.mean, stat.stddev});
    }
    if (series.empty()) throw std::invalid_argument("no plottable points for metric " + metric);
    for (auto& [label, points] : series)
        std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) { return a.x < b.x; });

    double x_lo = 1e300, x_hi = -1e300, y_lo = 0.0, y_hi = 0.0;  // y range always includes 0
    for (const auto& [label, points] : series) {
        for (const Point& p : points) {
            x_lo = std::min(x_lo, p.x);
            x_hi = std::max(x_hi, p.x);
            y_lo = std::min(y_lo, p.mean - p.stddev);
            y_hi = std::max(y_hi, p.mean + p.stddev);
        }
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    const double y_pad = (y_hi - y_lo) * 0.08 + 1e-12;
    y_lo -= y_pad;
    y_hi += y_pad;

    const double ml = 62, mr = 16, mt = options.title.empty() ? 16 : 34, mb = 44;
    const double pw = options.width - ml - mr, ph = options.height - mt - mb;
    auto sx = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto sy = [&](double y) { return mt + (y_hi - y) / (y_hi - y_lo) * ph; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write chart file " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty())
        out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"14\">"
            << options.title << "</text>\n";

    // Axes, ticks, labels.
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\"" << fmt(ml + pw)
        << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml)
        << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";
    for (double t : make_ticks(x_lo, x_hi, 6)) {
        out << "<line x1=\"" << fmt(sx(t)) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\""
            << fmt(sx(t)) << "\" y2=\"" << fmt(mt + ph + 4) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << fmt(mt + ph + 17)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
            << "</text>\n";
    }
    for (double t : make_ticks(y_lo, y_hi, 6)) {
        out << "<line x1=\"" << fmt(ml - 4) << "\" y1=\"" << fmt(sy(t)) << "\" x2=\"" << fmt(ml)
            << "\" y2=\"" << fmt(sy(t)) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(ml - 7) << "\" y=\"" << fmt(sy(t) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
            << "</text>\n";
    }
    out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(mt + ph + 36)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << (options.x_field == "delta" ? "perturbation rate" : "labeled fraction")
        << "</text>\n";
    out << "<text x=\"14\" y=\"" << fmt(mt + ph / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 14 "
        << fmt(mt + ph / 2) << ")\">" << metric << "</text>\n";

    // Zero reference line.
    if (y_lo < 0.0 && y_hi > 0.0)
        out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(sy(0.0)) << "\" x2=\"" << fmt(ml + pw)
            << "\" y2=\"" << fmt(sy(0.0))
            << "\" stroke=\"#888888\" stroke-dasharray=\"5 4\"/>\n";

    int color_index = 0;
    double legend_y = mt + 14;
    for (const auto& [label, points] : series) {
        const char* color = kPalette[color_index % 10];
        ++color_index;
        if (points.size() > 1) {
            std::string band;
            for (const Point& p : points)
                band += fmt(sx(p.x)) + "," + fmt(sy(p.mean + p.stddev)) + " ";
            for (auto it = points.rbegin(); it != points.rend(); ++it)
                band += fmt(sx(it->x)) + "," + fmt(sy(it->mean - it->stddev)) + " ";
            band.pop_back();
            out << "<polygon points=\"" << band << "\" fill=\"" << color
                << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        }
        std::string poly;
        for (const Point& p : points) poly += fmt(sx(p.x)) + "," + fmt(sy(p.mean)) + " ";
        poly.pop_back();
        out << "<polyline points=\"" << poly << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.8\"/>\n";
        for (const Point& p : points)
            out << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.mean))
                << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
        out << "<line x1=\"" << fmt(ml + pw - 130) << "\" y1=\"" << fmt(legend_y - 4) << "\" x2=\""
            << fmt(ml + pw - 112) << "\" y2=\"" << fmt(legend_y - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.8\"/>\n";
        out << "<text x=\"" << fmt(ml + pw - 106) << "\" y=\"" << fmt(legend_y)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
        legend_y += 15;
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("failed while writing " + path);
}

}  // namespace falab
