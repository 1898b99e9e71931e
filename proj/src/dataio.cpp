#include "falab/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace falab {

namespace {

[[noreturn]] void fail_at(const std::string& path, long line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

long parse_long(const std::string& s, const std::string& path, long line) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail_at(path, line, "expected an integer, got '" + s + "'");
    return value;
}

double parse_double(const std::string& s, const std::string& path, long line) {
    try {
        std::size_t used = 0;
        const double value = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return value;
    } catch (const std::exception&) {
        fail_at(path, line, "expected a number, got '" + s + "'");
    }
}

}  // namespace

AttributedGraph load_graph(const std::string& edge_path, const std::string& node_path) {
    std::ifstream nodes_in(node_path);
    if (!nodes_in) throw std::runtime_error("cannot open node table " + node_path);

    std::string line;
    long line_no = 0;
    if (!std::getline(nodes_in, line)) fail_at(node_path, 1, "empty node table");
    ++line_no;
    const auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "node_id" || header[1] != "label" ||
        header[2] != "sensitive" || header[3] != "f0")
        fail_at(node_path, 1, "expected header node_id,label,sensitive,f0,...");
    const int feature_count = static_cast<int>(header.size()) - 3;
    for (int k = 0; k < feature_count; ++k) {
        if (header[3 + k] != "f" + std::to_string(k))
            fail_at(node_path, 1, "feature columns must be named f0..f" +
                                      std::to_string(feature_count - 1));
    }

    struct Row {
        std::int8_t label, sensitive;
        std::vector<double> features;
    };
    std::vector<Row> rows;
    std::vector<long> ids;
    while (std::getline(nodes_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != feature_count + 3)
            fail_at(node_path, line_no, "expected " + std::to_string(feature_count + 3) +
                                            " fields, got " + std::to_string(fields.size()));
        const long id = parse_long(fields[0], node_path, line_no);
        const long label = parse_long(fields[1], node_path, line_no);
        const long sensitive = parse_long(fields[2], node_path, line_no);
        if (label != 0 && label != 1 && label != -1)
            fail_at(node_path, line_no, "label must be 0, 1 or -1");
        if (sensitive != 0 && sensitive != 1)
            fail_at(node_path, line_no, "sensitive attribute must be 0 or 1");
        Row row;
        row.label = static_cast<std::int8_t>(label);
        row.sensitive = static_cast<std::int8_t>(sensitive);
        row.features.reserve(feature_count);
        for (int k = 0; k < feature_count; ++k)
            row.features.push_back(parse_double(fields[3 + k], node_path, line_no));
        ids.push_back(id);
        rows.push_back(std::move(row));
    }
    const long n = static_cast<long>(rows.size());
    if (n == 0) fail_at(node_path, line_no, "node table has no rows");

    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= n)
            throw std::runtime_error(node_path + ": node ids must be dense 0.." +
                                     std::to_string(n - 1) + ", got " + std::to_string(ids[i]));
        if (seen[ids[i]]++)
            throw std::runtime_error(node_path + ": duplicate node id " + std::to_string(ids[i]));
    }

    Matrix features(static_cast<int>(n), feature_count);
    std::vector<std::int8_t> labels(n), sensitive(n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const long id = ids[i];
        labels[id] = rows[i].label;
        sensitive[id] = rows[i].sensitive;
        for (int k = 0; k < feature_count; ++k) features(static_cast<int>(id), k) = rows[i].features[k];
    }

    std::ifstream edges_in(edge_path);
    if (!edges_in) throw std::runtime_error("cannot open edge list " + edge_path);
    std::vector<Edge> edges;
    std::unordered_set<std::int64_t> keys;
    line_no = 0;
    while (std::getline(edges_in, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        std::string body = hash_pos == std::string::npos ? line : line.substr(0, hash_pos);
        std::istringstream ss(body);
        long u, v;
        if (!(ss >> u)) continue;  // blank or comment-only line
        if (!(ss >> v)) fail_at(edge_path, line_no, "expected two node ids");
        std::string extra;
        if (ss >> extra) fail_at(edge_path, line_no, "trailing content '" + extra + "'");
        if (u < 0 || v < 0 || u >= n || v >= n)
            fail_at(edge_path, line_no, "node id out of range");
        if (u >= v) fail_at(edge_path, line_no, "edges must be canonical with u < v");
        if (!keys.insert(edge_key(static_cast<int>(u), static_cast<int>(v), static_cast<int>(n)))
                 .second)
            fail_at(edge_path, line_no, "duplicate edge");
        edges.push_back({static_cast<int>(u), static_cast<int>(v)});
    }

    return AttributedGraph(static_cast<int>(n), std::move(edges), std::move(features),
                           std::move(labels), std::move(sensitive));
}

void save_graph(const AttributedGraph& g, const std::string& edge_path,
                const std::string& node_path) {
    std::ofstream edges_out(edge_path);
    if (!edges_out) throw std::runtime_error("cannot write edge list " + edge_path);
    edges_out << "# falab edge list v1\n";
    for (const Edge& e : g.edges()) edges_out << e.u << " " << e.v << "\n";
    if (!edges_out) throw std::runtime_error("failed while writing " + edge_path);

    std::ofstream nodes_out(node_path);
    if (!nodes_out) throw std::runtime_error("cannot write node table " + node_path);
    nodes_out << "node_id,label,sensitive";
    for (int k = 0; k < g.feature_count(); ++k) nodes_out << ",f" << k;
    nodes_out << "\n";
    char buf[64];
    for (int u = 0; u < g.node_count(); ++u) {
        nodes_out << u << "," << static_cast<int>(g.labels()[u]) << ","
                  << static_cast<int>(g.sensitive()[u]);
        for (int k = 0; k < g.feature_count(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", g.features()(u, k));
            nodes_out << "," << buf;
        }
        nodes_out << "\n";
    }
    if (!nodes_out) throw std::runtime_error("failed while writing " + node_path);
}

Splits make_splits(std::span<const int> labeled, std::span<const std::int8_t> labels,
                   double train_fraction, double val_fraction, double test_fraction,
                   std::uint64_t seed) {
    if (train_fraction < 0 || val_fraction < 0 || test_fraction < 0 ||
        train_fraction + val_fraction + test_fraction > 1.0 + 1e-12)
        throw std::invalid_argument("split fractions must be non-negative and sum to at most 1");
    std::vector<int> nodes(labeled.begin(), labeled.end());
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        throw std::invalid_argument("labeled node list contains duplicates");
    for (int u : nodes) {
        if (labels[u] == kUnknownLabel)
            throw std::invalid_argument("node " + std::to_string(u) +
                                        " is listed as labeled but has no label");
    }

    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, nodes.size() - 1);
        std::swap(nodes[i], nodes[pick(rng)]);
    }

    const double n = static_cast<double>(nodes.size());
    const long n_train = static_cast<long>(std::floor(n * train_fraction));
    const long n_train_val = static_cast<long>(std::floor(n * (train_fraction + val_fraction)));
    const long n_total =
        static_cast<long>(std::floor(n * (train_fraction + val_fraction + test_fraction)));

    Splits splits;
    splits.train.assign(nodes.begin(), nodes.begin() + n_train);
    splits.val.assign(nodes.begin() + n_train, nodes.begin() + n_train_val);
    splits.test.assign(nodes.begin() + n_train_val, nodes.begin() + n_total);

    auto check_classes = [&](const std::vector<int>& part, const char* name) {
        if (part.empty()) return;
        bool has0 = false, has1 = false;
        for (int u : part) (labels[u] == 0 ? has0 : has1) = true;
        if (!has0 || !has1)
            throw std::runtime_error(std::string("split '") + name + "' lost one of the classes");
    };
    check_classes(splits.train, "train");
    check_classes(splits.val, "val");
    check_classes(splits.test, "test");
    return splits;
}

void save_splits(const std::string& path, const Splits& splits) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write splits file " + path);
    out << "node_id,split\n";
    for (int u : splits.train) out << u << ",train\n";
    for (int u : splits.val) out << u << ",val\n";
    for (int u : splits.test) out << u << ",test\n";
    if (!out) throw std::runtime_error("failed while writing " + path);
}

Splits load_splits(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open splits file " + path);
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line) || line != "node_id,split")
        fail_at(path, 1, "expected header node_id,split");
    ++line_no;
    Splits splits;
    std::unordered_set<long> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) fail_at(path, line_no, "expected node_id,split");
        const long id = parse_long(fields[0], path, line_no);
        if (!seen.insert(id).second)
            fail_at(path, line_no, "node " + std::to_string(id) + " listed twice");
        if (fields[1] == "train") splits.train.push_back(static_cast<int>(id));
        else if (fields[1] == "val") splits.val.push_back(static_cast<int>(id));
        else if (fields[1] == "test") splits.test.push_back(static_cast<int>(id));
        else fail_at(path, line_no, "split must be train, val or test");
    }
    return splits;
}

void save_provenance(const std::string& path, const std::vector<ProvenanceRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write provenance file " + path);
    out << nlohmann::json{{"format", "attack-provenance"}, {"version", 1}}.dump() << "\n";
    for (const ProvenanceRecord& r : records) {
        out << nlohmann::json{{"action", r.action == ProvenanceRecord::Action::Add ? "add"
                                                                                   : "remove"},
                              {"u", r.u},
                              {"v", r.v}}
                   .dump()
            << "\n";
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

std::vector<ProvenanceRecord> load_provenance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open provenance file " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + " is empty");
    const auto header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "attack-provenance" ||
        header.value("version", 0) != 1)
        throw std::runtime_error(path + ": provenance version mismatch");
    std::vector<ProvenanceRecord> records;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) fail_at(path, line_no, "invalid JSON record");
        ProvenanceRecord r;
        const std::string action = j.value("action", "");
        if (action == "add") r.action = ProvenanceRecord::Action::Add;
        else if (action == "remove") r.action = ProvenanceRecord::Action::Remove;
        else fail_at(path, line_no, "action must be add or remove");
        if (!j.contains("u") || !j.contains("v")) fail_at(path, line_no, "record needs u and v");
        r.u = j["u"].get<int>();
        r.v = j["v"].get<int>();
        records.push_back(r);
    }
    return records;
}

}  // namespace falab
