#include "falab/gcn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "falab/seeds.hpp"

namespace falab {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (learning_rate <= 0.0) throw std::invalid_argument("learning rate must be positive");
    if (weight_decay < 0.0) throw std::invalid_argument("weight decay must be non-negative");
    if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("dropout must lie in [0,1)");
    if (hidden_dim < 1) throw std::invalid_argument("hidden width must be >= 1");
    if (train_fraction < 0 || val_fraction < 0 || test_fraction < 0 ||
        train_fraction + val_fraction + test_fraction > 1.0 + 1e-12)
        throw std::invalid_argument("split fractions must be non-negative and sum to at most 1");
}

TrainConfig empirical_victim_config() { return TrainConfig{}; }

TrainConfig synthetic_victim_config() {
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.train_fraction = 1.0;
    cfg.val_fraction = 0.0;
    cfg.test_fraction = 0.0;
    cfg.selection = ModelSelection::FinalEpoch;
    return cfg;
}

TrainConfig surrogate_config() {
    TrainConfig cfg;
    cfg.hidden_dim = 16;
    cfg.learning_rate = 0.01;
    cfg.weight_decay = 5e-4;
    cfg.dropout = 0.5;
    cfg.train_fraction = 1.0;
    cfg.val_fraction = 0.0;
    cfg.test_fraction = 0.0;
    cfg.selection = ModelSelection::FinalEpoch;
    return cfg;
}

namespace {

void check_shapes(const GcnModel& model, const Matrix& x) {
    if (model.w1.rows() != x.cols())
        throw std::invalid_argument("model input width does not match the feature matrix");
    if (model.w2.rows() != model.w1.cols() || model.w2.cols() != 2 ||
        static_cast<int>(model.b1.size()) != model.w1.cols() || model.b2.size() != 2)
        throw std::invalid_argument("inconsistent model shapes");
}

}  // namespace

namespace {

void ensure_shape(Matrix& m, int rows, int cols) {
    if (m.rows() != rows || m.cols() != cols) m = Matrix(rows, cols);
}

}  // namespace

Matrix forward(const GcnModel& model, const NormalizedAdjacency& adj, const Matrix& x,
               double dropout_p, std::mt19937_64* rng, ForwardCache* cache) {
    check_shapes(model, x);
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;

    if (c.ax.rows() != x.rows() || c.ax.cols() != x.cols()) spmm(adj, x, c.ax);

    matmul(c.ax, model.w1, c.pre_hidden);  // bias folded in below
    const int n = x.rows(), h = model.w1.cols();

    // One pass per row: bias, relu, inverted dropout and the projection onto
    // the two output columns. Surviving hidden entries carry the keep scale.
    ensure_shape(c.hidden, n, h);
    ensure_shape(c.hidden_out, n, 2);
    if (dropout_p > 0.0 && !rng) throw std::invalid_argument("dropout requires an rng");
    c.keep_scale = dropout_p > 0.0 ? 1.0 / (1.0 - dropout_p) : 1.0;
    const std::uint64_t keep_threshold =
        static_cast<std::uint64_t>((1.0 - dropout_p) * 9007199254740992.0);  // 2^53
    // One engine draw seeds a counter-based mask for the whole epoch.
    const std::uint64_t mask_seed = dropout_p > 0.0 ? (*rng)() : 0;
    std::vector<double> w2_col0(h), w2_col1(h);
    for (int j = 0; j < h; ++j) {
        w2_col0[j] = model.w2(j, 0);
        w2_col1[j] = model.w2(j, 1);
    }
    const double* __restrict__ b1 = model.b1.data();
    for (int u = 0; u < n; ++u) {
        const double* __restrict__ pre = c.pre_hidden.row(u);
        double* __restrict__ hid = c.hidden.row(u);
        double s0 = 0.0, s1 = 0.0;
        if (dropout_p > 0.0) {
            const std::uint64_t row_base = mask_seed + static_cast<std::uint64_t>(u) * h;
            for (int j = 0; j < h; ++j) {
                const double v = pre[j] + b1[j];
                const bool keep = (splitmix64(row_base + j) >> 11) < keep_threshold;
                const double a = (keep && v > 0.0) ? v * c.keep_scale : 0.0;
                hid[j] = a;
                s0 += a * w2_col0[j];
                s1 += a * w2_col1[j];
            }
        } else {
            for (int j = 0; j < h; ++j) {
                const double v = pre[j] + b1[j];
                const double a = v > 0.0 ? v : 0.0;
                hid[j] = a;
                s0 += a * w2_col0[j];
                s1 += a * w2_col1[j];
            }
        }
        c.hidden_out(u, 0) = s0;
        c.hidden_out(u, 1) = s1;
    }

    spmm(adj, c.hidden_out, c.logits);
    Matrix& z = c.logits;
    for (int u = 0; u < n; ++u) {
        z(u, 0) += model.b2[0];
        z(u, 1) += model.b2[1];
    }
    if (!all_finite(z)) throw std::runtime_error("numerical divergence in forward pass");

    ensure_shape(c.probs, n, 2);
    for (int u = 0; u < n; ++u) {
        const double m = std::max(z(u, 0), z(u, 1));
        const double e0 = std::exp(z(u, 0) - m);
        const double e1 = std::exp(z(u, 1) - m);
        c.probs(u, 0) = e0 / (e0 + e1);
        c.probs(u, 1) = e1 / (e0 + e1);
    }
    return c.probs;
}

LossAndGradients loss_and_gradients(const GcnModel& model, const NormalizedAdjacency& adj,
                                    const Matrix& x, std::span<const int> labeled_nodes,
                                    std::span<const std::int8_t> labels, double weight_decay,
                                    double dropout_p, std::mt19937_64* rng, ForwardCache* cache) {
    if (labeled_nodes.empty()) throw std::invalid_argument("no labeled nodes for the loss");
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    forward(model, adj, x, dropout_p, rng, &c);

    const int n = x.rows(), f = model.w1.rows(), h = model.w1.cols();
    const double inv_count = 1.0 / static_cast<double>(labeled_nodes.size());

    LossAndGradients out;
    ensure_shape(c.logits_grad, n, 2);
    c.logits_grad.fill(0.0);
    for (int u : labeled_nodes) {
        const int y = labels[u];
        if (y != 0 && y != 1)
            throw std::invalid_argument("labeled node " + std::to_string(u) + " has no label");
        out.loss -= std::log(std::max(c.probs(u, y), 1e-300)) * inv_count;
        c.logits_grad(u, 0) = (c.probs(u, 0) - (y == 0 ? 1.0 : 0.0)) * inv_count;
        c.logits_grad(u, 1) = (c.probs(u, 1) - (y == 1 ? 1.0 : 0.0)) * inv_count;
    }
    out.loss += 0.5 * weight_decay * (squared_norm(model.w1) + squared_norm(model.w2));

    // Both propagation layers use the same symmetric operator, so the
    // adjoint of z = adj * (hidden * W2) is adj itself. The propagated
    // gradient is nonzero only within one hop of a labeled node; every loop
    // below skips the zero rows.
    spmm(adj, c.logits_grad, c.propagated_grad);

    out.grads.b2.assign(2, 0.0);
    for (int u : labeled_nodes) {
        out.grads.b2[0] += c.logits_grad(u, 0);
        out.grads.b2[1] += c.logits_grad(u, 1);
    }

    ensure_shape(out.grads.w2, h, 2);
    ensure_shape(out.grads.w1, f, h);
    out.grads.b1.assign(h, 0.0);
    std::vector<double> w2_col0(h), w2_col1(h), row_grad(h);
    for (int j = 0; j < h; ++j) {
        w2_col0[j] = model.w2(j, 0);
        w2_col1[j] = model.w2(j, 1);
    }
    double* __restrict__ w1g = out.grads.w1.data();
    double* __restrict__ b1g = out.grads.b1.data();
    for (int u = 0; u < n; ++u) {
        const double a0 = c.propagated_grad(u, 0), a1 = c.propagated_grad(u, 1);
        if (a0 == 0.0 && a1 == 0.0) continue;
        const double* __restrict__ hrow = c.hidden.row(u);
        double* __restrict__ w2g = out.grads.w2.data();
        double* __restrict__ gh = row_grad.data();
        for (int j = 0; j < h; ++j) {
            w2g[2 * j] += hrow[j] * a0;
            w2g[2 * j + 1] += hrow[j] * a1;
            // hidden > 0 marks entries that passed both relu and dropout.
            gh[j] = hrow[j] > 0.0 ? (a0 * w2_col0[j] + a1 * w2_col1[j]) * c.keep_scale : 0.0;
            b1g[j] += gh[j];
        }
        const double* __restrict__ axrow = c.ax.row(u);
        for (int p = 0; p < f; ++p) {
            const double av = axrow[p];
            double* __restrict__ w1row = w1g + static_cast<std::size_t>(p) * h;
            for (int j = 0; j < h; ++j) w1row[j] += av * gh[j];
        }
    }
    for (std::size_t i = 0; i < out.grads.w2.size(); ++i)
        out.grads.w2.data()[i] += weight_decay * model.w2.data()[i];
    for (std::size_t i = 0; i < out.grads.w1.size(); ++i)
        out.grads.w1.data()[i] += weight_decay * model.w1.data()[i];
    return out;
}

namespace {

struct AdamState {
    GcnGradients m, v;
    int step = 0;

    explicit AdamState(const GcnModel& model) {
        m.w1 = Matrix(model.w1.rows(), model.w1.cols());
        m.w2 = Matrix(model.w2.rows(), model.w2.cols());
        m.b1.assign(model.b1.size(), 0.0);
        m.b2.assign(model.b2.size(), 0.0);
        v = m;
    }
};

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void adam_update(double* theta, const double* grad, double* m, double* v, std::size_t count,
                 double lr, int step) {
    const double bc1 = 1.0 - std::pow(kAdamBeta1, step);
    const double bc2 = 1.0 - std::pow(kAdamBeta2, step);
    for (std::size_t i = 0; i < count; ++i) {
        m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * grad[i];
        v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
        theta[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
    }
}

void adam_step(GcnModel& model, const GcnGradients& g, AdamState& state, double lr) {
    ++state.step;
    adam_update(model.w1.data(), g.w1.data(), state.m.w1.data(), state.v.w1.data(),
                model.w1.size(), lr, state.step);
    adam_update(model.w2.data(), g.w2.data(), state.m.w2.data(), state.v.w2.data(),
                model.w2.size(), lr, state.step);
    adam_update(model.b1.data(), g.b1.data(), state.m.b1.data(), state.v.b1.data(),
                model.b1.size(), lr, state.step);
    adam_update(model.b2.data(), g.b2.data(), state.m.b2.data(), state.v.b2.data(),
                model.b2.size(), lr, state.step);
}

GcnModel init_model(int input_dim, int hidden_dim, std::mt19937_64& rng) {
    GcnModel model;
    model.w1 = Matrix(input_dim, hidden_dim);
    model.w2 = Matrix(hidden_dim, 2);
    model.b1.assign(hidden_dim, 0.0);
    model.b2.assign(2, 0.0);
    const double limit1 = std::sqrt(6.0 / (input_dim + hidden_dim));
    const double limit2 = std::sqrt(6.0 / (hidden_dim + 2));
    std::uniform_real_distribution<double> u1(-limit1, limit1), u2(-limit2, limit2);
    for (std::size_t i = 0; i < model.w1.size(); ++i) model.w1.data()[i] = u1(rng);
    for (std::size_t i = 0; i < model.w2.size(); ++i) model.w2.data()[i] = u2(rng);
    return model;
}

double accuracy_on(const Matrix& probs, std::span<const int> nodes,
                   std::span<const std::int8_t> labels) {
    long correct = 0;
    for (int u : nodes) {
        const int pred = probs(u, 1) >= 0.5 ? 1 : 0;
        if (pred == labels[u]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

}  // namespace

TrainResult train_gcn(const AttributedGraph& g, const NormalizedAdjacency& adj,
                      std::span<const int> train_nodes, std::span<const int> val_nodes,
                      const TrainConfig& cfg) {
    cfg.validate();
    if (train_nodes.empty()) throw std::invalid_argument("training set is empty");
    bool has0 = false, has1 = false;
    for (int u : train_nodes) {
        if (g.labels()[u] == kUnknownLabel)
            throw std::invalid_argument("training node " + std::to_string(u) + " has no label");
        (g.labels()[u] == 0 ? has0 : has1) = true;
    }
    if (!has0 || !has1) throw std::invalid_argument("training set must contain both classes");
    if (cfg.selection == ModelSelection::BestValidation && val_nodes.empty())
        throw std::invalid_argument("best-validation selection needs a validation set");

    std::mt19937_64 rng(cfg.seed);
    GcnModel model = init_model(g.feature_count(), cfg.hidden_dim, rng);

    TrainResult result;
    result.log.reserve(cfg.epochs);
    AdamState adam(model);
    ForwardCache cache;
    GcnModel best_model;
    double best_val = -1.0;
    int best_epoch = -1;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        LossAndGradients lg;
        try {
            lg = loss_and_gradients(model, adj, g.features(), train_nodes, g.labels(),
                                    cfg.weight_decay, cfg.dropout, &rng, &cache);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(std::string(e.what()) + " at epoch " + std::to_string(epoch));
        }
        if (!std::isfinite(lg.loss))
            throw std::runtime_error("numerical divergence at epoch " + std::to_string(epoch));
        adam_step(model, lg.grads, adam, cfg.learning_rate);

        EpochLog entry;
        entry.loss = lg.loss;
        if (cfg.selection == ModelSelection::BestValidation) {
            const Matrix& probs = forward(model, adj, g.features(), 0.0, nullptr, &cache);
            entry.val_accuracy = accuracy_on(probs, val_nodes, g.labels());
            if (entry.val_accuracy > best_val) {  // ties keep the earliest epoch
                best_val = entry.val_accuracy;
                best_epoch = epoch;
                best_model = model;
            }
        }
        result.log.push_back(entry);
    }

    if (cfg.selection == ModelSelection::BestValidation) {
        result.model = std::move(best_model);
        result.selected_epoch = best_epoch;
    } else {
        result.model = std::move(model);
        result.selected_epoch = cfg.epochs - 1;
    }
    return result;
}

TrainResult train_gcn(const AttributedGraph& g, std::span<const int> train_nodes,
                      std::span<const int> val_nodes, const TrainConfig& cfg) {
    return train_gcn(g, normalize_adjacency(g), train_nodes, val_nodes, cfg);
}

Predictions predict(const GcnModel& model, const NormalizedAdjacency& adj, const Matrix& x) {
    const Matrix probs = forward(model, adj, x);
    Predictions out;
    out.prob_class1.resize(x.rows());
    out.labels.resize(x.rows());
    for (int u = 0; u < x.rows(); ++u) {
        out.prob_class1[u] = probs(u, 1);
        out.labels[u] = probs(u, 1) >= 0.5 ? 1 : 0;
    }
    return out;
}

Predictions predict(const GcnModel& model, const AttributedGraph& g) {
    return predict(model, normalize_adjacency(g), g.features());
}

std::vector<std::int8_t> surrogate_complete_labels(const AttributedGraph& g,
                                                   std::span<const int> known,
                                                   const TrainConfig& cfg) {
    if (known.empty()) throw std::invalid_argument("surrogate needs at least one labeled node");
    std::vector<bool> is_known(g.node_count(), false);
    for (int u : known) {
        if (g.labels()[u] == kUnknownLabel)
            throw std::invalid_argument("node " + std::to_string(u) +
                                        " is in the labeled set but has no label");
        is_known[u] = true;
    }
    std::vector<std::int8_t> completed(g.labels());
    if (static_cast<long>(known.size()) == g.node_count()) return completed;

    const TrainResult trained = train_gcn(g, known, {}, cfg);
    const Predictions preds = predict(trained.model, g);
    for (int u = 0; u < g.node_count(); ++u) {
        if (!is_known[u]) completed[u] = preds.labels[u];
    }
    return completed;
}

void save_checkpoint(const std::string& path, const GcnModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint file " + path);
    out << "gcn-checkpoint v1\n";
    out << model.w1.rows() << " " << model.w1.cols() << "\n";
    char buf[64];
    auto write_values = [&](const double* values, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
            out << buf << (i + 1 == count ? '\n' : ' ');
        }
    };
    write_values(model.w1.data(), model.w1.size());
    write_values(model.b1.data(), model.b1.size());
    write_values(model.w2.data(), model.w2.size());
    write_values(model.b2.data(), model.b2.size());
    if (!out) throw std::runtime_error("failed while writing checkpoint " + path);
}

GcnModel load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint file " + path);
    std::string header;
    std::getline(in, header);
    if (header != "gcn-checkpoint v1")
        throw std::runtime_error("checkpoint version mismatch in " + path + ": got '" + header +
                                 "'");
    int f = 0, h = 0;
    if (!(in >> f >> h) || f < 1 || h < 1)
        throw std::runtime_error("checkpoint " + path + " has invalid dimensions");
    GcnModel model;
    model.w1 = Matrix(f, h);
    model.w2 = Matrix(h, 2);
    model.b1.assign(h, 0.0);
    model.b2.assign(2, 0.0);
    auto read_values = [&](double* values, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            if (!(in >> values[i]))
                throw std::runtime_error("checkpoint " + path + " is truncated");
        }
    };
    read_values(model.w1.data(), model.w1.size());
    read_values(model.b1.data(), model.b1.size());
    read_values(model.w2.data(), model.w2.size());
    read_values(model.b2.data(), model.b2.size());
    return model;
}

}  // namespace falab
