#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "falab/graph.hpp"
#include "falab/matrix.hpp"

namespace falab {

/// Two-layer graph convolutional classifier for binary labels.
struct GcnModel {
    Matrix w1;  // F x H
    Matrix w2;  // H x 2
    std::vector<double> b1;
    std::vector<double> b2;

    int input_dim() const { return w1.rows(); }
    int hidden_dim() const { return w1.cols(); }
};

enum class ModelSelection { FinalEpoch, BestValidation };

struct TrainConfig {
    int epochs = 500;
    double learning_rate = 0.001;
    double weight_decay = 5e-4;
    double dropout = 0.6;
    int hidden_dim = 64;
    // How callers carve labeled nodes into train/val/test.
    double train_fraction = 0.5;
    double val_fraction = 0.25;
    double test_fraction = 0.25;
    ModelSelection selection = ModelSelection::BestValidation;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Victim defaults for loaded datasets: lr 0.001, 50/25/25 splits,
/// checkpoint picked by validation accuracy.
TrainConfig empirical_victim_config();

/// Victim defaults for the synthetic benchmark: no validation split, final
/// epoch kept, lr raised to 0.01 so 20 labels converge within 500 epochs.
TrainConfig synthetic_victim_config();

/// The attacker's label-completion model: first hidden layer of 16, lr 0.01,
/// weight decay 5e-4, dropout 0.5.
TrainConfig surrogate_config();

struct Predictions {
    std::vector<double> prob_class1;   // in [0, 1]
    std::vector<std::int8_t> labels;   // 1 iff prob_class1 >= 0.5
};

/// Activations cached by forward() so the backward pass can reuse them, plus
/// scratch buffers that survive across epochs. The propagated features ax
/// survive across calls on the same graph.
struct ForwardCache {
    Matrix ax;          // adj * X
    Matrix pre_hidden;  // ax * W1 + b1
    Matrix hidden;      // dropout(relu(pre_hidden)); nonzeros already carry the keep scale
    double keep_scale = 1.0;
    Matrix probs;
    Matrix hidden_out, logits;           // forward scratch
    Matrix logits_grad, propagated_grad; // backward scratch
};

/// Row-wise class probabilities. With dropout_p > 0 an rng must be supplied
/// and inverted-scale dropout is applied to the hidden layer.
Matrix forward(const GcnModel& model, const NormalizedAdjacency& adj, const Matrix& x,
               double dropout_p = 0.0, std::mt19937_64* rng = nullptr,
               ForwardCache* cache = nullptr);

struct GcnGradients {
    Matrix w1, w2;
    std::vector<double> b1, b2;
};

struct LossAndGradients {
    double loss = 0.0;
    GcnGradients grads;
};

/// Mean cross-entropy over the labeled nodes plus L2 decay on both weight
/// matrices (biases excluded), with analytical gradients through both
/// propagation layers.
LossAndGradients loss_and_gradients(const GcnModel& model, const NormalizedAdjacency& adj,
                                    const Matrix& x, std::span<const int> labeled_nodes,
                                    std::span<const std::int8_t> labels, double weight_decay,
                                    double dropout_p = 0.0, std::mt19937_64* rng = nullptr,
                                    ForwardCache* cache = nullptr);

struct EpochLog {
    double loss = 0.0;
    double val_accuracy = -1.0;  // -1 when not evaluated
};

struct TrainResult {
    GcnModel model;
    std::vector<EpochLog> log;
    int selected_epoch = -1;
};

/// Adam training loop. Under BestValidation the checkpoint with the highest
/// validation accuracy wins, earliest epoch on ties; FinalEpoch keeps the
/// last state. Deterministic per cfg.seed.
TrainResult train_gcn(const AttributedGraph& g, const NormalizedAdjacency& adj,
                      std::span<const int> train_nodes, std::span<const int> val_nodes,
                      const TrainConfig& cfg);

TrainResult train_gcn(const AttributedGraph& g, std::span<const int> train_nodes,
                      std::span<const int> val_nodes, const TrainConfig& cfg);

Predictions predict(const GcnModel& model, const NormalizedAdjacency& adj, const Matrix& x);
Predictions predict(const GcnModel& model, const AttributedGraph& g);

/// Label completion for the grey-box attacker: ground truth on the nodes in
/// `known`, surrogate predictions everywhere else. Skips training when
/// `known` covers the whole graph.
std::vector<std::int8_t> surrogate_complete_labels(const AttributedGraph& g,
                                                   std::span<const int> known,
                                                   const TrainConfig& cfg = surrogate_config());

void save_checkpoint(const std::string& path, const GcnModel& model);
GcnModel load_checkpoint(const std::string& path);

}  // namespace falab
