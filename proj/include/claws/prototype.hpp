#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace claws {

/// Chain of affine maps z = W x + b (no activations). Weights are out x in.
struct AffineStack {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  /// Rows of `x` are samples; returns one encoded row per sample.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  Eigen::Index parameter_count() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& params);
};

/// in -> 16 -> 8 -> 16 -> n_classes, PyTorch-style uniform(+-1/sqrt(fan_in)) init.
AffineStack make_prototype_encoder(Eigen::Index in_dim, int n_classes, std::uint64_t seed);

struct PrototypeModel {
  int n_classes = 3;
  Eigen::MatrixXd centroids;  // n_classes x dim, in encoded space when encoder is set
  std::optional<AffineStack> encoder;
  std::uint64_t seed_used = 0;
  double train_macro_f1 = 0.0;

  Eigen::Index input_dim() const {
    return encoder ? encoder->weights.front().cols() : centroids.cols();
  }
};

struct PrototypeConfig {
  bool use_encoder = false;
  std::vector<std::uint64_t> seeds;  // empty: seeds 0..19
  int epochs = 200;
  double lr = 0.01;
};

/// Without encoder: per-class means of the raw features. With encoder: one
/// training run per seed on the prototypical objective, keeping the seed with
/// the best training macro F1 (earlier seed on ties).
PrototypeModel fit_prototype(const Eigen::MatrixXd& features, std::span<const int> labels,
                             int n_classes, const PrototypeConfig& cfg = {});

struct PrototypePrediction {
  int label = 0;
  Eigen::VectorXd class_scores;  // negative Euclidean distance per class
};

/// Nearest centroid; equal distances resolve to the lower class index.
PrototypePrediction predict_prototype(const PrototypeModel& model, const Eigen::VectorXd& feature);

/// Mean cross-entropy of softmax(-||z_i - mu_c||^2) where z = encoder(x) and
/// mu_c are the per-class means of z. Fills `grad` (flattened like the stack).
double prototype_objective(const AffineStack& encoder, const Eigen::MatrixXd& features,
                           std::span<const int> labels, int n_classes,
                           Eigen::VectorXd* grad = nullptr);

}  // namespace claws
