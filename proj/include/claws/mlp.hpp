#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace claws {

struct MlpConfig {
  std::array<int, 2> hidden{8, 8};
  int epochs = 10;
  double lr = 0.001;
  std::uint64_t seed = 0;
};

/// in -> hidden[0] -> hidden[1] -> n_classes with tanh after the two hidden layers
/// and a softmax head. Weights are out x in.
struct MlpModel {
  int n_classes = 3;
  std::array<Eigen::MatrixXd, 3> weights;
  std::array<Eigen::VectorXd, 3> biases;
  Eigen::VectorXd class_weights;
  MlpConfig config;
  std::vector<double> loss_history;  // loss before each epoch, then final
  double train_macro_f1 = 0.0;

  Eigen::Index input_dim() const { return weights[0].cols(); }
  Eigen::Index parameter_count() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& params);
};

MlpModel init_mlp(Eigen::Index in_dim, int n_classes, const MlpConfig& cfg);

/// Class weight N / (C * N_c) for present classes, 0 for absent ones.
Eigen::VectorXd balanced_class_weights(std::span<const int> labels, int n_classes);

/// Row-wise softmax probabilities for each sample (rows of `x`).
Eigen::MatrixXd mlp_probabilities(const MlpModel& model, const Eigen::MatrixXd& x);

/// Class-weighted cross-entropy: sum_i w_{y_i} CE_i / sum_i w_{y_i}. Fills
/// `grad` with the gradient in flatten() order when non-null.
double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, std::span<const int> labels,
                const Eigen::VectorXd& class_weights, Eigen::VectorXd* grad = nullptr);

/// Full-batch Adam on the weighted cross-entropy; one step per epoch.
MlpModel fit_mlp(const Eigen::MatrixXd& features, std::span<const int> labels, int n_classes,
                 const MlpConfig& cfg = {});

struct MlpPrediction {
  int label = 0;
  Eigen::VectorXd probabilities;
};

/// Argmax of the softmax; ties resolve to the lower class index.
MlpPrediction predict_mlp(const MlpModel& model, const Eigen::VectorXd& feature);

}  // namespace claws
