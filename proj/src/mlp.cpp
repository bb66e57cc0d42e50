#include "claws/mlp.hpp"

#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "claws/adam.hpp"
#include "claws/error.hpp"
#include "claws/metrics.hpp"

namespace claws {

Eigen::Index MlpModel::parameter_count() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < 3; ++l) n += weights[l].size() + biases[l].size();
  return n;
}

Eigen::VectorXd MlpModel::flatten() const {
  Eigen::VectorXd out(parameter_count());
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < 3; ++l) {
    out.segment(pos, weights[l].size()) = weights[l].reshaped();
    pos += weights[l].size();
    out.segment(pos, biases[l].size()) = biases[l];
    pos += biases[l].size();
  }
  return out;
}

void MlpModel::unflatten(const Eigen::VectorXd& params) {
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < 3; ++l) {
    weights[l].reshaped() = params.segment(pos, weights[l].size());
    pos += weights[l].size();
    biases[l] = params.segment(pos, biases[l].size());
    pos += biases[l].size();
  }
}

MlpModel init_mlp(Eigen::Index in_dim, int n_classes, const MlpConfig& cfg) {
  if (cfg.hidden[0] < 1 || cfg.hidden[1] < 1)
    throw Error(ErrorCode::InvalidConfig, "hidden widths must be >= 1");
  MlpModel model;
  model.n_classes = n_classes;
  model.config = cfg;
  const std::array<Eigen::Index, 4> dims{in_dim, cfg.hidden[0], cfg.hidden[1], n_classes};
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t l = 0; l < 3; ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    std::uniform_real_distribution<double> u(-bound, bound);
    model.weights[l].resize(dims[l + 1], dims[l]);
    for (Eigen::Index i = 0; i < model.weights[l].size(); ++i) model.weights[l].data()[i] = u(rng);
    model.biases[l].resize(dims[l + 1]);
    for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) model.biases[l](i) = u(rng);
  }
  model.class_weights = Eigen::VectorXd::Ones(n_classes);
  return model;
}

Eigen::VectorXd balanced_class_weights(std::span<const int> labels, int n_classes) {
  Eigen::VectorXd count = Eigen::VectorXd::Zero(n_classes);
  for (int y : labels) count(y) += 1.0;
  const double n = static_cast<double>(labels.size());
  Eigen::VectorXd w(n_classes);
  for (int c = 0; c < n_classes; ++c) w(c) = count(c) > 0 ? n / (n_classes * count(c)) : 0.0;
  return w;
}

namespace {

struct Forward {
  Eigen::MatrixXd h1, h2, log_prob;
};

Forward forward(const MlpModel& m, const Eigen::MatrixXd& x) {
  Forward f;
  f.h1 = ((x * m.weights[0].transpose()).rowwise() + m.biases[0].transpose()).array().tanh();
  f.h2 = ((f.h1 * m.weights[1].transpose()).rowwise() + m.biases[1].transpose()).array().tanh();
  Eigen::MatrixXd logits = (f.h2 * m.weights[2].transpose()).rowwise() + m.biases[2].transpose();
  const Eigen::VectorXd peak = logits.rowwise().maxCoeff();
  logits.colwise() -= peak;
  const Eigen::VectorXd lse = logits.array().exp().rowwise().sum().log();
  logits.colwise() -= lse;
  f.log_prob = std::move(logits);
  return f;
}

void check_dims(const MlpModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.input_dim())
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("feature has {} values, model expects {}", x.cols(), model.input_dim()));
}

}  // namespace

Eigen::MatrixXd mlp_probabilities(const MlpModel& model, const Eigen::MatrixXd& x) {
  check_dims(model, x);
  return forward(model, x).log_prob.array().exp();
}

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, std::span<const int> labels,
                const Eigen::VectorXd& class_weights, Eigen::VectorXd* grad) {
  check_dims(model, x);
  const Forward f = forward(model, x);
  const Eigen::Index n = x.rows();
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = class_weights(labels[i]);
  const double w_total = w.sum();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) loss -= w(i) * f.log_prob(i, labels[i]);
  loss /= w_total;
  if (!grad) return loss;

  Eigen::MatrixXd d_logits = f.log_prob.array().exp();
  for (Eigen::Index i = 0; i < n; ++i) d_logits(i, labels[i]) -= 1.0;
  d_logits.array().colwise() *= (w / w_total).array();

  const Eigen::MatrixXd d_z2 =
      (d_logits * model.weights[2]).array() * (1.0 - f.h2.array().square());
  const Eigen::MatrixXd d_z1 = (d_z2 * model.weights[1]).array() * (1.0 - f.h1.array().square());

  const std::array<Eigen::MatrixXd, 3> dw{d_z1.transpose() * x, d_z2.transpose() * f.h1,
                                          d_logits.transpose() * f.h2};
  const std::array<Eigen::VectorXd, 3> db{d_z1.colwise().sum().transpose(),
                                          d_z2.colwise().sum().transpose(),
                                          d_logits.colwise().sum().transpose()};
  grad->resize(model.parameter_count());
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < 3; ++l) {
    grad->segment(pos, dw[l].size()) = dw[l].reshaped();
    pos += dw[l].size();
    grad->segment(pos, db[l].size()) = db[l];
    pos += db[l].size();
  }
  return loss;
}

MlpModel fit_mlp(const Eigen::MatrixXd& features, std::span<const int> labels, int n_classes,
                 const MlpConfig& cfg) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} feature rows vs {} labels", features.rows(), labels.size()));
  if (!features.allFinite()) throw Error(ErrorCode::NonFiniteScore, "non-finite feature");
  std::set<int> present;
  for (int y : labels) {
    if (y < 0 || y >= n_classes)
      throw Error(ErrorCode::DimensionMismatch, fmt::format("label {} out of range", y));
    present.insert(y);
  }
  if (present.size() < 2) throw Error(ErrorCode::SingleClassInput, "need at least two classes");

  MlpModel model = init_mlp(features.cols(), n_classes, cfg);
  model.class_weights = balanced_class_weights(labels, n_classes);
  Eigen::VectorXd params = model.flatten();
  Adam adam(params.size(), cfg.lr);
  Eigen::VectorXd grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    model.loss_history.push_back(mlp_loss(model, features, labels, model.class_weights, &grad));
    adam.step(params, grad);
    model.unflatten(params);
  }
  model.loss_history.push_back(mlp_loss(model, features, labels, model.class_weights));

  std::vector<int> preds(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    preds[i] = predict_mlp(model, features.row(static_cast<Eigen::Index>(i)).transpose()).label;
  model.train_macro_f1 = macro_f1(confusion_matrix(preds, labels, n_classes));
  return model;
}

MlpPrediction predict_mlp(const MlpModel& model, const Eigen::VectorXd& feature) {
  MlpPrediction out;
  out.probabilities = mlp_probabilities(model, feature.transpose()).row(0).transpose();
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < out.probabilities.size(); ++c)
    if (out.probabilities(c) > out.probabilities(best)) best = c;
  out.label = static_cast<int>(best);
  return out;
}

}  // namespace claws
