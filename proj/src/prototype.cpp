#include "claws/prototype.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "claws/adam.hpp"
#include "claws/error.hpp"
#include "claws/metrics.hpp"

namespace claws {

Eigen::MatrixXd AffineStack::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights.size(); ++l)
    a = ((a * weights[l].transpose()).rowwise() + biases[l].transpose()).eval();
  return a;
}

Eigen::Index AffineStack::parameter_count() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

Eigen::VectorXd AffineStack::flatten() const {
  Eigen::VectorXd out(parameter_count());
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.segment(pos, weights[l].size()) = weights[l].reshaped();
    pos += weights[l].size();
    out.segment(pos, biases[l].size()) = biases[l];
    pos += biases[l].size();
  }
  return out;
}

void AffineStack::unflatten(const Eigen::VectorXd& params) {
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l].reshaped() = params.segment(pos, weights[l].size());
    pos += weights[l].size();
    biases[l] = params.segment(pos, biases[l].size());
    pos += biases[l].size();
  }
}

AffineStack make_prototype_encoder(Eigen::Index in_dim, int n_classes, std::uint64_t seed) {
  const std::array<Eigen::Index, 5> dims{in_dim, 16, 8, 16, n_classes};
  std::mt19937_64 rng(seed);
  AffineStack stack;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd w(dims[l + 1], dims[l]);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
    Eigen::VectorXd b(dims[l + 1]);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = u(rng);
    stack.weights.push_back(std::move(w));
    stack.biases.push_back(std::move(b));
  }
  return stack;
}

namespace {

void check_inputs(const Eigen::MatrixXd& features, std::span<const int> labels, int n_classes) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} feature rows vs {} labels", features.rows(), labels.size()));
  if (!features.allFinite()) throw Error(ErrorCode::NonFiniteScore, "non-finite feature");
  std::vector<int> count(n_classes, 0);
  for (int y : labels) {
    if (y < 0 || y >= n_classes)
      throw Error(ErrorCode::DimensionMismatch, fmt::format("label {} out of range", y));
    ++count[y];
  }
  for (int c = 0; c < n_classes; ++c)
    if (count[c] == 0) throw Error(ErrorCode::EmptyClass, fmt::format("class {} has no samples", c));
}

Eigen::MatrixXd class_means(const Eigen::MatrixXd& z, std::span<const int> labels, int n_classes,
                            Eigen::VectorXd* counts = nullptr) {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(n_classes, z.cols());
  Eigen::VectorXd n = Eigen::VectorXd::Zero(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    means.row(labels[i]) += z.row(static_cast<Eigen::Index>(i));
    n(labels[i]) += 1.0;
  }
  means.array().colwise() /= n.array();
  if (counts) *counts = n;
  return means;
}

int nearest(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& z, Eigen::VectorXd& scores) {
  scores.resize(centroids.rows());
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double dist = (centroids.row(c) - z).norm();
    scores(c) = -dist;
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(c);
    }
  }
  return best;
}

double training_macro_f1(const Eigen::MatrixXd& encoded, const Eigen::MatrixXd& centroids,
                         std::span<const int> labels, int n_classes) {
  std::vector<int> preds(labels.size());
  Eigen::VectorXd scratch;
  for (std::size_t i = 0; i < labels.size(); ++i)
    preds[i] = nearest(centroids, encoded.row(static_cast<Eigen::Index>(i)), scratch);
  return macro_f1(confusion_matrix(preds, labels, n_classes));
}

}  // namespace

double prototype_objective(const AffineStack& encoder, const Eigen::MatrixXd& features,
                           std::span<const int> labels, int n_classes, Eigen::VectorXd* grad) {
  const auto N = static_cast<double>(features.rows());
  const std::size_t L = encoder.weights.size();
  std::vector<Eigen::MatrixXd> acts{features};
  for (std::size_t l = 0; l < L; ++l)
    acts.push_back((acts.back() * encoder.weights[l].transpose()).rowwise() +
                   encoder.biases[l].transpose());
  const Eigen::MatrixXd& z = acts.back();

  Eigen::VectorXd counts;
  const Eigen::MatrixXd mu = class_means(z, labels, n_classes, &counts);

  // Squared distances to every class mean.
  Eigen::MatrixXd dist(z.rows(), n_classes);
  for (int c = 0; c < n_classes; ++c)
    dist.col(c) = (z.rowwise() - mu.row(c)).rowwise().squaredNorm();

  Eigen::MatrixXd prob(z.rows(), n_classes);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Eigen::RowVectorXd logits = -dist.row(i);
    const double peak = logits.maxCoeff();
    const double lse = peak + std::log((logits.array() - peak).exp().sum());
    prob.row(i) = (logits.array() - lse).exp();
    loss -= logits(labels[i]) - lse;
  }
  loss /= N;
  if (!grad) return loss;

  // G = dL/dD.
  Eigen::MatrixXd g = -prob;
  for (Eigen::Index i = 0; i < z.rows(); ++i) g(i, labels[i]) += 1.0;
  g /= N;

  Eigen::MatrixXd dz = 2.0 * (z.array().colwise() * g.rowwise().sum().array()).matrix() - 2.0 * g * mu;
  Eigen::MatrixXd dmu = -2.0 * (g.transpose() * z - (mu.array().colwise() * g.colwise().sum().transpose().array()).matrix());
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    dz.row(i) += dmu.row(labels[i]) / counts(labels[i]);

  std::vector<Eigen::MatrixXd> dw(L);
  std::vector<Eigen::VectorXd> db(L);
  Eigen::MatrixXd upstream = dz;
  for (std::size_t l = L; l-- > 0;) {
    dw[l] = upstream.transpose() * acts[l];
    db[l] = upstream.colwise().sum().transpose();
    upstream = (upstream * encoder.weights[l]).eval();
  }
  grad->resize(encoder.parameter_count());
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < L; ++l) {
    grad->segment(pos, dw[l].size()) = dw[l].reshaped();
    pos += dw[l].size();
    grad->segment(pos, db[l].size()) = db[l];
    pos += db[l].size();
  }
  return loss;
}

PrototypeModel fit_prototype(const Eigen::MatrixXd& features, std::span<const int> labels,
                             int n_classes, const PrototypeConfig& cfg) {
  check_inputs(features, labels, n_classes);
  PrototypeModel model;
  model.n_classes = n_classes;
  if (!cfg.use_encoder) {
    model.centroids = class_means(features, labels, n_classes);
    model.train_macro_f1 = training_macro_f1(features, model.centroids, labels, n_classes);
    return model;
  }

  std::vector<std::uint64_t> seeds = cfg.seeds;
  if (seeds.empty())
    for (std::uint64_t s = 0; s < 20; ++s) seeds.push_back(s);

  model.train_macro_f1 = -1.0;
  for (std::uint64_t seed : seeds) {
    AffineStack stack = make_prototype_encoder(features.cols(), n_classes, seed);
    Eigen::VectorXd params = stack.flatten();
    Adam adam(params.size(), cfg.lr);
    Eigen::VectorXd grad;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      prototype_objective(stack, features, labels, n_classes, &grad);
      adam.step(params, grad);
      stack.unflatten(params);
    }
    const Eigen::MatrixXd encoded = stack.forward(features);
    Eigen::MatrixXd centroids = class_means(encoded, labels, n_classes);
    const double f1 = training_macro_f1(encoded, centroids, labels, n_classes);
    if (f1 > model.train_macro_f1) {
      model.train_macro_f1 = f1;
      model.centroids = std::move(centroids);
      model.encoder = std::move(stack);
      model.seed_used = seed;
    }
  }
  return model;
}

PrototypePrediction predict_prototype(const PrototypeModel& model, const Eigen::VectorXd& feature) {
  if (feature.size() != model.input_dim())
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("feature has {} values, model expects {}", feature.size(),
                            model.input_dim()));
  Eigen::RowVectorXd z = feature.transpose();
  if (model.encoder) z = model.encoder->forward(z);
  PrototypePrediction out;
  out.label = nearest(model.centroids, z, out.class_scores);
  return out;
}

}  // namespace claws
