#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "claws/error.hpp"
#include "claws/mlp.hpp"
#include "support.hpp"

namespace claws {
namespace {

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

/// Two well separated 2-D clouds, labels 0 and 1.
void separable(std::mt19937_64& rng, Eigen::MatrixXd& x, std::vector<int>& y, int per_class) {
  x = 0.3 * gaussian(rng, 2 * per_class, 2);
  y.assign(2 * per_class, 0);
  for (int i = 0; i < per_class; ++i) {
    x.row(i) += Eigen::RowVector2d(-2.0, -2.0);
    x.row(per_class + i) += Eigen::RowVector2d(2.0, 2.0);
    y[per_class + i] = 1;
  }
}

TEST(Mlp, ParameterCount) {
  const MlpModel m = init_mlp(5, 3, {});
  EXPECT_EQ(m.parameter_count(), 5 * 8 + 8 + 8 * 8 + 8 + 8 * 3 + 3);
  EXPECT_EQ(init_mlp(5, 3, {.hidden = {10, 5}}).parameter_count(), 133);
  EXPECT_EQ(m.flatten().size(), m.parameter_count());
  MlpModel copy = m;
  copy.unflatten(m.flatten());
  EXPECT_EQ(copy.flatten(), m.flatten());
}

TEST(Mlp, SeparableDataReachesFullTrainingAccuracy) {
  std::mt19937_64 rng(12);
  Eigen::MatrixXd x;
  std::vector<int> y;
  separable(rng, x, y, 30);
  MlpConfig cfg;
  cfg.lr = 0.1;
  const MlpModel m = fit_mlp(x, y, 2, cfg);
  ASSERT_EQ(m.loss_history.size(), 11u);
  EXPECT_LE(m.loss_history.back(), m.loss_history.front());
  int correct = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    correct += predict_mlp(m, x.row(i).transpose()).label == y[i];
  EXPECT_EQ(correct, x.rows());
  EXPECT_DOUBLE_EQ(m.train_macro_f1, 1.0);
}

TEST(Mlp, SameSeedIsBitIdentical) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd x = gaussian(rng, 30, 4);
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) y[i] = i % 3;
  MlpConfig cfg;
  cfg.seed = 9;
  cfg.epochs = 25;
  const MlpModel a = fit_mlp(x, y, 3, cfg);
  const MlpModel b = fit_mlp(x, y, 3, cfg);
  EXPECT_EQ(a.flatten(), b.flatten());
  EXPECT_EQ(a.loss_history, b.loss_history);
  cfg.seed = 10;
  EXPECT_NE(fit_mlp(x, y, 3, cfg).flatten(), a.flatten());
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd x = gaussian(rng, 3, 5);
  const std::vector<int> y{0, 2, 1};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    MlpConfig cfg;
    cfg.seed = seed;
    MlpModel m = init_mlp(5, 3, cfg);
    Eigen::VectorXd w(3);
    w << 0.5, 1.0, 2.0;
    Eigen::VectorXd grad;
    mlp_loss(m, x, y, w, &grad);
    const Eigen::VectorXd numeric = testing::central_difference(
        [&](const Eigen::VectorXd& p) {
          MlpModel probe = m;
          probe.unflatten(p);
          return mlp_loss(probe, x, y, w);
        },
        m.flatten(), 1e-5);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < grad.size(); ++i)
      worst = std::max(worst, testing::gradient_rel_err(grad(i), numeric(i)));
    EXPECT_LE(worst, 1e-4) << "seed " << seed;
  }
}

TEST(Mlp, ZeroWeightsGiveUniformProbabilities) {
  MlpModel m = init_mlp(4, 3, {});
  m.unflatten(Eigen::VectorXd::Zero(m.parameter_count()));
  const MlpPrediction p = predict_mlp(m, Eigen::VectorXd::Constant(4, 0.7));
  EXPECT_EQ(p.label, 0);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(p.probabilities(c), 1.0 / 3.0, 1e-15);
}

TEST(Mlp, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(3);
  const MlpModel m = init_mlp(6, 3, {.hidden = {8, 8}, .epochs = 10, .lr = 0.001, .seed = 4});
  const Eigen::MatrixXd x = 50.0 * gaussian(rng, 200, 6);
  const Eigen::MatrixXd p = mlp_probabilities(m, x);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-6);
    EXPECT_GE(p.row(i).minCoeff(), 0.0);
  }
}

TEST(Mlp, ForwardPassMatchesScalarLoops) {
  std::mt19937_64 rng(6);
  const MlpModel m = init_mlp(3, 2, {.hidden = {4, 3}, .epochs = 1, .lr = 0.1, .seed = 1});
  const Eigen::MatrixXd x = gaussian(rng, 5, 3);
  const Eigen::MatrixXd p = mlp_probabilities(m, x);
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    std::vector<double> cur;
    for (Eigen::Index j = 0; j < 3; ++j) cur.push_back(x(n, j));
    for (int l = 0; l < 3; ++l) {
      std::vector<double> next(m.weights[l].rows());
      for (Eigen::Index o = 0; o < m.weights[l].rows(); ++o) {
        double z = m.biases[l](o);
        for (Eigen::Index i = 0; i < m.weights[l].cols(); ++i) z += m.weights[l](o, i) * cur[i];
        next[o] = l < 2 ? std::tanh(z) : z;
      }
      cur = next;
    }
    const double denom = std::exp(cur[0]) + std::exp(cur[1]);
    EXPECT_NEAR(p(n, 0), std::exp(cur[0]) / denom, 1e-12);
    EXPECT_NEAR(p(n, 1), std::exp(cur[1]) / denom, 1e-12);
  }
}

TEST(Mlp, ClassWeights) {
  const std::vector<int> y{0, 0, 0, 1};
  const Eigen::VectorXd w = balanced_class_weights(y, 3);
  EXPECT_DOUBLE_EQ(w(0), 4.0 / 9.0);  // N / (|classes| N_c)
  EXPECT_DOUBLE_EQ(w(1), 4.0 / 3.0);
  EXPECT_EQ(w(2), 0.0);
}

TEST(Mlp, Errors) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
  EXPECT_THROW(fit_mlp(x, std::vector<int>{0, 1}, 2), Error);
  try {
    fit_mlp(x, std::vector<int>{1, 1, 1, 1}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClassInput);
  }
  const MlpModel m = init_mlp(2, 2, {});
  try {
    predict_mlp(m, Eigen::VectorXd::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

}  // namespace
}  // namespace claws
