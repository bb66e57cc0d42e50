#include <gtest/gtest.h>

#include <random>

#include "claws/error.hpp"
#include "claws/threshold.hpp"
#include "support.hpp"

namespace claws {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

ErrorCode fit_error(const Eigen::VectorXd& s, const std::vector<int>& y, int C) {
  try {
    fit_threshold(s, y, C);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Empty;
}

TEST(ThresholdGrid, Definition) {
  const auto g = threshold_grid(1.0, 3.0, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 1.5);
  EXPECT_DOUBLE_EQ(g[3], 2.5);
  const auto flat = threshold_grid(2.0, 2.0, 2);
  EXPECT_DOUBLE_EQ(flat[1], 2.5);
}

TEST(FitThreshold, SeparableTwoClass) {
  const std::vector<int> y{0, 0, 1, 1};
  const ThresholdModel m = fit_threshold(vec({0.1, 0.2, 0.8, 0.9}), y, 2);
  EXPECT_DOUBLE_EQ(m.train_macro_f1, 1.0);
  ASSERT_EQ(m.cuts.size(), 1u);
  EXPECT_GE(m.cuts[0], 0.2);  // 0.2 itself is a valid cut: equal goes left
  EXPECT_LT(m.cuts[0], 0.8);
  EXPECT_EQ(m.region_labels, (std::vector<int>{0, 1}));

  const ThresholdModel flipped = fit_threshold(vec({0.1, 0.2, 0.8, 0.9}), std::vector<int>{1, 1, 0, 0}, 2);
  EXPECT_DOUBLE_EQ(flipped.train_macro_f1, 1.0);
  EXPECT_EQ(flipped.region_labels, (std::vector<int>{1, 0}));
}

TEST(FitThreshold, SeparableThreeClass) {
  const std::vector<int> y{0, 0, 1, 2, 2};
  const ThresholdModel m = fit_threshold(vec({0.0, 0.1, 0.5, 0.9, 1.0}), y, 3);
  EXPECT_DOUBLE_EQ(m.train_macro_f1, 1.0);
  ASSERT_EQ(m.cuts.size(), 2u);
  EXPECT_GE(m.cuts[0], 0.1);
  EXPECT_LT(m.cuts[0], 0.5);
  EXPECT_GE(m.cuts[1], 0.5);
  EXPECT_LT(m.cuts[1], 0.9);
  EXPECT_EQ(m.region_labels, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(predict_threshold(m, 0.05), 0);
  EXPECT_EQ(predict_threshold(m, 0.5), 1);
  EXPECT_EQ(predict_threshold(m, 0.95), 2);
}

TEST(PredictThreshold, RegionRule) {
  ThresholdModel two;
  two.cuts = {0.5};
  two.region_labels = {0, 1};
  EXPECT_EQ(predict_threshold(two, 0.3), 0);
  EXPECT_EQ(predict_threshold(two, 0.5), 0);
  EXPECT_EQ(predict_threshold(two, std::nextafter(0.5, 1.0)), 1);

  ThresholdModel three;
  three.n_classes = 3;
  three.cuts = {0.3, 0.7};
  three.region_labels = {0, 1, 2};
  EXPECT_EQ(predict_threshold(three, 0.9), 2);
  EXPECT_EQ(predict_threshold(three, 0.7), 1);
  EXPECT_EQ(predict_threshold(three, 0.3), 0);
  EXPECT_THROW(predict_threshold(three, std::nan("")), Error);
}

TEST(Surrogate, ArgmaxAgreesWithPrediction) {
  ThresholdModel m;
  m.n_classes = 3;
  m.cuts = {0.3, 0.7};
  m.region_labels = {2, 0, 1};
  for (double s = -0.5; s < 1.5; s += 0.0137) {
    const Eigen::VectorXd sc = threshold_surrogate_scores(m, s);
    Eigen::Index best = 0;
    sc.maxCoeff(&best);
    EXPECT_EQ(best, predict_threshold(m, s)) << s;
  }
}

struct Dataset {
  std::vector<double> scores;
  std::vector<int> labels;
};

Dataset noisy_dataset(std::mt19937_64& rng, int C, int n) {
  std::normal_distribution<double> noise(0.0, 0.8);
  std::uniform_int_distribution<int> cls(0, C - 1);
  Dataset d;
  for (int i = 0; i < n; ++i) {
    const int y = i < C ? i : cls(rng);
    d.labels.push_back(y);
    d.scores.push_back(y + noise(rng));
  }
  return d;
}

TEST(FitThreshold, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(31337);
  for (int rep = 0; rep < 12; ++rep) {
    const int C = rep % 2 == 0 ? 2 : 3;
    const int intervals = C == 2 ? 200 : 40;
    const Dataset d = noisy_dataset(rng, C, 20 + 3 * rep);
    const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(d.scores.data(), d.scores.size());
    const ThresholdModel m = fit_threshold(s, d.labels, C, intervals);
    const auto want = testing::oracle_threshold(d.scores, d.labels, C, intervals);
    SCOPED_TRACE(rep);
    EXPECT_EQ(m.train_macro_f1, want.macro_f1);
    EXPECT_EQ(m.cuts, want.cuts);
    EXPECT_EQ(m.region_labels, want.region_labels);
  }
}

TEST(FitThreshold, TiesPreferEarliestCutAndAssignment) {
  // Every cut in [0.2, 0.8) separates perfectly; the first grid point that
  // does so wins, with the identity assignment.
  const ThresholdModel m = fit_threshold(vec({0.0, 0.2, 0.8, 1.0}), std::vector<int>{0, 0, 1, 1}, 2, 10);
  EXPECT_DOUBLE_EQ(m.cuts[0], 0.2);
  EXPECT_EQ(m.region_labels, (std::vector<int>{0, 1}));
}

TEST(FitThreshold, PositiveAffineMapsPreserveFit) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset d = noisy_dataset(rng, 3, 40);
    const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(d.scores.data(), d.scores.size());
    const ThresholdModel a = fit_threshold(s, d.labels, 3, 50);
    const ThresholdModel b = fit_threshold((4.0 * s.array() + 1.0).matrix(), d.labels, 3, 50);
    EXPECT_NEAR(a.train_macro_f1, b.train_macro_f1, 1e-12);
    for (Eigen::Index i = 0; i < s.size(); ++i)
      EXPECT_EQ(predict_threshold(a, s(i)), predict_threshold(b, 4.0 * s(i) + 1.0));
  }
}

TEST(FitThreshold, Errors) {
  EXPECT_EQ(fit_error(vec({0.1, 0.2}), {0}, 2), ErrorCode::LengthMismatch);
  EXPECT_EQ(fit_error(vec({0.1, 0.2}), {0, 0}, 2), ErrorCode::SingleClassInput);
  EXPECT_EQ(fit_error(vec({0.1, std::nan("")}), {0, 1}, 2), ErrorCode::NonFiniteScore);
  EXPECT_EQ(fit_error(vec({0.1, 0.2}), {0, 1}, 4), ErrorCode::InvalidConfig);
  EXPECT_EQ(fit_error(vec({0.1, 0.2}), {0, 5}, 2), ErrorCode::DimensionMismatch);
}

}  // namespace
}  // namespace claws
