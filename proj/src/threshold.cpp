#include "claws/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "claws/error.hpp"
#include "claws/metrics.hpp"

namespace claws {

std::vector<double> threshold_grid(double min, double max, int n_intervals) {
  const double span = max > min ? max - min : 1.0;
  std::vector<double> grid(static_cast<std::size_t>(n_intervals));
  for (int i = 0; i < n_intervals; ++i) grid[i] = min + i * span / n_intervals;
  return grid;
}

namespace {

using Counts = Eigen::VectorXi;  // per-class sample counts

// region_counts[r](c): samples of class c falling in region r.
double assignment_f1(const std::vector<Counts>& region_counts, const std::vector<int>& assign,
                     int C) {
  Eigen::MatrixXi cm = Eigen::MatrixXi::Zero(C, C);
  for (std::size_t r = 0; r < region_counts.size(); ++r) cm.col(assign[r]) += region_counts[r];
  return macro_f1(cm);
}

}  // namespace

ThresholdModel fit_threshold(const Eigen::VectorXd& scores, std::span<const int> labels,
                             int n_classes, int n_intervals) {
  if (static_cast<std::size_t>(scores.size()) != labels.size())
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} scores vs {} labels", scores.size(), labels.size()));
  if (n_classes != 2 && n_classes != 3)
    throw Error(ErrorCode::InvalidConfig, "threshold strategy supports 2 or 3 classes");
  if (n_intervals < 1) throw Error(ErrorCode::InvalidConfig, "n_intervals must be >= 1");
  if (!scores.allFinite()) throw Error(ErrorCode::NonFiniteScore, "non-finite score in input");
  std::set<int> present;
  for (int y : labels) {
    if (y < 0 || y >= n_classes)
      throw Error(ErrorCode::DimensionMismatch, fmt::format("label {} out of range", y));
    present.insert(y);
  }
  if (present.size() < 2)
    throw Error(ErrorCode::SingleClassInput, "need at least two distinct labels");

  const std::vector<double> grid = threshold_grid(scores.minCoeff(), scores.maxCoeff(), n_intervals);

  // le[i](c) = number of class-c samples with score <= grid[i].
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores(a) < scores(b); });
  std::vector<Counts> le(grid.size(), Counts::Zero(n_classes));
  Counts running = Counts::Zero(n_classes);
  std::size_t next = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    while (next < order.size() && scores(order[next]) <= grid[i]) ++running(labels[order[next++]]);
    le[i] = running;
  }
  Counts total = Counts::Zero(n_classes);
  for (int y : labels) ++total(y);

  std::vector<int> assign(n_classes);
  std::iota(assign.begin(), assign.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(assign);
  while (std::next_permutation(assign.begin(), assign.end()));

  ThresholdModel best;
  best.n_classes = n_classes;
  best.train_macro_f1 = -1.0;
  auto consider = [&](std::vector<double> cuts, const std::vector<Counts>& regions) {
    for (const auto& perm : perms) {
      const double f1 = assignment_f1(regions, perm, n_classes);
      if (f1 > best.train_macro_f1) {
        best.train_macro_f1 = f1;
        best.cuts = cuts;
        best.region_labels = perm;
      }
    }
  };

  const std::size_t n = grid.size();
  if (n_classes == 2) {
    for (std::size_t i = 0; i < n; ++i) consider({grid[i]}, {le[i], total - le[i]});
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        consider({grid[i], grid[j]}, {le[i], le[j] - le[i], total - le[j]});
    if (n < 2)
      throw Error(ErrorCode::InvalidConfig, "3-class thresholding needs n_intervals >= 2");
  }
  return best;
}

int predict_threshold(const ThresholdModel& model, double score) {
  if (!std::isfinite(score)) throw Error(ErrorCode::NonFiniteScore, "score is not finite");
  std::size_t region = 0;
  while (region < model.cuts.size() && score > model.cuts[region]) ++region;
  return model.region_labels[region];
}

Eigen::VectorXd threshold_surrogate_scores(const ThresholdModel& model, double score) {
  if (!std::isfinite(score)) throw Error(ErrorCode::NonFiniteScore, "score is not finite");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd out = Eigen::VectorXd::Constant(model.n_classes, -inf);
  for (std::size_t r = 0; r < model.region_labels.size(); ++r) {
    const double lo = r == 0 ? -inf : model.cuts[r - 1];
    const double hi = r == model.cuts.size() ? inf : model.cuts[r];
    double signed_dist;
    if (score > lo && score <= hi)
      signed_dist = std::min(score - lo, hi - score);
    else
      signed_dist = score <= lo ? -(lo - score) : -(score - hi);
    double& slot = out(model.region_labels[r]);
    slot = std::max(slot, signed_dist);
  }
  return out;
}

}  // namespace claws
