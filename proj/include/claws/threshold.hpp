#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "claws/scores.hpp"

namespace claws {

/// Scalar-score classifier: ordered cuts split the real line into regions,
/// each region predicts one class. A score equal to a cut falls in the region
/// to its left.
struct ThresholdModel {
  MethodId method = MethodId::PPL;
  int n_classes = 2;
  std::vector<double> cuts;         // strictly increasing, n_classes - 1 entries
  std::vector<int> region_labels;   // cuts.size() + 1 entries
  double train_macro_f1 = 0.0;
};

inline constexpr int kDefaultThresholdIntervals = 200;

/// Candidate cut i (0 <= i < n_intervals) is min + i * (max - min) / n_intervals.
/// A constant score vector uses a unit-width range so that cuts stay distinct.
std::vector<double> threshold_grid(double min, double max, int n_intervals);

/// Exhaustive search over the grid (and, for 3 classes, ordered cut pairs) and
/// all region-to-class permutations for the best macro F1. Ties prefer the
/// smaller first cut, then the smaller second cut, then the lexicographically
/// smaller assignment.
ThresholdModel fit_threshold(const Eigen::VectorXd& scores, std::span<const int> labels,
                             int n_classes, int n_intervals = kDefaultThresholdIntervals);

int predict_threshold(const ThresholdModel& model, double score);

/// Continuous per-class surrogate scores for ranking metrics: signed distance
/// from `score` to the region of each class (positive depth inside the
/// region, negative distance outside).
Eigen::VectorXd threshold_surrogate_scores(const ThresholdModel& model, double score);

}  // namespace claws
