#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "claws/label.hpp"

namespace claws {

/// Entry (i, j) counts samples of true class i predicted as class j.
Eigen::MatrixXi confusion_matrix(std::span<const int> preds, std::span<const int> labels,
                                 int n_classes);

struct F1Scores {
  double weighted = 0.0;
  double macro = 0.0;
  Eigen::VectorXd precision;
  Eigen::VectorXd recall;
  Eigen::VectorXd f1;
  Eigen::VectorXi support;
};

/// Per-class F1 = 2PR / (P + R), zero when P + R = 0 (and P or R zero when
/// their denominators vanish).
F1Scores f1_scores(const Eigen::MatrixXi& cm);

/// Same value as f1_scores(cm).macro without the per-class bookkeeping.
double macro_f1(const Eigen::MatrixXi& cm);

/// Binary AUROC via the rank statistic; ties count one half. Requires at
/// least one positive and one negative.
double binary_auroc(const Eigen::VectorXd& scores, const std::vector<bool>& positive);

/// Step-wise average precision over the descending-score sweep, with tied
/// scores entering as one block.
double average_precision(const Eigen::VectorXd& scores, const std::vector<bool>& positive);

/// One-vs-rest macro average over classes that have both positives and
/// negatives. `scores` is N x C. Throws NoValidClass.
double auroc_macro(const Eigen::MatrixXd& scores, std::span<const int> labels);
double ap_macro(const Eigen::MatrixXd& scores, std::span<const int> labels);

double cohens_kappa(std::span<const int> labels_a, std::span<const int> labels_b);

struct ClassReport {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;
};

struct EvaluationReport {
  Task task = Task::ThreeClass;
  std::vector<ClassReport> classes;
  double f1_weighted = 0.0;
  double f1_macro = 0.0;
  std::optional<double> auroc_macro;
  std::optional<double> ap_macro;
  bool surrogate_scores = false;
  Eigen::MatrixXi confusion;
  int n_samples = 0;
};

/// `scores`, when given, is N x C and feeds AUROC/AP. Classes without both
/// positives and negatives are skipped; if none remain the entries are empty.
EvaluationReport evaluate(std::span<const int> preds, std::span<const int> labels, Task task,
                          const std::optional<Eigen::MatrixXd>& scores,
                          bool surrogate_scores = false);

std::string report_to_json(const EvaluationReport& report);
std::string render_table(const EvaluationReport& report);

}  // namespace claws
