#include "claws/metrics.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "claws/error.hpp"

namespace claws {

namespace {

void check_pairs(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorCode::LengthMismatch, fmt::format("{} predictions vs {} labels", a, b));
  if (a == 0) throw Error(ErrorCode::Empty, "no samples");
}

struct ClassF1 {
  double precision, recall, f1;
};

ClassF1 class_f1(const Eigen::MatrixXi& cm, Eigen::Index c) {
  const double tp = cm(c, c);
  const double predicted = cm.col(c).sum();
  const double actual = cm.row(c).sum();
  const double p = predicted > 0 ? tp / predicted : 0.0;
  const double r = actual > 0 ? tp / actual : 0.0;
  const double f = p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  return {p, r, f};
}

template <typename PerClass>
double macro_over_valid(const Eigen::MatrixXd& scores, std::span<const int> labels,
                        PerClass per_class) {
  if (static_cast<std::size_t>(scores.rows()) != labels.size())
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} score rows vs {} labels", scores.rows(), labels.size()));
  double total = 0.0;
  int valid = 0;
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    std::vector<bool> positive(labels.size());
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      positive[i] = labels[i] == c;
      n_pos += positive[i];
    }
    if (n_pos == 0 || n_pos == labels.size()) continue;
    total += per_class(Eigen::VectorXd(scores.col(c)), positive);
    ++valid;
  }
  if (valid == 0)
    throw Error(ErrorCode::NoValidClass, "no class has both positive and negative samples");
  return total / valid;
}

}  // namespace

Eigen::MatrixXi confusion_matrix(std::span<const int> preds, std::span<const int> labels,
                                 int n_classes) {
  check_pairs(preds.size(), labels.size());
  Eigen::MatrixXi cm = Eigen::MatrixXi::Zero(n_classes, n_classes);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes || preds[i] < 0 || preds[i] >= n_classes)
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("sample {} has class outside [0, {})", i, n_classes));
    ++cm(labels[i], preds[i]);
  }
  return cm;
}

F1Scores f1_scores(const Eigen::MatrixXi& cm) {
  const Eigen::Index C = cm.rows();
  F1Scores out;
  out.precision.resize(C);
  out.recall.resize(C);
  out.f1.resize(C);
  out.support = cm.rowwise().sum();
  double macro = 0.0, weighted = 0.0;
  for (Eigen::Index c = 0; c < C; ++c) {
    const ClassF1 s = class_f1(cm, c);
    out.precision(c) = s.precision;
    out.recall(c) = s.recall;
    out.f1(c) = s.f1;
    macro += s.f1;
    weighted += out.support(c) * s.f1;
  }
  const int n = out.support.sum();
  out.macro = macro / static_cast<double>(C);
  out.weighted = n > 0 ? weighted / n : 0.0;
  return out;
}

double macro_f1(const Eigen::MatrixXi& cm) {
  double macro = 0.0;
  for (Eigen::Index c = 0; c < cm.rows(); ++c) macro += class_f1(cm, c).f1;
  return macro / static_cast<double>(cm.rows());
}

double binary_auroc(const Eigen::VectorXd& scores, const std::vector<bool>& positive) {
  const std::size_t n = positive.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores(a) < scores(b); });

  // Sum of (1-based, tie-averaged) ranks of the positives.
  double rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores(order[j]) == scores(order[i])) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t q = i; q < j; ++q)
      if (positive[order[q]]) {
        rank_sum += avg_rank;
        n_pos += 1.0;
      }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw Error(ErrorCode::NoValidClass, "binary AUROC needs positives and negatives");
  return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
}

double average_precision(const Eigen::VectorXd& scores, const std::vector<bool>& positive) {
  const std::size_t n = positive.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores(a) > scores(b); });
  const double total_pos = static_cast<double>(std::count(positive.begin(), positive.end(), true));
  if (total_pos == 0)
    throw Error(ErrorCode::NoValidClass, "average precision needs at least one positive");

  double tp = 0.0, seen = 0.0, prev_recall = 0.0, ap = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores(order[j]) == scores(order[i])) ++j;
    for (std::size_t q = i; q < j; ++q) tp += positive[order[q]] ? 1.0 : 0.0;
    seen += static_cast<double>(j - i);
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / seen);
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double auroc_macro(const Eigen::MatrixXd& scores, std::span<const int> labels) {
  return macro_over_valid(scores, labels, binary_auroc);
}

double ap_macro(const Eigen::MatrixXd& scores, std::span<const int> labels) {
  return macro_over_valid(scores, labels, average_precision);
}

double cohens_kappa(std::span<const int> a, std::span<const int> b) {
  check_pairs(a.size(), b.size());
  const int C = 1 + std::max(*std::max_element(a.begin(), a.end()),
                             *std::max_element(b.begin(), b.end()));
  const Eigen::MatrixXi cm = confusion_matrix(a, b, C);
  const double n = static_cast<double>(a.size());
  const double p_o = cm.diagonal().sum() / n;
  double p_e = 0.0;
  for (int c = 0; c < C; ++c) p_e += (cm.row(c).sum() / n) * (cm.col(c).sum() / n);
  if (p_e == 1.0) {
    if (p_o == 1.0) return 1.0;
    throw Error(ErrorCode::DegenerateAgreementBase, "chance agreement is 1");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

EvaluationReport evaluate(std::span<const int> preds, std::span<const int> labels, Task task,
                          const std::optional<Eigen::MatrixXd>& scores, bool surrogate_scores) {
  const int C = num_classes(task);
  EvaluationReport report;
  report.task = task;
  report.confusion = confusion_matrix(preds, labels, C);
  report.n_samples = static_cast<int>(preds.size());
  const F1Scores f1 = f1_scores(report.confusion);
  report.f1_weighted = f1.weighted;
  report.f1_macro = f1.macro;
  for (int c = 0; c < C; ++c)
    report.classes.push_back({std::string(class_name(task, c)), f1.precision(c), f1.recall(c),
                              f1.f1(c), f1.support(c)});
  if (scores) {
    if (scores->cols() != C)
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("{} score columns for {} classes", scores->cols(), C));
    try {
      report.auroc_macro = auroc_macro(*scores, labels);
      report.ap_macro = ap_macro(*scores, labels);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoValidClass) throw;
    }
    report.surrogate_scores = surrogate_scores;
  }
  return report;
}

std::string report_to_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["task"] = std::string(to_string(r.task));
  j["n_samples"] = r.n_samples;
  j["f1_weighted"] = r.f1_weighted;
  j["f1_macro"] = r.f1_macro;
  j["auroc_macro"] = r.auroc_macro ? nlohmann::json(*r.auroc_macro) : nlohmann::json(nullptr);
  j["ap_macro"] = r.ap_macro ? nlohmann::json(*r.ap_macro) : nlohmann::json(nullptr);
  j["surrogate_scores"] = r.surrogate_scores;
  for (const ClassReport& c : r.classes)
    j["per_class"].push_back({{"class", c.name},
                              {"precision", c.precision},
                              {"recall", c.recall},
                              {"f1", c.f1},
                              {"support", c.support}});
  for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
    std::vector<int> row(r.confusion.cols());
    for (Eigen::Index k = 0; k < r.confusion.cols(); ++k) row[k] = r.confusion(i, k);
    j["confusion"].push_back(row);
  }
  return j.dump(2);
}

std::string render_table(const EvaluationReport& r) {
  std::string out;
  out += fmt::format("{:<18} {:>9} {:>9} {:>9} {:>8}\n", "class", "precision", "recall", "f1",
                     "support");
  for (const ClassReport& c : r.classes)
    out += fmt::format("{:<18} {:>9.4f} {:>9.4f} {:>9.4f} {:>8}\n", c.name, c.precision,
                       c.recall, c.f1, c.support);
  out += "\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
  };
  out += fmt::format("{:<18} {:>9.4f}\n", "f1_weighted", r.f1_weighted);
  out += fmt::format("{:<18} {:>9.4f}\n", "f1_macro", r.f1_macro);
  out += fmt::format("{:<18} {:>9}{}\n", "auroc_macro", opt(r.auroc_macro),
                     r.surrogate_scores ? "  (surrogate scores)" : "");
  out += fmt::format("{:<18} {:>9}{}\n", "ap_macro", opt(r.ap_macro),
                     r.surrogate_scores ? "  (surrogate scores)" : "");
  out += fmt::format("{:<18} {:>9}\n", "samples", r.n_samples);
  return out;
}

}  // namespace claws
