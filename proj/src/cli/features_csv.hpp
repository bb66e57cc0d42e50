#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "claws/label.hpp"
#include "claws/scores.hpp"

namespace claws::cli {

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_field(const std::string& text);

struct FeatureRow {
  std::string trace_path;
  FeatureVector features;
};

/// Header is `trace_path,method,v0` when every method is scalar and
/// `trace_path,method,v0,v1,v2,v3,v4` otherwise; scalar rows leave the
/// unused columns empty. Values use 9 significant digits.
std::string features_header(bool any_vector);
std::string features_row(const FeatureRow& row, bool any_vector);

class FeatureTable {
 public:
  static FeatureTable load(const std::filesystem::path& path);

  const Eigen::VectorXd* find(const std::string& trace_path, MethodId method) const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::map<std::pair<std::string, MethodId>, Eigen::VectorXd> rows_;
};

struct PredictionRow {
  std::string trace_path;
  int label = 0;
  bool surrogate = false;
  Eigen::VectorXd class_scores;
};

void save_predictions(const std::filesystem::path& path, Task task,
                      const std::vector<PredictionRow>& rows);
std::pair<Task, std::vector<PredictionRow>> load_predictions(const std::filesystem::path& path);

}  // namespace claws::cli
