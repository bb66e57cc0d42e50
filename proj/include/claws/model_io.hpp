#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "claws/label.hpp"
#include "claws/mlp.hpp"
#include "claws/prototype.hpp"
#include "claws/scores.hpp"
#include "claws/threshold.hpp"

namespace claws {

enum class Strategy { Threshold, Prototype, Mlp };

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view text);

/// A calibrated classifier together with the feature method and task it was
/// fitted for.
struct Detector {
  Task task = Task::ThreeClass;
  MethodId method = MethodId::CLAWS;
  std::variant<ThresholdModel, PrototypeModel, MlpModel> model;

  Strategy strategy() const { return static_cast<Strategy>(model.index()); }
  int n_classes() const { return num_classes(task); }
};

struct Prediction {
  int label = 0;
  Eigen::VectorXd class_scores;  // higher means more likely, one per class
  bool surrogate = false;        // true for threshold-derived scores
};

Prediction predict(const Detector& detector, const Eigen::VectorXd& feature);

std::string detector_to_json(const Detector& detector);
Detector detector_from_json(const std::string& text);

void save_detector(const std::filesystem::path& path, const Detector& detector);
Detector load_detector(const std::filesystem::path& path);

}  // namespace claws
