#include "claws/label.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace claws {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Hallucinated: return "hallucinated";
    case Label::Creative: return "creative";
    case Label::Typical: return "typical";
  }
  return "?";
}

std::string_view to_string(BinaryLabel label) {
  return label == BinaryLabel::Hallucinated ? "hallucinated" : "non_hallucinated";
}

std::optional<Label> parse_label(std::string_view text) {
  const std::string s = lower(text);
  if (s == "hallucinated") return Label::Hallucinated;
  if (s == "creative") return Label::Creative;
  if (s == "typical") return Label::Typical;
  return std::nullopt;
}

std::string_view to_string(Task task) { return task == Task::ThreeClass ? "3class" : "2class"; }

std::optional<Task> parse_task(std::string_view text) {
  const std::string s = lower(text);
  if (s == "3class") return Task::ThreeClass;
  if (s == "2class") return Task::TwoClass;
  return std::nullopt;
}

std::string_view class_name(Task task, int c) {
  if (task == Task::ThreeClass) return to_string(static_cast<Label>(c));
  return to_string(static_cast<BinaryLabel>(c));
}

}  // namespace claws
