#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace claws {

/// Target classes. The ordinal order is also the tie-breaking order used by
/// every classifier (lower ordinal wins).
enum class Label : int { Hallucinated = 0, Creative = 1, Typical = 2 };

inline constexpr int kNumLabels = 3;
inline constexpr std::array<Label, 3> kAllLabels{Label::Hallucinated, Label::Creative,
                                                 Label::Typical};

/// Two-class projection used by the hallucination-only task.
enum class BinaryLabel : int { Hallucinated = 0, NonHallucinated = 1 };

std::string_view to_string(Label label);
std::string_view to_string(BinaryLabel label);

/// Case-insensitive; returns nullopt for anything but the three class names.
std::optional<Label> parse_label(std::string_view text);

enum class Task { ThreeClass, TwoClass };

std::string_view to_string(Task task);
std::optional<Task> parse_task(std::string_view text);

inline constexpr int num_classes(Task task) { return task == Task::ThreeClass ? 3 : 2; }

/// Class name of class index `c` under `task`.
std::string_view class_name(Task task, int c);

}  // namespace claws
