#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "claws/label.hpp"
#include "claws/manifest.hpp"

namespace claws {

/// Correctness and creativity judgments of two independent evaluators.
struct EvaluatorVerdict {
  bool correct_a = false;
  bool correct_b = false;
  bool creative_a = false;
  bool creative_b = false;
};

/// Creative: both correct and at least one creative. Typical: both correct and
/// neither creative. Hallucinated: not both correct.
Label combine_evaluations(const EvaluatorVerdict& v);

/// The label a single evaluator would assign on its own.
Label single_evaluator_label(bool correct, bool creative);

BinaryLabel to_binary(Label label);

/// Keeps every sample of the smallest class and a seeded uniform sample of the
/// same size from each other class. Input order is preserved. With `split`,
/// only records of that split are considered and returned.
DatasetManifest balance_dataset(const DatasetManifest& manifest, std::uint64_t seed,
                                std::optional<Split> split = std::nullopt);

struct VerdictRecord {
  std::string trace_path;
  EvaluatorVerdict verdict;
};

/// JSON-lines with keys correct_a, correct_b, creative_a, creative_b, trace_path.
std::vector<VerdictRecord> load_verdicts(const std::filesystem::path& path);

}  // namespace claws
