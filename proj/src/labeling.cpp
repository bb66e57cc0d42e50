#include "claws/labeling.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "claws/error.hpp"

namespace claws {

Label combine_evaluations(const EvaluatorVerdict& v) {
  if (!(v.correct_a && v.correct_b)) return Label::Hallucinated;
  return v.creative_a || v.creative_b ? Label::Creative : Label::Typical;
}

Label single_evaluator_label(bool correct, bool creative) {
  if (!correct) return Label::Hallucinated;
  return creative ? Label::Creative : Label::Typical;
}

BinaryLabel to_binary(Label label) {
  return label == Label::Hallucinated ? BinaryLabel::Hallucinated : BinaryLabel::NonHallucinated;
}

DatasetManifest balance_dataset(const DatasetManifest& manifest, std::uint64_t seed,
                                std::optional<Split> split) {
  std::array<std::vector<std::size_t>, kNumLabels> by_class;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const ManifestRecord& r = manifest.records[i];
    if (split && r.split != *split) continue;
    by_class[static_cast<int>(r.label)].push_back(i);
  }
  for (Label l : kAllLabels)
    if (by_class[static_cast<int>(l)].empty())
      throw Error(ErrorCode::EmptyClass, std::string(to_string(l)));

  std::size_t n = by_class[0].size();
  for (const auto& idx : by_class) n = std::min(n, idx.size());

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> keep;
  for (auto& idx : by_class) {
    if (idx.size() > n) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(n);
    }
    keep.insert(keep.end(), idx.begin(), idx.end());
  }
  std::sort(keep.begin(), keep.end());

  DatasetManifest out;
  out.base_dir = manifest.base_dir;
  for (std::size_t i : keep) out.records.push_back(manifest.records[i]);
  return out;
}

std::vector<VerdictRecord> load_verdicts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<VerdictRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(ErrorCode::ParseError, fmt::format("line {}: not a JSON object", line));
    auto flag = [&](const char* key) {
      auto it = j.find(key);
      if (it == j.end() || !it->is_boolean())
        throw Error(ErrorCode::ParseError, fmt::format("line {}: missing boolean \"{}\"", line, key));
      return it->get<bool>();
    };
    auto path_it = j.find("trace_path");
    if (path_it == j.end() || !path_it->is_string())
      throw Error(ErrorCode::ParseError, fmt::format("line {}: missing \"trace_path\"", line));
    out.push_back({path_it->get<std::string>(),
                   {flag("correct_a"), flag("correct_b"), flag("creative_a"), flag("creative_b")}});
  }
  return out;
}

}  // namespace claws
