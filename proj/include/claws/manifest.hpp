#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "claws/label.hpp"

namespace claws {

enum class Split { Reference, Test, Extended };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

struct ManifestRecord {
  std::string trace_path;  // as written; relative paths resolve against the manifest dir
  Label label = Label::Hallucinated;
  Split split = Split::Reference;
  std::string problem_id;
  std::string generator_id;

  bool operator==(const ManifestRecord&) const = default;
};

/// Default prompt-length budget of the extraction pipeline, in tokens.
inline constexpr std::uint32_t kDefaultInputTokenLimit = 2048;

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const ManifestRecord& record) const;
  std::vector<ManifestRecord> select(Split split) const;
};

/// Parses JSON-lines records. Blank lines are skipped. Throws ParseError(line)
/// or DuplicatePath(path).
DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir);

/// With `verify`, every trace must exist (MissingTrace) and parse.
DatasetManifest load_manifest(const std::filesystem::path& path, bool verify = false);

std::string to_jsonl(const ManifestRecord& record);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace claws
