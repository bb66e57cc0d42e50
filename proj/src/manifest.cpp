#include "claws/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "claws/error.hpp"
#include "claws/trace.hpp"

namespace claws {

using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Reference: return "reference";
    case Split::Test: return "test";
    case Split::Extended: return "extended";
  }
  return "?";
}

std::optional<Split> parse_split(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "reference") return Split::Reference;
  if (s == "test") return Split::Test;
  if (s == "extended") return Split::Extended;
  return std::nullopt;
}

std::filesystem::path DatasetManifest::resolve(const ManifestRecord& record) const {
  std::filesystem::path p(record.trace_path);
  if (p.is_relative()) p = base_dir / p;
  return p.lexically_normal();
}

std::vector<ManifestRecord> DatasetManifest::select(Split split) const {
  std::vector<ManifestRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [split](const ManifestRecord& r) { return r.split == split; });
  return out;
}

namespace {

std::string required_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw Error(ErrorCode::ParseError,
                fmt::format("line {}: missing or non-string key \"{}\"", line, key));
  return it->get<std::string>();
}

}  // namespace

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  DatasetManifest manifest;
  manifest.base_dir = base_dir;
  std::set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(),
                    [](unsigned char c) { return std::isspace(c) != 0; }))
      continue;
    json obj = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object())
      throw Error(ErrorCode::ParseError, fmt::format("line {}: not a JSON object", line));

    ManifestRecord rec;
    rec.trace_path = required_string(obj, "trace_path", line);
    const std::string label = required_string(obj, "label", line);
    const std::string split = required_string(obj, "split", line);
    rec.problem_id = required_string(obj, "problem_id", line);
    rec.generator_id = required_string(obj, "generator_id", line);
    if (rec.trace_path.empty())
      throw Error(ErrorCode::ParseError, fmt::format("line {}: empty trace_path", line));
    auto parsed_label = parse_label(label);
    if (!parsed_label)
      throw Error(ErrorCode::ParseError, fmt::format("line {}: unknown label \"{}\"", line, label));
    auto parsed_split = parse_split(split);
    if (!parsed_split)
      throw Error(ErrorCode::ParseError, fmt::format("line {}: unknown split \"{}\"", line, split));
    rec.label = *parsed_label;
    rec.split = *parsed_split;

    if (!seen.insert(manifest.resolve(rec).string()).second)
      throw Error(ErrorCode::DuplicatePath, rec.trace_path);
    manifest.records.push_back(std::move(rec));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path, bool verify) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path.string());
  DatasetManifest manifest = parse_manifest(in, path.parent_path());
  if (verify) {
    for (const ManifestRecord& rec : manifest.records) {
      const auto p = manifest.resolve(rec);
      if (!std::filesystem::is_regular_file(p))
        throw Error(ErrorCode::MissingTrace, rec.trace_path);
      load_trace(p);
    }
  }
  return manifest;
}

std::string to_jsonl(const ManifestRecord& record) {
  json obj = {
      {"trace_path", record.trace_path},
      {"label", std::string(to_string(record.label))},
      {"split", std::string(to_string(record.split))},
      {"problem_id", record.problem_id},
      {"generator_id", record.generator_id},
  };
  return obj.dump();
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  for (const ManifestRecord& rec : manifest.records) out << to_jsonl(rec) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace claws
