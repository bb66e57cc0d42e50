#include "features_csv.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "claws/error.hpp"

namespace claws::cli {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string features_header(bool any_vector) {
  return any_vector ? "trace_path,method,v0,v1,v2,v3,v4" : "trace_path,method,v0";
}

std::string features_row(const FeatureRow& row, bool any_vector) {
  std::string out = csv_field(row.trace_path) + "," + std::string(to_string(row.features.method));
  const Eigen::Index width = any_vector ? 5 : 1;
  for (Eigen::Index i = 0; i < width; ++i) {
    out += ",";
    if (i < row.features.values.size()) out += fmt::format("{:.9g}", row.features.values(i));
  }
  return out;
}

namespace {

double parse_double(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, fmt::format("{}: bad number \"{}\"", where, text));
  }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line != "\r") lines.push_back(line);
  return lines;
}

}  // namespace

FeatureTable FeatureTable::load(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || split_csv_line(lines[0]).at(0) != "trace_path")
    throw Error(ErrorCode::ParseError, path.string() + ": missing feature CSV header");
  FeatureTable table;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto fields = split_csv_line(lines[n]);
    const std::string where = fmt::format("{}:{}", path.string(), n + 1);
    if (fields.size() < 3) throw Error(ErrorCode::ParseError, where + ": too few fields");
    const auto method = parse_method(fields[1]);
    if (!method) throw Error(ErrorCode::ParseError, where + ": unknown method " + fields[1]);
    const Eigen::Index dim = feature_dim(*method);
    if (static_cast<Eigen::Index>(fields.size()) < 2 + dim)
      throw Error(ErrorCode::ParseError, where + ": too few values");
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = parse_double(fields[2 + i], where);
    table.rows_[{fields[0], *method}] = std::move(v);
  }
  return table;
}

const Eigen::VectorXd* FeatureTable::find(const std::string& trace_path, MethodId method) const {
  auto it = rows_.find({trace_path, method});
  return it == rows_.end() ? nullptr : &it->second;
}

void save_predictions(const std::filesystem::path& path, Task task,
                      const std::vector<PredictionRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << "trace_path,prediction,surrogate";
  for (int c = 0; c < num_classes(task); ++c) out << ",score_" << class_name(task, c);
  out << '\n';
  for (const PredictionRow& r : rows) {
    out << csv_field(r.trace_path) << ',' << class_name(task, r.label) << ','
        << (r.surrogate ? 1 : 0);
    for (Eigen::Index c = 0; c < r.class_scores.size(); ++c)
      out << ',' << fmt::format("{:.17g}", r.class_scores(c));
    out << '\n';
  }
}

std::pair<Task, std::vector<PredictionRow>> load_predictions(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty predictions file");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 5 || header[0] != "trace_path" || header[1] != "prediction")
    throw Error(ErrorCode::ParseError, path.string() + ": missing predictions header");
  const int C = static_cast<int>(header.size()) - 3;
  if (C != 2 && C != 3)
    throw Error(ErrorCode::ParseError, path.string() + ": expected 2 or 3 score columns");
  const Task task = C == 3 ? Task::ThreeClass : Task::TwoClass;

  std::vector<PredictionRow> rows;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto f = split_csv_line(lines[n]);
    const std::string where = fmt::format("{}:{}", path.string(), n + 1);
    if (static_cast<int>(f.size()) != 3 + C)
      throw Error(ErrorCode::ParseError, where + ": wrong field count");
    PredictionRow r;
    r.trace_path = f[0];
    r.label = -1;
    for (int c = 0; c < C; ++c)
      if (class_name(task, c) == f[1]) r.label = c;
    if (r.label < 0) throw Error(ErrorCode::ParseError, where + ": unknown class " + f[1]);
    r.surrogate = f[2] == "1";
    r.class_scores.resize(C);
    for (int c = 0; c < C; ++c) r.class_scores(c) = parse_double(f[3 + c], where);
    rows.push_back(std::move(r));
  }
  return {task, std::move(rows)};
}

}  // namespace claws::cli
