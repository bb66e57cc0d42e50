#include "claws/model_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "claws/error.hpp"

namespace claws {

using nlohmann::json;

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Threshold: return "threshold";
    case Strategy::Prototype: return "prototype";
    case Strategy::Mlp: return "mlp";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "threshold") return Strategy::Threshold;
  if (text == "prototype") return Strategy::Prototype;
  if (text == "mlp") return Strategy::Mlp;
  return std::nullopt;
}

Prediction predict(const Detector& detector, const Eigen::VectorXd& feature) {
  Prediction out;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ThresholdModel>) {
          if (feature.size() != 1)
            throw Error(ErrorCode::DimensionMismatch, "threshold model expects a scalar feature");
          out.label = predict_threshold(m, feature(0));
          out.class_scores = threshold_surrogate_scores(m, feature(0));
          out.surrogate = true;
        } else if constexpr (std::is_same_v<M, PrototypeModel>) {
          auto p = predict_prototype(m, feature);
          out.label = p.label;
          out.class_scores = std::move(p.class_scores);
        } else {
          auto p = predict_mlp(m, feature);
          out.label = p.label;
          out.class_scores = std::move(p.probabilities);
        }
      },
      detector.model);
  return out;
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.row(i).begin(), m.row(i).end());
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c)
      throw Error(ErrorCode::ParseError, "ragged matrix in model file");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = rows[i][k];
  }
  return m;
}

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json stack_json(const AffineStack& s) {
  json layers = json::array();
  for (std::size_t l = 0; l < s.weights.size(); ++l)
    layers.push_back({{"weight", matrix_json(s.weights[l])}, {"bias", vector_json(s.biases[l])}});
  return layers;
}

AffineStack stack_from(const json& j) {
  AffineStack s;
  for (const json& layer : j) {
    s.weights.push_back(matrix_from(layer.at("weight")));
    s.biases.push_back(vector_from(layer.at("bias")));
  }
  return s;
}

}  // namespace

std::string detector_to_json(const Detector& d) {
  json j;
  j["strategy"] = std::string(to_string(d.strategy()));
  j["task"] = std::string(to_string(d.task));
  j["method"] = std::string(to_string(d.method));
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        j["train_macro_f1"] = m.train_macro_f1;
        if constexpr (std::is_same_v<M, ThresholdModel>) {
          j["cuts"] = m.cuts;
          j["region_labels"] = m.region_labels;
        } else if constexpr (std::is_same_v<M, PrototypeModel>) {
          j["centroids"] = matrix_json(m.centroids);
          j["encoder"] = m.encoder ? stack_json(*m.encoder) : json(nullptr);
          j["seed_used"] = m.seed_used;
        } else {
          json layers = json::array();
          for (std::size_t l = 0; l < 3; ++l)
            layers.push_back(
                {{"weight", matrix_json(m.weights[l])}, {"bias", vector_json(m.biases[l])}});
          j["layers"] = layers;
          j["activation"] = "tanh";
          j["class_weights"] = vector_json(m.class_weights);
          j["training"] = {{"hidden", m.config.hidden},
                           {"epochs", m.config.epochs},
                           {"lr", m.config.lr},
                           {"seed", m.config.seed}};
          j["loss_history"] = m.loss_history;
        }
      },
      d.model);
  return j.dump(2);
}

Detector detector_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Detector d;
    const auto strategy = parse_strategy(j.at("strategy").get<std::string>());
    const auto task = parse_task(j.at("task").get<std::string>());
    const auto method = parse_method(j.at("method").get<std::string>());
    if (!strategy || !task || !method)
      throw Error(ErrorCode::ParseError, "unknown strategy, task or method in model file");
    d.task = *task;
    d.method = *method;
    const int C = num_classes(d.task);
    const double f1 = j.value("train_macro_f1", 0.0);
    switch (*strategy) {
      case Strategy::Threshold: {
        ThresholdModel m;
        m.method = d.method;
        m.n_classes = C;
        m.cuts = j.at("cuts").get<std::vector<double>>();
        m.region_labels = j.at("region_labels").get<std::vector<int>>();
        m.train_macro_f1 = f1;
        if (m.region_labels.size() != m.cuts.size() + 1)
          throw Error(ErrorCode::ParseError, "region_labels must have cuts + 1 entries");
        for (std::size_t i = 1; i < m.cuts.size(); ++i)
          if (!(m.cuts[i] > m.cuts[i - 1]))
            throw Error(ErrorCode::ParseError, "cuts must be strictly increasing");
        for (int r : m.region_labels)
          if (r < 0 || r >= C) throw Error(ErrorCode::ParseError, "region label out of range");
        d.model = std::move(m);
        break;
      }
      case Strategy::Prototype: {
        PrototypeModel m;
        m.n_classes = C;
        m.centroids = matrix_from(j.at("centroids"));
        if (!j.at("encoder").is_null()) m.encoder = stack_from(j.at("encoder"));
        m.seed_used = j.value("seed_used", std::uint64_t{0});
        m.train_macro_f1 = f1;
        if (m.centroids.rows() != C)
          throw Error(ErrorCode::ParseError, "centroid count does not match task");
        d.model = std::move(m);
        break;
      }
      case Strategy::Mlp: {
        MlpModel m;
        m.n_classes = C;
        const json& layers = j.at("layers");
        if (layers.size() != 3) throw Error(ErrorCode::ParseError, "mlp needs 3 layers");
        for (std::size_t l = 0; l < 3; ++l) {
          m.weights[l] = matrix_from(layers[l].at("weight"));
          m.biases[l] = vector_from(layers[l].at("bias"));
        }
        m.class_weights = vector_from(j.at("class_weights"));
        const json& t = j.at("training");
        m.config = {t.at("hidden").get<std::array<int, 2>>(), t.at("epochs").get<int>(), t.at("lr").get<double>(),
                    t.at("seed").get<std::uint64_t>()};
        m.loss_history = j.value("loss_history", std::vector<double>{});
        m.train_macro_f1 = f1;
        d.model = std::move(m);
        break;
      }
    }
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, fmt::format("model file: {}", e.what()));
  }
}

void save_detector(const std::filesystem::path& path, const Detector& detector) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << detector_to_json(detector) << '\n';
}

Detector load_detector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return detector_from_json(buf.str());
}

}  // namespace claws
