#include "claws/scores.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include <fmt/format.h>

namespace claws {

std::string_view to_string(MethodId method) {
  switch (method) {
    case MethodId::PPL: return "PPL";
    case MethodId::LE: return "LE";
    case MethodId::WE: return "WE";
    case MethodId::HS: return "HS";
    case MethodId::AS: return "AS";
    case MethodId::CLAWS: return "CLAWS";
  }
  return "?";
}

std::optional<MethodId> parse_method(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (MethodId m : kAllMethods)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

namespace {

void require_response(const GenerationTrace& trace) {
  if (trace.response_len == 0) throw Error(ErrorCode::EmptyResponse, "trace has T = 0");
}

FeatureVector scalar(MethodId method, double value) {
  FeatureVector fv{method, Eigen::VectorXd(1)};
  fv.values(0) = value;
  return fv;
}

void check_entropy_k(const GenerationTrace& trace, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, fmt::format("entropy_k = {} < 1", k));
  if (static_cast<std::uint32_t>(k) > trace.topk)
    throw Error(ErrorCode::KTooLarge,
                fmt::format("entropy_k = {} but trace stores K = {}", k, trace.topk));
}

}  // namespace

FeatureVector perplexity(const GenerationTrace& trace) {
  require_response(trace);
  return scalar(MethodId::PPL, perplexity_of(trace.chosen_logprob));
}

Eigen::VectorXd step_entropies(const GenerationTrace& trace, int k) {
  require_response(trace);
  check_entropy_k(trace, k);
  Eigen::VectorXd h(trace.topk_logprob.rows());
  for (Eigen::Index t = 0; t < h.size(); ++t) h(t) = topk_entropy(trace.topk_logprob.row(t), k);
  return h;
}

FeatureVector logit_entropy(const GenerationTrace& trace, const ScoreConfig& cfg) {
  return scalar(MethodId::LE, step_entropies(trace, cfg.entropy_k).mean());
}

FeatureVector window_logit_entropy(const GenerationTrace& trace, const ScoreConfig& cfg) {
  require_response(trace);
  if (cfg.window_w < 1)
    throw Error(ErrorCode::InvalidConfig, fmt::format("window_w = {} < 1", cfg.window_w));
  if (static_cast<std::uint32_t>(cfg.window_w) > trace.response_len)
    throw Error(ErrorCode::WindowTooLarge,
                fmt::format("window_w = {} exceeds T = {}", cfg.window_w, trace.response_len));
  return scalar(MethodId::WE, max_window_mean(step_entropies(trace, cfg.entropy_k), cfg.window_w));
}

FeatureVector hidden_score(const GenerationTrace& trace, const ScoreConfig& cfg) {
  require_response(trace);
  if (trace.hidden.cols() < 1) throw Error(ErrorCode::InvalidConfig, "hidden_dim = 0");
  if (!(cfg.eigen_eps > 0.0))
    throw Error(ErrorCode::InvalidConfig, "eigen_eps must be positive");
  return scalar(MethodId::HS, mean_log_gram_eigenvalue(trace.hidden, cfg.eigen_eps));
}

FeatureVector attention_score(const GenerationTrace& trace, const ScoreConfig& cfg) {
  require_response(trace);
  if (!(cfg.attn_eps > 0.0)) throw Error(ErrorCode::InvalidConfig, "attn_eps must be positive");
  const auto k = static_cast<Eigen::Index>(trace.prompt_len);
  double over_heads = 0.0;
  for (const RowMatrixXf& a : trace.attention)
    over_heads += mean_log_self_attention(a, k, cfg.attn_eps);
  return scalar(MethodId::AS, over_heads / static_cast<double>(trace.attention.size()));
}

Eigen::Matrix<double, 5, 1> avga(const GenerationTrace& trace) {
  require_response(trace);
  Eigen::RowVectorXd column_totals = Eigen::RowVectorXd::Zero(trace.context_len());
  for (const RowMatrixXf& a : trace.attention)
    column_totals += a.cast<double>().colwise().sum();

  const double steps = static_cast<double>(trace.heads) * static_cast<double>(trace.response_len);
  Eigen::Matrix<double, 5, 1> out;
  for (std::size_t s = 0; s < kNumSections; ++s) {
    const SectionSpan& span = trace.sections[s];
    out(static_cast<Eigen::Index>(s)) =
        column_totals.segment(span.start, span.length()).sum() / (steps * span.length());
  }
  return out;
}

FeatureVector claws_from_avga(const Eigen::Matrix<double, 5, 1>& section_means) {
  const double total = section_means.sum();
  if (!(total > 0.0))
    throw Error(ErrorCode::DegenerateAttention, "all section averages are zero");
  return {MethodId::CLAWS, section_means / total};
}

FeatureVector claws_features(const GenerationTrace& trace) { return claws_from_avga(avga(trace)); }

FeatureVector score(const GenerationTrace& trace, MethodId method, const ScoreConfig& cfg) {
  switch (method) {
    case MethodId::PPL: return perplexity(trace);
    case MethodId::LE: return logit_entropy(trace, cfg);
    case MethodId::WE: return window_logit_entropy(trace, cfg);
    case MethodId::HS: return hidden_score(trace, cfg);
    case MethodId::AS: return attention_score(trace, cfg);
    case MethodId::CLAWS: return claws_features(trace);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown method");
}

std::vector<ScoreOutcome> score_all(const GenerationTrace& trace, const ScoreConfig& cfg,
                                    std::span<const MethodId> methods) {
  std::vector<ScoreOutcome> out;
  for (MethodId m : kAllMethods) {
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) continue;
    ScoreOutcome outcome{m, std::nullopt, std::nullopt};
    try {
      outcome.features = score(trace, m, cfg);
    } catch (const Error& e) {
      outcome.error = e;
    }
    out.push_back(std::move(outcome));
  }
  return out;
}

}  // namespace claws
