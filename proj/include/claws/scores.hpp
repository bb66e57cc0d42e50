#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "claws/error.hpp"
#include "claws/trace.hpp"

namespace claws {

enum class MethodId { PPL, LE, WE, HS, AS, CLAWS };

inline constexpr std::array<MethodId, 6> kAllMethods{MethodId::PPL, MethodId::LE, MethodId::WE,
                                                     MethodId::HS,  MethodId::AS, MethodId::CLAWS};

std::string_view to_string(MethodId method);
std::optional<MethodId> parse_method(std::string_view text);

/// Number of values a method produces (1 for the scalar baselines, 5 for CLAWS).
inline constexpr Eigen::Index feature_dim(MethodId method) {
  return method == MethodId::CLAWS ? static_cast<Eigen::Index>(kNumSections) : 1;
}

struct FeatureVector {
  MethodId method = MethodId::PPL;
  Eigen::VectorXd values;  // CLAWS ordered G, P, S, I, R
};

struct ScoreConfig {
  int entropy_k = 10;
  int window_w = 5;
  double eigen_eps = 1e-10;
  double attn_eps = 1e-12;
};

// ---------------------------------------------------------------------------
// Kernels. These operate on plain Eigen expressions and are what the
// trace-level scores below are built from.

/// exp of the negative mean of chosen-token log-probabilities.
template <typename Derived>
double perplexity_of(const Eigen::MatrixBase<Derived>& logprobs) {
  return std::exp(-logprobs.template cast<double>().mean());
}

/// Mean over rows t of log max(attention(t, offset + t), eps): the diagonal
/// of one head's attention block, shifted past the prompt.
template <typename Derived>
double mean_log_self_attention(const Eigen::MatrixBase<Derived>& attention, Eigen::Index offset,
                               double eps) {
  const Eigen::Index T = attention.rows();
  double total = 0.0;
  for (Eigen::Index t = 0; t < T; ++t)
    total += std::log(std::max(static_cast<double>(attention(t, offset + t)), eps));
  return total / static_cast<double>(T);
}

/// Entropy -sum p log p of one row of top-k log-probabilities, using the first
/// `k` columns. Candidates with p == 0 contribute nothing. No renormalization.
template <typename Derived>
double topk_entropy(const Eigen::MatrixBase<Derived>& logprobs, Eigen::Index k) {
  double h = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double lp = static_cast<double>(logprobs(j));
    const double p = std::exp(lp);
    if (p > 0.0) h -= p * lp;
  }
  return h;
}

/// Largest mean over all length-`w` contiguous windows of `values`.
template <typename Derived>
double max_window_mean(const Eigen::MatrixBase<Derived>& values, Eigen::Index w) {
  const Eigen::Index n = values.size();
  double window = values.head(w).sum();
  double best = window;
  for (Eigen::Index s = 1; s + w <= n; ++s) {
    window += values(s + w - 1) - values(s - 1);
    best = std::max(best, window);
  }
  return best / static_cast<double>(w);
}

/// Mean log-eigenvalue of the Gram matrix of `rows` (m x d): (1/m) sum_i
/// log max(lambda_i, eps) over the m eigenvalues of rows * rows^T. When m > d
/// the d x d Gram is decomposed instead and the m - d structurally zero
/// eigenvalues enter as eps.
template <typename Derived>
double mean_log_gram_eigenvalue(const Eigen::MatrixBase<Derived>& rows, double eps) {
  using Scalar = double;
  const Eigen::Index m = rows.rows();
  const Eigen::Index d = rows.cols();
  const auto x = rows.template cast<Scalar>();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> gram =
      m <= d ? Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(x * x.transpose())
             : Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(x.transpose() * x);
  Eigen::SelfAdjointEigenSolver<decltype(gram)> solver(gram, Eigen::EigenvaluesOnly);
  const auto& lambda = solver.eigenvalues();
  Scalar total = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) total += std::log(std::max(lambda(i), eps));
  total += static_cast<Scalar>(m - lambda.size()) * std::log(eps);
  return total / static_cast<Scalar>(m);
}

// ---------------------------------------------------------------------------
// Trace-level scores.

/// exp of the negative mean chosen-token log-probability.
FeatureVector perplexity(const GenerationTrace& trace);

/// Per-step top-k entropies, length T.
Eigen::VectorXd step_entropies(const GenerationTrace& trace, int k);

FeatureVector logit_entropy(const GenerationTrace& trace, const ScoreConfig& cfg = {});
FeatureVector window_logit_entropy(const GenerationTrace& trace, const ScoreConfig& cfg = {});
FeatureVector hidden_score(const GenerationTrace& trace, const ScoreConfig& cfg = {});

/// Mean over heads of the mean log self-attention weight attention[h][t][k+t].
FeatureVector attention_score(const GenerationTrace& trace, const ScoreConfig& cfg = {});

/// Average attention per section: sum over heads, steps and section positions
/// divided by H * T * |section|. Padded zeros are part of the average.
Eigen::Matrix<double, 5, 1> avga(const GenerationTrace& trace);

/// AVGA normalized to ratios. Throws DegenerateAttention when AVGA is all zero.
FeatureVector claws_features(const GenerationTrace& trace);
FeatureVector claws_from_avga(const Eigen::Matrix<double, 5, 1>& section_means);

FeatureVector score(const GenerationTrace& trace, MethodId method, const ScoreConfig& cfg = {});

/// Either the features of one method or the error it raised.
struct ScoreOutcome {
  MethodId method;
  std::optional<FeatureVector> features;
  std::optional<Error> error;

  bool ok() const { return features.has_value(); }
};

/// Scores every requested method once. Output follows MethodId order
/// regardless of the order (or duplicates) in `methods`.
std::vector<ScoreOutcome> score_all(const GenerationTrace& trace, const ScoreConfig& cfg,
                                    std::span<const MethodId> methods);

}  // namespace claws
