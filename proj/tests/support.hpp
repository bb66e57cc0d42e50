// Test-only helpers: a random valid-trace generator that does not share code
// with the synth module, and naive reference implementations ("oracles") that
// the library is checked against.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "claws/trace.hpp"

namespace claws::testing {

struct RandomTraceShape {
  std::uint32_t max_section = 5;
  std::uint32_t max_response = 12;
  std::uint32_t max_heads = 4;
  std::uint32_t max_dim = 8;
  std::uint32_t min_topk = 3;
  std::uint32_t max_topk = 12;
};

/// Arbitrary valid trace: random section lengths, sparse attention rows,
/// sub-stochastic descending top-k distributions.
inline GenerationTrace random_trace(std::mt19937_64& rng, const RandomTraceShape& shape = {}) {
  auto uint_in = [&](std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  GenerationTrace tr;
  std::array<std::uint32_t, 4> lens{};
  for (auto& l : lens) l = uint_in(1, shape.max_section);
  tr.response_len = uint_in(1, shape.max_response);
  tr.prompt_len = std::accumulate(lens.begin(), lens.end(), 0u);
  tr.heads = uint_in(1, shape.max_heads);
  tr.hidden_dim = uint_in(1, shape.max_dim);
  tr.topk = uint_in(shape.min_topk, shape.max_topk);
  tr.layer_index = uint_in(0, 31);
  tr.sections = make_sections(lens, tr.response_len);

  const std::uint32_t k = tr.prompt_len, T = tr.response_len, W = k + T;
  tr.attention.assign(tr.heads, RowMatrixXf::Zero(T, W));
  for (auto& a : tr.attention)
    for (std::uint32_t t = 0; t < T; ++t) {
      const std::uint32_t prefix = k + t + 1;
      std::vector<double> w(prefix);
      for (double& v : w) v = unit(rng) < 0.2 ? 0.0 : -std::log(1.0 - unit(rng));
      w[prefix - 1] += 1e-3;  // self position stays positive
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (std::uint32_t i = 0; i < prefix; ++i) a(t, i) = static_cast<float>(w[i] / total);
    }

  tr.topk_logprob.resize(T, tr.topk);
  tr.chosen_logprob.resize(T);
  for (std::uint32_t t = 0; t < T; ++t) {
    std::vector<double> p(tr.topk + 1);
    for (double& v : p) v = std::pow(unit(rng), 3.0) + 1e-6;
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= total;
    std::sort(p.begin(), p.begin() + tr.topk, std::greater<>());
    for (std::uint32_t j = 0; j < tr.topk; ++j)
      tr.topk_logprob(t, j) = static_cast<float>(std::log(p[j]));
    const std::uint32_t pick = uint_in(0, tr.topk - 1);
    tr.chosen_logprob(t) =
        unit(rng) < 0.8 ? tr.topk_logprob(t, pick)
                        : static_cast<float>(std::log(std::min(p[tr.topk], p[tr.topk - 1])));
  }

  tr.hidden.resize(T, tr.hidden_dim);
  for (Eigen::Index i = 0; i < tr.hidden.size(); ++i)
    tr.hidden.data()[i] = static_cast<float>(gauss(rng));
  return tr;
}

/// Smallest valid trace: k = 4 one-token prompt sections, T = 1, H = 1.
inline GenerationTrace minimal_trace() {
  GenerationTrace tr;
  tr.prompt_len = 4;
  tr.response_len = 1;
  tr.heads = 1;
  tr.hidden_dim = 2;
  tr.topk = 2;
  tr.sections = make_sections({1, 1, 1, 1}, 1);
  tr.attention = {RowMatrixXf::Constant(1, 5, 0.2f)};
  tr.chosen_logprob = Eigen::VectorXf::Constant(1, std::log(0.6f));
  tr.topk_logprob.resize(1, 2);
  tr.topk_logprob << std::log(0.6f), std::log(0.3f);
  tr.hidden.resize(1, 2);
  tr.hidden << 0.5f, -1.0f;
  return tr;
}

// ---------------------------------------------------------------------------
// Oracles. Deliberately plain loops over raw indices.

inline double oracle_perplexity(const GenerationTrace& tr) {
  double s = 0.0;
  for (std::uint32_t t = 0; t < tr.response_len; ++t) s += tr.chosen_logprob[t];
  return std::exp(-s / tr.response_len);
}

inline double oracle_step_entropy(const GenerationTrace& tr, std::uint32_t t, int k) {
  double h = 0.0;
  for (int j = 0; j < k; ++j) {
    const double p = std::exp(static_cast<double>(tr.topk_logprob(t, j)));
    if (p != 0.0) h += -p * std::log(p);
  }
  return h;
}

inline double oracle_logit_entropy(const GenerationTrace& tr, int k) {
  double s = 0.0;
  for (std::uint32_t t = 0; t < tr.response_len; ++t) s += oracle_step_entropy(tr, t, k);
  return s / tr.response_len;
}

inline double oracle_window_entropy(const GenerationTrace& tr, int k, int w) {
  double best = -1e300;
  for (std::uint32_t s = 0; s + w <= tr.response_len; ++s) {
    double m = 0.0;
    for (int i = 0; i < w; ++i) m += oracle_step_entropy(tr, s + i, k);
    best = std::max(best, m / w);
  }
  return best;
}

/// Cyclic Jacobi rotations on a symmetric matrix; returns its eigenvalues.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a[r][p], arq = a[r][q];
          a[r][p] = c * arp - s * arq;
          a[r][q] = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a[p][r], aqr = a[q][r];
          a[p][r] = c * apr - s * aqr;
          a[q][r] = s * apr + c * aqr;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  return ev;
}

/// Always decomposes the full T x T Gram matrix, so rank deficiency (T > d)
/// shows up as numerically zero eigenvalues that the clamp absorbs.
inline double oracle_hidden_score(const GenerationTrace& tr, double eps) {
  const std::uint32_t T = tr.response_len;
  std::vector<std::vector<double>> g(T, std::vector<double>(T, 0.0));
  for (std::uint32_t i = 0; i < T; ++i)
    for (std::uint32_t j = 0; j < T; ++j)
      for (std::uint32_t c = 0; c < tr.hidden_dim; ++c)
        g[i][j] += static_cast<double>(tr.hidden(i, c)) * tr.hidden(j, c);
  double s = 0.0;
  for (double l : jacobi_eigenvalues(g)) s += std::log(std::max(l, eps));
  return s / T;
}

inline double oracle_attention_score(const GenerationTrace& tr, double eps) {
  double s = 0.0;
  for (std::uint32_t h = 0; h < tr.heads; ++h) {
    double head = 0.0;
    for (std::uint32_t t = 0; t < tr.response_len; ++t)
      head += std::log(std::max<double>(tr.attention[h](t, tr.prompt_len + t), eps));
    s += head / tr.response_len;
  }
  return s / tr.heads;
}

inline std::array<double, 5> oracle_avga(const GenerationTrace& tr) {
  std::array<double, 5> out{};
  for (std::size_t u = 0; u < 5; ++u) {
    const SectionSpan& span = tr.sections[u];
    double s = 0.0;
    for (std::uint32_t h = 0; h < tr.heads; ++h)
      for (std::uint32_t t = 0; t < tr.response_len; ++t)
        for (std::uint32_t i = span.start; i < span.end; ++i) s += tr.attention[h](t, i);
    out[u] = s / (static_cast<double>(tr.heads) * tr.response_len * (span.end - span.start));
  }
  return out;
}

inline std::array<double, 5> oracle_claws(const GenerationTrace& tr) {
  std::array<double, 5> a = oracle_avga(tr);
  double total = 0.0;
  for (double v : a) total += v;
  for (double& v : a) v /= total;
  return a;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-12);
}

/// Macro F1 from predictions, computed from scratch per class.
inline double oracle_macro_f1(const std::vector<int>& pred, const std::vector<int>& truth, int C) {
  double sum = 0.0;
  for (int c = 0; c < C; ++c) {
    int tp = 0, predicted = 0, actual = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      tp += pred[i] == c && truth[i] == c;
      predicted += pred[i] == c;
      actual += truth[i] == c;
    }
    const double p = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
    const double r = actual > 0 ? static_cast<double>(tp) / actual : 0.0;
    sum += p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return sum / C;
}

struct ThresholdOracleResult {
  double macro_f1 = -1.0;
  std::vector<double> cuts;
  std::vector<int> region_labels;
};

/// Enumerates every grid cut (pair) and every region labelling, predicting
/// each sample individually.
inline ThresholdOracleResult oracle_threshold(const std::vector<double>& scores,
                                              const std::vector<int>& labels, int C,
                                              int n_intervals) {
  const double lo = *std::min_element(scores.begin(), scores.end());
  const double hi = *std::max_element(scores.begin(), scores.end());
  const double span = hi > lo ? hi - lo : 1.0;
  std::vector<double> grid;
  for (int i = 0; i < n_intervals; ++i) grid.push_back(lo + i * span / n_intervals);

  std::vector<int> perm(C);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  ThresholdOracleResult best;
  auto evaluate = [&](const std::vector<double>& cuts) {
    for (const auto& assign : perms) {
      std::vector<int> pred;
      for (double s : scores) {
        std::size_t r = 0;
        while (r < cuts.size() && s > cuts[r]) ++r;
        pred.push_back(assign[r]);
      }
      const double f1 = oracle_macro_f1(pred, labels, C);
      if (f1 > best.macro_f1) best = {f1, cuts, assign};
    }
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (C == 2) {
      evaluate({grid[i]});
    } else {
      for (std::size_t j = i + 1; j < grid.size(); ++j) evaluate({grid[i], grid[j]});
    }
  }
  return best;
}

/// AUROC by comparing every positive with every negative.
inline double oracle_pairwise_auroc(const std::vector<double>& s, const std::vector<bool>& pos) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (pos[i] && !pos[j]) {
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return wins / pairs;
}

/// Area under the ROC polyline obtained by lowering the threshold through
/// every distinct score.
inline double oracle_trapezoid_auroc(const std::vector<double>& s, const std::vector<bool>& pos) {
  std::vector<double> thresholds(s.begin(), s.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double P = 0, N = 0;
  for (bool b : pos) (b ? P : N) += 1.0;
  double area = 0.0, prev_tpr = 0.0, prev_fpr = 0.0;
  for (double th : thresholds) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] >= th) (pos[i] ? tp : fp) += 1.0;
    const double tpr = tp / P, fpr = fp / N;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  return area;
}

/// AP by thresholding at every distinct score from the top.
inline double oracle_average_precision(const std::vector<double>& s, const std::vector<bool>& pos) {
  std::vector<double> thresholds(s.begin(), s.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double P = 0;
  for (bool b : pos) P += b;
  double ap = 0.0, prev_recall = 0.0;
  for (double th : thresholds) {
    double tp = 0, selected = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] >= th) {
        selected += 1.0;
        tp += pos[i];
      }
    ap += (tp / P - prev_recall) * (tp / selected);
    prev_recall = tp / P;
  }
  return ap;
}

inline double oracle_kappa(const std::vector<int>& a, const std::vector<int>& b, int C) {
  const double n = static_cast<double>(a.size());
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) agree += a[i] == b[i];
  double chance = 0.0;
  for (int c = 0; c < C; ++c) {
    double na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      na += a[i] == c;
      nb += b[i] == c;
    }
    chance += (na / n) * (nb / n);
  }
  return (agree / n - chance) / (1.0 - chance);
}

}  // namespace claws::testing

namespace claws::testing {

/// Relative error used by gradient checks: |a - n| / max(|a|, |n|, floor).
/// The floor keeps near-zero components from amplifying round-off in the
/// central difference.
inline double gradient_rel_err(double analytic, double numeric, double floor = 1e-8) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Central differences of f around x with step h.
template <typename F>
Eigen::VectorXd central_difference(F&& f, Eigen::VectorXd x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x(i);
    x(i) = keep + h;
    const double up = f(x);
    x(i) = keep - h;
    const double down = f(x);
    x(i) = keep;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace claws::testing
