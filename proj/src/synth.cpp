#include "claws/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "claws/error.hpp"
#include "claws/parallel.hpp"

namespace claws {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

template <std::size_t N>
std::array<double, N> dirichlet(const std::array<double, N>& alpha, std::mt19937_64& rng) {
  std::array<double, N> out{};
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    std::gamma_distribution<double> g(alpha[i], 1.0);
    out[i] = g(rng);
    total += out[i];
  }
  if (!(total > 0.0)) {
    out.fill(1.0 / N);
    return out;
  }
  for (double& v : out) v /= total;
  return out;
}

double lerp(double from, double to, double s) { return (1.0 - s) * from + s * to; }

std::array<double, kNumSections> class_profile(const SynthSpec& spec, Label label) {
  const auto& raw = spec.section_profiles[static_cast<int>(label)];
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  std::array<double, kNumSections> out{};
  for (std::size_t u = 0; u < kNumSections; ++u)
    out[u] = lerp(1.0 / kNumSections, raw[u] / total, spec.separation);
  return out;
}

template <std::size_t N>
double class_value(const std::array<double, N>& per_class, Label label, double s) {
  const double mean = std::accumulate(per_class.begin(), per_class.end(), 0.0) / N;
  return lerp(mean, per_class[static_cast<int>(label)], s);
}

double geometric_entropy(double beta, std::uint32_t K) {
  double z = 0.0, h = 0.0;
  for (std::uint32_t j = 0; j < K; ++j) z += std::exp(-beta * j);
  for (std::uint32_t j = 0; j < K; ++j) {
    const double p = std::exp(-beta * j) / z;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

/// Decay rate of p_j ~ exp(-beta j) over K candidates whose entropy is `target`.
double solve_decay(double target, std::uint32_t K) {
  double lo = 0.0, hi = 60.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (geometric_entropy(mid, K) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void validate_spec(const SynthSpec& spec) {
  for (int c : spec.per_class)
    if (c < 1) invalid("every class count must be >= 1");
  if (spec.prompt_len < 4) invalid("prompt_len must be >= 4 (one token per prompt section)");
  if (spec.response_len < 1) invalid("response_len must be >= 1");
  if (spec.heads < 1 || spec.hidden_dim < 1 || spec.topk < 1)
    invalid("heads, hidden_dim and topk must be >= 1");
  if (!(spec.separation >= 0.0 && spec.separation <= 1.0)) invalid("separation must be in [0, 1]");
  for (const auto& profile : spec.section_profiles)
    for (double a : profile)
      if (!(a > 0.0) || !std::isfinite(a)) invalid("section profile entries must be > 0");
  for (double e : spec.entropy_targets)
    if (!(e >= 0.0) || !std::isfinite(e)) invalid("entropy targets must be >= 0");
  for (double s : spec.hidden_spread)
    if (!(s > 0.0) || !std::isfinite(s)) invalid("hidden spread must be > 0");
  if (!(spec.trace_concentration > 0.0) || !(spec.row_concentration > 0.0))
    invalid("concentrations must be > 0");
  if (!(spec.reference_fraction >= 0.0 && spec.reference_fraction <= 1.0))
    invalid("reference_fraction must be in [0, 1]");
}

std::array<std::uint32_t, 4> prompt_section_lengths(std::uint32_t prompt_len) {
  constexpr std::array<double, 4> share{0.25, 0.15, 0.45, 0.15};
  std::array<std::uint32_t, 4> len{};
  std::uint32_t used = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    len[s] = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(share[s] * prompt_len));
    used += len[s];
  }
  while (used > prompt_len - 1) {  // leave at least one token for the instruction
    auto it = std::max_element(len.begin(), len.begin() + 3);
    --*it;
    --used;
  }
  len[3] = prompt_len - used;
  return len;
}

GenerationTrace generate_trace(Label label, const SynthSpec& spec, std::mt19937_64& rng) {
  validate_spec(spec);
  const std::uint32_t k = spec.prompt_len;
  const std::uint32_t T = spec.response_len;
  const std::uint32_t K = spec.topk;
  const double s = spec.separation;

  GenerationTrace tr;
  tr.prompt_len = k;
  tr.response_len = T;
  tr.heads = spec.heads;
  tr.hidden_dim = spec.hidden_dim;
  tr.topk = K;
  tr.layer_index = 0;
  tr.sections = make_sections(prompt_section_lengths(k), T);

  // Attention.
  std::array<double, kNumSections> trace_alpha = class_profile(spec, label);
  for (double& a : trace_alpha) a *= spec.trace_concentration;
  const std::array<double, kNumSections> trace_profile = dirichlet(trace_alpha, rng);

  std::exponential_distribution<double> unit_gamma(1.0);
  std::vector<double> row(k + T);
  tr.attention.assign(spec.heads, RowMatrixXf::Zero(T, k + T));
  for (RowMatrixXf& a : tr.attention) {
    for (std::uint32_t t = 0; t < T; ++t) {
      std::array<double, kNumSections> row_alpha{};
      for (std::size_t u = 0; u < kNumSections; ++u)
        row_alpha[u] = spec.row_concentration * trace_profile[u];
      const std::array<double, kNumSections> mass = dirichlet(row_alpha, rng);

      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t u = 0; u < kNumSections; ++u) {
        const SectionSpan& span = tr.sections[u];
        // The response section is visible only up to the current token.
        const std::uint32_t end = u + 1 == kNumSections ? k + t + 1 : span.end;
        double total = 0.0;
        for (std::uint32_t i = span.start; i < end; ++i) total += row[i] = unit_gamma(rng);
        for (std::uint32_t i = span.start; i < end; ++i) row[i] *= mass[u] / total;
      }
      for (std::uint32_t i = 0; i <= k + t; ++i) a(t, i) = static_cast<float>(row[i]);
    }
  }

  // Top-k log-probabilities and the chosen token.
  const double target = class_value(spec.entropy_targets, label, s);
  const double max_entropy = std::log(static_cast<double>(K));
  std::normal_distribution<double> jitter(0.0, 0.2);
  std::uniform_real_distribution<double> top_mass(0.9, 0.99);
  tr.topk_logprob.resize(T, K);
  tr.chosen_logprob.resize(T);
  std::vector<double> p(K);
  for (std::uint32_t t = 0; t < T; ++t) {
    const double step_target = target * std::exp(jitter(rng));
    const double beta =
        K > 1 ? solve_decay(std::clamp(step_target, 1e-3, 0.95 * max_entropy), K) : 0.0;
    double z = 0.0;
    for (std::uint32_t j = 0; j < K; ++j) z += p[j] = std::exp(-beta * j);
    const double mass = top_mass(rng);
    for (std::uint32_t j = 0; j < K; ++j) {
      p[j] /= z;
      tr.topk_logprob(t, j) = static_cast<float>(std::log(mass * p[j]));
    }
    std::discrete_distribution<std::uint32_t> pick(p.begin(), p.end());
    tr.chosen_logprob(t) = tr.topk_logprob(t, pick(rng));
  }

  // Hidden states.
  std::normal_distribution<double> gauss(0.0, class_value(spec.hidden_spread, label, s));
  tr.hidden.resize(T, spec.hidden_dim);
  for (Eigen::Index i = 0; i < tr.hidden.size(); ++i)
    tr.hidden.data()[i] = static_cast<float>(gauss(rng));

  validate_trace(tr);
  return tr;
}

std::vector<SyntheticSample> generate_samples(const SynthSpec& spec, unsigned workers) {
  validate_spec(spec);
  std::vector<SyntheticSample> out;
  for (Label label : kAllLabels) {
    const int n = spec.per_class[static_cast<int>(label)];
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 split_rng(derive_seed(spec.seed, 0xC1A55ull, static_cast<int>(label)));
    std::shuffle(order.begin(), order.end(), split_rng);
    const int n_ref = static_cast<int>(std::lround(spec.reference_fraction * n));
    std::vector<Split> split(n, Split::Test);
    for (int i = 0; i < n_ref; ++i) split[order[i]] = Split::Reference;
    for (int i = 0; i < n; ++i)
      out.push_back({label, split[i], i, fmt::format("{}_{:04}", to_string(label), i), {}});
  }

  parallel_for(out.size(), workers, [&](std::size_t i) {
    SyntheticSample& sample = out[i];
    std::mt19937_64 rng(derive_seed(spec.seed, static_cast<int>(sample.label) + 1,
                                    static_cast<std::uint64_t>(sample.index)));
    sample.trace = generate_trace(sample.label, spec, rng);
  });
  return out;
}

DatasetManifest generate_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir,
                                 unsigned workers) {
  std::vector<SyntheticSample> samples = generate_samples(spec, workers);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "traces", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + (out_dir / "traces").string());

  DatasetManifest manifest;
  manifest.base_dir = out_dir;
  for (const SyntheticSample& sample : samples) {
    const std::string rel = "traces/" + sample.name + ".clwt";
    save_trace(out_dir / rel, sample.trace);
    manifest.records.push_back({rel, sample.label, sample.split, "synth-" + sample.name,
                                fmt::format("synth-seed{}", spec.seed)});
  }
  save_manifest(out_dir / "manifest.jsonl", manifest);
  return manifest;
}

}  // namespace claws
