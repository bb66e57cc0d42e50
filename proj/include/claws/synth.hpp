#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "claws/label.hpp"
#include "claws/manifest.hpp"
#include "claws/trace.hpp"

namespace claws {

/// Class-conditional generator of synthetic traces. Every class-dependent
/// quantity is interpolated between a class-independent value (separation 0)
/// and the class value (separation 1).
struct SynthSpec {
  std::array<int, kNumLabels> per_class{10, 10, 10};
  std::uint32_t prompt_len = 40;
  std::uint32_t response_len = 16;
  std::uint32_t heads = 4;
  std::uint32_t hidden_dim = 16;
  std::uint32_t topk = 10;
  double separation = 1.0;

  /// Expected share of attention mass per section (G, P, S, I, R) per class.
  std::array<std::array<double, kNumSections>, kNumLabels> section_profiles{{
      {0.40, 0.30, 0.10, 0.10, 0.10},  // hallucinated: guideline / problem heavy
      {0.15, 0.30, 0.15, 0.10, 0.30},  // creative
      {0.10, 0.10, 0.35, 0.20, 0.25},  // typical: solutions / instruction / response heavy
  }};
  /// Target mean top-k entropy (nats) per step.
  std::array<double, kNumLabels> entropy_targets{1.3, 1.15, 1.0};
  /// Standard deviation of hidden-state entries.
  std::array<double, kNumLabels> hidden_spread{1.15, 1.0, 0.9};

  /// Dirichlet concentration of each trace's section profile around the class
  /// profile, and of each attention row around the trace profile.
  double trace_concentration = 60.0;
  double row_concentration = 30.0;

  double reference_fraction = 0.5;
  std::uint64_t seed = 0;
};

/// Throws InvalidSpec.
void validate_spec(const SynthSpec& spec);

/// Token lengths of the four prompt sections for a prompt of `prompt_len`.
std::array<std::uint32_t, 4> prompt_section_lengths(std::uint32_t prompt_len);

GenerationTrace generate_trace(Label label, const SynthSpec& spec, std::mt19937_64& rng);

struct SyntheticSample {
  Label label;
  Split split;
  int index;        // position within its class
  std::string name;  // e.g. "typical_0007"
  GenerationTrace trace;
};

/// All samples, class-major. Each trace draws from its own stream seeded by
/// (spec.seed, class, index), so `workers` never changes the output.
std::vector<SyntheticSample> generate_samples(const SynthSpec& spec, unsigned workers = 1);

/// Writes traces/<name>.clwt and manifest.jsonl under `out_dir`.
DatasetManifest generate_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir,
                                 unsigned workers = 1);

}  // namespace claws
