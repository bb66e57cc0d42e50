#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "claws/error.hpp"
#include "claws/metrics.hpp"
#include "claws/prototype.hpp"
#include "claws/scores.hpp"
#include "claws/synth.hpp"

namespace claws {
namespace {

std::vector<char> file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Nearest centroid on CLAWS features: fit on the reference half, macro F1 on
/// the test half.
double held_out_macro_f1(const std::vector<SyntheticSample>& samples) {
  std::vector<Eigen::VectorXd> ref_x, test_x;
  std::vector<int> ref_y, test_y;
  for (const auto& s : samples) {
    const Eigen::VectorXd f = claws_features(s.trace).values;
    (s.split == Split::Reference ? ref_x : test_x).push_back(f);
    (s.split == Split::Reference ? ref_y : test_y).push_back(static_cast<int>(s.label));
  }
  Eigen::MatrixXd x(ref_x.size(), 5);
  for (std::size_t i = 0; i < ref_x.size(); ++i) x.row(i) = ref_x[i].transpose();
  const PrototypeModel m = fit_prototype(x, ref_y, 3);
  std::vector<int> pred;
  for (const auto& f : test_x) pred.push_back(predict_prototype(m, f).label);
  return macro_f1(confusion_matrix(pred, test_y, 3));
}

TEST(Synth, TracesAreValid) {
  SynthSpec spec;
  spec.per_class = {4, 4, 4};
  for (double s : {0.0, 0.5, 1.0}) {
    spec.separation = s;
    for (const auto& sample : generate_samples(spec)) EXPECT_NO_THROW(validate_trace(sample.trace));
  }
  // Small and odd shapes.
  spec.prompt_len = 4;
  spec.response_len = 1;
  spec.heads = 1;
  spec.hidden_dim = 1;
  spec.topk = 1;
  for (const auto& sample : generate_samples(spec)) EXPECT_NO_THROW(validate_trace(sample.trace));
}

TEST(Synth, SectionLengthsTileThePrompt) {
  for (std::uint32_t k = 4; k < 100; ++k) {
    const auto len = prompt_section_lengths(k);
    EXPECT_EQ(len[0] + len[1] + len[2] + len[3], k);
    for (auto l : len) EXPECT_GE(l, 1u);
  }
}

TEST(Synth, WorkerCountDoesNotChangeOutput) {
  SynthSpec spec;
  spec.per_class = {5, 3, 4};
  spec.seed = 11;
  const auto a = generate_samples(spec, 1);
  const auto b = generate_samples(spec, 4);
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].split, b[i].split);
    EXPECT_EQ(a[i].trace, b[i].trace);
  }
  spec.seed = 12;
  EXPECT_FALSE(generate_samples(spec)[0].trace == a[0].trace);
}

TEST(Synth, DatasetFilesAndManifest) {
  const auto root = std::filesystem::temp_directory_path() / "claws_synth_dataset";
  std::filesystem::remove_all(root);
  SynthSpec spec;
  spec.seed = 7;
  const DatasetManifest m = generate_dataset(spec, root / "a");
  generate_dataset(spec, root / "b", 3);
  ASSERT_EQ(m.records.size(), 30u);
  std::array<int, 3> per_label{};
  int reference = 0;
  for (const auto& r : m.records) {
    ++per_label[static_cast<int>(r.label)];
    reference += r.split == Split::Reference;
    const auto bytes = file_bytes(root / "a" / r.trace_path);
    ASSERT_FALSE(bytes.empty());
    EXPECT_EQ(bytes, file_bytes(root / "b" / r.trace_path)) << r.trace_path;
  }
  EXPECT_EQ(per_label, (std::array<int, 3>{10, 10, 10}));
  EXPECT_EQ(reference, 15);
  EXPECT_EQ(file_bytes(root / "a" / "manifest.jsonl"), file_bytes(root / "b" / "manifest.jsonl"));
  EXPECT_EQ(load_manifest(root / "a" / "manifest.jsonl", true).records, m.records);
  std::filesystem::remove_all(root);
}

TEST(Synth, NoSeparationMeansIndistinguishableClasses) {
  SynthSpec spec;
  spec.per_class = {200, 200, 200};
  spec.separation = 0.0;
  spec.seed = 3;
  const auto samples = generate_samples(spec, 0);
  std::array<Eigen::VectorXd, 3> mean;
  mean.fill(Eigen::VectorXd::Zero(5));
  for (const auto& s : samples) mean[static_cast<int>(s.label)] += claws_features(s.trace).values;
  for (auto& m : mean) m /= 200.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) EXPECT_LT((mean[a] - mean[b]).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Synth, SeparationDrivesAccuracy) {
  SynthSpec spec;
  spec.per_class = {60, 60, 60};
  spec.seed = 5;
  spec.separation = 1.0;
  const double high = held_out_macro_f1(generate_samples(spec, 0));
  EXPECT_GE(high, 0.9);
  spec.separation = 0.0;
  const double none = held_out_macro_f1(generate_samples(spec, 0));
  EXPECT_LT(none, 0.5);
  EXPECT_GT(high, none);
}

TEST(Synth, AccuracyIsMonotoneInSeparationOnAverage) {
  std::array<double, 3> mean{};
  const std::array<double, 3> levels{0.0, 0.5, 1.0};
  for (std::uint64_t seed = 0; seed < 3; ++seed)
    for (std::size_t i = 0; i < 3; ++i) {
      SynthSpec spec;
      spec.per_class = {67, 67, 66};
      spec.seed = seed;
      spec.separation = levels[i];
      mean[i] += held_out_macro_f1(generate_samples(spec)) / 3.0;
    }
  EXPECT_LE(mean[0], mean[1] + 0.02);
  EXPECT_LE(mean[1], mean[2] + 0.02);
}

TEST(Synth, InvalidSpec) {
  auto code = [](const SynthSpec& spec) {
    try {
      validate_spec(spec);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Empty;
  };
  SynthSpec spec;
  spec.per_class[1] = 0;
  EXPECT_EQ(code(spec), ErrorCode::InvalidSpec);
  spec = {};
  spec.separation = 1.5;
  EXPECT_EQ(code(spec), ErrorCode::InvalidSpec);
  spec = {};
  spec.section_profiles[0][2] = 0.0;
  EXPECT_EQ(code(spec), ErrorCode::InvalidSpec);
  spec = {};
  spec.prompt_len = 3;
  EXPECT_EQ(code(spec), ErrorCode::InvalidSpec);
  EXPECT_EQ(code(SynthSpec{}), ErrorCode::Empty);
}

}  // namespace
}  // namespace claws
