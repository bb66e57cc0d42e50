#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace claws {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXf = RowMatrix<float>;

enum class SectionId : std::uint8_t {
  Guideline = 0,
  Problem = 1,
  Solutions = 2,
  Instruction = 3,
  Response = 4,
};

inline constexpr std::size_t kNumSections = 5;

std::string_view to_string(SectionId id);

/// Half-open token range [start, end).
struct SectionSpan {
  SectionId id = SectionId::Guideline;
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  std::uint32_t length() const { return end - start; }
  bool operator==(const SectionSpan&) const = default;
};

using SectionTable = std::array<SectionSpan, kNumSections>;

/// Builds the section table for a prompt made of four consecutive sections of
/// the given token lengths followed by a response of `response_len` tokens.
SectionTable make_sections(std::array<std::uint32_t, 4> prompt_lengths,
                           std::uint32_t response_len);

/// One generation episode as recorded from a single decoder layer.
///
/// Attention is stored per head as a T x (k+T) matrix. Row t (0-based) is the
/// attention of decoding step t over the causal prefix [0, k+t], with exact
/// zeros in the padded positions (k+t, k+T).
struct GenerationTrace {
  std::uint32_t prompt_len = 0;
  std::uint32_t response_len = 0;
  std::uint32_t heads = 0;
  std::uint32_t hidden_dim = 0;
  std::uint32_t topk = 0;
  std::uint32_t layer_index = 0;
  SectionTable sections{};

  std::vector<RowMatrixXf> attention;  // heads x [T x (k+T)]
  Eigen::VectorXf chosen_logprob;      // [T]
  RowMatrixXf topk_logprob;            // [T x K], rows descending
  RowMatrixXf hidden;                  // [T x d]

  std::uint32_t context_len() const { return prompt_len + response_len; }
  const SectionSpan& section(SectionId id) const {
    return sections[static_cast<std::size_t>(id)];
  }

  /// Exact equality: shapes, metadata and float bit patterns.
  bool operator==(const GenerationTrace& other) const;
};

/// Throws Error(InvariantViolation) naming the first violated invariant.
void validate_trace(const GenerationTrace& trace);

inline constexpr double kAttentionRowTolerance = 1e-4;
inline constexpr double kChosenVsTopTolerance = 1e-6;

inline constexpr std::array<char, 4> kTraceMagic{'C', 'L', 'W', 'T'};
inline constexpr std::uint16_t kTraceVersion = 1;
/// magic + version + flags + six u32 + five (u8, u32, u32) section entries.
inline constexpr std::size_t kTraceHeaderBytes = 4 + 2 + 2 + 6 * 4 + 5 * 9;

std::vector<std::uint8_t> write_trace(const GenerationTrace& trace);
GenerationTrace read_trace(std::span<const std::uint8_t> bytes);

void save_trace(const std::filesystem::path& path, const GenerationTrace& trace);
GenerationTrace load_trace(const std::filesystem::path& path);

}  // namespace claws
