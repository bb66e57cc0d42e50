#include "claws/trace.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "claws/error.hpp"

namespace claws {

namespace {

[[noreturn]] void violation(const std::string& what) {
  throw Error(ErrorCode::InvariantViolation, what);
}

template <typename Derived>
bool same_bits(const Eigen::DenseBase<Derived>& a, const Eigen::DenseBase<Derived>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (std::bit_cast<std::uint32_t>(a(i, j)) != std::bit_cast<std::uint32_t>(b(i, j)))
        return false;
  return true;
}

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  template <typename Derived>
  void floats(const Eigen::DenseBase<Derived>& m) {
    // Row-major traversal regardless of storage order.
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) f32(m(i, j));
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return bytes_[pos_++]; }
  std::uint16_t u16() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }

  template <typename Derived>
  void floats(Eigen::DenseBase<Derived>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = f32();
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(SectionId id) {
  switch (id) {
    case SectionId::Guideline: return "G";
    case SectionId::Problem: return "P";
    case SectionId::Solutions: return "S";
    case SectionId::Instruction: return "I";
    case SectionId::Response: return "R";
  }
  return "?";
}

SectionTable make_sections(std::array<std::uint32_t, 4> prompt_lengths,
                           std::uint32_t response_len) {
  SectionTable table{};
  std::uint32_t cursor = 0;
  for (std::size_t s = 0; s < 4; ++s) {
    table[s] = {static_cast<SectionId>(s), cursor, cursor + prompt_lengths[s]};
    cursor += prompt_lengths[s];
  }
  table[4] = {SectionId::Response, cursor, cursor + response_len};
  return table;
}

bool GenerationTrace::operator==(const GenerationTrace& other) const {
  if (prompt_len != other.prompt_len || response_len != other.response_len ||
      heads != other.heads || hidden_dim != other.hidden_dim || topk != other.topk ||
      layer_index != other.layer_index || sections != other.sections)
    return false;
  if (attention.size() != other.attention.size()) return false;
  for (std::size_t h = 0; h < attention.size(); ++h)
    if (!same_bits(attention[h], other.attention[h])) return false;
  return same_bits(chosen_logprob, other.chosen_logprob) &&
         same_bits(topk_logprob, other.topk_logprob) && same_bits(hidden, other.hidden);
}

void validate_trace(const GenerationTrace& tr) {
  const std::uint64_t k = tr.prompt_len;
  const std::uint64_t T = tr.response_len;
  if (T < 1) violation("response_len must be >= 1");
  if (tr.heads < 1) violation("heads must be >= 1");
  if (tr.hidden_dim < 1) violation("hidden_dim must be >= 1");
  if (tr.topk < 1) violation("topk must be >= 1");
  if (k + T > 0xFFFFFFFFull) violation("prompt_len + response_len overflows u32");

  std::uint64_t cursor = 0;
  for (std::size_t s = 0; s < kNumSections; ++s) {
    const SectionSpan& span = tr.sections[s];
    if (static_cast<std::size_t>(span.id) != s)
      violation(fmt::format("section {} has id {}, expected {}", s,
                            static_cast<int>(span.id), s));
    if (span.start >= span.end)
      violation(fmt::format("section {} is empty or inverted [{}, {})", to_string(span.id),
                            span.start, span.end));
    if (span.start != cursor)
      violation(fmt::format("section {} starts at {}, expected {}", to_string(span.id),
                            span.start, cursor));
    cursor = span.end;
    if (s == 3 && cursor != k)
      violation(fmt::format("prompt sections end at {}, prompt_len is {}", cursor, k));
  }
  if (cursor != k + T)
    violation(fmt::format("response section ends at {}, expected {}", cursor, k + T));

  const auto n = static_cast<Eigen::Index>(T);
  const auto width = static_cast<Eigen::Index>(k + T);
  if (tr.attention.size() != tr.heads)
    violation(fmt::format("{} attention heads stored, header says {}", tr.attention.size(),
                          tr.heads));
  for (std::size_t h = 0; h < tr.attention.size(); ++h) {
    const RowMatrixXf& a = tr.attention[h];
    if (a.rows() != n || a.cols() != width)
      violation(fmt::format("attention head {} has shape {}x{}, expected {}x{}", h, a.rows(),
                            a.cols(), n, width));
    for (Eigen::Index t = 0; t < n; ++t) {
      const Eigen::Index prefix = static_cast<Eigen::Index>(k) + t + 1;
      double sum = 0.0;
      for (Eigen::Index i = 0; i < width; ++i) {
        const float v = a(t, i);
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
          violation(fmt::format("attention[{}][{}][{}] = {} outside [0, 1]", h, t, i, v));
        if (i >= prefix) {
          if (v != 0.0f)
            violation(fmt::format("attention[{}][{}][{}] = {} in padded region", h, t, i, v));
        } else {
          sum += v;
        }
      }
      if (std::abs(sum - 1.0) > kAttentionRowTolerance)
        violation(fmt::format("attention row [{}][{}] sums to {}", h, t, sum));
    }
  }

  if (tr.chosen_logprob.size() != n)
    violation(fmt::format("chosen_logprob has {} entries, expected {}",
                          tr.chosen_logprob.size(), n));
  const auto K = static_cast<Eigen::Index>(tr.topk);
  if (tr.topk_logprob.rows() != n || tr.topk_logprob.cols() != K)
    violation(fmt::format("topk_logprob has shape {}x{}, expected {}x{}",
                          tr.topk_logprob.rows(), tr.topk_logprob.cols(), n, K));
  for (Eigen::Index t = 0; t < n; ++t) {
    const float chosen = tr.chosen_logprob[t];
    if (!std::isfinite(chosen) || chosen > 0.0f)
      violation(fmt::format("chosen_logprob[{}] = {} is not a finite log-probability", t,
                            chosen));
    for (Eigen::Index j = 0; j < K; ++j) {
      const float v = tr.topk_logprob(t, j);
      // -inf is a legal log-probability (p = 0); NaN and +inf are not.
      if (std::isnan(v) || v > 0.0f)
        violation(fmt::format("topk_logprob[{}][{}] = {} is not a log-probability", t, j, v));
      if (j > 0 && v > tr.topk_logprob(t, j - 1))
        violation(fmt::format("topk_logprob row {} increases at column {}", t, j));
    }
    if (static_cast<double>(chosen) >
        static_cast<double>(tr.topk_logprob(t, 0)) + kChosenVsTopTolerance)
      violation(fmt::format("chosen_logprob[{}] = {} exceeds top candidate {}", t, chosen,
                            tr.topk_logprob(t, 0)));
  }

  if (tr.hidden.rows() != n || tr.hidden.cols() != static_cast<Eigen::Index>(tr.hidden_dim))
    violation(fmt::format("hidden has shape {}x{}, expected {}x{}", tr.hidden.rows(),
                          tr.hidden.cols(), n, tr.hidden_dim));
  if (!tr.hidden.allFinite()) violation("hidden contains non-finite values");
}

std::vector<std::uint8_t> write_trace(const GenerationTrace& tr) {
  validate_trace(tr);
  const std::size_t T = tr.response_len;
  const std::size_t floats = T + T * tr.topk + std::size_t{tr.heads} * T * tr.context_len() +
                             T * tr.hidden_dim;
  ByteWriter w(kTraceHeaderBytes + 4 * floats);
  for (char c : kTraceMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(kTraceVersion);
  w.u16(0);
  w.u32(tr.prompt_len);
  w.u32(tr.response_len);
  w.u32(tr.heads);
  w.u32(tr.hidden_dim);
  w.u32(tr.topk);
  w.u32(tr.layer_index);
  for (const SectionSpan& s : tr.sections) {
    w.u8(static_cast<std::uint8_t>(s.id));
    w.u32(s.start);
    w.u32(s.end);
  }
  w.floats(tr.chosen_logprob);
  w.floats(tr.topk_logprob);
  for (const RowMatrixXf& a : tr.attention) w.floats(a);
  w.floats(tr.hidden);
  return w.take();
}

GenerationTrace read_trace(std::span<const std::uint8_t> bytes) {
  const std::size_t got = bytes.size();
  for (std::size_t i = 0; i < kTraceMagic.size(); ++i) {
    if (i >= got)
      throw Error(ErrorCode::Truncated,
                  fmt::format("expected at least {} bytes, got {}", kTraceHeaderBytes, got));
    if (bytes[i] != static_cast<std::uint8_t>(kTraceMagic[i]))
      throw Error(ErrorCode::BadMagic, "file does not start with \"CLWT\"");
  }
  if (got < 8)
    throw Error(ErrorCode::Truncated,
                fmt::format("expected at least {} bytes, got {}", kTraceHeaderBytes, got));

  ByteReader r(bytes);
  for (std::size_t i = 0; i < kTraceMagic.size(); ++i) r.u8();
  const std::uint16_t version = r.u16();
  const std::uint16_t flags = r.u16();
  if (version != kTraceVersion)
    throw Error(ErrorCode::UnsupportedVersion, fmt::format("version {}", version));
  if (flags != 0)
    throw Error(ErrorCode::UnsupportedVersion, fmt::format("flags {:#06x}", flags));
  if (got < kTraceHeaderBytes)
    throw Error(ErrorCode::Truncated,
                fmt::format("expected at least {} bytes, got {}", kTraceHeaderBytes, got));

  GenerationTrace tr;
  tr.prompt_len = r.u32();
  tr.response_len = r.u32();
  tr.heads = r.u32();
  tr.hidden_dim = r.u32();
  tr.topk = r.u32();
  tr.layer_index = r.u32();
  for (std::size_t s = 0; s < kNumSections; ++s) {
    const std::uint8_t id = r.u8();
    if (id != s)
      throw Error(ErrorCode::InvariantViolation,
                  fmt::format("section table entry {} has id {}", s, id));
    tr.sections[s].id = static_cast<SectionId>(id);
    tr.sections[s].start = r.u32();
    tr.sections[s].end = r.u32();
  }

  // 128-bit arithmetic: hostile headers must not wrap the size computation.
  using u128 = unsigned __int128;
  const u128 T = tr.response_len;
  const u128 n_floats = T + T * tr.topk + u128{tr.heads} * T * (u128{tr.prompt_len} + T) +
                        T * tr.hidden_dim;
  const u128 expected = kTraceHeaderBytes + 4 * n_floats;
  if (u128{got} < expected) {
    const auto shown = expected > u128{UINT64_MAX} ? UINT64_MAX : static_cast<std::uint64_t>(expected);
    throw Error(ErrorCode::Truncated, fmt::format("expected {} bytes, got {}", shown, got));
  }
  if (u128{got} > expected)
    throw Error(ErrorCode::InvariantViolation,
                fmt::format("{} trailing bytes after the last array",
                            static_cast<std::uint64_t>(u128{got} - expected)));
  if (tr.response_len < 1 || tr.heads < 1 || tr.hidden_dim < 1 || tr.topk < 1)
    throw Error(ErrorCode::InvariantViolation,
                "response_len, heads, hidden_dim and topk must all be >= 1");

  const auto n = static_cast<Eigen::Index>(tr.response_len);
  tr.chosen_logprob.resize(n);
  r.floats(tr.chosen_logprob);
  tr.topk_logprob.resize(n, tr.topk);
  r.floats(tr.topk_logprob);
  tr.attention.assign(tr.heads, RowMatrixXf(n, static_cast<Eigen::Index>(tr.context_len())));
  for (RowMatrixXf& a : tr.attention) r.floats(a);
  tr.hidden.resize(n, tr.hidden_dim);
  r.floats(tr.hidden);

  validate_trace(tr);
  return tr;
}

void save_trace(const std::filesystem::path& path, const GenerationTrace& trace) {
  const std::vector<std::uint8_t> bytes = write_trace(trace);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

GenerationTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_trace(bytes);
}

}  // namespace claws
