#include "eqr/trace_model.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "eqr/error.hpp"
#include "eqr/numeric.hpp"
#include "json.hpp"

namespace eqr {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kHeaderSize = 4 + 4 + 1 + 1 + 4 + 4;

std::size_t dtype_width(Dtype dtype) {
  switch (dtype) {
    case Dtype::kF16: return 2;
    case Dtype::kF32: return 4;
    case Dtype::kF64: return 8;
  }
  return 0;
}

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(std::span<const char> bytes) {
    for (char c : bytes) out_.push_back(static_cast<std::uint8_t>(c));
  }

  void value(double v, Dtype dtype) {
    switch (dtype) {
      case Dtype::kF16: {
        const std::uint16_t bits = double_to_half(v);
        if ((bits & 0x7C00u) == 0x7C00u) {
          throw Error(ErrorCode::kUnrepresentableValue,
                      "value " + std::to_string(v) + " overflows f16");
        }
        u16(bits);
        break;
      }
      case Dtype::kF32: {
        const auto f = static_cast<float>(v);
        if (std::isinf(f)) {
          throw Error(ErrorCode::kUnrepresentableValue,
                      "value " + std::to_string(v) + " overflows f32");
        }
        u32(std::bit_cast<std::uint32_t>(f));
        break;
      }
      case Dtype::kF64:
        u64(std::bit_cast<std::uint64_t>(v));
        break;
    }
  }

  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) { pos_ += n; }

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
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  double value(Dtype dtype) {
    switch (dtype) {
      case Dtype::kF16: return half_to_double(u16());
      case Dtype::kF32: return static_cast<double>(std::bit_cast<float>(u32()));
      case Dtype::kF64: return std::bit_cast<double>(u64());
    }
    return 0.0;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// Walks the step table without decoding values. Returns the offset where the
// CRC trailer should start, or nullopt if the buffer is too short for the
// structure its own counts describe.
std::optional<std::size_t> structural_end(std::span<const std::uint8_t> bytes,
                                          const TraceHeader& header) {
  ByteReader r(bytes);
  r.skip(kHeaderSize);
  const std::size_t width = dtype_width(header.dtype);
  for (std::uint32_t s = 0; s < header.step_count; ++s) {
    if (!r.has(4)) return std::nullopt;
    const std::uint64_t tokens = r.u32();
    const std::uint64_t n = tokens * header.vocab_size * width;
    if (n > bytes.size() || !r.has(static_cast<std::size_t>(n))) return std::nullopt;
    r.skip(static_cast<std::size_t>(n));
  }
  if (!r.has(4)) return std::nullopt;
  return r.pos();
}

}  // namespace

std::string_view to_string(StorageMode mode) {
  return mode == StorageMode::kRawLogits ? "raw_logits" : "step_distributions";
}

std::string_view to_string(Dtype dtype) {
  switch (dtype) {
    case Dtype::kF16: return "f16";
    case Dtype::kF32: return "f32";
    case Dtype::kF64: return "f64";
  }
  return "?";
}

StorageMode storage_mode_from_string(std::string_view name) {
  if (name == "raw_logits" || name == "raw") return StorageMode::kRawLogits;
  if (name == "step_distributions" || name == "dist") return StorageMode::kStepDistributions;
  throw Error(ErrorCode::kFormat, "unknown storage mode '" + std::string(name) + "'");
}

Dtype dtype_from_string(std::string_view name) {
  if (name == "f16") return Dtype::kF16;
  if (name == "f32") return Dtype::kF32;
  if (name == "f64") return Dtype::kF64;
  throw Error(ErrorCode::kFormat, "unknown dtype '" + std::string(name) + "'");
}

std::optional<StorageMode> chain_mode(const ReasoningChain& chain) {
  if (chain.steps.empty()) return std::nullopt;
  const std::size_t index = chain.steps.front().index();
  for (const auto& step : chain.steps) {
    if (step.index() != index) return std::nullopt;
  }
  return index == 0 ? StorageMode::kRawLogits : StorageMode::kStepDistributions;
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::kTokenCount: return "token_count";
    case Rule::kVocabSize: return "vocab_size";
    case Rule::kShape: return "shape";
    case Rule::kNonFinite: return "finite";
    case Rule::kNegativeProb: return "nonnegative";
    case Rule::kSum: return "sum";
    case Rule::kModeMixed: return "mode_homogeneity";
    case Rule::kVocabMismatch: return "shared_vocab";
    case Rule::kStepCount: return "step_count";
    case Rule::kDifficulty: return "difficulty";
    case Rule::kTooShort: return "too_short";
  }
  return "?";
}

ValidationReport validate_chain(const ReasoningChain& chain) {
  ValidationReport report;
  auto add = [&](std::optional<std::size_t> step, Rule rule, std::string message) {
    report.push_back({step, rule, std::move(message)});
  };

  if (chain.meta.difficulty < 1) {
    add(std::nullopt, Rule::kDifficulty,
        "difficulty " + std::to_string(chain.meta.difficulty) + " < 1");
  }
  if (chain.meta.step_count != chain.steps.size()) {
    add(std::nullopt, Rule::kStepCount,
        "meta.step_count " + std::to_string(chain.meta.step_count) + " != " +
            std::to_string(chain.steps.size()) + " stored steps");
  }
  if (chain.steps.size() < 2) {
    add(std::nullopt, Rule::kTooShort, "fewer than 2 steps: too short for CSD/SFC");
  }
  if (!chain.steps.empty() && !chain_mode(chain)) {
    add(std::nullopt, Rule::kModeMixed, "chain mixes raw-logit and distribution steps");
  }

  std::optional<std::size_t> vocab;
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    const std::size_t step = i + 1;
    std::size_t step_vocab = 0;
    if (const auto* logits = std::get_if<StepLogits>(&chain.steps[i])) {
      step_vocab = logits->vocab_size;
      if (logits->token_count < 1) add(step, Rule::kTokenCount, "token_count < 1");
      if (logits->vocab_size < 2) add(step, Rule::kVocabSize, "vocab_size < 2");
      if (logits->values.size() != logits->token_count * logits->vocab_size) {
        add(step, Rule::kShape, "values size does not equal token_count * vocab_size");
      }
      for (double v : logits->values) {
        if (!std::isfinite(v)) {
          add(step, Rule::kNonFinite, "non-finite logit");
          break;
        }
      }
    } else {
      const auto& dist = std::get<StepDistribution>(chain.steps[i]);
      step_vocab = dist.vocab_size();
      if (step_vocab < 2) add(step, Rule::kVocabSize, "vocab_size < 2");
      bool finite = true;
      bool nonneg = true;
      for (double p : dist.probs) {
        finite = finite && std::isfinite(p);
        nonneg = nonneg && !(p < 0.0);
      }
      if (!finite) add(step, Rule::kNonFinite, "non-finite probability");
      if (!nonneg) add(step, Rule::kNegativeProb, "negative probability");
      if (finite) {
        const double sum = pairwise_sum(dist.probs);
        if (std::abs(sum - 1.0) > kDistributionSumTolerance) {
          std::ostringstream os;
          os.precision(17);
          os << "distribution sums to " << sum;
          add(step, Rule::kSum, os.str());
        }
      }
    }
    if (!vocab) {
      vocab = step_vocab;
    } else if (*vocab != step_vocab) {
      add(step, Rule::kVocabMismatch,
          "vocab_size " + std::to_string(step_vocab) + " != chain vocab " +
              std::to_string(*vocab));
    }
  }
  return report;
}

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks to stay within range.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = crc32(crc, bytes.data() + offset, static_cast<uInt>(n));
    offset += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint16_t double_to_half(double value) {
  const std::uint16_t sign = std::signbit(value) ? 0x8000u : 0u;
  if (std::isnan(value)) return 0x7E00u;
  const double a = std::abs(value);
  if (std::isinf(a)) return sign | 0x7C00u;
  if (a < 0x1.0p-14) {
    // Subnormal: multiples of 2^-24; the rounding mode is nearest-even.
    const double m = std::nearbyint(a * 0x1.0p24);
    return sign | static_cast<std::uint16_t>(m);  // m == 1024 is the smallest normal
  }
  int exp2 = 0;
  const double frac = std::frexp(a, &exp2);  // a = frac * 2^exp2, frac in [0.5, 1)
  int e = exp2 - 1;
  double mant = std::nearbyint((frac * 2.0 - 1.0) * 1024.0);
  if (mant >= 1024.0) {
    mant = 0.0;
    ++e;
  }
  if (e + 15 >= 31) return sign | 0x7C00u;
  return sign | static_cast<std::uint16_t>((e + 15) << 10) | static_cast<std::uint16_t>(mant);
}

double half_to_double(std::uint16_t bits) {
  const bool negative = (bits & 0x8000u) != 0;
  const int e = (bits >> 10) & 0x1F;
  const int m = bits & 0x3FF;
  double v = 0.0;
  if (e == 0) {
    v = std::ldexp(static_cast<double>(m), -24);
  } else if (e == 31) {
    v = m == 0 ? std::numeric_limits<double>::infinity()
               : std::numeric_limits<double>::quiet_NaN();
  } else {
    v = std::ldexp(1.0 + m / 1024.0, e - 15);
  }
  return negative ? -v : v;
}

std::vector<std::uint8_t> write_trace(const ReasoningChain& chain, Dtype dtype) {
  for (const auto& v : validate_chain(chain)) {
    if (v.rule == Rule::kTooShort) continue;
    throw Error(ErrorCode::kInvalidChain,
                "cannot write chain '" + chain.meta.question_id + "': " + v.message);
  }
  const auto mode = chain_mode(chain);
  if (!mode) {
    throw Error(ErrorCode::kInvalidChain, "cannot write a chain without steps");
  }

  std::size_t vocab = 0;
  if (*mode == StorageMode::kRawLogits) {
    vocab = std::get<StepLogits>(chain.steps.front()).vocab_size;
  } else {
    vocab = std::get<StepDistribution>(chain.steps.front()).vocab_size();
  }

  ByteWriter w;
  w.raw(kTraceMagic);
  w.u32(kTraceVersion);
  w.u8(static_cast<std::uint8_t>(*mode));
  w.u8(static_cast<std::uint8_t>(dtype));
  w.u32(static_cast<std::uint32_t>(vocab));
  w.u32(static_cast<std::uint32_t>(chain.steps.size()));
  for (const auto& step : chain.steps) {
    if (const auto* logits = std::get_if<StepLogits>(&step)) {
      w.u32(static_cast<std::uint32_t>(logits->token_count));
      for (double v : logits->values) w.value(v, dtype);
    } else {
      const auto& dist = std::get<StepDistribution>(step);
      w.u32(1);
      for (double p : dist.probs) w.value(p, dtype);
    }
  }
  const std::uint32_t crc = crc32_ieee(w.bytes());
  w.u32(crc);
  return std::move(w.bytes());
}

TraceHeader read_trace_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) {
    throw Error(ErrorCode::kTruncatedPayload, "payload shorter than the magic");
  }
  for (int i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<std::uint8_t>(kTraceMagic[i])) {
      throw Error(ErrorCode::kBadMagic, "payload does not start with 'EQRT'");
    }
  }
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::kTruncatedPayload, "payload shorter than the header");
  }
  ByteReader r(bytes);
  r.skip(4);
  TraceHeader h;
  h.version = r.u32();
  if (h.version != kTraceVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "container version " + std::to_string(h.version) + " (supported: " +
                    std::to_string(kTraceVersion) + ")");
  }
  const std::uint8_t mode = r.u8();
  const std::uint8_t dtype = r.u8();
  if (mode > 1) throw Error(ErrorCode::kFormat, "unknown mode byte " + std::to_string(mode));
  if (dtype > 2) throw Error(ErrorCode::kFormat, "unknown dtype byte " + std::to_string(dtype));
  h.mode = static_cast<StorageMode>(mode);
  h.dtype = static_cast<Dtype>(dtype);
  h.vocab_size = r.u32();
  h.step_count = r.u32();
  return h;
}

ReasoningChain read_trace(std::span<const std::uint8_t> bytes) {
  const TraceHeader h = read_trace_header(bytes);

  const bool crc_ok =
      bytes.size() >= kHeaderSize + 4 &&
      crc32_ieee(bytes.first(bytes.size() - 4)) ==
          ByteReader(bytes.subspan(bytes.size() - 4)).u32();
  const auto end = structural_end(bytes, h);
  if (!crc_ok) {
    if (!end) throw Error(ErrorCode::kTruncatedPayload, "payload ends inside the step table");
    throw Error(ErrorCode::kChecksumMismatch, "CRC32 of payload does not match trailer");
  }
  if (!end || *end + 4 != bytes.size()) {
    throw Error(ErrorCode::kFormat, "step table length disagrees with payload size");
  }
  if (h.vocab_size < 2) {
    throw Error(ErrorCode::kFormat, "vocab_size " + std::to_string(h.vocab_size) + " < 2");
  }

  ReasoningChain chain;
  chain.meta.step_count = h.step_count;
  chain.steps.reserve(h.step_count);
  ByteReader r(bytes);
  r.skip(kHeaderSize);
  for (std::uint32_t s = 0; s < h.step_count; ++s) {
    const std::uint32_t tokens = r.u32();
    if (h.mode == StorageMode::kStepDistributions) {
      if (tokens != 1) {
        throw Error(ErrorCode::kFormat, "distribution step " + std::to_string(s + 1) +
                                            " has token_count " + std::to_string(tokens));
      }
      StepDistribution dist;
      dist.probs.resize(h.vocab_size);
      for (auto& p : dist.probs) p = r.value(h.dtype);
      chain.steps.emplace_back(std::move(dist));
    } else {
      StepLogits logits;
      logits.token_count = tokens;
      logits.vocab_size = h.vocab_size;
      logits.values.resize(static_cast<std::size_t>(tokens) * h.vocab_size);
      for (auto& v : logits.values) v = r.value(h.dtype);
      chain.steps.emplace_back(std::move(logits));
    }
  }
  return chain;
}

ChainMeta TraceManifest::meta_for(const ManifestEntry& entry) const {
  ChainMeta meta;
  meta.question_id = entry.question_id;
  meta.dataset_id = dataset_id;
  meta.model_id = model_id;
  meta.difficulty = entry.difficulty;
  meta.correct = entry.correct;
  meta.step_count = entry.step_count;
  return meta;
}

std::string manifest_to_json(const TraceManifest& manifest) {
  ordered_json doc;
  doc["schema_version"] = manifest.schema_version;
  doc["dataset_id"] = manifest.dataset_id;
  doc["model_id"] = manifest.model_id;
  doc["vocab_size"] = manifest.vocab_size;
  doc["mode"] = std::string(to_string(manifest.mode));
  doc["dtype"] = std::string(to_string(manifest.dtype));
  doc["chains"] = ordered_json::array();
  for (const auto& e : manifest.chains) {
    ordered_json row;
    row["question_id"] = e.question_id;
    row["file"] = e.file;
    row["difficulty"] = e.difficulty;
    row["correct"] = e.correct;
    row["step_count"] = e.step_count;
    doc["chains"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

TraceManifest manifest_from_json(std::string_view text) {
  try {
    const auto doc = ordered_json::parse(text);
    TraceManifest m;
    m.schema_version = doc.at("schema_version").get<int>();
    m.dataset_id = doc.at("dataset_id").get<std::string>();
    m.model_id = doc.at("model_id").get<std::string>();
    m.vocab_size = doc.at("vocab_size").get<std::size_t>();
    m.mode = storage_mode_from_string(doc.at("mode").get<std::string>());
    m.dtype = dtype_from_string(doc.at("dtype").get<std::string>());
    for (const auto& row : doc.at("chains")) {
      ManifestEntry e;
      e.question_id = row.at("question_id").get<std::string>();
      e.file = row.at("file").get<std::string>();
      e.difficulty = row.at("difficulty").get<int>();
      e.correct = row.at("correct").get<bool>();
      e.step_count = row.at("step_count").get<std::size_t>();
      m.chains.push_back(std::move(e));
    }
    std::vector<std::string_view> ids;
    for (const auto& e : m.chains) ids.push_back(e.question_id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw Error(ErrorCode::kFormat, "duplicate question_id in manifest");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed manifest: ") + e.what());
  }
}

TraceManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_text_file(path));
}

void save_manifest(const TraceManifest& manifest, const std::filesystem::path& path) {
  write_text_file(path, manifest_to_json(manifest));
}

ReasoningChain load_chain(const TraceManifest& manifest, const ManifestEntry& entry,
                          const std::filesystem::path& dir) {
  const auto path = dir / entry.file;
  ReasoningChain chain;
  Dtype dtype = Dtype::kF64;
  try {
    const auto bytes = read_file_bytes(path);
    chain = read_trace(bytes);
    dtype = read_trace_header(bytes).dtype;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  if (chain.meta.step_count != entry.step_count) {
    throw Error(ErrorCode::kFormat, path.string() + ": file holds " +
                                        std::to_string(chain.meta.step_count) +
                                        " steps, manifest says " +
                                        std::to_string(entry.step_count));
  }
  chain.meta = manifest.meta_for(entry);
  // Narrowed probabilities no longer sum to 1 within the validation tolerance.
  if (dtype != Dtype::kF64) {
    for (auto& step : chain.steps) {
      if (auto* d = std::get_if<StepDistribution>(&step)) {
        const double total = pairwise_sum(std::span<const double>(d->probs));
        if (total > 0.0) {
          for (auto& p : d->probs) p /= total;
        }
      }
    }
  }
  return chain;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace eqr
