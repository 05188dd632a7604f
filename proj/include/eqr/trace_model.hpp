#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace eqr {

// Raw logit matrix of one reasoning step: token_count rows of vocab_size
// scores, row-major.
struct StepLogits {
  std::size_t token_count = 0;
  std::size_t vocab_size = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(values).subspan(t * vocab_size, vocab_size);
  }

  bool operator==(const StepLogits&) const = default;
};

// One probability vector per step. `strictly_positive` is set by smoothing
// and marks the vector as safe for use as the reference side of KL.
struct StepDistribution {
  std::vector<double> probs;
  bool strictly_positive = false;

  std::size_t vocab_size() const { return probs.size(); }

  bool operator==(const StepDistribution& other) const {
    return probs == other.probs;
  }
};

using Step = std::variant<StepLogits, StepDistribution>;

struct ChainMeta {
  std::string question_id;
  std::string dataset_id;
  std::string model_id;
  int difficulty = 1;
  bool correct = false;
  std::size_t step_count = 0;

  bool operator==(const ChainMeta&) const = default;
};

struct ReasoningChain {
  ChainMeta meta;
  std::vector<Step> steps;
  std::vector<std::string> step_texts;

  bool operator==(const ReasoningChain&) const = default;
};

enum class StorageMode : std::uint8_t { kRawLogits = 0, kStepDistributions = 1 };
enum class Dtype : std::uint8_t { kF16 = 0, kF32 = 1, kF64 = 2 };

std::string_view to_string(StorageMode mode);
std::string_view to_string(Dtype dtype);
StorageMode storage_mode_from_string(std::string_view name);
Dtype dtype_from_string(std::string_view name);

// Mode of a chain, or nullopt when it has no steps or mixes modes.
std::optional<StorageMode> chain_mode(const ReasoningChain& chain);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class Rule {
  kTokenCount,      // token_count >= 1
  kVocabSize,       // vocab_size >= 2
  kShape,           // values.size() == token_count * vocab_size
  kNonFinite,       // every logit / probability finite
  kNegativeProb,    // probabilities >= 0
  kSum,             // probabilities sum to 1 within 1e-9
  kModeMixed,       // all steps raw or all steps distributions
  kVocabMismatch,   // every step has the chain's vocab size
  kStepCount,       // meta.step_count == steps.size()
  kDifficulty,      // difficulty >= 1
  kTooShort,        // fewer than 2 steps: storable, but no CSD/SFC rows
};

std::string_view to_string(Rule rule);

struct Violation {
  std::optional<std::size_t> step;  // 1-based step index when step-specific
  Rule rule;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

inline constexpr double kDistributionSumTolerance = 1e-9;

ValidationReport validate_chain(const ReasoningChain& chain);

// ---------------------------------------------------------------------------
// Binary container (one chain per file, little-endian):
//   "EQRT" | version u32 | mode u8 | dtype u8 | vocab_size u32 | step_count u32
//   | per step: token_count u32, row-major values | CRC32 of preceding bytes
// Chain metadata other than step_count lives in the manifest.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kTraceVersion = 1;
inline constexpr char kTraceMagic[4] = {'E', 'Q', 'R', 'T'};

std::vector<std::uint8_t> write_trace(const ReasoningChain& chain, Dtype dtype);
ReasoningChain read_trace(std::span<const std::uint8_t> bytes);

// Header fields of a decoded container.
struct TraceHeader {
  std::uint32_t version = 0;
  StorageMode mode = StorageMode::kRawLogits;
  Dtype dtype = Dtype::kF32;
  std::uint32_t vocab_size = 0;
  std::uint32_t step_count = 0;
};
TraceHeader read_trace_header(std::span<const std::uint8_t> bytes);

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes);

// IEEE binary16 conversion helpers (round to nearest even).
std::uint16_t double_to_half(double value);
double half_to_double(std::uint16_t bits);

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string question_id;
  std::string file;
  int difficulty = 1;
  bool correct = false;
  std::size_t step_count = 0;
};

struct TraceManifest {
  int schema_version = 1;
  std::string dataset_id;
  std::string model_id;
  std::size_t vocab_size = 0;
  StorageMode mode = StorageMode::kStepDistributions;
  Dtype dtype = Dtype::kF64;
  std::vector<ManifestEntry> chains;

  ChainMeta meta_for(const ManifestEntry& entry) const;
};

inline constexpr std::string_view kManifestFileName = "manifest.json";

std::string manifest_to_json(const TraceManifest& manifest);
TraceManifest manifest_from_json(std::string_view text);

// Throws kIo when the file cannot be read.
TraceManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const TraceManifest& manifest, const std::filesystem::path& path);

// Reads the file named by `entry` (relative to `dir`) and attaches the
// manifest metadata. Distribution steps stored as f16/f32 are renormalized in
// double precision. Throws kFormat if the decoded step count disagrees with
// the manifest row.
ReasoningChain load_chain(const TraceManifest& manifest, const ManifestEntry& entry,
                          const std::filesystem::path& dir);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace eqr
