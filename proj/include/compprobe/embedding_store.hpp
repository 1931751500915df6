#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/crc.hpp>

namespace compprobe {

enum class TokenRole : std::uint8_t {
  kModifierSubword = 0,
  kHeadSubword = 1,
  kContext = 2,
  kCls = 3,
  kSep = 4,
  kIgnore = 5,
};

enum class ModelVariant : std::uint8_t { kCased = 0, kUncased = 1 };

inline constexpr ModelVariant kAllVariants[] = {ModelVariant::kCased, ModelVariant::kUncased};

std::string_view to_string(ModelVariant v);
std::optional<ModelVariant> parse_variant(std::string_view s);

// One sentence: roles per token and a layer-major [layer][token][dim] payload.
struct SentenceTensor {
  std::string compound;
  std::size_t n_tokens = 0;
  std::size_t n_layers = 0;
  std::size_t dim = 0;
  std::vector<TokenRole> roles;
  std::vector<float> vectors;

  SentenceTensor() = default;
  SentenceTensor(std::string compound, std::size_t n_tokens, std::size_t n_layers, std::size_t dim);

  std::span<float> token(std::size_t layer, std::size_t tok) {
    return {vectors.data() + (layer * n_tokens + tok) * dim, dim};
  }
  std::span<const float> token(std::size_t layer, std::size_t tok) const {
    return {vectors.data() + (layer * n_tokens + tok) * dim, dim};
  }

  friend bool operator==(const SentenceTensor&, const SentenceTensor&) = default;
};

// Throws ValidationError unless: >=1 modifier, >=1 head, >=1 context token,
// exactly one CLS and one SEP.
void validate_roles(std::span<const TokenRole> roles);

// Role invariants, payload size, and finiteness. `index` is used in messages.
void validate_tensor(const SentenceTensor& t, std::size_t index);

struct EmbeddingHeader {
  static constexpr char kMagic[4] = {'C', 'E', 'M', 'B'};
  static constexpr std::uint16_t kVersion = 1;
  static constexpr std::size_t kBytes = 4 + 2 + 1 + 2 + 1 + 4;

  std::uint16_t version = kVersion;
  ModelVariant variant = ModelVariant::kCased;
  std::uint16_t dim = 768;
  std::uint8_t n_layers = 13;
  std::uint32_t sentence_count = 0;

  friend bool operator==(const EmbeddingHeader&, const EmbeddingHeader&) = default;
};

// CRC-64/XZ. The trailing checksum covers every byte that precedes it.
using Crc64 = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true>;

// Streams records to `<path>.tmp` and renames into place on finish(). The
// header's sentence_count must be known up front; finish() checks it.
class EmbeddingWriter {
 public:
  EmbeddingWriter(std::filesystem::path path, const EmbeddingHeader& header);
  ~EmbeddingWriter();
  EmbeddingWriter(const EmbeddingWriter&) = delete;
  EmbeddingWriter& operator=(const EmbeddingWriter&) = delete;

  void write(const SentenceTensor& t);
  void finish();

 private:
  void put(const void* data, std::size_t n);

  std::filesystem::path path_;
  std::filesystem::path tmp_;
  EmbeddingHeader header_;
  std::ofstream out_;
  Crc64 crc_;
  std::uint32_t written_ = 0;
  bool finished_ = false;
};

// Sequential reader holding one record at a time. The checksum is verified
// when next() reaches the end of the stream.
class EmbeddingReader {
 public:
  // An empty `compound` is taken from a "<compound>.<variant>.cemb" file name.
  explicit EmbeddingReader(std::filesystem::path path, std::string compound = {});

  const EmbeddingHeader& header() const { return header_; }

  // Fills `t` and returns true, or verifies the footer and returns false.
  bool next(SentenceTensor& t);

 private:
  void get(void* data, std::size_t n, const char* what);

  std::filesystem::path path_;
  std::string compound_;
  std::ifstream in_;
  std::uint64_t file_size_ = 0;
  std::uint64_t offset_ = 0;
  EmbeddingHeader header_;
  Crc64 crc_;
  std::uint32_t read_ = 0;
  bool done_ = false;
};

void write_embeddings(const std::filesystem::path& path, EmbeddingHeader header,
                      std::span<const SentenceTensor> tensors);
std::vector<SentenceTensor> read_embeddings(const std::filesystem::path& path,
                                            EmbeddingHeader* header = nullptr);

// "<compound>.<variant>.cemb"
std::string embedding_file_name(std::string_view compound, ModelVariant variant);

}  // namespace compprobe
