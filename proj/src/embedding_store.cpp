#include "compprobe/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "compprobe/errors.hpp"

namespace compprobe {

static_assert(std::endian::native == std::endian::little,
              "embedding payload is written in host order and must be little-endian");

namespace {

template <typename T>
void store_le(unsigned char* dst, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<unsigned char>(v >> (8 * i));
}

template <typename T>
T load_le(const unsigned char* src) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(T(src[i]) << (8 * i));
  return v;
}

bool known_role(std::uint8_t b) { return b <= static_cast<std::uint8_t>(TokenRole::kIgnore); }

}  // namespace

std::string_view to_string(ModelVariant v) {
  return v == ModelVariant::kCased ? "cased" : "uncased";
}

std::optional<ModelVariant> parse_variant(std::string_view s) {
  if (s == "cased") return ModelVariant::kCased;
  if (s == "uncased") return ModelVariant::kUncased;
  return std::nullopt;
}

SentenceTensor::SentenceTensor(std::string compound_, std::size_t n_tokens_, std::size_t n_layers_,
                               std::size_t dim_)
    : compound(std::move(compound_)),
      n_tokens(n_tokens_),
      n_layers(n_layers_),
      dim(dim_),
      roles(n_tokens_, TokenRole::kContext),
      vectors(n_layers_ * n_tokens_ * dim_, 0.0f) {}

void validate_roles(std::span<const TokenRole> roles) {
  std::size_t counts[6] = {};
  for (TokenRole r : roles) {
    const auto b = static_cast<std::uint8_t>(r);
    if (!known_role(b)) throw ValidationError("unknown token role " + std::to_string(b));
    ++counts[b];
  }
  if (counts[0] == 0) throw ValidationError("no modifier subword");
  if (counts[1] == 0) throw ValidationError("no head subword");
  if (counts[2] == 0) throw ValidationError("no context token");
  if (counts[3] != 1) throw ValidationError("expected exactly one CLS token");
  if (counts[4] != 1) throw ValidationError("expected exactly one SEP token");
}

void validate_tensor(const SentenceTensor& t, std::size_t index) {
  const std::string where = "sentence " + std::to_string(index);
  if (t.roles.size() != t.n_tokens) throw ValidationError(where + ": role count != n_tokens");
  if (t.vectors.size() != t.n_layers * t.n_tokens * t.dim) {
    throw ValidationError(where + ": payload size does not match shape");
  }
  try {
    validate_roles(t.roles);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
  auto bad = std::find_if(t.vectors.begin(), t.vectors.end(),
                          [](float v) { return !std::isfinite(v); });
  if (bad != t.vectors.end()) {
    throw ValidationError(where + ": non-finite value at payload element " +
                          std::to_string(bad - t.vectors.begin()));
  }
}

EmbeddingWriter::EmbeddingWriter(std::filesystem::path path, const EmbeddingHeader& header)
    : path_(std::move(path)), header_(header) {
  if (header_.version != EmbeddingHeader::kVersion) {
    throw PreconditionError("unsupported embedding format version " +
                            std::to_string(header_.version));
  }
  if (header_.dim == 0 || header_.n_layers == 0) {
    throw PreconditionError("embedding header needs dim > 0 and n_layers > 0");
  }
  tmp_ = path_;
  tmp_ += ".tmp";
  out_.open(tmp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw MissingInputError("cannot create " + tmp_.string());

  unsigned char buf[EmbeddingHeader::kBytes];
  std::memcpy(buf, EmbeddingHeader::kMagic, 4);
  store_le<std::uint16_t>(buf + 4, header_.version);
  buf[6] = static_cast<unsigned char>(header_.variant);
  store_le<std::uint16_t>(buf + 7, header_.dim);
  buf[9] = header_.n_layers;
  store_le<std::uint32_t>(buf + 10, header_.sentence_count);
  put(buf, sizeof buf);
}

EmbeddingWriter::~EmbeddingWriter() {
  if (!finished_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_, ec);
  }
}

void EmbeddingWriter::put(const void* data, std::size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  crc_.process_bytes(data, n);
}

void EmbeddingWriter::write(const SentenceTensor& t) {
  if (finished_) throw PreconditionError("write after finish");
  if (t.dim != header_.dim || t.n_layers != header_.n_layers) {
    throw ValidationError("sentence " + std::to_string(written_) + ": shape (layers=" +
                          std::to_string(t.n_layers) + ", dim=" + std::to_string(t.dim) +
                          ") does not match header (layers=" + std::to_string(header_.n_layers) +
                          ", dim=" + std::to_string(header_.dim) + ")");
  }
  if (written_ == header_.sentence_count) {
    throw PreconditionError("more sentences than the header declares");
  }
  if (t.n_tokens > UINT32_MAX) throw ValidationError("too many tokens");
  validate_tensor(t, written_);

  unsigned char n[4];
  store_le<std::uint32_t>(n, static_cast<std::uint32_t>(t.n_tokens));
  put(n, 4);
  put(t.roles.data(), t.roles.size());
  put(t.vectors.data(), t.vectors.size() * sizeof(float));
  ++written_;
}

void EmbeddingWriter::finish() {
  if (finished_) return;
  if (written_ != header_.sentence_count) {
    throw PreconditionError("header declares " + std::to_string(header_.sentence_count) +
                            " sentences, " + std::to_string(written_) + " written");
  }
  unsigned char sum[8];
  store_le<std::uint64_t>(sum, crc_.checksum());
  out_.write(reinterpret_cast<const char*>(sum), 8);
  out_.close();
  if (!out_) throw std::runtime_error("write failed for " + tmp_.string());
  std::filesystem::rename(tmp_, path_);
  finished_ = true;
}

EmbeddingReader::EmbeddingReader(std::filesystem::path path, std::string compound)
    : path_(std::move(path)), compound_(std::move(compound)) {
  if (compound_.empty()) {
    // <compound>.<variant>.cemb
    std::string stem = path_.stem().string();
    const auto dot = stem.rfind('.');
    if (dot != std::string::npos && parse_variant(std::string_view(stem).substr(dot + 1))) {
      stem.resize(dot);
    }
    compound_ = stem;
  }
  in_.open(path_, std::ios::binary);
  if (!in_) throw MissingInputError("cannot open embedding file " + path_.string());
  file_size_ = std::filesystem::file_size(path_);

  unsigned char buf[EmbeddingHeader::kBytes];
  if (file_size_ < EmbeddingHeader::kBytes) {
    if (file_size_ >= 4) {
      in_.read(reinterpret_cast<char*>(buf), 4);
      if (std::memcmp(buf, EmbeddingHeader::kMagic, 4) != 0) {
        throw FormatError(path_.string() + ": bad magic, not an embedding file");
      }
    } else {
      throw FormatError(path_.string() + ": too short for an embedding file");
    }
    throw CorruptionError(path_.string() + ": truncated header");
  }
  get(buf, sizeof buf, "header");
  if (std::memcmp(buf, EmbeddingHeader::kMagic, 4) != 0) {
    throw FormatError(path_.string() + ": bad magic, not an embedding file");
  }
  header_.version = load_le<std::uint16_t>(buf + 4);
  if (header_.version != EmbeddingHeader::kVersion) {
    throw FormatError(path_.string() + ": unsupported format version " +
                      std::to_string(header_.version));
  }
  if (buf[6] > static_cast<unsigned char>(ModelVariant::kUncased)) {
    throw CorruptionError(path_.string() + ": invalid model variant byte");
  }
  header_.variant = static_cast<ModelVariant>(buf[6]);
  header_.dim = load_le<std::uint16_t>(buf + 7);
  header_.n_layers = buf[9];
  header_.sentence_count = load_le<std::uint32_t>(buf + 10);
  if (header_.dim == 0 || header_.n_layers == 0) {
    throw CorruptionError(path_.string() + ": zero dim or layer count in header");
  }
}

void EmbeddingReader::get(void* data, std::size_t n, const char* what) {
  if (offset_ + n > file_size_) {
    throw CorruptionError(path_.string() + ": truncated " + what + " at offset " +
                          std::to_string(offset_));
  }
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw CorruptionError(path_.string() + ": short read in " + what + " at offset " +
                          std::to_string(offset_));
  }
  crc_.process_bytes(data, n);
  offset_ += n;
}

bool EmbeddingReader::next(SentenceTensor& t) {
  if (done_) return false;
  if (read_ == header_.sentence_count) {
    if (offset_ + 8 > file_size_) {
      throw CorruptionError(path_.string() + ": truncated checksum at offset " +
                            std::to_string(offset_));
    }
    const std::uint64_t expected = crc_.checksum();
    unsigned char sum[8];
    in_.read(reinterpret_cast<char*>(sum), 8);
    if (load_le<std::uint64_t>(sum) != expected) {
      throw CorruptionError(path_.string() + ": checksum mismatch");
    }
    if (offset_ + 8 != file_size_) {
      throw CorruptionError(path_.string() + ": trailing bytes after checksum");
    }
    done_ = true;
    return false;
  }

  const std::uint64_t record_offset = offset_;
  unsigned char nb[4];
  get(nb, 4, "record length");
  const std::uint64_t n_tokens = load_le<std::uint32_t>(nb);
  const std::uint64_t record_bytes =
      n_tokens + n_tokens * header_.n_layers * header_.dim * sizeof(float);
  if (offset_ + record_bytes + 8 > file_size_) {
    throw CorruptionError(path_.string() + ": truncated record " + std::to_string(read_) +
                          " at offset " + std::to_string(record_offset));
  }

  t.compound = compound_;
  t.n_tokens = n_tokens;
  t.n_layers = header_.n_layers;
  t.dim = header_.dim;
  t.roles.resize(n_tokens);
  t.vectors.resize(n_tokens * header_.n_layers * header_.dim);
  get(t.roles.data(), n_tokens, "roles");
  get(t.vectors.data(), t.vectors.size() * sizeof(float), "payload");
  for (TokenRole r : t.roles) {
    if (!known_role(static_cast<std::uint8_t>(r))) {
      throw CorruptionError(path_.string() + ": invalid role byte in record at offset " +
                            std::to_string(record_offset));
    }
  }
  try {
    validate_tensor(t, read_);
  } catch (const ValidationError& e) {
    throw CorruptionError(path_.string() + ": " + e.what() + " (record at offset " +
                          std::to_string(record_offset) + ")");
  }
  ++read_;
  return true;
}

void write_embeddings(const std::filesystem::path& path, EmbeddingHeader header,
                      std::span<const SentenceTensor> tensors) {
  header.sentence_count = static_cast<std::uint32_t>(tensors.size());
  EmbeddingWriter w(path, header);
  for (const auto& t : tensors) w.write(t);
  w.finish();
}

std::vector<SentenceTensor> read_embeddings(const std::filesystem::path& path,
                                            EmbeddingHeader* header) {
  EmbeddingReader r(path);
  if (header) *header = r.header();
  std::vector<SentenceTensor> out;
  SentenceTensor t;
  while (r.next(t)) out.push_back(t);
  return out;
}

std::string embedding_file_name(std::string_view compound, ModelVariant variant) {
  std::string name(compound);
  name += '.';
  name += to_string(variant);
  name += ".cemb";
  return name;
}

}  // namespace compprobe
