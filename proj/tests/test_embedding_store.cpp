#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "compprobe/embedding_store.hpp"
#include "compprobe/errors.hpp"
#include "test_util.hpp"

using namespace compprobe;
namespace fs = std::filesystem;

namespace {

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void dump(const fs::path& p, const std::vector<char>& bytes) {
  std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

EmbeddingHeader small_header(ModelVariant v = ModelVariant::kUncased) {
  EmbeddingHeader h;
  h.variant = v;
  h.dim = 6;
  h.n_layers = 3;
  return h;
}

std::vector<SentenceTensor> tensors(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::vector<SentenceTensor> v;
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(test_util::random_tensor(rng, 3, 6));
    v.back().compound = "Erbsensuppe";
  }
  return v;
}

}  // namespace

TEST(EmbeddingStore, Crc64CheckValue) {
  Crc64 crc;
  crc.process_bytes("123456789", 9);
  EXPECT_EQ(crc.checksum(), 0x995DC9BBDF1939FAULL);
}

TEST(EmbeddingStore, EmptyFile) {
  const auto dir = test_util::temp_dir("empty");
  const auto path = dir / embedding_file_name("Erbsensuppe", ModelVariant::kCased);
  write_embeddings(path, small_header(ModelVariant::kCased), {});
  EXPECT_EQ(fs::file_size(path), EmbeddingHeader::kBytes + 8);
  EmbeddingHeader h;
  EXPECT_TRUE(read_embeddings(path, &h).empty());
  EXPECT_EQ(h.sentence_count, 0u);
  EXPECT_EQ(h.variant, ModelVariant::kCased);
}

TEST(EmbeddingStore, HeaderLayoutIsBitExact) {
  const auto dir = test_util::temp_dir("layout");
  const auto path = dir / "x.cemb";
  EmbeddingHeader h;
  h.variant = ModelVariant::kUncased;
  write_embeddings(path, h, {});
  const auto b = slurp(path);
  const unsigned char expect[] = {'C', 'E', 'M', 'B', 1, 0, 1, 0x00, 0x03, 13, 0, 0, 0, 0};
  ASSERT_GE(b.size(), sizeof expect);
  EXPECT_EQ(std::memcmp(b.data(), expect, sizeof expect), 0);
}

TEST(EmbeddingStore, RoundTripTwoSentences) {
  const auto dir = test_util::temp_dir("rt");
  const auto path = dir / embedding_file_name("Erbsensuppe", ModelVariant::kUncased);
  const auto in = tensors(2);
  write_embeddings(path, small_header(), in);
  EmbeddingHeader h;
  const auto out = read_embeddings(path, &h);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out, in);
  EXPECT_EQ(h.sentence_count, 2u);
  EXPECT_EQ(h.dim, 6u);
  EXPECT_EQ(h.n_layers, 3u);
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST(EmbeddingStore, StreamingReaderYieldsEachRecord) {
  const auto dir = test_util::temp_dir("stream");
  const auto path = dir / "a.cemb";
  const auto in = tensors(5, 3);
  write_embeddings(path, small_header(), in);
  EmbeddingReader r(path, "Erbsensuppe");
  SentenceTensor t;
  std::size_t i = 0;
  while (r.next(t)) EXPECT_EQ(t, in[i++]);
  EXPECT_EQ(i, 5u);
  EXPECT_FALSE(r.next(t));
}

TEST(EmbeddingStore, DimensionMismatch) {
  const auto dir = test_util::temp_dir("dim");
  EmbeddingHeader h;  // dim 768
  h.sentence_count = 1;
  EmbeddingWriter w(dir / "a.cemb", h);
  std::mt19937_64 rng(2);
  EXPECT_THROW(w.write(test_util::random_tensor(rng, 13, 512)), ValidationError);
}

TEST(EmbeddingStore, NonFiniteNamesSentence) {
  const auto dir = test_util::temp_dir("nan");
  auto in = tensors(3);
  in[2].vectors[5] = std::numeric_limits<float>::quiet_NaN();
  try {
    write_embeddings(dir / "a.cemb", small_header(), in);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("sentence 2"), std::string::npos) << e.what();
  }
  EXPECT_FALSE(fs::exists(dir / "a.cemb"));
}

TEST(EmbeddingStore, RoleInvariants) {
  using R = TokenRole;
  const std::vector<R> ok{R::kCls, R::kContext, R::kModifierSubword, R::kHeadSubword, R::kSep};
  EXPECT_NO_THROW(validate_roles(ok));
  EXPECT_THROW(validate_roles(std::vector<R>{R::kCls, R::kModifierSubword, R::kHeadSubword, R::kSep}),
               ValidationError);
  EXPECT_THROW(validate_roles(std::vector<R>{R::kCls, R::kContext, R::kHeadSubword, R::kSep}),
               ValidationError);
  EXPECT_THROW(validate_roles(std::vector<R>{R::kCls, R::kCls, R::kContext, R::kModifierSubword,
                                             R::kHeadSubword, R::kSep}),
               ValidationError);
  EXPECT_THROW(validate_roles(std::vector<R>{R::kContext, R::kModifierSubword, R::kHeadSubword,
                                             R::kSep}),
               ValidationError);
}

TEST(EmbeddingStore, CountMismatchOnFinish) {
  const auto dir = test_util::temp_dir("count");
  auto h = small_header();
  h.sentence_count = 2;
  EmbeddingWriter w(dir / "a.cemb", h);
  w.write(tensors(1)[0]);
  EXPECT_THROW(w.finish(), PreconditionError);
}

TEST(EmbeddingStore, WrongMagicAndVersion) {
  const auto dir = test_util::temp_dir("magic");
  const auto path = dir / "a.cemb";
  write_embeddings(path, small_header(), tensors(1));
  auto bytes = slurp(path);
  bytes[0] = 'X';
  dump(path, bytes);
  EXPECT_THROW(read_embeddings(path), FormatError);
  bytes[0] = 'C';
  bytes[4] = 2;
  dump(path, bytes);
  EXPECT_THROW(read_embeddings(path), FormatError);

  dump(dir / "text.cemb", {'h', 'e', 'l', 'l', 'o', '\n'});
  EXPECT_THROW(read_embeddings(dir / "text.cemb"), FormatError);
}

TEST(EmbeddingStore, FlippedPayloadByteFailsChecksum) {
  const auto dir = test_util::temp_dir("flip");
  const auto path = dir / "a.cemb";
  write_embeddings(path, small_header(), tensors(2));
  auto bytes = slurp(path);
  bytes[EmbeddingHeader::kBytes + 4 + 8 + 1] ^= 0x10;  // inside the first payload
  dump(path, bytes);
  EXPECT_THROW(read_embeddings(path), CorruptionError);
}

TEST(EmbeddingStore, TruncationReportsOffset) {
  const auto dir = test_util::temp_dir("trunc");
  const auto path = dir / "a.cemb";
  write_embeddings(path, small_header(), tensors(2));
  auto bytes = slurp(path);
  bytes.resize(bytes.size() - 40);
  dump(path, bytes);
  try {
    read_embeddings(path);
    FAIL() << "expected CorruptionError";
  } catch (const CorruptionError& e) {
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
  }
}

TEST(EmbeddingStore, CompoundNameFromFileName) {
  const auto dir = test_util::temp_dir("name");
  const auto path = dir / embedding_file_name("Eifersucht", ModelVariant::kCased);
  EXPECT_EQ(path.filename(), "Eifersucht.cased.cemb");
  write_embeddings(path, small_header(ModelVariant::kCased), tensors(1));
  EXPECT_EQ(read_embeddings(path)[0].compound, "Eifersucht");
}

TEST(EmbeddingStore, MissingFile) {
  EXPECT_THROW(read_embeddings("/nonexistent/a.cemb"), MissingInputError);
}

TEST(EmbeddingStore, VariantNames) {
  EXPECT_EQ(to_string(ModelVariant::kCased), "cased");
  EXPECT_EQ(parse_variant("uncased"), ModelVariant::kUncased);
  EXPECT_FALSE(parse_variant("Cased").has_value());
}
