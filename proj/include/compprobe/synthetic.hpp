#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "compprobe/embedding_store.hpp"
#include "compprobe/gold_standard.hpp"

namespace compprobe {

// Gold set plus embeddings in which one (variant, single layer) carries a
// modifier signal and another carries a head signal. At the planted layer all
// context tokens equal e0 and the constituent tokens sit at an angle to e0
// that shrinks as the gold rating grows, so cosine(constituent, cont) is
// strictly increasing in the rating. Every other token and layer is Gaussian noise.
struct SyntheticOptions {
  std::size_t n_compounds = 30;
  std::size_t sentences_per_compound = 4;
  std::size_t n_layers = 13;
  std::size_t dim = 32;
  std::uint64_t seed = 7;
  double noise_scale = 3.0;
  ModelVariant modifier_variant = ModelVariant::kUncased;
  std::size_t modifier_layer = 4;
  ModelVariant head_variant = ModelVariant::kCased;
  std::size_t head_layer = 1;
  bool identical_variants = false;  // cased files are byte copies of uncased payloads
};

struct SyntheticFixture {
  GoldDataset gold;
  std::map<std::pair<std::string, ModelVariant>, std::vector<SentenceTensor>> tensors;
  SyntheticOptions options;
};

SyntheticFixture make_synthetic_fixture(const SyntheticOptions& options);

// Angle used for a rating at the planted layer.
double planted_angle(double rating);

// Writes <dir>/gold.tsv and <dir>/embeddings/<compound>.<variant>.cemb.
void write_synthetic_fixture(const SyntheticFixture& fx, const std::filesystem::path& dir);

}  // namespace compprobe
