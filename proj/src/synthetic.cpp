#include "compprobe/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "compprobe/errors.hpp"

namespace compprobe {

namespace {

std::string two_digits(std::size_t i) {
  std::string s = std::to_string(i);
  return s.size() < 2 ? "0" + s : s;
}

// Distinct ratings on the 0.1 grid over [1, 6], in random order.
std::vector<double> distinct_ratings(std::size_t n, std::mt19937_64& rng) {
  std::vector<int> grid(51);
  for (int k = 0; k <= 50; ++k) grid[static_cast<std::size_t>(k)] = k;
  if (n > grid.size()) throw PreconditionError("at most 51 synthetic compounds");
  std::shuffle(grid.begin(), grid.end(), rng);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(1.0 + grid[i] / 10.0);
  return out;
}

}  // namespace

double planted_angle(double rating) {
  return (kMaxRating - rating) / (kMaxRating - kMinRating) * 0.45 * std::numbers::pi;
}

SyntheticFixture make_synthetic_fixture(const SyntheticOptions& o) {
  if (o.dim < 3) throw PreconditionError("synthetic fixture needs dim >= 3");
  if (o.modifier_layer >= o.n_layers || o.head_layer >= o.n_layers) {
    throw PreconditionError("planted layer outside the layer range");
  }
  std::mt19937_64 rng(o.seed);
  const auto mod_ratings = distinct_ratings(o.n_compounds, rng);
  const auto head_ratings = distinct_ratings(o.n_compounds, rng);

  std::vector<CompoundEntry> entries;
  for (std::size_t i = 0; i < o.n_compounds; ++i) {
    const std::string id = two_digits(i);
    entries.push_back({"Mod" + id + "kopf" + id, "Mod" + id, "Kopf" + id, mod_ratings[i],
                       head_ratings[i]});
  }

  SyntheticFixture fx;
  fx.gold = GoldDataset(entries);
  fx.options = o;
  std::normal_distribution<float> noise(0.0f, static_cast<float>(o.noise_scale));
  std::uniform_int_distribution<int> n_before(1, 4), n_sub(1, 2), n_after(1, 3);

  auto plant = [&](SentenceTensor& t, std::size_t layer, TokenRole role, double angle) {
    for (std::size_t tok = 0; tok < t.n_tokens; ++tok) {
      auto v = t.token(layer, tok);
      if (t.roles[tok] == TokenRole::kContext) {
        std::fill(v.begin(), v.end(), 0.0f);
        v[0] = 1.0f;
      } else if (t.roles[tok] == role) {
        std::fill(v.begin(), v.end(), 0.0f);
        v[0] = static_cast<float>(std::cos(angle));
        v[role == TokenRole::kModifierSubword ? 1 : 2] = static_cast<float>(std::sin(angle));
      }
    }
  };

  for (std::size_t i = 0; i < o.n_compounds; ++i) {
    const auto& e = entries[i];
    for (ModelVariant variant : {ModelVariant::kUncased, ModelVariant::kCased}) {
      std::vector<SentenceTensor> sentences;
      if (variant == ModelVariant::kCased && o.identical_variants) {
        sentences = fx.tensors.at({e.compound, ModelVariant::kUncased});
        fx.tensors[{e.compound, variant}] = std::move(sentences);
        continue;
      }
      for (std::size_t s = 0; s < o.sentences_per_compound; ++s) {
        std::vector<TokenRole> roles{TokenRole::kCls};
        roles.insert(roles.end(), static_cast<std::size_t>(n_before(rng)), TokenRole::kContext);
        roles.insert(roles.end(), static_cast<std::size_t>(n_sub(rng)), TokenRole::kModifierSubword);
        roles.insert(roles.end(), static_cast<std::size_t>(n_sub(rng)), TokenRole::kHeadSubword);
        roles.insert(roles.end(), static_cast<std::size_t>(n_after(rng)), TokenRole::kContext);
        roles.push_back(TokenRole::kSep);

        SentenceTensor t(e.compound, roles.size(), o.n_layers, o.dim);
        t.roles = roles;
        for (float& v : t.vectors) v = noise(rng);
        if (variant == o.modifier_variant) {
          plant(t, o.modifier_layer, TokenRole::kModifierSubword, planted_angle(e.rating_modifier));
        }
        if (variant == o.head_variant) {
          plant(t, o.head_layer, TokenRole::kHeadSubword, planted_angle(e.rating_head));
        }
        sentences.push_back(std::move(t));
      }
      fx.tensors[{e.compound, variant}] = std::move(sentences);
    }
  }
  return fx;
}

void write_synthetic_fixture(const SyntheticFixture& fx, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "embeddings");
  {
    std::ofstream gold(dir / "gold.tsv", std::ios::binary);
    write_gold(gold, fx.gold);
  }
  for (const auto& [key, sentences] : fx.tensors) {
    EmbeddingHeader h;
    h.variant = key.second;
    h.dim = static_cast<std::uint16_t>(fx.options.dim);
    h.n_layers = static_cast<std::uint8_t>(fx.options.n_layers);
    write_embeddings(dir / "embeddings" / embedding_file_name(key.first, key.second), h, sentences);
  }
}

}  // namespace compprobe
