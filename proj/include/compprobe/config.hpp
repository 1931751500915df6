#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "compprobe/embedding_store.hpp"

namespace compprobe {

struct RunConfig {
  std::filesystem::path gold;
  std::vector<std::string> corpus;  // paths or glob patterns
  std::filesystem::path embeddings;
  std::filesystem::path manifest;   // optional for sweep: compounds expected to have files
  std::filesystem::path out = ".";
  std::uint64_t seed = 13;
  std::size_t cap = 100;
  std::vector<ModelVariant> variants{ModelVariant::kCased, ModelVariant::kUncased};
  std::size_t max_tokens = 512;
  std::size_t top_k = 5;
  std::string gold_columns;  // optional "compound,modifier,head,rating_modifier,rating_head"
  int threads = 0;           // 0: OpenMP default; never affects results
};

// key = value lines; '#' starts a comment. Keys mirror the RunConfig fields;
// `corpus` and `variants` take comma-separated lists. Throws ValidationError
// on unknown keys or bad values.
void apply_config(std::istream& in, RunConfig& cfg);
void load_config_file(const std::filesystem::path& path, RunConfig& cfg);

// Sets one key; shared by the file parser and command-line overrides.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Canonical key=value listing of everything that can change results
// (the output directory and thread count are excluded).
std::string canonical_config(const RunConfig& cfg);

// 16 hex digits of FNV-1a 64 over canonical_config().
std::string config_hash(const RunConfig& cfg);

void validate_config(const RunConfig& cfg);

}  // namespace compprobe
