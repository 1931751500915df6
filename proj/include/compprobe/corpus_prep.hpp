#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compprobe/gold_standard.hpp"

namespace compprobe {

// Half-open range of Unicode code point offsets into SentenceRecord::text.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct SentenceRecord {
  std::string compound;
  std::string text;
  CharSpan modifier_span;
  CharSpan head_span;

  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct CompoundSample {
  std::string compound;
  std::vector<SentenceRecord> records;
};

struct SampleManifest {
  std::uint64_t seed = 0;
  std::size_t cap = 100;
  std::string config_hash;
  std::size_t max_tokens = 512;
  std::vector<CompoundSample> groups;  // gold order; compounds without sentences omitted
};

// Byte offsets of every occurrence of `compound` in `sentence` that is
// delimited on both sides by a non-word character or the string boundary.
std::vector<std::size_t> find_occurrences(std::string_view sentence, std::string_view compound);

// True when `sentence` holds an alphabetic character outside [byte_pos, byte_pos + len).
bool has_context(std::string_view sentence, std::size_t byte_pos, std::size_t len);

// Sentences (one per line) in which the compound occurs exactly once as a
// standalone, case-sensitive token.
std::vector<std::string> scan_occurrences(std::istream& corpus, const CompoundEntry& entry);
std::vector<std::string> scan_occurrences(std::span<const std::string> corpus,
                                          const CompoundEntry& entry);

// Replaces the single occurrence of entry.compound with "modifier head".
// Throws PreconditionError on zero or multiple occurrences or when no
// context remains.
SentenceRecord split_compound(std::string_view sentence, const CompoundEntry& entry);

// Inverse of split_compound.
std::string restore_compound(const SentenceRecord& record);

// Checks the SentenceRecord invariants against the gold forms; throws ValidationError.
void validate_record(const SentenceRecord& record, const CompoundEntry& entry);

// Sorted indices of a uniform sample of min(n, cap) items out of n. Selection
// sampling over a mt19937_64 stream, so the result depends only on (n, cap, seed).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t cap, std::uint64_t seed);

std::vector<SentenceRecord> sample_sentences(std::vector<SentenceRecord> records, std::size_t cap,
                                             std::uint64_t seed);

// Per-compound seed derived from the run seed, so sampling does not depend on
// which other compounds are present.
std::uint64_t compound_seed(std::uint64_t seed, std::string_view compound);

struct CoverageRow {
  std::string compound;
  std::size_t matched = 0;              // exactly-once occurrences with context
  std::size_t excluded_multiple = 0;    // sentences with >1 occurrence
  std::size_t excluded_no_context = 0;  // sentences that are only the compound
  std::size_t sampled = 0;
};

struct PreparedCorpus {
  SampleManifest manifest;
  std::vector<CoverageRow> coverage;  // gold order, every compound
};

// Scans corpus shards for all gold compounds, splits and samples. Two passes
// over the shards keep memory bounded by the number of matches, not the
// matched text.
PreparedCorpus prepare_corpus(std::span<const std::filesystem::path> shards, const GoldDataset& gold,
                              std::size_t cap, std::uint64_t seed, int threads = 0);

// Expands shell-style patterns; plain paths pass through. Sorted, deduplicated.
std::vector<std::filesystem::path> expand_shards(std::span<const std::string> patterns);

void write_manifest(std::ostream& out, const SampleManifest& manifest);
SampleManifest read_manifest(std::istream& in);

}  // namespace compprobe
