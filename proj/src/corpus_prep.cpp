#include "compprobe/corpus_prep.hpp"

#include <glob.h>
#include <omp.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "compprobe/errors.hpp"
#include "compprobe/utf8.hpp"

namespace compprobe {

namespace {

bool boundary_before(std::string_view s, std::size_t pos) {
  return pos == 0 || !utf8::is_word_char(utf8::decode_before(s, pos));
}

bool boundary_after(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return true;
  std::size_t len = 0;
  return !utf8::is_word_char(utf8::decode(s, pos, len));
}

bool all_word_chars(std::string_view s) {
  for (std::size_t pos = 0, len = 0; pos < s.size(); pos += len) {
    if (!utf8::is_word_char(utf8::decode(s, pos, len))) return false;
  }
  return !s.empty();
}

enum class LineMatch : std::uint8_t { kMatched, kMultiple, kNoContext };

struct Hit {
  std::uint32_t compound;
  LineMatch kind;
};

// Finds all gold compounds in one line. Compounds made only of word
// characters are looked up token by token; the rest fall back to substring search.
class LineMatcher {
 public:
  explicit LineMatcher(const GoldDataset& gold) {
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const auto& c = gold[i].compound;
      if (all_word_chars(c)) {
        by_token_.emplace(c, static_cast<std::uint32_t>(i));
      } else {
        irregular_.push_back(static_cast<std::uint32_t>(i));
      }
    }
    gold_ = &gold;
  }

  void match(std::string_view line, std::vector<Hit>& hits) const {
    hits.clear();
    // compound index -> (count, byte position of first occurrence, byte length)
    std::vector<std::tuple<std::uint32_t, std::size_t, std::size_t, std::size_t>> found;
    auto note = [&](std::uint32_t idx, std::size_t pos, std::size_t len) {
      for (auto& [c, n, p, l] : found) {
        if (c == idx) {
          ++n;
          return;
        }
      }
      found.emplace_back(idx, 1, pos, len);
    };

    std::size_t pos = 0;
    while (pos < line.size()) {
      std::size_t len = 0;
      if (!utf8::is_word_char(utf8::decode(line, pos, len))) {
        pos += len;
        continue;
      }
      std::size_t end = pos + len;
      while (end < line.size()) {
        std::size_t l = 0;
        if (!utf8::is_word_char(utf8::decode(line, end, l))) break;
        end += l;
      }
      if (auto it = by_token_.find(line.substr(pos, end - pos)); it != by_token_.end()) {
        note(it->second, pos, end - pos);
      }
      pos = end;
    }
    for (std::uint32_t idx : irregular_) {
      const auto& c = (*gold_)[idx].compound;
      auto occ = find_occurrences(line, c);
      for (std::size_t p : occ) note(idx, p, c.size());
    }

    for (const auto& [idx, n, p, l] : found) {
      LineMatch kind = LineMatch::kMatched;
      if (n > 1) {
        kind = LineMatch::kMultiple;
      } else if (!has_context(line, p, l)) {
        kind = LineMatch::kNoContext;
      }
      hits.push_back({idx, kind});
    }
  }

 private:
  std::unordered_map<std::string_view, std::uint32_t> by_token_;
  std::vector<std::uint32_t> irregular_;
  const GoldDataset* gold_ = nullptr;
};

constexpr std::size_t kChunkLines = 1 << 15;

// Streams the shards in order and hands out chunks of lines with their global index.
template <typename Fn>
void for_each_chunk(std::span<const std::filesystem::path> shards, Fn&& fn) {
  std::vector<std::string> chunk;
  chunk.reserve(kChunkLines);
  std::uint64_t base = 0;
  for (const auto& shard : shards) {
    std::ifstream in(shard, std::ios::binary);
    if (!in) throw MissingInputError("cannot open corpus shard " + shard.string());
    std::string line;
    while (std::getline(in, line)) {
      strip_cr(line);
      chunk.push_back(std::move(line));
      if (chunk.size() == kChunkLines) {
        fn(base, chunk);
        base += chunk.size();
        chunk.clear();
      }
    }
  }
  if (!chunk.empty()) fn(base, chunk);
}

}  // namespace

std::vector<std::size_t> find_occurrences(std::string_view sentence, std::string_view compound) {
  std::vector<std::size_t> out;
  if (compound.empty()) return out;
  for (std::size_t pos = sentence.find(compound); pos != std::string_view::npos;
       pos = sentence.find(compound, pos + 1)) {
    if (boundary_before(sentence, pos) && boundary_after(sentence, pos + compound.size())) {
      out.push_back(pos);
    }
  }
  return out;
}

bool has_context(std::string_view sentence, std::size_t byte_pos, std::size_t len) {
  for (std::size_t pos = 0, l = 0; pos < sentence.size(); pos += l) {
    const char32_t cp = utf8::decode(sentence, pos, l);
    if (pos >= byte_pos && pos < byte_pos + len) continue;
    if (utf8::is_alpha(cp)) return true;
  }
  return false;
}

std::vector<std::string> scan_occurrences(std::span<const std::string> corpus,
                                          const CompoundEntry& entry) {
  std::vector<std::string> out;
  for (const auto& sentence : corpus) {
    if (find_occurrences(sentence, entry.compound).size() == 1) out.push_back(sentence);
  }
  return out;
}

std::vector<std::string> scan_occurrences(std::istream& corpus, const CompoundEntry& entry) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(corpus, line)) {
    strip_cr(line);
    if (find_occurrences(line, entry.compound).size() == 1) out.push_back(line);
  }
  return out;
}

SentenceRecord split_compound(std::string_view sentence, const CompoundEntry& entry) {
  const auto occ = find_occurrences(sentence, entry.compound);
  if (occ.size() != 1) {
    throw PreconditionError("expected exactly one occurrence of '" + entry.compound + "', found " +
                            std::to_string(occ.size()));
  }
  const std::size_t pos = occ.front();
  if (!has_context(sentence, pos, entry.compound.size())) {
    throw PreconditionError("sentence has no context besides '" + entry.compound + "'");
  }

  SentenceRecord r;
  r.compound = entry.compound;
  r.text.reserve(sentence.size() + entry.modifier.size() + entry.head.size() + 1);
  r.text.append(sentence.substr(0, pos));
  r.text.append(entry.modifier);
  r.text.push_back(' ');
  r.text.append(entry.head);
  r.text.append(sentence.substr(pos + entry.compound.size()));

  const std::size_t start = utf8::length(sentence.substr(0, pos));
  const std::size_t mod_len = utf8::length(entry.modifier);
  const std::size_t head_len = utf8::length(entry.head);
  r.modifier_span = {start, start + mod_len};
  r.head_span = {start + mod_len + 1, start + mod_len + 1 + head_len};
  return r;
}

std::string restore_compound(const SentenceRecord& record) {
  const std::size_t b0 = utf8::char_to_byte(record.text, record.modifier_span.start);
  const std::size_t b1 = utf8::char_to_byte(record.text, record.head_span.end);
  std::string out;
  out.reserve(record.text.size());
  out.append(record.text, 0, b0);
  out.append(record.compound);
  out.append(record.text, b1);
  return out;
}

void validate_record(const SentenceRecord& r, const CompoundEntry& entry) {
  auto fail = [&](const std::string& why) {
    throw ValidationError("record for '" + r.compound + "': " + why);
  };
  if (r.compound != entry.compound) fail("compound does not match gold entry");
  const std::size_t n = utf8::length(r.text);
  if (r.modifier_span.start >= r.modifier_span.end || r.head_span.start >= r.head_span.end ||
      r.head_span.end > n) {
    fail("span out of range");
  }
  if (r.head_span.start != r.modifier_span.end + 1) fail("constituents not separated by one space");
  const std::size_t mb = utf8::char_to_byte(r.text, r.modifier_span.start);
  const std::size_t me = utf8::char_to_byte(r.text, r.modifier_span.end);
  const std::size_t hb = utf8::char_to_byte(r.text, r.head_span.start);
  const std::size_t he = utf8::char_to_byte(r.text, r.head_span.end);
  if (std::string_view(r.text).substr(mb, me - mb) != entry.modifier) fail("modifier span mismatch");
  if (std::string_view(r.text).substr(hb, he - hb) != entry.head) fail("head span mismatch");
  if (r.text[me] != ' ') fail("constituents not separated by one space");
  if (!has_context(r.text, mb, he - mb)) fail("no context outside constituents");
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t cap, std::uint64_t seed) {
  if (cap == 0) throw PreconditionError("sample cap must be >= 1");
  std::vector<std::size_t> out;
  if (n <= cap) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  out.reserve(cap);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n && out.size() < cap; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto remaining = static_cast<double>(n - i);
    const auto needed = static_cast<double>(cap - out.size());
    if (u * remaining < needed) out.push_back(i);
  }
  return out;
}

std::vector<SentenceRecord> sample_sentences(std::vector<SentenceRecord> records, std::size_t cap,
                                             std::uint64_t seed) {
  const auto idx = sample_indices(records.size(), cap, seed);
  if (idx.size() == records.size()) return records;
  std::vector<SentenceRecord> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(std::move(records[i]));
  return out;
}

std::uint64_t compound_seed(std::uint64_t seed, std::string_view compound) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : compound) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finaliser over the combination
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PreparedCorpus prepare_corpus(std::span<const std::filesystem::path> shards,
                              const GoldDataset& gold, std::size_t cap, std::uint64_t seed,
                              int threads) {
  if (cap == 0) throw PreconditionError("sample cap must be >= 1");
  const LineMatcher matcher(gold);
  std::vector<std::vector<std::uint64_t>> matched(gold.size());
  PreparedCorpus out;
  out.coverage.resize(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) out.coverage[i].compound = gold[i].compound;

  // pass 1: locate matching lines
  std::vector<std::vector<Hit>> hits;
  for_each_chunk(shards, [&](std::uint64_t base, const std::vector<std::string>& lines) {
    hits.resize(lines.size());
    const auto n = static_cast<std::int64_t>(lines.size());
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads > 0 ? threads : omp_get_max_threads())
    for (std::int64_t i = 0; i < n; ++i) {
      matcher.match(lines[static_cast<std::size_t>(i)], hits[static_cast<std::size_t>(i)]);
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (const Hit& h : hits[i]) {
        auto& cov = out.coverage[h.compound];
        switch (h.kind) {
          case LineMatch::kMatched:
            ++cov.matched;
            matched[h.compound].push_back(base + i);
            break;
          case LineMatch::kMultiple:
            ++cov.excluded_multiple;
            break;
          case LineMatch::kNoContext:
            ++cov.excluded_no_context;
            break;
        }
      }
    }
  });

  // sample per compound, then gather (line, compound) pairs for pass 2
  std::vector<std::pair<std::uint64_t, std::uint32_t>> wanted;
  for (std::size_t c = 0; c < gold.size(); ++c) {
    const auto idx = sample_indices(matched[c].size(), cap, compound_seed(seed, gold[c].compound));
    out.coverage[c].sampled = idx.size();
    for (std::size_t i : idx) wanted.emplace_back(matched[c][i], static_cast<std::uint32_t>(c));
  }
  std::sort(wanted.begin(), wanted.end());

  // pass 2: materialise the sampled sentences
  std::vector<std::vector<SentenceRecord>> records(gold.size());
  std::size_t cursor = 0;
  if (!wanted.empty()) {
    for_each_chunk(shards, [&](std::uint64_t base, const std::vector<std::string>& lines) {
      while (cursor < wanted.size() && wanted[cursor].first < base + lines.size()) {
        const auto& [line_idx, c] = wanted[cursor];
        records[c].push_back(split_compound(lines[line_idx - base], gold[c]));
        ++cursor;
      }
    });
  }

  out.manifest.seed = seed;
  out.manifest.cap = cap;
  for (std::size_t c = 0; c < gold.size(); ++c) {
    if (records[c].empty()) continue;
    out.manifest.groups.push_back({gold[c].compound, std::move(records[c])});
  }
  return out;
}

std::vector<std::filesystem::path> expand_shards(std::span<const std::string> patterns) {
  std::set<std::filesystem::path> out;
  for (const auto& pattern : patterns) {
    if (pattern.find_first_of("*?[") == std::string::npos) {
      out.insert(pattern);
      continue;
    }
    glob_t g{};
    if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.insert(g.gl_pathv[i]);
    }
    ::globfree(&g);
  }
  return {out.begin(), out.end()};
}

void write_manifest(std::ostream& out, const SampleManifest& m) {
  nlohmann::ordered_json header{{"type", "header"},
                                {"seed", m.seed},
                                {"cap", m.cap},
                                {"max_tokens", m.max_tokens},
                                {"config_hash", m.config_hash}};
  out << header.dump() << '\n';
  for (const auto& g : m.groups) {
    for (const auto& r : g.records) {
      nlohmann::ordered_json j{{"compound", r.compound},
                               {"text", r.text},
                               {"modifier_span", {r.modifier_span.start, r.modifier_span.end}},
                               {"head_span", {r.head_span.start, r.head_span.end}}};
      out << j.dump() << '\n';
    }
  }
}

SampleManifest read_manifest(std::istream& in) {
  SampleManifest m;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!saw_header) {
        if (j.value("type", "") != "header") {
          throw ValidationError("manifest line 1 is not a header");
        }
        m.seed = j.at("seed").get<std::uint64_t>();
        m.cap = j.at("cap").get<std::size_t>();
        m.max_tokens = j.value("max_tokens", std::size_t{512});
        m.config_hash = j.value("config_hash", std::string{});
        saw_header = true;
        continue;
      }
      SentenceRecord r;
      r.compound = j.at("compound").get<std::string>();
      r.text = j.at("text").get<std::string>();
      const auto ms = j.at("modifier_span");
      const auto hs = j.at("head_span");
      r.modifier_span = {ms.at(0).get<std::size_t>(), ms.at(1).get<std::size_t>()};
      r.head_span = {hs.at(0).get<std::size_t>(), hs.at(1).get<std::size_t>()};
      if (m.groups.empty() || m.groups.back().compound != r.compound) {
        m.groups.push_back({r.compound, {}});
      }
      m.groups.back().records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_header) throw ValidationError("manifest has no header line");
  return m;
}

}  // namespace compprobe
