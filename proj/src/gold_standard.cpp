#include "compprobe/gold_standard.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "compprobe/errors.hpp"
#include "compprobe/utf8.hpp"

namespace compprobe {

namespace {

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  });
}

double parse_rating(std::string_view field, std::size_t line_no, const char* what) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw ValidationError("gold line " + std::to_string(line_no) + ": unparsable " + what + " '" +
                          std::string(field) + "'");
  }
  if (!(value >= kMinRating && value <= kMaxRating)) {
    throw ValidationError("gold line " + std::to_string(line_no) + ": " + what + " " +
                          std::string(field) + " outside [1, 6]");
  }
  return value;
}

std::string format_rating(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

GoldColumns GoldColumns::parse(const std::string& comma_list) {
  auto parts = split(comma_list, ',');
  if (parts.size() != 5) {
    throw ValidationError("gold column mapping needs 5 names, got " +
                          std::to_string(parts.size()));
  }
  GoldColumns c;
  for (std::size_t i = 0; i < 5; ++i) c.names[i] = std::string(parts[i]);
  return c;
}

GoldDataset::GoldDataset(std::vector<CompoundEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.compound.empty() || e.modifier.empty() || e.head.empty()) {
      throw ValidationError("entry " + std::to_string(i) + ": empty compound/modifier/head");
    }
    if (has_whitespace(e.compound) || has_whitespace(e.modifier) || has_whitespace(e.head)) {
      throw ValidationError("entry '" + e.compound + "': whitespace in surface form");
    }
    for (double r : {e.rating_modifier, e.rating_head}) {
      if (!(r >= kMinRating && r <= kMaxRating)) {
        throw ValidationError("entry '" + e.compound + "': rating outside [1, 6]");
      }
    }
    if (!index_.emplace(e.compound, i).second) {
      throw ValidationError("duplicate compound '" + e.compound + "'");
    }
    modifier_families_[e.modifier].push_back(e.compound);
    head_families_[e.head].push_back(e.compound);
  }
}

std::optional<std::size_t> GoldDataset::find(const std::string& compound) const {
  auto it = index_.find(compound);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GoldDataset parse_gold(std::istream& in, const GoldColumns& columns) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return GoldDataset{};
  ++line_no;
  strip_bom(line);
  strip_cr(line);

  const auto header = split(line, '\t');
  const std::size_t n_columns = header.size();
  std::array<std::size_t, 5> pos{};
  bool named = true;
  for (std::size_t k = 0; k < 5; ++k) {
    auto it = std::find(header.begin(), header.end(), columns.names[k]);
    if (it == header.end()) {
      named = false;
      break;
    }
    pos[k] = static_cast<std::size_t>(it - header.begin());
  }
  if (!named) {
    if (n_columns != 5) {
      throw ValidationError("gold header has " + std::to_string(n_columns) +
                            " columns and does not name all required fields");
    }
    pos = {0, 1, 2, 3, 4};
  }

  std::vector<CompoundEntry> entries;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != n_columns) {
      throw ValidationError("gold line " + std::to_string(line_no) + ": expected " +
                            std::to_string(n_columns) + " columns, got " +
                            std::to_string(fields.size()));
    }
    CompoundEntry e;
    e.compound = std::string(fields[pos[0]]);
    e.modifier = std::string(fields[pos[1]]);
    e.head = std::string(fields[pos[2]]);
    if (e.compound.empty() || e.modifier.empty() || e.head.empty() ||
        has_whitespace(e.compound) || has_whitespace(e.modifier) || has_whitespace(e.head)) {
      throw ValidationError("gold line " + std::to_string(line_no) +
                            ": empty field or whitespace in surface form");
    }
    e.rating_modifier = parse_rating(fields[pos[3]], line_no, "rating_modifier");
    e.rating_head = parse_rating(fields[pos[4]], line_no, "rating_head");
    if (auto [it, fresh] = seen.emplace(e.compound, line_no); !fresh) {
      throw ValidationError("gold line " + std::to_string(line_no) + ": duplicate compound '" +
                            e.compound + "' (first on line " + std::to_string(it->second) + ")");
    }
    entries.push_back(std::move(e));
  }
  return GoldDataset(std::move(entries));
}

GoldDataset load_gold(const std::filesystem::path& path, const GoldColumns& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open gold file " + path.string());
  return parse_gold(in, columns);
}

void write_gold(std::ostream& out, const GoldDataset& ds) {
  out << "compound\tmodifier\thead\trating_modifier\trating_head\n";
  for (const auto& e : ds.entries()) {
    out << e.compound << '\t' << e.modifier << '\t' << e.head << '\t'
        << format_rating(e.rating_modifier) << '\t' << format_rating(e.rating_head) << '\n';
  }
}

FamilyStats family_stats(const GoldDataset& ds) {
  FamilyStats s;
  s.unique_modifiers = ds.modifier_families().size();
  s.unique_heads = ds.head_families().size();
  for (const auto& [_, members] : ds.modifier_families()) {
    if (members.size() > 1) ++s.repeated_modifiers;
  }
  for (const auto& [_, members] : ds.head_families()) {
    if (members.size() > 1) ++s.repeated_heads;
  }
  return s;
}

}  // namespace compprobe
