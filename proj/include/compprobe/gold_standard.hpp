#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace compprobe {

inline constexpr double kMinRating = 1.0;
inline constexpr double kMaxRating = 6.0;

struct CompoundEntry {
  std::string compound;
  std::string modifier;
  std::string head;
  double rating_modifier = 0.0;
  double rating_head = 0.0;
};

// Header names used to locate the five consumed fields in a TSV whose header
// may carry additional columns. When the header does not contain all five
// names and has exactly five columns, fields are taken positionally.
struct GoldColumns {
  std::array<std::string, 5> names{"compound", "modifier", "head", "rating_modifier",
                                   "rating_head"};

  // Parses "compound,modifier,head,rating_modifier,rating_head".
  static GoldColumns parse(const std::string& comma_list);
};

class GoldDataset {
 public:
  GoldDataset() = default;
  explicit GoldDataset(std::vector<CompoundEntry> entries);

  const std::vector<CompoundEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const CompoundEntry& operator[](std::size_t i) const { return entries_[i]; }

  // Position of a compound in entries(), if present.
  std::optional<std::size_t> find(const std::string& compound) const;

  // modifier -> compounds (in dataset order); head -> compounds.
  const std::map<std::string, std::vector<std::string>>& modifier_families() const {
    return modifier_families_;
  }
  const std::map<std::string, std::vector<std::string>>& head_families() const {
    return head_families_;
  }

 private:
  std::vector<CompoundEntry> entries_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::vector<std::string>> modifier_families_;
  std::map<std::string, std::vector<std::string>> head_families_;
};

struct FamilyStats {
  std::size_t unique_modifiers = 0;
  std::size_t repeated_modifiers = 0;
  std::size_t unique_heads = 0;
  std::size_t repeated_heads = 0;

  friend bool operator==(const FamilyStats&, const FamilyStats&) = default;
};

// Throws ValidationError naming the line number on malformed, out-of-range or
// duplicate entries. Accepts LF or CRLF line endings and a leading UTF-8 BOM.
GoldDataset parse_gold(std::istream& in, const GoldColumns& columns = {});
GoldDataset load_gold(const std::filesystem::path& path, const GoldColumns& columns = {});

// Canonical five-column TSV with header; ratings use the shortest
// representation that round-trips.
void write_gold(std::ostream& out, const GoldDataset& ds);

FamilyStats family_stats(const GoldDataset& ds);

}  // namespace compprobe
