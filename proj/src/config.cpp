#include "compprobe/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "compprobe/errors.hpp"
#include "compprobe/utf8.hpp"

namespace compprobe {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ValidationError("config " + key + ": '" + value + "' is not a valid number");
  }
  return out;
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> out;
  for (auto part : split(value, ',')) {
    auto item = trim(part);
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "gold") {
    cfg.gold = value;
  } else if (key == "corpus") {
    cfg.corpus = parse_list(value);
  } else if (key == "embeddings") {
    cfg.embeddings = value;
  } else if (key == "manifest") {
    cfg.manifest = value;
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "cap") {
    cfg.cap = parse_number<std::size_t>(key, value);
  } else if (key == "max_tokens") {
    cfg.max_tokens = parse_number<std::size_t>(key, value);
  } else if (key == "top_k") {
    cfg.top_k = parse_number<std::size_t>(key, value);
  } else if (key == "threads") {
    cfg.threads = parse_number<int>(key, value);
  } else if (key == "gold_columns") {
    cfg.gold_columns = value;
  } else if (key == "variants") {
    cfg.variants.clear();
    for (const auto& name : parse_list(value)) {
      auto v = parse_variant(name);
      if (!v) throw ValidationError("config variants: unknown variant '" + name + "'");
      cfg.variants.push_back(*v);
    }
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

void apply_config(std::istream& in, RunConfig& cfg) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(cfg, trim(std::string_view(text).substr(0, eq)),
                     trim(std::string_view(text).substr(eq + 1)));
  }
}

void load_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open config file " + path.string());
  apply_config(in, cfg);
}

std::string canonical_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "cap=" << cfg.cap << '\n';
  os << "corpus=";
  for (std::size_t i = 0; i < cfg.corpus.size(); ++i) os << (i ? "," : "") << cfg.corpus[i];
  os << '\n';
  os << "embeddings=" << cfg.embeddings.generic_string() << '\n';
  os << "gold=" << cfg.gold.generic_string() << '\n';
  os << "gold_columns=" << cfg.gold_columns << '\n';
  os << "manifest=" << cfg.manifest.generic_string() << '\n';
  os << "max_tokens=" << cfg.max_tokens << '\n';
  os << "seed=" << cfg.seed << '\n';
  os << "top_k=" << cfg.top_k << '\n';
  os << "variants=";
  for (std::size_t i = 0; i < cfg.variants.size(); ++i) {
    os << (i ? "," : "") << to_string(cfg.variants[i]);
  }
  os << '\n';
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i, h >>= 4) buf[i] = kHex[h & 0xF];
  buf[16] = '\0';
  return buf;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.cap < 1) throw ValidationError("cap must be >= 1");
  if (cfg.variants.empty()) throw ValidationError("at least one model variant is required");
  if (cfg.max_tokens < 4) throw ValidationError("max_tokens must be >= 4");
}

}  // namespace compprobe
