#include "compprobe/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "compprobe/errors.hpp"
#include "compprobe/utf8.hpp"

namespace compprobe {

namespace {

double parse_real(std::string_view s, std::size_t line_no) {
  if (s == "NA") return std::nan("");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError("line " + std::to_string(line_no) + ": bad number '" + std::string(s) +
                          "'");
  }
  return v;
}

std::size_t parse_count(std::string_view s, std::size_t line_no) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError("line " + std::to_string(line_no) + ": bad count '" + std::string(s) +
                          "'");
  }
  return v;
}

ModelVariant parse_variant_field(std::string_view s, std::size_t line_no) {
  auto v = parse_variant(s);
  if (!v) {
    throw ValidationError("line " + std::to_string(line_no) + ": unknown variant '" +
                          std::string(s) + "'");
  }
  return *v;
}

EstimateId parse_estimate_field(std::string_view s, std::size_t line_no) {
  auto e = parse_estimate(s);
  if (!e) {
    throw ValidationError("line " + std::to_string(line_no) + ": unknown estimate '" +
                          std::string(s) + "'");
  }
  return *e;
}

// Yields the tab-split fields of each data line, skipping '#' comments, the
// column header and blank lines.
template <typename Fn>
void for_each_row(std::istream& in, std::size_t n_fields, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto fields = split(line, '\t');
    if (fields.size() != n_fields) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(n_fields) + " fields, got " +
                            std::to_string(fields.size()));
    }
    fn(fields, line_no);
  }
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  // avoid "-0.000"
  if (std::string_view(buf) == "-0.000") return "0.000";
  return buf;
}

std::string rgb(double v, double vmax) {
  double t = vmax > 0.0 ? std::clamp(v / vmax, -1.0, 1.0) : 0.0;
  int r = 255, g = 255, b = 255;
  if (t > 0) {
    g = b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
  } else if (t < 0) {
    r = g = static_cast<int>(std::lround(255.0 * (1.0 + t)));
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string OutputStamp::line(std::string_view kind) const {
  return "# compprobe " + std::string(kind) + " config_hash=" + config_hash +
         " seed=" + std::to_string(seed);
}

std::optional<OutputStamp> parse_stamp(std::string_view line) {
  if (!line.starts_with("# compprobe ")) return std::nullopt;
  const auto h = line.find(" config_hash=");
  const auto s = line.find(" seed=");
  if (h == std::string_view::npos || s == std::string_view::npos || s < h) return std::nullopt;
  OutputStamp stamp;
  stamp.config_hash = std::string(line.substr(h + 13, s - h - 13));
  const auto digits = line.substr(s + 6);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), stamp.seed);
  if (ec != std::errc{}) return std::nullopt;
  return stamp;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "NA";
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_predictions_tsv(std::ostream& out, const PredictionTable& p, const OutputStamp& stamp) {
  out << stamp.line("predictions") << '\n';
  out << "compound\tmodel_variant\tspan\testimate\tvalue\tn_sentences\n";
  const auto spans = enumerate_spans(std::max<std::size_t>(p.n_layers(), 1));
  for (ModelVariant v : kAllVariants) {
    for (std::size_t c = 0; c < p.n_compounds(); ++c) {
      if (!p.has(v, c)) continue;
      const auto& pred = p.get(v, c);
      for (std::size_t s = 0; s < p.n_spans(); ++s) {
        for (std::size_t e = 0; e < kNumEstimates; ++e) {
          out << pred.compound << '\t' << to_string(v) << '\t' << to_string(spans[s]) << '\t'
              << to_string(all_estimates()[e]) << '\t' << format_real(pred.at(s, e)) << '\t'
              << pred.n_sentences << '\n';
        }
      }
    }
  }
}

PredictionTable read_predictions_tsv(std::istream& in, const GoldDataset& gold) {
  struct Row {
    std::size_t compound;
    ModelVariant variant;
    LayerSpan span;
    std::size_t estimate;
    double value;
    std::size_t n_sentences;
  };
  std::vector<Row> rows;
  std::size_t n_layers = 0;
  for_each_row(in, 6, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    auto idx = gold.find(std::string(f[0]));
    if (!idx) {
      throw ValidationError("line " + std::to_string(line_no) + ": compound '" +
                            std::string(f[0]) + "' not in gold standard");
    }
    Row r{*idx,
          parse_variant_field(f[1], line_no),
          parse_span(std::string(f[2])),
          estimate_index(parse_estimate_field(f[3], line_no)),
          parse_real(f[4], line_no),
          parse_count(f[5], line_no)};
    n_layers = std::max(n_layers, r.span.end + 1);
    rows.push_back(r);
  });

  const std::size_t n_spans = n_layers * (n_layers + 1) / 2;
  std::map<std::pair<std::size_t, std::size_t>, CompoundPredictions> acc;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> filled;
  for (const auto& r : rows) {
    const auto key = std::make_pair(static_cast<std::size_t>(r.variant), r.compound);
    auto& p = acc[key];
    if (p.values.empty()) {
      p.compound = gold[r.compound].compound;
      p.variant = r.variant;
      p.n_layers = n_layers;
      p.n_sentences = r.n_sentences;
      p.values.assign(n_spans * kNumEstimates, std::nan(""));
    }
    p.values[span_index(r.span, n_layers) * kNumEstimates + r.estimate] = r.value;
    ++filled[key];
  }
  PredictionTable table(gold, n_layers);
  for (auto& [key, p] : acc) {
    if (filled[key] != n_spans * kNumEstimates) {
      throw ValidationError("predictions for '" + p.compound + "' (" +
                            std::string(to_string(p.variant)) + ") are incomplete");
    }
    table.set(key.second, std::move(p));
  }
  return table;
}

void write_sweep_tsv(std::ostream& out, const SweepTable& t, const OutputStamp& stamp) {
  out << stamp.line("sweep") << '\n';
  out << "model_variant\tspan\testimate\trho_modifier\trho_head\tn_compounds\n";
  for (const auto& r : t.rows) {
    out << to_string(r.variant) << '\t' << to_string(r.span) << '\t' << to_string(r.estimate)
        << '\t' << format_real(r.rho_modifier) << '\t' << format_real(r.rho_head) << '\t'
        << r.n_compounds << '\n';
  }
}

SweepTable read_sweep_tsv(std::istream& in) {
  SweepTable t;
  for_each_row(in, 6, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    SweepResult r;
    r.variant = parse_variant_field(f[0], line_no);
    r.span = parse_span(std::string(f[1]));
    r.estimate = parse_estimate_field(f[2], line_no);
    r.rho_modifier = parse_real(f[3], line_no);
    r.rho_head = parse_real(f[4], line_no);
    r.n_compounds = parse_count(f[5], line_no);
    t.n_layers = std::max(t.n_layers, r.span.end + 1);
    if (!t.has_variant(r.variant)) t.variants.push_back(r.variant);
    t.rows.push_back(r);
  });
  if (t.rows.empty()) throw ValidationError("sweep table is empty");
  // rows must follow the canonical (variant, span, estimate) order
  const auto spans = enumerate_spans(t.n_layers);
  if (t.rows.size() != t.variants.size() * spans.size() * kNumEstimates) {
    throw ValidationError("sweep table has " + std::to_string(t.rows.size()) +
                          " rows, expected " +
                          std::to_string(t.variants.size() * spans.size() * kNumEstimates));
  }
  std::size_t i = 0;
  for (ModelVariant v : t.variants) {
    for (const auto& s : spans) {
      for (const auto& e : all_estimates()) {
        const auto& r = t.rows[i++];
        if (r.variant != v || r.span != s || !(r.estimate == e)) {
          throw ValidationError("sweep table row " + std::to_string(i) + " out of order");
        }
      }
    }
  }
  return t;
}

void write_best_configs_tsv(std::ostream& out, const std::vector<SweepResult>& rows,
                            GoldColumn column, const OutputStamp& stamp) {
  out << stamp.line("best_configs_" + std::string(to_string(column))) << '\n';
  out << "rank\tmodel_variant\tspan\testimate\trho\tn_compounds\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << (i + 1) << '\t' << to_string(r.variant) << '\t' << to_string(r.span) << '\t'
        << to_string(r.estimate) << '\t' << format_real(r.rho(column)) << '\t' << r.n_compounds
        << '\n';
  }
}

void write_estimate_matrix_tsv(std::ostream& out, const TargetMatrix& m, GoldColumn column,
                               const OutputStamp& stamp) {
  out << stamp.line("estimate_matrix_" + std::string(to_string(column))) << '\n';
  out << "target";
  for (std::size_t b = 0; b < kNumTargets; ++b) out << '\t' << to_string(static_cast<Target>(b));
  out << '\n';
  for (std::size_t a = 0; a < kNumTargets; ++a) {
    out << to_string(static_cast<Target>(a));
    for (std::size_t b = 0; b < kNumTargets; ++b) out << '\t' << format_real(m[a][b]);
    out << '\n';
  }
}

void write_span_matrix_tsv(std::ostream& out, const SpanMatrix& m, std::string_view kind,
                           const OutputStamp& stamp) {
  out << stamp.line(kind) << '\n';
  out << "end\\start";
  for (std::size_t s = 0; s < m.n; ++s) out << '\t' << s;
  out << '\n';
  for (std::size_t e = 0; e < m.n; ++e) {
    out << e;
    for (std::size_t s = 0; s < m.n; ++s) out << '\t' << format_real(m.at(s, e));
    out << '\n';
  }
}

void write_cross_model_tsv(std::ostream& out, const std::vector<CrossModelReport>& reports,
                           const OutputStamp& stamp) {
  out << stamp.line("cross_model") << '\n';
  out << "column\tpairing\tgroup_by\tgroup\trho\tn_pairs\n";
  for (const auto& r : reports) {
    const std::string prefix = std::string(to_string(r.column)) + '\t' +
                               std::string(to_string(r.pairing)) + '\t' +
                               std::string(to_string(r.group_by)) + '\t';
    for (const auto& g : r.result.groups) {
      out << prefix << g.group << '\t' << format_real(g.rho) << '\t' << g.n_pairs << '\n';
    }
    out << prefix << "mean\t" << format_real(r.result.mean) << '\t' << r.result.groups.size()
        << '\n';
    out << prefix << "std\t" << format_real(r.result.stddev) << '\t' << r.result.groups.size()
        << '\n';
  }
}

std::string render_heatmap(const SpanMatrix& m, std::string_view title, const OutputStamp& stamp) {
  if (m.n == 0 || m.values.empty()) throw PreconditionError("cannot render an empty matrix");
  constexpr int kCell = 44, kLeft = 70, kTop = 50, kBottom = 50, kRight = 20;
  const int n = static_cast<int>(m.n);
  const int width = kLeft + n * kCell + kRight;
  const int height = kTop + n * kCell + kBottom;

  double vmax = 0.0;
  for (std::size_t e = 0; e < m.n; ++e) {
    for (std::size_t s = 0; s <= e; ++s) {
      const double v = m.at(s, e);
      if (std::isfinite(v)) vmax = std::max(vmax, std::abs(v));
    }
  }

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<!-- " << stamp.line("heatmap").substr(2) << " -->\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
     << " font-size=\"14\">" << xml_escape(title) << "</text>\n";
  for (int e = 0; e < n; ++e) {
    for (int s = 0; s <= e; ++s) {
      const double v = m.at(static_cast<std::size_t>(s), static_cast<std::size_t>(e));
      const int x = kLeft + s * kCell, y = kTop + e * kCell;
      if (!std::isfinite(v)) {
        os << "<rect class=\"blank\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
           << "\" height=\"" << kCell << "\" fill=\"none\" stroke=\"#dddddd\"/>\n";
        continue;
      }
      os << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
         << "\" height=\"" << kCell << "\" fill=\"" << rgb(v, vmax) << "\" stroke=\"#ffffff\"/>\n";
      os << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << fixed3(v)
         << "</text>\n";
    }
  }
  for (int i = 0; i < n; ++i) {
    os << "<text x=\"" << kLeft + i * kCell + kCell / 2 << "\" y=\"" << kTop + n * kCell + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << i
       << "</text>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << kTop + i * kCell + kCell / 2 + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << i << "</text>\n";
  }
  os << "<text x=\"" << kLeft + n * kCell / 2 << "\" y=\"" << height - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">start layer</text>\n";
  os << "<text x=\"16\" y=\"" << kTop + n * kCell / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
     << kTop + n * kCell / 2 << ")\">end layer</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace compprobe
