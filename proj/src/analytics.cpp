#include "compprobe/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "compprobe/errors.hpp"
#include "compprobe/spearman.hpp"

namespace compprobe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t variant_rank(ModelVariant v) { return static_cast<std::size_t>(v); }

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_std(std::span<const double> xs, double mean) {
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace

std::string_view to_string(GoldColumn c) { return c == GoldColumn::kModifier ? "modifier" : "head"; }

double gold_rating(const CompoundEntry& e, GoldColumn c) {
  return c == GoldColumn::kModifier ? e.rating_modifier : e.rating_head;
}

PredictionTable::PredictionTable(const GoldDataset& gold, std::size_t n_layers)
    : n_layers_(n_layers) {
  names_.reserve(gold.size());
  for (const auto& e : gold.entries()) names_.push_back(e.compound);
  for (std::size_t v = 0; v < 2; ++v) {
    slots_[v].resize(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
      slots_[v][i].compound = names_[i];
      slots_[v][i].variant = static_cast<ModelVariant>(v);
      slots_[v][i].n_layers = n_layers;
    }
  }
}

PredictionTable PredictionTable::build(const GoldDataset& gold,
                                       std::vector<CompoundPredictions> results) {
  std::size_t n_layers = 0;
  for (const auto& r : results) {
    if (r.n_sentences == 0) continue;
    if (n_layers == 0) n_layers = r.n_layers;
    if (r.n_layers != n_layers) {
      throw ValidationError("embedding files disagree on layer count (" +
                            std::to_string(n_layers) + " vs " + std::to_string(r.n_layers) +
                            " for '" + r.compound + "')");
    }
  }
  PredictionTable table(gold, n_layers);
  for (auto& r : results) {
    auto idx = gold.find(r.compound);
    if (!idx) throw ValidationError("predictions for unknown compound '" + r.compound + "'");
    if (table.has(r.variant, *idx)) {
      throw ValidationError("duplicate predictions for '" + r.compound + "' (" +
                            std::string(to_string(r.variant)) + ")");
    }
    if (r.n_sentences == 0) continue;
    table.set(*idx, std::move(r));
  }
  return table;
}

void PredictionTable::set(std::size_t compound, CompoundPredictions p) {
  if (p.n_sentences > 0 &&
      (p.n_layers != n_layers_ || p.values.size() != n_spans() * kNumEstimates)) {
    throw ValidationError("prediction shape for '" + p.compound + "' does not match table");
  }
  slots_[index(p.variant)][compound] = std::move(p);
}

std::size_t PredictionTable::count(ModelVariant v) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < n_compounds(); ++i) n += has(v, i) ? 1 : 0;
  return n;
}

bool SweepTable::has_variant(ModelVariant v) const {
  return std::find(variants.begin(), variants.end(), v) != variants.end();
}

const SweepResult& SweepTable::at(ModelVariant v, std::size_t span, std::size_t estimate) const {
  auto it = std::find(variants.begin(), variants.end(), v);
  if (it == variants.end()) throw PreconditionError("variant not in sweep table");
  const auto block = static_cast<std::size_t>(it - variants.begin());
  return rows[(block * n_spans() + span) * kNumEstimates + estimate];
}

SweepTable run_sweep(const GoldDataset& gold, const PredictionTable& predictions,
                     std::span<const ModelVariant> variants) {
  SweepTable table;
  table.n_layers = predictions.n_layers();
  if (table.n_layers == 0) throw UndefinedStatisticError("no predictions to evaluate");
  table.variants.assign(variants.begin(), variants.end());
  std::sort(table.variants.begin(), table.variants.end());
  const auto spans = enumerate_spans(table.n_layers);
  const auto& estimates = all_estimates();
  table.rows.reserve(table.variants.size() * spans.size() * kNumEstimates);

  for (ModelVariant v : table.variants) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < predictions.n_compounds(); ++i) {
      if (predictions.has(v, i)) members.push_back(i);
    }
    if (members.size() < 3) {
      throw UndefinedStatisticError(std::string(to_string(v)) + ": only " +
                                    std::to_string(members.size()) +
                                    " compounds have predictions, need at least 3");
    }
    std::vector<double> gold_mod, gold_head;
    for (std::size_t i : members) {
      gold_mod.push_back(gold[i].rating_modifier);
      gold_head.push_back(gold[i].rating_head);
    }
    const auto rank_mod = average_ranks(gold_mod);
    const auto rank_head = average_ranks(gold_head);

    std::vector<double> x(members.size());
    for (std::size_t s = 0; s < spans.size(); ++s) {
      for (std::size_t e = 0; e < kNumEstimates; ++e) {
        for (std::size_t k = 0; k < members.size(); ++k) {
          x[k] = predictions.value(v, members[k], s, e);
        }
        SweepResult r;
        r.variant = v;
        r.span = spans[s];
        r.estimate = estimates[e];
        r.n_compounds = members.size();
        try {
          const auto rx = average_ranks(x);
          r.rho_modifier = pearson(rx, rank_mod);
          r.rho_head = pearson(rx, rank_head);
        } catch (const UndefinedStatisticError& err) {
          throw UndefinedStatisticError(std::string(to_string(v)) + " " + to_string(spans[s]) +
                                        " " + to_string(estimates[e]) + ": " + err.what());
        }
        table.rows.push_back(r);
      }
    }
  }
  return table;
}

std::vector<SweepResult> best_configs(const SweepTable& t, GoldColumn column, std::size_t k) {
  std::vector<SweepResult> rows = t.rows;
  std::stable_sort(rows.begin(), rows.end(), [&](const SweepResult& a, const SweepResult& b) {
    const double ra = a.rho(column), rb = b.rho(column);
    if (ra != rb) return ra > rb;
    if (a.variant != b.variant) return variant_rank(a.variant) < variant_rank(b.variant);
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    if (a.span.end != b.span.end) return a.span.end < b.span.end;
    return estimate_index(a.estimate) < estimate_index(b.estimate);
  });
  if (k < rows.size()) rows.resize(k);
  return rows;
}

TargetMatrix estimate_matrix(const SweepTable& t, GoldColumn column) {
  TargetMatrix m;
  for (auto& row : m) row.fill(kNaN);
  for (const auto& r : t.rows) {
    if (!r.estimate.is_direct()) continue;
    const auto a = static_cast<std::size_t>(r.estimate.first);
    const auto b = static_cast<std::size_t>(r.estimate.second);
    const double rho = r.rho(column);
    if (std::isnan(m[a][b]) || rho > m[a][b]) m[a][b] = m[b][a] = rho;
  }
  return m;
}

double prediction_cross_correlation(const PredictionTable& p, const ConfigKey& a,
                                    const ConfigKey& b) {
  const std::size_t sa = span_index(a.span, p.n_layers());
  const std::size_t sb = span_index(b.span, p.n_layers());
  const std::size_t ea = estimate_index(a.estimate);
  const std::size_t eb = estimate_index(b.estimate);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < p.n_compounds(); ++i) {
    if (!p.has(a.variant, i) || !p.has(b.variant, i)) continue;
    x.push_back(p.value(a.variant, i, sa, ea));
    y.push_back(p.value(b.variant, i, sb, eb));
  }
  return spearman(x, y);
}

std::string_view to_string(GroupBy g) {
  switch (g) {
    case GroupBy::kNone:
      return "none";
    case GroupBy::kSpan:
      return "span";
    case GroupBy::kEstimate:
      return "estimate";
  }
  return "?";
}

std::string_view to_string(Pairing p) { return p == Pairing::kValue ? "value" : "rho"; }

CrossModelResult cross_model_correlation(const SweepTable& t, const PredictionTable& p,
                                         GroupBy group_by, Pairing pairing, GoldColumn column) {
  const std::size_t n_spans = pairing == Pairing::kValue ? p.n_spans() : t.n_spans();
  const std::size_t n_layers = pairing == Pairing::kValue ? p.n_layers() : t.n_layers;
  if (pairing == Pairing::kRho &&
      (!t.has_variant(ModelVariant::kCased) || !t.has_variant(ModelVariant::kUncased))) {
    throw PreconditionError("cross-model correlation needs both variants in the sweep");
  }
  const auto spans = enumerate_spans(n_layers);

  std::vector<std::size_t> shared;
  if (pairing == Pairing::kValue) {
    for (std::size_t i = 0; i < p.n_compounds(); ++i) {
      if (p.has(ModelVariant::kCased, i) && p.has(ModelVariant::kUncased, i)) shared.push_back(i);
    }
  }

  // Appends the cased/uncased pair(s) for one (span, estimate) cell.
  auto collect = [&](std::size_t s, std::size_t e, std::vector<double>& x, std::vector<double>& y) {
    if (pairing == Pairing::kRho) {
      x.push_back(t.at(ModelVariant::kCased, s, e).rho(column));
      y.push_back(t.at(ModelVariant::kUncased, s, e).rho(column));
      return;
    }
    for (std::size_t i : shared) {
      x.push_back(p.value(ModelVariant::kCased, i, s, e));
      y.push_back(p.value(ModelVariant::kUncased, i, s, e));
    }
  };

  CrossModelResult out;
  auto add_group = [&](std::string name, std::vector<double>& x, std::vector<double>& y) {
    out.groups.push_back({std::move(name), spearman(x, y), x.size()});
    x.clear();
    y.clear();
  };

  std::vector<double> x, y;
  switch (group_by) {
    case GroupBy::kNone:
      for (std::size_t s = 0; s < n_spans; ++s) {
        for (std::size_t e = 0; e < kNumEstimates; ++e) collect(s, e, x, y);
      }
      add_group("all", x, y);
      break;
    case GroupBy::kSpan:
      for (std::size_t s = 0; s < n_spans; ++s) {
        for (std::size_t e = 0; e < kNumEstimates; ++e) collect(s, e, x, y);
        add_group(to_string(spans[s]), x, y);
      }
      break;
    case GroupBy::kEstimate:
      for (std::size_t e = 0; e < kNumEstimates; ++e) {
        for (std::size_t s = 0; s < n_spans; ++s) collect(s, e, x, y);
        add_group(to_string(all_estimates()[e]), x, y);
      }
      break;
  }

  std::vector<double> rhos;
  for (const auto& g : out.groups) rhos.push_back(g.rho);
  out.mean = mean_of(rhos);
  out.stddev = population_std(rhos, out.mean);
  return out;
}

SpanMatrix::SpanMatrix(std::size_t n_layers) : n(n_layers), values(n_layers * n_layers, kNaN) {}

SpanMatrix span_heatmap(const SweepTable& t, GoldColumn column, ModelVariant variant) {
  SpanMatrix m(t.n_layers);
  const auto spans = enumerate_spans(t.n_layers);
  for (std::size_t s = 0; s < spans.size(); ++s) {
    double sum = 0.0;
    for (std::size_t e = 0; e < kNumEstimates; ++e) sum += t.at(variant, s, e).rho(column);
    m.at(spans[s].start, spans[s].end) = sum / static_cast<double>(kNumEstimates);
  }
  return m;
}

SpanMatrix casing_delta(const SweepTable& t, GoldColumn column) {
  const auto cased = span_heatmap(t, column, ModelVariant::kCased);
  const auto uncased = span_heatmap(t, column, ModelVariant::kUncased);
  SpanMatrix d(t.n_layers);
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] = cased.values[i] - uncased.values[i];
  return d;
}

SummaryStats summary_stats(const SweepTable& t, ModelVariant variant, GoldColumn column) {
  std::vector<double> rhos;
  for (const auto& r : t.rows) {
    if (r.variant == variant) rhos.push_back(r.rho(column));
  }
  if (rhos.empty()) throw UndefinedStatisticError("no rows for variant " +
                                                  std::string(to_string(variant)));
  std::sort(rhos.begin(), rhos.end());
  SummaryStats s;
  s.min = rhos.front();
  s.max = rhos.back();
  const std::size_t n = rhos.size();
  s.median = n % 2 == 1 ? rhos[n / 2] : (rhos[n / 2 - 1] + rhos[n / 2]) / 2.0;
  return s;
}

}  // namespace compprobe
