#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "compprobe/estimates.hpp"
#include "compprobe/gold_standard.hpp"
#include "compprobe/representation.hpp"
#include "compprobe/sweep_kernels.hpp"

namespace compprobe {

enum class GoldColumn : std::uint8_t { kModifier = 0, kHead = 1 };
inline constexpr GoldColumn kAllColumns[] = {GoldColumn::kModifier, GoldColumn::kHead};
std::string_view to_string(GoldColumn c);

double gold_rating(const CompoundEntry& e, GoldColumn c);

// Compound-level predictions for both variants, indexed by gold order.
class PredictionTable {
 public:
  PredictionTable() = default;
  PredictionTable(const GoldDataset& gold, std::size_t n_layers);

  // Places each result by its compound and variant. Throws ValidationError for
  // unknown compounds, duplicates, or a layer count that disagrees with the table.
  static PredictionTable build(const GoldDataset& gold, std::vector<CompoundPredictions> results);

  void set(std::size_t compound, CompoundPredictions p);

  std::size_t n_layers() const { return n_layers_; }
  std::size_t n_spans() const { return n_layers_ * (n_layers_ + 1) / 2; }
  std::size_t n_compounds() const { return names_.size(); }
  const std::string& compound(std::size_t i) const { return names_[i]; }

  bool has(ModelVariant v, std::size_t compound) const {
    return slots_[index(v)][compound].n_sentences > 0;
  }
  const CompoundPredictions& get(ModelVariant v, std::size_t compound) const {
    return slots_[index(v)][compound];
  }
  double value(ModelVariant v, std::size_t compound, std::size_t span, std::size_t estimate) const {
    return slots_[index(v)][compound].at(span, estimate);
  }
  std::size_t count(ModelVariant v) const;

 private:
  static std::size_t index(ModelVariant v) { return static_cast<std::size_t>(v); }

  std::size_t n_layers_ = 0;
  std::vector<std::string> names_;
  std::array<std::vector<CompoundPredictions>, 2> slots_;
};

struct SweepResult {
  ModelVariant variant = ModelVariant::kCased;
  LayerSpan span;
  EstimateId estimate;
  double rho_modifier = 0.0;
  double rho_head = 0.0;
  std::size_t n_compounds = 0;

  double rho(GoldColumn c) const { return c == GoldColumn::kModifier ? rho_modifier : rho_head; }
};

// Rows ordered by variant, span (enumerate_spans order), estimate.
struct SweepTable {
  std::size_t n_layers = 0;
  std::vector<ModelVariant> variants;
  std::vector<SweepResult> rows;

  std::size_t n_spans() const { return n_layers * (n_layers + 1) / 2; }
  bool has_variant(ModelVariant v) const;
  const SweepResult& at(ModelVariant v, std::size_t span, std::size_t estimate) const;
};

// Spearman of compound-level predictions against each gold column for every
// (variant, span, estimate). Compounds without predictions are left out per
// variant; fewer than 3 usable compounds throws UndefinedStatisticError.
SweepTable run_sweep(const GoldDataset& gold, const PredictionTable& predictions,
                     std::span<const ModelVariant> variants = kAllVariants);

// Sorted by rho descending, ties by (variant, span start, span end, estimate).
std::vector<SweepResult> best_configs(const SweepTable& t, GoldColumn column, std::size_t k);

// Max rho over spans and variants for each direct pair; NaN on the diagonal.
using TargetMatrix = std::array<std::array<double, kNumTargets>, kNumTargets>;
TargetMatrix estimate_matrix(const SweepTable& t, GoldColumn column);

struct ConfigKey {
  ModelVariant variant = ModelVariant::kCased;
  LayerSpan span;
  EstimateId estimate;
};

// Spearman between two configurations' predictions over compounds that have both.
double prediction_cross_correlation(const PredictionTable& p, const ConfigKey& a,
                                    const ConfigKey& b);

enum class GroupBy : std::uint8_t { kNone, kSpan, kEstimate };
std::string_view to_string(GroupBy g);

// kValue pairs compound-level prediction values across the two variants;
// it does not depend on the gold column. kRho pairs the sweep's rho values.
enum class Pairing : std::uint8_t { kValue, kRho };
std::string_view to_string(Pairing p);

struct GroupCorrelation {
  std::string group;
  double rho = 0.0;
  std::size_t n_pairs = 0;
};

struct CrossModelResult {
  std::vector<GroupCorrelation> groups;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation over groups
};

CrossModelResult cross_model_correlation(const SweepTable& t, const PredictionTable& p,
                                         GroupBy group_by, Pairing pairing, GoldColumn column);

// n_layers x n_layers grid indexed (start, end); NaN where start > end.
struct SpanMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  SpanMatrix() = default;
  explicit SpanMatrix(std::size_t n_layers);

  double& at(std::size_t start, std::size_t end) { return values[end * n + start]; }
  double at(std::size_t start, std::size_t end) const { return values[end * n + start]; }
};

// Mean rho over all estimates per span, for one variant and column.
SpanMatrix span_heatmap(const SweepTable& t, GoldColumn column, ModelVariant variant);

// Cased heatmap minus uncased heatmap.
SpanMatrix casing_delta(const SweepTable& t, GoldColumn column);

struct SummaryStats {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};
SummaryStats summary_stats(const SweepTable& t, ModelVariant variant, GoldColumn column);

}  // namespace compprobe
