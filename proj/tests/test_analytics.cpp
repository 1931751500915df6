#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "compprobe/analytics.hpp"
#include "compprobe/errors.hpp"
#include "oracles.hpp"

using namespace compprobe;

namespace {

using RhoFn = std::function<double(ModelVariant, std::size_t span, std::size_t estimate)>;

SweepTable make_table(std::size_t n_layers, const RhoFn& rho) {
  SweepTable t;
  t.n_layers = n_layers;
  t.variants = {ModelVariant::kCased, ModelVariant::kUncased};
  const auto spans = enumerate_spans(n_layers);
  for (ModelVariant v : t.variants)
    for (std::size_t s = 0; s < spans.size(); ++s)
      for (std::size_t e = 0; e < kNumEstimates; ++e) {
        const double r = rho(v, s, e);
        t.rows.push_back({v, spans[s], all_estimates()[e], r, -r, 10});
      }
  return t;
}

GoldDataset make_gold(std::size_t n, std::mt19937_64& rng) {
  std::vector<CompoundEntry> entries;
  std::uniform_real_distribution<double> rating(1, 6);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string m = "M" + std::to_string(i), h = "H" + std::to_string(i % 5);
    entries.push_back({m + h, m, h, rating(rng), rating(rng)});
  }
  return GoldDataset(entries);
}

// Random predictions keyed by compound name so that reordering the gold set
// keeps each compound's values.
PredictionTable make_predictions(const GoldDataset& gold, std::size_t n_layers,
                                 std::uint64_t seed, bool identical_variants = false) {
  PredictionTable p(gold, n_layers);
  const std::size_t n = p.n_spans() * kNumEstimates;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (ModelVariant v : kAllVariants) {
      const std::uint64_t variant_salt = identical_variants ? 0 : static_cast<std::uint64_t>(v);
      std::seed_seq seq{seed, variant_salt, std::hash<std::string>{}(gold[i].compound)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal;
      CompoundPredictions cp{gold[i].compound, v, n_layers, 3, std::vector<double>(n)};
      for (double& x : cp.values) x = normal(rng);
      p.set(i, std::move(cp));
    }
  }
  return p;
}

}  // namespace

TEST(Analytics, SweepCardinalityAndOrder) {
  std::mt19937_64 rng(1);
  const auto gold = make_gold(12, rng);
  const auto p = make_predictions(gold, 13, 2);
  const auto t = run_sweep(gold, p);
  ASSERT_EQ(t.rows.size(), 3458u);
  const auto spans = enumerate_spans(13);
  std::size_t i = 0;
  for (ModelVariant v : kAllVariants)
    for (const auto& s : spans)
      for (const auto& e : all_estimates()) {
        EXPECT_EQ(t.rows[i].variant, v);
        EXPECT_EQ(t.rows[i].span, s);
        EXPECT_EQ(t.rows[i].estimate, e);
        EXPECT_EQ(t.rows[i].n_compounds, 12u);
        ++i;
      }
}

TEST(Analytics, SweepRhoMatchesOracle) {
  std::mt19937_64 rng(3);
  const auto gold = make_gold(15, rng);
  const auto p = make_predictions(gold, 4, 4);
  const auto t = run_sweep(gold, p);
  for (const auto& row : t.rows) {
    std::vector<double> pred, gm, gh;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      pred.push_back(p.value(row.variant, i, span_index(row.span, 4), estimate_index(row.estimate)));
      gm.push_back(gold[i].rating_modifier);
      gh.push_back(gold[i].rating_head);
    }
    EXPECT_NEAR(row.rho_modifier, oracle::spearman(pred, gm), 1e-12);
    EXPECT_NEAR(row.rho_head, oracle::spearman(pred, gh), 1e-12);
  }
}

TEST(Analytics, GoldPermutationLeavesRhoUnchanged) {
  std::mt19937_64 rng(5);
  const auto gold = make_gold(20, rng);
  auto entries = gold.entries();
  std::shuffle(entries.begin(), entries.end(), rng);
  const GoldDataset shuffled(entries);
  const auto a = run_sweep(gold, make_predictions(gold, 3, 6));
  const auto b = run_sweep(shuffled, make_predictions(shuffled, 3, 6));
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_NEAR(a.rows[i].rho_modifier, b.rows[i].rho_modifier, 1e-12);
    EXPECT_NEAR(a.rows[i].rho_head, b.rows[i].rho_head, 1e-12);
  }
}

TEST(Analytics, CompoundsWithoutPredictionsExcluded) {
  std::mt19937_64 rng(7);
  const auto gold = make_gold(6, rng);
  auto full = make_predictions(gold, 2, 8);
  PredictionTable partial(gold, 2);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (i == 2) continue;
    for (ModelVariant v : kAllVariants) partial.set(i, full.get(v, i));
  }
  const auto t = run_sweep(gold, partial);
  EXPECT_EQ(t.rows[0].n_compounds, 5u);

  PredictionTable tiny(gold, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (ModelVariant v : kAllVariants) tiny.set(i, full.get(v, i));
  EXPECT_THROW(run_sweep(gold, tiny), UndefinedStatisticError);
}

TEST(Analytics, PredictionTableBuildRejectsUnknownAndDuplicate) {
  std::mt19937_64 rng(9);
  const auto gold = make_gold(3, rng);
  const auto p = make_predictions(gold, 2, 1);
  std::vector<CompoundPredictions> results{p.get(ModelVariant::kCased, 0)};
  results.back().compound = "Unbekannt";
  EXPECT_THROW(PredictionTable::build(gold, results), ValidationError);
  results = {p.get(ModelVariant::kCased, 0), p.get(ModelVariant::kCased, 0)};
  EXPECT_THROW(PredictionTable::build(gold, results), ValidationError);
}

TEST(Analytics, BestConfigsOrderingAndTies) {
  // every rho ties except one planted peak
  const auto t = make_table(3, [](ModelVariant v, std::size_t s, std::size_t e) {
    return v == ModelVariant::kUncased && s == 3 && e == 2 ? 0.9 : 0.1;
  });
  EXPECT_TRUE(best_configs(t, GoldColumn::kModifier, 0).empty());
  const auto best = best_configs(t, GoldColumn::kModifier, 3);
  ASSERT_EQ(best.size(), 3u);
  EXPECT_EQ(best[0].variant, ModelVariant::kUncased);
  EXPECT_EQ(best[0].span, (LayerSpan{1, 1}));
  EXPECT_EQ(to_string(best[0].estimate), "modif:cont");
  // ties: cased first, span 0-0, estimate order
  EXPECT_EQ(best[1].variant, ModelVariant::kCased);
  EXPECT_EQ(best[1].span, (LayerSpan{0, 0}));
  EXPECT_EQ(estimate_index(best[1].estimate), 0u);
  EXPECT_EQ(estimate_index(best[2].estimate), 1u);
  EXPECT_EQ(best_configs(t, GoldColumn::kHead, 100000).size(), t.rows.size());
}

TEST(Analytics, EstimateMatrixSymmetricWithBlankDiagonal) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> rhos(2 * 6 * kNumEstimates);
  for (double& r : rhos) r = u(rng);
  const auto t = make_table(3, [&](ModelVariant v, std::size_t s, std::size_t e) {
    return rhos[(static_cast<std::size_t>(v) * 6 + s) * kNumEstimates + e];
  });
  const auto m = estimate_matrix(t, GoldColumn::kModifier);
  for (std::size_t i = 0; i < kNumTargets; ++i) {
    EXPECT_TRUE(std::isnan(m[i][i]));
    for (std::size_t j = 0; j < kNumTargets; ++j) {
      if (i == j) continue;
      EXPECT_EQ(m[i][j], m[j][i]);
      const auto e = direct_index(static_cast<Target>(i), static_cast<Target>(j));
      double best = -2;
      for (const auto& row : t.rows)
        if (estimate_index(row.estimate) == e) best = std::max(best, row.rho_modifier);
      EXPECT_EQ(m[i][j], best);
    }
  }
}

TEST(Analytics, HeatmapCellIsMeanOfNineteenRows) {
  std::mt19937_64 rng(11);
  const auto gold = make_gold(10, rng);
  const auto t = run_sweep(gold, make_predictions(gold, 13, 12));
  for (ModelVariant v : kAllVariants) {
    for (GoldColumn c : kAllColumns) {
      const auto m = span_heatmap(t, c, v);
      ASSERT_EQ(m.n, 13u);
      for (std::size_t a = 0; a < 13; ++a)
        for (std::size_t b = 0; b < 13; ++b) {
          if (a > b) {
            EXPECT_TRUE(std::isnan(m.at(a, b)));
            continue;
          }
          double sum = 0;
          std::size_t n = 0;
          for (const auto& row : t.rows)
            if (row.variant == v && row.span == LayerSpan{a, b}) {
              sum += row.rho(c);
              ++n;
            }
          ASSERT_EQ(n, 19u);
          EXPECT_NEAR(m.at(a, b), sum / 19, 1e-12);
        }
    }
  }
}

TEST(Analytics, ConstantTableHeatmap) {
  const auto t = make_table(13, [](ModelVariant, std::size_t, std::size_t) { return 0.25; });
  const auto m = span_heatmap(t, GoldColumn::kModifier, ModelVariant::kCased);
  for (std::size_t a = 0; a < 13; ++a)
    for (std::size_t b = a; b < 13; ++b) EXPECT_DOUBLE_EQ(m.at(a, b), 0.25);
}

TEST(Analytics, CasingDelta) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> base(91 * kNumEstimates);
  for (double& r : base) r = u(rng);
  const auto t = make_table(13, [&](ModelVariant v, std::size_t s, std::size_t e) {
    return base[s * kNumEstimates + e] + (v == ModelVariant::kCased ? 0.05 : 0.0);
  });
  const auto d = casing_delta(t, GoldColumn::kModifier);
  for (std::size_t a = 0; a < 13; ++a)
    for (std::size_t b = a; b < 13; ++b) EXPECT_NEAR(d.at(a, b), 0.05, 1e-12);

  const auto same = make_table(13, [&](ModelVariant, std::size_t s, std::size_t e) {
    return base[s * kNumEstimates + e];
  });
  const auto z = casing_delta(same, GoldColumn::kHead);
  for (std::size_t a = 0; a < 13; ++a)
    for (std::size_t b = a; b < 13; ++b) EXPECT_EQ(z.at(a, b), 0.0);
}

TEST(Analytics, CrossModelIdenticalVariants) {
  std::mt19937_64 rng(14);
  const auto gold = make_gold(8, rng);
  const auto p = make_predictions(gold, 4, 15, true);
  const auto t = run_sweep(gold, p);
  for (Pairing pairing : {Pairing::kValue, Pairing::kRho}) {
    for (GroupBy g : {GroupBy::kNone, GroupBy::kSpan, GroupBy::kEstimate}) {
      const auto r = cross_model_correlation(t, p, g, pairing, GoldColumn::kHead);
      const std::size_t expect = g == GroupBy::kNone ? 1 : g == GroupBy::kSpan ? 10 : 19;
      ASSERT_EQ(r.groups.size(), expect);
      for (const auto& grp : r.groups) EXPECT_NEAR(grp.rho, 1.0, 1e-12) << grp.group;
      EXPECT_NEAR(r.mean, 1.0, 1e-12);
      EXPECT_NEAR(r.stddev, 0.0, 1e-12);
    }
  }
}

TEST(Analytics, CrossModelValuePairingMatchesOracle) {
  std::mt19937_64 rng(16);
  const auto gold = make_gold(7, rng);
  const auto p = make_predictions(gold, 3, 17);
  const auto t = run_sweep(gold, p);
  const auto r = cross_model_correlation(t, p, GroupBy::kSpan, Pairing::kValue, GoldColumn::kModifier);
  ASSERT_EQ(r.groups.size(), 6u);
  std::vector<double> rhos;
  for (std::size_t s = 0; s < 6; ++s) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < gold.size(); ++i)
      for (std::size_t e = 0; e < kNumEstimates; ++e) {
        x.push_back(p.value(ModelVariant::kCased, i, s, e));
        y.push_back(p.value(ModelVariant::kUncased, i, s, e));
      }
    const double rho = oracle::spearman(x, y);
    EXPECT_NEAR(r.groups[s].rho, rho, 1e-12);
    EXPECT_EQ(r.groups[s].n_pairs, 7u * kNumEstimates);
    rhos.push_back(rho);
  }
  double mean = 0, var = 0;
  for (double v : rhos) mean += v / 6;
  for (double v : rhos) var += (v - mean) * (v - mean) / 6;
  EXPECT_NEAR(r.mean, mean, 1e-12);
  EXPECT_NEAR(r.stddev, std::sqrt(var), 1e-12);
  // value pairing does not look at the gold column
  const auto h = cross_model_correlation(t, p, GroupBy::kSpan, Pairing::kValue, GoldColumn::kHead);
  EXPECT_EQ(h.mean, r.mean);
}

TEST(Analytics, PredictionCrossCorrelation) {
  std::mt19937_64 rng(18);
  const auto gold = make_gold(9, rng);
  auto p = make_predictions(gold, 2, 19);
  const ConfigKey a{ModelVariant::kCased, {0, 1}, all_estimates()[2]};
  EXPECT_NEAR(prediction_cross_correlation(p, a, a), 1.0, 1e-12);

  // make estimate 3 the negation of estimate 2 for every compound
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto cp = p.get(ModelVariant::kCased, i);
    cp.values[1 * kNumEstimates + 3] = -cp.values[1 * kNumEstimates + 2];
    p.set(i, cp);
  }
  const ConfigKey b{ModelVariant::kCased, {0, 1}, all_estimates()[3]};
  EXPECT_NEAR(prediction_cross_correlation(p, a, b), -1.0, 1e-12);
}

TEST(Analytics, SummaryStats) {
  SweepTable one;
  one.n_layers = 1;
  one.variants = {ModelVariant::kCased};
  one.rows.push_back({ModelVariant::kCased, {0, 0}, all_estimates()[0], 0.3, 0.1, 5});
  const auto s = summary_stats(one, ModelVariant::kCased, GoldColumn::kModifier);
  EXPECT_EQ(s.median, 0.3);
  EXPECT_EQ(s.min, 0.3);
  EXPECT_EQ(s.max, 0.3);

  const auto t = make_table(2, [](ModelVariant, std::size_t s, std::size_t e) {
    return static_cast<double>(s * kNumEstimates + e);
  });
  const auto st = summary_stats(t, ModelVariant::kUncased, GoldColumn::kModifier);
  EXPECT_EQ(st.min, 0.0);
  EXPECT_EQ(st.max, 56.0);
  EXPECT_EQ(st.median, 28.0);
}
