#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "compprobe/errors.hpp"
#include "compprobe/estimates.hpp"
#include "oracles.hpp"

using namespace compprobe;

namespace {

TargetVectors random_targets(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> normal;
  TargetVectors tv;
  for (auto* v : {&tv.modif, &tv.head, &tv.cont, &tv.cls}) {
    v->resize(dim);
    for (double& x : *v) x = normal(rng);
  }
  tv.comp.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) tv.comp[d] = (tv.modif[d] + tv.head[d]) / 2;
  return tv;
}

}  // namespace

TEST(Estimates, Cosine) {
  const std::vector<double> u{1, 2, 2}, v{2, 1, 2};
  EXPECT_NEAR(cosine(u, v), 8.0 / 9.0, 1e-15);
  EXPECT_DOUBLE_EQ(cosine(u, u), 1.0);
  EXPECT_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 3}), 0.0);
  EXPECT_THROW(cosine(u, std::vector<double>{0, 0, 0}), UndefinedStatisticError);
}

TEST(Estimates, Enumeration) {
  const auto& all = all_estimates();
  EXPECT_EQ(all.size(), 19u);
  EXPECT_EQ(std::count_if(all.begin(), all.end(), [](auto& e) { return e.is_direct(); }), 10);
  std::set<std::string> names;
  for (std::size_t i = 0; i < all.size(); ++i) {
    names.insert(to_string(all[i]));
    EXPECT_EQ(estimate_index(all[i]), i);
    EXPECT_EQ(parse_estimate(to_string(all[i])), all[i]);
  }
  EXPECT_EQ(names.size(), 19u);
  EXPECT_EQ(to_string(all[0]), "modif:head");
  EXPECT_EQ(to_string(all[2]), "modif:cont");
  EXPECT_EQ(to_string(all[18]), "COMB(cls)");
  EXPECT_EQ(to_string(EstimateId::direct(Target::kCont, Target::kHead)), "head:cont");
  EXPECT_FALSE(parse_estimate("cont:head").has_value());
  EXPECT_FALSE(parse_estimate("ADD(head)").has_value());
}

TEST(Estimates, Compose) {
  EXPECT_DOUBLE_EQ(compose(Composition::kAdd, 1, 1), 2);
  EXPECT_DOUBLE_EQ(compose(Composition::kMult, 1, 1), 1);
  EXPECT_DOUBLE_EQ(compose(Composition::kComb, 1, 1), 3);
  EXPECT_NEAR(compose(Composition::kAdd, 0.5, 0.2), 0.7, 1e-15);
  EXPECT_NEAR(compose(Composition::kMult, 0.5, 0.2), 0.1, 1e-15);
  EXPECT_NEAR(compose(Composition::kComb, 0.5, 0.2), 0.8, 1e-15);
  // no sign correction when both cosines are negative
  EXPECT_DOUBLE_EQ(compose(Composition::kMult, -0.5, -0.4), 0.2);
}

TEST(Estimates, CompCollapsesWhenHeadEqualsModif) {
  std::mt19937_64 rng(3);
  auto tv = random_targets(rng, 6);
  tv.head = tv.modif;
  tv.comp = tv.modif;
  EXPECT_DOUBLE_EQ(direct_estimate(tv, Target::kModif, Target::kComp), 1.0);
}

TEST(Estimates, MatchOracleAndRanges) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tv = random_targets(rng, 4 + trial % 13);
    const auto values = evaluate_estimates(tv);
    const auto& all = all_estimates();
    for (std::size_t i = 0; i < all.size(); ++i) {
      const auto& e = all[i];
      if (e.is_direct()) {
        EXPECT_NEAR(values[i], oracle::cosine(tv.get(e.first), tv.get(e.second)), 1e-12);
        EXPECT_LE(std::abs(values[i]), 1.0);
      } else {
        const double a = oracle::cosine(tv.modif, tv.get(e.reference));
        const double b = oracle::cosine(tv.head, tv.get(e.reference));
        const double expect = e.function == Composition::kAdd    ? a + b
                              : e.function == Composition::kMult ? a * b
                                                                 : a + b + a * b;
        EXPECT_NEAR(values[i], expect, 1e-12);
        EXPECT_EQ(values[i], composite_estimate(tv, e.function, e.reference));
      }
    }
    for (Target ref : {Target::kComp, Target::kCont, Target::kCls}) {
      const auto add = values[estimate_index(EstimateId::composite(Composition::kAdd, ref))];
      const auto mult = values[estimate_index(EstimateId::composite(Composition::kMult, ref))];
      const auto comb = values[estimate_index(EstimateId::composite(Composition::kComb, ref))];
      EXPECT_EQ(comb, add + mult);
    }
  }
}

TEST(Estimates, GramPathMatchesDirectPath) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tv = random_targets(rng, 8);
    GramMatrix g{};
    const Target ts[] = {Target::kModif, Target::kHead, Target::kComp, Target::kCont, Target::kCls};
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        double dot = 0;
        for (std::size_t d = 0; d < 8; ++d) dot += tv.get(ts[i])[d] * tv.get(ts[j])[d];
        g[i][j] = dot;
      }
    std::array<double, kNumEstimates> out{};
    estimates_from_gram(g, out);
    const auto ref = evaluate_estimates(tv);
    for (std::size_t i = 0; i < kNumEstimates; ++i) EXPECT_NEAR(out[i], ref[i], 1e-12);
  }
}

TEST(Estimates, Aggregate) {
  EXPECT_DOUBLE_EQ(aggregate(std::vector<double>{0.4}), 0.4);
  EXPECT_NEAR(aggregate(std::vector<double>{0.2, 0.4, 0.6}), 0.4, 1e-15);
  EXPECT_THROW(aggregate(std::vector<double>{}), UndefinedStatisticError);
  std::mt19937_64 rng(4);
  std::vector<double> v(25);
  for (double& x : v) x = std::uniform_real_distribution<double>(-1, 1)(rng);
  const double a = aggregate(v);
  std::shuffle(v.begin(), v.end(), rng);
  EXPECT_NEAR(aggregate(v), a, 1e-15);
}

TEST(Estimates, MultIsAveragedPerSentence) {
  // sentence 1: a=1, b=0; sentence 2: a=0, b=1
  TargetVectors s1, s2;
  s1.modif = {1, 0};
  s1.head = {0, 1};
  s1.cont = {1, 0};
  s2.modif = {0, 1};
  s2.head = {1, 0};
  s2.cont = {1, 0};
  for (auto* s : {&s1, &s2}) {
    s->comp = {(s->modif[0] + s->head[0]) / 2, (s->modif[1] + s->head[1]) / 2};
    s->cls = {1, 1};
  }
  const auto i = estimate_index(EstimateId::composite(Composition::kMult, Target::kCont));
  const std::vector<double> per_sentence{evaluate_estimates(s1)[i], evaluate_estimates(s2)[i]};
  EXPECT_EQ(aggregate(per_sentence), 0.0);
  // multiplying averaged cosines would give 0.5 * 0.5
  EXPECT_NE(aggregate(per_sentence), 0.25);
}
