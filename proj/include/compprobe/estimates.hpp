#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "compprobe/representation.hpp"

namespace compprobe {

enum class Composition : std::uint8_t { kAdd = 0, kMult, kComb };
std::string_view to_string(Composition c);

// Either the cosine of two targets (direct) or a composition of
// cosine(modif, reference) and cosine(head, reference).
struct EstimateId {
  enum class Kind : std::uint8_t { kDirect, kComposite };

  Kind kind = Kind::kDirect;
  Target first = Target::kModif;   // direct only; first < second
  Target second = Target::kHead;   // direct only
  Composition function = Composition::kAdd;  // composite only
  Target reference = Target::kComp;          // composite only, one of comp/cont/cls

  static constexpr EstimateId direct(Target a, Target b) {
    EstimateId e;
    e.kind = Kind::kDirect;
    e.first = a < b ? a : b;
    e.second = a < b ? b : a;
    return e;
  }
  static constexpr EstimateId composite(Composition f, Target ref) {
    EstimateId e;
    e.kind = Kind::kComposite;
    e.function = f;
    e.reference = ref;
    return e;
  }

  bool is_direct() const { return kind == Kind::kDirect; }
  friend bool operator==(const EstimateId&, const EstimateId&) = default;
};

inline constexpr std::size_t kNumDirectEstimates = 10;
inline constexpr std::size_t kNumCompositeEstimates = 9;
inline constexpr std::size_t kNumEstimates = kNumDirectEstimates + kNumCompositeEstimates;

// Fixed order: the 10 direct pairs (lexicographic over modif, head, comp,
// cont, cls), then ADD/MULT/COMB for comp, cont and cls.
const std::array<EstimateId, kNumEstimates>& all_estimates();
std::size_t estimate_index(const EstimateId& e);
std::size_t direct_index(Target a, Target b);

std::string to_string(const EstimateId& e);  // "modif:cont", "COMB(cls)"
std::optional<EstimateId> parse_estimate(std::string_view s);

// dot(u, v) / (|u| |v|); throws UndefinedStatisticError on a zero vector.
double cosine(std::span<const double> u, std::span<const double> v);

double direct_estimate(const TargetVectors& tv, Target a, Target b);
double compose(Composition f, double a, double b);
double composite_estimate(const TargetVectors& tv, Composition f, Target reference);

// All 19 estimates for one sentence and span, in all_estimates() order.
std::array<double, kNumEstimates> evaluate_estimates(const TargetVectors& tv);

// Same result from the 5x5 matrix of dot products between targets.
using GramMatrix = std::array<std::array<double, kNumTargets>, kNumTargets>;
void estimates_from_gram(const GramMatrix& gram, std::span<double, kNumEstimates> out);

double aggregate(std::span<const double> per_sentence);

}  // namespace compprobe
