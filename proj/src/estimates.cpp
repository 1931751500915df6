#include "compprobe/estimates.hpp"

#include <cmath>

#include "compprobe/errors.hpp"

namespace compprobe {

namespace {

constexpr std::array<EstimateId, kNumEstimates> make_estimates() {
  std::array<EstimateId, kNumEstimates> out{};
  std::size_t k = 0;
  for (std::size_t a = 0; a < kNumTargets; ++a) {
    for (std::size_t b = a + 1; b < kNumTargets; ++b) {
      out[k++] = EstimateId::direct(static_cast<Target>(a), static_cast<Target>(b));
    }
  }
  for (Target ref : {Target::kComp, Target::kCont, Target::kCls}) {
    for (Composition f : {Composition::kAdd, Composition::kMult, Composition::kComb}) {
      out[k++] = EstimateId::composite(f, ref);
    }
  }
  return out;
}

constexpr auto kEstimates = make_estimates();

void require_nonzero(double norm_sq) {
  if (!(norm_sq > 0.0)) throw UndefinedStatisticError("cosine of a zero-norm vector");
}

}  // namespace

std::string_view to_string(Composition c) {
  switch (c) {
    case Composition::kAdd:
      return "ADD";
    case Composition::kMult:
      return "MULT";
    case Composition::kComb:
      return "COMB";
  }
  return "?";
}

const std::array<EstimateId, kNumEstimates>& all_estimates() { return kEstimates; }

std::size_t direct_index(Target a, Target b) {
  if (a == b) throw PreconditionError("direct estimate needs two distinct targets");
  auto i = static_cast<std::size_t>(a < b ? a : b);
  auto j = static_cast<std::size_t>(a < b ? b : a);
  // pairs (i, j) with smaller first index come first
  return i * (2 * kNumTargets - i - 1) / 2 + (j - i - 1);
}

std::size_t estimate_index(const EstimateId& e) {
  if (e.is_direct()) return direct_index(e.first, e.second);
  std::size_t ref = 0;
  switch (e.reference) {
    case Target::kComp:
      ref = 0;
      break;
    case Target::kCont:
      ref = 1;
      break;
    case Target::kCls:
      ref = 2;
      break;
    default:
      throw PreconditionError("composite reference must be comp, cont or cls");
  }
  return kNumDirectEstimates + ref * 3 + static_cast<std::size_t>(e.function);
}

std::string to_string(const EstimateId& e) {
  if (e.is_direct()) {
    return std::string(to_string(e.first)) + ":" + std::string(to_string(e.second));
  }
  return std::string(to_string(e.function)) + "(" + std::string(to_string(e.reference)) + ")";
}

std::optional<EstimateId> parse_estimate(std::string_view s) {
  for (const auto& e : kEstimates) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw PreconditionError("cosine of vectors with different dimension");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  require_nonzero(uu);
  require_nonzero(vv);
  return dot / (std::sqrt(uu) * std::sqrt(vv));
}

double direct_estimate(const TargetVectors& tv, Target a, Target b) {
  return cosine(tv.get(a), tv.get(b));
}

double compose(Composition f, double a, double b) {
  switch (f) {
    case Composition::kAdd:
      return a + b;
    case Composition::kMult:
      return a * b;
    case Composition::kComb:
      return (a + b) + a * b;
  }
  throw PreconditionError("unknown composition");
}

double composite_estimate(const TargetVectors& tv, Composition f, Target reference) {
  if (reference == Target::kModif || reference == Target::kHead) {
    throw PreconditionError("composite reference must be comp, cont or cls");
  }
  return compose(f, direct_estimate(tv, Target::kModif, reference),
                 direct_estimate(tv, Target::kHead, reference));
}

std::array<double, kNumEstimates> evaluate_estimates(const TargetVectors& tv) {
  std::array<double, kNumEstimates> out{};
  for (std::size_t k = 0; k < kNumEstimates; ++k) {
    const auto& e = kEstimates[k];
    out[k] = e.is_direct() ? direct_estimate(tv, e.first, e.second)
                           : composite_estimate(tv, e.function, e.reference);
  }
  return out;
}

void estimates_from_gram(const GramMatrix& gram, std::span<double, kNumEstimates> out) {
  std::array<double, kNumTargets> norm{};
  for (std::size_t a = 0; a < kNumTargets; ++a) {
    require_nonzero(gram[a][a]);
    norm[a] = std::sqrt(gram[a][a]);
  }
  std::size_t k = 0;
  for (std::size_t a = 0; a < kNumTargets; ++a) {
    for (std::size_t b = a + 1; b < kNumTargets; ++b) {
      out[k++] = gram[a][b] / (norm[a] * norm[b]);
    }
  }
  for (Target ref : {Target::kComp, Target::kCont, Target::kCls}) {
    const double a = out[direct_index(Target::kModif, ref)];
    const double b = out[direct_index(Target::kHead, ref)];
    out[k++] = compose(Composition::kAdd, a, b);
    out[k++] = compose(Composition::kMult, a, b);
    out[k++] = compose(Composition::kComb, a, b);
  }
}

double aggregate(std::span<const double> per_sentence) {
  if (per_sentence.empty()) throw UndefinedStatisticError("aggregate of an empty list");
  double sum = 0.0;
  for (double v : per_sentence) sum += v;
  return sum / static_cast<double>(per_sentence.size());
}

}  // namespace compprobe
