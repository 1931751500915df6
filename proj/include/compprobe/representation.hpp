#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "compprobe/embedding_store.hpp"

namespace compprobe {

// Inclusive range of encoder layers [start, end].
struct LayerSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  friend auto operator<=>(const LayerSpan&, const LayerSpan&) = default;
};

std::string to_string(const LayerSpan& s);       // "4-4"
LayerSpan parse_span(const std::string& text);   // accepts "4-4"

// All contiguous spans ordered by start, then end: n(n+1)/2 of them.
std::vector<LayerSpan> enumerate_spans(std::size_t n_layers);

// Position of `s` in enumerate_spans(n_layers).
std::size_t span_index(const LayerSpan& s, std::size_t n_layers);

// Row-major [n_tokens][dim] matrix of layer-averaged token vectors.
struct TokenMatrix {
  std::size_t n_tokens = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  const double* row(std::size_t tok) const { return values.data() + tok * dim; }
};

TokenMatrix pool_span(const SentenceTensor& t, const LayerSpan& span);

enum class Target : std::uint8_t { kModif = 0, kHead, kComp, kCont, kCls };
inline constexpr std::size_t kNumTargets = 5;
std::string_view to_string(Target t);

struct TargetVectors {
  std::vector<double> modif;
  std::vector<double> head;
  std::vector<double> comp;
  std::vector<double> cont;
  std::vector<double> cls;
  LayerSpan span;

  const std::vector<double>& get(Target t) const;
};

// Pools the span first, then averages the subwords of each role.
// comp is the mean of modif and head, not of their tokens.
TargetVectors target_vectors(const SentenceTensor& t, const LayerSpan& span);
TargetVectors target_vectors(const TokenMatrix& pooled, std::span<const TokenRole> roles,
                             const LayerSpan& span);

}  // namespace compprobe
