#include "compprobe/representation.hpp"

#include <charconv>

#include "compprobe/errors.hpp"

namespace compprobe {

std::string to_string(const LayerSpan& s) {
  return std::to_string(s.start) + "-" + std::to_string(s.end);
}

LayerSpan parse_span(const std::string& text) {
  const auto dash = text.find('-');
  LayerSpan s;
  auto parse = [&](std::string_view part, std::size_t& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw ValidationError("bad layer span '" + text + "'");
    }
  };
  if (dash == std::string::npos) throw ValidationError("bad layer span '" + text + "'");
  parse(std::string_view(text).substr(0, dash), s.start);
  parse(std::string_view(text).substr(dash + 1), s.end);
  if (s.start > s.end) throw ValidationError("layer span start after end: '" + text + "'");
  return s;
}

std::vector<LayerSpan> enumerate_spans(std::size_t n_layers) {
  if (n_layers == 0) throw PreconditionError("enumerate_spans needs at least one layer");
  std::vector<LayerSpan> out;
  out.reserve(n_layers * (n_layers + 1) / 2);
  for (std::size_t a = 0; a < n_layers; ++a) {
    for (std::size_t b = a; b < n_layers; ++b) out.push_back({a, b});
  }
  return out;
}

std::size_t span_index(const LayerSpan& s, std::size_t n_layers) {
  if (s.start > s.end || s.end >= n_layers) throw PreconditionError("span out of range");
  // spans with a smaller start come first: sum_{a < start} (n - a)
  return s.start * (2 * n_layers - s.start + 1) / 2 + (s.end - s.start);
}

TokenMatrix pool_span(const SentenceTensor& t, const LayerSpan& span) {
  if (span.start > span.end || span.end >= t.n_layers) {
    throw PreconditionError("span " + to_string(span) + " outside " +
                            std::to_string(t.n_layers) + " layers");
  }
  TokenMatrix m{t.n_tokens, t.dim, std::vector<double>(t.n_tokens * t.dim, 0.0)};
  for (std::size_t layer = span.start; layer <= span.end; ++layer) {
    const float* src = t.vectors.data() + layer * t.n_tokens * t.dim;
    for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] += src[i];
  }
  const double inv = 1.0 / static_cast<double>(span.length());
  for (double& v : m.values) v *= inv;
  return m;
}

std::string_view to_string(Target t) {
  static constexpr std::string_view kNames[] = {"modif", "head", "comp", "cont", "cls"};
  return kNames[static_cast<std::size_t>(t)];
}

const std::vector<double>& TargetVectors::get(Target t) const {
  switch (t) {
    case Target::kModif:
      return modif;
    case Target::kHead:
      return head;
    case Target::kComp:
      return comp;
    case Target::kCont:
      return cont;
    case Target::kCls:
      return cls;
  }
  throw PreconditionError("unknown target");
}

TargetVectors target_vectors(const TokenMatrix& pooled, std::span<const TokenRole> roles,
                             const LayerSpan& span) {
  const std::size_t dim = pooled.dim;
  TargetVectors tv;
  tv.span = span;
  tv.modif.assign(dim, 0.0);
  tv.head.assign(dim, 0.0);
  tv.cont.assign(dim, 0.0);
  tv.cls.assign(dim, 0.0);
  std::size_t n_mod = 0, n_head = 0, n_cont = 0, n_cls = 0;
  for (std::size_t tok = 0; tok < pooled.n_tokens; ++tok) {
    std::vector<double>* dst = nullptr;
    switch (roles[tok]) {
      case TokenRole::kModifierSubword:
        dst = &tv.modif;
        ++n_mod;
        break;
      case TokenRole::kHeadSubword:
        dst = &tv.head;
        ++n_head;
        break;
      case TokenRole::kContext:
        dst = &tv.cont;
        ++n_cont;
        break;
      case TokenRole::kCls:
        dst = &tv.cls;
        ++n_cls;
        break;
      default:
        continue;
    }
    const double* row = pooled.row(tok);
    for (std::size_t d = 0; d < dim; ++d) (*dst)[d] += row[d];
  }
  if (n_mod == 0 || n_head == 0 || n_cont == 0 || n_cls == 0) {
    throw ValidationError("sentence lacks a modifier, head, context or CLS token");
  }
  auto scale = [](std::vector<double>& v, std::size_t n) {
    const double inv = 1.0 / static_cast<double>(n);
    for (double& x : v) x *= inv;
  };
  scale(tv.modif, n_mod);
  scale(tv.head, n_head);
  scale(tv.cont, n_cont);
  scale(tv.cls, n_cls);
  tv.comp.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) tv.comp[d] = (tv.modif[d] + tv.head[d]) / 2.0;
  return tv;
}

TargetVectors target_vectors(const SentenceTensor& t, const LayerSpan& span) {
  return target_vectors(pool_span(t, span), t.roles, span);
}

}  // namespace compprobe
