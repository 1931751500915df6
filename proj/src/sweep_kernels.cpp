#include "compprobe/sweep_kernels.hpp"

#include <omp.h>

#include <exception>

#include "compprobe/errors.hpp"

namespace compprobe {

namespace {

constexpr std::size_t kRoles = 4;  // modif, head, cont, cls as pooled per layer

std::size_t n_spans(std::size_t n_layers) { return n_layers * (n_layers + 1) / 2; }

void check_out(const SentenceTensor& t, std::span<double> out) {
  if (out.size() != n_spans(t.n_layers) * kNumEstimates) {
    throw PreconditionError("estimate buffer has wrong size");
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

template <typename Fn>
CompoundPredictions accumulate(const PredictionTask& task, Fn&& per_sentence) {
  EmbeddingReader reader(task.path, task.compound);
  if (reader.header().variant != task.variant) {
    throw ValidationError(task.path.string() + ": header variant is " +
                          std::string(to_string(reader.header().variant)) + ", expected " +
                          std::string(to_string(task.variant)));
  }
  CompoundPredictions p;
  p.compound = task.compound;
  p.variant = task.variant;
  p.n_layers = reader.header().n_layers;
  std::vector<double> sums(n_spans(p.n_layers) * kNumEstimates, 0.0);
  std::vector<double> buf(sums.size());
  SentenceTensor t;
  while (reader.next(t)) {
    try {
      per_sentence(t, std::span<double>(buf));
    } catch (const UndefinedStatisticError& e) {
      throw UndefinedStatisticError(task.path.string() + ": sentence " +
                                    std::to_string(p.n_sentences) + ": " + e.what());
    }
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += buf[i];
    ++p.n_sentences;
  }
  if (p.n_sentences > 0) {
    const double inv = 1.0 / static_cast<double>(p.n_sentences);
    for (double& v : sums) v *= inv;
    p.values = std::move(sums);
  }
  return p;
}

}  // namespace

void sentence_estimates_reference(const SentenceTensor& t, std::span<double> out) {
  check_out(t, out);
  const auto spans = enumerate_spans(t.n_layers);
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const auto tv = target_vectors(t, spans[s]);
    const auto est = evaluate_estimates(tv);
    std::copy(est.begin(), est.end(), out.begin() + static_cast<std::ptrdiff_t>(s * kNumEstimates));
  }
}

void SentenceKernel::operator()(const SentenceTensor& t, std::span<double> out) {
  check_out(t, out);
  const std::size_t L = t.n_layers, T = t.n_tokens, D = t.dim;

  std::size_t counts[kRoles] = {};
  std::vector<int> slot(T, -1);
  for (std::size_t tok = 0; tok < T; ++tok) {
    switch (t.roles[tok]) {
      case TokenRole::kModifierSubword:
        slot[tok] = 0;
        break;
      case TokenRole::kHeadSubword:
        slot[tok] = 1;
        break;
      case TokenRole::kContext:
        slot[tok] = 2;
        break;
      case TokenRole::kCls:
        slot[tok] = 3;
        break;
      default:
        continue;
    }
    ++counts[slot[tok]];
  }
  for (std::size_t r = 0; r < kRoles; ++r) {
    if (counts[r] == 0) throw ValidationError("sentence lacks a modifier, head, context or CLS token");
  }

  // role means per layer
  per_layer_.assign(L * kRoles * D, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    double* layer = per_layer_.data() + l * kRoles * D;
    for (std::size_t tok = 0; tok < T; ++tok) {
      if (slot[tok] < 0) continue;
      double* dst = layer + static_cast<std::size_t>(slot[tok]) * D;
      const float* src = t.vectors.data() + (l * T + tok) * D;
      for (std::size_t d = 0; d < D; ++d) dst[d] += src[d];
    }
    for (std::size_t r = 0; r < kRoles; ++r) {
      const double inv = 1.0 / static_cast<double>(counts[r]);
      double* dst = layer + r * D;
      for (std::size_t d = 0; d < D; ++d) dst[d] *= inv;
    }
  }

  // Targets in Target order: modif, head, comp, cont, cls. Cosines are
  // scale-free, so layer sums stand in for layer means.
  acc_.assign(kNumTargets * D, 0.0);
  double* modif = acc_.data();
  double* head = modif + D;
  double* comp = head + D;
  double* cont = comp + D;
  double* cls = cont + D;
  const double* target[kNumTargets] = {modif, head, comp, cont, cls};

  std::size_t s = 0;
  for (std::size_t start = 0; start < L; ++start) {
    std::fill(acc_.begin(), acc_.end(), 0.0);
    for (std::size_t end = start; end < L; ++end, ++s) {
      const double* layer = per_layer_.data() + end * kRoles * D;
      for (std::size_t d = 0; d < D; ++d) {
        modif[d] += layer[d];
        head[d] += layer[D + d];
        cont[d] += layer[2 * D + d];
        cls[d] += layer[3 * D + d];
        comp[d] = (modif[d] + head[d]) / 2.0;
      }
      GramMatrix gram{};
      for (std::size_t a = 0; a < kNumTargets; ++a) {
        for (std::size_t b = a; b < kNumTargets; ++b) {
          gram[a][b] = gram[b][a] = dot(target[a], target[b], D);
        }
      }
      estimates_from_gram(gram,
                          std::span<double, kNumEstimates>(out.data() + s * kNumEstimates,
                                                           kNumEstimates));
    }
  }
}

CompoundPredictions predict_compound_reference(const PredictionTask& task) {
  return accumulate(task, [](const SentenceTensor& t, std::span<double> out) {
    sentence_estimates_reference(t, out);
  });
}

CompoundPredictions predict_compound(const PredictionTask& task, SentenceKernel& kernel) {
  return accumulate(task,
                    [&](const SentenceTensor& t, std::span<double> out) { kernel(t, out); });
}

std::vector<CompoundPredictions> predict_all_reference(std::span<const PredictionTask> tasks) {
  std::vector<CompoundPredictions> out;
  out.reserve(tasks.size());
  for (const auto& task : tasks) out.push_back(predict_compound_reference(task));
  return out;
}

std::vector<CompoundPredictions> predict_all(std::span<const PredictionTask> tasks, int threads) {
  std::vector<CompoundPredictions> out(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const auto n = static_cast<std::int64_t>(tasks.size());
  const int n_threads = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel num_threads(n_threads)
  {
    SentenceKernel kernel;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        out[k] = predict_compound(tasks[k], kernel);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace compprobe
