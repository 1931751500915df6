#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "compprobe/embedding_store.hpp"
#include "compprobe/estimates.hpp"

namespace compprobe {

// Per-sentence estimates for every layer span, laid out [span][estimate]
// with spans in enumerate_spans() order.
//
// The reference path pools each span over all tokens, then pools targets and
// evaluates cosines one by one. It is slow and kept for testing.
void sentence_estimates_reference(const SentenceTensor& t, std::span<double> out);

// Fast path: pools each role per layer once, grows every span by one layer at
// a time, and reads all 19 estimates off a 5x5 Gram matrix. Equal to the
// reference up to rounding; reuses its buffers across calls.
class SentenceKernel {
 public:
  void operator()(const SentenceTensor& t, std::span<double> out);

 private:
  std::vector<double> per_layer_;  // [layer][role: modif, head, cont, cls][dim]
  std::vector<double> acc_;        // [target][dim], 5 targets
};

// Compound-level prediction: per-sentence estimates averaged over sentences.
struct CompoundPredictions {
  std::string compound;
  ModelVariant variant = ModelVariant::kCased;
  std::size_t n_layers = 0;
  std::size_t n_sentences = 0;
  std::vector<double> values;  // [span][estimate]; empty when n_sentences == 0

  double at(std::size_t span, std::size_t estimate) const {
    return values[span * kNumEstimates + estimate];
  }
};

struct PredictionTask {
  std::string compound;
  ModelVariant variant = ModelVariant::kCased;
  std::filesystem::path path;
};

CompoundPredictions predict_compound_reference(const PredictionTask& task);
CompoundPredictions predict_compound(const PredictionTask& task, SentenceKernel& kernel);

// One result per task, in task order.
std::vector<CompoundPredictions> predict_all_reference(std::span<const PredictionTask> tasks);

// OpenMP over tasks; threads <= 0 uses the OpenMP default. Output does not
// depend on the thread count.
std::vector<CompoundPredictions> predict_all(std::span<const PredictionTask> tasks, int threads = 0);

}  // namespace compprobe
