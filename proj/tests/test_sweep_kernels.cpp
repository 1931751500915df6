#include <gtest/gtest.h>

#include <random>

#include "compprobe/representation.hpp"
#include "compprobe/sweep_kernels.hpp"
#include "test_util.hpp"

using namespace compprobe;

namespace {

std::vector<PredictionTask> write_tasks(const std::filesystem::path& dir, std::size_t n_compounds,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PredictionTask> tasks;
  for (std::size_t c = 0; c < n_compounds; ++c) {
    for (ModelVariant v : kAllVariants) {
      const std::string name = "C" + std::to_string(c);
      std::vector<SentenceTensor> ts;
      for (std::size_t s = 0; s < 1 + c % 4; ++s) ts.push_back(test_util::random_tensor(rng, 13, 9));
      EmbeddingHeader h;
      h.variant = v;
      h.dim = 9;
      const auto path = dir / embedding_file_name(name, v);
      write_embeddings(path, h, ts);
      tasks.push_back({name, v, path});
    }
  }
  return tasks;
}

}  // namespace

TEST(SweepKernels, FastMatchesReferencePerSentence) {
  std::mt19937_64 rng(41);
  SentenceKernel kernel;
  const std::size_t n = 91 * kNumEstimates;
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = test_util::random_tensor(rng, 13, 4 + trial);
    std::vector<double> ref(n), fast(n);
    sentence_estimates_reference(t, ref);
    kernel(t, fast);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(fast[i], ref[i], 1e-9) << "slot " << i;
  }
}

TEST(SweepKernels, ReferenceSlotLayout) {
  std::mt19937_64 rng(42);
  const auto t = test_util::random_tensor(rng, 5, 6);
  std::vector<double> out(15 * kNumEstimates);
  sentence_estimates_reference(t, out);
  const auto spans = enumerate_spans(5);
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const auto expect = evaluate_estimates(target_vectors(t, spans[s]));
    for (std::size_t e = 0; e < kNumEstimates; ++e) EXPECT_EQ(out[s * kNumEstimates + e], expect[e]);
  }
}

TEST(SweepKernels, CompoundPredictionIsSentenceMean) {
  const auto dir = test_util::temp_dir("kernel_mean");
  const auto tasks = write_tasks(dir, 4, 43);
  const auto& task = tasks[6];  // compound 3: 4 sentences
  const auto p = predict_compound_reference(task);
  const auto sentences = read_embeddings(task.path);
  ASSERT_EQ(p.n_sentences, 4u);
  EXPECT_EQ(p.n_layers, 13u);
  std::vector<double> sum(91 * kNumEstimates, 0.0), one(91 * kNumEstimates);
  for (const auto& t : sentences) {
    sentence_estimates_reference(t, one);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += one[i];
  }
  for (std::size_t i = 0; i < sum.size(); ++i) EXPECT_NEAR(p.values[i], sum[i] / 4, 1e-12);
}

TEST(SweepKernels, ParallelMatchesReferenceForAnyThreadCount) {
  const auto dir = test_util::temp_dir("kernel_threads");
  const auto tasks = write_tasks(dir, 6, 44);
  const auto ref = predict_all_reference(tasks);
  const auto one = predict_all(tasks, 1);
  ASSERT_EQ(ref.size(), tasks.size());
  for (int threads : {2, 3, 8}) {
    const auto many = predict_all(tasks, threads);
    ASSERT_EQ(many.size(), tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      EXPECT_EQ(many[i].compound, tasks[i].compound);
      EXPECT_EQ(many[i].variant, tasks[i].variant);
      EXPECT_EQ(many[i].values, one[i].values);  // bitwise, whatever the schedule
    }
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (std::size_t k = 0; k < ref[i].values.size(); ++k)
      ASSERT_NEAR(one[i].values[k], ref[i].values[k], 1e-9);
  }
}

TEST(SweepKernels, VariantMismatchRejected) {
  const auto dir = test_util::temp_dir("kernel_variant");
  auto tasks = write_tasks(dir, 1, 45);
  tasks[0].variant = ModelVariant::kUncased;  // file header says cased
  EXPECT_ANY_THROW(predict_all(tasks, 2));
  EXPECT_ANY_THROW(predict_all_reference(tasks));
}

TEST(SweepKernels, EmptyFileGivesNoPrediction) {
  const auto dir = test_util::temp_dir("kernel_empty");
  EmbeddingHeader h;
  const auto path = dir / embedding_file_name("Leer", ModelVariant::kCased);
  write_embeddings(path, h, {});
  const std::vector<PredictionTask> tasks{{"Leer", ModelVariant::kCased, path}};
  const auto p = predict_all(tasks);
  EXPECT_EQ(p[0].n_sentences, 0u);
  EXPECT_TRUE(p[0].values.empty());
}
