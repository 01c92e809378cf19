// Serial reference kernels against their OpenMP counterparts on the
// synthetic review corpus. Thread count follows OMP_NUM_THREADS; times are
// wall clock because CPU time only covers the calling thread.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "ugs/corpus.hpp"
#include "ugs/evaluation.hpp"
#include "ugs/lda.hpp"
#include "ugs/text_prep.hpp"
#include "ugs/tuning.hpp"
#include "ugs/vectorizer.hpp"

namespace {

struct Fixture {
  std::vector<std::string> texts;
  std::vector<ugs::Tokens> tokens;
  ugs::Vocabulary vocab;
  ugs::SplitCorpus split;
  ugs::TopicModel model;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture f;
    const auto corpus = ugs::load_reviews(std::string(UGS_DATA_DIR) + "/reviews/synthetic_two_topic.jsonl");
    // Repeat the corpus so each kernel has enough work to split across threads.
    for (int copy = 0; copy < 8; ++copy)
      for (const auto& r : corpus.reviews) f.texts.push_back(r.text());
    f.tokens = ugs::preprocess_corpus(f.texts, ugs::PrepConfig{});
    const std::size_t held = f.tokens.size() / 10;
    const std::vector<ugs::Tokens> train(f.tokens.begin(), f.tokens.end() - static_cast<std::ptrdiff_t>(held));
    f.vocab = ugs::build_vocabulary(train);
    f.split.train_tokens = train;
    f.split.train = ugs::to_bow_corpus(train, f.vocab);
    f.split.heldout = ugs::to_bow_corpus({f.tokens.end() - static_cast<std::ptrdiff_t>(held), f.tokens.end()}, f.vocab);
    ugs::HyperParams hp;
    hp.k = 2;
    hp.iterations = 100;
    hp.burn_in = 20;
    f.model = ugs::train(f.split.train, f.vocab, hp);
    return f;
  }();
  return f;
}

ugs::SearchGrid small_grid() {
  ugs::SearchGrid grid;
  grid.ks = {2};
  grid.iterations = 40;
  grid.burn_in = 10;
  return grid;
}

void BM_PreprocessSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(ugs::reference::preprocess_corpus(f.texts, ugs::PrepConfig{}));
}

void BM_PreprocessParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(ugs::preprocess_corpus(f.texts, ugs::PrepConfig{}));
}

void BM_CooccurrenceSerial(benchmark::State& state) {
  const auto& f = fixture();
  const ugs::CooccurrenceOptions options{.window = static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(ugs::reference::build_cooccurrence(f.tokens, options));
}

void BM_CooccurrenceParallel(benchmark::State& state) {
  const auto& f = fixture();
  const ugs::CooccurrenceOptions options{.window = static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(ugs::build_cooccurrence(f.tokens, options));
}

void BM_HeldoutPerplexitySerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(ugs::reference::heldout_perplexity(f.model, f.split.heldout));
}

void BM_HeldoutPerplexityParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(ugs::heldout_perplexity(f.model, f.split.heldout));
}

void BM_GridSearchSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto grid = small_grid();
  for (auto _ : state) benchmark::DoNotOptimize(ugs::reference::grid_search(f.split, f.vocab, grid));
}

void BM_GridSearchParallel(benchmark::State& state) {
  const auto& f = fixture();
  const auto grid = small_grid();
  for (auto _ : state) benchmark::DoNotOptimize(ugs::grid_search(f.split, f.vocab, grid));
}

}  // namespace

BENCHMARK(BM_PreprocessSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PreprocessParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CooccurrenceSerial)->Arg(0)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CooccurrenceParallel)->Arg(0)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HeldoutPerplexitySerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HeldoutPerplexityParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridSearchSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridSearchParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
