// benchmarks/core-bench.cc

// Copyright 2026  css-curate authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "csc/g2p.h"
#include "csc/lattice.h"
#include "csc/ngram.h"
#include "csc/rescore.h"
#include "csc/semisup.h"

namespace csc {
namespace {

// Layered DAG: `layers` ranks of `width` nodes with dense forward arcs.
Lattice LayeredLattice(int layers, int width, std::mt19937* rng) {
  std::uniform_real_distribution<double> cost(0.0, 4.0);
  const char* labels[] = {"a", "b", "c", "d"};
  Lattice lattice;
  lattice.utterance_id = "bench";
  int32 start = lattice.AddNode(0.0);
  std::vector<int32> previous = {start};
  for (int l = 1; l <= layers; ++l) {
    std::vector<int32> current;
    for (int w = 0; w < width; ++w) {
      current.push_back(lattice.AddNode(0.1 * l));
    }
    for (int32 src : previous) {
      for (int32 dst : current) {
        lattice.AddArc(src, dst, labels[(src + dst) % 4], cost(*rng),
                       cost(*rng));
      }
    }
    previous = current;
  }
  int32 end = lattice.AddNode(0.1 * (layers + 1));
  for (int32 src : previous) {
    lattice.AddArc(src, end, "end", cost(*rng), cost(*rng));
  }
  lattice.SetFinal(end, 0.0);
  return lattice;
}

NgramModel BenchModel(int order) {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> len(3, 12), pick(0, 49);
  std::vector<std::vector<std::string>> corpus;
  for (int s = 0; s < 2000; ++s) {
    std::vector<std::string> sentence;
    int L = len(rng);
    for (int i = 0; i < L; ++i) {
      sentence.push_back("tok" + std::to_string(pick(rng)));
    }
    corpus.push_back(std::move(sentence));
  }
  return EstimateNgramModel(CountNgrams(corpus, order), {});
}

Lexicon BenchLexicon(int words) {
  std::mt19937 rng(43);
  std::uniform_int_distribution<int> len(3, 8), letter(0, 19);
  Lexicon lexicon;
  while (static_cast<int>(lexicon.NumWords()) < words) {
    int L = len(rng);
    std::string word;
    for (int i = 0; i < L; ++i) word += static_cast<char>('a' + letter(rng));
    if (lexicon.HasWord(word)) continue;
    std::vector<std::string> phones;
    for (char c : word) {
      phones.push_back(std::string(1, static_cast<char>(c - 'a' + 'A')) +
                       "_en");
    }
    lexicon.AddPronunciation(word, phones, 1.0, PronSource::kOrig);
  }
  return lexicon;
}

void BM_ForwardBackward(benchmark::State& state) {
  std::mt19937 rng(1);
  Lattice lattice =
      LayeredLattice(static_cast<int>(state.range(0)), 4, &rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ForwardBackward(lattice, 1.0));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(lattice.arcs.size()));
}
BENCHMARK(BM_ForwardBackward)->Arg(8)->Arg(32)->Arg(128);

void BM_BestPath(benchmark::State& state) {
  std::mt19937 rng(2);
  Lattice lattice =
      LayeredLattice(static_cast<int>(state.range(0)), 4, &rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BestPath(lattice, 1.0));
  }
}
BENCHMARK(BM_BestPath)->Arg(8)->Arg(32)->Arg(128);

void BM_NBest(benchmark::State& state) {
  std::mt19937 rng(3);
  Lattice lattice = LayeredLattice(16, 3, &rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        NBest(lattice, static_cast<int>(state.range(0)), 1.0));
  }
}
BENCHMARK(BM_NBest)->Arg(1)->Arg(10)->Arg(100);

void BM_PrunePosterior(benchmark::State& state) {
  std::mt19937 rng(4);
  Lattice lattice = LayeredLattice(32, 4, &rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(PrunePosterior(lattice, 2.0, 1.0));
  }
}
BENCHMARK(BM_PrunePosterior);

void BM_NgramScoreSequence(benchmark::State& state) {
  NgramModel model = BenchModel(static_cast<int>(state.range(0)));
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pick(0, 59);  // includes unseen tokens
  std::vector<std::string> sentence;
  for (int i = 0; i < 20; ++i) {
    sentence.push_back("tok" + std::to_string(pick(rng)));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.SequenceLogProb10(sentence));
  }
  state.SetItemsProcessed(state.iterations() * sentence.size());
}
BENCHMARK(BM_NgramScoreSequence)->Arg(2)->Arg(4);

void BM_LatticeRescore(benchmark::State& state) {
  std::mt19937 rng(6);
  Lattice lattice = LayeredLattice(12, 3, &rng);
  for (LatticeArc& arc : lattice.arcs) {
    arc.label = "tok" + std::to_string((arc.src * 7 + arc.dst) % 50);
  }
  NgramScorer scorer(BenchModel(3));
  RescoreConfig config;
  config.beam = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(LatticeRescore(lattice, scorer, config));
  }
}
BENCHMARK(BM_LatticeRescore)->Arg(2)->Arg(10);

void BM_G2pTrain(benchmark::State& state) {
  Lexicon lexicon = BenchLexicon(static_cast<int>(state.range(0)));
  G2pTrainOptions options;
  options.em_iters = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(TrainGraphoneModel(lexicon, options));
  }
}
BENCHMARK(BM_G2pTrain)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_G2pDecode(benchmark::State& state) {
  Lexicon lexicon = BenchLexicon(300);
  G2pTrainOptions options;
  options.em_iters = 5;
  GraphoneModel model = TrainGraphoneModel(lexicon, options).model;
  G2pDecodeOptions decode;
  decode.beam = 8.0;
  decode.max_pops = 200000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(G2pNbest(model, "gadrobe", 5, decode));
  }
}
BENCHMARK(BM_G2pDecode)->Unit(benchmark::kMillisecond);

void BM_AlignWords(benchmark::State& state) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(0, 30);
  std::vector<std::string> ref, hyp;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    ref.push_back("w" + std::to_string(pick(rng)));
    hyp.push_back("w" + std::to_string(pick(rng)));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(AlignWords(ref, hyp));
  }
}
BENCHMARK(BM_AlignWords)->Arg(10)->Arg(100);

}  // namespace
}  // namespace csc

BENCHMARK_MAIN();
