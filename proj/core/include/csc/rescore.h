// core/include/csc/rescore.h

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

#ifndef CSC_RESCORE_H_
#define CSC_RESCORE_H_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "csc/lattice.h"
#include "csc/ngram.h"

namespace csc {

// Opaque scorer state.  Equal keys must imply identical future scores; the
// rescorer merges expanded lattice states on (node, key).
struct LmState {
  std::shared_ptr<const void> impl;
  std::string key;
};

// Left-to-right language-model scorer.  Implementations must be safe to
// share across threads after construction (Advance is pure).
class LmScorer {
 public:
  virtual ~LmScorer() = default;
  // State encoding sentence begin.
  virtual LmState Start() const = 0;
  // Next state and natural-log probability of `token` in this state.
  // Unknown tokens must score via the unknown symbol, never fail.
  virtual std::pair<LmState, double> Advance(const LmState& state,
                                             const std::string& token) const = 0;
  // Natural-log probability of sentence end in this state.
  virtual double Finish(const LmState& state) const = 0;
};

// Backoff n-gram scorer; the state key is the truncated context, so lattice
// rescoring with unbounded beam is exact.
class NgramScorer : public LmScorer {
 public:
  explicit NgramScorer(NgramModel model);

  LmState Start() const override;
  std::pair<LmState, double> Advance(const LmState& state,
                                     const std::string& token) const override;
  double Finish(const LmState& state) const override;

  const NgramModel& model() const { return *model_; }

 private:
  std::shared_ptr<const NgramModel> model_;
};

struct RescoreConfig {
  double mu = 0.5;             // scorer weight: (1-mu)*graph + mu*scorer
  double acoustic_scale = 1.0;
  double beam = 10.0;               // expanded-state beam, natural-log units
  int max_states_per_node = 64;
};

struct RescoredHyp {
  int original_rank = 0;  // 0-based rank in the input n-best
  double combined_cost = 0.0;
  std::vector<std::string> words;
};

// Extracts up to n best label sequences, rescores each as
// acoustic_scale*acoustic + (1-mu)*graph + final + mu*(-log p_scorer),
// and re-sorts (stable: ties keep original rank order).
std::vector<RescoredHyp> NbestRescore(const Lattice& lattice,
                                      const LmScorer& scorer,
                                      const RescoreConfig& config, int n);

struct LatticeRescoreResult {
  Lattice lattice;  // graph costs replaced by the interpolated cost
  Path best_path;   // best path of the rescored lattice
  bool beamed = false;  // true when the beam or state cap dropped states
};

// Expands the lattice over scorer states (merging on state key per node),
// replacing graph costs with (1-mu)*graph + mu*(-log p_scorer).  Epsilon
// arcs carry state unchanged.  With an unbounded beam and a finite-state
// scorer the expansion is exact.
LatticeRescoreResult LatticeRescore(const Lattice& lattice,
                                    const LmScorer& scorer,
                                    const RescoreConfig& config);

}  // namespace csc

#endif  // CSC_RESCORE_H_
