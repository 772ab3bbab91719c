// core/src/rescore.cc

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

#include "csc/rescore.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace csc {

NgramScorer::NgramScorer(NgramModel model)
    : model_(std::make_shared<NgramModel>(std::move(model))) {}

namespace {

using Context = std::vector<int32>;

std::string ContextKey(const Context& context) {
  std::string key;
  for (int32 id : context) {
    if (!key.empty()) key += ',';
    key += std::to_string(id);
  }
  return key;
}

LmState MakeNgramState(Context context) {
  auto impl = std::make_shared<const Context>(std::move(context));
  return LmState{impl, ContextKey(*impl)};
}

const Context& GetContext(const LmState& state) {
  return *static_cast<const Context*>(state.impl.get());
}

}  // namespace

LmState NgramScorer::Start() const {
  return MakeNgramState({Vocabulary::kBos});
}

std::pair<LmState, double> NgramScorer::Advance(
    const LmState& state, const std::string& token) const {
  const Context& context = GetContext(state);
  int32 id = model_->MapToken(token);
  double logp = model_->CondLogProb(context, id);
  Context next = context;
  next.push_back(id);
  std::size_t keep = std::max(model_->order() - 1, 1);
  if (next.size() > keep) {
    next.erase(next.begin(), next.end() - keep);
  }
  return {MakeNgramState(std::move(next)), logp};
}

double NgramScorer::Finish(const LmState& state) const {
  return model_->CondLogProb(GetContext(state), Vocabulary::kEos);
}

namespace {

double ScoreLabels(const LmScorer& scorer,
                   const std::vector<std::string>& labels) {
  LmState state = scorer.Start();
  double total = 0.0;
  for (const std::string& label : labels) {
    auto [next, logp] = scorer.Advance(state, label);
    total += logp;
    state = std::move(next);
  }
  total += scorer.Finish(state);
  return total;
}

}  // namespace

std::vector<RescoredHyp> NbestRescore(const Lattice& lattice,
                                      const LmScorer& scorer,
                                      const RescoreConfig& config, int n) {
  if (n < 1) throw DataError("nbest rescoring requires n >= 1");
  if (config.mu < 0.0 || config.mu > 1.0) {
    throw DataError("interpolation weight mu must be in [0,1]");
  }
  std::vector<Path> paths = NBest(lattice, n, 1.0);
  std::vector<RescoredHyp> hyps;
  hyps.reserve(paths.size());
  for (std::size_t r = 0; r < paths.size(); ++r) {
    const Path& path = paths[r];
    std::vector<std::string> labels = PathLabels(lattice, path);
    double scorer_cost = -ScoreLabels(scorer, labels);
    RescoredHyp hyp;
    hyp.original_rank = static_cast<int>(r);
    hyp.combined_cost = config.acoustic_scale * path.acoustic_cost +
                        (1.0 - config.mu) * path.graph_cost + path.final_cost +
                        config.mu * scorer_cost;
    hyp.words = std::move(labels);
    hyps.push_back(std::move(hyp));
  }
  std::stable_sort(hyps.begin(), hyps.end(),
                   [](const RescoredHyp& a, const RescoredHyp& b) {
                     return a.combined_cost < b.combined_cost;
                   });
  return hyps;
}

namespace {

struct Arrival {
  int32 from_exp = -1;  // expanded node index; -1 for the start seed
  std::string label;
  double acoustic = 0.0;
  double graph = 0.0;  // already interpolated
  double fwd = 0.0;    // forward combined cost via this arrival
  LmState state;
};

}  // namespace

LatticeRescoreResult LatticeRescore(const Lattice& lattice,
                                    const LmScorer& scorer,
                                    const RescoreConfig& config) {
  if (config.mu < 0.0 || config.mu > 1.0) {
    throw DataError("interpolation weight mu must be in [0,1]");
  }
  if (config.beam < 0.0) throw DataError("beam must be nonnegative");
  if (config.max_states_per_node < 1) {
    throw DataError("max_states_per_node must be >= 1");
  }
  CheckConnected(lattice);
  std::vector<int32> order = TopoOrder(lattice);
  auto out_arcs = lattice.OutArcs();

  LatticeRescoreResult result;
  Lattice& out = result.lattice;
  out.utterance_id = lattice.utterance_id;

  // Arrivals per original node, keyed by scorer state.
  std::vector<std::map<std::string, std::vector<Arrival>>> arrivals(
      lattice.nodes.size());
  {
    Arrival seed;
    seed.state = scorer.Start();
    seed.fwd = 0.0;
    arrivals[lattice.start][seed.state.key].push_back(std::move(seed));
  }

  // Surviving expanded states per original node: key -> (exp index, state,
  // forward cost).
  struct ExpState {
    int32 node = 0;
    LmState state;
    double fwd = 0.0;
  };
  std::vector<std::map<std::string, ExpState>> expanded(lattice.nodes.size());

  for (int32 v : order) {
    auto& incoming = arrivals[v];
    if (incoming.empty()) continue;

    // Merge arrivals per key and apply beam/cap.
    std::vector<std::pair<std::string, double>> keyed;  // key, min fwd
    keyed.reserve(incoming.size());
    double best_fwd = kInfinity;
    for (const auto& [key, list] : incoming) {
      double fwd = kInfinity;
      for (const Arrival& a : list) fwd = std::min(fwd, a.fwd);
      keyed.push_back({key, fwd});
      best_fwd = std::min(best_fwd, fwd);
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second < b.second;
                return a.first < b.first;
              });
    std::size_t limit = static_cast<std::size_t>(config.max_states_per_node);
    for (std::size_t i = 0; i < keyed.size(); ++i) {
      if (i >= limit || keyed[i].second > best_fwd + config.beam) {
        result.beamed = true;
        keyed.resize(i);
        break;
      }
    }

    // Materialize surviving states (key order for determinism) and their
    // incoming arcs.
    std::vector<std::pair<std::string, double>> sorted_keys = keyed;
    std::sort(sorted_keys.begin(), sorted_keys.end());
    for (const auto& [key, fwd] : sorted_keys) {
      int32 exp = static_cast<int32>(out.nodes.size());
      out.nodes.push_back(LatticeNode{exp, lattice.nodes[v].time});
      const std::vector<Arrival>& list = incoming.at(key);
      ExpState state{exp, list.front().state, fwd};
      expanded[v].emplace(key, state);
      for (const Arrival& a : list) {
        if (a.from_exp < 0) {
          out.start = exp;
        } else {
          out.AddArc(a.from_exp, exp, a.label, a.acoustic, a.graph);
        }
      }
    }
    incoming.clear();

    // Relax outgoing arcs from each surviving state.
    for (const auto& [key, exp_state] : expanded[v]) {
      if (lattice.IsFinal(v)) {
        double finish_cost =
            config.mu * -scorer.Finish(exp_state.state);
        out.SetFinal(exp_state.node, lattice.FinalCost(v) + finish_cost);
      }
      for (int32 a : out_arcs[v]) {
        const LatticeArc& arc = lattice.arcs[a];
        Arrival next;
        next.from_exp = exp_state.node;
        next.label = arc.label;
        next.acoustic = arc.acoustic_cost;
        if (arc.label == kEpsilonLabel) {
          next.graph = (1.0 - config.mu) * arc.graph_cost;
          next.state = exp_state.state;
        } else {
          auto [state, logp] = scorer.Advance(exp_state.state, arc.label);
          next.graph =
              (1.0 - config.mu) * arc.graph_cost + config.mu * -logp;
          next.state = std::move(state);
        }
        next.fwd = exp_state.fwd + config.acoustic_scale * next.acoustic +
                   next.graph;
        arrivals[arc.dst][next.state.key].push_back(std::move(next));
      }
    }
  }

  if (out.finals.empty()) {
    throw DataError("rescoring beam pruned away every complete path");
  }
  if (result.beamed) out = Connect(out);

  if (config.acoustic_scale == 1.0) {
    result.best_path = BestPath(out, 1.0);
  } else {
    Lattice scaled = out;
    for (LatticeArc& arc : scaled.arcs) {
      arc.acoustic_cost *= config.acoustic_scale;
    }
    Path path = BestPath(scaled, 1.0);
    // Same arc indices; restate the unscaled acoustic total.
    path.acoustic_cost = 0.0;
    for (int32 a : path.arcs) path.acoustic_cost += out.arcs[a].acoustic_cost;
    result.best_path = std::move(path);
  }
  return result;
}

}  // namespace csc
