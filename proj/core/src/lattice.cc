// core/src/lattice.cc

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

#include "csc/lattice.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace csc {

namespace {

constexpr double kTimeSlack = 1e-9;

double ArcWeight(const LatticeArc& arc, double lm_scale) {
  return arc.acoustic_cost + lm_scale * arc.graph_cost;
}

// Min cost from each node to a final stop, +inf where unreachable.
std::vector<double> BackwardMinCost(const Lattice& lattice,
                                    const std::vector<int32>& order,
                                    const std::vector<std::vector<int32>>& out,
                                    double lm_scale) {
  std::vector<double> bwd(lattice.nodes.size(), kInfinity);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int32 v = *it;
    double best = lattice.FinalCost(v);
    for (int32 a : out[v]) {
      const LatticeArc& arc = lattice.arcs[a];
      double cand = ArcWeight(arc, lm_scale) + bwd[arc.dst];
      if (cand < best) best = cand;
    }
    bwd[v] = best;
  }
  return bwd;
}

std::vector<double> ForwardMinCost(const Lattice& lattice,
                                   const std::vector<int32>& order,
                                   const std::vector<std::vector<int32>>& out,
                                   double lm_scale) {
  std::vector<double> fwd(lattice.nodes.size(), kInfinity);
  fwd[lattice.start] = 0.0;
  for (int32 v : order) {
    if (fwd[v] == kInfinity) continue;
    for (int32 a : out[v]) {
      const LatticeArc& arc = lattice.arcs[a];
      double cand = fwd[v] + ArcWeight(arc, lm_scale);
      if (cand < fwd[arc.dst]) fwd[arc.dst] = cand;
    }
  }
  return fwd;
}

}  // namespace

int32 Lattice::AddNode(double time) {
  int32 index = static_cast<int32>(nodes.size());
  nodes.push_back(LatticeNode{index, time});
  return index;
}

void Lattice::AddArc(int32 src, int32 dst, std::string label,
                     double acoustic_cost, double graph_cost) {
  arcs.push_back(
      LatticeArc{src, dst, std::move(label), acoustic_cost, graph_cost});
}

void Lattice::SetFinal(int32 node, double cost) {
  for (LatticeFinal& f : finals) {
    if (f.node == node) {
      f.cost = cost;
      return;
    }
  }
  finals.push_back(LatticeFinal{node, cost});
}

bool Lattice::IsFinal(int32 node) const {
  return FinalCost(node) != kInfinity;
}

double Lattice::FinalCost(int32 node) const {
  for (const LatticeFinal& f : finals) {
    if (f.node == node) return f.cost;
  }
  return kInfinity;
}

void Lattice::Validate() const {
  if (nodes.empty()) throw DataError("lattice has no nodes");
  if (start < 0 || start >= static_cast<int32>(nodes.size())) {
    throw DataError("lattice start node out of range");
  }
  if (finals.empty()) throw DataError("lattice has no final node");
  for (const LatticeFinal& f : finals) {
    if (f.node < 0 || f.node >= static_cast<int32>(nodes.size())) {
      throw DataError("final node out of range");
    }
  }
  for (const LatticeArc& arc : arcs) {
    if (arc.src < 0 || arc.src >= static_cast<int32>(nodes.size()) ||
        arc.dst < 0 || arc.dst >= static_cast<int32>(nodes.size())) {
      throw DataError("arc endpoint out of range");
    }
    if (arc.dst == start) {
      throw DataError(StrCat("arc enters the start node ", nodes[start].id));
    }
    if (nodes[arc.dst].time + kTimeSlack < nodes[arc.src].time) {
      throw DataError(StrCat("arc from node ", nodes[arc.src].id, " to node ",
                             nodes[arc.dst].id, " goes backward in time"));
    }
  }
  TopoOrder(*this);  // throws on cycles
}

std::vector<std::vector<int32>> Lattice::OutArcs() const {
  std::vector<std::vector<int32>> out(nodes.size());
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    out[arcs[a].src].push_back(static_cast<int32>(a));
  }
  return out;
}

std::vector<std::string> PathLabels(const Lattice& lattice, const Path& path) {
  std::vector<std::string> labels;
  for (int32 a : path.arcs) {
    const std::string& label = lattice.arcs[a].label;
    if (label != kEpsilonLabel) labels.push_back(label);
  }
  return labels;
}

Lattice PathToLattice(const Lattice& lattice, const Path& path) {
  Lattice out;
  out.utterance_id = lattice.utterance_id;
  int32 node = lattice.start;
  out.nodes.push_back(lattice.nodes[node]);
  for (int32 a : path.arcs) {
    const LatticeArc& arc = lattice.arcs[a];
    out.nodes.push_back(lattice.nodes[arc.dst]);
    int32 n = static_cast<int32>(out.nodes.size());
    out.AddArc(n - 2, n - 1, arc.label, arc.acoustic_cost, arc.graph_cost);
    node = arc.dst;
  }
  out.start = 0;
  out.SetFinal(static_cast<int32>(out.nodes.size()) - 1, path.final_cost);
  return out;
}

std::vector<int32> TopoOrder(const Lattice& lattice) {
  std::vector<int32> indegree(lattice.nodes.size(), 0);
  auto out = lattice.OutArcs();
  for (const LatticeArc& arc : lattice.arcs) ++indegree[arc.dst];
  std::priority_queue<int32, std::vector<int32>, std::greater<int32>> ready;
  for (std::size_t v = 0; v < lattice.nodes.size(); ++v) {
    if (indegree[v] == 0) ready.push(static_cast<int32>(v));
  }
  std::vector<int32> order;
  order.reserve(lattice.nodes.size());
  while (!ready.empty()) {
    int32 v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int32 a : out[v]) {
      if (--indegree[lattice.arcs[a].dst] == 0) ready.push(lattice.arcs[a].dst);
    }
  }
  if (order.size() != lattice.nodes.size()) {
    for (std::size_t v = 0; v < lattice.nodes.size(); ++v) {
      if (indegree[v] > 0) {
        throw DataError(
            StrCat("lattice contains a cycle through node ",
                   lattice.nodes[v].id));
      }
    }
  }
  return order;
}

void CheckConnected(const Lattice& lattice) {
  auto order = TopoOrder(lattice);
  auto out = lattice.OutArcs();
  std::vector<char> reach(lattice.nodes.size(), 0);
  reach[lattice.start] = 1;
  for (int32 v : order) {
    if (!reach[v]) continue;
    for (int32 a : out[v]) reach[lattice.arcs[a].dst] = 1;
  }
  std::vector<char> coreach(lattice.nodes.size(), 0);
  for (const LatticeFinal& f : lattice.finals) coreach[f.node] = 1;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (int32 a : out[*it]) {
      if (coreach[lattice.arcs[a].dst]) coreach[*it] = 1;
    }
  }
  for (std::size_t v = 0; v < lattice.nodes.size(); ++v) {
    if (!reach[v] || !coreach[v]) {
      throw DataError(StrCat("lattice is not connected: node ",
                             lattice.nodes[v].id,
                             reach[v] ? " cannot reach a final node"
                                      : " is unreachable from the start"));
    }
  }
}

Lattice Connect(const Lattice& lattice) {
  auto order = TopoOrder(lattice);
  auto out = lattice.OutArcs();
  std::vector<char> reach(lattice.nodes.size(), 0);
  reach[lattice.start] = 1;
  for (int32 v : order) {
    if (!reach[v]) continue;
    for (int32 a : out[v]) reach[lattice.arcs[a].dst] = 1;
  }
  std::vector<char> coreach(lattice.nodes.size(), 0);
  for (const LatticeFinal& f : lattice.finals) coreach[f.node] = 1;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (int32 a : out[*it]) {
      if (coreach[lattice.arcs[a].dst]) coreach[*it] = 1;
    }
  }
  std::vector<int32> remap(lattice.nodes.size(), -1);
  Lattice result;
  result.utterance_id = lattice.utterance_id;
  for (std::size_t v = 0; v < lattice.nodes.size(); ++v) {
    if (reach[v] && coreach[v]) {
      remap[v] = static_cast<int32>(result.nodes.size());
      result.nodes.push_back(lattice.nodes[v]);
    }
  }
  if (remap[lattice.start] < 0) {
    throw DataError("lattice has no complete path");
  }
  result.start = remap[lattice.start];
  for (const LatticeArc& arc : lattice.arcs) {
    if (remap[arc.src] >= 0 && remap[arc.dst] >= 0) {
      result.AddArc(remap[arc.src], remap[arc.dst], arc.label,
                    arc.acoustic_cost, arc.graph_cost);
    }
  }
  for (const LatticeFinal& f : lattice.finals) {
    if (remap[f.node] >= 0) result.SetFinal(remap[f.node], f.cost);
  }
  if (result.finals.empty()) throw DataError("lattice has no complete path");
  return result;
}

PosteriorAnnotation ForwardBackward(const Lattice& lattice, double lm_scale) {
  CheckConnected(lattice);
  auto order = TopoOrder(lattice);
  auto out = lattice.OutArcs();
  std::size_t n = lattice.nodes.size();

  // alpha/beta live in the log-probability domain (costs negated).
  std::vector<double> alpha(n, kLogZero), beta(n, kLogZero);
  alpha[lattice.start] = 0.0;
  for (int32 v : order) {
    if (alpha[v] == kLogZero) continue;
    for (int32 a : out[v]) {
      const LatticeArc& arc = lattice.arcs[a];
      alpha[arc.dst] =
          LogSumExp(alpha[arc.dst], alpha[v] - ArcWeight(arc, lm_scale));
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int32 v = *it;
    double acc = lattice.IsFinal(v) ? -lattice.FinalCost(v) : kLogZero;
    for (int32 a : out[v]) {
      const LatticeArc& arc = lattice.arcs[a];
      acc = LogSumExp(acc, -ArcWeight(arc, lm_scale) + beta[arc.dst]);
    }
    beta[v] = acc;
  }
  double total = beta[lattice.start];
  if (total == kLogZero) throw DataError("lattice has no complete path");

  PosteriorAnnotation ann;
  ann.total_log_likelihood = total;
  ann.arc_posterior.resize(lattice.arcs.size());
  for (std::size_t a = 0; a < lattice.arcs.size(); ++a) {
    const LatticeArc& arc = lattice.arcs[a];
    ann.arc_posterior[a] = std::exp(alpha[arc.src] -
                                    ArcWeight(arc, lm_scale) + beta[arc.dst] -
                                    total);
  }
  ann.final_posterior.resize(lattice.finals.size());
  for (std::size_t i = 0; i < lattice.finals.size(); ++i) {
    const LatticeFinal& f = lattice.finals[i];
    ann.final_posterior[i] = std::exp(alpha[f.node] - f.cost - total);
  }
  return ann;
}

Path BestPath(const Lattice& lattice, double lm_scale) {
  CheckConnected(lattice);
  auto order = TopoOrder(lattice);
  auto out = lattice.OutArcs();
  std::vector<double> bwd =
      BackwardMinCost(lattice, order, out, lm_scale);
  if (bwd[lattice.start] == kInfinity) {
    throw DataError("lattice has no complete path");
  }
  Path path;
  int32 v = lattice.start;
  while (true) {
    // A final stop at the exact remaining cost wins: the resulting
    // arc-index sequence is a prefix of any continuation.
    if (lattice.IsFinal(v) && lattice.FinalCost(v) == bwd[v]) {
      path.final_cost = lattice.FinalCost(v);
      break;
    }
    bool advanced = false;
    for (int32 a : out[v]) {  // ascending arc index
      const LatticeArc& arc = lattice.arcs[a];
      if (ArcWeight(arc, lm_scale) + bwd[arc.dst] == bwd[v]) {
        path.arcs.push_back(a);
        path.acoustic_cost += arc.acoustic_cost;
        path.graph_cost += arc.graph_cost;
        v = arc.dst;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw DataError("best-path backtrace failed");
  }
  return path;
}

namespace {

struct SearchItem {
  double f = 0.0;  // exact total cost of the best completion
  bool complete = false;
  std::vector<int32> arcs;
  int32 node = 0;
  double acoustic = 0.0;
  double graph = 0.0;
  double g = 0.0;  // cost so far (plus final cost when complete)
};

struct SearchItemOrder {
  // Min-heap on (f, arc sequence); a complete item sorts before its own
  // extensions because its arc list is a proper prefix.
  bool operator()(const SearchItem& a, const SearchItem& b) const {
    if (a.f != b.f) return a.f > b.f;
    return a.arcs > b.arcs;
  }
};

}  // namespace

std::vector<Path> NBest(const Lattice& lattice, int n, double lm_scale) {
  if (n < 1) throw DataError("nbest requires n >= 1");
  CheckConnected(lattice);
  auto order = TopoOrder(lattice);
  auto out = lattice.OutArcs();
  std::vector<double> bwd =
      BackwardMinCost(lattice, order, out, lm_scale);
  if (bwd[lattice.start] == kInfinity) {
    throw DataError("lattice has no complete path");
  }

  std::priority_queue<SearchItem, std::vector<SearchItem>, SearchItemOrder> pq;
  SearchItem root;
  root.f = bwd[lattice.start];
  root.node = lattice.start;
  pq.push(root);

  std::vector<Path> results;
  std::set<std::vector<std::string>> seen;
  while (!pq.empty() && static_cast<int>(results.size()) < n) {
    SearchItem item = pq.top();
    pq.pop();
    if (item.complete) {
      Path path;
      path.arcs = item.arcs;
      path.acoustic_cost = item.acoustic;
      path.graph_cost = item.graph;
      path.final_cost = lattice.FinalCost(item.node);
      if (seen.insert(PathLabels(lattice, path)).second) {
        results.push_back(std::move(path));
      }
      continue;
    }
    if (lattice.IsFinal(item.node)) {
      SearchItem done = item;
      done.complete = true;
      done.g = item.g + lattice.FinalCost(item.node);
      done.f = done.g;
      pq.push(std::move(done));
    }
    for (int32 a : out[item.node]) {
      const LatticeArc& arc = lattice.arcs[a];
      SearchItem child = item;
      child.arcs.push_back(a);
      child.node = arc.dst;
      child.acoustic += arc.acoustic_cost;
      child.graph += arc.graph_cost;
      child.g = item.g + ArcWeight(arc, lm_scale);
      child.f = child.g + bwd[arc.dst];
      pq.push(std::move(child));
    }
  }
  return results;
}

Lattice PrunePosterior(const Lattice& lattice, double beam, double lm_scale) {
  if (beam < 0) throw DataError("prune beam must be nonnegative");
  CheckConnected(lattice);
  auto order = TopoOrder(lattice);
  auto out = lattice.OutArcs();
  std::vector<double> fwd = ForwardMinCost(lattice, order, out, lm_scale);
  std::vector<double> bwd = BackwardMinCost(lattice, order, out, lm_scale);
  double best = bwd[lattice.start];
  // fwd + w + bwd reassociates the sums behind `best`, so exact ties can
  // drift by a few ulps; absorb that so beam 0 keeps cost-ties.
  double limit = best + beam + 1e-12 * std::max(1.0, std::abs(best));

  // The best path survives by contract, independent of rounding.
  Path best_path = BestPath(lattice, lm_scale);
  std::vector<char> forced(lattice.arcs.size(), 0);
  for (int32 a : best_path.arcs) forced[a] = 1;
  int32 best_end = best_path.arcs.empty()
                       ? lattice.start
                       : lattice.arcs[best_path.arcs.back()].dst;

  Lattice pruned;
  pruned.utterance_id = lattice.utterance_id;
  pruned.nodes = lattice.nodes;
  pruned.start = lattice.start;
  for (std::size_t a = 0; a < lattice.arcs.size(); ++a) {
    const LatticeArc& arc = lattice.arcs[a];
    double through = fwd[arc.src] + ArcWeight(arc, lm_scale) + bwd[arc.dst];
    if (forced[a] || through <= limit) pruned.arcs.push_back(arc);
  }
  for (const LatticeFinal& f : lattice.finals) {
    if (f.node == best_end || fwd[f.node] + f.cost <= limit) {
      pruned.finals.push_back(f);
    }
  }
  return Connect(pruned);
}

Lattice WordToPhone(const Lattice& lattice, const Lexicon& lexicon) {
  Lattice out;
  out.utterance_id = lattice.utterance_id;
  out.nodes = lattice.nodes;
  out.start = lattice.start;
  out.finals = lattice.finals;
  int32 next_id = 0;
  for (const LatticeNode& node : lattice.nodes) {
    next_id = std::max(next_id, node.id + 1);
  }
  for (const LatticeArc& arc : lattice.arcs) {
    if (arc.label == kEpsilonLabel) {
      out.arcs.push_back(arc);
      continue;
    }
    const std::vector<Pronunciation>* prons = lexicon.Find(arc.label);
    if (prons == nullptr) {
      throw DataError(StrCat("word not in lexicon: '", arc.label, "'"));
    }
    double t0 = lattice.nodes[arc.src].time;
    double t1 = lattice.nodes[arc.dst].time;
    for (const Pronunciation& pron : *prons) {
      if (pron.prob <= 0.0) continue;  // zero-mass alternative
      double pron_cost = -std::log(pron.prob);
      if (pron.phones.empty()) {
        out.AddArc(arc.src, arc.dst, kEpsilonLabel, arc.acoustic_cost,
                   arc.graph_cost + pron_cost);
        continue;
      }
      std::size_t k = pron.phones.size();
      int32 prev = arc.src;
      for (std::size_t i = 0; i < k; ++i) {
        int32 next;
        if (i + 1 == k) {
          next = arc.dst;
        } else {
          double t = t0 + (t1 - t0) * static_cast<double>(i + 1) /
                              static_cast<double>(k);
          next = static_cast<int32>(out.nodes.size());
          out.nodes.push_back(LatticeNode{next_id++, t});
        }
        if (i == 0) {
          out.AddArc(prev, next, pron.phones[i], arc.acoustic_cost,
                     arc.graph_cost + pron_cost);
        } else {
          out.AddArc(prev, next, pron.phones[i], 0.0, 0.0);
        }
        prev = next;
      }
    }
  }
  return out;
}

}  // namespace csc
