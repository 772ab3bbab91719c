// core/include/csc/lattice.h

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

#ifndef CSC_LATTICE_H_
#define CSC_LATTICE_H_

#include <string>
#include <vector>

#include "csc/common.h"
#include "csc/lexicon.h"

namespace csc {

// Reserved label for arcs that carry no token.
inline constexpr const char* kEpsilonLabel = "<eps>";

struct LatticeNode {
  int32 id = 0;       // external id, preserved across pruning
  double time = 0.0;  // seconds
};

struct LatticeArc {
  int32 src = 0;  // node index
  int32 dst = 0;  // node index
  std::string label;
  double acoustic_cost = 0.0;  // negated natural-log likelihood
  double graph_cost = 0.0;     // negated natural-log probability
};

struct LatticeFinal {
  int32 node = 0;  // node index
  double cost = 0.0;
};

// Acyclic weighted lattice.  Arc weights combine as
// acoustic_cost + lm_scale * graph_cost; a complete path additionally pays
// the final cost of its last node.  Values are immutable once built; all
// operations below are pure functions.
class Lattice {
 public:
  std::string utterance_id;
  std::vector<LatticeNode> nodes;
  std::vector<LatticeArc> arcs;
  int32 start = 0;  // node index; must have no incoming arcs
  std::vector<LatticeFinal> finals;

  int32 AddNode(double time);
  void AddArc(int32 src, int32 dst, std::string label, double acoustic_cost,
              double graph_cost);
  void SetFinal(int32 node, double cost = 0.0);

  bool IsFinal(int32 node) const;
  // +inf when the node is not final.
  double FinalCost(int32 node) const;

  // Structural checks: index bounds, exactly one start with no incoming
  // arcs, at least one final, nondecreasing times along arcs, acyclicity.
  // Throws DataError.
  void Validate() const;

  // Outgoing arc indices per node, in arc order.
  std::vector<std::vector<int32>> OutArcs() const;
};

struct Path {
  std::vector<int32> arcs;  // arc indices, in order
  double acoustic_cost = 0.0;
  double graph_cost = 0.0;
  double final_cost = 0.0;

  double TotalCost(double lm_scale) const {
    return acoustic_cost + lm_scale * graph_cost + final_cost;
  }
};

// Token labels along a path, epsilon arcs skipped.
std::vector<std::string> PathLabels(const Lattice& lattice, const Path& path);
// A linear lattice holding exactly this path (node ids/times preserved).
Lattice PathToLattice(const Lattice& lattice, const Path& path);

struct PosteriorAnnotation {
  std::vector<double> arc_posterior;    // parallel to Lattice::arcs
  std::vector<double> final_posterior;  // mass terminating at finals[i]
  double total_log_likelihood = 0.0;
};

// Topological order of node indices, deterministic (smallest index first
// among ready nodes).  Throws DataError naming a node on a cycle.
std::vector<int32> TopoOrder(const Lattice& lattice);

// Throws DataError if some node is unreachable from start or cannot reach a
// final node.
void CheckConnected(const Lattice& lattice);

// Removes nodes/arcs that are not on any complete path.  Node ids and times
// survive.  Throws DataError if no complete path remains.
Lattice Connect(const Lattice& lattice);

// Log-semiring sum over all paths: per-arc posteriors, per-final stop
// posteriors, and total log-likelihood.
PosteriorAnnotation ForwardBackward(const Lattice& lattice, double lm_scale);

// Tropical-semiring best path; ties resolved toward the lexicographically
// smallest arc-index sequence (a final stop beats an equal-cost
// continuation, being a proper prefix).
Path BestPath(const Lattice& lattice, double lm_scale);

// Up to n cheapest distinct label sequences, nondecreasing cost.  Each
// returned path is the cheapest path for its label sequence.
std::vector<Path> NBest(const Lattice& lattice, int n, double lm_scale);

// Keeps arcs (and final stops) whose best containing path costs at most
// best + beam; reconnects.  The best path always survives.
Lattice PrunePosterior(const Lattice& lattice, double beam, double lm_scale);

// Replaces each word arc by one sub-path per lexicon pronunciation; the
// pronunciation weight enters as additional graph cost -ln p(b|w) on the
// sub-path's first arc, which also carries the original arc costs.
// Intermediate node times are interpolated linearly.  Epsilon arcs pass
// through.  Throws DataError naming any out-of-lexicon word.
Lattice WordToPhone(const Lattice& lattice, const Lexicon& lexicon);

}  // namespace csc

#endif  // CSC_LATTICE_H_
