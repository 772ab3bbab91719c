// core/include/csc/semisup.h

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

#ifndef CSC_SEMISUP_H_
#define CSC_SEMISUP_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "csc/lattice.h"
#include "csc/lexicon.h"

namespace csc {

enum class EditOp { kMatch, kSub, kDel, kIns };

struct AlignedPair {
  EditOp op;
  std::string ref;  // empty for insertions
  std::string hyp;  // empty for deletions
};

struct AlignmentResult {
  std::vector<AlignedPair> ops;
  int matches = 0;
  int subs = 0;
  int dels = 0;
  int inss = 0;
  int ref_len = 0;
  int Cost() const { return subs + dels + inss; }
};

// Minimal-cost Levenshtein alignment with unit costs; ties prefer
// match > substitution > deletion > insertion.
AlignmentResult AlignWords(const std::vector<std::string>& reference,
                           const std::vector<std::string>& hypothesis);

struct WmerScore {
  std::string utterance_id;
  double wmer = 0.0;      // errors / max(1, reference length)
  double duration = 0.0;  // seconds
};

struct CorpusWmer {
  std::vector<WmerScore> scores;  // sorted by utterance id
  double token_weighted = 0.0;    // total errors / total reference tokens
  double duration_weighted = 0.0;
};

using TranscriptMap = std::map<std::string, std::vector<std::string>>;

// Transcript text: `utterance-id word1 word2 ...` per line.
TranscriptMap ReadTranscripts(std::istream& in, const std::string& filename);
TranscriptMap ReadTranscriptFile(const std::string& path);

// Per-utterance WMER plus corpus aggregates.  Durations default to 0 when
// missing from the map.  Throws DataError listing utterances without a
// hypothesis.
CorpusWmer ScoreCorpus(const TranscriptMap& references,
                       const TranscriptMap& hypotheses,
                       const std::map<std::string, double>& durations,
                       int jobs = 1);

struct ReportRow {
  double threshold = 0.0;  // percent
  double hours = 0.0;
  double percent = 0.0;  // of total, rounded half-to-even to 2 decimals
};

// For each threshold, total hours of utterances whose WMER (in percent)
// strictly exceeds it.  Throws DataError when total_hours <= 0.
std::vector<ReportRow> CumulativeReport(const std::vector<WmerScore>& scores,
                                        const std::vector<double>& thresholds,
                                        double total_hours);
void WriteReport(const std::vector<ReportRow>& rows, std::ostream& out);

struct Partition {
  double tau = 0.0;  // percent
  std::vector<std::string> supervised;    // wmer*100 <= tau
  std::vector<std::string> unsupervised;  // wmer*100 >  tau
};

Partition PartitionByWmer(const std::vector<WmerScore>& scores, double tau);

// Supervised utterance ids (the removal-method training set).
std::vector<std::string> RemovalFilter(const Partition& partition);

// Probability mass of the Viterbi path among all paths.
double BestPathPosterior(const Lattice& lattice, double lm_scale);

enum class SupervisionKind { kBestPath, kPrunedLattice, kHumanTranscript };

const char* SupervisionKindName(SupervisionKind kind);

// Phone-level supervision graph for one utterance.  Graph costs carry the
// lm-scaled original graph cost plus pronunciation costs; final costs are
// shifted so that total path mass, measured against the full expansion of
// the source lattice, is at most 1.
struct Supervision {
  std::string utterance_id;
  Lattice lattice;
  double lm_scale = 1.0;
  double confidence = 1.0;  // best-path posterior of the source word lattice
  SupervisionKind kind = SupervisionKind::kBestPath;
};

// kBestPath: the Viterbi word path expanded to its best phone realization
// (a linear graph).  kPrunedLattice: posterior-pruned word lattice expanded
// to phones.  Throws DataError for words missing from the lexicon.
Supervision BuildSupervision(const Lattice& lattice, const Lexicon& lexicon,
                             SupervisionKind kind, double lm_scale,
                             double beam);

// Linear supervision graph from a reference transcript, confidence 1.
Supervision TranscriptSupervision(const std::string& utterance_id,
                                  const std::vector<std::string>& words,
                                  const Lexicon& lexicon);

}  // namespace csc

#endif  // CSC_SEMISUP_H_
