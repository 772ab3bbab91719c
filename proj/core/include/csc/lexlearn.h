// core/include/csc/lexlearn.h

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

#ifndef CSC_LEXLEARN_H_
#define CSC_LEXLEARN_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "csc/lexicon.h"

namespace csc {

// One time-marked token (word or phone) from a decode.
struct CtmRecord {
  std::string utterance_id;
  std::string token;
  double start = 0.0;     // seconds
  double duration = 0.0;  // seconds, > 0
  double confidence = -1.0;  // < 0 when absent
};

// CTM text: `utterance-id channel start duration token [confidence]`.
// The channel column is accepted and ignored.
std::vector<CtmRecord> ReadCtm(std::istream& in, const std::string& filename);
std::vector<CtmRecord> ReadCtmFile(const std::string& path);

// Acoustic evidence for one spoken token of `word`: per-candidate
// log-likelihood scores s(u,b), keyed by the pronunciation's space-joined
// phone string.
struct TokenEvidence {
  std::string utterance_id;
  std::string word;
  std::map<std::string, double> scores;
};

// Evidence text: `utterance-id<TAB>word<TAB>pron-index<TAB>log-likelihood`,
// pron-index referring to the word's pronunciation order in `lexicon`.
// Lines for the same (utterance, word) accumulate into one token.
std::vector<TokenEvidence> ReadEvidence(std::istream& in,
                                        const std::string& filename,
                                        const Lexicon& lexicon);
std::vector<TokenEvidence> ReadEvidenceFile(const std::string& path,
                                            const Lexicon& lexicon);

// Builds candidate pronunciations from time-aligned word and phone decodes:
// a phone belongs to the word whose [start, start+duration) interval
// contains the phone's midpoint.  Candidates seen >= min_count times become
// PHONEDEC entries with uniform per-word probabilities.
Lexicon HarvestCandidates(const std::vector<CtmRecord>& word_ctm,
                          const std::vector<CtmRecord>& phone_ctm,
                          int min_count);

// Union of entries; a duplicate (word, pronunciation) keeps the
// highest-priority source (ORIG > G2P > PHONEDEC).  Probabilities reset to
// uniform.  Throws DataError on a phone-inventory tag conflict.
Lexicon MergeLexicons(const Lexicon& l0, const Lexicon& l1, const Lexicon& l2);

struct PronEstimateResult {
  Lexicon lexicon;
  std::vector<double> iteration_loglik;
};

// EM for pronunciation probabilities on the per-token mixture
// log sum_b p(b|w) exp(s(u,b)).  Words without evidence keep their current
// probabilities.  Throws DataError listing evidence that references unknown
// words or pronunciations.
PronEstimateResult EstimatePronProbs(const Lexicon& lexicon,
                                     const std::vector<TokenEvidence>& evidence,
                                     int em_iters);

struct PruneStep {
  std::string word;
  std::vector<std::string> phones;
  double delta = 0.0;  // likelihood reduction of this removal
  int step = 0;        // 1-based
};

struct PruneReport {
  std::vector<PruneStep> steps;
  double avg_prons_per_word = 0.0;  // after pruning
};

struct PruneOptions {
  int max_prons_per_word = 4;
  double min_loss = 0.0;
  // One EM refresh on the affected word after each removal.
  bool em_refresh = true;
};

// Greedy likelihood-reduction pruning: repeatedly removes the candidate
// pronunciation with the globally smallest likelihood reduction, where a
// candidate is removable when its word has more than one pronunciation and
// either exceeds max_prons_per_word or loses less than min_loss.  Words
// without evidence are never pruned.
std::pair<Lexicon, PruneReport> PruneByLikelihood(
    const Lexicon& lexicon, const std::vector<TokenEvidence>& evidence,
    const PruneOptions& options);

void WritePruneReport(const PruneReport& report, std::ostream& out);

struct LexiconStats {
  double avg_prons_per_word = 0.0;
  double type_oov_rate = 0.0;
  double token_oov_rate = 0.0;
  int64 oov_types = 0;
  int64 vocab_types = 0;
};

// Coverage of `vocab_counts` (word -> token count) by the lexicon.
LexiconStats ComputeLexiconStats(const Lexicon& lexicon,
                                 const std::map<std::string, int64>& vocab_counts);

}  // namespace csc

#endif  // CSC_LEXLEARN_H_
