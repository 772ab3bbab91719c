// core/include/csc/ngram.h

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

#ifndef CSC_NGRAM_H_
#define CSC_NGRAM_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "csc/common.h"

namespace csc {

inline constexpr const char* kBosSymbol = "<s>";
inline constexpr const char* kEosSymbol = "</s>";
inline constexpr const char* kUnkSymbol = "<unk>";

// Token <-> id map with the three reserved symbols preinstalled.
class Vocabulary {
 public:
  static constexpr int32 kBos = 0;
  static constexpr int32 kEos = 1;
  static constexpr int32 kUnk = 2;

  Vocabulary();
  int32 Add(const std::string& token);
  // -1 when absent.
  int32 Find(const std::string& token) const;
  const std::string& Token(int32 id) const { return tokens_[id]; }
  int32 size() const { return static_cast<int32>(tokens_.size()); }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int32> ids_;
};

// Raw n-gram statistics up to `order`, with sentence-boundary padding:
// each sentence is counted as  <s> w1 ... wk </s>.
class CountTable {
 public:
  explicit CountTable(int order);

  void AddSentence(const std::vector<std::string>& tokens);
  // Registers a token so smoothing assigns it mass even at count zero.
  void AddVocabToken(const std::string& token);

  int order() const { return order_; }
  const Vocabulary& vocab() const { return vocab_; }
  // Counts for (n+1)-grams, n in [0, order).
  const std::map<std::vector<int32>, int64>& counts(int n) const {
    return counts_[n];
  }
  int64 Count(const std::vector<int32>& ngram) const;

 private:
  int order_;
  Vocabulary vocab_;
  std::vector<std::map<std::vector<int32>, int64>> counts_;
};

CountTable CountNgrams(const std::vector<std::vector<std::string>>& corpus,
                       int order);

struct SmoothingConfig {
  enum Method { kWittenBell, kAbsoluteDiscount };
  Method method = kWittenBell;
  double discount = 0.5;  // absolute discounting only, in (0,1)
};

// Backoff model.  Internal log values are natural logs; the ARPA form and
// score_sequence are log10 per convention.  The sentence-begin symbol is
// never predicted (conditional probability zero); the unknown symbol is
// always present with at least unigram count 1.
class NgramModel {
 public:
  struct Entry {
    double logp = kLogZero;  // natural log
    double bow = 0.0;        // natural log backoff weight
  };

  NgramModel() = default;
  NgramModel(int order, Vocabulary vocab);

  int order() const { return order_; }
  const Vocabulary& vocab() const { return vocab_; }
  const std::map<std::vector<int32>, Entry>& table(int n) const {
    return tables_[n];
  }

  void SetEntry(const std::vector<int32>& ngram, double logp, double bow);
  // Updates the backoff weight of an existing entry (creates a context-only
  // entry with log-zero probability if absent).
  void SetBow(const std::vector<int32>& ngram, double bow);
  const Entry* FindEntry(const std::vector<int32>& ngram) const;
  Vocabulary* mutable_vocab() { return &vocab_; }
  // Removes an explicit n-gram entry (scoring then backs off); false if the
  // entry does not exist.
  bool RemoveNgram(const std::vector<std::string>& ngram);

  // p(word | context) with backoff, natural log.  `context` may be any
  // length; only the last order-1 ids are used.  Unknown ids are the
  // caller's responsibility (map via vocab / MapToken).
  double CondLogProb(const std::vector<int32>& context, int32 word) const;

  // Token id for scoring: vocabulary lookup with unknown -> <unk>.
  int32 MapToken(const std::string& token) const;

  // Sum of conditional log10 probabilities of `tokens` framed by <s>...</s>.
  double SequenceLogProb10(const std::vector<std::string>& tokens) const;
  // Natural-log variant.
  double SequenceLogProb(const std::vector<std::string>& tokens) const;

 private:
  int order_ = 0;
  Vocabulary vocab_;
  std::vector<std::map<std::vector<int32>, Entry>> tables_;
};

// Estimates a normalized backoff model from counts.  For every context with
// observed continuations the conditional distribution over the full
// vocabulary sums to 1 (within 1e-6).  Throws DataError for an
// out-of-range discount.
NgramModel EstimateNgramModel(const CountTable& counts,
                              const SmoothingConfig& config);

// ARPA text serialization (standard \data\ / \N-grams: sections, log10).
void WriteArpa(const NgramModel& model, std::ostream& out);
void WriteArpaFile(const NgramModel& model, const std::string& path);
NgramModel ReadArpa(std::istream& in, const std::string& filename);
NgramModel ReadArpaFile(const std::string& path);

}  // namespace csc

#endif  // CSC_NGRAM_H_
