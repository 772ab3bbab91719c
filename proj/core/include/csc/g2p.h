// core/include/csc/g2p.h

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

#ifndef CSC_G2P_H_
#define CSC_G2P_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "csc/lexicon.h"
#include "csc/ngram.h"

namespace csc {

// A paired grapheme-segment / phone-segment unit.  Letters are unicode
// codepoints; at most one side may be empty.
struct Graphone {
  std::vector<std::string> letters;
  std::vector<std::string> phones;

  // Serialized token: letters joined, '}', phones joined by ','.
  std::string Token() const;
  static Graphone FromToken(const std::string& token);

  bool operator==(const Graphone& other) const = default;
  auto operator<=>(const Graphone& other) const = default;
};

// Joint-sequence model: a graphone inventory plus an n-gram over graphone
// tokens.  Decoding searches segmentations of a letter string into inventory
// graphones scored by the n-gram.
class GraphoneModel {
 public:
  GraphoneModel() = default;
  GraphoneModel(int max_letters, int max_phones, double max_phone_ratio,
                std::vector<Graphone> inventory, NgramModel ngram);

  int max_letters() const { return max_letters_; }
  int max_phones() const { return max_phones_; }
  double max_phone_ratio() const { return max_phone_ratio_; }
  const std::vector<Graphone>& inventory() const { return inventory_; }
  const NgramModel& ngram() const { return ngram_; }

  // Inventory indices of graphones whose letter side equals `letters`
  // (including the empty letter side when `letters` is empty).
  const std::vector<int32>* FindByLetters(
      const std::vector<std::string>& letters) const;

 private:
  int max_letters_ = 2;
  int max_phones_ = 2;
  double max_phone_ratio_ = 4.0;
  std::vector<Graphone> inventory_;
  NgramModel ngram_;
  std::map<std::vector<std::string>, std::vector<int32>> by_letters_;
};

struct G2pTrainOptions {
  int order = 3;
  int max_letters = 2;
  int max_phones = 2;
  int em_iters = 10;
  // Graphones with smaller expected count after EM are dropped before the
  // n-gram is estimated.
  double min_expected_count = 1e-6;
  // Entries whose pronunciation exceeds this multiple of the word length
  // are skipped.
  double max_phone_ratio = 4.0;
  // Restrict training to pronunciations whose phones all carry this
  // language tag (empty: train on everything).
  std::string language_filter;
  int jobs = 1;
};

struct G2pTrainResult {
  GraphoneModel model;
  std::vector<double> iteration_loglik;  // one entry per EM iteration
  int skipped_entries = 0;
};

// EM over all segmentations of each (word, pronunciation) pair, then an
// n-gram over the aligned graphone sequences.  Throws DataError on an empty
// lexicon or when no entry is alignable.
G2pTrainResult TrainGraphoneModel(const Lexicon& lexicon,
                                  const G2pTrainOptions& options);

struct G2pDecodeOptions {
  // Stop expanding once a partial path is this much worse (natural log)
  // than the best complete segmentation.  Infinite by default: exact.
  double beam = kInfinity;
  int64 max_pops = 2'000'000;
};

struct G2pPronunciation {
  std::vector<std::string> phones;
  double logprob = 0.0;  // natural log, summed over segmentations
};

// Up to n distinct pronunciations in nonincreasing probability order (ties:
// lexicographic phone order).  Throws DataError listing letters absent from
// every inventory graphone.
std::vector<G2pPronunciation> G2pNbest(const GraphoneModel& model,
                                       const std::string& word, int n,
                                       const G2pDecodeOptions& options = {});

struct OovLexiconResult {
  Lexicon lexicon;                   // entries only for decodable OOV words
  std::vector<std::string> skipped;  // words that failed decoding
};

// Pronunciations for words in `wordlist` missing from `base`, tagged G2P,
// probabilities normalized over the returned n-best.
OovLexiconResult GenerateOovLexicon(const GraphoneModel& model,
                                    const std::vector<std::string>& wordlist,
                                    const Lexicon& base, int n,
                                    const G2pDecodeOptions& options = {});

// Model file: small key/value header, graphone inventory, embedded ARPA.
void WriteGraphoneModel(const GraphoneModel& model, std::ostream& out);
void WriteGraphoneModelFile(const GraphoneModel& model,
                            const std::string& path);
GraphoneModel ReadGraphoneModel(std::istream& in, const std::string& filename);
GraphoneModel ReadGraphoneModelFile(const std::string& path);

}  // namespace csc

#endif  // CSC_G2P_H_
