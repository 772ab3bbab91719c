// core/include/csc/lexicon.h

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

#ifndef CSC_LEXICON_H_
#define CSC_LEXICON_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "csc/common.h"

namespace csc {

// Where a pronunciation came from.  Lower value wins when merging duplicate
// (word, pronunciation) pairs.
enum class PronSource { kOrig = 0, kG2p = 1, kPhoneDec = 2 };

const char* PronSourceName(PronSource source);

struct Pronunciation {
  std::vector<std::string> phones;
  double prob = 1.0;
  PronSource source = PronSource::kOrig;
};

// Pronunciation dictionary: word -> list of pronunciations with mixture
// weights p(b|w).  Phone symbols carry a language tag as a suffix after the
// last '_' (e.g. "t_en", "ii_man"); the inventory tracks base-symbol -> tag
// and rejects the same base symbol appearing under two tags.
class Lexicon {
 public:
  // base symbol and language tag of a phone ("AH_en" -> {"AH", "en"}).
  // A phone without a suffix gets an empty tag.
  static std::pair<std::string, std::string> SplitPhoneTag(
      const std::string& phone);

  // Adds one pronunciation.  Throws DataError on a duplicate pronunciation
  // for the word or on a phone-inventory tag conflict.
  void AddPronunciation(const std::string& word,
                        std::vector<std::string> phones, double prob,
                        PronSource source);
  // Like AddPronunciation but keeps the existing entry (tightening the
  // source to the higher-priority one) when the pair already exists.
  void AddOrMerge(const std::string& word, const std::vector<std::string>& phones,
                  double prob, PronSource source);

  bool HasWord(const std::string& word) const;
  const std::vector<Pronunciation>* Find(const std::string& word) const;
  std::vector<Pronunciation>* FindMutable(const std::string& word);
  void RemovePronunciation(const std::string& word, std::size_t index);

  const std::map<std::string, std::vector<Pronunciation>>& entries() const {
    return entries_;
  }
  const std::map<std::string, std::string>& phone_inventory() const {
    return inventory_;
  }

  std::size_t NumWords() const { return entries_.size(); }
  std::size_t NumPronunciations() const;
  bool Empty() const { return entries_.empty(); }

  // Resets every word's pronunciation probabilities to uniform.
  void SetUniformProbs();

  // Per-word probabilities must sum to 1 within tol; throws DataError.
  void CheckProbClosure(double tol = 1e-9) const;

 private:
  std::map<std::string, std::vector<Pronunciation>> entries_;
  std::map<std::string, std::string> inventory_;  // phone base -> language tag
};

// Text format: `word<TAB>probability<TAB>phone1 phone2 ...`; '#' starts a
// comment line.  Reading tags every entry with `source`.
Lexicon ReadLexicon(std::istream& in, const std::string& filename,
                    PronSource source);
Lexicon ReadLexiconFile(const std::string& path, PronSource source);
void WriteLexicon(const Lexicon& lexicon, std::ostream& out);
void WriteLexiconFile(const Lexicon& lexicon, const std::string& path);

}  // namespace csc

#endif  // CSC_LEXICON_H_
