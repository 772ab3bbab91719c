// core/src/lexicon.cc

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

#include "csc/lexicon.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace csc {

const char* PronSourceName(PronSource source) {
  switch (source) {
    case PronSource::kOrig: return "ORIG";
    case PronSource::kG2p: return "G2P";
    case PronSource::kPhoneDec: return "PHONEDEC";
  }
  return "?";
}

std::pair<std::string, std::string> Lexicon::SplitPhoneTag(
    const std::string& phone) {
  std::size_t pos = phone.rfind('_');
  if (pos == std::string::npos || pos == 0 || pos + 1 == phone.size()) {
    return {phone, std::string()};
  }
  return {phone.substr(0, pos), phone.substr(pos + 1)};
}

void Lexicon::AddPronunciation(const std::string& word,
                               std::vector<std::string> phones, double prob,
                               PronSource source) {
  if (word.empty()) throw DataError("lexicon entry with empty word");
  for (const std::string& phone : phones) {
    auto [base, tag] = SplitPhoneTag(phone);
    auto it = inventory_.find(base);
    if (it == inventory_.end()) {
      inventory_.emplace(base, tag);
    } else if (it->second != tag) {
      throw DataError(StrCat("phone-inventory conflict: symbol '", base,
                             "' appears with language tags '", it->second,
                             "' and '", tag, "'"));
    }
  }
  auto& prons = entries_[word];
  for (const Pronunciation& p : prons) {
    if (p.phones == phones) {
      throw DataError(StrCat("duplicate pronunciation for word '", word, "'"));
    }
  }
  prons.push_back(Pronunciation{std::move(phones), prob, source});
}

void Lexicon::AddOrMerge(const std::string& word,
                         const std::vector<std::string>& phones, double prob,
                         PronSource source) {
  auto it = entries_.find(word);
  if (it != entries_.end()) {
    for (Pronunciation& p : it->second) {
      if (p.phones == phones) {
        if (static_cast<int>(source) < static_cast<int>(p.source)) {
          p.source = source;
        }
        return;
      }
    }
  }
  AddPronunciation(word, phones, prob, source);
}

bool Lexicon::HasWord(const std::string& word) const {
  return entries_.count(word) > 0;
}

const std::vector<Pronunciation>* Lexicon::Find(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<Pronunciation>* Lexicon::FindMutable(const std::string& word) {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

void Lexicon::RemovePronunciation(const std::string& word, std::size_t index) {
  auto it = entries_.find(word);
  if (it == entries_.end() || index >= it->second.size()) {
    throw DataError(StrCat("no pronunciation ", index, " for word '", word,
                           "'"));
  }
  it->second.erase(it->second.begin() + index);
  if (it->second.empty()) entries_.erase(it);
}

std::size_t Lexicon::NumPronunciations() const {
  std::size_t n = 0;
  for (const auto& [word, prons] : entries_) n += prons.size();
  return n;
}

void Lexicon::SetUniformProbs() {
  for (auto& [word, prons] : entries_) {
    double p = 1.0 / static_cast<double>(prons.size());
    for (Pronunciation& pron : prons) pron.prob = p;
  }
}

void Lexicon::CheckProbClosure(double tol) const {
  for (const auto& [word, prons] : entries_) {
    double sum = 0.0;
    for (const Pronunciation& p : prons) sum += p.prob;
    if (std::abs(sum - 1.0) > tol) {
      throw DataError(StrCat("pronunciation probabilities for '", word,
                             "' sum to ", sum));
    }
  }
}

Lexicon ReadLexicon(std::istream& in, const std::string& filename,
                    PronSource source) {
  Lexicon lexicon;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols = SplitChar(line, '\t');
    if (cols.size() != 3) {
      throw DataError(StrCat(filename, ":", lineno,
                             ": expected 3 tab-separated columns, got ",
                             cols.size()));
    }
    double prob =
        ParseDouble(cols[1], StrCat(filename, ":", lineno, " probability"));
    std::vector<std::string> phones = SplitWhitespace(cols[2]);
    if (phones.empty()) {
      throw DataError(StrCat(filename, ":", lineno, ": empty pronunciation"));
    }
    try {
      lexicon.AddPronunciation(cols[0], std::move(phones), prob, source);
    } catch (const DataError& e) {
      throw DataError(StrCat(filename, ":", lineno, ": ", e.what()));
    }
  }
  return lexicon;
}

Lexicon ReadLexiconFile(const std::string& path, PronSource source) {
  std::ifstream in(path);
  if (!in) throw DataError(StrCat("cannot open lexicon file ", path));
  return ReadLexicon(in, path, source);
}

void WriteLexicon(const Lexicon& lexicon, std::ostream& out) {
  for (const auto& [word, prons] : lexicon.entries()) {
    for (const Pronunciation& p : prons) {
      out << word << '\t' << FormatExact(p.prob) << '\t'
          << JoinStrings(p.phones, " ") << '\n';
    }
  }
}

void WriteLexiconFile(const Lexicon& lexicon, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(StrCat("cannot write lexicon file ", path));
  WriteLexicon(lexicon, out);
}

}  // namespace csc
