// core/src/lexlearn.cc

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

#include "csc/lexlearn.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace csc {

namespace {

constexpr double kOverlapSlack = 1e-9;

std::string PronKey(const std::vector<std::string>& phones) {
  return JoinStrings(phones, " ");
}

}  // namespace

std::vector<CtmRecord> ReadCtm(std::istream& in, const std::string& filename) {
  std::vector<CtmRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.size() != 5 && fields.size() != 6) {
      throw DataError(StrCat(filename, ":", lineno,
                             ": CTM line needs 5 or 6 fields, got ",
                             fields.size()));
    }
    CtmRecord rec;
    rec.utterance_id = fields[0];
    // fields[1] is the channel, ignored.
    rec.start = ParseDouble(fields[2], StrCat(filename, ":", lineno, " start"));
    rec.duration =
        ParseDouble(fields[3], StrCat(filename, ":", lineno, " duration"));
    rec.token = fields[4];
    if (fields.size() == 6) {
      rec.confidence =
          ParseDouble(fields[5], StrCat(filename, ":", lineno, " confidence"));
    }
    if (rec.duration <= 0.0) {
      throw DataError(
          StrCat(filename, ":", lineno, ": nonpositive duration"));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<CtmRecord> ReadCtmFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(StrCat("cannot open CTM file ", path));
  return ReadCtm(in, path);
}

std::vector<TokenEvidence> ReadEvidence(std::istream& in,
                                        const std::string& filename,
                                        const Lexicon& lexicon) {
  std::vector<TokenEvidence> evidence;
  std::string line;
  int lineno = 0;
  std::vector<std::string> offenders;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols = SplitChar(line, '\t');
    if (cols.size() != 4) {
      throw DataError(StrCat(filename, ":", lineno,
                             ": evidence line needs 4 tab-separated columns"));
    }
    const std::string& utt = cols[0];
    const std::string& word = cols[1];
    int64 index =
        ParseInt(cols[2], StrCat(filename, ":", lineno, " pron-index"));
    double score =
        ParseDouble(cols[3], StrCat(filename, ":", lineno, " log-likelihood"));
    const std::vector<Pronunciation>* prons = lexicon.Find(word);
    if (prons == nullptr) {
      offenders.push_back(StrCat(filename, ":", lineno, ": unknown word '",
                                 word, "'"));
      continue;
    }
    if (index < 0 || index >= static_cast<int64>(prons->size())) {
      offenders.push_back(StrCat(filename, ":", lineno, ": pron-index ", index,
                                 " out of range for word '", word, "'"));
      continue;
    }
    if (!std::isfinite(score)) {
      offenders.push_back(
          StrCat(filename, ":", lineno, ": non-finite log-likelihood"));
      continue;
    }
    std::string key = PronKey((*prons)[index].phones);
    // A repeated (utterance, word, pron) triple starts a new spoken token;
    // this is how multiple tokens of one word in an utterance are encoded.
    TokenEvidence* target = nullptr;
    if (!evidence.empty()) {
      TokenEvidence& last = evidence.back();
      if (last.utterance_id == utt && last.word == word &&
          !last.scores.count(key)) {
        target = &last;
      }
    }
    if (target == nullptr) {
      evidence.push_back(TokenEvidence{utt, word, {}});
      target = &evidence.back();
    }
    target->scores.emplace(key, score);
  }
  if (!offenders.empty()) {
    throw DataError(StrCat("evidence errors:\n  ",
                           JoinStrings(offenders, "\n  ")));
  }
  return evidence;
}

std::vector<TokenEvidence> ReadEvidenceFile(const std::string& path,
                                            const Lexicon& lexicon) {
  std::ifstream in(path);
  if (!in) throw DataError(StrCat("cannot open evidence file ", path));
  return ReadEvidence(in, path, lexicon);
}

Lexicon HarvestCandidates(const std::vector<CtmRecord>& word_ctm,
                          const std::vector<CtmRecord>& phone_ctm,
                          int min_count) {
  std::map<std::string, std::vector<const CtmRecord*>> words, phones;
  for (const CtmRecord& rec : word_ctm) {
    words[rec.utterance_id].push_back(&rec);
  }
  for (const CtmRecord& rec : phone_ctm) {
    phones[rec.utterance_id].push_back(&rec);
  }
  for (const auto& [utt, recs] : words) {
    if (!phones.count(utt)) {
      throw DataError(
          StrCat("utterance ", utt, " has word CTM but no phone CTM"));
    }
    (void)recs;
  }
  for (const auto& [utt, recs] : phones) {
    if (!words.count(utt)) {
      throw DataError(
          StrCat("utterance ", utt, " has phone CTM but no word CTM"));
    }
    (void)recs;
  }

  std::map<std::string, std::map<std::vector<std::string>, int>> counts;
  for (const auto& [utt, wrecs] : words) {
    for (std::size_t i = 0; i + 1 < wrecs.size(); ++i) {
      if (wrecs[i + 1]->start + kOverlapSlack < wrecs[i]->start) {
        throw DataError(StrCat("word CTM not sorted by start time in ",
                               "utterance ", utt));
      }
      if (wrecs[i + 1]->start + kOverlapSlack <
          wrecs[i]->start + wrecs[i]->duration) {
        throw DataError(
            StrCat("overlapping word CTM records in utterance ", utt));
      }
    }
    const auto& precs = phones.at(utt);
    for (std::size_t i = 0; i + 1 < precs.size(); ++i) {
      if (precs[i + 1]->start + kOverlapSlack < precs[i]->start) {
        throw DataError(StrCat("phone CTM not sorted by start time in ",
                               "utterance ", utt));
      }
    }
    for (const CtmRecord* w : wrecs) {
      std::vector<std::string> pron;
      for (const CtmRecord* p : precs) {
        double mid = p->start + p->duration / 2.0;
        if (mid >= w->start && mid < w->start + w->duration) {
          pron.push_back(p->token);
        }
      }
      if (!pron.empty()) ++counts[w->token][pron];
    }
  }

  Lexicon lexicon;
  for (const auto& [word, prons] : counts) {
    for (const auto& [pron, count] : prons) {
      if (count >= min_count) {
        lexicon.AddPronunciation(word, pron, 1.0, PronSource::kPhoneDec);
      }
    }
  }
  lexicon.SetUniformProbs();
  return lexicon;
}

Lexicon MergeLexicons(const Lexicon& l0, const Lexicon& l1,
                      const Lexicon& l2) {
  Lexicon merged;
  for (const Lexicon* lex : {&l0, &l1, &l2}) {
    for (const auto& [word, prons] : lex->entries()) {
      for (const Pronunciation& p : prons) {
        merged.AddOrMerge(word, p.phones, 1.0, p.source);
      }
    }
  }
  merged.SetUniformProbs();
  return merged;
}

namespace {

struct WordEvidence {
  std::vector<const TokenEvidence*> tokens;
};

// Total log-likelihood of a word's tokens under mixture weights `probs`
// (parallel to `prons`).
double WordLoglik(const std::vector<Pronunciation>& prons,
                  const std::vector<double>& probs,
                  const WordEvidence& evidence) {
  double total = 0.0;
  for (const TokenEvidence* token : evidence.tokens) {
    double acc = kLogZero;
    for (std::size_t b = 0; b < prons.size(); ++b) {
      if (probs[b] <= 0.0) continue;
      auto it = token->scores.find(PronKey(prons[b].phones));
      if (it == token->scores.end()) continue;
      acc = LogSumExp(acc, std::log(probs[b]) + it->second);
    }
    total += acc;
  }
  return total;
}

// One EM iteration on a single word; returns the pre-update log-likelihood.
double EmIterateWord(const std::vector<Pronunciation>& prons,
                     std::vector<double>* probs,
                     const WordEvidence& evidence) {
  std::size_t nb = prons.size();
  std::vector<double> soft(nb, 0.0);
  double loglik = 0.0;
  double njoined = 0.0;
  for (const TokenEvidence* token : evidence.tokens) {
    std::vector<double> terms(nb, kLogZero);
    double denom = kLogZero;
    for (std::size_t b = 0; b < nb; ++b) {
      if ((*probs)[b] <= 0.0) continue;
      auto it = token->scores.find(PronKey(prons[b].phones));
      if (it == token->scores.end()) continue;
      terms[b] = std::log((*probs)[b]) + it->second;
      denom = LogSumExp(denom, terms[b]);
    }
    loglik += denom;
    if (denom == kLogZero) continue;  // token lost all candidates
    for (std::size_t b = 0; b < nb; ++b) {
      if (terms[b] != kLogZero) soft[b] += std::exp(terms[b] - denom);
    }
    njoined += 1.0;
  }
  if (njoined > 0.0) {
    double sum = 0.0;
    for (double s : soft) sum += s;
    if (sum > 0.0) {
      for (std::size_t b = 0; b < nb; ++b) (*probs)[b] = soft[b] / sum;
    }
  }
  return loglik;
}

std::map<std::string, WordEvidence> IndexEvidence(
    const Lexicon& lexicon, const std::vector<TokenEvidence>& evidence) {
  std::vector<std::string> offenders;
  std::map<std::string, WordEvidence> index;
  for (const TokenEvidence& token : evidence) {
    const std::vector<Pronunciation>* prons = lexicon.Find(token.word);
    if (prons == nullptr) {
      offenders.push_back(StrCat("unknown word '", token.word, "' (utterance ",
                                 token.utterance_id, ")"));
      continue;
    }
    for (const auto& [key, score] : token.scores) {
      bool found = false;
      for (const Pronunciation& p : *prons) {
        if (PronKey(p.phones) == key) {
          found = true;
          break;
        }
      }
      if (!found) {
        offenders.push_back(StrCat("unknown pronunciation '", key,
                                   "' for word '", token.word, "' (utterance ",
                                   token.utterance_id, ")"));
      }
    }
    index[token.word].tokens.push_back(&token);
  }
  if (!offenders.empty()) {
    throw DataError(
        StrCat("evidence errors:\n  ", JoinStrings(offenders, "\n  ")));
  }
  return index;
}

std::vector<double> CurrentProbs(const std::vector<Pronunciation>& prons) {
  std::vector<double> probs;
  probs.reserve(prons.size());
  for (const Pronunciation& p : prons) probs.push_back(p.prob);
  return probs;
}

void StoreProbs(std::vector<Pronunciation>* prons,
                const std::vector<double>& probs) {
  for (std::size_t b = 0; b < prons->size(); ++b) {
    (*prons)[b].prob = probs[b];
  }
}

}  // namespace

PronEstimateResult EstimatePronProbs(
    const Lexicon& lexicon, const std::vector<TokenEvidence>& evidence,
    int em_iters) {
  if (em_iters < 1) throw DataError("em_iters must be >= 1");
  Lexicon result = lexicon;
  std::map<std::string, WordEvidence> index = IndexEvidence(result, evidence);

  std::vector<double> iteration_loglik;
  for (int iter = 0; iter < em_iters; ++iter) {
    double loglik = 0.0;
    for (auto& [word, ev] : index) {
      std::vector<Pronunciation>* prons = result.FindMutable(word);
      std::vector<double> probs = CurrentProbs(*prons);
      loglik += EmIterateWord(*prons, &probs, ev);
      StoreProbs(prons, probs);
    }
    iteration_loglik.push_back(loglik);
  }
  return PronEstimateResult{std::move(result), std::move(iteration_loglik)};
}

std::pair<Lexicon, PruneReport> PruneByLikelihood(
    const Lexicon& lexicon, const std::vector<TokenEvidence>& evidence,
    const PruneOptions& options) {
  if (options.max_prons_per_word < 1) {
    throw DataError("max_prons_per_word must be >= 1");
  }
  Lexicon result = lexicon;
  std::map<std::string, WordEvidence> index = IndexEvidence(result, evidence);

  PruneReport report;
  for (int step = 1;; ++step) {
    bool have_candidate = false;
    double best_delta = 0.0;
    std::string best_word;
    std::size_t best_index = 0;
    std::string best_key;

    for (const auto& [word, ev] : index) {
      const std::vector<Pronunciation>* prons = result.Find(word);
      if (prons == nullptr || prons->size() <= 1) continue;
      bool over_cap =
          prons->size() > static_cast<std::size_t>(options.max_prons_per_word);
      std::vector<double> probs = CurrentProbs(*prons);
      double current = WordLoglik(*prons, probs, ev);
      for (std::size_t b = 0; b < prons->size(); ++b) {
        std::vector<double> removed = probs;
        removed[b] = 0.0;
        double rest = 1.0 - probs[b];
        if (rest > 1e-12) {
          for (std::size_t j = 0; j < removed.size(); ++j) {
            if (j != b) removed[j] = probs[j] / rest;
          }
        } else {
          double uniform = 1.0 / static_cast<double>(prons->size() - 1);
          for (std::size_t j = 0; j < removed.size(); ++j) {
            if (j != b) removed[j] = uniform;
          }
        }
        double without = WordLoglik(*prons, removed, ev);
        double delta;
        if (current == kLogZero && without == kLogZero) {
          delta = 0.0;
        } else {
          delta = current - without;
        }
        if (!over_cap && !(delta < options.min_loss)) continue;
        std::string key = PronKey((*prons)[b].phones);
        if (!have_candidate || delta < best_delta ||
            (delta == best_delta &&
             (word < best_word || (word == best_word && key < best_key)))) {
          have_candidate = true;
          best_delta = delta;
          best_word = word;
          best_index = b;
          best_key = key;
        }
      }
    }
    if (!have_candidate) break;

    std::vector<Pronunciation>* prons = result.FindMutable(best_word);
    std::vector<double> probs = CurrentProbs(*prons);
    double removed_prob = probs[best_index];
    report.steps.push_back(PruneStep{
        best_word, (*prons)[best_index].phones, best_delta, step});
    result.RemovePronunciation(best_word, best_index);
    prons = result.FindMutable(best_word);
    probs.erase(probs.begin() + best_index);
    double rest = 1.0 - removed_prob;
    if (rest > 1e-12) {
      for (double& p : probs) p /= rest;
    } else {
      std::fill(probs.begin(), probs.end(),
                1.0 / static_cast<double>(probs.size()));
    }
    StoreProbs(prons, probs);
    if (options.em_refresh) {
      std::vector<double> refreshed = CurrentProbs(*prons);
      EmIterateWord(*prons, &refreshed, index.at(best_word));
      StoreProbs(prons, refreshed);
    }
  }

  report.avg_prons_per_word =
      result.NumWords() == 0
          ? 0.0
          : static_cast<double>(result.NumPronunciations()) /
                static_cast<double>(result.NumWords());
  return {std::move(result), std::move(report)};
}

void WritePruneReport(const PruneReport& report, std::ostream& out) {
  out << "#word\tpron\tdelta\tstep\n";
  for (const PruneStep& step : report.steps) {
    out << step.word << '\t' << JoinStrings(step.phones, " ") << '\t'
        << FormatExact(step.delta) << '\t' << step.step << '\n';
  }
}

LexiconStats ComputeLexiconStats(
    const Lexicon& lexicon, const std::map<std::string, int64>& vocab_counts) {
  if (lexicon.Empty()) throw DataError("empty lexicon");
  LexiconStats stats;
  stats.avg_prons_per_word =
      static_cast<double>(lexicon.NumPronunciations()) /
      static_cast<double>(lexicon.NumWords());
  int64 oov_types = 0, oov_tokens = 0, total_tokens = 0;
  for (const auto& [word, count] : vocab_counts) {
    total_tokens += count;
    if (!lexicon.HasWord(word)) {
      ++oov_types;
      oov_tokens += count;
    }
  }
  stats.oov_types = oov_types;
  stats.vocab_types = static_cast<int64>(vocab_counts.size());
  stats.type_oov_rate =
      vocab_counts.empty()
          ? 0.0
          : static_cast<double>(oov_types) /
                static_cast<double>(vocab_counts.size());
  stats.token_oov_rate =
      total_tokens == 0 ? 0.0
                        : static_cast<double>(oov_tokens) /
                              static_cast<double>(total_tokens);
  return stats;
}

}  // namespace csc
