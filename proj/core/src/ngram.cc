// core/src/ngram.cc

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

#include "csc/ngram.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace csc {

namespace {

constexpr double kLn10 = 2.302585092994045684;
// ARPA stand-in for log 0 (the sentence-begin unigram).
constexpr double kArpaLogZero10 = -99.0;

}  // namespace

Vocabulary::Vocabulary() {
  Add(kBosSymbol);
  Add(kEosSymbol);
  Add(kUnkSymbol);
}

int32 Vocabulary::Add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  int32 id = static_cast<int32>(tokens_.size());
  tokens_.push_back(token);
  ids_.emplace(token, id);
  return id;
}

int32 Vocabulary::Find(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? -1 : it->second;
}

CountTable::CountTable(int order) : order_(order), counts_(order) {
  if (order < 1) throw DataError("n-gram order must be >= 1");
}

void CountTable::AddSentence(const std::vector<std::string>& tokens) {
  std::vector<int32> padded;
  padded.reserve(tokens.size() + 2);
  padded.push_back(Vocabulary::kBos);
  for (const std::string& token : tokens) padded.push_back(vocab_.Add(token));
  padded.push_back(Vocabulary::kEos);
  for (int n = 1; n <= order_; ++n) {
    if (static_cast<std::size_t>(n) > padded.size()) break;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      std::vector<int32> gram(padded.begin() + i, padded.begin() + i + n);
      ++counts_[n - 1][gram];
    }
  }
}

void CountTable::AddVocabToken(const std::string& token) {
  vocab_.Add(token);
}

int64 CountTable::Count(const std::vector<int32>& ngram) const {
  if (ngram.empty() || ngram.size() > static_cast<std::size_t>(order_)) {
    return 0;
  }
  const auto& table = counts_[ngram.size() - 1];
  auto it = table.find(ngram);
  return it == table.end() ? 0 : it->second;
}

CountTable CountNgrams(const std::vector<std::vector<std::string>>& corpus,
                       int order) {
  if (corpus.empty()) throw DataError("empty corpus");
  CountTable counts(order);
  for (const auto& sentence : corpus) counts.AddSentence(sentence);
  return counts;
}

NgramModel::NgramModel(int order, Vocabulary vocab)
    : order_(order), vocab_(std::move(vocab)), tables_(order) {}

void NgramModel::SetEntry(const std::vector<int32>& ngram, double logp,
                          double bow) {
  tables_[ngram.size() - 1][ngram] = Entry{logp, bow};
}

void NgramModel::SetBow(const std::vector<int32>& ngram, double bow) {
  auto& table = tables_[ngram.size() - 1];
  auto it = table.find(ngram);
  if (it == table.end()) {
    table[ngram] = Entry{kLogZero, bow};
  } else {
    it->second.bow = bow;
  }
}

const NgramModel::Entry* NgramModel::FindEntry(
    const std::vector<int32>& ngram) const {
  if (ngram.empty() || ngram.size() > tables_.size()) return nullptr;
  const auto& table = tables_[ngram.size() - 1];
  auto it = table.find(ngram);
  return it == table.end() ? nullptr : &it->second;
}

bool NgramModel::RemoveNgram(const std::vector<std::string>& ngram) {
  std::vector<int32> ids;
  for (const std::string& token : ngram) {
    int32 id = vocab_.Find(token);
    if (id < 0) return false;
    ids.push_back(id);
  }
  if (ids.empty() || ids.size() > tables_.size()) return false;
  return tables_[ids.size() - 1].erase(ids) > 0;
}

double NgramModel::CondLogProb(const std::vector<int32>& context,
                               int32 word) const {
  if (word == Vocabulary::kBos) return kLogZero;  // never predicted
  std::size_t max_ctx = std::min<std::size_t>(context.size(), order_ - 1);
  double bows = 0.0;
  for (std::size_t k = max_ctx + 1; k-- > 0;) {
    std::vector<int32> gram(context.end() - k, context.end());
    gram.push_back(word);
    if (const Entry* e = FindEntry(gram)) return bows + e->logp;
    if (k > 0) {
      std::vector<int32> ctx(context.end() - k, context.end());
      if (const Entry* c = FindEntry(ctx)) bows += c->bow;
    }
  }
  // Word absent even at the unigram level (foreign model without <unk>).
  return bows + kArpaLogZero10 * kLn10;
}

int32 NgramModel::MapToken(const std::string& token) const {
  int32 id = vocab_.Find(token);
  return id < 0 ? Vocabulary::kUnk : id;
}

double NgramModel::SequenceLogProb(
    const std::vector<std::string>& tokens) const {
  std::vector<int32> context{Vocabulary::kBos};
  double total = 0.0;
  std::size_t keep = std::max(order_ - 1, 1);
  for (const std::string& token : tokens) {
    int32 id = MapToken(token);
    total += CondLogProb(context, id);
    context.push_back(id);
    if (context.size() > keep) {
      context.erase(context.begin(), context.end() - keep);
    }
  }
  total += CondLogProb(context, Vocabulary::kEos);
  return total;
}

double NgramModel::SequenceLogProb10(
    const std::vector<std::string>& tokens) const {
  return SequenceLogProb(tokens) / kLn10;
}

NgramModel EstimateNgramModel(const CountTable& counts,
                              const SmoothingConfig& config) {
  if (config.method == SmoothingConfig::kAbsoluteDiscount &&
      (config.discount <= 0.0 || config.discount >= 1.0)) {
    throw DataError(StrCat("absolute discount must be in (0,1), got ",
                           config.discount));
  }
  const Vocabulary& vocab = counts.vocab();
  NgramModel model(counts.order(), vocab);

  // Predicted vocabulary: everything but <s>.
  std::vector<int32> predicted;
  for (int32 w = 0; w < vocab.size(); ++w) {
    if (w != Vocabulary::kBos) predicted.push_back(w);
  }
  double uniform = 1.0 / static_cast<double>(predicted.size());

  // Unigrams.  <unk> gets a floor count of 1.
  {
    std::vector<int64> c(vocab.size(), 0);
    for (const auto& [gram, count] : counts.counts(0)) c[gram[0]] = count;
    c[Vocabulary::kUnk] = std::max<int64>(c[Vocabulary::kUnk], 1);
    int64 total = 0;
    int64 types = 0;
    for (int32 w : predicted) {
      total += c[w];
      if (c[w] > 0) ++types;
    }
    if (total == 0) throw DataError("no unigram counts");
    for (int32 w : predicted) {
      double p;
      if (config.method == SmoothingConfig::kWittenBell) {
        p = (static_cast<double>(c[w]) +
             static_cast<double>(types) * uniform) /
            (static_cast<double>(total) + static_cast<double>(types));
      } else {
        double seen = std::max(static_cast<double>(c[w]) - config.discount,
                               0.0);
        p = seen / static_cast<double>(total) +
            config.discount * static_cast<double>(types) /
                static_cast<double>(total) * uniform;
      }
      model.SetEntry({w}, std::log(p), 0.0);
    }
    // <s> is context-only.
    model.SetEntry({Vocabulary::kBos}, kLogZero, 0.0);
  }

  // Higher orders.
  for (int n = 2; n <= counts.order(); ++n) {
    // Group n-gram counts by context.
    std::map<std::vector<int32>, std::vector<std::pair<int32, int64>>> ctxs;
    for (const auto& [gram, count] : counts.counts(n - 1)) {
      std::vector<int32> ctx(gram.begin(), gram.end() - 1);
      ctxs[ctx].push_back({gram.back(), count});
    }
    for (const auto& [ctx, conts] : ctxs) {
      int64 total = 0;
      for (const auto& [w, count] : conts) total += count;
      double types = static_cast<double>(conts.size());
      std::vector<int32> lower(ctx.begin() + 1, ctx.end());

      double leftover;
      std::vector<std::pair<int32, double>> probs;
      probs.reserve(conts.size());
      if (config.method == SmoothingConfig::kWittenBell) {
        double denom = static_cast<double>(total) + types;
        for (const auto& [w, count] : conts) {
          probs.push_back({w, static_cast<double>(count) / denom});
        }
        leftover = types / denom;
      } else {
        for (const auto& [w, count] : conts) {
          probs.push_back(
              {w, (static_cast<double>(count) - config.discount) /
                      static_cast<double>(total)});
        }
        leftover = config.discount * types / static_cast<double>(total);
      }

      double seen_lower = 0.0;
      for (const auto& [w, unused] : conts) {
        seen_lower += std::exp(model.CondLogProb(lower, w));
      }
      double unseen_lower = 1.0 - seen_lower;
      double bow;
      if (unseen_lower < 1e-12) {
        // Every predictable token seen in this context: fold the reserved
        // mass back proportionally to the lower-order distribution.
        for (auto& [w, p] : probs) {
          p += leftover * std::exp(model.CondLogProb(lower, w));
        }
        bow = 0.0;
      } else {
        bow = std::log(leftover) - std::log(unseen_lower);
      }

      for (const auto& [w, p] : probs) {
        std::vector<int32> gram = ctx;
        gram.push_back(w);
        model.SetEntry(gram, std::log(p), 0.0);
      }
      // Attach the backoff weight to the context's own entry.  With padded
      // counting every context is itself a counted lower-order event.
      model.SetBow(ctx, bow);
    }
  }
  return model;
}

void WriteArpa(const NgramModel& model, std::ostream& out) {
  char buf[64];
  auto fmt10 = [&](double ln_value) -> std::string {
    double v10 = ln_value == kLogZero ? kArpaLogZero10 : ln_value / kLn10;
    if (v10 < kArpaLogZero10) v10 = kArpaLogZero10;
    std::snprintf(buf, sizeof(buf), "%.6f", v10);
    return buf;
  };
  out << "\\data\\\n";
  for (int n = 1; n <= model.order(); ++n) {
    out << "ngram " << n << "=" << model.table(n - 1).size() << "\n";
  }
  for (int n = 1; n <= model.order(); ++n) {
    out << "\n\\" << n << "-grams:\n";
    // Deterministic output: sort by token strings.
    std::vector<std::pair<std::string, const NgramModel::Entry*>> rows;
    rows.reserve(model.table(n - 1).size());
    for (const auto& [gram, entry] : model.table(n - 1)) {
      std::vector<std::string> toks;
      toks.reserve(gram.size());
      for (int32 id : gram) toks.push_back(model.vocab().Token(id));
      rows.push_back({JoinStrings(toks, " "), &entry});
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [text, entry] : rows) {
      out << fmt10(entry->logp) << '\t' << text;
      if (n < model.order()) out << '\t' << fmt10(entry->bow);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void WriteArpaFile(const NgramModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(StrCat("cannot write ARPA file ", path));
  WriteArpa(model, out);
}

NgramModel ReadArpa(std::istream& in, const std::string& filename) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    if (required) {
      throw DataError(StrCat(filename, ": unexpected end of ARPA file"));
    }
    return false;
  };

  // Header.
  bool found_data = false;
  while (next_line(true)) {
    if (line == "\\data\\") {
      found_data = true;
      break;
    }
    if (!line.empty() && line[0] == '\\') {
      throw DataError(StrCat(filename, ":", lineno,
                             ": expected \\data\\ section, got '", line, "'"));
    }
  }
  if (!found_data) {
    throw DataError(StrCat(filename, ": missing \\data\\ section"));
  }

  std::vector<int64> declared;
  while (next_line(true)) {
    if (line.empty()) break;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.size() != 2 || fields[0] != "ngram") {
      throw DataError(StrCat(filename, ":", lineno,
                             ": expected 'ngram N=count', got '", line, "'"));
    }
    std::vector<std::string> kv = SplitChar(fields[1], '=');
    if (kv.size() != 2) {
      throw DataError(StrCat(filename, ":", lineno,
                             ": expected 'ngram N=count', got '", line, "'"));
    }
    int64 n = ParseInt(kv[0], StrCat(filename, ":", lineno, " ngram order"));
    int64 count = ParseInt(kv[1], StrCat(filename, ":", lineno, " count"));
    if (n != static_cast<int64>(declared.size()) + 1) {
      throw DataError(
          StrCat(filename, ":", lineno, ": non-consecutive ngram order ", n));
    }
    declared.push_back(count);
  }
  if (declared.empty()) {
    throw DataError(StrCat(filename, ": no ngram counts declared"));
  }

  int order = static_cast<int>(declared.size());
  NgramModel model(order, Vocabulary());
  for (int n = 1; n <= order; ++n) {
    // Section header.
    std::string expect = StrCat("\\", n, "-grams:");
    while (next_line(true)) {
      if (line.empty()) continue;
      if (line == expect) break;
      throw DataError(StrCat(filename, ":", lineno, ": expected '", expect,
                             "', got '", line, "'"));
    }
    int64 read_count = 0;
    while (next_line(true)) {
      if (line.empty()) break;
      if (line[0] == '\\') {
        throw DataError(StrCat(filename, ":", lineno,
                               ": section ended early: expected ", declared[n - 1],
                               " ", n, "-grams, got ", read_count));
      }
      std::vector<std::string> fields = SplitWhitespace(line);
      std::size_t expect_min = 1 + n;
      if (fields.size() != expect_min && fields.size() != expect_min + 1) {
        throw DataError(StrCat(filename, ":", lineno, ": malformed ", n,
                               "-gram line"));
      }
      double logp10 =
          ParseDouble(fields[0], StrCat(filename, ":", lineno, " logprob"));
      std::vector<int32> gram;
      gram.reserve(n);
      for (int i = 0; i < n; ++i) {
        gram.push_back(model.mutable_vocab()->Add(fields[1 + i]));
      }
      double bow10 = 0.0;
      if (fields.size() == expect_min + 1) {
        bow10 = ParseDouble(fields[expect_min],
                            StrCat(filename, ":", lineno, " backoff"));
      }
      model.SetEntry(gram, logp10 * kLn10, bow10 * kLn10);
      ++read_count;
    }
    if (read_count != declared[n - 1]) {
      throw DataError(StrCat(filename, ": declared ", declared[n - 1], " ", n,
                             "-grams but found ", read_count));
    }
  }
  while (next_line(true)) {
    if (line.empty()) continue;
    if (line == "\\end\\") return model;
    throw DataError(
        StrCat(filename, ":", lineno, ": expected \\end\\, got '", line, "'"));
  }
  throw DataError(StrCat(filename, ": missing \\end\\"));
}

NgramModel ReadArpaFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(StrCat("cannot open ARPA file ", path));
  return ReadArpa(in, path);
}

}  // namespace csc
