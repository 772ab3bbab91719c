// core/src/g2p.cc

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

#include "csc/g2p.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <set>

namespace csc {

std::string Graphone::Token() const {
  return StrCat(JoinStrings(letters, ""), "}", JoinStrings(phones, ","));
}

Graphone Graphone::FromToken(const std::string& token) {
  std::size_t sep = token.find('}');
  if (sep == std::string::npos) {
    throw DataError(StrCat("malformed graphone token '", token, "'"));
  }
  Graphone g;
  g.letters = Utf8Codepoints(token.substr(0, sep));
  std::string phones = token.substr(sep + 1);
  if (!phones.empty()) g.phones = SplitChar(phones, ',');
  if (g.letters.empty() && g.phones.empty()) {
    throw DataError(StrCat("graphone token '", token, "' is empty-empty"));
  }
  return g;
}

GraphoneModel::GraphoneModel(int max_letters, int max_phones,
                             double max_phone_ratio,
                             std::vector<Graphone> inventory, NgramModel ngram)
    : max_letters_(max_letters),
      max_phones_(max_phones),
      max_phone_ratio_(max_phone_ratio),
      inventory_(std::move(inventory)),
      ngram_(std::move(ngram)) {
  for (std::size_t i = 0; i < inventory_.size(); ++i) {
    by_letters_[inventory_[i].letters].push_back(static_cast<int32>(i));
  }
}

const std::vector<int32>* GraphoneModel::FindByLetters(
    const std::vector<std::string>& letters) const {
  auto it = by_letters_.find(letters);
  return it == by_letters_.end() ? nullptr : &it->second;
}

namespace {

// Alignment lattice of one (word, pronunciation) pair: nodes are
// (letters consumed, phones consumed) flattened to i*(k+1)+j; every arc goes
// to a strictly larger node index, so a single sorted pass suffices for the
// forward and backward sweeps.
struct AlignEntry {
  std::vector<std::string> letters;
  std::vector<std::string> phones;
  struct Arc {
    int32 from;
    int32 to;
    int32 graphone;
  };
  std::vector<Arc> arcs;
  int32 num_nodes = 0;
};

struct EntryExpectation {
  double loglik = kLogZero;
  std::map<int32, double> expected;  // graphone id -> soft count
};

EntryExpectation EStep(const AlignEntry& entry,
                       const std::vector<double>& log_u) {
  EntryExpectation out;
  std::vector<double> alpha(entry.num_nodes, kLogZero);
  std::vector<double> beta(entry.num_nodes, kLogZero);
  alpha[0] = 0.0;
  for (const auto& arc : entry.arcs) {
    if (alpha[arc.from] == kLogZero || log_u[arc.graphone] == kLogZero) {
      continue;
    }
    alpha[arc.to] =
        LogSumExp(alpha[arc.to], alpha[arc.from] + log_u[arc.graphone]);
  }
  int32 goal = entry.num_nodes - 1;
  double z = alpha[goal];
  if (z == kLogZero) return out;  // unalignable under current inventory
  beta[goal] = 0.0;
  for (auto it = entry.arcs.rbegin(); it != entry.arcs.rend(); ++it) {
    if (beta[it->to] == kLogZero || log_u[it->graphone] == kLogZero) continue;
    beta[it->from] =
        LogSumExp(beta[it->from], log_u[it->graphone] + beta[it->to]);
  }
  out.loglik = z;
  for (const auto& arc : entry.arcs) {
    if (alpha[arc.from] == kLogZero || beta[arc.to] == kLogZero ||
        log_u[arc.graphone] == kLogZero) {
      continue;
    }
    double gamma =
        std::exp(alpha[arc.from] + log_u[arc.graphone] + beta[arc.to] - z);
    out.expected[arc.graphone] += gamma;
  }
  return out;
}

// Max-product alignment; returns graphone ids, empty when unalignable.
// Ties keep the first-enumerated arc.
std::vector<int32> ViterbiAlign(const AlignEntry& entry,
                                const std::vector<double>& log_u) {
  std::vector<double> best(entry.num_nodes, kLogZero);
  std::vector<int32> back(entry.num_nodes, -1);  // arc index
  best[0] = 0.0;
  for (std::size_t a = 0; a < entry.arcs.size(); ++a) {
    const auto& arc = entry.arcs[a];
    if (best[arc.from] == kLogZero || log_u[arc.graphone] == kLogZero) {
      continue;
    }
    double cand = best[arc.from] + log_u[arc.graphone];
    if (cand > best[arc.to]) {
      best[arc.to] = cand;
      back[arc.to] = static_cast<int32>(a);
    }
  }
  int32 goal = entry.num_nodes - 1;
  if (best[goal] == kLogZero) return {};
  std::vector<int32> rev;
  for (int32 v = goal; v != 0;) {
    const auto& arc = entry.arcs[back[v]];
    rev.push_back(arc.graphone);
    v = arc.from;
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

}  // namespace

G2pTrainResult TrainGraphoneModel(const Lexicon& lexicon,
                                  const G2pTrainOptions& options) {
  if (lexicon.Empty()) throw DataError("cannot train G2P on an empty lexicon");
  if (options.max_letters < 1 || options.max_phones < 1) {
    throw DataError("graphone bounds must be >= 1");
  }
  if (options.em_iters < 1) throw DataError("em_iters must be >= 1");

  std::map<Graphone, int32> graphone_ids;
  std::vector<Graphone> inventory;
  auto intern = [&](Graphone g) -> int32 {
    auto it = graphone_ids.find(g);
    if (it != graphone_ids.end()) return it->second;
    int32 id = static_cast<int32>(inventory.size());
    graphone_ids.emplace(g, id);
    inventory.push_back(std::move(g));
    return id;
  };

  // Build alignment lattices and the candidate inventory in one pass.
  std::vector<AlignEntry> entries;
  int skipped = 0;
  for (const auto& [word, prons] : lexicon.entries()) {
    std::vector<std::string> letters = Utf8Codepoints(AsciiLower(word));
    for (const Pronunciation& pron : prons) {
      if (!options.language_filter.empty()) {
        bool keep = true;
        for (const std::string& phone : pron.phones) {
          if (Lexicon::SplitPhoneTag(phone).second != options.language_filter) {
            keep = false;
            break;
          }
        }
        if (!keep) continue;
      }
      std::size_t m = letters.size();
      std::size_t k = pron.phones.size();
      if ((m == 0 && k == 0) ||
          static_cast<double>(k) >
              options.max_phone_ratio * static_cast<double>(m)) {
        ++skipped;
        continue;
      }
      AlignEntry entry;
      entry.letters = letters;
      entry.phones = pron.phones;
      entry.num_nodes = static_cast<int32>((m + 1) * (k + 1));
      for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= k; ++j) {
          for (int a = 0; a <= options.max_letters && i + a <= m; ++a) {
            for (int b = 0; b <= options.max_phones && j + b <= k; ++b) {
              if (a == 0 && b == 0) continue;
              Graphone g;
              g.letters.assign(letters.begin() + i, letters.begin() + i + a);
              g.phones.assign(pron.phones.begin() + j,
                              pron.phones.begin() + j + b);
              entry.arcs.push_back(AlignEntry::Arc{
                  static_cast<int32>(i * (k + 1) + j),
                  static_cast<int32>((i + a) * (k + 1) + j + b),
                  intern(std::move(g))});
            }
          }
        }
      }
      entries.push_back(std::move(entry));
    }
  }
  if (entries.empty()) {
    throw DataError("no alignable lexicon entries for G2P training");
  }

  // Unigram EM over segmentations (multigram model).
  std::vector<double> log_u(inventory.size(),
                            -std::log(static_cast<double>(inventory.size())));
  std::vector<double> iteration_loglik;
  std::vector<double> expected(inventory.size(), 0.0);
  int unalignable = 0;
  for (int iter = 0; iter < options.em_iters; ++iter) {
    std::vector<EntryExpectation> locals =
        ParallelMap(entries.size(), options.jobs,
                    [&](std::size_t i) { return EStep(entries[i], log_u); });
    // Fixed-order reduction keeps results identical for any job count.
    double loglik = 0.0;
    std::fill(expected.begin(), expected.end(), 0.0);
    unalignable = 0;
    for (const EntryExpectation& local : locals) {
      if (local.loglik == kLogZero) {
        ++unalignable;
        continue;
      }
      loglik += local.loglik;
      for (const auto& [gid, count] : local.expected) expected[gid] += count;
    }
    iteration_loglik.push_back(loglik);
    double total = 0.0;
    for (double e : expected) total += e;
    if (total <= 0.0) throw DataError("G2P EM collapsed: no expected counts");
    for (std::size_t g = 0; g < inventory.size(); ++g) {
      log_u[g] = expected[g] > 0.0 ? std::log(expected[g]) - std::log(total)
                                   : kLogZero;
    }
  }
  skipped += unalignable;

  // Sparsity control before n-gram estimation.
  std::vector<double> pruned_log_u = log_u;
  std::vector<char> kept(inventory.size(), 0);
  for (std::size_t g = 0; g < inventory.size(); ++g) {
    if (expected[g] >= options.min_expected_count) {
      kept[g] = 1;
    } else {
      pruned_log_u[g] = kLogZero;
    }
  }

  // Viterbi-align every entry and train the graphone n-gram on the
  // resulting token sequences.
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(entries.size());
  for (const AlignEntry& entry : entries) {
    std::vector<int32> alignment = ViterbiAlign(entry, pruned_log_u);
    if (alignment.empty()) {
      ++skipped;
      continue;
    }
    std::vector<std::string> tokens;
    tokens.reserve(alignment.size());
    for (int32 gid : alignment) tokens.push_back(inventory[gid].Token());
    corpus.push_back(std::move(tokens));
  }
  if (corpus.empty()) {
    throw DataError("no alignable lexicon entries for G2P training");
  }

  std::vector<Graphone> final_inventory;
  for (std::size_t g = 0; g < inventory.size(); ++g) {
    if (kept[g]) final_inventory.push_back(inventory[g]);
  }
  CountTable counts(options.order);
  for (const Graphone& g : final_inventory) counts.AddVocabToken(g.Token());
  for (const auto& sentence : corpus) counts.AddSentence(sentence);
  NgramModel ngram = EstimateNgramModel(counts, SmoothingConfig{});

  G2pTrainResult result{
      GraphoneModel(options.max_letters, options.max_phones,
                    options.max_phone_ratio, std::move(final_inventory),
                    std::move(ngram)),
      std::move(iteration_loglik), skipped};
  if (result.skipped_entries > 0) {
    LogWarn(StrCat("G2P training skipped ", result.skipped_entries,
                   " lexicon entries"));
  }
  return result;
}

namespace {

struct DecodeItem {
  double cost = 0.0;  // negated natural-log probability so far
  std::size_t consumed = 0;
  std::vector<std::string> phones;
  std::vector<int32> context;  // n-gram token ids
};

struct DecodeItemOrder {
  bool operator()(const DecodeItem& a, const DecodeItem& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    if (a.phones != b.phones) return a.phones > b.phones;
    if (a.consumed != b.consumed) return a.consumed > b.consumed;
    return a.context > b.context;
  }
};

}  // namespace

std::vector<G2pPronunciation> G2pNbest(const GraphoneModel& model,
                                       const std::string& word, int n,
                                       const G2pDecodeOptions& options) {
  if (n < 1) throw DataError("g2p nbest requires n >= 1");
  std::vector<std::string> letters = Utf8Codepoints(AsciiLower(word));
  if (letters.empty()) throw DataError("cannot decode an empty word");

  std::set<std::string> known;
  for (const Graphone& g : model.inventory()) {
    for (const std::string& l : g.letters) known.insert(l);
  }
  std::set<std::string> missing_set;
  for (const std::string& l : letters) {
    if (!known.count(l)) missing_set.insert(l);
  }
  if (!missing_set.empty()) {
    std::vector<std::string> missing(missing_set.begin(), missing_set.end());
    throw DataError(StrCat("word '", word, "' contains letters unseen in any ",
                           "graphone: ", JoinStrings(missing, " ")));
  }

  const NgramModel& lm = model.ngram();
  std::size_t max_phones_total = static_cast<std::size_t>(
      model.max_phone_ratio() * static_cast<double>(letters.size()) + 1e-9);
  std::size_t keep_ctx = std::max(lm.order() - 1, 1);

  // Token ids of inventory graphones under the n-gram vocabulary.
  std::vector<int32> token_ids(model.inventory().size());
  for (std::size_t g = 0; g < model.inventory().size(); ++g) {
    token_ids[g] = lm.MapToken(model.inventory()[g].Token());
  }

  std::priority_queue<DecodeItem, std::vector<DecodeItem>, DecodeItemOrder> pq;
  DecodeItem root;
  root.context.push_back(Vocabulary::kBos);
  pq.push(root);

  std::vector<std::pair<std::vector<std::string>, double>> completions;
  double best_complete = kInfinity;
  int64 pops = 0;
  while (!pq.empty()) {
    DecodeItem item = pq.top();
    pq.pop();
    if (++pops > options.max_pops) break;
    if (item.cost > best_complete + options.beam) break;

    if (item.consumed == letters.size()) {
      double eos = lm.CondLogProb(item.context, Vocabulary::kEos);
      if (eos != kLogZero && !item.phones.empty()) {
        double total = item.cost - eos;
        completions.push_back({item.phones, -total});
        best_complete = std::min(best_complete, total);
      }
      // fall through: empty-letter graphones may still extend the path
    }
    for (std::size_t a = 0;
         a <= static_cast<std::size_t>(model.max_letters()) &&
         item.consumed + a <= letters.size();
         ++a) {
      std::vector<std::string> segment(letters.begin() + item.consumed,
                                       letters.begin() + item.consumed + a);
      const std::vector<int32>* gids = model.FindByLetters(segment);
      if (gids == nullptr) continue;
      for (int32 gid : *gids) {
        const Graphone& g = model.inventory()[gid];
        if (item.phones.size() + g.phones.size() > max_phones_total) continue;
        double lp = lm.CondLogProb(item.context, token_ids[gid]);
        if (lp == kLogZero) continue;
        DecodeItem child;
        child.cost = item.cost - lp;
        child.consumed = item.consumed + a;
        child.phones = item.phones;
        child.phones.insert(child.phones.end(), g.phones.begin(),
                            g.phones.end());
        child.context = item.context;
        child.context.push_back(token_ids[gid]);
        if (child.context.size() > keep_ctx) {
          child.context.erase(child.context.begin(),
                              child.context.end() - keep_ctx);
        }
        pq.push(std::move(child));
      }
    }
  }

  // Marginalize over segmentations per pronunciation.  Sorting first makes
  // the floating accumulation order independent of pop-tie order.
  std::sort(completions.begin(), completions.end());
  std::vector<G2pPronunciation> grouped;
  for (const auto& [phones, logp] : completions) {
    if (!grouped.empty() && grouped.back().phones == phones) {
      grouped.back().logprob = LogSumExp(grouped.back().logprob, logp);
    } else {
      grouped.push_back(G2pPronunciation{phones, logp});
    }
  }
  std::sort(grouped.begin(), grouped.end(),
            [](const G2pPronunciation& a, const G2pPronunciation& b) {
              if (a.logprob != b.logprob) return a.logprob > b.logprob;
              return a.phones < b.phones;
            });
  if (static_cast<int>(grouped.size()) > n) grouped.resize(n);
  return grouped;
}

OovLexiconResult GenerateOovLexicon(const GraphoneModel& model,
                                    const std::vector<std::string>& wordlist,
                                    const Lexicon& base, int n,
                                    const G2pDecodeOptions& options) {
  std::vector<std::string> words(wordlist.begin(), wordlist.end());
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());

  OovLexiconResult result;
  for (const std::string& word : words) {
    if (word.empty() || base.HasWord(word)) continue;
    std::vector<G2pPronunciation> prons;
    try {
      prons = G2pNbest(model, word, n, options);
    } catch (const DataError&) {
      result.skipped.push_back(word);
      continue;
    }
    if (prons.empty()) {
      result.skipped.push_back(word);
      continue;
    }
    double total = kLogZero;
    for (const G2pPronunciation& p : prons) {
      total = LogSumExp(total, p.logprob);
    }
    for (const G2pPronunciation& p : prons) {
      result.lexicon.AddPronunciation(word, p.phones,
                                      std::exp(p.logprob - total),
                                      PronSource::kG2p);
    }
  }
  return result;
}

void WriteGraphoneModel(const GraphoneModel& model, std::ostream& out) {
  out << "csc-g2p-model 1\n";
  out << "maxg " << model.max_letters() << "\n";
  out << "maxp " << model.max_phones() << "\n";
  out << "ratio " << FormatExact(model.max_phone_ratio()) << "\n";
  out << "inventory " << model.inventory().size() << "\n";
  for (const Graphone& g : model.inventory()) out << g.Token() << "\n";
  out << "arpa\n";
  WriteArpa(model.ngram(), out);
}

void WriteGraphoneModelFile(const GraphoneModel& model,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(StrCat("cannot write G2P model file ", path));
  WriteGraphoneModel(model, out);
}

GraphoneModel ReadGraphoneModel(std::istream& in,
                                const std::string& filename) {
  std::string line;
  auto read_line = [&]() -> std::string {
    if (!std::getline(in, line)) {
      throw DataError(StrCat(filename, ": truncated G2P model file"));
    }
    return line;
  };
  if (read_line() != "csc-g2p-model 1") {
    throw DataError(StrCat(filename, ": not a csc-g2p-model file"));
  }
  auto read_kv = [&](const std::string& key) -> std::string {
    std::vector<std::string> fields = SplitWhitespace(read_line());
    if (fields.size() != 2 || fields[0] != key) {
      throw DataError(StrCat(filename, ": expected '", key, " <value>'"));
    }
    return fields[1];
  };
  int maxg = static_cast<int>(ParseInt(read_kv("maxg"), "maxg"));
  int maxp = static_cast<int>(ParseInt(read_kv("maxp"), "maxp"));
  double ratio = ParseDouble(read_kv("ratio"), "ratio");
  int64 count = ParseInt(read_kv("inventory"), "inventory size");
  std::vector<Graphone> inventory;
  inventory.reserve(count);
  for (int64 i = 0; i < count; ++i) {
    inventory.push_back(Graphone::FromToken(read_line()));
  }
  if (read_line() != "arpa") {
    throw DataError(StrCat(filename, ": expected 'arpa' section"));
  }
  NgramModel ngram = ReadArpa(in, filename);
  return GraphoneModel(maxg, maxp, ratio, std::move(inventory),
                       std::move(ngram));
}

GraphoneModel ReadGraphoneModelFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(StrCat("cannot open G2P model file ", path));
  return ReadGraphoneModel(in, path);
}

}  // namespace csc
