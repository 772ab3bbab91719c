// core/src/semisup.cc

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

#include "csc/semisup.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace csc {

AlignmentResult AlignWords(const std::vector<std::string>& reference,
                           const std::vector<std::string>& hypothesis) {
  std::size_t m = reference.size(), n = hypothesis.size();
  std::vector<std::vector<int>> cost(m + 1, std::vector<int>(n + 1, 0));
  for (std::size_t i = 0; i <= m; ++i) cost[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= n; ++j) cost[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      int diag = cost[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1]
                                           ? 0
                                           : 1);
      int del = cost[i - 1][j] + 1;
      int ins = cost[i][j - 1] + 1;
      cost[i][j] = std::min(diag, std::min(del, ins));
    }
  }

  AlignmentResult result;
  result.ref_len = static_cast<int>(m);
  std::vector<AlignedPair> rev;
  std::size_t i = m, j = n;
  // Backtrace preference at equal cost: match > substitution > deletion >
  // insertion.
  while (i > 0 || j > 0) {
    bool match = i > 0 && j > 0 && reference[i - 1] == hypothesis[j - 1];
    if (match && cost[i - 1][j - 1] == cost[i][j]) {
      rev.push_back(
          AlignedPair{EditOp::kMatch, reference[i - 1], hypothesis[j - 1]});
      --i;
      --j;
    } else if (i > 0 && j > 0 && !match &&
               cost[i - 1][j - 1] + 1 == cost[i][j]) {
      rev.push_back(
          AlignedPair{EditOp::kSub, reference[i - 1], hypothesis[j - 1]});
      --i;
      --j;
    } else if (i > 0 && cost[i - 1][j] + 1 == cost[i][j]) {
      rev.push_back(AlignedPair{EditOp::kDel, reference[i - 1], ""});
      --i;
    } else if (j > 0 && cost[i][j - 1] + 1 == cost[i][j]) {
      rev.push_back(AlignedPair{EditOp::kIns, "", hypothesis[j - 1]});
      --j;
    } else {
      throw DataError("alignment backtrace failed");
    }
  }
  std::reverse(rev.begin(), rev.end());
  result.ops = std::move(rev);
  for (const AlignedPair& op : result.ops) {
    switch (op.op) {
      case EditOp::kMatch: ++result.matches; break;
      case EditOp::kSub: ++result.subs; break;
      case EditOp::kDel: ++result.dels; break;
      case EditOp::kIns: ++result.inss; break;
    }
  }
  return result;
}

TranscriptMap ReadTranscripts(std::istream& in, const std::string& filename) {
  TranscriptMap transcripts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    std::string utt = fields[0];
    if (transcripts.count(utt)) {
      throw DataError(
          StrCat(filename, ":", lineno, ": duplicate utterance id ", utt));
    }
    transcripts[utt] =
        std::vector<std::string>(fields.begin() + 1, fields.end());
  }
  return transcripts;
}

TranscriptMap ReadTranscriptFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(StrCat("cannot open transcript file ", path));
  return ReadTranscripts(in, path);
}

CorpusWmer ScoreCorpus(const TranscriptMap& references,
                       const TranscriptMap& hypotheses,
                       const std::map<std::string, double>& durations,
                       int jobs) {
  std::vector<std::string> missing;
  std::vector<const TranscriptMap::value_type*> items;
  items.reserve(references.size());
  for (const auto& entry : references) {
    if (!hypotheses.count(entry.first)) {
      missing.push_back(entry.first);
    } else {
      items.push_back(&entry);
    }
  }
  if (!missing.empty()) {
    throw DataError(StrCat("utterances without hypotheses: ",
                           JoinStrings(missing, " ")));
  }

  struct UttResult {
    WmerScore score;
    int errors = 0;
    int ref_len = 0;
  };
  std::vector<UttResult> results =
      ParallelMap(items.size(), jobs, [&](std::size_t i) {
        const auto& [utt, ref] = *items[i];
        AlignmentResult alignment = AlignWords(ref, hypotheses.at(utt));
        UttResult r;
        r.errors = alignment.Cost();
        r.ref_len = alignment.ref_len;
        auto dit = durations.find(utt);
        r.score = WmerScore{
            utt,
            static_cast<double>(alignment.Cost()) /
                static_cast<double>(std::max(1, alignment.ref_len)),
            dit == durations.end() ? 0.0 : dit->second};
        return r;
      });

  CorpusWmer corpus;
  int64 total_errors = 0, total_ref = 0;
  double dur_sum = 0.0, dur_weighted = 0.0;
  for (const UttResult& r : results) {  // items are in sorted key order
    corpus.scores.push_back(r.score);
    total_errors += r.errors;
    total_ref += r.ref_len;
    dur_sum += r.score.duration;
    dur_weighted += r.score.wmer * r.score.duration;
  }
  corpus.token_weighted = static_cast<double>(total_errors) /
                          static_cast<double>(std::max<int64>(1, total_ref));
  corpus.duration_weighted = dur_sum > 0.0 ? dur_weighted / dur_sum : 0.0;
  return corpus;
}

std::vector<ReportRow> CumulativeReport(const std::vector<WmerScore>& scores,
                                        const std::vector<double>& thresholds,
                                        double total_hours) {
  if (total_hours <= 0.0) throw DataError("total duration must be positive");
  std::vector<ReportRow> rows;
  rows.reserve(thresholds.size());
  for (double tau : thresholds) {
    if (tau < 0.0) throw DataError("thresholds must be nonnegative");
    double seconds = 0.0;
    for (const WmerScore& s : scores) {
      if (s.wmer > tau / 100.0) seconds += s.duration;
    }
    double hours = seconds / 3600.0;
    double percent = hours / total_hours * 100.0;
    // Round half to even at 2 decimals (nearbyint under the default
    // rounding mode).
    percent = std::nearbyint(percent * 100.0) / 100.0;
    rows.push_back(ReportRow{tau, hours, percent});
  }
  return rows;
}

void WriteReport(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << "#threshold\thours\tpercent\n";
  char buf[64];
  for (const ReportRow& row : rows) {
    out << FormatFixedTrim(row.threshold, 6) << '\t';
    std::snprintf(buf, sizeof(buf), "%.2f", row.hours);
    out << buf << '\t';
    std::snprintf(buf, sizeof(buf), "%.2f", row.percent);
    out << buf << '\n';
  }
}

Partition PartitionByWmer(const std::vector<WmerScore>& scores, double tau) {
  if (tau < 0.0) throw DataError("tau must be nonnegative");
  Partition partition;
  partition.tau = tau;
  for (const WmerScore& s : scores) {
    // Strict-greater selection; compare in the wmer domain so that an
    // utterance scoring exactly tau percent stays supervised.
    if (s.wmer > tau / 100.0) {
      partition.unsupervised.push_back(s.utterance_id);
    } else {
      partition.supervised.push_back(s.utterance_id);
    }
  }
  std::sort(partition.supervised.begin(), partition.supervised.end());
  std::sort(partition.unsupervised.begin(), partition.unsupervised.end());
  return partition;
}

std::vector<std::string> RemovalFilter(const Partition& partition) {
  if (partition.supervised.empty()) {
    LogWarn("removal filter selected no utterances");
  }
  return partition.supervised;
}

double BestPathPosterior(const Lattice& lattice, double lm_scale) {
  PosteriorAnnotation ann = ForwardBackward(lattice, lm_scale);
  Path best = BestPath(lattice, lm_scale);
  double log_post = -best.TotalCost(lm_scale) - ann.total_log_likelihood;
  return std::min(1.0, std::exp(std::min(0.0, log_post)));
}

const char* SupervisionKindName(SupervisionKind kind) {
  switch (kind) {
    case SupervisionKind::kBestPath: return "best-path";
    case SupervisionKind::kPrunedLattice: return "pruned-lattice";
    case SupervisionKind::kHumanTranscript: return "human-transcript";
  }
  return "?";
}

namespace {

Lattice ScaleGraphCosts(Lattice lattice, double lm_scale) {
  for (LatticeArc& arc : lattice.arcs) arc.graph_cost *= lm_scale;
  return lattice;
}

void ShiftFinalCosts(Lattice* lattice, double shift) {
  for (LatticeFinal& f : lattice->finals) f.cost += shift;
}

}  // namespace

Supervision BuildSupervision(const Lattice& lattice, const Lexicon& lexicon,
                             SupervisionKind kind, double lm_scale,
                             double beam) {
  if (kind == SupervisionKind::kHumanTranscript) {
    throw DataError("human-transcript supervision needs a transcript");
  }
  Supervision sup;
  sup.utterance_id = lattice.utterance_id;
  sup.kind = kind;
  sup.lm_scale = lm_scale;
  sup.confidence = BestPathPosterior(lattice, lm_scale);

  // Normalizer: total mass of the full phone expansion, lm scale folded in.
  Lattice full =
      ScaleGraphCosts(WordToPhone(lattice, lexicon), lm_scale);
  double full_total = ForwardBackward(full, 1.0).total_log_likelihood;

  if (kind == SupervisionKind::kBestPath) {
    Path word_best = BestPath(lattice, lm_scale);
    Lattice linear = PathToLattice(lattice, word_best);
    Lattice expanded = ScaleGraphCosts(WordToPhone(linear, lexicon), lm_scale);
    Path phone_best = BestPath(expanded, 1.0);
    sup.lattice = PathToLattice(expanded, phone_best);
  } else {
    Lattice pruned = PrunePosterior(lattice, beam, lm_scale);
    sup.lattice = ScaleGraphCosts(WordToPhone(pruned, lexicon), lm_scale);
  }
  ShiftFinalCosts(&sup.lattice, full_total);
  return sup;
}

Supervision TranscriptSupervision(const std::string& utterance_id,
                                  const std::vector<std::string>& words,
                                  const Lexicon& lexicon) {
  Lattice linear;
  linear.utterance_id = utterance_id;
  linear.AddNode(0.0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    int32 node = linear.AddNode(static_cast<double>(i + 1));
    linear.AddArc(node - 1, node, words[i], 0.0, 0.0);
  }
  linear.SetFinal(static_cast<int32>(linear.nodes.size()) - 1, 0.0);

  Supervision sup;
  sup.utterance_id = utterance_id;
  sup.kind = SupervisionKind::kHumanTranscript;
  sup.lm_scale = 1.0;
  sup.confidence = 1.0;
  sup.lattice = WordToPhone(linear, lexicon);
  double total = ForwardBackward(sup.lattice, 1.0).total_log_likelihood;
  ShiftFinalCosts(&sup.lattice, total);
  return sup;
}

}  // namespace csc
