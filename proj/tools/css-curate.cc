// tools/css-curate.cc

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

// Command-line front end for the code-switching speech curation pipeline:
// lexicon learning (G2P + phonetic-decode harvesting + pronunciation EM +
// likelihood pruning), WMER transcription-quality scoring and partitioning,
// lattice supervision construction, and n-best/lattice rescoring.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csc/g2p.h"
#include "csc/lattice-io.h"
#include "csc/lattice.h"
#include "csc/lexicon.h"
#include "csc/lexlearn.h"
#include "csc/ngram.h"
#include "csc/rescore.h"
#include "csc/semisup.h"

namespace csc {
namespace {

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(StrCat("cannot write ", path));
  return out;
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(StrCat("cannot open ", path));
  return in;
}

std::vector<std::string> ReadWordList(const std::string& path) {
  std::ifstream in = OpenIn(path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (!fields.empty()) words.push_back(fields[0]);
  }
  return words;
}

std::vector<std::vector<std::string>> ReadCorpus(const std::string& path) {
  std::ifstream in = OpenIn(path);
  std::vector<std::vector<std::string>> corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    corpus.push_back(SplitWhitespace(line));
  }
  while (!corpus.empty() && corpus.back().empty()) corpus.pop_back();
  return corpus;
}

std::map<std::string, double> ReadDurations(const std::string& path) {
  std::ifstream in = OpenIn(path);
  std::map<std::string, double> durations;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.size() != 2) {
      throw DataError(
          StrCat(path, ":", lineno, ": expected 'utterance-id seconds'"));
    }
    durations[fields[0]] =
        ParseDouble(fields[1], StrCat(path, ":", lineno, " duration"));
  }
  return durations;
}

std::vector<WmerScore> ReadScores(const std::string& path) {
  std::ifstream in = OpenIn(path);
  std::vector<WmerScore> scores;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.size() != 3) {
      throw DataError(StrCat(path, ":", lineno,
                             ": expected 'utterance-id wmer duration'"));
    }
    scores.push_back(
        WmerScore{fields[0],
                  ParseDouble(fields[1], StrCat(path, ":", lineno, " wmer")),
                  ParseDouble(fields[2],
                              StrCat(path, ":", lineno, " duration"))});
  }
  return scores;
}

std::vector<Lattice> ReadLatticesSorted(const std::string& path) {
  std::vector<Lattice> lattices = ReadLatticeFile(path);
  std::sort(lattices.begin(), lattices.end(),
            [](const Lattice& a, const Lattice& b) {
              return a.utterance_id < b.utterance_id;
            });
  return lattices;
}

std::unique_ptr<LmScorer> MakeScorer(const std::string& spec) {
  const std::string prefix = "arpa:";
  if (spec.rfind(prefix, 0) != 0) {
    throw DataError(StrCat("unsupported scorer '", spec,
                           "' (expected arpa:<path>)"));
  }
  return std::make_unique<NgramScorer>(ReadArpaFile(spec.substr(prefix.size())));
}

struct LexLearnKnobs {
  int g2p_order = 3;
  int maxg = 2;
  int maxp = 2;
  int g2p_em_iters = 10;
  double min_expected_count = 1e-6;
  std::string language;
  int g2p_n = 5;
  int min_count = 2;
  int lex_em_iters = 10;
  int max_prons = 4;
  double min_loss = 0.0;
  bool no_em_refresh = false;
  int jobs = 1;
};

// Fig.-2-style pipeline core, shared by `lex-learn` and reusable piecewise.
struct LexLearnOutputs {
  Lexicon learned;
  PruneReport report;
  Lexicon l1, l2, merged, estimated;
  std::vector<std::string> g2p_skipped;
  GraphoneModel g2p_model;
};

LexLearnOutputs RunLexLearn(const Lexicon& l0,
                            const std::vector<std::string>& wordlist,
                            const std::vector<CtmRecord>& word_ctm,
                            const std::vector<CtmRecord>& phone_ctm,
                            const std::string& evidence_path,
                            const LexLearnKnobs& knobs) {
  LexLearnOutputs out;

  G2pTrainOptions topt;
  topt.order = knobs.g2p_order;
  topt.max_letters = knobs.maxg;
  topt.max_phones = knobs.maxp;
  topt.em_iters = knobs.g2p_em_iters;
  topt.min_expected_count = knobs.min_expected_count;
  topt.language_filter = knobs.language;
  topt.jobs = knobs.jobs;
  G2pTrainResult trained = TrainGraphoneModel(l0, topt);
  out.g2p_model = trained.model;
  LogInfo(StrCat("g2p: trained on ", l0.NumPronunciations(), " entries, ",
                 trained.skipped_entries, " skipped"));

  OovLexiconResult oov =
      GenerateOovLexicon(out.g2p_model, wordlist, l0, knobs.g2p_n);
  out.l1 = oov.lexicon;
  out.g2p_skipped = oov.skipped;
  LogInfo(StrCat("g2p: ", out.l1.NumWords(), " OOV words covered, ",
                 oov.skipped.size(), " skipped"));

  out.l2 = HarvestCandidates(word_ctm, phone_ctm, knobs.min_count);
  LogInfo(StrCat("harvest: ", out.l2.NumPronunciations(),
                 " candidate pronunciations"));

  out.merged = MergeLexicons(l0, out.l1, out.l2);

  std::vector<TokenEvidence> evidence =
      ReadEvidenceFile(evidence_path, out.merged);
  out.estimated =
      EstimatePronProbs(out.merged, evidence, knobs.lex_em_iters).lexicon;

  PruneOptions popt;
  popt.max_prons_per_word = knobs.max_prons;
  popt.min_loss = knobs.min_loss;
  popt.em_refresh = !knobs.no_em_refresh;
  auto [learned, report] = PruneByLikelihood(out.estimated, evidence, popt);
  out.learned = std::move(learned);
  out.report = std::move(report);
  return out;
}

void WriteStats(const LexiconStats& stats, std::ostream& os) {
  os << "avg_prons_per_word\t" << FormatExact(stats.avg_prons_per_word)
     << "\n";
  os << "type_oov_rate\t" << FormatExact(stats.type_oov_rate) << "\n";
  os << "token_oov_rate\t" << FormatExact(stats.token_oov_rate) << "\n";
  os << "oov_types\t" << stats.oov_types << "\n";
  os << "vocab_types\t" << stats.vocab_types << "\n";
}

int Run(int argc, char** argv) {
  CLI::App app{
      "css-curate: semi-supervised curation toolkit for code-switching "
      "speech recognition data"};
  app.require_subcommand(1);
  // Key=value config with one [subcommand] section per command; values are
  // overridden by flags given on the command line.
  app.set_config("--config", "",
                 "Config file ([subcommand] sections, key=value)");

  // ---------------------------------------------------------------- g2p
  {
    auto* sub = app.add_subcommand("g2p-train",
                                   "Train a joint-sequence graphone model");
    auto opt = std::make_shared<LexLearnKnobs>();
    auto lexicon_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--lexicon", *lexicon_path, "Training lexicon")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", *out_path, "Output model file")->required();
    sub->add_option("--order", opt->g2p_order, "Graphone n-gram order");
    sub->add_option("--maxg", opt->maxg, "Max letters per graphone");
    sub->add_option("--maxp", opt->maxp, "Max phones per graphone");
    sub->add_option("--em-iters", opt->g2p_em_iters, "EM iterations");
    sub->add_option("--min-expected-count", opt->min_expected_count,
                    "Drop graphones with a smaller expected count");
    sub->add_option("--language", opt->language,
                    "Train only on pronunciations with this language tag");
    sub->add_option("--jobs", opt->jobs, "E-step threads");
    sub->callback([=]() {
      G2pTrainOptions topt;
      topt.order = opt->g2p_order;
      topt.max_letters = opt->maxg;
      topt.max_phones = opt->maxp;
      topt.em_iters = opt->g2p_em_iters;
      topt.min_expected_count = opt->min_expected_count;
      topt.language_filter = opt->language;
      topt.jobs = opt->jobs;
      G2pTrainResult result = TrainGraphoneModel(
          ReadLexiconFile(*lexicon_path, PronSource::kOrig), topt);
      for (std::size_t i = 0; i < result.iteration_loglik.size(); ++i) {
        LogInfo(StrCat("g2p EM iteration ", i + 1, " log-likelihood ",
                       result.iteration_loglik[i]));
      }
      WriteGraphoneModelFile(result.model, *out_path);
    });
  }
  {
    auto* sub = app.add_subcommand(
        "g2p-apply", "Decode pronunciations for out-of-vocabulary words");
    auto model_path = std::make_shared<std::string>();
    auto words_path = std::make_shared<std::string>();
    auto base_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto skipped_path = std::make_shared<std::string>();
    auto n = std::make_shared<int>(5);
    sub->add_option("--model", *model_path, "Graphone model")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--words", *words_path, "Word list, one per line")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--base", *base_path, "Base lexicon defining OOV")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--n", *n, "Pronunciations per word");
    sub->add_option("--out", *out_path, "Output lexicon")->required();
    sub->add_option("--skipped", *skipped_path, "Skip-report file");
    sub->callback([=]() {
      GraphoneModel model = ReadGraphoneModelFile(*model_path);
      Lexicon base = ReadLexiconFile(*base_path, PronSource::kOrig);
      OovLexiconResult result =
          GenerateOovLexicon(model, ReadWordList(*words_path), base, *n);
      WriteLexiconFile(result.lexicon, *out_path);
      if (!skipped_path->empty()) {
        std::ofstream out = OpenOut(*skipped_path);
        for (const std::string& word : result.skipped) out << word << "\n";
      }
      if (!result.skipped.empty()) {
        LogWarn(StrCat(result.skipped.size(), " words failed G2P decoding"));
      }
    });
  }

  // ----------------------------------------------------------- lexicon
  {
    auto* sub = app.add_subcommand(
        "lex-harvest", "Harvest pronunciation candidates from decodes");
    auto word_ctm = std::make_shared<std::string>();
    auto phone_ctm = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto min_count = std::make_shared<int>(2);
    sub->add_option("--word-ctm", *word_ctm, "Word-level CTM")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--phone-ctm", *phone_ctm, "Phone-level CTM")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--min-count", *min_count, "Minimum candidate count");
    sub->add_option("--out", *out_path, "Output lexicon")->required();
    sub->callback([=]() {
      WriteLexiconFile(HarvestCandidates(ReadCtmFile(*word_ctm),
                                         ReadCtmFile(*phone_ctm), *min_count),
                       *out_path);
    });
  }
  {
    auto* sub = app.add_subcommand("lex-merge",
                                   "Merge original, G2P, and decoded lexicons");
    auto l0 = std::make_shared<std::string>();
    auto l1 = std::make_shared<std::string>();
    auto l2 = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--l0", *l0, "Original lexicon")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--l1", *l1, "G2P lexicon")->check(CLI::ExistingFile);
    sub->add_option("--l2", *l2, "Harvested lexicon")->check(CLI::ExistingFile);
    sub->add_option("--out", *out_path, "Merged lexicon")->required();
    sub->callback([=]() {
      Lexicon lex0 = ReadLexiconFile(*l0, PronSource::kOrig);
      Lexicon lex1 =
          l1->empty() ? Lexicon() : ReadLexiconFile(*l1, PronSource::kG2p);
      Lexicon lex2 =
          l2->empty() ? Lexicon() : ReadLexiconFile(*l2, PronSource::kPhoneDec);
      WriteLexiconFile(MergeLexicons(lex0, lex1, lex2), *out_path);
    });
  }
  {
    auto* sub = app.add_subcommand(
        "lex-estimate", "Estimate pronunciation probabilities by EM");
    auto lexicon_path = std::make_shared<std::string>();
    auto evidence_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto em_iters = std::make_shared<int>(10);
    sub->add_option("--lexicon", *lexicon_path, "Input lexicon")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--evidence", *evidence_path, "Acoustic evidence file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--em-iters", *em_iters, "EM iterations");
    sub->add_option("--out", *out_path, "Output lexicon")->required();
    sub->callback([=]() {
      Lexicon lexicon = ReadLexiconFile(*lexicon_path, PronSource::kOrig);
      std::vector<TokenEvidence> evidence =
          ReadEvidenceFile(*evidence_path, lexicon);
      PronEstimateResult result =
          EstimatePronProbs(lexicon, evidence, *em_iters);
      for (std::size_t i = 0; i < result.iteration_loglik.size(); ++i) {
        LogInfo(StrCat("pron EM iteration ", i + 1, " log-likelihood ",
                       result.iteration_loglik[i]));
      }
      WriteLexiconFile(result.lexicon, *out_path);
    });
  }
  {
    auto* sub = app.add_subcommand(
        "lex-prune", "Prune pronunciations by likelihood reduction");
    auto lexicon_path = std::make_shared<std::string>();
    auto evidence_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto report_path = std::make_shared<std::string>();
    auto max_prons = std::make_shared<int>(4);
    auto min_loss = std::make_shared<double>(0.0);
    auto no_refresh = std::make_shared<bool>(false);
    sub->add_option("--lexicon", *lexicon_path, "Estimated lexicon")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--evidence", *evidence_path, "Acoustic evidence file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--max-prons", *max_prons, "Pronunciation cap per word");
    sub->add_option("--min-loss", *min_loss,
                    "Also prune while the cheapest removal loses less");
    sub->add_flag("--no-em-refresh", *no_refresh,
                  "Skip the per-word EM refresh after each removal");
    sub->add_option("--out", *out_path, "Pruned lexicon")->required();
    sub->add_option("--report", *report_path, "Prune report TSV");
    sub->callback([=]() {
      Lexicon lexicon = ReadLexiconFile(*lexicon_path, PronSource::kOrig);
      std::vector<TokenEvidence> evidence =
          ReadEvidenceFile(*evidence_path, lexicon);
      PruneOptions popt;
      popt.max_prons_per_word = *max_prons;
      popt.min_loss = *min_loss;
      popt.em_refresh = !*no_refresh;
      auto [pruned, report] = PruneByLikelihood(lexicon, evidence, popt);
      WriteLexiconFile(pruned, *out_path);
      if (!report_path->empty()) {
        std::ofstream out = OpenOut(*report_path);
        WritePruneReport(report, out);
        out << "# avg_prons_per_word\t"
            << FormatExact(report.avg_prons_per_word) << "\n";
      }
      std::cout << "avg_prons_per_word\t"
                << FormatExact(report.avg_prons_per_word) << "\n";
    });
  }
  {
    auto* sub =
        app.add_subcommand("lex-stats", "Lexicon coverage statistics");
    auto lexicon_path = std::make_shared<std::string>();
    auto corpus_path = std::make_shared<std::string>();
    auto transcripts_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--lexicon", *lexicon_path, "Lexicon")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--corpus", *corpus_path,
                    "Plain text corpus, one sentence per line")
        ->check(CLI::ExistingFile);
    sub->add_option("--transcripts", *transcripts_path,
                    "Transcripts with utterance ids")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", *out_path, "Output file (default stdout)");
    sub->callback([=]() {
      Lexicon lexicon = ReadLexiconFile(*lexicon_path, PronSource::kOrig);
      std::map<std::string, int64> vocab;
      if (!corpus_path->empty()) {
        for (const auto& sentence : ReadCorpus(*corpus_path)) {
          for (const std::string& word : sentence) ++vocab[word];
        }
      }
      if (!transcripts_path->empty()) {
        for (const auto& [utt, words] : ReadTranscriptFile(*transcripts_path)) {
          for (const std::string& word : words) ++vocab[word];
        }
      }
      LexiconStats stats = ComputeLexiconStats(lexicon, vocab);
      if (out_path->empty()) {
        WriteStats(stats, std::cout);
      } else {
        std::ofstream out = OpenOut(*out_path);
        WriteStats(stats, out);
      }
    });
  }
  {
    auto* sub = app.add_subcommand(
        "lex-learn",
        "Full semi-supervised lexicon learning pipeline (G2P, harvest, "
        "merge, estimate, prune)");
    auto knobs = std::make_shared<LexLearnKnobs>();
    auto l0_path = std::make_shared<std::string>();
    auto wordlist_path = std::make_shared<std::string>();
    auto word_ctm = std::make_shared<std::string>();
    auto phone_ctm = std::make_shared<std::string>();
    auto evidence_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto report_path = std::make_shared<std::string>();
    auto stats_path = std::make_shared<std::string>();
    auto g2p_out = std::make_shared<std::string>();
    auto l1_out = std::make_shared<std::string>();
    auto l2_out = std::make_shared<std::string>();
    auto merged_out = std::make_shared<std::string>();
    auto estimated_out = std::make_shared<std::string>();
    sub->add_option("--l0", *l0_path, "Original lexicon")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--wordlist", *wordlist_path,
                    "Corpus vocabulary, one word per line")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--word-ctm", *word_ctm, "Word-level CTM")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--phone-ctm", *phone_ctm, "Phone-level CTM")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--evidence", *evidence_path, "Acoustic evidence file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", *out_path, "Learned lexicon")->required();
    sub->add_option("--report", *report_path, "Prune report TSV");
    sub->add_option("--stats", *stats_path, "Coverage statistics file");
    sub->add_option("--g2p-out", *g2p_out, "Save the trained G2P model");
    sub->add_option("--l1-out", *l1_out, "Save the G2P OOV lexicon");
    sub->add_option("--l2-out", *l2_out, "Save the harvested lexicon");
    sub->add_option("--merged-out", *merged_out, "Save the merged lexicon");
    sub->add_option("--estimated-out", *estimated_out,
                    "Save the estimated lexicon");
    sub->add_option("--order", knobs->g2p_order, "Graphone n-gram order");
    sub->add_option("--maxg", knobs->maxg, "Max letters per graphone");
    sub->add_option("--maxp", knobs->maxp, "Max phones per graphone");
    sub->add_option("--g2p-em-iters", knobs->g2p_em_iters,
                    "G2P EM iterations");
    sub->add_option("--g2p-n", knobs->g2p_n, "G2P pronunciations per word");
    sub->add_option("--min-count", knobs->min_count,
                    "Minimum harvested candidate count");
    sub->add_option("--em-iters", knobs->lex_em_iters,
                    "Pronunciation EM iterations");
    sub->add_option("--max-prons", knobs->max_prons,
                    "Pronunciation cap per word");
    sub->add_option("--min-loss", knobs->min_loss,
                    "Also prune while the cheapest removal loses less");
    sub->add_flag("--no-em-refresh", knobs->no_em_refresh,
                  "Skip the per-word EM refresh after each removal");
    sub->add_option("--jobs", knobs->jobs, "Worker threads");
    sub->callback([=]() {
      Lexicon l0 = ReadLexiconFile(*l0_path, PronSource::kOrig);
      std::vector<std::string> wordlist = ReadWordList(*wordlist_path);
      LexLearnOutputs out =
          RunLexLearn(l0, wordlist, ReadCtmFile(*word_ctm),
                      ReadCtmFile(*phone_ctm), *evidence_path, *knobs);
      WriteLexiconFile(out.learned, *out_path);
      if (!g2p_out->empty()) WriteGraphoneModelFile(out.g2p_model, *g2p_out);
      if (!l1_out->empty()) WriteLexiconFile(out.l1, *l1_out);
      if (!l2_out->empty()) WriteLexiconFile(out.l2, *l2_out);
      if (!merged_out->empty()) WriteLexiconFile(out.merged, *merged_out);
      if (!estimated_out->empty()) {
        WriteLexiconFile(out.estimated, *estimated_out);
      }
      if (!report_path->empty()) {
        std::ofstream rep = OpenOut(*report_path);
        WritePruneReport(out.report, rep);
        rep << "# avg_prons_per_word\t"
            << FormatExact(out.report.avg_prons_per_word) << "\n";
      }
      if (!stats_path->empty()) {
        std::map<std::string, int64> vocab;
        for (const std::string& word : wordlist) ++vocab[word];
        std::ofstream st = OpenOut(*stats_path);
        WriteStats(ComputeLexiconStats(out.learned, vocab), st);
      }
      std::cout << "avg_prons_per_word\t"
                << FormatExact(out.report.avg_prons_per_word) << "\n";
    });
  }

  // ------------------------------------------------------------ semisup
  {
    auto* sub = app.add_subcommand(
        "wmer-score", "Score transcription quality against decode hypotheses");
    auto ref_path = std::make_shared<std::string>();
    auto hyp_path = std::make_shared<std::string>();
    auto durations_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--ref", *ref_path, "Reference transcripts")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--hyp", *hyp_path, "Hypothesis transcripts")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--durations", *durations_path,
                    "Utterance durations in seconds")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", *out_path, "Scores TSV")->required();
    sub->add_option("--jobs", *jobs, "Worker threads");
    sub->callback([=]() {
      std::map<std::string, double> durations;
      if (!durations_path->empty()) durations = ReadDurations(*durations_path);
      CorpusWmer corpus =
          ScoreCorpus(ReadTranscriptFile(*ref_path),
                      ReadTranscriptFile(*hyp_path), durations, *jobs);
      std::ofstream out = OpenOut(*out_path);
      out << "#utterance-id\twmer\tduration\n";
      for (const WmerScore& s : corpus.scores) {
        out << s.utterance_id << '\t' << FormatExact(s.wmer) << '\t'
            << FormatExact(s.duration) << '\n';
      }
      std::cout << "token_weighted_wmer\t" << FormatExact(corpus.token_weighted)
                << "\n";
      std::cout << "duration_weighted_wmer\t"
                << FormatExact(corpus.duration_weighted) << "\n";
    });
  }
  {
    auto* sub = app.add_subcommand(
        "report", "Cumulative duration above WMER thresholds");
    auto scores_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto total_hours = std::make_shared<double>(0.0);
    auto thresholds =
        std::make_shared<std::vector<double>>(std::vector<double>{0, 20, 30, 40});
    sub->add_option("--scores", *scores_path, "Scores TSV from wmer-score")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--total-hours", *total_hours, "Total corpus hours")
        ->required();
    sub->add_option("--thresholds", *thresholds,
                    "Comma-separated WMER percent thresholds")
        ->delimiter(',');
    sub->add_option("--out", *out_path, "Output TSV (default stdout)");
    sub->callback([=]() {
      std::vector<ReportRow> rows =
          CumulativeReport(ReadScores(*scores_path), *thresholds, *total_hours);
      if (out_path->empty()) {
        WriteReport(rows, std::cout);
      } else {
        std::ofstream out = OpenOut(*out_path);
        WriteReport(rows, out);
      }
    });
  }
  {
    auto* sub = app.add_subcommand(
        "partition", "Split utterances into supervised/unsupervised by WMER");
    auto scores_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto removal_path = std::make_shared<std::string>();
    auto tau = std::make_shared<double>(30.0);
    sub->add_option("--scores", *scores_path, "Scores TSV")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--tau", *tau, "WMER percent threshold (strictly above "
                                   "is unsupervised)");
    sub->add_option("--out", *out_path, "Partition TSV")->required();
    sub->add_option("--removal-out", *removal_path,
                    "Write supervised ids (removal-method training list)");
    sub->callback([=]() {
      Partition partition = PartitionByWmer(ReadScores(*scores_path), *tau);
      std::ofstream out = OpenOut(*out_path);
      out << "#utterance-id\tsubset\n";
      for (const std::string& utt : partition.supervised) {
        out << utt << "\tsupervised\n";
      }
      for (const std::string& utt : partition.unsupervised) {
        out << utt << "\tunsupervised\n";
      }
      if (!removal_path->empty()) {
        std::ofstream rem = OpenOut(*removal_path);
        for (const std::string& utt : RemovalFilter(partition)) {
          rem << utt << "\n";
        }
      }
    });
  }
  {
    auto* sub = app.add_subcommand(
        "supervision", "Build phone-level supervision graphs");
    auto lats_path = std::make_shared<std::string>();
    auto lexicon_path = std::make_shared<std::string>();
    auto ref_path = std::make_shared<std::string>();
    auto kind_name = std::make_shared<std::string>("pruned-lattice");
    auto lm_scale = std::make_shared<double>(1.0);
    auto beam = std::make_shared<double>(8.0);
    auto manifest_path = std::make_shared<std::string>();
    auto out_lats = std::make_shared<std::string>();
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--lats", *lats_path, "Decoded word lattices")
        ->check(CLI::ExistingFile);
    sub->add_option("--lexicon", *lexicon_path, "Pronunciation lexicon")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--ref", *ref_path,
                    "Reference transcripts (human-transcript kind)")
        ->check(CLI::ExistingFile);
    sub->add_option("--kind", *kind_name,
                    "best-path | pruned-lattice | human-transcript")
        ->check(CLI::IsMember(
            {"best-path", "pruned-lattice", "human-transcript"}));
    sub->add_option("--lm-scale", *lm_scale, "LM scale");
    sub->add_option("--beam", *beam, "Posterior prune beam (pruned-lattice)");
    sub->add_option("--out-manifest", *manifest_path, "Manifest TSV")
        ->required();
    sub->add_option("--out-lats", *out_lats, "Supervision lattice file")
        ->required();
    sub->add_option("--jobs", *jobs, "Worker threads");
    sub->callback([=]() {
      Lexicon lexicon = ReadLexiconFile(*lexicon_path, PronSource::kOrig);
      std::vector<Supervision> sups;
      if (*kind_name == "human-transcript") {
        if (ref_path->empty()) {
          throw DataError("human-transcript supervision requires --ref");
        }
        TranscriptMap refs = ReadTranscriptFile(*ref_path);
        std::vector<const TranscriptMap::value_type*> items;
        for (const auto& entry : refs) items.push_back(&entry);
        sups = ParallelMap(items.size(), *jobs, [&](std::size_t i) {
          return TranscriptSupervision(items[i]->first, items[i]->second,
                                       lexicon);
        });
      } else {
        if (lats_path->empty()) {
          throw DataError(StrCat(*kind_name, " supervision requires --lats"));
        }
        SupervisionKind kind = *kind_name == "best-path"
                                   ? SupervisionKind::kBestPath
                                   : SupervisionKind::kPrunedLattice;
        std::vector<Lattice> lattices = ReadLatticesSorted(*lats_path);
        sups = ParallelMap(lattices.size(), *jobs, [&](std::size_t i) {
          return BuildSupervision(lattices[i], lexicon, kind, *lm_scale,
                                  *beam);
        });
      }
      std::ofstream manifest = OpenOut(*manifest_path);
      std::ofstream lat_out = OpenOut(*out_lats);
      manifest << "#utterance-id\tkind\tconfidence\tlattice-file-offset\n";
      for (const Supervision& sup : sups) {
        long offset = static_cast<long>(lat_out.tellp());
        WriteLattice(sup.lattice, lat_out);
        manifest << sup.utterance_id << '\t' << SupervisionKindName(sup.kind)
                 << '\t' << FormatExact(sup.confidence) << '\t' << offset
                 << '\n';
      }
    });
  }

  // ------------------------------------------------------------ lattice
  {
    auto* sub = app.add_subcommand("lat-bestpath", "Best path per lattice");
    auto lats_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto lm_scale = std::make_shared<double>(1.0);
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--lats", *lats_path, "Lattice file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--lm-scale", *lm_scale, "LM scale");
    sub->add_option("--out", *out_path, "Hypotheses TSV")->required();
    sub->add_option("--jobs", *jobs, "Worker threads");
    sub->callback([=]() {
      std::vector<Lattice> lattices = ReadLatticesSorted(*lats_path);
      auto rows = ParallelMap(lattices.size(), *jobs, [&](std::size_t i) {
        Path best = BestPath(lattices[i], *lm_scale);
        return StrCat(lattices[i].utterance_id, '\t',
                      FormatExact(best.TotalCost(*lm_scale)), '\t',
                      JoinStrings(PathLabels(lattices[i], best), " "));
      });
      std::ofstream out = OpenOut(*out_path);
      out << "#utterance-id\tcost\twords\n";
      for (const std::string& row : rows) out << row << '\n';
    });
  }
  {
    auto* sub = app.add_subcommand("lat-nbest", "N best label sequences");
    auto lats_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto lm_scale = std::make_shared<double>(1.0);
    auto n = std::make_shared<int>(10);
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--lats", *lats_path, "Lattice file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--n", *n, "Hypotheses per lattice");
    sub->add_option("--lm-scale", *lm_scale, "LM scale");
    sub->add_option("--out", *out_path, "Hypotheses TSV")->required();
    sub->add_option("--jobs", *jobs, "Worker threads");
    sub->callback([=]() {
      std::vector<Lattice> lattices = ReadLatticesSorted(*lats_path);
      auto blocks = ParallelMap(lattices.size(), *jobs, [&](std::size_t i) {
        std::ostringstream os;
        std::vector<Path> paths = NBest(lattices[i], *n, *lm_scale);
        for (std::size_t r = 0; r < paths.size(); ++r) {
          os << lattices[i].utterance_id << '\t' << r + 1 << '\t'
             << FormatExact(paths[r].TotalCost(*lm_scale)) << '\t'
             << JoinStrings(PathLabels(lattices[i], paths[r]), " ") << '\n';
        }
        return os.str();
      });
      std::ofstream out = OpenOut(*out_path);
      out << "#utterance-id\trank\tcost\twords\n";
      for (const std::string& block : blocks) out << block;
    });
  }
  {
    auto* sub = app.add_subcommand("lat-prune", "Posterior-prune lattices");
    auto lats_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto lm_scale = std::make_shared<double>(1.0);
    auto beam = std::make_shared<double>(4.0);
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--lats", *lats_path, "Lattice file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--beam", *beam, "Log-posterior beam");
    sub->add_option("--lm-scale", *lm_scale, "LM scale");
    sub->add_option("--out", *out_path, "Pruned lattice file")->required();
    sub->add_option("--jobs", *jobs, "Worker threads");
    sub->callback([=]() {
      std::vector<Lattice> lattices = ReadLatticesSorted(*lats_path);
      auto pruned = ParallelMap(lattices.size(), *jobs, [&](std::size_t i) {
        return PrunePosterior(lattices[i], *beam, *lm_scale);
      });
      WriteLatticeFile(pruned, *out_path);
    });
  }
  {
    auto* sub = app.add_subcommand(
        "lat-posterior", "Forward-backward arc posteriors");
    auto lats_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto totals_path = std::make_shared<std::string>();
    auto lm_scale = std::make_shared<double>(1.0);
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--lats", *lats_path, "Lattice file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--lm-scale", *lm_scale, "LM scale");
    sub->add_option("--out", *out_path, "Arc posterior TSV")->required();
    sub->add_option("--totals-out", *totals_path,
                    "Per-utterance total log-likelihood TSV");
    sub->add_option("--jobs", *jobs, "Worker threads");
    sub->callback([=]() {
      std::vector<Lattice> lattices = ReadLatticesSorted(*lats_path);
      auto results = ParallelMap(lattices.size(), *jobs, [&](std::size_t i) {
        return ForwardBackward(lattices[i], *lm_scale);
      });
      std::ofstream out = OpenOut(*out_path);
      out << "#utterance-id\tarc\tsrc\tdst\tlabel\tposterior\n";
      for (std::size_t i = 0; i < lattices.size(); ++i) {
        const Lattice& lattice = lattices[i];
        for (std::size_t a = 0; a < lattice.arcs.size(); ++a) {
          const LatticeArc& arc = lattice.arcs[a];
          out << lattice.utterance_id << '\t' << a << '\t'
              << lattice.nodes[arc.src].id << '\t' << lattice.nodes[arc.dst].id
              << '\t' << arc.label << '\t'
              << FormatExact(results[i].arc_posterior[a]) << '\n';
        }
      }
      if (!totals_path->empty()) {
        std::ofstream totals = OpenOut(*totals_path);
        totals << "#utterance-id\ttotal-log-likelihood\n";
        for (std::size_t i = 0; i < lattices.size(); ++i) {
          totals << lattices[i].utterance_id << '\t'
                 << FormatExact(results[i].total_log_likelihood) << '\n';
        }
      }
    });
  }
  {
    auto* sub = app.add_subcommand(
        "lat-w2p", "Expand word lattices to phone lattices");
    auto lats_path = std::make_shared<std::string>();
    auto lexicon_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--lats", *lats_path, "Word lattice file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--lexicon", *lexicon_path, "Pronunciation lexicon")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", *out_path, "Phone lattice file")->required();
    sub->add_option("--jobs", *jobs, "Worker threads");
    sub->callback([=]() {
      Lexicon lexicon = ReadLexiconFile(*lexicon_path, PronSource::kOrig);
      std::vector<Lattice> lattices = ReadLatticesSorted(*lats_path);
      auto phones = ParallelMap(lattices.size(), *jobs, [&](std::size_t i) {
        return WordToPhone(lattices[i], lexicon);
      });
      WriteLatticeFile(phones, *out_path);
    });
  }

  // -------------------------------------------------------------- ngram
  {
    auto* sub = app.add_subcommand("ngram-train",
                                   "Train a backoff n-gram language model");
    auto corpus_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto order = std::make_shared<int>(4);
    auto smoothing = std::make_shared<std::string>("witten-bell");
    auto discount = std::make_shared<double>(0.5);
    sub->add_option("--corpus", *corpus_path,
                    "Training text, one sentence per line")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--order", *order, "Model order");
    sub->add_option("--smoothing", *smoothing,
                    "witten-bell | absolute-discount")
        ->check(CLI::IsMember({"witten-bell", "absolute-discount"}));
    sub->add_option("--discount", *discount,
                    "Absolute discount constant in (0,1)");
    sub->add_option("--out", *out_path, "Output ARPA file")->required();
    sub->callback([=]() {
      SmoothingConfig config;
      config.method = *smoothing == "witten-bell"
                          ? SmoothingConfig::kWittenBell
                          : SmoothingConfig::kAbsoluteDiscount;
      config.discount = *discount;
      NgramModel model =
          EstimateNgramModel(CountNgrams(ReadCorpus(*corpus_path), *order),
                             config);
      WriteArpaFile(model, *out_path);
    });
  }
  {
    auto* sub = app.add_subcommand("ngram-score",
                                   "Score text with an ARPA model");
    auto arpa_path = std::make_shared<std::string>();
    auto text_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    sub->add_option("--arpa", *arpa_path, "ARPA model")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--text", *text_path, "Text, one sentence per line")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", *out_path, "Per-sentence scores TSV");
    sub->callback([=]() {
      NgramModel model = ReadArpaFile(*arpa_path);
      std::vector<std::vector<std::string>> corpus = ReadCorpus(*text_path);
      double total = 0.0;
      int64 tokens = 0;
      std::ostringstream rows;
      rows << "#sentence\tlog10prob\ttokens\n";
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        double logp = model.SequenceLogProb10(corpus[i]);
        total += logp;
        tokens += static_cast<int64>(corpus[i].size()) + 1;  // + </s>
        rows << i + 1 << '\t' << FormatExact(logp) << '\t' << corpus[i].size()
             << '\n';
      }
      if (!out_path->empty()) {
        std::ofstream out = OpenOut(*out_path);
        out << rows.str();
      }
      std::cout << "total_log10prob\t" << FormatExact(total) << "\n";
      if (tokens > 0) {
        std::cout << "perplexity\t"
                  << FormatExact(std::pow(10.0, -total /
                                                    static_cast<double>(tokens)))
                  << "\n";
      }
    });
  }

  // ------------------------------------------------------------ rescore
  {
    auto* sub = app.add_subcommand("rescore-nbest",
                                   "Rescore n-best hypotheses with an LM");
    auto lats_path = std::make_shared<std::string>();
    auto lm_spec = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto n = std::make_shared<int>(10);
    auto mu = std::make_shared<double>(0.5);
    auto ascale = std::make_shared<double>(1.0);
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--lats", *lats_path, "Lattice file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--lm", *lm_spec, "Scorer, e.g. arpa:<path>")->required();
    sub->add_option("--n", *n, "Hypotheses per lattice");
    sub->add_option("--mu", *mu, "Scorer interpolation weight in [0,1]");
    sub->add_option("--ascale", *ascale, "Acoustic scale");
    sub->add_option("--out", *out_path, "Hypotheses TSV")->required();
    sub->add_option("--jobs", *jobs, "Worker threads");
    sub->callback([=]() {
      std::unique_ptr<LmScorer> scorer = MakeScorer(*lm_spec);
      RescoreConfig config;
      config.mu = *mu;
      config.acoustic_scale = *ascale;
      std::vector<Lattice> lattices = ReadLatticesSorted(*lats_path);
      auto blocks = ParallelMap(lattices.size(), *jobs, [&](std::size_t i) {
        std::ostringstream os;
        std::vector<RescoredHyp> hyps =
            NbestRescore(lattices[i], *scorer, config, *n);
        for (std::size_t r = 0; r < hyps.size(); ++r) {
          os << lattices[i].utterance_id << '\t' << r + 1 << '\t'
             << FormatExact(hyps[r].combined_cost) << '\t'
             << JoinStrings(hyps[r].words, " ") << '\n';
        }
        return os.str();
      });
      std::ofstream out = OpenOut(*out_path);
      out << "#utterance-id\trank\tcombined-cost\twords\n";
      for (const std::string& block : blocks) out << block;
    });
  }
  {
    auto* sub = app.add_subcommand(
        "rescore-lattice", "Rescore whole lattices by LM state expansion");
    auto lats_path = std::make_shared<std::string>();
    auto lm_spec = std::make_shared<std::string>();
    auto out_lats = std::make_shared<std::string>();
    auto out_best = std::make_shared<std::string>();
    auto mu = std::make_shared<double>(0.5);
    auto ascale = std::make_shared<double>(1.0);
    auto beam = std::make_shared<double>(10.0);
    auto max_states = std::make_shared<int>(64);
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--lats", *lats_path, "Lattice file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--lm", *lm_spec, "Scorer, e.g. arpa:<path>")->required();
    sub->add_option("--mu", *mu, "Scorer interpolation weight in [0,1]");
    sub->add_option("--ascale", *ascale, "Acoustic scale");
    sub->add_option("--beam", *beam, "Expansion beam (log units)");
    sub->add_option("--max-states", *max_states,
                    "Expanded states per lattice node");
    sub->add_option("--out-lats", *out_lats, "Rescored lattice file")
        ->required();
    sub->add_option("--out-best", *out_best, "Best path TSV");
    sub->add_option("--jobs", *jobs, "Worker threads");
    sub->callback([=]() {
      std::unique_ptr<LmScorer> scorer = MakeScorer(*lm_spec);
      RescoreConfig config;
      config.mu = *mu;
      config.acoustic_scale = *ascale;
      config.beam = *beam;
      config.max_states_per_node = *max_states;
      std::vector<Lattice> lattices = ReadLatticesSorted(*lats_path);
      auto results = ParallelMap(lattices.size(), *jobs, [&](std::size_t i) {
        return LatticeRescore(lattices[i], *scorer, config);
      });
      std::vector<Lattice> rescored;
      rescored.reserve(results.size());
      for (const LatticeRescoreResult& r : results) {
        rescored.push_back(r.lattice);
        if (r.beamed) {
          LogWarn(StrCat("lattice ", r.lattice.utterance_id,
                         " was beamed during rescoring"));
        }
      }
      WriteLatticeFile(rescored, *out_lats);
      if (!out_best->empty()) {
        std::ofstream out = OpenOut(*out_best);
        out << "#utterance-id\trank\tcombined-cost\twords\n";
        for (const LatticeRescoreResult& r : results) {
          double cost = config.acoustic_scale * r.best_path.acoustic_cost +
                        r.best_path.graph_cost + r.best_path.final_cost;
          out << r.lattice.utterance_id << "\t1\t" << FormatExact(cost) << '\t'
              << JoinStrings(PathLabels(r.lattice, r.best_path), " ") << '\n';
        }
      }
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const DataError& e) {
    std::cerr << "css-curate ERROR: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "css-curate ERROR: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace csc

int main(int argc, char** argv) { return csc::Run(argc, argv); }
