// tests/cli-test.cc

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

// End-to-end checks against the installed css-curate binary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const char* kCli = CSC_CLI_PATH;

fs::path MakeTempDir(const std::string& tag) {
  fs::path dir = fs::current_path() / ("cli-test-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int Run(const std::string& args) {
  std::string cmd = std::string(kCli) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

int RunCapture(const std::string& args, const fs::path& stdout_path) {
  std::string cmd = std::string(kCli) + " " + args + " > " +
                    stdout_path.string() + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("every subcommand answers --help with status 0") {
  for (const char* sub :
       {"g2p-train", "g2p-apply", "lex-harvest", "lex-merge", "lex-estimate",
        "lex-prune", "lex-stats", "lex-learn", "wmer-score", "report",
        "partition", "supervision", "lat-bestpath", "lat-nbest", "lat-prune",
        "lat-posterior", "lat-w2p", "ngram-train", "ngram-score",
        "rescore-nbest", "rescore-lattice"}) {
    CHECK(Run(std::string(sub) + " --help") == 0);
  }
  CHECK(Run("--help") == 0);
}

TEST_CASE("usage errors exit 2, data errors exit 1") {
  fs::path dir = MakeTempDir("exits");
  CHECK(Run("no-such-subcommand") == 2);
  CHECK(Run("report") == 2);  // missing required options
  CHECK(Run("report --scores " + (dir / "absent.tsv").string() +
            " --total-hours 1") == 2);  // validation: file must exist
  WriteFile(dir / "bad.tsv", "u1 nonsense 3600\n");
  CHECK(Run("partition --scores " + (dir / "bad.tsv").string() +
            " --tau 30 --out " + (dir / "p.tsv").string()) == 1);
  // No partial output on the failed run.
  CHECK(ReadFile(dir / "p.tsv").empty());
}

TEST_CASE("wmer-score of a corpus against itself reports zero") {
  fs::path dir = MakeTempDir("wmer0");
  WriteFile(dir / "r.txt", "u1 hello there\nu2 one two three\n");
  fs::path out = dir / "scores.tsv";
  fs::path stdout_path = dir / "stdout.txt";
  CHECK(RunCapture("wmer-score --ref " + (dir / "r.txt").string() + " --hyp " +
                       (dir / "r.txt").string() + " --out " + out.string(),
                   stdout_path) == 0);
  std::string agg = ReadFile(stdout_path);
  CHECK(agg.find("token_weighted_wmer\t0\n") != std::string::npos);
  std::string scores = ReadFile(out);
  CHECK(scores.find("u1\t0\t") != std::string::npos);
  CHECK(scores.find("u2\t0\t") != std::string::npos);
}

TEST_CASE("report reproduces the published cumulative percentages") {
  fs::path dir = MakeTempDir("report");
  std::ostringstream scores;
  scores << "u1\t0.10\t" << 52.97 * 3600 << "\n"
         << "u2\t0.25\t" << 7.22 * 3600 << "\n"
         << "u3\t0.35\t" << 3.03 * 3600 << "\n"
         << "u4\t0.45\t" << 3.96 * 3600 << "\n";
  WriteFile(dir / "scores.tsv", scores.str());
  fs::path out = dir / "report.tsv";
  CHECK(Run("report --scores " + (dir / "scores.tsv").string() +
            " --total-hours 101.1 --thresholds 0,20,30,40 --out " +
            out.string()) == 0);
  CHECK(ReadFile(out) ==
        "#threshold\thours\tpercent\n"
        "0\t67.18\t66.45\n"
        "20\t14.21\t14.06\n"
        "30\t6.99\t6.91\n"
        "40\t3.96\t3.92\n");
}

TEST_CASE("partition keeps an exact-threshold utterance supervised") {
  fs::path dir = MakeTempDir("boundary");
  WriteFile(dir / "scores.tsv", "edge\t0.3\t100\nover\t0.31\t100\n");
  fs::path out = dir / "part.tsv";
  CHECK(Run("partition --scores " + (dir / "scores.tsv").string() +
            " --tau 30 --out " + out.string()) == 0);
  CHECK(ReadFile(out) ==
        "#utterance-id\tsubset\nedge\tsupervised\nover\tunsupervised\n");
}

namespace {

// Small but complete pipeline fixture: three-word lexicon, two utterances
// of decodes, evidence favoring an adapted pronunciation.
void WritePipelineFixture(const fs::path& dir) {
  WriteFile(dir / "l0.lex",
            "three\t1.0\tth_en r_en iy_en\n"
            "tree\t1.0\tt_en r_en iy_en\n"
            "we\t1.0\tw_en iy_en\n"
            "see\t1.0\ts_en iy_en\n"
            "tha\t1.0\tth_en ah_en\n"
            "ra\t1.0\tr_en ah_en\n"
            "sa\t1.0\ts_en ah_en\n"
            "wa\t1.0\tw_en ah_en\n");
  WriteFile(dir / "words.txt", "three\ntree\nwe\nsee\ntha\nra\nsa\nwa\nsee\n");
  std::ostringstream words, phones, evidence;
  for (int i = 0; i < 4; ++i) {
    std::string utt = "utt0" + std::to_string(i);
    words << utt << " 1 0.0 0.6 three\n" << utt << " 1 0.6 0.4 we\n";
    // three realized as "t r iy" in every decode
    phones << utt << " 1 0.0 0.2 t_en\n"
           << utt << " 1 0.2 0.2 r_en\n"
           << utt << " 1 0.4 0.2 iy_en\n"
           << utt << " 1 0.6 0.2 w_en\n"
           << utt << " 1 0.8 0.2 iy_en\n";
    // merged entry order for "three": ORIG th.. = 0, harvested t.. = 1
    evidence << utt << "\tthree\t0\t-2\n" << utt << "\tthree\t1\t0\n";
  }
  WriteFile(dir / "word.ctm", words.str());
  WriteFile(dir / "phone.ctm", phones.str());
  WriteFile(dir / "ev.tsv", evidence.str());
}

std::string LexLearnArgs(const fs::path& dir, const fs::path& out,
                         const fs::path& report, int jobs) {
  return "lex-learn --l0 " + (dir / "l0.lex").string() + " --wordlist " +
         (dir / "words.txt").string() + " --word-ctm " +
         (dir / "word.ctm").string() + " --phone-ctm " +
         (dir / "phone.ctm").string() + " --evidence " +
         (dir / "ev.tsv").string() + " --min-count 2 --em-iters 15 " +
         "--max-prons 2 --out " + out.string() + " --report " +
         report.string() + " --jobs " + std::to_string(jobs);
}

}  // namespace

TEST_CASE("lex-learn equals chaining the individual subcommands") {
  fs::path dir = MakeTempDir("compose");
  WritePipelineFixture(dir);

  fs::path composite = dir / "learned.lex";
  fs::path composite_report = dir / "learned.report";
  CHECK(RunCapture(LexLearnArgs(dir, composite, composite_report, 1) +
                       " --g2p-out " + (dir / "g2p.mdl").string(),
                   dir / "out1.txt") == 0);

  // Chain the stages by hand through intermediate files.
  auto path = [&](const char* name) { return (dir / name).string(); };
  CHECK(Run("g2p-train --lexicon " + path("l0.lex") + " --out " +
            path("g2p2.mdl")) == 0);
  CHECK(Run("g2p-apply --model " + path("g2p2.mdl") + " --words " +
            path("words.txt") + " --base " + path("l0.lex") + " --n 5 --out " +
            path("l1.lex")) == 0);
  CHECK(Run("lex-harvest --word-ctm " + path("word.ctm") + " --phone-ctm " +
            path("phone.ctm") + " --min-count 2 --out " + path("l2.lex")) ==
        0);
  CHECK(Run("lex-merge --l0 " + path("l0.lex") + " --l1 " + path("l1.lex") +
            " --l2 " + path("l2.lex") + " --out " + path("merged.lex")) == 0);
  CHECK(Run("lex-estimate --lexicon " + path("merged.lex") + " --evidence " +
            path("ev.tsv") + " --em-iters 15 --out " + path("est.lex")) == 0);
  CHECK(RunCapture("lex-prune --lexicon " + path("est.lex") + " --evidence " +
                       path("ev.tsv") + " --max-prons 2 --out " +
                       path("chained.lex") + " --report " +
                       path("chained.report"),
                   dir / "out2.txt") == 0);

  CHECK(ReadFile(composite) == ReadFile(dir / "chained.lex"));
  CHECK(ReadFile(composite_report) == ReadFile(dir / "chained.report"));
  // The G2P models agree too.
  CHECK(ReadFile(dir / "g2p.mdl") == ReadFile(dir / "g2p2.mdl"));
}

TEST_CASE("repeated runs and different job counts are byte-identical") {
  fs::path dir = MakeTempDir("determinism");
  WritePipelineFixture(dir);
  for (int round = 0; round < 2; ++round) {
    for (int jobs : {1, 8}) {
      fs::path out = dir / ("learned." + std::to_string(round) + "." +
                            std::to_string(jobs));
      fs::path report = dir / ("report." + std::to_string(round) + "." +
                               std::to_string(jobs));
      CHECK(RunCapture(LexLearnArgs(dir, out, report, jobs),
                       dir / "stdout.tmp") == 0);
    }
  }
  std::string lex = ReadFile(dir / "learned.0.1");
  std::string report = ReadFile(dir / "report.0.1");
  CHECK(!lex.empty());
  for (const char* suffix : {"0.8", "1.1", "1.8"}) {
    CHECK(ReadFile(dir / ("learned." + std::string(suffix))) == lex);
    CHECK(ReadFile(dir / ("report." + std::string(suffix))) == report);
  }
}

TEST_CASE("the learned lexicon adopts the accented pronunciation") {
  fs::path dir = MakeTempDir("accent");
  WritePipelineFixture(dir);
  fs::path out = dir / "learned.lex";
  CHECK(RunCapture(LexLearnArgs(dir, out, dir / "r.tsv", 1),
                   dir / "stdout.txt") == 0);
  std::string learned = ReadFile(out);
  // The realized variant dominates; evidence favored it on every token.
  CHECK(learned.find("three\t1\tt_en r_en iy_en") != std::string::npos);
}

TEST_CASE("lattice commands agree across job counts and reruns") {
  fs::path dir = MakeTempDir("lat");
  std::ostringstream lats;
  for (int i = 0; i < 12; ++i) {
    std::string utt = "utt" + std::to_string(i);
    lats << "UTT " << utt << "\n"
         << "N 0 0\nN 1 0.5\nN 2 1\n"
         << "A 0 1 tree 1.0 0." << (i % 7) << "\n"
         << "A 0 1 we 1.2 0.1\n"
         << "A 1 2 see 0.5 0.2\n"
         << "A 1 2 we 0." << (i % 5) << " 0.3\n"
         << "F 2 0\n\n";
  }
  WriteFile(dir / "in.lats", lats.str());
  WriteFile(dir / "lm.txt", "tree we\nwe see\ntree tree we\nsee we\n");
  CHECK(Run("ngram-train --corpus " + (dir / "lm.txt").string() +
            " --order 2 --out " + (dir / "lm.arpa").string()) == 0);

  auto run_all = [&](const std::string& tag, int jobs) {
    std::string j = " --jobs " + std::to_string(jobs);
    std::string in = (dir / "in.lats").string();
    CHECK(Run("lat-bestpath --lats " + in + " --out " +
              (dir / ("bp." + tag)).string() + j) == 0);
    CHECK(Run("lat-nbest --lats " + in + " --n 4 --out " +
              (dir / ("nb." + tag)).string() + j) == 0);
    CHECK(Run("lat-prune --lats " + in + " --beam 0.5 --out " +
              (dir / ("pr." + tag)).string() + j) == 0);
    CHECK(Run("lat-posterior --lats " + in + " --out " +
              (dir / ("po." + tag)).string() + j) == 0);
    CHECK(Run("rescore-nbest --lats " + in + " --lm arpa:" +
              (dir / "lm.arpa").string() + " --n 4 --out " +
              (dir / ("rn." + tag)).string() + j) == 0);
    CHECK(Run("rescore-lattice --lats " + in + " --lm arpa:" +
              (dir / "lm.arpa").string() + " --out-lats " +
              (dir / ("rl." + tag)).string() + " --out-best " +
              (dir / ("rb." + tag)).string() + j) == 0);
  };
  run_all("a", 1);
  run_all("b", 8);
  run_all("c", 1);
  for (const char* prefix : {"bp", "nb", "pr", "po", "rn", "rb", "rl"}) {
    std::string a = ReadFile(dir / (std::string(prefix) + ".a"));
    CHECK(!a.empty());
    CHECK(ReadFile(dir / (std::string(prefix) + ".b")) == a);
    CHECK(ReadFile(dir / (std::string(prefix) + ".c")) == a);
  }
}

TEST_CASE("supervision manifest offsets point at lattice blocks") {
  fs::path dir = MakeTempDir("sup");
  WriteFile(dir / "lex.lex",
            "a\t1.0\ta_en\nb\t0.6\tb_en\nb\t0.4\tbb_en b_en\n");
  WriteFile(dir / "in.lats",
            "UTT u2\nN 0 0\nN 1 1\nA 0 1 a 1 0\nA 0 1 b 2 0\nF 1 0\n\n"
            "UTT u1\nN 0 0\nN 1 1\nA 0 1 b 1 0\nF 1 0\n\n");
  fs::path manifest = dir / "man.tsv";
  fs::path out_lats = dir / "sup.lats";
  CHECK(Run("supervision --lats " + (dir / "in.lats").string() +
            " --lexicon " + (dir / "lex.lex").string() +
            " --kind pruned-lattice --beam 10 --out-manifest " +
            manifest.string() + " --out-lats " + out_lats.string()) == 0);
  std::string man = ReadFile(manifest);
  // Sorted by utterance id regardless of input order.
  CHECK(man.find("u1\t") < man.find("u2\t"));
  // Offsets point at the start of each block in the lattice file.
  std::string lats = ReadFile(out_lats);
  std::istringstream man_in(man);
  std::string line;
  std::getline(man_in, line);  // header
  while (std::getline(man_in, line)) {
    std::size_t tab = line.rfind('\t');
    long offset = std::stol(line.substr(tab + 1));
    CHECK(lats.compare(offset, 4, "UTT ") == 0);
  }

  // human-transcript kind from references
  WriteFile(dir / "ref.txt", "u1 a b\nu2 b\n");
  CHECK(Run("supervision --ref " + (dir / "ref.txt").string() + " --lexicon " +
            (dir / "lex.lex").string() +
            " --kind human-transcript --out-manifest " +
            (dir / "man2.tsv").string() + " --out-lats " +
            (dir / "sup2.lats").string()) == 0);
  std::string man2 = ReadFile(dir / "man2.tsv");
  CHECK(man2.find("u1\thuman-transcript\t1\t") != std::string::npos);
}

TEST_CASE("config files provide defaults that flags override") {
  fs::path dir = MakeTempDir("config");
  WriteFile(dir / "scores.tsv", "u1\t0.50\t3600\nu2\t0.10\t3600\n");
  WriteFile(dir / "report.cfg",
            "[report]\nscores=" + (dir / "scores.tsv").string() + "\n" +
                "total-hours=2\nthresholds=0,30\n");
  fs::path out1 = dir / "r1.txt";
  CHECK(RunCapture("--config " + (dir / "report.cfg").string() + " report",
                   out1) == 0);
  CHECK(ReadFile(out1).find("30\t1.00\t50.00") != std::string::npos);
  // Flag wins over the config value.
  fs::path out2 = dir / "r2.txt";
  CHECK(RunCapture("--config " + (dir / "report.cfg").string() +
                       " report --total-hours 4",
                   out2) == 0);
  CHECK(ReadFile(out2).find("30\t1.00\t25.00") != std::string::npos);
}

TEST_CASE("ngram-train and ngram-score round-trip through ARPA") {
  fs::path dir = MakeTempDir("ngram");
  WriteFile(dir / "corpus.txt", "a b c\nb c a\na a b\n");
  fs::path arpa = dir / "lm.arpa";
  CHECK(Run("ngram-train --corpus " + (dir / "corpus.txt").string() +
            " --order 3 --out " + arpa.string()) == 0);
  WriteFile(dir / "test.txt", "a b\nc c unknown-word\n");
  fs::path stdout_path = dir / "score.txt";
  CHECK(RunCapture("ngram-score --arpa " + arpa.string() + " --text " +
                       (dir / "test.txt").string() + " --out " +
                       (dir / "scores.tsv").string(),
                   stdout_path) == 0);
  CHECK(ReadFile(stdout_path).find("perplexity\t") != std::string::npos);
  std::string scores = ReadFile(dir / "scores.tsv");
  CHECK(scores.find("#sentence\tlog10prob\ttokens\n") == 0);
}
