#include <support/test_support.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

using namespace binviz;
using binviz::testing::ScratchDir;

namespace {

struct Run {
  int code;
  std::string output;
};

/// Runs the binviz binary with the given argument string; output merges stderr.
Run binviz_cli(const std::string& args, const ScratchDir& dir) {
  const auto log = dir / "cli.log";
  const std::string cmd = shell_quote(BINVIZ_CLI_PATH) + " " + args + " > " + shell_quote(log.string()) + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, binviz::testing::read_string(log)};
}

std::string q(const fs::path& p) { return shell_quote(p.string()); }

}  // namespace

TEST(Cli, HelpExitsZero) {
  ScratchDir dir;
  auto r = binviz_cli("--help", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("convert"), std::string::npos);
}

TEST(Cli, MissingLabelFileIsUsageError) {
  ScratchDir dir;
  fs::create_directories(dir / "corpus");
  auto r = binviz_cli("convert --root " + q(dir / "corpus") + " --labels " + q(dir / "nope.csv") + " --out " +
                          q(dir / "out"),
                      dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("nope.csv"), std::string::npos) << r.output;
}

TEST(Cli, UnknownNoiseKindIsRejected) {
  ScratchDir dir;
  auto labels = binviz::testing::make_corpus(dir / "corpus", {"a", "b"}, 2);
  ASSERT_EQ(binviz_cli("convert --root " + q(dir / "corpus") + " --labels " + q(labels) + " --out " + q(dir / "c") +
                           " --resize 16x16",
                       dir)
                .code,
            0);
  auto r = binviz_cli("augment --manifest " + q(dir / "c/manifest.jsonl") + " --out " + q(dir / "a") +
                          " --noise speckle:0.2",
                      dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("speckle"), std::string::npos) << r.output;
}

TEST(Cli, EndToEnd) {
  ScratchDir dir;
  auto labels = binviz::testing::make_corpus(dir / "corpus", {"a", "b"}, 5);
  auto r = binviz_cli("-j 2 convert --root " + q(dir / "corpus") + " --labels " + q(labels) + " --out " +
                          q(dir / "conv") + " --resize 32x32 --width 64",
                      dir);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_manifest(dir / "conv/manifest.jsonl").entries.size(), 10u);

  r = binviz_cli("augment --manifest " + q(dir / "conv/manifest.jsonl") + " --out " + q(dir / "aug") +
                     " --noise all:0.2 --seed 7 --channels 0,1",
                 dir);
  ASSERT_EQ(r.code, 0) << r.output;
  auto aug = read_manifest(dir / "aug/manifest.jsonl");
  EXPECT_EQ(aug.entries.size(), 40u);
  for (const auto& e : aug.entries) {
    if (e.lineage) {
      EXPECT_EQ(e.lineage->seed, 7u);
      EXPECT_EQ(e.lineage->channels, ChannelMask{0b011});
    }
  }

  binviz::testing::write_string(dir / "plan.json", R"({"seed": 3, "noise": ["gaussian:0.1", "laplace:0.3"]})");
  r = binviz_cli("augment --manifest " + q(dir / "conv/manifest.jsonl") + " --out " + q(dir / "plan") + " --plan " +
                     q(dir / "plan.json"),
                 dir);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_manifest(dir / "plan/manifest.jsonl").entries.size(), 30u);

  r = binviz_cli("split --manifest " + q(dir / "aug/manifest.jsonl") + " --fraction 0.6 --out " + q(dir / "split"), dir);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_manifest(dir / "split/test.jsonl").entries.size(), 16u);

  r = binviz_cli("stats --manifest " + q(dir / "aug/manifest.jsonl"), dir);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("40 (10 original, 30 augmented)"), std::string::npos) << r.output;

  binviz::testing::write_string(dir / "p.csv", "sample_id,true_label,predicted_label\nx,a,a\ny,b,a\n");
  r = binviz_cli("score --manifest " + q(dir / "conv/manifest.jsonl") + " --predictions " + q(dir / "p.csv") +
                     " --json " + q(dir / "r.json"),
                 dir);
  ASSERT_EQ(r.code, 0) << r.output;
  auto j = nlohmann::json::parse(binviz::testing::read_string(dir / "r.json"));
  EXPECT_EQ(j["accuracy"], 0.5);

  binviz::testing::write_string(dir / "bad.csv", "sample_id,true_label,predicted_label\nx,a,zebra\n");
  r = binviz_cli("score --manifest " + q(dir / "conv/manifest.jsonl") + " --predictions " + q(dir / "bad.csv"), dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("zebra"), std::string::npos) << r.output;

  r = binviz_cli("sweep --manifest " + q(dir / "conv/manifest.jsonl") + " --trainer " +
                     q(shell_quote(BINVIZ_STUB_TRAINER_PATH)) + " --work " + q(dir / "sweep") +
                     " --ratios 0.2,0.4 --kinds poisson,gaussian",
                 dir);
  ASSERT_EQ(r.code, 0) << r.output;
  auto csv = binviz::testing::read_string(dir / "sweep/results.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "ratio,original,poisson,gaussian");
  EXPECT_EQ(csv.find("failed"), std::string::npos) << csv;
}
