#include <gtest/gtest.h>

#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include "scratch.hpp"

using essc::testing::ScratchDir;
using essc::testing::slurp;
using essc::testing::spit;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(ESSC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kTinyConfig =
    R"({"seed":4,"train":{"per_class":30},"test":{"per_class":12,"snr_db":[25]},)"
    R"("ann":{"hidden_sizes":[3],"cycles":1,"max_epochs":40}})";

}  // namespace

TEST(Cli, UnknownSubcommandOrFlagIsValidationError) {
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("generate --no-such-flag"), 2);
  EXPECT_EQ(run("generate --mode sscc"), 2);
  EXPECT_EQ(run("generate --pulse square"), 2);
  EXPECT_EQ(run("generate --seed -3"), 2);
  EXPECT_EQ(run("evaluate --snr-db 25,abc"), 2);
}

TEST(Cli, InvalidConfigIsValidationError) {
  ScratchDir d;
  spit(d.path() / "bad.json", R"({"train":{"snr_db":20}})");
  EXPECT_EQ(run("generate --config " + (d.path() / "bad.json").string() + " --out " + (d.path() / "o").string()), 2);
  EXPECT_EQ(run("generate --config " + (d.path() / "missing.json").string()), 2);
}

TEST(Cli, MissingInputIsRuntimeError) {
  ScratchDir d;
  EXPECT_EQ(run("train --out " + d.path().string()), 3);
}

TEST(Cli, TinyPipeline) {
  ScratchDir d;
  const auto cfg = d.path() / "tiny.json";
  spit(cfg, kTinyConfig);
  const std::string common = " --config " + cfg.string() + " --out " + (d.path() / "run").string();
  for (const char* sub : {"generate", "train", "evaluate", "sensitivity", "relieff", "report"})
    ASSERT_EQ(run(std::string(sub) + common + " --pulse gaussian --seed 9"), 0) << sub;
  EXPECT_NE(slurp(d.path() / "run" / "accuracy.csv").find("pulse=gaussian"), std::string::npos);
  EXPECT_NE(slurp(d.path() / "run" / "accuracy.csv").find("seed=9"), std::string::npos);
  EXPECT_EQ(run("verify --out " + (d.path() / "run").string()), 0);
}
