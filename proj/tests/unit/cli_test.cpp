/*
 * Copyright 2026 The fuzzqe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "fuzzqe/knowledge_graph.hpp"
#include "toy.hpp"

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(FUZZQE_BIN) + " " + args + " 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  Outcome r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe.release());
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fuzzqe::testing::TempDir("fzqe_cli");
    ASSERT_EQ(run("synth-kg --clusters 10 --out " + q(kg())).code, 0);
    std::ofstream(dir_->path() / "gen.json") << R"({"gen":{"seed":5,"counts":{
      "train":{"1p":100,"2p":100,"2in":100},
      "valid":{"1p":30,"2p":30},
      "test":{"1p":30,"2p":30,"pni":20}}}})";
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::filesystem::path kg() { return dir_->path() / "kg"; }
  static std::filesystem::path path(const std::string& name) { return dir_->path() / name; }

  static fuzzqe::testing::TempDir* dir_;
};

fuzzqe::testing::TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, UsageAndConfigErrorsExitOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("verify bogus").code, 1);
  std::ofstream(path("bad.json")) << R"({"model":{"dimension":3}})";
  const Outcome r = run("train --config " + q(path("bad.json")) + " --kg " + q(kg()) +
                    " --queries x --out " + q(path("never")));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("model.dimension"), std::string::npos);
}

TEST_F(Cli, MissingGraphNamesThePath) {
  const Outcome r = run("gen-queries --kg /no/such/graph --out " + q(path("gen_missing")));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("/no/such/graph"), std::string::npos);
}

TEST_F(Cli, GenerationIsReproducible) {
  const std::string args = "gen-queries --config " + q(path("gen.json")) + " --kg " + q(kg());
  ASSERT_EQ(run(args + " --out " + q(path("q1"))).code, 0);
  ASSERT_EQ(run(args + " --out " + q(path("q2")) + " --threads 2").code, 0);
  for (const auto& e : std::filesystem::directory_iterator(path("q1"))) {
    if (e.path().filename() == "resolved_config.json") continue;
    EXPECT_EQ(slurp(e.path()), slurp(path("q2") / e.path().filename())) << e.path();
  }
  const auto manifest = nlohmann::json::parse(slurp(path("q1") / "manifest.json"));
  EXPECT_EQ(manifest["splits"]["train"]["2p"]["requested"], 100);
  EXPECT_EQ(manifest["splits"]["train"]["2p"]["achieved"], 100);
  EXPECT_TRUE(std::filesystem::exists(path("q1") / "resolved_config.json"));
}

TEST_F(Cli, TrainEvalAnswerPipeline) {
  const std::string gen = "gen-queries --config " + q(path("gen.json")) + " --kg " + q(kg()) +
                          " --out " + q(path("qp"));
  ASSERT_EQ(run(gen).code, 0);
  const std::string train = "train --kg " + q(kg()) + " --queries " + q(path("qp")) +
                            " --dim 8 --bases 2 --batch-size 16 --k-neg 8 --max-steps 60"
                            " --eval-every 20 --lr 0.01 --structures 1p,2p,2in --out ";
  ASSERT_EQ(run(train + q(path("run"))).code, 0);
  const Outcome again = run(train + q(path("run_again")));
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(slurp(path("run") / "last.ckpt"), slurp(path("run_again") / "last.ckpt"));

  const auto resolved = nlohmann::json::parse(slurp(path("run") / "resolved_config.json"));
  EXPECT_EQ(resolved["model"]["d"], 8);
  EXPECT_EQ(resolved["train"]["patience_steps"], 60);

  const Outcome eval = run("eval --checkpoint " + q(path("run") / "best.ckpt") + " --queries " +
                       q(path("qp")) + " --out " + q(path("ev")));
  ASSERT_EQ(eval.code, 0) << eval.out;
  EXPECT_NE(eval.out.find("no test queries for structure 3p"), std::string::npos);
  const auto report = nlohmann::json::parse(slurp(path("ev") / "eval_test.json"));
  EXPECT_TRUE(report.contains("avg_epfo"));
  EXPECT_TRUE(report.contains("avg_neg"));
  EXPECT_FALSE(report["per_structure"].contains("3p"));
  EXPECT_TRUE(std::filesystem::exists(path("ev") / "eval_test.csv"));

  const Outcome top = run("answer -k 64 --checkpoint " + q(path("run") / "best.ckpt") +
                      " '{\"op\":\"proj\",\"rel\":0,\"arg\":{\"op\":\"anchor\",\"ent\":3}}'");
  ASSERT_EQ(top.code, 0);
  std::istringstream rows(top.out);
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, "rank\tid\tname\tscore");
  int count = 0;
  double prev = 2.0;
  while (std::getline(rows, line)) {
    std::istringstream cols(line);
    std::string rank, id, name;
    double score;
    cols >> rank >> id >> name >> score;
    EXPECT_LE(score, prev);
    prev = score;
    ++count;
  }
  EXPECT_EQ(count, 64);

  const Outcome both = run("answer -k 5 --exact --kg " + q(kg()) + " --checkpoint " +
                       q(path("run") / "best.ckpt") +
                       " '{\"op\":\"proj\",\"rel\":0,\"arg\":{\"op\":\"anchor\",\"ent\":3}}'");
  ASSERT_EQ(both.code, 0);
  EXPECT_NE(both.out.find("overlap@5"), std::string::npos);
}

TEST_F(Cli, ResumeContinuesARun) {
  const std::string gen = "gen-queries --config " + q(path("gen.json")) + " --kg " + q(kg()) +
                          " --out " + q(path("qr"));
  ASSERT_EQ(run(gen).code, 0);
  const std::string base = "train --kg " + q(kg()) + " --queries " + q(path("qr")) +
                           " --dim 8 --bases 2 --batch-size 16 --k-neg 8 --eval-every 20"
                           " --patience 40 --structures 1p --out ";
  ASSERT_EQ(run(base + q(path("whole")) + " --max-steps 60").code, 0);
  ASSERT_EQ(run(base + q(path("part")) + " --max-steps 40").code, 0);
  ASSERT_EQ(run(base + q(path("part")) + " --max-steps 60 --resume").code, 0);
  EXPECT_EQ(slurp(path("whole") / "last.ckpt"), slurp(path("part") / "last.ckpt"));
}

TEST_F(Cli, ExactAnswerOnTheToyGraph) {
  fuzzqe::save_graph(fuzzqe::testing::toy_graph(), path("toy"));
  const Outcome r = run("answer --exact --kg " + q(path("toy")) +
                    " '{\"op\":\"proj\",\"rel\":1,\"arg\":{\"op\":\"proj\",\"rel\":0,"
                    "\"arg\":{\"op\":\"anchor\",\"ent\":0}}}'");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("exact answers (1)"), std::string::npos);
  EXPECT_NE(r.out.find("3\td"), std::string::npos);
}

TEST_F(Cli, VerifySubcommands) {
  const Outcome laws = run("verify laws");
  EXPECT_EQ(laws.code, 0) << laws.out;
  const Outcome grad = run("verify gradcheck");
  EXPECT_EQ(grad.code, 0) << grad.out;
  EXPECT_NE(grad.out.find("threshold=1e-4"), std::string::npos);
  EXPECT_NE(grad.out.find("max_rel_error="), std::string::npos);
  EXPECT_EQ(run("verify oracle").code, 0);
}

}  // namespace
