// Copyright 2026 The mssgas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mssgas/io.hpp"

namespace mssgas {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("mssgas-cli-" + std::to_string(::getpid()) + "-" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::vector<std::string>& args, const fs::path& board) const {
    std::string cmd = quote(MSSGAS_CLI_PATH);
    for (const std::string& a : args) cmd += " " + quote(a);
    cmd += " --bulletin " + quote(board.string());
    const fs::path out = dir_ / "stdout", err = dir_ / "stderr";
    cmd += " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int status = std::system(cmd.c_str());
    return Outcome{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  fs::path setup_demo(const std::string& name, const std::string& config = MSSGAS_DEMO_CONFIG) {
    const fs::path board = dir_ / name;
    Outcome r = run({"setup", "--config", config, "--seed", "7"}, board);
    EXPECT_EQ(r.code, 0) << r.err;
    return board;
  }

  fs::path pseudo_share(const fs::path& board, int j, int i, int q) {
    Outcome r = run({"pseudo-share", "--share", (board / "shares" / ("P" + std::to_string(j) + ".share")).string(),
                 "--secret-index", std::to_string(i), "--set-index", std::to_string(q)},
                board);
    EXPECT_EQ(r.code, 0) << r.err;
    return write("ps-" + std::to_string(j) + "-" + std::to_string(i) + "-" + std::to_string(q) + ".json",
                 r.out);
  }

  fs::path dir_;
};

TEST_F(CliTest, SetupIsDeterministicUnderSeed) {
  const fs::path a = setup_demo("a"), b = setup_demo("b");
  for (const char* f : {"bulletin.json", "journal.jsonl", "dealer.state", "shares/P1.share",
                        "shares/P2.share"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  Outcome r = run({"setup", "--config", MSSGAS_DEMO_CONFIG, "--seed", "7"}, dir_ / "c");
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST_F(CliTest, SetupValidationExit) {
  const fs::path cfg =
      write("bad.json", R"({"prime": 13, "participants": 2, "secrets": [2], "structure": [[[1]]]})");
  Outcome r = run({"setup", "--config", cfg.string()}, dir_ / "board");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("qualified set"), std::string::npos) << r.err;
}

TEST_F(CliTest, HonestRunReconstructsDemoSecret) {
  const fs::path board = setup_demo("board");
  const fs::path p1 = pseudo_share(board, 1, 1, 1), p2 = pseudo_share(board, 2, 1, 1);
  Outcome again = run({"pseudo-share", "--share", (board / "shares/P1.share").string(),
                   "--secret-index", "1", "--set-index", "1"},
                  board);
  EXPECT_EQ(again.out, slurp(p1));
  EXPECT_NE(again.out.find("\"format\": \"mssgas-pseudo-share/1\""), std::string::npos);

  Outcome r = run({"reconstruct", "--secret-index", "1", "--set-index", "1", p1.string(), p2.string()},
              board);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "participant 1: verified\nparticipant 2: verified\nsecret commitment: matched\n2\n");

  EXPECT_EQ(run({"verify-secret", "--secret-index", "1", "--secret", "2"}, board).code, 0);
  EXPECT_EQ(run({"verify-secret", "--secret-index", "1", "--secret", "3"}, board).code, 1);
  EXPECT_EQ(run({"verify-secret", "--secret-index", "2", "--secret", "2"}, board).code, 2);
}

TEST_F(CliTest, MembershipTamperAndIncompleteExits) {
  const fs::path cfg = write("three.json", R"({"prime": 1000003, "participants": 3, "secrets": [77],
                                                "structure": [[[1, 2]]]})");
  const fs::path board = setup_demo("board", cfg.string());
  Outcome member = run({"pseudo-share", "--share", (board / "shares/P3.share").string(),
                    "--secret-index", "1", "--set-index", "1"},
                   board);
  EXPECT_EQ(member.code, 3);

  const fs::path p1 = pseudo_share(board, 1, 1, 1), p2 = pseudo_share(board, 2, 1, 1);
  EXPECT_EQ(run({"reconstruct", "--secret-index", "1", "--set-index", "1", p1.string()}, board).code,
            5);

  io::json doc = io::parse_document(slurp(p2));
  const BigInt v = parse_hex(doc.at("value").get<std::string>());
  doc["value"] = to_hex(v == 0 ? BigInt(1) : v - 1);
  const fs::path forged = write("forged.json", io::emit_canonical(doc));
  Outcome r = run({"reconstruct", "--secret-index", "1", "--set-index", "1", p1.string(),
               forged.string()},
              board);
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("participant 2: REJECTED"), std::string::npos);
  EXPECT_NE(r.err.find("dishonest participants: 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, RenewAddSetThenReconstruct) {
  const fs::path cfg = write("three.json", R"({"prime": 1000003, "participants": 3, "secrets": [77],
                                                "structure": [[[1, 2]]]})");
  const fs::path board = setup_demo("board", cfg.string());
  Outcome r = run({"renew", "--seed", "3", "add-set", "--secret-index", "1", "--members", "2,3"}, board);
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path p2 = pseudo_share(board, 2, 1, 2), p3 = pseudo_share(board, 3, 1, 2);
  Outcome rec = run({"reconstruct", "--secret-index", "1", "--set-index", "2", p2.string(), p3.string()},
                board);
  EXPECT_EQ(rec.code, 0) << rec.err;
  EXPECT_EQ(rec.out.substr(rec.out.rfind('\n', rec.out.size() - 2) + 1), "77\n");
  Outcome audit = run({"audit"}, board);
  EXPECT_EQ(audit.code, 0) << audit.out << audit.err;
}

TEST_F(CliTest, DeactivateParticipantTouchesOnlyItsSecret) {
  const fs::path cfg = write("two.json", R"({"prime": 1000003, "participants": 4, "secrets": [5, 6],
                                              "structure": [[[1, 2, 3]], [[2, 4]]]})");
  const fs::path board = setup_demo("board", cfg.string());
  const std::string before = slurp(board / "shares/P2.share");
  Outcome r = run({"renew", "--seed", "3", "deactivate-participant", "--participant", "1",
               "--replacement", "1=9"},
              board);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(board / "shares/P2.share"), before);

  std::istringstream journal(slurp(board / "journal.jsonl"));
  std::string line, last;
  while (std::getline(journal, line)) last = line;
  const io::json delta = io::parse_document(last);
  EXPECT_EQ(delta.at("kind"), "deactivate-participant");
  for (const char* table : {"masks", "participant_commitments", "removed_entries"}) {
    for (const io::json& e : delta.at(table)) EXPECT_EQ(e.at("secret"), 1) << table;
  }
  for (const io::json& e : delta.at("secret_commitments")) EXPECT_EQ(e.at("secret"), 1);
  for (const io::json& e : delta.at("structure")) EXPECT_EQ(e.at("secret"), 1);
  EXPECT_EQ(run({"verify-secret", "--secret-index", "1", "--secret", "9"}, board).code, 0);
  EXPECT_EQ(run({"audit"}, board).code, 0);
}

TEST_F(CliTest, RenewErrorExits) {
  const fs::path board = setup_demo("board");
  // The demo has k = 1, so k_max = 2.
  EXPECT_EQ(run({"renew", "add-secret", "--secret", "4", "--set", "1,2"}, board).code, 0);
  Outcome full = run({"renew", "add-secret", "--secret", "5", "--set", "1,2"}, board);
  EXPECT_EQ(full.code, 6) << full.err;
  EXPECT_EQ(run({"renew", "deactivate-set", "--secret-index", "1", "--set-index", "1"}, board).code,
            7);
  EXPECT_EQ(run({"renew", "add-set", "--secret-index", "1", "--members", "1"}, board).code, 2);
  EXPECT_EQ(run({"audit"}, board).code, 0);
}

TEST_F(CliTest, BulletinFromEnvironment) {
  const fs::path board = setup_demo("board");
  const std::string cmd = "MSSGAS_BULLETIN=" + quote(board.string()) + " " +
                          quote(MSSGAS_CLI_PATH) +
                          " verify-secret --secret-index 1 --secret 2 >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 0);
}

}  // namespace
}  // namespace mssgas
