// Copyright 2026 The ecdetect Authors.
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

// Runs the ecdetect executable end to end and checks exit codes and outputs.

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "temp_dir.hpp"

#ifndef ECDETECT_CLI_PATH
#error "ECDETECT_CLI_PATH must name the ecdetect executable"
#endif

namespace {

struct Result {
  int code = -1;
  std::string err;
  std::string out;
};

Result cli(const TempDir& dir, const std::string& args) {
  const std::string out = dir / "stdout.txt";
  const std::string err = dir / "stderr.txt";
  const std::string cmd =
      std::string(ECDETECT_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  TempDir dir;
  CHECK(cli(dir, "").code == 2);
  CHECK(cli(dir, "frobnicate").code == 2);
  CHECK(cli(dir, "decode --mode sideways").code == 2);
  CHECK(cli(dir, "--help").code == 0);
  CHECK(cli(dir, "--version").out.find("0.1.0") != std::string::npos);
}

TEST_CASE("missing retention file names the path") {
  TempDir dir;
  spit(dir / "eps.jsonl", "{\"id\":\"a\",\"words\":[]}\n");
  const auto r = cli(dir, "dips --episodes " + (dir / "eps.jsonl") + " --retention " +
                              (dir / "nope.jsonl") + " --output " + (dir / "s.jsonl"));
  CHECK(r.code == 2);
  CHECK(r.err.find(dir / "nope.jsonl") != std::string::npos);
}

TEST_CASE("flat curves give an empty segments file") {
  TempDir dir;
  std::string words;
  for (int i = 0; i < 100; ++i) {
    words += (i ? "," : "") + std::string("{\"t\":\"w.\",\"s\":") + std::to_string(i) +
             ",\"e\":" + std::to_string(i) + ".5}";
  }
  spit(dir / "eps.jsonl", "{\"id\":\"a\",\"words\":[" + words + "]}\n");
  std::string values;
  for (int i = 0; i < 100; ++i) values += (i ? "," : "") + std::string("0.7");
  spit(dir / "ret.jsonl",
       "{\"episode_id\":\"a\",\"listener_count\":500,\"values\":[" + values + "]}\n");
  const auto r = cli(dir, "dips --episodes " + (dir / "eps.jsonl") + " --retention " +
                              (dir / "ret.jsonl") + " --output " + (dir / "s.jsonl"));
  CHECK(r.code == 0);
  const std::string text = slurp(dir / "s.jsonl");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(text.rfind("{\"header\":", 0) == 0);
}

TEST_CASE("schema violations exit 2 and degenerate data exits 3") {
  TempDir dir;
  spit(dir / "bad.jsonl", "{\"episode_id\":\"a\",\"sentence_index\":0,\"text\":\"x\"}\n");
  CHECK(cli(dir, "train --input " + (dir / "bad.jsonl") + " --output " + (dir / "m.json")).code ==
        2);
  spit(dir / "one.jsonl",
       "{\"episode_id\":\"a\",\"sentence_index\":0,\"text\":\"x y\",\"label\":\"EC\"}\n");
  const auto r = cli(dir, "train --input " + (dir / "one.jsonl") + " --output " + (dir / "m.json"));
  CHECK(r.code == 3);
  CHECK(r.err.find("degenerate") != std::string::npos);

  spit(dir / "cfg.json", "{\"train\":{\"epochz\":1}}");
  CHECK(cli(dir, "--config " + (dir / "cfg.json") + " train --input " + (dir / "one.jsonl")).code ==
        2);
  CHECK(cli(dir, "--config " + (dir / "absent.json") + " synth").code == 2);
}

TEST_CASE("flags override the config file") {
  TempDir dir;
  spit(dir / "cfg.json", "{\"seed\":5,\"synth\":{\"episodes\":3}}");
  const auto r = cli(dir, "--config " + (dir / "cfg.json") + " synth --episodes 2 --output " +
                              (dir / "c"));
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("episodes") == 2);
  const std::string eps = slurp(dir / "c/episodes.jsonl");
  CHECK(std::count(eps.begin(), eps.end(), '\n') == 3);

  cli(dir, "--config " + (dir / "cfg.json") + " synth --seed 6 --output " + (dir / "d"));
  cli(dir, "--config " + (dir / "cfg.json") + " synth --output " + (dir / "e"));
  CHECK(slurp(dir / "d/episodes.jsonl").substr(200) != slurp(dir / "e/episodes.jsonl").substr(200));
}

TEST_CASE("changepoint decoding yields suffix-structured labels") {
  TempDir dir;
  spit(dir / "p.jsonl",
       "{\"episode_id\":\"d\",\"sentence_index\":0,\"prob\":0.1}\n"
       "{\"episode_id\":\"d\",\"sentence_index\":1,\"prob\":0.2}\n"
       "{\"episode_id\":\"d\",\"sentence_index\":2,\"prob\":0.1}\n"
       "{\"episode_id\":\"d\",\"sentence_index\":3,\"prob\":0.9}\n"
       "{\"episode_id\":\"d\",\"sentence_index\":4,\"prob\":0.4}\n"
       "{\"episode_id\":\"d\",\"sentence_index\":5,\"prob\":0.95}\n"
       "{\"episode_id\":\"d\",\"sentence_index\":6,\"prob\":0.8}\n");
  const auto r = cli(dir, "decode --mode changepoint --min-llr 1.0 --probs " + (dir / "p.jsonl") +
                              " --output " + (dir / "l.jsonl"));
  REQUIRE(r.code == 0);
  const std::string labels = slurp(dir / "l.jsonl");
  std::vector<std::string> got;
  std::istringstream in(labels);
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j.contains("label")) got.push_back(j.at("label"));
  }
  CHECK(got == std::vector<std::string>{"Content", "Content", "Content", "EC", "EC", "EC", "EC"});
}
