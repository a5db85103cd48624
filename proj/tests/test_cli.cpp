// Copyright 2026 The awekws Authors.
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

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "awekws/kws.hpp"
#include "awekws/metrics.hpp"
#include "support.hpp"

using namespace awekws;
using awekws::testing::TempDir;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(AWEKWS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

// A small synthetic corpus shared by the cases below.
const TempDir& corpus() {
  static TempDir dir("cli_corpus");
  static const bool made = [] {
    const std::string out = dir.path().string();
    REQUIRE(run("synth --out " + out + " --seed 3 --types 5 --dim 8 --train-per-type 6 --templates-per-type 2 "
                "--heldout-per-type 2 --utterances 30") == 0);
    return true;
  }();
  (void)made;
  return dir;
}

std::string path(const std::string& rel) { return (corpus().path() / rel).string(); }

const std::string kSmallModel =
    " --steps 15 --batch-size 4 --pairs 200 --model-dim 8 --heads 2 --layers 1 --ffn-dim 16 --awe-dim 8";

}  // namespace

TEST_CASE("synth writes all corpora") {
  for (const char* sub : {"train", "templates", "heldout", "search"}) CHECK(fs::exists(path(sub) + "/manifest.jsonl"));
  CHECK(lines(path("truth.jsonl")).size() == 5);
  CHECK(lines(path("search/manifest.jsonl")).size() == 30);
}

TEST_CASE("train writes its artifacts and is reproducible") {
  TempDir dir("cli_train");
  const std::string a = (dir / "a").string(), b = (dir / "b").string();
  REQUIRE(run("train --manifest " + path("train/manifest.jsonl") + " --out " + a + " --seed 5" + kSmallModel) == 0);
  REQUIRE(run("train --manifest " + path("train/manifest.jsonl") + " --out " + b + " --seed 5" + kSmallModel) == 0);
  for (const char* f : {"checkpoint.bin", "train_log.jsonl", "run.json"}) CHECK(fs::exists(dir / "a" / f));
  CHECK(slurp(dir / "a" / "checkpoint.bin") == slurp(dir / "b" / "checkpoint.bin"));
  const auto log = lines(dir / "a" / "train_log.jsonl");
  REQUIRE(log.size() == 15);
  const auto first = nlohmann::json::parse(log.front());
  CHECK(first.at("step") == 1);
  CHECK(first.contains("loss"));
  const auto meta = nlohmann::json::parse(slurp(dir / "a" / "run.json"));
  CHECK(meta.at("seed") == 5);

  SUBCASE("trained model searches") {
    REQUIRE(run("search --templates " + path("templates/manifest.jsonl") + " --search " +
                path("search/manifest.jsonl") + " --checkpoint " + a + "/checkpoint.bin --out " + a + "/det.jsonl") ==
            0);
    CHECK(lines(dir / "a" / "det.jsonl").size() == 5 * 30);
  }
  SUBCASE("dimension mismatch") {
    TempDir other("cli_dim");
    REQUIRE(run("synth --out " + other.path().string() + " --seed 1 --types 2 --dim 4 --train-per-type 2 "
                "--templates-per-type 1 --heldout-per-type 1 --utterances 3") == 0);
    CHECK(run("search --templates " + (other / "templates/manifest.jsonl").string() + " --search " +
              (other / "search/manifest.jsonl").string() + " --checkpoint " + a + "/checkpoint.bin --out " +
              (other / "det.jsonl").string()) == 5);
  }
}

TEST_CASE("usage and missing inputs") {
  TempDir dir("cli_err");
  CHECK(run("train --manifest " + path("train/manifest.jsonl") + " --out " + (dir / "x").string()) == 2);
  CHECK(run("train --manifest " + (dir / "none.jsonl").string() + " --out " + (dir / "x").string() + " --seed 1") ==
        3);
  CHECK(run("frobnicate") == 2);
  CHECK(run("--version") == 0);
}

TEST_CASE("baseline search and evaluation") {
  TempDir dir("cli_search");
  for (const char* e : {"meanpool", "subsample", "dtw"}) {
    const std::string det = (dir / (std::string(e) + ".jsonl")).string();
    REQUIRE(run(std::string("search --embedder ") + e + " --templates " + path("templates/manifest.jsonl") +
                " --search " + path("search/manifest.jsonl") + " --out " + det) == 0);
    CHECK(lines(det).size() == 5 * 30);
    REQUIRE(run("evaluate --detections " + det + " --truth " + path("truth.jsonl") + " --out " +
                (dir / "r.json").string() + " --table " + (dir / "r.tsv").string()) == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "r.json"));
    CHECK(report.at("map").get<double>() > 0.0);
    CHECK(report.at("map").get<double>() <= 1.0);
    CHECK(lines(dir / "r.tsv").size() == 6);
  }
  const std::string meanpool = (dir / "meanpool.jsonl").string();
  REQUIRE(run("evaluate --detections " + meanpool + " --truth " + path("truth.jsonl") + " --out " +
              (dir / "t.json").string()) == 0);
  REQUIRE(run("evaluate --detections " + meanpool + " --truth-manifest " + path("search/manifest.jsonl") + " --out " +
              (dir / "m.json").string()) == 0);
  CHECK(slurp(dir / "m.json") == slurp(dir / "t.json"));
}

TEST_CASE("evaluation of constructed detections") {
  TempDir dir("cli_eval");
  const GroundTruth truth = read_ground_truth(path("truth.jsonl"));
  std::vector<RankedDetections> perfect;
  std::vector<std::string> ids;
  for (const auto& l : lines(path("search/manifest.jsonl"))) ids.push_back(nlohmann::json::parse(l).at("id"));
  for (const auto& [keyword, relevant] : truth.relevant) {
    RankedDetections r{keyword, {}};
    for (const auto& id : ids) r.detections.push_back({keyword, id, relevant.contains(id) ? 1.0 : 0.0, {}, 0});
    rank(r);
    perfect.push_back(std::move(r));
  }
  {
    std::ofstream out(dir / "perfect.jsonl");
    write_detections(perfect, out);
  }
  REQUIRE(run("evaluate --detections " + (dir / "perfect.jsonl").string() + " --truth " + path("truth.jsonl") +
              " --out " + (dir / "p.json").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "p.json")).at("map").get<double>() == 1.0);

  awekws::testing::write_text(dir / "other.jsonl", R"({"keyword": "nothing", "utterances": ["x"]})"
                                                   "\n");
  CHECK(run("evaluate --detections " + (dir / "perfect.jsonl").string() + " --truth " +
            (dir / "other.jsonl").string()) == 8);
  CHECK(run("evaluate --detections " + (dir / "absent.jsonl").string() + " --truth " + path("truth.jsonl")) == 3);
}

TEST_CASE("layer sweep") {
  TempDir dir("cli_sweep");
  // Layer "noise" keeps the alignments but replaces every frame with noise.
  Rng rng(9);
  for (const char* sub : {"templates", "search"}) {
    Corpus c = load_corpus(path(sub) + "/manifest.jsonl");
    for (auto& u : c) u.frames = awekws::testing::random_matrix(u.frames.rows(), u.frames.cols(), rng);
    write_corpus(c, dir / sub / "manifest.jsonl");
  }
  const std::string templ = path("templates/manifest.jsonl") + "," + (dir / "templates/manifest.jsonl").string();
  const std::string search = path("search/manifest.jsonl") + "," + (dir / "search/manifest.jsonl").string();
  const std::string table = (dir / "sweep.tsv").string();
  REQUIRE(run("layer-sweep --templates " + templ + " --search " + search + " --layers clean,noise --out-table " +
              table + " --out-series " + (dir / "series.json").string()) == 0);
  const auto rows = lines(table);
  REQUIRE(rows.size() == 3);
  auto map_of = [](const std::string& row) {
    std::istringstream s(row);
    std::string name;
    double map = 0;
    s >> name >> map;
    return map;
  };
  CHECK(rows[1].rfind("clean\t", 0) == 0);
  CHECK(map_of(rows[1]) > map_of(rows[2]));
  const auto series = nlohmann::json::parse(slurp(dir / "series.json"));
  CHECK(series.at("map").size() == 2);

  REQUIRE(run("layer-sweep --templates " + path("templates/manifest.jsonl") + " --search " +
              path("search/manifest.jsonl") + " --out-table " + table) == 0);
  CHECK(lines(table).size() == 2);

  CHECK(run("layer-sweep --templates " + templ + " --search " + path("search/manifest.jsonl")) == 9);
  CHECK(run("layer-sweep --templates " + templ + " --search " + path("search/manifest.jsonl") + "," +
            (dir / "missing.jsonl").string()) == 3);
  CHECK(run("layer-sweep --templates " + templ + " --search " + path("search/manifest.jsonl") + "," +
            path("heldout/manifest.jsonl")) == 9);
}

TEST_CASE("gradcheck command") {
  CHECK(run("gradcheck --target nt-xent --trials 5") == 0);
}
