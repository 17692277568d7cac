#include <doctest.h>

#include <filesystem>

#include "hallugauge/pipeline.hpp"
#include "temp_dir.hpp"

using namespace hg;

#ifndef HG_DATA_DIR
#define HG_DATA_DIR "data"
#endif

namespace {

const std::string kToyDataset = std::string(HG_DATA_DIR) + "/toy_chainpoll.jsonl";
const std::string kToyMock = std::string(HG_DATA_DIR) + "/toy_chainpoll_mock.json";

}  // namespace

TEST_CASE("no subcommand yields a nonzero exit") {
  CHECK(dispatch({}) != 0);
  CHECK(dispatch({"frobnicate"}) != 0);
}

TEST_CASE("adherence on an open dataset is a config validation error") {
  int status = dispatch({"score", "--dataset", kToyDataset, "--domain", "open",
                         "--metric", "chainpoll-adherence", "--mock", "--out",
                         "/dev/null"});
  CHECK(status != 0);
}

TEST_CASE("unknown metric is rejected before any output is produced") {
  TempDir tmp("hg_cli");
  std::string out = tmp.file("res.jsonl");
  int status = dispatch({"score", "--dataset", kToyDataset, "--metric", "bogus",
                         "--mock", "--out", out});
  CHECK(status != 0);
  CHECK_FALSE(std::filesystem::exists(out));
}

TEST_CASE("score with the toy mock script produces quantized chainpoll scores") {
  TempDir tmp("hg_cli");
  std::string out = tmp.file("res.jsonl");
  int status = dispatch({"score", "--dataset", kToyDataset, "--metric",
                         "chainpoll-correctness", "--mock-script", kToyMock, "--out",
                         out});
  CHECK(status == 0);
  CHECK(std::filesystem::exists(out));
  std::string content = read_file(out);
  CHECK(content.find("tc00") != std::string::npos);
  CHECK(content.find("tc19") != std::string::npos);
}

TEST_CASE("record then replay yields byte-identical results and reports") {
  TempDir tmp("hg_cli");
  auto run = [&](const std::string& mode, const std::string& tag) {
    std::vector<std::string> args = {
        mode,        "--dataset", kToyDataset,
        "--metric",  "chainpoll-correctness",
        "--fixtures", tmp.file("fx"),
        "--out",     tmp.file(tag + ".jsonl"),
        "--report-out", tmp.file(tag + "_report")};
    if (mode == "record") {
      args.push_back("--mock-script");
      args.push_back(kToyMock);
    }
    REQUIRE(dispatch(args) == 0);
  };
  run("record", "rec");
  run("replay", "rep1");
  run("replay", "rep2");
  CHECK(read_file(tmp.file("rec.jsonl")) == read_file(tmp.file("rep1.jsonl")));
  CHECK(read_file(tmp.file("rep1.jsonl")) == read_file(tmp.file("rep2.jsonl")));
  CHECK(read_file(tmp.file("rec_report") + "/summary.json") ==
        read_file(tmp.file("rep1_report") + "/summary.json"));
  CHECK(read_file(tmp.file("rep1_report") + "/summary.json") ==
        read_file(tmp.file("rep2_report") + "/summary.json"));
}

TEST_CASE("generate + annotate + eval round trip on a tiny mock pipeline") {
  TempDir tmp("hg_cli");
  // Dataset with gold answers; the mock echoes the rendered prompt, which
  // contains the gold token for g0 only.
  write_file(tmp.file("ds.jsonl"),
             R"({"id":"g0","prompt":"alpha beta","gold_answers":["alpha"]})" "\n"
             R"({"id":"g1","prompt":"gamma delta","gold_answers":["omega"]})" "\n");
  REQUIRE(dispatch({"generate", "--dataset", tmp.file("ds.jsonl"), "--template", "qa",
                    "--out", tmp.file("gen.jsonl"), "--mock"}) == 0);
  REQUIRE(dispatch({"annotate", "--dataset", tmp.file("gen.jsonl"), "--method", "f1",
                    "--out", tmp.file("ann.jsonl")}) == 0);
  std::string annotated = read_file(tmp.file("ann.jsonl"));
  CHECK(annotated.find("\"label\":0") != std::string::npos);  // g0 overlaps gold
  CHECK(annotated.find("\"label\":1") != std::string::npos);  // g1 disjoint
  CHECK(annotated.find("\"f1\":") != std::string::npos);
}

TEST_CASE("config file supplies defaults") {
  TempDir tmp("hg_cli");
  write_file(tmp.file("cfg.json"),
             R"({"chainpoll": {"polls": 5}, "models": {"judge": "judge-x"}})");
  std::string out = tmp.file("res.jsonl");
  int status = dispatch({"score", "--config", tmp.file("cfg.json"), "--dataset",
                         kToyDataset, "--metric", "chainpoll-correctness",
                         "--mock-script", kToyMock, "--out", out});
  CHECK(status == 0);
  CHECK(std::filesystem::exists(out));
}

TEST_CASE("malformed config file is rejected") {
  TempDir tmp("hg_cli");
  write_file(tmp.file("cfg.json"), "{not json");
  CHECK(dispatch({"score", "--config", tmp.file("cfg.json"), "--dataset", kToyDataset,
                  "--metric", "chainpoll-correctness", "--mock"}) != 0);
}
