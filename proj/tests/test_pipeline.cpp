#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "reviewgraph/pipeline.hpp"
#include "test_support.hpp"

using namespace reviewgraph;
namespace fs = std::filesystem;

namespace {

RunConfig fixture_config(const fs::path& out) {
  RunConfig cfg;
  cfg.input = testing::data_path("reviews_200.jsonl").string();
  cfg.out = out.string();
  cfg.walk.dims = 5;
  return cfg;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text_file(p)); }

// Runs the CLI with stdout in `capture` and stderr in `capture`.err; returns
// the exit code.
int cli(const std::string& args, const fs::path& capture) {
  const std::string cmd =
      std::string(REVIEWGRAPH_CLI) + " " + args + " > " + capture.string() + " 2> " + capture.string() + ".err";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t line_count(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config defaults and round trip") {
    const auto cfg = parse_run_config("{}");
    CHECK(cfg.seed == 42);
    CHECK(cfg.test_fraction == 0.2);
    CHECK(cfg.walk.walk_length == 80);
    const auto echoed = run_config_from_json(run_config_json(cfg));
    CHECK(run_config_json(echoed) == run_config_json(cfg));
  }

  TEST_CASE("config rejects unknown keys and wrong types") {
    CHECK_THROWS_AS(parse_run_config(R"({"walk": {"foo": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"sede": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"limit": "ten"})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"classifier": "svm"})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"test_fraction": 1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[1]"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
  }

  TEST_CASE("config hash tracks result settings only") {
    RunConfig a, b;
    b.out = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 43;
    CHECK(config_hash(a) != config_hash(b));
  }

  TEST_CASE("a full run writes every artifact with its hash and seed") {
    const auto dir = testing::scratch_dir("pipeline_run");
    const auto cfg = fixture_config(dir);
    Workspace ws(cfg);
    const auto report = ws.run();
    CHECK(report.n_test > 0);
    for (const char* name : {"triples.csv", "graph.json", "embeddings.csv", "features.csv", "model.json",
                             "split.json", "predictions.csv", "histogram.csv", "report.json"}) {
      CHECK_MESSAGE(fs::exists(dir / name), name);
    }
    const auto meta = read_json(dir / "embeddings.csv.meta.json");
    CHECK(meta["seed"] == 42);
    CHECK(meta["run_hash"] == config_hash(cfg));
    const auto rep = read_json(dir / "report.json");
    CHECK(rep["config"]["config_hash"] == config_hash(cfg));
    CHECK(rep["config"]["run"]["seed"] == 42);
    CHECK(rep["n_test"] == report.n_test);
  }

  TEST_CASE("stages refuse to run on missing or stale inputs outside chain mode") {
    const auto dir = testing::scratch_dir("pipeline_stale");
    auto cfg = fixture_config(dir);
    {
      Workspace ws(cfg, false);
      CHECK_THROWS_AS(ws.embed(), StageError);
      ws.extract();
      CHECK_NOTHROW(ws.build_graph());
    }
    cfg.length_filter.limit = 10;
    Workspace stale(cfg, false);
    try {
      stale.build_graph();
      FAIL("expected a stage error");
    } catch (const StageError& e) {
      CHECK(e.stage == "extract");
    }
    Workspace chained(cfg, true);
    CHECK_NOTHROW(chained.build_graph());
  }

  TEST_CASE("cross-validation through the workspace") {
    const auto dir = testing::scratch_dir("pipeline_cv");
    auto cfg = fixture_config(dir);
    cfg.pipeline = PipelineKind::Baseline;
    cfg.representation = "tfidf";
    cfg.classifier = ClassifierKind::Logistic;
    cfg.eval = EvalMode::Cv;
    cfg.k = 5;
    Workspace ws(cfg);
    const auto report = ws.cv();
    CHECK(report.folds.size() == 5);
    CHECK(report.mean.n_test == 200);
    CHECK(fs::exists(dir / "cv_report.json"));
    CHECK(line_count(read_text_file(dir / "cv_folds.csv")) == 7);
  }

  TEST_CASE("cli exit codes and outputs") {
    const auto dir = testing::scratch_dir("pipeline_cli");
    const auto input = testing::data_path("reviews_200.jsonl").string();
    const auto log = dir / "stdout.txt";
    const std::string common = "--input " + input + " --out " + (dir / "out").string();

    CHECK(cli("stats " + common, log) == 0);
    const auto stats = nlohmann::json::parse(read_text_file(log));
    CHECK(stats["n_reviews"] == 200);

    CHECK(cli("--no-such-flag stats", log) == 1);

    write_text_file(dir / "bad.json", R"({"walk": {"foo": 1}})");
    CHECK(cli("--config " + (dir / "bad.json").string() + " stats", log) == 1);
    CHECK(read_text_file(dir / "stdout.txt.err").find("walk.foo") != std::string::npos);

    CHECK(cli("embed " + common, log) == 2);
    CHECK(read_text_file(dir / "stdout.txt.err").find("reviewgraph extract") != std::string::npos);

    write_text_file(dir / "cv.json", R"({"pipeline": "baseline", "representation": "bow", "classifier": "lr"})");
    CHECK(cli("--config " + (dir / "cv.json").string() + " cv --k 10 " + common, log) == 0);
    CHECK(line_count(read_text_file(log)) == 12);
  }
}
