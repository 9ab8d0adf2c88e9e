// reviewgraph: command line front end over the stage runner.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "reviewgraph/pipeline.hpp"

namespace {

using ojson = nlohmann::ordered_json;
namespace rg = reviewgraph;

enum ExitCode { kOk = 0, kUsage = 1, kStageFailure = 2 };

struct GlobalFlags {
  std::string config;
  std::optional<std::string> input;
  std::optional<std::size_t> limit;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string format = "graphml";
};

ojson load_config_json(const std::string& path) {
  if (path.empty()) return ojson::object();
  std::ifstream in(path);
  if (!in) throw rg::ConfigError("cannot open config file " + path);
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw rg::ConfigError(path + ": " + e.what());
  }
}

rg::RunConfig resolve(const GlobalFlags& flags, const ojson& extra = ojson::object()) {
  auto j = load_config_json(flags.config);
  if (flags.input) j["input"] = *flags.input;
  if (flags.limit) j["limit"] = *flags.limit;
  if (flags.seed) j["seed"] = *flags.seed;
  if (flags.out) j["out"] = *flags.out;
  for (const auto& item : extra.items()) j[item.key()] = item.value();
  return rg::run_config_from_json(j);
}

void print_report(const rg::MetricsReport& report) {
  auto j = rg::report_json(report);
  j.erase("config");
  std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Review rating prediction from knowledge-graph embeddings and text baselines"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--input", flags.input, "JSON-Lines review file");
  app.add_option("--limit", flags.limit, "Maximum number of reviews to read (default 10000)");
  app.add_option("--seed", flags.seed, "Master seed");
  app.add_option("--out", flags.out, "Output directory for artifacts");
  app.add_option("--format", flags.format, "Graph export format: graphml, json, csv")->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  auto* extract = app.add_subcommand("extract", "Triple extraction with sentiment and length filter");
  auto* graph = app.add_subcommand("graph", "Knowledge graph stages");
  graph->require_subcommand(1);
  auto* graph_build = graph->add_subcommand("build", "Build the graph from extracted triples");
  auto* graph_export = graph->add_subcommand("export", "Export the built graph");
  auto* embed = app.add_subcommand("embed", "Node2Vec embeddings of the built graph");
  auto* train = app.add_subcommand("train", "Split, sample and fit the classifier");
  auto* eval = app.add_subcommand("eval", "Evaluate the trained model on the held-out split");
  auto* cv = app.add_subcommand("cv", "k-fold cross-validation");
  std::optional<std::size_t> k;
  cv->add_option("--k", k, "Number of folds");
  auto* run = app.add_subcommand("run", "Every stage of the configured pipeline");
  auto* sweep = app.add_subcommand("sweep", "Grid of runs from a sweep file");
  std::string sweep_file;
  std::size_t jobs = 1;
  sweep->add_option("file", sweep_file, "Sweep JSON: {\"base\": {...}, \"grid\": {key: [values]}}")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--jobs", jobs, "Parallel runs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sweep) {
      auto j = load_config_json(sweep_file);
      if (flags.out) j["base"]["out"] = *flags.out;
      if (flags.input) j["base"]["input"] = *flags.input;
      std::cout << rg::run_sweep(j, jobs);
      return kOk;
    }

    ojson extra = ojson::object();
    if (k) {
      extra["k"] = *k;
      extra["eval"] = "cv";
    }
    const auto cfg = resolve(flags, extra);
    const bool chain = static_cast<bool>(*run);
    rg::Workspace ws(cfg, chain);

    if (*stats) {
      std::cout << rg::corpus_stats_json(ws.stats()).dump(2) << "\n";
    } else if (*extract) {
      ws.extract();
      std::cerr << "wrote " << (ws.out_dir() / "triples.csv").string() << "\n";
    } else if (*graph_build) {
      ws.build_graph();
      std::cerr << "wrote " << (ws.out_dir() / "graph.json").string() << "\n";
    } else if (*graph_export) {
      rg::GraphFormat format;
      try {
        format = rg::parse_graph_format(flags.format);
      } catch (const rg::DomainError& e) {
        throw rg::ConfigError(std::string("--format: ") + e.what());
      }
      std::cerr << "wrote " << ws.export_graph(format).string() << "\n";
    } else if (*embed) {
      ws.embed();
      std::cerr << "wrote " << (ws.out_dir() / "embeddings.csv").string() << "\n";
    } else if (*train) {
      ws.train();
      std::cerr << "wrote " << (ws.out_dir() / "model.json").string() << "\n";
    } else if (*eval) {
      print_report(ws.evaluate());
    } else if (*cv) {
      std::cout << rg::cv_table_csv(ws.cv());
    } else if (*run) {
      print_report(ws.run());
    }
    return kOk;
  } catch (const rg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const rg::StageError& e) {
    std::cerr << "error: stage " << e.what() << "\n";
    return kStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStageFailure;
  }
}
