#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "reviewgraph/baselines.hpp"
#include "reviewgraph/classify.hpp"
#include "reviewgraph/corpus.hpp"
#include "reviewgraph/evaluate.hpp"
#include "reviewgraph/extraction.hpp"
#include "reviewgraph/features.hpp"
#include "reviewgraph/kgraph.hpp"
#include "reviewgraph/node2vec.hpp"
#include "reviewgraph/sentiment.hpp"
#include "reviewgraph/textprep.hpp"

namespace reviewgraph {

/// Invalid configuration: unknown keys, bad values, missing input.
struct ConfigError : InputError {
  using InputError::InputError;
};

/// A stage failed; `stage` names it and what() carries the cause.
struct StageError : std::runtime_error {
  StageError(std::string stage_name, const std::string& cause)
      : std::runtime_error(stage_name + ": " + cause), stage(std::move(stage_name)) {}
  std::string stage;
};

enum class PipelineKind { ReviewGraph, Baseline, SubsetBaseline };
enum class EvalMode { Split, Cv };

struct RunConfig {
  std::string input;
  std::size_t limit = 10000;
  PipelineKind pipeline = PipelineKind::ReviewGraph;
  std::string representation = "node2vec";  // node2vec | bow | tfidf | word2vec
  FeatureMode feature_mode = FeatureMode::N2VAvgMinMax;
  Sampling sampling = Sampling::Over;
  ClassifierKind classifier = ClassifierKind::RandomForest;
  bool sentiment_feature = false;  // text baselines: append the review-body score
  WalkConfig walk;
  Word2VecConfig word2vec;
  VocabularyConfig vocabulary{1, 5000};
  ForestConfig forest;
  LogisticConfig logistic;
  MlpConfig mlp;
  EvalMode eval = EvalMode::Split;
  double test_fraction = 0.2;
  std::size_t k = 10;
  bool stratified = false;
  std::size_t threads = 1;
  std::size_t subset_n = 2000;
  LengthFilter length_filter;
  std::string resources;  // directory overriding the bundled word lists
  std::uint64_t seed = 42;
  std::string out = "out";

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

std::string_view to_string(PipelineKind kind);
std::string_view to_string(EvalMode mode);

/// Parses a JSON object; every key is optional and unknown keys are rejected.
RunConfig parse_run_config(std::string_view json_text);
RunConfig run_config_from_json(const nlohmann::ordered_json& j);
/// Complete configuration with every default spelled out.
nlohmann::ordered_json run_config_json(const RunConfig& cfg);
/// Hash of every result-relevant setting (all but `out`).
std::string config_hash(const RunConfig& cfg);

nlohmann::ordered_json corpus_stats_json(const CorpusStats& stats);

/// Word lists and lexicons for one run, loaded from `dir` when set.
struct ResourceBundle {
  TextResources text;
  Lexicon lexicon;
  PosGuesser pos;
  NormalizeResources normalize;
  std::unordered_set<std::string> amenities;

  static std::unique_ptr<ResourceBundle> load(const std::filesystem::path& dir);
};

struct ExtractionCounts {
  std::size_t reviews = 0;
  std::size_t extracted = 0;
  std::size_t normalized = 0;
  std::size_t kept = 0;
};

/// prepare_graph_text, extraction, triple sentiment, normalisation and the
/// length filter over every review.
std::vector<Triple> extract_corpus_triples(const std::vector<ReviewRecord>& reviews, const ResourceBundle& res,
                                           const LengthFilter& filter, ExtractionCounts* counts = nullptr);

/// Stage runner over one output directory. Artifacts carry a
/// `<name>.meta.json` sidecar with the stage hash and seed; a stage reuses an
/// artifact only when that hash matches.
class Workspace {
 public:
  /// `chain`: compute missing or stale upstream artifacts instead of failing.
  explicit Workspace(RunConfig cfg, bool chain = true);
  ~Workspace();

  const RunConfig& config() const { return cfg_; }
  std::filesystem::path out_dir() const { return cfg_.out; }

  CorpusStats stats();
  void extract();
  void build_graph();
  std::filesystem::path export_graph(GraphFormat format);
  void embed();
  void train();
  MetricsReport evaluate();
  CvReport cv();
  /// Every stage for the configured pipeline; writes report.json.
  MetricsReport run();

  struct State;  // cached stage outputs; defined in pipeline.cpp

 private:
  RunConfig cfg_;
  bool chain_;
  std::unique_ptr<State> state_;
};

/// Expands {"base": {...}, "grid": {"dotted.key": [values...]}} into runs
/// (cartesian product, grid keys in file order), executes them and writes
/// sweep.csv into the base output directory. Returns the CSV text.
std::string run_sweep(const nlohmann::ordered_json& sweep, std::size_t jobs = 1);

}  // namespace reviewgraph
