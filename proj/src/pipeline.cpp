#include "reviewgraph/pipeline.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "reviewgraph/csv.hpp"

namespace reviewgraph {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view to_string(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::ReviewGraph:
      return "reviewgraph";
    case PipelineKind::Baseline:
      return "baseline";
    case PipelineKind::SubsetBaseline:
      return "subset-baseline";
  }
  return "reviewgraph";
}

std::string_view to_string(EvalMode mode) { return mode == EvalMode::Cv ? "cv" : "split"; }

// ---------------------------------------------------------------------------
// Configuration

namespace {

PipelineKind parse_pipeline_kind(std::string_view name) {
  if (name == "reviewgraph") return PipelineKind::ReviewGraph;
  if (name == "baseline") return PipelineKind::Baseline;
  if (name == "subset-baseline") return PipelineKind::SubsetBaseline;
  throw DomainError("unknown pipeline '" + std::string(name) + "'");
}

EvalMode parse_eval_mode(std::string_view name) {
  if (name == "split") return EvalMode::Split;
  if (name == "cv") return EvalMode::Cv;
  throw DomainError("unknown evaluation mode '" + std::string(name) + "'");
}

class ObjectReader {
 public:
  ObjectReader(const ojson& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j.is_object()) throw ConfigError("config section '" + prefix_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const auto& value = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!value.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!value.is_number_unsigned()) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!value.is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!value.is_string()) throw ConfigError("");
      }
      out = value.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("config key '" + prefix_ + key + "' has the wrong type");
    }
  }

  template <typename T, typename Parse>
  void get_enum(const char* key, T& out, Parse parse) {
    std::string name;
    get(key, name);
    if (!j_.contains(key)) return;
    try {
      out = parse(name);
    } catch (const DomainError& e) {
      throw ConfigError("config key '" + prefix_ + key + "': " + e.what());
    }
  }

  template <typename F>
  void section(const char* key, F&& read) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    ObjectReader inner(j_.at(key), prefix_ + key + ".");
    read(inner);
    inner.finish();
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) throw ConfigError("unknown config key '" + prefix_ + item.key() + "'");
    }
  }

 private:
  const ojson& j_;
  std::string prefix_;
  std::unordered_set<std::string> seen_;
};

}  // namespace

void RunConfig::validate() const {
  static const std::unordered_set<std::string> kRepresentations = {"node2vec", "bow", "tfidf", "word2vec"};
  if (!kRepresentations.contains(representation)) {
    throw ConfigError("representation must be one of node2vec, bow, tfidf, word2vec");
  }
  if (pipeline == PipelineKind::ReviewGraph && representation != "node2vec") {
    throw ConfigError("the reviewgraph pipeline uses representation node2vec");
  }
  if (pipeline == PipelineKind::Baseline && representation == "node2vec") {
    throw ConfigError("the baseline pipeline needs representation bow, tfidf or word2vec");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0, 1)");
  if (k < 2) throw ConfigError("k must be at least 2");
  if (length_filter.limit == 0) throw ConfigError("length_filter.limit must be positive");
  try {
    walk.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("walk: ") + e.what());
  }
  if (word2vec.dims == 0 || word2vec.window == 0) throw ConfigError("word2vec dims and window must be positive");
  if (forest.n_trees == 0) throw ConfigError("forest.n_trees must be positive");
  if (mlp.hidden == 0 || mlp.batch == 0) throw ConfigError("mlp.hidden and mlp.batch must be positive");
}

RunConfig run_config_from_json(const ojson& j) {
  RunConfig cfg;
  ObjectReader r(j, "");
  r.get("input", cfg.input);
  r.get("limit", cfg.limit);
  r.get_enum("pipeline", cfg.pipeline, parse_pipeline_kind);
  r.get("representation", cfg.representation);
  r.get_enum("feature_mode", cfg.feature_mode, parse_feature_mode);
  r.get_enum("sampling", cfg.sampling, parse_sampling);
  r.get_enum("classifier", cfg.classifier, parse_classifier_kind);
  r.get("sentiment_feature", cfg.sentiment_feature);
  r.section("walk", [&](ObjectReader& w) {
    w.get("walk_length", cfg.walk.walk_length);
    w.get("walks_per_node", cfg.walk.walks_per_node);
    w.get("return_p", cfg.walk.return_p);
    w.get("inout_q", cfg.walk.inout_q);
    w.get("window", cfg.walk.window);
    w.get("dims", cfg.walk.dims);
    w.get("iterations", cfg.walk.iterations);
    w.get("negatives_k", cfg.walk.negatives_k);
    w.get("learning_rate", cfg.walk.learning_rate);
    w.get("norm_bound", cfg.walk.norm_bound);
  });
  r.section("word2vec", [&](ObjectReader& w) {
    w.get("dims", cfg.word2vec.dims);
    w.get("window", cfg.word2vec.window);
    w.get("epochs", cfg.word2vec.epochs);
    w.get("negatives", cfg.word2vec.negatives);
    w.get("learning_rate", cfg.word2vec.learning_rate);
    w.get("min_count", cfg.word2vec.min_count);
  });
  r.section("vocabulary", [&](ObjectReader& v) {
    v.get("min_df", cfg.vocabulary.min_df);
    v.get("max_features", cfg.vocabulary.max_features);
  });
  r.section("forest", [&](ObjectReader& f) {
    f.get("n_trees", cfg.forest.n_trees);
    f.get("max_features", cfg.forest.max_features);
    f.get("min_samples_split", cfg.forest.min_samples_split);
    f.get("bootstrap", cfg.forest.bootstrap);
  });
  r.section("logistic", [&](ObjectReader& l) {
    l.get("l2", cfg.logistic.l2);
    l.get("max_iter", cfg.logistic.max_iter);
    l.get("tolerance", cfg.logistic.tolerance);
  });
  r.section("mlp", [&](ObjectReader& m) {
    m.get("hidden", cfg.mlp.hidden);
    m.get("epochs", cfg.mlp.epochs);
    m.get("batch", cfg.mlp.batch);
    m.get("learning_rate", cfg.mlp.learning_rate);
    m.get("alpha", cfg.mlp.alpha);
    m.get("tolerance", cfg.mlp.tolerance);
    m.get("patience", cfg.mlp.patience);
  });
  r.get_enum("eval", cfg.eval, parse_eval_mode);
  r.get("test_fraction", cfg.test_fraction);
  r.get("k", cfg.k);
  r.get("stratified", cfg.stratified);
  r.get("threads", cfg.threads);
  r.get("subset_n", cfg.subset_n);
  r.section("length_filter", [&](ObjectReader& l) {
    l.get("limit", cfg.length_filter.limit);
    l.get("inclusive", cfg.length_filter.inclusive);
  });
  r.get("resources", cfg.resources);
  r.get("seed", cfg.seed);
  r.get("out", cfg.out);
  r.finish();
  cfg.validate();
  return cfg;
}

RunConfig parse_run_config(std::string_view json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return run_config_from_json(j);
}

ojson run_config_json(const RunConfig& cfg) {
  const auto& w = cfg.walk;
  const auto& v = cfg.word2vec;
  return {
      {"input", cfg.input},
      {"limit", cfg.limit},
      {"pipeline", to_string(cfg.pipeline)},
      {"representation", cfg.representation},
      {"feature_mode", to_string(cfg.feature_mode)},
      {"sampling", to_string(cfg.sampling)},
      {"classifier", to_string(cfg.classifier)},
      {"sentiment_feature", cfg.sentiment_feature},
      {"walk",
       {{"walk_length", w.walk_length},
        {"walks_per_node", w.walks_per_node},
        {"return_p", w.return_p},
        {"inout_q", w.inout_q},
        {"window", w.window},
        {"dims", w.dims},
        {"iterations", w.iterations},
        {"negatives_k", w.negatives_k},
        {"learning_rate", w.learning_rate},
        {"norm_bound", w.norm_bound}}},
      {"word2vec",
       {{"dims", v.dims},
        {"window", v.window},
        {"epochs", v.epochs},
        {"negatives", v.negatives},
        {"learning_rate", v.learning_rate},
        {"min_count", v.min_count}}},
      {"vocabulary", {{"min_df", cfg.vocabulary.min_df}, {"max_features", cfg.vocabulary.max_features}}},
      {"forest",
       {{"n_trees", cfg.forest.n_trees},
        {"max_features", cfg.forest.max_features},
        {"min_samples_split", cfg.forest.min_samples_split},
        {"bootstrap", cfg.forest.bootstrap}}},
      {"logistic",
       {{"l2", cfg.logistic.l2}, {"max_iter", cfg.logistic.max_iter}, {"tolerance", cfg.logistic.tolerance}}},
      {"mlp",
       {{"hidden", cfg.mlp.hidden},
        {"epochs", cfg.mlp.epochs},
        {"batch", cfg.mlp.batch},
        {"learning_rate", cfg.mlp.learning_rate},
        {"alpha", cfg.mlp.alpha},
        {"tolerance", cfg.mlp.tolerance},
        {"patience", cfg.mlp.patience}}},
      {"eval", to_string(cfg.eval)},
      {"test_fraction", cfg.test_fraction},
      {"k", cfg.k},
      {"stratified", cfg.stratified},
      {"threads", cfg.threads},
      {"subset_n", cfg.subset_n},
      {"length_filter", {{"limit", cfg.length_filter.limit}, {"inclusive", cfg.length_filter.inclusive}}},
      {"resources", cfg.resources},
      {"seed", cfg.seed},
      {"out", cfg.out},
  };
}

namespace {

// Configuration that determines results; the output location is excluded so
// identical runs in different directories produce identical reports.
ojson result_config_json(const RunConfig& cfg) {
  auto j = run_config_json(cfg);
  j.erase("out");
  return j;
}

}  // namespace

std::string config_hash(const RunConfig& cfg) { return hex64(fnv1a(result_config_json(cfg).dump())); }

ojson corpus_stats_json(const CorpusStats& stats) {
  ojson counts = ojson::object();
  for (const auto& [label, count] : stats.class_counts) counts[std::to_string(label)] = count;
  return {{"n_reviews", stats.n_reviews},           {"n_hotels", stats.n_hotels},
          {"mean_rating", stats.mean_rating},       {"std_rating", stats.std_rating},
          {"mean_len_chars", stats.mean_len_chars}, {"median_len_chars", stats.median_len_chars},
          {"class_counts", std::move(counts)}};
}

// ---------------------------------------------------------------------------
// Resources and extraction

std::unique_ptr<ResourceBundle> ResourceBundle::load(const fs::path& dir) {
  const bool bundled = dir.empty();
  auto bundle = std::unique_ptr<ResourceBundle>(new ResourceBundle{
      bundled ? TextResources::builtin() : TextResources::load(dir),
      bundled ? Lexicon::builtin() : Lexicon::load(dir),
      bundled ? PosGuesser::builtin() : PosGuesser::load(dir),
      NormalizeResources{},
      load_amenities(dir),
  });
  bundle->normalize = NormalizeResources::load(dir, bundle->text.lemmatizer);
  return bundle;
}

std::vector<Triple> extract_corpus_triples(const std::vector<ReviewRecord>& reviews, const ResourceBundle& res,
                                           const LengthFilter& filter, ExtractionCounts* counts) {
  ExtractionCounts local;
  std::vector<Triple> kept;
  for (const auto& review : reviews) {
    const auto prepared = prepare_graph_text(review.text, {}, res.text);
    auto raw = extract_review_triples(review.review_id, prepared, res.pos);
    for (auto& triple : raw) triple.sentiment = score_triple(triple, res.lexicon);
    const auto normalized = normalize_triples(raw, res.normalize);
    auto filtered = filter_triples(normalized, filter);
    local.extracted += raw.size();
    local.normalized += normalized.size();
    local.kept += filtered.size();
    kept.insert(kept.end(), std::make_move_iterator(filtered.begin()), std::make_move_iterator(filtered.end()));
  }
  local.reviews = reviews.size();
  if (counts) *counts = local;
  return kept;
}

// ---------------------------------------------------------------------------
// Workspace

namespace {

struct Artifact {
  const char* file;
  const char* producer;  // subcommand that writes it
};

constexpr Artifact kTriples{"triples.csv", "extract"};
constexpr Artifact kGraph{"graph.json", "graph build"};
constexpr Artifact kEmbeddings{"embeddings.csv", "embed"};
constexpr Artifact kModel{"model.json", "train"};

std::string hash_of(const ojson& j) { return hex64(fnv1a(j.dump())); }

std::string directory_fingerprint(const std::string& dir) {
  if (dir.empty()) return "bundled";
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw ConfigError("cannot list resource directory " + dir);
  std::sort(files.begin(), files.end());
  std::uint64_t h = fnv1a("resources");
  for (const auto& file : files) {
    h = fnv1a(file.filename().string(), h);
    h = fnv1a(read_text_file(file), h);
  }
  return hex64(h);
}

ojson class_counts_json(const Labels& labels) {
  ojson out = ojson::object();
  for (const auto& [label, count] : class_counts(labels)) out[std::to_string(label)] = count;
  return out;
}

ojson indices_json(const std::vector<std::size_t>& ids) { return ids; }

template <typename T>
std::vector<T> pick(const std::vector<T>& values, const std::vector<std::size_t>& rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(values.at(r));
  return out;
}

}  // namespace

struct Workspace::State {
  std::unique_ptr<ResourceBundle> res;
  std::optional<std::vector<ReviewRecord>> reviews;
  std::string ingest_key;
  ojson diagnostics = ojson::object();

  std::optional<std::vector<Triple>> triples;
  std::string extract_hash;
  std::optional<KnowledgeGraph> graph;
  std::string graph_hash;
  std::optional<EmbeddingTable> embeddings;
  std::string embed_hash;
  std::optional<FeatureMatrix> features;
  std::string features_hash;
  std::optional<TextCorpus> text;
  std::string text_hash;
  std::string train_hash;
};

Workspace::Workspace(RunConfig cfg, bool chain) : cfg_(std::move(cfg)), chain_(chain), state_(new State) {
  cfg_.validate();
}

Workspace::~Workspace() = default;

namespace {

class StageRunner {
 public:
  StageRunner(const RunConfig& cfg, bool chain) : cfg_(cfg), chain_(chain) {}

  fs::path path(std::string_view file) const { return fs::path(cfg_.out) / file; }

  // True when `file` exists with a sidecar recording `hash`; the sidecar's
  // diagnostics are merged into `diag`.
  bool fresh(std::string_view file, const std::string& hash, ojson& diag) const {
    const auto meta_path = path(std::string(file) + ".meta.json");
    std::error_code ec;
    if (!fs::exists(path(file), ec) || !fs::exists(meta_path, ec)) return false;
    try {
      const auto meta = ojson::parse(read_text_file(meta_path));
      if (meta.at("config_hash") != hash) return false;
      if (meta.contains("diagnostics")) {
        for (const auto& item : meta.at("diagnostics").items()) diag[item.key()] = item.value();
      }
      return true;
    } catch (const std::exception&) {
      return false;
    }
  }

  // Upstream artifact check for single-stage subcommands.
  void require(const Artifact& a, const std::string& hash, ojson& diag) const {
    if (fresh(a.file, hash, diag)) return;
    std::error_code ec;
    const bool exists = fs::exists(path(a.file), ec);
    throw StageError(a.producer, std::string(exists ? "artifact " : "missing artifact ") + path(a.file).string() +
                                     (exists ? " was produced with a different configuration" : "") +
                                     "; run `reviewgraph " + a.producer + "` first");
  }

  void write(std::string_view file, std::string_view content) const { write_text_file(path(file), content); }

  void write_meta(std::string_view file, std::string_view stage, const std::string& hash,
                  const ojson& diagnostics) const {
    ojson meta = {{"stage", stage},
                  {"config_hash", hash},
                  {"run_hash", config_hash(cfg_)},
                  {"seed", cfg_.seed},
                  {"diagnostics", diagnostics}};
    write(std::string(file) + ".meta.json", meta.dump(2) + "\n");
  }

  bool chain() const { return chain_; }

 private:
  const RunConfig& cfg_;
  bool chain_;
};

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

// The stage bodies below follow one pattern: compute the stage hash from the
// upstream hash and the relevant settings, reuse a fresh artifact, otherwise
// (when allowed) recompute and write artifact plus sidecar.

namespace {

const std::vector<ReviewRecord>& ensure_reviews(const RunConfig& cfg, Workspace::State& s) {
  if (s.reviews) return *s.reviews;
  if (cfg.input.empty()) throw ConfigError("no input file; pass --input or set \"input\"");
  const auto text = read_text_file(cfg.input);
  auto loaded = parse_reviews(text, cfg.limit);
  s.ingest_key = hash_of({{"input", hex64(fnv1a(text))}, {"limit", cfg.limit}});
  s.diagnostics["reviews_loaded"] = loaded.reviews.size();
  s.diagnostics["reviews_skipped"] = loaded.skipped;
  if (loaded.reviews.empty()) throw InputError("no usable reviews in " + cfg.input);
  s.reviews = std::move(loaded.reviews);
  return *s.reviews;
}

const ResourceBundle& ensure_resources(const RunConfig& cfg, Workspace::State& s) {
  if (!s.res) s.res = ResourceBundle::load(cfg.resources);
  return *s.res;
}

std::string extract_hash(const RunConfig& cfg, Workspace::State& s) {
  ensure_reviews(cfg, s);
  return hash_of({{"stage", "extract"},
                  {"ingest", s.ingest_key},
                  {"length_filter", {cfg.length_filter.limit, cfg.length_filter.inclusive}},
                  {"resources", directory_fingerprint(cfg.resources)},
                  {"seed", cfg.seed}});
}

void run_extract(const RunConfig& cfg, bool chain, Workspace::State& s, bool force) {
  const StageRunner io(cfg, chain);
  const auto hash = extract_hash(cfg, s);
  if (s.triples && s.extract_hash == hash) return;
  if (!force && !chain) io.require(kTriples, hash, s.diagnostics);
  if (!force && io.fresh(kTriples.file, hash, s.diagnostics)) {
    auto imported = import_triples(io.path(kTriples.file));
    s.triples = std::move(imported.triples);
  } else {
    ExtractionCounts counts;
    s.triples = extract_corpus_triples(ensure_reviews(cfg, s), ensure_resources(cfg, s), cfg.length_filter, &counts);
    const ojson diag = {{"triples_extracted", counts.extracted},
                        {"triples_normalized", counts.normalized},
                        {"triples_kept", counts.kept}};
    for (const auto& item : diag.items()) s.diagnostics[item.key()] = item.value();
    io.write(kTriples.file, triples_to_csv(*s.triples));
    io.write_meta(kTriples.file, "extract", hash, diag);
  }
  s.extract_hash = hash;
}

void run_graph(const RunConfig& cfg, bool chain, Workspace::State& s, bool force) {
  stage("extract", [&] { run_extract(cfg, chain, s, false); });
  const StageRunner io(cfg, chain);
  const auto hash = hash_of({{"stage", "graph"}, {"extract", s.extract_hash}});
  if (s.graph && s.graph_hash == hash) return;
  if (!force && !chain) io.require(kGraph, hash, s.diagnostics);
  if (!force && io.fresh(kGraph.file, hash, s.diagnostics)) {
    s.graph = from_node_link_json(read_text_file(io.path(kGraph.file)));
  } else {
    auto built = reviewgraph::build_graph(ensure_reviews(cfg, s), *s.triples, ensure_resources(cfg, s).amenities);
    aggregate_all(built.graph);
    const ojson diag = {{"graph_nodes", built.graph.node_count()},
                        {"graph_edges", built.graph.edge_count()},
                        {"triples_unmatched", built.skipped_triples},
                        {"reviews_in_graph", built.graph.nodes_with_label(NodeLabel::Review).size()}};
    for (const auto& item : diag.items()) s.diagnostics[item.key()] = item.value();
    io.write(kGraph.file, to_node_link_json(built.graph));
    io.write_meta(kGraph.file, "graph", hash, diag);
    s.graph = std::move(built.graph);
  }
  s.graph_hash = hash;
}

WalkConfig walk_config(const RunConfig& cfg) {
  auto walk = cfg.walk;
  walk.seed = mix_seed(cfg.seed, 1);
  walk.threads = cfg.threads;
  return walk;
}

void run_embed(const RunConfig& cfg, bool chain, Workspace::State& s, bool force) {
  if (cfg.pipeline != PipelineKind::ReviewGraph) throw ConfigError("embed needs pipeline \"reviewgraph\"");
  stage("graph build", [&] { run_graph(cfg, chain, s, false); });
  const StageRunner io(cfg, chain);
  const auto walk = walk_config(cfg);
  const auto hash = hash_of({{"stage", "embed"}, {"graph", s.graph_hash}, {"walk", ojson::parse(walk_config_json(walk))}});
  if (s.embeddings && s.embed_hash == hash) return;
  if (!force && !chain) io.require(kEmbeddings, hash, s.diagnostics);
  if (!force && io.fresh(kEmbeddings.file, hash, s.diagnostics)) {
    s.embeddings = parse_embeddings_csv(read_text_file(io.path(kEmbeddings.file)));
  } else {
    const auto walks = generate_walks(*s.graph, walk);
    auto trained = train_embeddings(walks, walk);
    ojson diag = {{"walks", walks.size()}, {"embedding_loss", trained.epoch_loss}};
    for (const auto& item : diag.items()) s.diagnostics[item.key()] = item.value();
    export_embeddings(trained.table, *s.graph, walk, io.path(kEmbeddings.file));
    io.write_meta(kEmbeddings.file, "embed", hash, diag);
    s.embeddings = std::move(trained.table);
  }
  s.embed_hash = hash;
}

// Feature matrix of the graph pipeline over every review.
void ensure_graph_features(const RunConfig& cfg, bool chain, Workspace::State& s) {
  stage("embed", [&] { run_embed(cfg, chain, s, false); });
  const auto hash = hash_of({{"stage", "features"}, {"embed", s.embed_hash}, {"mode", to_string(cfg.feature_mode)}});
  if (s.features && s.features_hash == hash) return;
  auto& g = *s.graph;
  const auto vectors = review_embeddings(*s.embeddings, g);
  std::map<std::size_t, SentimentAggregate> aggregates;
  std::map<std::size_t, Label> labels;
  for (auto id : g.nodes_with_label(NodeLabel::Review)) {
    const auto& node = g.node(id);
    const auto review_id = std::stoull(node.name);
    aggregates[review_id] = node.props.sentiment.value_or(SentimentAggregate{});
    if (!node.props.rating) throw InputError("review node " + node.name + " has no rating");
    labels[review_id] = *node.props.rating;
  }
  s.features = assemble(vectors, aggregates, labels, cfg.feature_mode);
  const StageRunner io(cfg, chain);
  io.write("features.csv", feature_matrix_to_csv(*s.features));
  io.write_meta("features.csv", "features", hash, {{"feature_width", s.features->width()}});
  s.features_hash = hash;
}

TextFeatureConfig text_config(const RunConfig& cfg) {
  TextFeatureConfig t;
  t.representation = parse_text_representation(cfg.representation);
  t.vocabulary = cfg.vocabulary;
  t.word2vec = cfg.word2vec;
  t.word2vec.seed = mix_seed(cfg.seed, 2);
  t.sentiment_column = cfg.sentiment_feature;
  return t;
}

void ensure_text(const RunConfig& cfg, Workspace::State& s) {
  const auto& reviews = ensure_reviews(cfg, s);
  const auto t = text_config(cfg);
  const auto hash = hash_of({{"stage", "text"},
                             {"ingest", s.ingest_key},
                             {"representation", cfg.representation},
                             {"vocabulary", {t.vocabulary.min_df, t.vocabulary.max_features}},
                             {"word2vec", {t.word2vec.dims, t.word2vec.window, t.word2vec.epochs, t.word2vec.negatives,
                                           t.word2vec.learning_rate, t.word2vec.min_count}},
                             {"sentiment_feature", cfg.sentiment_feature},
                             {"resources", directory_fingerprint(cfg.resources)},
                             {"seed", cfg.seed}});
  if (s.text && s.text_hash == hash) return;
  const auto& res = ensure_resources(cfg, s);
  s.text = TextCorpus::prepare(reviews, res.text, res.lexicon);
  s.text_hash = hash;
}

ModelPipeline model_pipeline(const RunConfig& cfg) {
  ModelPipeline p;
  p.sampling = cfg.sampling;
  p.classifier.kind = cfg.classifier;
  p.classifier.forest = cfg.forest;
  p.classifier.forest.threads = cfg.threads;
  p.classifier.logistic = cfg.logistic;
  p.classifier.mlp = cfg.mlp;
  return p;
}

ojson classifier_key(const RunConfig& cfg) {
  auto j = run_config_json(cfg);
  return {{"sampling", j["sampling"]}, {"classifier", j["classifier"]}, {"forest", j["forest"]},
          {"logistic", j["logistic"]}, {"mlp", j["mlp"]}};
}

std::string upstream_hash(const RunConfig& cfg, bool chain, Workspace::State& s) {
  if (cfg.pipeline == PipelineKind::ReviewGraph) {
    ensure_graph_features(cfg, chain, s);
    return s.features_hash;
  }
  stage("ingest", [&] { ensure_text(cfg, s); });
  return s.text_hash;
}

void run_train(const RunConfig& cfg, bool chain, Workspace::State& s, bool force) {
  if (cfg.pipeline == PipelineKind::SubsetBaseline) throw ConfigError("train does not apply to subset-baseline");
  const auto upstream = upstream_hash(cfg, chain, s);
  const StageRunner io(cfg, chain);
  const auto hash = hash_of({{"stage", "train"},
                             {"features", upstream},
                             {"model", classifier_key(cfg)},
                             {"test_fraction", cfg.test_fraction},
                             {"seed", cfg.seed}});
  if (s.train_hash == hash) return;
  if (!force && io.fresh(kModel.file, hash, s.diagnostics) && io.fresh("test_features.csv", hash, s.diagnostics)) {
    s.train_hash = hash;
    return;
  }
  if (!force && !chain) io.require(kModel, hash, s.diagnostics);

  FeatureMatrix train, test;
  ojson diag = ojson::object();
  if (cfg.pipeline == PipelineKind::ReviewGraph) {
    std::tie(train, test) = train_test_split(*s.features, cfg.test_fraction, cfg.seed);
  } else {
    const auto split = train_test_split(s.text->labels.size(), cfg.test_fraction, cfg.seed);
    const auto t = text_config(cfg);
    std::string note;
    std::tie(train, test) = text_features(*s.text, split.train, split.test, t, &note);
    diag["text_features"] = note;
    if (t.representation != TextRepresentation::Word2Vec) {
      const auto vocab = Vocabulary::fit(pick(s.text->classic, split.train), t.vocabulary);
      io.write("vocabulary.tsv", vocab.to_tsv());
      diag["vocabulary_size"] = vocab.size();
    }
  }
  const auto pipeline = model_pipeline(cfg);
  const auto fitted = fit_pipeline(train, pipeline, cfg.seed);
  diag["n_train"] = train.size();
  diag["n_test"] = test.size();
  diag["train_class_counts"] = class_counts_json(train.labels);
  diag["test_class_counts"] = class_counts_json(test.labels);
  diag["sampled_class_counts"] = class_counts_json(pick(train.labels, fitted.sample_indices));
  for (const auto& item : diag.items()) s.diagnostics[item.key()] = item.value();

  // The scaler is folded into the saved artifact as part of the pipeline.
  ojson model = ojson::parse(model_to_json(fitted.model));
  if (fitted.scaler) {
    const auto& sc = *fitted.scaler;
    model["scaler"] = {{"mean", std::vector<double>(sc.mean.data(), sc.mean.data() + sc.mean.size())},
                       {"scale", std::vector<double>(sc.scale.data(), sc.scale.data() + sc.scale.size())}};
  }
  model["config_hash"] = hash;
  io.write(kModel.file, model.dump(1) + "\n");
  io.write_meta(kModel.file, "train", hash, diag);
  io.write("split.json", ojson{{"train_ids", indices_json(train.row_ids)}, {"test_ids", indices_json(test.row_ids)}}
                             .dump() + "\n");
  io.write("test_features.csv", feature_matrix_to_csv(test));
  io.write_meta("test_features.csv", "train", hash, ojson::object());
  s.train_hash = hash;
}

FittedPipeline load_fitted(const fs::path& path) {
  const auto text = read_text_file(path);
  FittedPipeline fitted;
  fitted.model = model_from_json(text);
  const auto j = ojson::parse(text);
  if (j.contains("scaler")) {
    const auto mean = j.at("scaler").at("mean").get<std::vector<double>>();
    const auto scale = j.at("scaler").at("scale").get<std::vector<double>>();
    Scaler sc;
    sc.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    sc.scale = Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size()));
    fitted.scaler = sc;
  }
  return fitted;
}

ojson report_config(const RunConfig& cfg, const std::string& stage_hash, const ojson& diagnostics) {
  return {{"config_hash", config_hash(cfg)},
          {"stage_hash", stage_hash},
          {"seed", cfg.seed},
          {"run", result_config_json(cfg)},
          {"diagnostics", diagnostics}};
}

}  // namespace

CorpusStats Workspace::stats() {
  return stage("stats", [&] {
    auto result = corpus_stats(ensure_reviews(cfg_, *state_));
    StageRunner(cfg_, chain_).write("stats.json", corpus_stats_json(result).dump(2) + "\n");
    return result;
  });
}

void Workspace::extract() {
  stage("extract", [&] { run_extract(cfg_, chain_, *state_, true); });
}

void Workspace::build_graph() {
  stage("graph build", [&] { run_graph(cfg_, chain_, *state_, true); });
}

fs::path Workspace::export_graph(GraphFormat format) {
  return stage("graph export", [&] {
    run_graph(cfg_, chain_, *state_, false);
    fs::path target = fs::path(cfg_.out);
    switch (format) {
      case GraphFormat::NodeLinkJson:
        target /= "graph_export.json";
        break;
      case GraphFormat::GraphMl:
        target /= "graph.graphml";
        break;
      case GraphFormat::CsvPair:
        target /= "graph_csv";
        break;
    }
    reviewgraph::export_graph(*state_->graph, format, target);
    return target;
  });
}

void Workspace::embed() {
  stage("embed", [&] { run_embed(cfg_, chain_, *state_, true); });
}

void Workspace::train() {
  stage("train", [&] { run_train(cfg_, chain_, *state_, true); });
}

MetricsReport Workspace::evaluate() {
  return stage("eval", [&] {
    auto& s = *state_;
    run_train(cfg_, chain_, s, false);
    const StageRunner io(cfg_, chain_);
    const auto fitted = load_fitted(io.path(kModel.file));
    const auto test = parse_feature_matrix_csv(read_text_file(io.path("test_features.csv")));
    const auto predictions = apply_pipeline(fitted, test.rows);
    auto report = evaluate_predictions(test.labels, predictions);
    report.config = report_config(cfg_, hash_of({{"stage", "eval"}, {"train", s.train_hash}}), s.diagnostics);

    std::string rows = "review_id,label,predicted\n";
    for (std::size_t i = 0; i < test.size(); ++i) {
      rows += std::to_string(test.row_ids[i]) + "," + std::to_string(test.labels[i]) + "," +
              std::to_string(predictions[i]) + "\n";
    }
    io.write("predictions.csv", rows);
    io.write("histogram.csv", histogram_csv(report.histogram));
    io.write("report.json", report_to_json(report));
    return report;
  });
}

CvReport Workspace::cv() {
  return stage("cv", [&] {
    auto& s = *state_;
    if (cfg_.pipeline == PipelineKind::SubsetBaseline) throw ConfigError("cv does not apply to subset-baseline");
    const auto upstream = upstream_hash(cfg_, chain_, s);
    CvOptions options;
    options.k = cfg_.k;
    options.stratified = cfg_.stratified;
    options.threads = cfg_.threads;
    const auto pipeline = model_pipeline(cfg_);
    CvReport report;
    if (cfg_.pipeline == PipelineKind::ReviewGraph) {
      report = kfold_cv(*s.features, pipeline, cfg_.seed, options);
    } else {
      const auto t = text_config(cfg_);
      const auto& corpus = *s.text;
      FoldFeatures features = [&](const std::vector<std::size_t>& train, const std::vector<std::size_t>& test,
                                  std::string& note) { return text_features(corpus, train, test, t, &note); };
      report = kfold_cv(corpus.labels, features, pipeline, cfg_.seed, options);
    }
    const auto hash = hash_of({{"stage", "cv"},
                               {"features", upstream},
                               {"model", classifier_key(cfg_)},
                               {"k", cfg_.k},
                               {"stratified", cfg_.stratified},
                               {"seed", cfg_.seed}});
    report.mean.config = report_config(cfg_, hash, s.diagnostics);
    const StageRunner io(cfg_, chain_);
    io.write("cv_folds.csv", cv_table_csv(report));
    io.write_meta("cv_folds.csv", "cv", hash, ojson::object());
    ojson folds = ojson::array();
    for (const auto& fold : report.folds) {
      auto j = report_json(fold.metrics);
      j.erase("config");
      j["fold"] = fold.fold;
      if (!fold.note.empty()) j["note"] = fold.note;
      folds.push_back(std::move(j));
    }
    auto doc = report_json(report.mean);
    doc["folds"] = std::move(folds);
    io.write("cv_report.json", doc.dump(2) + "\n");
    return report;
  });
}

MetricsReport Workspace::run() {
  MetricsReport report;
  if (cfg_.pipeline == PipelineKind::SubsetBaseline) {
    report = stage("subset-baseline", [&] {
      const auto& reviews = ensure_reviews(cfg_, *state_);
      auto result = subset_baseline(reviews, cfg_.subset_n, cfg_.seed, cfg_.vocabulary);
      state_->diagnostics["n_train"] = result.train.size();
      state_->diagnostics["n_test"] = result.test.size();
      auto r = result.report;
      r.config = report_config(cfg_, hash_of({{"stage", "subset"}, {"ingest", state_->ingest_key},
                                              {"n", cfg_.subset_n}, {"seed", cfg_.seed}}),
                               state_->diagnostics);
      return r;
    });
  } else if (cfg_.eval == EvalMode::Cv) {
    report = cv().mean;
  } else {
    return evaluate();
  }
  const StageRunner io(cfg_, chain_);
  io.write("histogram.csv", histogram_csv(report.histogram));
  io.write("report.json", report_to_json(report));
  return report;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

void set_dotted(ojson& j, const std::string& key, const ojson& value) {
  ojson* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const auto part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = ojson::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::string cell(const ojson& value) { return value.is_string() ? value.get<std::string>() : value.dump(); }

}  // namespace

std::string run_sweep(const ojson& sweep, std::size_t jobs) {
  if (!sweep.is_object()) throw ConfigError("sweep file must be a JSON object");
  for (const auto& item : sweep.items()) {
    if (item.key() != "base" && item.key() != "grid") throw ConfigError("unknown sweep key '" + item.key() + "'");
  }
  const ojson base = sweep.value("base", ojson::object());
  if (!sweep.contains("grid") || !sweep.at("grid").is_object()) throw ConfigError("sweep needs a \"grid\" object");
  const auto& grid = sweep.at("grid");
  std::vector<std::string> keys;
  std::vector<std::vector<ojson>> values;
  for (const auto& item : grid.items()) {
    if (!item.value().is_array() || item.value().empty()) {
      throw ConfigError("sweep grid entry '" + item.key() + "' must be a non-empty array");
    }
    keys.push_back(item.key());
    values.emplace_back(item.value().begin(), item.value().end());
  }
  const auto base_cfg = run_config_from_json(base);

  std::vector<std::vector<std::size_t>> combos{{}};
  for (const auto& options : values) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& combo : combos) {
      for (std::size_t i = 0; i < options.size(); ++i) {
        auto extended = combo;
        extended.push_back(i);
        next.push_back(std::move(extended));
      }
    }
    combos = std::move(next);
  }

  std::vector<RunConfig> configs;
  for (std::size_t r = 0; r < combos.size(); ++r) {
    ojson j = base;
    for (std::size_t k = 0; k < keys.size(); ++k) set_dotted(j, keys[k], values[k][combos[r][k]]);
    j["out"] = (fs::path(base_cfg.out) / ("run_" + std::to_string(r))).string();
    configs.push_back(run_config_from_json(j));
  }

  std::vector<MetricsReport> reports(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::mutex log_mutex;
  auto work = [&](std::size_t r) {
    try {
      reports[r] = Workspace(configs[r]).run();
      std::lock_guard lock(log_mutex);
      std::cerr << "sweep run " << r + 1 << "/" << configs.size() << " done\n";
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, configs.size());
  if (threads == 1) {
    for (std::size_t r = 0; r < configs.size(); ++r) work(r);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < configs.size(); r += threads) work(r);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  csv::Row header{"run"};
  header.insert(header.end(), keys.begin(), keys.end());
  for (const char* metric : {"accuracy", "mae", "rmse", "mse", "kappa", "n_test"}) header.emplace_back(metric);
  std::string out = csv::join(header) + "\n";
  for (std::size_t r = 0; r < configs.size(); ++r) {
    csv::Row row{std::to_string(r)};
    for (std::size_t k = 0; k < keys.size(); ++k) row.push_back(cell(values[k][combos[r][k]]));
    const auto& m = reports[r];
    row.push_back(format_double(m.accuracy));
    row.push_back(format_double(m.mae));
    row.push_back(format_double(m.rmse));
    row.push_back(format_double(m.mse));
    row.push_back(format_double(m.kappa));
    row.push_back(std::to_string(m.n_test));
    out += csv::join(row) + "\n";
  }
  write_text_file(fs::path(base_cfg.out) / "sweep.csv", out);
  return out;
}

}  // namespace reviewgraph
