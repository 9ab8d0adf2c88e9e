#include "reviewgraph/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <unordered_set>

#include "reviewgraph/sgns.hpp"

namespace reviewgraph {

Vocabulary Vocabulary::fit(const std::vector<TokenList>& docs, const VocabularyConfig& cfg) {
  if (docs.empty()) throw DomainError("vocabulary: empty corpus");
  std::map<std::string, std::pair<std::size_t, std::size_t>> stats;  // token -> (df, term frequency)
  for (const auto& doc : docs) {
    std::unordered_set<std::string_view> seen;
    for (const auto& token : doc) {
      auto& entry = stats[token];
      ++entry.second;
      if (seen.insert(token).second) ++entry.first;
    }
  }
  std::vector<std::string> kept;
  for (const auto& [token, s] : stats) {
    if (s.first >= cfg.min_df) kept.push_back(token);
  }
  if (cfg.max_features > 0 && kept.size() > cfg.max_features) {
    std::stable_sort(kept.begin(), kept.end(),
                     [&](const std::string& a, const std::string& b) { return stats[a].second > stats[b].second; });
    kept.resize(cfg.max_features);
    std::sort(kept.begin(), kept.end());
  }

  Vocabulary vocab;
  vocab.n_documents_ = docs.size();
  for (auto& token : kept) {
    vocab.index_.emplace(token, vocab.tokens_.size());
    vocab.df_.push_back(stats[token].first);
    vocab.tokens_.push_back(std::move(token));
  }
  return vocab;
}

std::optional<std::size_t> Vocabulary::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += tokens_[i] + "\t" + std::to_string(i) + "\t" + std::to_string(df_[i]) + "\n";
  }
  return out;
}

Matrix count_matrix(const Vocabulary& vocab, const std::vector<TokenList>& docs) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t r = 0; r < docs.size(); ++r) {
    for (const auto& token : docs[r]) {
      if (auto col = vocab.index(token)) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(*col)) += 1.0;
    }
  }
  return m;
}

Vector inverse_document_frequency(const Vocabulary& vocab) {
  Vector idf(static_cast<Eigen::Index>(vocab.size()));
  const double n = static_cast<double>(vocab.n_documents());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    idf[static_cast<Eigen::Index>(i)] = std::log((1.0 + n) / (1.0 + static_cast<double>(vocab.df(i)))) + 1.0;
  }
  return idf;
}

Matrix tfidf_matrix(const Vocabulary& vocab, const std::vector<TokenList>& docs) {
  Matrix m = count_matrix(vocab, docs);
  m = m * inverse_document_frequency(vocab).asDiagonal();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double norm = m.row(r).norm();
    if (norm > 0.0) m.row(r) /= norm;
  }
  return m;
}

Vectorized bow_vectorize(const std::vector<TokenList>& docs, const VocabularyConfig& cfg) {
  auto vocab = Vocabulary::fit(docs, cfg);
  Matrix rows = count_matrix(vocab, docs);
  return {std::move(vocab), std::move(rows)};
}

Vectorized tfidf_vectorize(const std::vector<TokenList>& docs, const VocabularyConfig& cfg) {
  auto vocab = Vocabulary::fit(docs, cfg);
  Matrix rows = tfidf_matrix(vocab, docs);
  return {std::move(vocab), std::move(rows)};
}

Vector Word2VecModel::review_vector(const TokenList& doc) const {
  Vector sum = Vector::Zero(vectors.rows());
  std::size_t known = 0;
  for (const auto& token : doc) {
    if (auto it = index.find(token); it != index.end()) {
      sum += vectors.col(static_cast<Eigen::Index>(it->second));
      ++known;
    }
  }
  if (known > 0) sum /= static_cast<double>(known);
  return sum;
}

Word2VecModel train_word2vec(const std::vector<TokenList>& docs, const Word2VecConfig& cfg) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : docs) {
    for (const auto& token : doc) ++counts[token];
  }
  Word2VecModel model;
  for (const auto& [token, count] : counts) {
    if (count >= cfg.min_count) model.index.emplace(token, model.index.size());
  }
  if (model.index.empty()) throw DomainError("word2vec: no tokens to train on");

  std::vector<std::vector<std::size_t>> sequences;
  sequences.reserve(docs.size());
  for (const auto& doc : docs) {
    std::vector<std::size_t> ids;
    for (const auto& token : doc) {
      if (auto it = model.index.find(token); it != model.index.end()) ids.push_back(it->second);
    }
    sequences.push_back(std::move(ids));
  }
  SkipGramConfig sg;
  sg.dims = cfg.dims;
  sg.window = cfg.window;
  sg.epochs = cfg.epochs;
  sg.negatives = cfg.negatives;
  sg.learning_rate = cfg.learning_rate;
  sg.seed = mix_seed(cfg.seed, 0x3d2);
  auto trained = train_skipgram(sequences, model.index.size(), sg);
  model.vectors = std::move(trained.input);
  model.epoch_loss = std::move(trained.epoch_loss);
  if (!model.vectors.allFinite()) throw TrainingError("word2vec: non-finite word vectors");
  return model;
}

Matrix word2vec_review_vectors(const Word2VecModel& model, const std::vector<TokenList>& docs) {
  Matrix m(static_cast<Eigen::Index>(docs.size()), model.vectors.rows());
  for (std::size_t r = 0; r < docs.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = model.review_vector(docs[r]);
  return m;
}

Matrix word2vec_review_vectors(const std::vector<TokenList>& docs, const Word2VecConfig& cfg) {
  return word2vec_review_vectors(train_word2vec(docs, cfg), docs);
}

Vector review_sentiment_column(const std::vector<ReviewRecord>& reviews, const Lexicon& lexicon) {
  Vector column(static_cast<Eigen::Index>(reviews.size()));
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    column[static_cast<Eigen::Index>(i)] = score_text(reviews[i].text, lexicon);
  }
  return column;
}

TextRepresentation parse_text_representation(std::string_view name) {
  if (name == "bow") return TextRepresentation::Bow;
  if (name == "tfidf") return TextRepresentation::Tfidf;
  if (name == "word2vec") return TextRepresentation::Word2Vec;
  throw DomainError("unknown text representation '" + std::string(name) + "'");
}

std::string_view to_string(TextRepresentation rep) {
  switch (rep) {
    case TextRepresentation::Bow:
      return "bow";
    case TextRepresentation::Tfidf:
      return "tfidf";
    case TextRepresentation::Word2Vec:
      return "word2vec";
  }
  return "tfidf";
}

TextCorpus TextCorpus::prepare(const std::vector<ReviewRecord>& reviews, const TextResources& res,
                               const Lexicon& lexicon) {
  TextCorpus corpus;
  corpus.classic.reserve(reviews.size());
  corpus.minimal.reserve(reviews.size());
  for (const auto& review : reviews) {
    corpus.classic.push_back(prepare_classic(review.text, res));
    corpus.minimal.push_back(prepare_word2vec(review.text));
    corpus.labels.push_back(review.rating);
    corpus.ids.push_back(review.review_id);
  }
  corpus.sentiment = review_sentiment_column(reviews, lexicon);
  return corpus;
}

namespace {

template <typename T>
std::vector<T> pick(const std::vector<T>& values, const std::vector<std::size_t>& rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(values.at(r));
  return out;
}

FeatureMatrix wrap(Matrix rows, std::vector<std::string> names, const TextCorpus& corpus,
                   const std::vector<std::size_t>& picked, bool sentiment) {
  FeatureMatrix m;
  m.rows = std::move(rows);
  m.feature_names = std::move(names);
  m.labels = pick(corpus.labels, picked);
  m.row_ids = pick(corpus.ids, picked);
  if (sentiment) {
    Vector column(static_cast<Eigen::Index>(picked.size()));
    for (std::size_t i = 0; i < picked.size(); ++i) column[static_cast<Eigen::Index>(i)] = corpus.sentiment[static_cast<Eigen::Index>(picked[i])];
    m = append_column(m, "review_sentiment", column);
  }
  return m;
}

}  // namespace

std::pair<FeatureMatrix, FeatureMatrix> text_features(const TextCorpus& corpus, const std::vector<std::size_t>& train,
                                                      const std::vector<std::size_t>& test,
                                                      const TextFeatureConfig& cfg, std::string* note) {
  Matrix train_rows, test_rows;
  std::vector<std::string> names;
  if (cfg.representation == TextRepresentation::Word2Vec) {
    const auto model = train_word2vec(pick(corpus.minimal, train), cfg.word2vec);
    train_rows = word2vec_review_vectors(model, pick(corpus.minimal, train));
    test_rows = word2vec_review_vectors(model, pick(corpus.minimal, test));
    for (std::size_t d = 0; d < cfg.word2vec.dims; ++d) names.push_back("w2v_" + std::to_string(d));
    if (note) *note = "word_vectors=" + std::to_string(model.index.size());
  } else {
    const auto train_docs = pick(corpus.classic, train);
    const auto test_docs = pick(corpus.classic, test);
    const auto vocab = Vocabulary::fit(train_docs, cfg.vocabulary);
    if (cfg.representation == TextRepresentation::Bow) {
      train_rows = count_matrix(vocab, train_docs);
      test_rows = count_matrix(vocab, test_docs);
    } else {
      // idf comes from the training documents only.
      train_rows = tfidf_matrix(vocab, train_docs);
      test_rows = tfidf_matrix(vocab, test_docs);
    }
    for (const auto& token : vocab.tokens()) names.push_back("tok_" + token);
    if (note) *note = "vocabulary=" + std::to_string(vocab.size()) + " fingerprint=" + hex64(fnv1a(vocab.to_tsv()));
  }
  return {wrap(std::move(train_rows), names, corpus, train, cfg.sentiment_column),
          wrap(std::move(test_rows), names, corpus, test, cfg.sentiment_column)};
}

SubsetResult subset_baseline(const std::vector<ReviewRecord>& reviews, std::size_t n, std::uint64_t seed,
                             const VocabularyConfig& vocab) {
  if (n == 0 || n >= reviews.size()) throw DomainError("subset_baseline: n must lie in [1, corpus size)");
  SubsetResult result;
  std::vector<std::size_t> order(reviews.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 engine(mix_seed(seed, 0x5b5));
  shuffle(order, engine);
  result.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
  result.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n), order.end());
  std::sort(result.train.begin(), result.train.end());
  std::sort(result.test.begin(), result.test.end());

  const auto corpus = TextCorpus::prepare(reviews);
  TextFeatureConfig cfg;
  cfg.representation = TextRepresentation::Tfidf;
  cfg.vocabulary = vocab;
  auto [train, test] = text_features(corpus, result.train, result.test, cfg);
  ModelPipeline pipeline;
  pipeline.classifier.kind = ClassifierKind::Logistic;
  pipeline.scale = false;
  result.report = evaluate_split(train, test, pipeline, seed);
  return result;
}

}  // namespace reviewgraph
