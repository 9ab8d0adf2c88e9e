#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reviewgraph/common.hpp"
#include "reviewgraph/corpus.hpp"
#include "reviewgraph/evaluate.hpp"
#include "reviewgraph/sentiment.hpp"
#include "reviewgraph/textprep.hpp"

namespace reviewgraph {

struct VocabularyConfig {
  std::size_t min_df = 1;
  std::size_t max_features = 0;  // 0: unlimited; otherwise the most frequent terms
};

/// Token to column map with document frequencies. Columns follow the
/// alphabetical (byte) order of the tokens.
class Vocabulary {
 public:
  /// Throws DomainError on an empty corpus.
  static Vocabulary fit(const std::vector<TokenList>& docs, const VocabularyConfig& cfg = {});

  std::size_t size() const { return tokens_.size(); }
  std::size_t n_documents() const { return n_documents_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t df(std::size_t column) const { return df_.at(column); }
  std::optional<std::size_t> index(std::string_view token) const;

  /// `token<TAB>index<TAB>df` per line.
  std::string to_tsv() const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t n_documents_ = 0;
};

/// Raw counts; tokens outside the vocabulary are ignored.
Matrix count_matrix(const Vocabulary& vocab, const std::vector<TokenList>& docs);
/// idf = ln((1 + N) / (1 + df)) + 1 from the vocabulary's own corpus.
Vector inverse_document_frequency(const Vocabulary& vocab);
/// Counts times idf, rows scaled to unit L2 norm (zero rows stay zero).
Matrix tfidf_matrix(const Vocabulary& vocab, const std::vector<TokenList>& docs);

struct Vectorized {
  Vocabulary vocabulary;
  Matrix rows;
};
Vectorized bow_vectorize(const std::vector<TokenList>& docs, const VocabularyConfig& cfg = {});
Vectorized tfidf_vectorize(const std::vector<TokenList>& docs, const VocabularyConfig& cfg = {});

struct Word2VecConfig {
  std::size_t dims = 100;
  std::size_t window = 5;
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  double learning_rate = 0.025;
  std::size_t min_count = 1;
  std::uint64_t seed = 0;
};

struct Word2VecModel {
  std::unordered_map<std::string, std::size_t> index;
  Matrix vectors;  // dims x vocabulary
  std::vector<double> epoch_loss;

  /// Mean of the in-vocabulary word vectors; zero when none is known.
  Vector review_vector(const TokenList& doc) const;
};

/// Skip-gram over the documents; throws DomainError when every document is empty.
Word2VecModel train_word2vec(const std::vector<TokenList>& docs, const Word2VecConfig& cfg);
/// n x dims matrix of review vectors.
Matrix word2vec_review_vectors(const Word2VecModel& model, const std::vector<TokenList>& docs);
/// Trains on `docs` and returns their review vectors.
Matrix word2vec_review_vectors(const std::vector<TokenList>& docs, const Word2VecConfig& cfg);

/// score_text of every review body.
Vector review_sentiment_column(const std::vector<ReviewRecord>& reviews, const Lexicon& lexicon = Lexicon::builtin());

enum class TextRepresentation { Bow, Tfidf, Word2Vec };

TextRepresentation parse_text_representation(std::string_view name);
std::string_view to_string(TextRepresentation rep);

struct TextFeatureConfig {
  TextRepresentation representation = TextRepresentation::Tfidf;
  VocabularyConfig vocabulary;
  Word2VecConfig word2vec;
  bool sentiment_column = false;
};

/// Per-review inputs of the text baselines, prepared once.
struct TextCorpus {
  std::vector<TokenList> classic;  // for bag-of-words and tf-idf
  std::vector<TokenList> minimal;  // for word2vec
  Vector sentiment;                // review body score
  Labels labels;
  std::vector<std::size_t> ids;

  static TextCorpus prepare(const std::vector<ReviewRecord>& reviews, const TextResources& res = TextResources::builtin(),
                            const Lexicon& lexicon = Lexicon::builtin());
};

/// Fits the representation on the `train` rows only and featurises both
/// sides. `note` receives the vocabulary size / word-vector count.
std::pair<FeatureMatrix, FeatureMatrix> text_features(const TextCorpus& corpus, const std::vector<std::size_t>& train,
                                                      const std::vector<std::size_t>& test,
                                                      const TextFeatureConfig& cfg, std::string* note = nullptr);

struct SubsetResult {
  MetricsReport report;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded sample of n reviews for training, the rest for testing; classic
/// prep, tf-idf and logistic regression. Throws DomainError unless
/// 0 < n < reviews.size().
SubsetResult subset_baseline(const std::vector<ReviewRecord>& reviews, std::size_t n, std::uint64_t seed,
                             const VocabularyConfig& vocab = {});

}  // namespace reviewgraph
