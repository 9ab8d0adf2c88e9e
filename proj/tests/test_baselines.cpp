#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "reviewgraph/baselines.hpp"
#include "test_support.hpp"

using namespace reviewgraph;

namespace {

std::vector<ReviewRecord> toy_reviews(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> good = {"lovely", "clean", "friendly", "great", "quiet"};
  const std::vector<std::string> bad = {"dirty", "rude", "noisy", "awful", "broken"};
  std::vector<ReviewRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Label rating = static_cast<Label>(1 + rng() % 5);
    const auto& pool = rating >= 4 ? good : bad;
    std::string text = "The room was " + pool[rng() % pool.size()] + " and the staff " + pool[rng() % pool.size()] + ".";
    out.push_back({i, "h" + std::to_string(rng() % 3), rating, "", text});
  }
  return out;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("bag of words counts") {
    const auto v = bow_vectorize({{"a", "b"}, {"a"}});
    Matrix expected(2, 2);
    expected << 1, 1, 1, 0;
    CHECK(v.rows == expected);
    CHECK(v.vocabulary.tokens() == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("empty documents give zero rows, row sums count known tokens") {
    const std::vector<TokenList> docs = {{"x", "y", "x"}, {}, {"y"}};
    const auto v = bow_vectorize(docs);
    CHECK(v.rows.row(1).isZero(0.0));
    CHECK(v.rows.row(0).sum() == 3);
    CHECK(v.rows.col(*v.vocabulary.index("y")).sum() == 2);
    CHECK(count_matrix(v.vocabulary, {{"unknown", "x"}}).sum() == 1);
  }

  TEST_CASE("vocabulary settings") {
    const std::vector<TokenList> docs = {{"a", "b", "c"}, {"a", "b"}, {"a"}};
    CHECK(Vocabulary::fit(docs, {2, 0}).tokens() == std::vector<std::string>{"a", "b"});
    CHECK(Vocabulary::fit(docs, {1, 1}).tokens() == std::vector<std::string>{"a"});
    CHECK(Vocabulary::fit(docs).df(0) == 3);
    CHECK_THROWS_AS(Vocabulary::fit({}), DomainError);
  }

  TEST_CASE("idf is one for a term in every document") {
    const auto vocab = Vocabulary::fit({{"a", "b"}, {"a"}});
    const auto idf = inverse_document_frequency(vocab);
    CHECK(idf[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(idf[1] == doctest::Approx(std::log(3.0 / 2.0) + 1.0).epsilon(1e-12));
  }

  TEST_CASE("tf-idf of disjoint single-token documents is the identity") {
    const auto v = tfidf_vectorize({{"a"}, {"b"}});
    CHECK(v.rows.isApprox(Matrix::Identity(2, 2), 1e-15));
  }

  TEST_CASE("tf-idf rows have unit norm") {
    std::mt19937_64 rng(3);
    std::vector<TokenList> docs(30);
    for (auto& d : docs) {
      const auto len = rng() % 8;
      for (std::size_t i = 0; i < len; ++i) d.push_back(std::string(1, static_cast<char>('a' + rng() % 10)));
    }
    docs[0] = {"a"};
    const auto v = tfidf_vectorize(docs);
    for (Eigen::Index i = 0; i < v.rows.rows(); ++i) {
      const double norm = v.rows.row(i).norm();
      if (docs[static_cast<std::size_t>(i)].empty()) {
        CHECK(norm == 0.0);
      } else {
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("word2vec review vectors") {
    Word2VecConfig cfg;
    cfg.dims = 7;
    cfg.epochs = 2;
    const auto model = train_word2vec({{"pool", "warm"}, {"bed", "soft"}}, cfg);
    CHECK(model.vectors.rows() == 7);
    CHECK(model.review_vector({"nothing", "known"}).isZero(0.0));
    const Vector mean = (model.vectors.col(model.index.at("pool")) + model.vectors.col(model.index.at("bed"))) / 2;
    CHECK(model.review_vector({"pool", "bed", "unknown"}).isApprox(mean));
    CHECK(word2vec_review_vectors(model, {{"pool"}, {}}).rows() == 2);
    CHECK_THROWS_AS(train_word2vec({{}, {}}, cfg), DomainError);
  }

  TEST_CASE("word2vec separates two topics") {
    const std::vector<std::string> a = {"pool", "swim", "water", "towel", "sun"};
    const std::vector<std::string> b = {"bed", "pillow", "sheet", "blanket", "mattress"};
    int separated = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(seed + 100);
      std::vector<TokenList> docs;
      for (int i = 0; i < 200; ++i) {
        const auto& topic = i % 2 ? a : b;
        TokenList d;
        for (int w = 0; w < 8; ++w) d.push_back(topic[rng() % topic.size()]);
        docs.push_back(d);
      }
      Word2VecConfig cfg;
      cfg.dims = 10;
      cfg.epochs = 5;
      cfg.seed = seed;
      const auto model = train_word2vec(docs, cfg);
      auto vec = [&](const std::string& w) { return Vector(model.vectors.col(model.index.at(w))); };
      double within = 0, across = 0;
      int n_within = 0, n_across = 0;
      for (const auto& group : {a, b}) {
        for (std::size_t i = 0; i < group.size(); ++i) {
          for (std::size_t j = i + 1; j < group.size(); ++j, ++n_within) within += testing::cosine(vec(group[i]), vec(group[j]));
        }
      }
      for (const auto& x : a) {
        for (const auto& y : b) {
          across += testing::cosine(vec(x), vec(y));
          ++n_across;
        }
      }
      separated += within / n_within - across / n_across >= 0.1;
    }
    CHECK(separated >= 6);
  }

  TEST_CASE("word2vec is deterministic for a seed") {
    Word2VecConfig cfg;
    cfg.dims = 5;
    cfg.seed = 4;
    const std::vector<TokenList> docs = {{"a", "b", "c"}, {"c", "d"}};
    CHECK(train_word2vec(docs, cfg).vectors == train_word2vec(docs, cfg).vectors);
  }

  TEST_CASE("sentiment column has one entry per review") {
    const auto reviews = toy_reviews(12, 1);
    const auto column = review_sentiment_column(reviews);
    CHECK(column.size() == 12);
    for (Eigen::Index i = 0; i < column.size(); ++i) CHECK(std::abs(column[i]) < 1.0);
  }

  TEST_CASE("text features fit on training rows only") {
    const auto reviews = toy_reviews(40, 2);
    auto corpus = TextCorpus::prepare(reviews);
    std::vector<std::size_t> train(30), test(10);
    std::iota(train.begin(), train.end(), 0);
    std::iota(test.begin(), test.end(), 30);
    TextFeatureConfig cfg;
    cfg.representation = TextRepresentation::Bow;
    std::string note;
    const auto [tr, te] = text_features(corpus, train, test, cfg, &note);
    std::set<std::string> train_tokens;
    for (auto i : train) train_tokens.insert(corpus.classic[i].begin(), corpus.classic[i].end());
    CHECK(tr.width() == train_tokens.size());
    CHECK(te.width() == tr.width());
    CHECK(tr.size() == 30);
    CHECK(te.size() == 10);
    CHECK(te.row_ids.front() == 30);
    CHECK_FALSE(note.empty());

    // Changing test text does not change the training matrix.
    corpus.classic[35] = {"zzz_unseen"};
    const auto again = text_features(corpus, train, test, cfg);
    CHECK(again.first.rows == tr.rows);
    CHECK(again.second.rows.row(5).isZero(0.0));

    cfg.sentiment_column = true;
    const auto with_sentiment = text_features(corpus, train, test, cfg);
    CHECK(with_sentiment.first.width() == tr.width() + 1);
    CHECK(with_sentiment.first.rows.col(static_cast<Eigen::Index>(tr.width()))(0) == corpus.sentiment[0]);

    for (auto rep : {TextRepresentation::Tfidf, TextRepresentation::Word2Vec}) {
      cfg.representation = rep;
      cfg.sentiment_column = false;
      cfg.word2vec.dims = 6;
      const auto [a, b] = text_features(corpus, train, test, cfg);
      CHECK(a.size() == 30);
      CHECK(b.width() == a.width());
    }
  }

  TEST_CASE("subset baseline partitions the reviews") {
    const auto reviews = toy_reviews(30, 3);
    const auto r = subset_baseline(reviews, 29, 1);
    CHECK(r.test.size() == 1);
    CHECK(r.report.n_test == 1);
    const auto half = subset_baseline(reviews, 15, 2);
    std::vector<std::size_t> all = half.train;
    all.insert(all.end(), half.test.begin(), half.test.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(30);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(all == expected);
    CHECK(half.train.size() == 15);
    CHECK_THROWS_AS(subset_baseline(reviews, 30, 1), DomainError);
    CHECK_THROWS_AS(subset_baseline(reviews, 0, 1), DomainError);
  }

  TEST_CASE("representation names") {
    for (auto r : {TextRepresentation::Bow, TextRepresentation::Tfidf, TextRepresentation::Word2Vec}) {
      CHECK(parse_text_representation(to_string(r)) == r);
    }
    CHECK_THROWS_AS(parse_text_representation("bert"), DomainError);
  }
}
