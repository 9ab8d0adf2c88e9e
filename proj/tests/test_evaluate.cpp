#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "reviewgraph/evaluate.hpp"
#include "test_support.hpp"

using namespace reviewgraph;

namespace {

FeatureMatrix noisy_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0, 1);
  FeatureMatrix m;
  m.rows.resize(static_cast<Eigen::Index>(n), 3);
  for (std::size_t i = 0; i < n; ++i) {
    const Label y = static_cast<Label>(1 + rng() % 5);
    m.labels.push_back(y);
    m.row_ids.push_back(i);
    for (Eigen::Index j = 0; j < 3; ++j) m.rows(static_cast<Eigen::Index>(i), j) = normal(rng) + (j == 0 ? y : 0);
  }
  m.feature_names = {"a", "b", "c"};
  return m;
}

std::vector<std::size_t> iota_n(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_SUITE("evaluate") {
  TEST_CASE("metrics on a two-element example") {
    const Labels y = {1, 5}, y_hat = {5, 5};
    CHECK(accuracy(y, y_hat) == 0.5);
    CHECK(mae(y, y_hat) == 2.0);
    CHECK(mse(y, y_hat) == 8.0);
    CHECK(rmse(y, y_hat) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
  }

  TEST_CASE("metric input contract") {
    CHECK_THROWS_AS(accuracy({}, {}), DomainError);
    CHECK_THROWS_AS(mae({1}, {1, 2}), DomainError);
    CHECK_THROWS_AS(cohens_kappa({}, {}), DomainError);
  }

  TEST_CASE("kappa examples") {
    CHECK(cohens_kappa({1, 2, 3}, {1, 2, 3}) == 1.0);
    CHECK(cohens_kappa({5, 5, 5}, {5, 5, 5}) == 1.0);
    CHECK(cohens_kappa({5, 5, 5}, {4, 4, 4}) == 0.0);
    // p_o = 0.5, p_e = 0.5
    CHECK(cohens_kappa({1, 1, 2, 2}, {1, 2, 1, 2}) == doctest::Approx(0.0));
    // p_o = 0, p_e = 0.5
    CHECK(cohens_kappa({1, 2}, {2, 1}) == doctest::Approx(-1.0));
  }

  TEST_CASE("kappa agrees with a contingency-table oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + rng() % 40;
      const auto y = testing::random_labels(rng, n);
      auto y_hat = testing::random_labels(rng, n, 1, 1 + static_cast<int>(rng() % 5));
      if (rng() % 4 == 0) y_hat = y;
      const double k = cohens_kappa(y, y_hat);
      CHECK(k == doctest::Approx(testing::kappa_oracle(y, y_hat)).epsilon(1e-12));
      CHECK(k <= 1.0);
      CHECK(accuracy(y, y_hat) >= 0.0);
      CHECK(mae(y, y_hat) <= rmse(y, y_hat) + 1e-12);
    }
  }

  TEST_CASE("histogram always lists labels one to five") {
    const auto h = prediction_histogram({5, 5, 1});
    CHECK(h == std::map<Label, std::size_t>{{1, 1}, {2, 0}, {3, 0}, {4, 0}, {5, 2}});
    CHECK(histogram_csv(h) == "label,count\n1,1\n2,0\n3,0\n4,0\n5,2\n");
  }

  TEST_CASE("split sizes") {
    const auto s = train_test_split(10, 0.2, 1);
    CHECK(s.train.size() == 8);
    CHECK(s.test.size() == 2);
    CHECK(train_test_split(2, 0.01, 1).test.size() == 1);
    CHECK(train_test_split(2, 0.99, 1).train.size() == 1);
    CHECK_THROWS_AS(train_test_split(10, 0.0, 1), DomainError);
    CHECK_THROWS_AS(train_test_split(10, 1.0, 1), DomainError);
    CHECK_THROWS_AS(train_test_split(1, 0.5, 1), DomainError);
  }

  TEST_CASE("split is a seeded partition") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + rng() % 100;
      const double fraction = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
      const auto seed = rng();
      const auto s = train_test_split(n, fraction, seed);
      std::vector<std::size_t> all = s.train;
      all.insert(all.end(), s.test.begin(), s.test.end());
      std::sort(all.begin(), all.end());
      CHECK(all == iota_n(n));
      CHECK(std::is_sorted(s.test.begin(), s.test.end()));
      const auto again = train_test_split(n, fraction, seed);
      CHECK(again.test == s.test);
    }
  }

  TEST_CASE("leave-one-out folds") {
    const auto folds = kfold_indices(5, 5, 3);
    REQUIRE(folds.size() == 5);
    std::vector<std::size_t> all;
    for (const auto& f : folds) {
      CHECK(f.size() == 1);
      all.push_back(f[0]);
    }
    std::sort(all.begin(), all.end());
    CHECK(all == iota_n(5));
    CHECK_THROWS_AS(kfold_indices(4, 5, 0), DomainError);
    CHECK_THROWS_AS(kfold_indices(4, 1, 0), DomainError);
  }

  TEST_CASE("folds partition the rows, stratified or not") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 10 + rng() % 60;
      const std::size_t k = 2 + rng() % 9;
      const auto labels = testing::random_labels(rng, n);
      for (const Labels* strat : {static_cast<const Labels*>(nullptr), &labels}) {
        const auto folds = kfold_indices(n, k, rng(), strat);
        CHECK(folds.size() == k);
        std::vector<std::size_t> all;
        std::size_t smallest = n, largest = 0;
        for (const auto& f : folds) {
          all.insert(all.end(), f.begin(), f.end());
          smallest = std::min(smallest, f.size());
          largest = std::max(largest, f.size());
        }
        std::sort(all.begin(), all.end());
        CHECK(all == iota_n(n));
        if (!strat) CHECK(largest - smallest <= 1);
      }
    }
  }

  TEST_CASE("cross-validation table has a row per fold and a mean row") {
    const auto m = noisy_matrix(60, 4);
    ModelPipeline pipeline;
    pipeline.classifier.kind = ClassifierKind::Logistic;
    const auto report = kfold_cv(m, pipeline, 7, {10, false, 1});
    CHECK(report.folds.size() == 10);
    std::istringstream table(cv_table_csv(report));
    std::vector<std::string> lines;
    for (std::string line; std::getline(table, line);) lines.push_back(line);
    REQUIRE(lines.size() == 12);
    CHECK(lines[0] == "fold,accuracy,mae,rmse,mse,kappa,n_test");
    CHECK(lines[11].rfind("mean,", 0) == 0);
    double mean_acc = 0, mean_mse = 0;
    for (const auto& f : report.folds) {
      mean_acc += f.metrics.accuracy / 10;
      mean_mse += f.metrics.mse / 10;
    }
    CHECK(report.mean.accuracy == doctest::Approx(mean_acc).epsilon(1e-12));
    CHECK(report.mean.rmse == doctest::Approx(std::sqrt(mean_mse)).epsilon(1e-12));
    CHECK(report.mean.n_test == 60);
  }

  TEST_CASE("cross-validation threads do not change results") {
    const auto m = noisy_matrix(50, 5);
    ModelPipeline pipeline;
    pipeline.classifier.forest.n_trees = 10;
    const auto one = kfold_cv(m, pipeline, 3, {5, false, 1});
    const auto many = kfold_cv(m, pipeline, 3, {5, false, 3});
    CHECK(cv_table_csv(one) == cv_table_csv(many));
  }

  TEST_CASE("fold fitting only ever sees training rows") {
    auto m = noisy_matrix(40, 6);
    ModelPipeline pipeline;
    pipeline.sampling = Sampling::Over;
    pipeline.classifier.kind = ClassifierKind::Logistic;
    const auto report = kfold_cv(m, pipeline, 8, {4, false, 1});
    for (const auto& fold : report.folds) {
      const auto train = m.select(fold.train);
      // The scaler is fitted on the resampled training rows of the fold.
      REQUIRE(fold.fitted.scaler.has_value());
      for (auto i : fold.fitted.sample_indices) CHECK(i < train.size());
      const auto expected = fit_scaler(train.select(fold.fitted.sample_indices));
      CHECK(fold.fitted.scaler->mean == expected.mean);
      CHECK(fold.fitted.scaler->scale == expected.scale);
      // Perturbing the held-out rows leaves the fitted state alone.
      auto poisoned = m;
      for (auto t : fold.test) poisoned.rows.row(static_cast<Eigen::Index>(t)).setConstant(1e9);
      const auto refit = fit_pipeline(poisoned.select(fold.train), pipeline, 123);
      const auto clean = fit_pipeline(train, pipeline, 123);
      CHECK(refit.sample_indices == clean.sample_indices);
      CHECK(refit.scaler->scale == clean.scaler->scale);
      CHECK(refit.scaler->mean == clean.scaler->mean);
    }
  }

  TEST_CASE("pipeline scaling defaults follow the classifier") {
    ModelPipeline p;
    p.classifier.kind = ClassifierKind::RandomForest;
    CHECK_FALSE(p.scales());
    p.classifier.kind = ClassifierKind::Mlp;
    CHECK(p.scales());
    p.scale = false;
    CHECK_FALSE(p.scales());
  }

  TEST_CASE("split evaluation reports on the test rows") {
    const auto m = noisy_matrix(50, 7);
    const auto [train, test] = train_test_split(m, 0.2, 1);
    CHECK(test.size() == 10);
    ModelPipeline pipeline;
    Labels predictions;
    const auto r = evaluate_split(train, test, pipeline, 2, nullptr, &predictions);
    CHECK(r.n_test == 10);
    CHECK(predictions.size() == 10);
    CHECK(r.accuracy == accuracy(test.labels, predictions));
    const auto j = report_json(r);
    for (const char* key : {"accuracy", "mae", "rmse", "mse", "kappa", "n_test"}) CHECK(j.contains(key));
  }
}
