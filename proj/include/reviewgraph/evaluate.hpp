#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "reviewgraph/classify.hpp"
#include "reviewgraph/common.hpp"
#include "reviewgraph/features.hpp"

namespace reviewgraph {

// All metrics throw DomainError on empty input or a length mismatch.
double accuracy(const Labels& y, const Labels& y_hat);
double mae(const Labels& y, const Labels& y_hat);
double mse(const Labels& y, const Labels& y_hat);
double rmse(const Labels& y, const Labels& y_hat);
/// (p_o - p_e) / (1 - p_e); when p_e = 1 the value is 1 for identical
/// vectors and 0 otherwise.
double cohens_kappa(const Labels& y, const Labels& y_hat);

/// Counts for labels 1..5 (always present) plus any other predicted label.
std::map<Label, std::size_t> prediction_histogram(const Labels& y_hat);
std::string histogram_csv(const std::map<Label, std::size_t>& histogram);

struct MetricsReport {
  double accuracy = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  double mse = 0.0;
  double kappa = 0.0;
  std::size_t n_test = 0;
  std::map<Label, std::size_t> histogram;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

MetricsReport evaluate_predictions(const Labels& y, const Labels& y_hat);
nlohmann::ordered_json report_json(const MetricsReport& report);
std::string report_to_json(const MetricsReport& report);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle, then the first ceil(n * test_fraction) positions (at
/// least 1, at most n - 1) form the test set. Both halves come back sorted.
SplitIndices train_test_split(std::size_t n, double test_fraction, std::uint64_t seed);
std::pair<FeatureMatrix, FeatureMatrix> train_test_split(const FeatureMatrix& m, double test_fraction,
                                                         std::uint64_t seed);

/// k disjoint test-index sets covering 0..n-1. Unstratified: a seeded
/// shuffle cut into contiguous folds (the first n % k folds one larger).
/// Stratified: each class shuffled separately and dealt round-robin.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed,
                                                    const Labels* stratify = nullptr);

/// Sampling, optional scaling and a classifier, fitted on training rows only.
struct ModelPipeline {
  Sampling sampling = Sampling::None;
  std::optional<bool> scale;  // unset: scale for logistic and mlp only
  ClassifierConfig classifier;

  bool scales() const;
};

struct FittedPipeline {
  std::optional<Scaler> scaler;
  std::vector<std::size_t> sample_indices;  // rows of the training matrix used for fitting
  TrainedModel model;
};

FittedPipeline fit_pipeline(const FeatureMatrix& train, const ModelPipeline& pipeline, std::uint64_t seed);
Labels apply_pipeline(const FittedPipeline& fitted, const Matrix& x);

/// Builds the train and test matrices of one fold from row indices into the
/// full data set; representations with fitted state (vocabularies, word
/// vectors) fit it here on the training rows. `note` receives an optional
/// description of that state for audit.
using FoldFeatures = std::function<std::pair<FeatureMatrix, FeatureMatrix>(
    const std::vector<std::size_t>& train, const std::vector<std::size_t>& test, std::string& note)>;

struct FoldResult {
  std::size_t fold = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  MetricsReport metrics;
  FittedPipeline fitted;
  std::string note;
};

struct CvReport {
  std::vector<FoldResult> folds;
  MetricsReport mean;  // fold means; rmse = sqrt(mean mse), histogram summed
};

struct CvOptions {
  std::size_t k = 10;
  bool stratified = false;
  std::size_t threads = 1;  // folds are independent; the result does not depend on it
};

CvReport kfold_cv(const Labels& labels, const FoldFeatures& features, const ModelPipeline& pipeline,
                  std::uint64_t seed, const CvOptions& options = {});
CvReport kfold_cv(const FeatureMatrix& m, const ModelPipeline& pipeline, std::uint64_t seed,
                  const CvOptions& options = {});

/// `fold,accuracy,mae,rmse,mse,kappa,n_test` per fold plus a `mean` row.
std::string cv_table_csv(const CvReport& report);

/// Single split evaluation: fit on train, report on test.
MetricsReport evaluate_split(const FeatureMatrix& train, const FeatureMatrix& test, const ModelPipeline& pipeline,
                             std::uint64_t seed, FittedPipeline* fitted = nullptr, Labels* predictions = nullptr);

}  // namespace reviewgraph
