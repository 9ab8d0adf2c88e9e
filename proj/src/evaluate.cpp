#include "reviewgraph/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace reviewgraph {

namespace {

void check_lengths(const Labels& y, const Labels& y_hat) {
  if (y.empty()) throw DomainError("metrics need at least one label");
  if (y.size() != y_hat.size()) throw DomainError("label vectors differ in length");
}

}  // namespace

double accuracy(const Labels& y, const Labels& y_hat) {
  check_lengths(y, y_hat);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += y[i] == y_hat[i];
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

double mae(const Labels& y, const Labels& y_hat) {
  check_lengths(y, y_hat);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - y_hat[i]);
  return sum / static_cast<double>(y.size());
}

double mse(const Labels& y, const Labels& y_hat) {
  check_lengths(y, y_hat);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - y_hat[i];
    sum += d * d;
  }
  return sum / static_cast<double>(y.size());
}

double rmse(const Labels& y, const Labels& y_hat) { return std::sqrt(mse(y, y_hat)); }

double cohens_kappa(const Labels& y, const Labels& y_hat) {
  check_lengths(y, y_hat);
  std::map<Label, double> marginal_y, marginal_hat;
  double agree = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    marginal_y[y[i]] += 1.0;
    marginal_hat[y_hat[i]] += 1.0;
    agree += y[i] == y_hat[i];
  }
  const double n = static_cast<double>(y.size());
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [label, count] : marginal_y) {
    if (auto it = marginal_hat.find(label); it != marginal_hat.end()) p_e += (count / n) * (it->second / n);
  }
  if (p_e >= 1.0) return p_o == 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

std::map<Label, std::size_t> prediction_histogram(const Labels& y_hat) {
  std::map<Label, std::size_t> hist{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}};
  for (auto label : y_hat) ++hist[label];
  return hist;
}

std::string histogram_csv(const std::map<Label, std::size_t>& histogram) {
  std::string out = "label,count\n";
  for (const auto& [label, count] : histogram) out += std::to_string(label) + "," + std::to_string(count) + "\n";
  return out;
}

MetricsReport evaluate_predictions(const Labels& y, const Labels& y_hat) {
  MetricsReport r;
  r.accuracy = accuracy(y, y_hat);
  r.mae = mae(y, y_hat);
  r.mse = mse(y, y_hat);
  r.rmse = std::sqrt(r.mse);
  r.kappa = cohens_kappa(y, y_hat);
  r.n_test = y.size();
  r.histogram = prediction_histogram(y_hat);
  return r;
}

nlohmann::ordered_json report_json(const MetricsReport& report) {
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [label, count] : report.histogram) hist[std::to_string(label)] = count;
  return {{"accuracy", report.accuracy}, {"mae", report.mae},       {"rmse", report.rmse},
          {"mse", report.mse},           {"kappa", report.kappa},   {"n_test", report.n_test},
          {"histogram", std::move(hist)}, {"config", report.config}};
}

std::string report_to_json(const MetricsReport& report) { return report_json(report).dump(2) + "\n"; }

SplitIndices train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw DomainError("test_fraction must lie in (0, 1)");
  if (n < 2) throw DomainError("train_test_split needs at least two rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 engine(mix_seed(seed, 0x5b1));
  shuffle(order, engine);
  auto n_test = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * test_fraction - 1e-12));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  SplitIndices split;
  split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

std::pair<FeatureMatrix, FeatureMatrix> train_test_split(const FeatureMatrix& m, double test_fraction,
                                                         std::uint64_t seed) {
  const auto split = train_test_split(m.size(), test_fraction, seed);
  return {m.select(split.train), m.select(split.test)};
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed,
                                                    const Labels* stratify) {
  if (k < 2) throw DomainError("k-fold needs k >= 2");
  if (k > n) throw DomainError("k-fold: k exceeds the number of rows");
  std::mt19937_64 engine(mix_seed(seed, 0xf01d));
  std::vector<std::vector<std::size_t>> folds(k);
  if (stratify) {
    if (stratify->size() != n) throw DomainError("k-fold: label count differs from row count");
    std::map<Label, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[(*stratify)[i]].push_back(i);
    std::size_t next = 0;
    for (auto& [label, rows] : groups) {
      shuffle(rows, engine);
      for (auto r : rows) folds[next++ % k].push_back(r);
    }
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, engine);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t size = n / k + (f < n % k ? 1 : 0);
      folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                      order.begin() + static_cast<std::ptrdiff_t>(pos + size));
      pos += size;
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

bool ModelPipeline::scales() const {
  if (scale) return *scale;
  return classifier.kind == ClassifierKind::Logistic || classifier.kind == ClassifierKind::Mlp;
}

FittedPipeline fit_pipeline(const FeatureMatrix& train, const ModelPipeline& pipeline, std::uint64_t seed) {
  FittedPipeline fitted;
  const auto sample_seed = mix_seed(seed, 0x5a);
  switch (pipeline.sampling) {
    case Sampling::None:
      fitted.sample_indices.resize(train.size());
      std::iota(fitted.sample_indices.begin(), fitted.sample_indices.end(), 0);
      break;
    case Sampling::Over:
      fitted.sample_indices = oversample_indices(train.labels, sample_seed);
      break;
    case Sampling::Under:
      fitted.sample_indices = undersample_indices(train.labels, sample_seed);
      break;
  }
  FeatureMatrix sampled = train.select(fitted.sample_indices);
  if (pipeline.scales()) {
    fitted.scaler = fit_scaler(sampled);
    sampled = apply_scaler(*fitted.scaler, sampled);
  }
  auto cfg = pipeline.classifier;
  cfg.seed = mix_seed(seed, 0xc1);
  fitted.model = reviewgraph::train(sampled, cfg);
  return fitted;
}

Labels apply_pipeline(const FittedPipeline& fitted, const Matrix& x) {
  if (fitted.scaler) return predict(fitted.model, fitted.scaler->apply(x));
  return predict(fitted.model, x);
}

MetricsReport evaluate_split(const FeatureMatrix& train, const FeatureMatrix& test, const ModelPipeline& pipeline,
                             std::uint64_t seed, FittedPipeline* fitted_out, Labels* predictions) {
  auto fitted = fit_pipeline(train, pipeline, seed);
  auto y_hat = apply_pipeline(fitted, test.rows);
  auto report = evaluate_predictions(test.labels, y_hat);
  if (fitted_out) *fitted_out = std::move(fitted);
  if (predictions) *predictions = std::move(y_hat);
  return report;
}

CvReport kfold_cv(const Labels& labels, const FoldFeatures& features, const ModelPipeline& pipeline,
                  std::uint64_t seed, const CvOptions& options) {
  const auto folds = kfold_indices(labels.size(), options.k, seed, options.stratified ? &labels : nullptr);
  CvReport report;
  report.folds.resize(folds.size());

  auto run = [&](std::size_t f) {
    auto& result = report.folds[f];
    result.fold = f;
    result.test = folds[f];
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) result.train.insert(result.train.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(result.train.begin(), result.train.end());
    auto [train, test] = features(result.train, result.test, result.note);
    result.metrics = evaluate_split(train, test, pipeline, mix_seed(seed, f), &result.fitted);
  };
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, folds.size());
  if (threads == 1) {
    for (std::size_t f = 0; f < folds.size(); ++f) run(f);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t f = w; f < folds.size(); f += threads) run(f);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& thread : pool) thread.join();
    for (auto& error : errors) {
      if (error) std::rethrow_exception(error);
    }
  }

  auto& mean = report.mean;
  const double k = static_cast<double>(report.folds.size());
  for (const auto& fold : report.folds) {
    mean.accuracy += fold.metrics.accuracy / k;
    mean.mae += fold.metrics.mae / k;
    mean.mse += fold.metrics.mse / k;
    mean.kappa += fold.metrics.kappa / k;
    mean.n_test += fold.metrics.n_test;
    for (const auto& [label, count] : fold.metrics.histogram) mean.histogram[label] += count;
  }
  mean.rmse = std::sqrt(mean.mse);
  return report;
}

CvReport kfold_cv(const FeatureMatrix& m, const ModelPipeline& pipeline, std::uint64_t seed,
                  const CvOptions& options) {
  FoldFeatures features = [&m](const std::vector<std::size_t>& train, const std::vector<std::size_t>& test,
                               std::string&) { return std::make_pair(m.select(train), m.select(test)); };
  return kfold_cv(m.labels, features, pipeline, seed, options);
}

std::string cv_table_csv(const CvReport& report) {
  std::string out = "fold,accuracy,mae,rmse,mse,kappa,n_test\n";
  auto row = [&](const std::string& name, const MetricsReport& m) {
    out += name + "," + format_double(m.accuracy) + "," + format_double(m.mae) + "," + format_double(m.rmse) + "," +
           format_double(m.mse) + "," + format_double(m.kappa) + "," + std::to_string(m.n_test) + "\n";
  };
  for (const auto& fold : report.folds) row(std::to_string(fold.fold), fold.metrics);
  row("mean", report.mean);
  return out;
}

}  // namespace reviewgraph
