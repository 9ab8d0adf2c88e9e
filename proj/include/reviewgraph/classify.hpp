#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "reviewgraph/common.hpp"
#include "reviewgraph/features.hpp"

namespace reviewgraph {

enum class ClassifierKind { RandomForest, Logistic, Mlp, Dummy };

ClassifierKind parse_classifier_kind(std::string_view name);
std::string_view to_string(ClassifierKind kind);

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0: ceil(sqrt(n_features))
  std::size_t min_samples_split = 2;
  bool bootstrap = true;
  std::size_t threads = 1;  // trees have their own seeds, so output does not depend on it
};

struct LogisticConfig {
  double l2 = 1.0;  // objective: mean cross-entropy + l2/(2n) * |W|^2
  std::size_t max_iter = 1000;
  double tolerance = 1e-5;  // on the gradient 2-norm
};

struct MlpConfig {
  std::size_t hidden = 100;
  std::size_t epochs = 200;
  std::size_t batch = 32;
  double learning_rate = 1e-3;  // Adam step size
  double alpha = 1e-4;          // L2 penalty, scaled by 1/(2 * batch size)
  double tolerance = 1e-4;      // stop after `patience` epochs without this much improvement
  std::size_t patience = 10;
};

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::RandomForest;
  ForestConfig forest;
  LogisticConfig logistic;
  MlpConfig mlp;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // column in the training matrix; -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  Label label = 0;
};
using Tree = std::vector<TreeNode>;

struct MlpParams {
  Matrix w1;  // features x hidden
  Vector b1;
  Matrix w2;  // hidden x classes
  Vector b2;
};

struct TrainedModel {
  ClassifierConfig config;
  std::vector<Label> classes;  // ascending
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  Label constant = 0;       // dummy prediction; also used when training saw one class
  bool degenerate = false;  // one class only

  std::vector<Tree> trees;
  Matrix weights;  // logistic: classes x features
  Vector bias;
  MlpParams mlp;
  std::vector<double> loss_curve;  // logistic: per iteration, mlp: per epoch
};

/// Single-class input yields a degenerate constant model and a warning.
TrainedModel train_random_forest(const FeatureMatrix& m, const ForestConfig& cfg, std::uint64_t seed);
TrainedModel train_logistic(const FeatureMatrix& m, const LogisticConfig& cfg, std::uint64_t seed);
TrainedModel train_mlp(const FeatureMatrix& m, const MlpConfig& cfg, std::uint64_t seed);
TrainedModel train_dummy(const FeatureMatrix& m);
TrainedModel train(const FeatureMatrix& m, const ClassifierConfig& cfg);

/// Throws DomainError on width mismatch.
Labels predict(const TrainedModel& model, const Matrix& x);
/// n x classes; columns follow model.classes.
Matrix predict_proba(const TrainedModel& model, const Matrix& x);

// Objectives, exposed for gradient checks. Labels here are class indices.

/// Mean cross-entropy of softmax(x w^T + b) plus l2/(2n) |w|^2.
double logistic_loss(const Matrix& w, const Vector& b, const Matrix& x, const std::vector<int>& y, double l2,
                     Matrix* grad_w = nullptr, Vector* grad_b = nullptr);

/// Mean cross-entropy of the one-hidden-layer ReLU network plus
/// alpha/(2n) (|w1|^2 + |w2|^2).
double mlp_loss(const MlpParams& p, const Matrix& x, const std::vector<int>& y, double alpha,
                MlpParams* grad = nullptr);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace reviewgraph
