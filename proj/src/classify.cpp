#include "reviewgraph/classify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <thread>

#include <json.hpp>

namespace reviewgraph {

using nlohmann::json;

ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "rf" || name == "random-forest") return ClassifierKind::RandomForest;
  if (name == "lr" || name == "logistic") return ClassifierKind::Logistic;
  if (name == "mlp") return ClassifierKind::Mlp;
  if (name == "dummy" || name == "dummy-most-frequent") return ClassifierKind::Dummy;
  throw DomainError("unknown classifier '" + std::string(name) + "'");
}

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::RandomForest:
      return "rf";
    case ClassifierKind::Logistic:
      return "lr";
    case ClassifierKind::Mlp:
      return "mlp";
    case ClassifierKind::Dummy:
      return "dummy";
  }
  return "rf";
}

namespace {

struct Encoded {
  std::vector<Label> classes;
  std::vector<int> y;
};

Encoded encode_labels(const Labels& labels) {
  Encoded e;
  e.classes = labels;
  std::sort(e.classes.begin(), e.classes.end());
  e.classes.erase(std::unique(e.classes.begin(), e.classes.end()), e.classes.end());
  e.y.reserve(labels.size());
  for (auto label : labels) {
    e.y.push_back(static_cast<int>(std::lower_bound(e.classes.begin(), e.classes.end(), label) - e.classes.begin()));
  }
  return e;
}

// Index of the largest count; the first (smallest label) wins ties.
template <typename Counts>
int argmax(const Counts& counts) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(counts.size()); ++i) {
    if (counts[static_cast<std::size_t>(i)] > counts[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

TrainedModel base_model(const FeatureMatrix& m, ClassifierKind kind, std::uint64_t seed, const Encoded& enc) {
  if (m.empty()) throw DomainError("cannot train on an empty matrix");
  m.validate();
  TrainedModel model;
  model.config.kind = kind;
  model.config.seed = seed;
  model.classes = enc.classes;
  model.n_features = m.width();
  model.feature_names = m.feature_names;
  std::vector<std::size_t> counts(enc.classes.size(), 0);
  for (int c : enc.y) ++counts[static_cast<std::size_t>(c)];
  model.constant = enc.classes[static_cast<std::size_t>(argmax(counts))];
  if (enc.classes.size() == 1) {
    model.degenerate = true;
    if (kind != ClassifierKind::Dummy) {
      warn("training data has a single class; using a constant model");
    }
  }
  return model;
}

Matrix softmax_rows(const Matrix& z) {
  Matrix p(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double top = z.row(i).maxCoeff();
    p.row(i) = (z.row(i).array() - top).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

double cross_entropy(const Matrix& z, const std::vector<int>& y, Matrix& prob) {
  prob = softmax_rows(z);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double top = z.row(i).maxCoeff();
    const double lse = top + std::log((z.row(i).array() - top).exp().sum());
    loss += lse - z(i, y[static_cast<std::size_t>(i)]);
  }
  return loss / static_cast<double>(z.rows());
}

// ---------------------------------------------------------------------------
// Random forest

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<int>& y, std::size_t n_classes, const std::vector<int>& canonical,
              std::size_t max_features, std::size_t min_split, const std::vector<Label>& classes)
      : x_(x), y_(y), n_classes_(n_classes), canonical_(canonical), max_features_(max_features),
        min_split_(min_split), classes_(classes) {}

  Tree build(std::vector<std::size_t> rows, std::mt19937_64& engine) {
    Tree tree;
    rows_ = std::move(rows);
    struct Task {
      int node;
      std::size_t begin, end;
    };
    tree.push_back({});
    std::vector<Task> stack{{0, 0, rows_.size()}};
    std::vector<int> features(canonical_.size());
    while (!stack.empty()) {
      const auto task = stack.back();
      stack.pop_back();
      std::vector<std::size_t> counts(n_classes_, 0);
      for (auto i = task.begin; i < task.end; ++i) ++counts[static_cast<std::size_t>(y_[rows_[i]])];
      const auto majority = classes_[static_cast<std::size_t>(argmax(counts))];
      const auto n = task.end - task.begin;
      const bool pure = std::count(counts.begin(), counts.end(), 0) == static_cast<long>(n_classes_ - 1);

      Split best;
      if (!pure && n >= min_split_) best = find_split(task.begin, task.end, features, engine);
      if (best.feature < 0) {
        tree[static_cast<std::size_t>(task.node)].label = majority;
        continue;
      }
      const auto mid = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                      rows_.begin() + static_cast<std::ptrdiff_t>(task.end), [&](std::size_t r) {
                                        return x_(static_cast<Eigen::Index>(r), best.feature) <= best.threshold;
                                      }) -
                       rows_.begin();
      const int left = static_cast<int>(tree.size());
      tree.push_back({});
      tree.push_back({});
      auto& node = tree[static_cast<std::size_t>(task.node)];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      node.label = majority;
      stack.push_back({left + 1, static_cast<std::size_t>(mid), task.end});
      stack.push_back({left, task.begin, static_cast<std::size_t>(mid)});
    }
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = -1.0;
  };

  // Maximises sum_c nl_c^2/nl + sum_c nr_c^2/nr, which minimises the
  // weighted Gini impurity of the children. Features are drawn without
  // replacement in canonical order; drawing continues past max_features until
  // some feature admits a split.
  Split find_split(std::size_t begin, std::size_t end, std::vector<int>& features, std::mt19937_64& engine) {
    std::iota(features.begin(), features.end(), 0);
    Split best;
    std::vector<std::pair<double, int>> values(end - begin);
    std::vector<double> left(n_classes_), right(n_classes_);
    const std::size_t f_count = features.size();
    for (std::size_t drawn = 0; drawn < f_count; ++drawn) {
      if (drawn >= max_features_ && best.feature >= 0) break;
      std::swap(features[drawn], features[drawn + uniform_index(engine, f_count - drawn)]);
      const int column = canonical_[static_cast<std::size_t>(features[drawn])];

      for (std::size_t i = begin; i < end; ++i) {
        const auto r = rows_[i];
        values[i - begin] = {x_(static_cast<Eigen::Index>(r), column), y_[r]};
      }
      std::sort(values.begin(), values.end());
      if (values.front().first == values.back().first) continue;

      std::fill(left.begin(), left.end(), 0.0);
      std::fill(right.begin(), right.end(), 0.0);
      for (const auto& v : values) right[static_cast<std::size_t>(v.second)] += 1.0;
      double left_sq = 0.0;
      double right_sq = 0.0;
      for (double c : right) right_sq += c * c;
      const double n = static_cast<double>(values.size());
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const auto c = static_cast<std::size_t>(values[i].second);
        left_sq += 2.0 * left[c] + 1.0;
        right_sq -= 2.0 * right[c] - 1.0;
        left[c] += 1.0;
        right[c] -= 1.0;
        if (values[i].first == values[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double score = left_sq / nl + right_sq / (n - nl);
        if (score > best.score + 1e-12) {
          best.score = score;
          best.feature = column;
          double threshold = 0.5 * (values[i].first + values[i + 1].first);
          if (threshold >= values[i + 1].first) threshold = values[i].first;
          best.threshold = threshold;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const std::vector<int>& y_;
  std::size_t n_classes_;
  const std::vector<int>& canonical_;
  std::size_t max_features_;
  std::size_t min_split_;
  const std::vector<Label>& classes_;
  std::vector<std::size_t> rows_;
};

Label tree_predict(const Tree& tree, const Matrix& x, Eigen::Index row) {
  std::size_t node = 0;
  while (tree[node].feature >= 0) {
    node = static_cast<std::size_t>(x(row, tree[node].feature) <= tree[node].threshold ? tree[node].left
                                                                                        : tree[node].right);
  }
  return tree[node].label;
}

// ---------------------------------------------------------------------------
// L-BFGS with Armijo backtracking

using Objective = std::function<double(const Vector&, Vector&)>;

Vector minimize_lbfgs(const Objective& f, Vector x, std::size_t max_iter, double tolerance,
                      std::vector<double>* curve) {
  constexpr std::size_t kMemory = 10;
  Vector g(x.size());
  double fx = f(x, g);
  std::vector<Vector> s_hist, y_hist;
  std::vector<double> rho;
  Vector g_new(x.size());
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    if (curve) curve->push_back(fx);
    if (!std::isfinite(fx)) throw TrainingError("logistic regression: non-finite loss");
    if (g.norm() < tolerance) break;

    Vector d = -g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho[k] * s_hist[k].dot(d);
      d -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho[k] * y_hist[k].dot(d);
      d += (alpha[k] - beta) * s_hist[k];
    }
    double slope = g.dot(d);
    if (slope >= 0.0) {
      d = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho.clear();
    }

    double step = s_hist.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    double f_new = 0.0;
    Vector x_new;
    bool accepted = false;
    for (int trial = 0; trial < 60; ++trial) {
      x_new = x + step * d;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Vector s = x_new - x;
    Vector yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      if (s_hist.size() == kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho.erase(rho.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho.push_back(1.0 / sy);
    }
    x = std::move(x_new);
    g = g_new;
    fx = f_new;
  }
  return x;
}

}  // namespace

TrainedModel train_random_forest(const FeatureMatrix& m, const ForestConfig& cfg, std::uint64_t seed) {
  const auto enc = encode_labels(m.labels);
  auto model = base_model(m, ClassifierKind::RandomForest, seed, enc);
  model.config.forest = cfg;
  if (model.degenerate) return model;
  if (cfg.n_trees == 0) throw DomainError("random forest needs at least one tree");

  // Columns are visited through their name order so that a permuted matrix
  // with the same names grows the same trees.
  std::vector<int> canonical(m.width());
  std::iota(canonical.begin(), canonical.end(), 0);
  std::stable_sort(canonical.begin(), canonical.end(), [&](int a, int b) {
    return m.feature_names[static_cast<std::size_t>(a)] < m.feature_names[static_cast<std::size_t>(b)];
  });
  const std::size_t max_features =
      cfg.max_features > 0 ? std::min(cfg.max_features, m.width())
                           : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m.width()))));

  model.trees.resize(cfg.n_trees);
  auto grow = [&](std::size_t t) {
    std::mt19937_64 engine(mix_seed(seed, t));
    std::vector<std::size_t> rows(m.size());
    if (cfg.bootstrap) {
      for (auto& r : rows) r = uniform_index(engine, m.size());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder(m.rows, enc.y, enc.classes.size(), canonical, std::max<std::size_t>(1, max_features),
                        std::max<std::size_t>(2, cfg.min_samples_split), enc.classes);
    model.trees[t] = builder.build(std::move(rows), engine);
  };
  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, cfg.n_trees);
  if (threads == 1) {
    for (std::size_t t = 0; t < cfg.n_trees; ++t) grow(t);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < cfg.n_trees; t += threads) grow(t);
      });
    }
    for (auto& thread : pool) thread.join();
  }
  return model;
}

double logistic_loss(const Matrix& w, const Vector& b, const Matrix& x, const std::vector<int>& y, double l2,
                     Matrix* grad_w, Vector* grad_b) {
  const double n = static_cast<double>(x.rows());
  Matrix z = x * w.transpose();
  z.rowwise() += b.transpose();
  Matrix p;
  const double loss = cross_entropy(z, y, p) + l2 / (2.0 * n) * w.squaredNorm();
  if (grad_w || grad_b) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) p(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    if (grad_w) *grad_w = p.transpose() * x / n + (l2 / n) * w;
    if (grad_b) *grad_b = p.colwise().sum().transpose() / n;
  }
  return loss;
}

TrainedModel train_logistic(const FeatureMatrix& m, const LogisticConfig& cfg, std::uint64_t seed) {
  if (!m.rows.allFinite()) throw DomainError("logistic regression: non-finite features");
  const auto enc = encode_labels(m.labels);
  auto model = base_model(m, ClassifierKind::Logistic, seed, enc);
  model.config.logistic = cfg;
  if (model.degenerate) return model;

  const auto c = static_cast<Eigen::Index>(enc.classes.size());
  const auto f = static_cast<Eigen::Index>(m.width());
  auto objective = [&](const Vector& theta, Vector& grad) {
    const Eigen::Map<const Matrix> w(theta.data(), c, f);
    const Vector b = theta.tail(c);
    Matrix gw;
    Vector gb;
    const double loss = logistic_loss(w, b, m.rows, enc.y, cfg.l2, &gw, &gb);
    grad.resize(theta.size());
    grad.head(c * f) = Eigen::Map<const Vector>(gw.data(), c * f);
    grad.tail(c) = gb;
    return loss;
  };
  const Vector theta =
      minimize_lbfgs(objective, Vector::Zero(c * f + c), cfg.max_iter, cfg.tolerance, &model.loss_curve);
  model.weights = Eigen::Map<const Matrix>(theta.data(), c, f);
  model.bias = theta.tail(c);
  return model;
}

double mlp_loss(const MlpParams& p, const Matrix& x, const std::vector<int>& y, double alpha, MlpParams* grad) {
  const double n = static_cast<double>(x.rows());
  Matrix a1 = x * p.w1;
  a1.rowwise() += p.b1.transpose();
  const Matrix h = a1.cwiseMax(0.0);
  Matrix z = h * p.w2;
  z.rowwise() += p.b2.transpose();
  Matrix prob;
  const double loss = cross_entropy(z, y, prob) + alpha / (2.0 * n) * (p.w1.squaredNorm() + p.w2.squaredNorm());
  if (grad) {
    for (Eigen::Index i = 0; i < prob.rows(); ++i) prob(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    const Matrix dz = prob / n;
    grad->w2 = h.transpose() * dz + (alpha / n) * p.w2;
    grad->b2 = dz.colwise().sum().transpose();
    const Matrix da = ((dz * p.w2.transpose()).array() * (a1.array() > 0.0).cast<double>()).matrix();
    grad->w1 = x.transpose() * da + (alpha / n) * p.w1;
    grad->b1 = da.colwise().sum().transpose();
  }
  return loss;
}

TrainedModel train_mlp(const FeatureMatrix& m, const MlpConfig& cfg, std::uint64_t seed) {
  if (!m.rows.allFinite()) throw DomainError("mlp: non-finite features");
  const auto enc = encode_labels(m.labels);
  auto model = base_model(m, ClassifierKind::Mlp, seed, enc);
  model.config.mlp = cfg;
  if (model.degenerate) return model;
  if (cfg.hidden == 0 || cfg.batch == 0) throw DomainError("mlp: hidden and batch must be positive");

  const auto f = static_cast<Eigen::Index>(m.width());
  const auto hdim = static_cast<Eigen::Index>(cfg.hidden);
  const auto c = static_cast<Eigen::Index>(enc.classes.size());
  std::mt19937_64 engine(mix_seed(seed, 0x1a7));
  auto glorot = [&](Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = (2.0 * uniform01(engine) - 1.0) * bound;
    }
    return w;
  };
  auto& p = model.mlp;
  p.w1 = glorot(f, hdim, static_cast<double>(f), static_cast<double>(hdim));
  p.b1 = glorot(hdim, 1, static_cast<double>(f), static_cast<double>(hdim)).col(0);
  p.w2 = glorot(hdim, c, static_cast<double>(hdim), static_cast<double>(c));
  p.b2 = glorot(c, 1, static_cast<double>(hdim), static_cast<double>(c)).col(0);

  // Adam state, same layout as the parameters.
  MlpParams m1{Matrix::Zero(f, hdim), Vector::Zero(hdim), Matrix::Zero(hdim, c), Vector::Zero(c)};
  MlpParams m2 = m1;
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::size_t step = 0;
  auto adam = [&](auto& param, auto& grad, auto& mom1, auto& mom2, double lr_t) {
    mom1 = kBeta1 * mom1 + (1.0 - kBeta1) * grad;
    mom2 = kBeta2 * mom2 + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    param.array() -= lr_t * mom1.array() / (mom2.array().sqrt() + kEps);
  };

  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::min(cfg.batch, m.size());
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  MlpParams grad;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(order, engine);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      Matrix xb(static_cast<Eigen::Index>(stop - start), f);
      std::vector<int> yb;
      for (std::size_t i = start; i < stop; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) = m.rows.row(static_cast<Eigen::Index>(order[i]));
        yb.push_back(enc.y[order[i]]);
      }
      const double loss = mlp_loss(p, xb, yb, cfg.alpha, &grad);
      if (!std::isfinite(loss)) throw TrainingError("mlp: loss became non-finite at epoch " + std::to_string(epoch));
      total += loss * static_cast<double>(stop - start);
      ++step;
      const double lr_t = cfg.learning_rate * std::sqrt(1.0 - std::pow(kBeta2, static_cast<double>(step))) /
                          (1.0 - std::pow(kBeta1, static_cast<double>(step)));
      adam(p.w1, grad.w1, m1.w1, m2.w1, lr_t);
      adam(p.b1, grad.b1, m1.b1, m2.b1, lr_t);
      adam(p.w2, grad.w2, m1.w2, m2.w2, lr_t);
      adam(p.b2, grad.b2, m1.b2, m2.b2, lr_t);
    }
    const double epoch_loss = total / static_cast<double>(m.size());
    model.loss_curve.push_back(epoch_loss);
    if (epoch_loss > best - cfg.tolerance) {
      if (++stale > cfg.patience) break;
    } else {
      stale = 0;
    }
    best = std::min(best, epoch_loss);
  }
  return model;
}

TrainedModel train_dummy(const FeatureMatrix& m) {
  const auto enc = encode_labels(m.labels);
  return base_model(m, ClassifierKind::Dummy, 0, enc);
}

TrainedModel train(const FeatureMatrix& m, const ClassifierConfig& cfg) {
  TrainedModel model;
  switch (cfg.kind) {
    case ClassifierKind::RandomForest:
      model = train_random_forest(m, cfg.forest, cfg.seed);
      break;
    case ClassifierKind::Logistic:
      model = train_logistic(m, cfg.logistic, cfg.seed);
      break;
    case ClassifierKind::Mlp:
      model = train_mlp(m, cfg.mlp, cfg.seed);
      break;
    case ClassifierKind::Dummy:
      model = train_dummy(m);
      break;
  }
  model.config = cfg;
  return model;
}

Matrix predict_proba(const TrainedModel& model, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.n_features && x.rows() > 0) {
    throw DomainError("predict: matrix has " + std::to_string(x.cols()) + " columns, model expects " +
                      std::to_string(model.n_features));
  }
  const auto c = static_cast<Eigen::Index>(model.classes.size());
  Matrix prob = Matrix::Zero(x.rows(), c);
  if (x.rows() == 0) return prob;
  auto constant_column = [&] {
    const auto k = std::lower_bound(model.classes.begin(), model.classes.end(), model.constant) - model.classes.begin();
    prob.col(static_cast<Eigen::Index>(k)).setOnes();
  };
  if (model.degenerate || model.config.kind == ClassifierKind::Dummy) {
    constant_column();
    return prob;
  }
  switch (model.config.kind) {
    case ClassifierKind::RandomForest: {
      for (const auto& tree : model.trees) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
          const auto label = tree_predict(tree, x, i);
          const auto k = std::lower_bound(model.classes.begin(), model.classes.end(), label) - model.classes.begin();
          prob(i, static_cast<Eigen::Index>(k)) += 1.0;
        }
      }
      prob /= static_cast<double>(model.trees.size());
      break;
    }
    case ClassifierKind::Logistic: {
      Matrix z = x * model.weights.transpose();
      z.rowwise() += model.bias.transpose();
      prob = softmax_rows(z);
      break;
    }
    case ClassifierKind::Mlp: {
      Matrix a = x * model.mlp.w1;
      a.rowwise() += model.mlp.b1.transpose();
      Matrix z = a.cwiseMax(0.0) * model.mlp.w2;
      z.rowwise() += model.mlp.b2.transpose();
      prob = softmax_rows(z);
      break;
    }
    case ClassifierKind::Dummy:
      break;
  }
  return prob;
}

Labels predict(const TrainedModel& model, const Matrix& x) {
  const Matrix prob = predict_proba(model, x);
  Labels out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < prob.rows(); ++i) {
    int best = 0;
    for (Eigen::Index k = 1; k < prob.cols(); ++k) {
      if (prob(i, k) > prob(i, best)) best = static_cast<int>(k);
    }
    out.push_back(model.classes[static_cast<std::size_t>(best)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr int kModelVersion = 1;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto& data = j.at("data");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      m(i, k) = data.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
    }
  }
  return m;
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
  const auto& cfg = model.config;
  nlohmann::ordered_json j;
  j["format"] = "reviewgraph-model";
  j["version"] = kModelVersion;
  j["kind"] = to_string(cfg.kind);
  j["seed"] = cfg.seed;
  j["config"] = {
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
  };
  j["classes"] = model.classes;
  j["n_features"] = model.n_features;
  j["feature_names"] = model.feature_names;
  j["constant"] = model.constant;
  j["degenerate"] = model.degenerate;
  json trees = json::array();
  for (const auto& tree : model.trees) {
    json nodes = json::array();
    for (const auto& n : tree) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label});
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  if (cfg.kind == ClassifierKind::Logistic && !model.degenerate) {
    j["weights"] = matrix_json(model.weights);
    j["bias"] = vector_json(model.bias);
  }
  if (cfg.kind == ClassifierKind::Mlp && !model.degenerate) {
    j["mlp"] = {{"w1", matrix_json(model.mlp.w1)},
                {"b1", vector_json(model.mlp.b1)},
                {"w2", matrix_json(model.mlp.w2)},
                {"b2", vector_json(model.mlp.b2)}};
  }
  j["loss_curve"] = model.loss_curve;
  return j.dump(1) + "\n";
}

TrainedModel model_from_json(std::string_view text) {
  TrainedModel model;
  try {
    const auto j = json::parse(text);
    if (j.at("format") != "reviewgraph-model") throw InputError("not a model file");
    if (j.at("version").get<int>() != kModelVersion) throw InputError("unsupported model version");
    auto& cfg = model.config;
    cfg.kind = parse_classifier_kind(j.at("kind").get<std::string>());
    cfg.seed = j.at("seed").get<std::uint64_t>();
    const auto& c = j.at("config");
    const auto& fj = c.at("forest");
    cfg.forest.n_trees = fj.at("n_trees");
    cfg.forest.max_features = fj.at("max_features");
    cfg.forest.min_samples_split = fj.at("min_samples_split");
    cfg.forest.bootstrap = fj.at("bootstrap");
    const auto& lj = c.at("logistic");
    cfg.logistic.l2 = lj.at("l2");
    cfg.logistic.max_iter = lj.at("max_iter");
    cfg.logistic.tolerance = lj.at("tolerance");
    const auto& mj = c.at("mlp");
    cfg.mlp.hidden = mj.at("hidden");
    cfg.mlp.epochs = mj.at("epochs");
    cfg.mlp.batch = mj.at("batch");
    cfg.mlp.learning_rate = mj.at("learning_rate");
    cfg.mlp.alpha = mj.at("alpha");
    cfg.mlp.tolerance = mj.at("tolerance");
    cfg.mlp.patience = mj.at("patience");
    model.classes = j.at("classes").get<std::vector<Label>>();
    model.n_features = j.at("n_features");
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.constant = j.at("constant");
    model.degenerate = j.at("degenerate");
    for (const auto& nodes : j.at("trees")) {
      Tree tree;
      for (const auto& n : nodes) {
        tree.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                        n.at(4).get<Label>()});
      }
      model.trees.push_back(std::move(tree));
    }
    if (j.contains("weights")) {
      model.weights = matrix_from_json(j.at("weights"));
      model.bias = vector_from_json(j.at("bias"));
    }
    if (j.contains("mlp")) {
      const auto& p = j.at("mlp");
      model.mlp = {matrix_from_json(p.at("w1")), vector_from_json(p.at("b1")), matrix_from_json(p.at("w2")),
                   vector_from_json(p.at("b2"))};
    }
    model.loss_curve = j.at("loss_curve").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("model file: ") + e.what());
  }
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model));
}

TrainedModel load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

}  // namespace reviewgraph
