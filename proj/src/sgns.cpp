#include "reviewgraph/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace reviewgraph {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -log s(x), computed without overflow for large |x|.
double neg_log_sigmoid(double x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

}  // namespace

void SkipGramConfig::validate() const {
  if (dims == 0) throw DomainError("skip-gram: dims must be >= 1");
  if (window == 0) throw DomainError("skip-gram: window must be >= 1");
  if (!(learning_rate > 0.0)) throw DomainError("skip-gram: learning rate must be positive");
}

UnigramSampler::UnigramSampler(const std::vector<std::size_t>& counts, double power) {
  cumulative_.reserve(counts.size());
  double total = 0.0;
  for (auto count : counts) {
    total += count > 0 ? std::pow(static_cast<double>(count), power) : 0.0;
    cumulative_.push_back(total);
  }
}

std::size_t UnigramSampler::locate(double target) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

double UnigramSampler::probability(std::size_t id) const {
  const double lower = id == 0 ? 0.0 : cumulative_.at(id - 1);
  return (cumulative_.at(id) - lower) / cumulative_.back();
}

double pair_loss(const Vector& center, const Vector& context, const Matrix& negatives) {
  double loss = neg_log_sigmoid(center.dot(context));
  for (Eigen::Index k = 0; k < negatives.cols(); ++k) loss += neg_log_sigmoid(-center.dot(negatives.col(k)));
  return loss;
}

PairGradient pair_loss_gradient(const Vector& center, const Vector& context, const Matrix& negatives) {
  PairGradient grad;
  grad.loss = pair_loss(center, context, negatives);
  const double gp = sigmoid(center.dot(context)) - 1.0;
  grad.center = gp * context;
  grad.context = gp * center;
  grad.negatives.resize(center.size(), negatives.cols());
  for (Eigen::Index k = 0; k < negatives.cols(); ++k) {
    const double gn = sigmoid(center.dot(negatives.col(k)));
    grad.center += gn * negatives.col(k);
    grad.negatives.col(k) = gn * center;
  }
  return grad;
}

SkipGramModel train_skipgram(const std::vector<std::vector<std::size_t>>& sequences, std::size_t vocab_size,
                             const SkipGramConfig& cfg) {
  cfg.validate();
  const auto dims = static_cast<Eigen::Index>(cfg.dims);
  const auto vocab = static_cast<Eigen::Index>(vocab_size);

  std::vector<std::size_t> counts(vocab_size, 0);
  std::size_t total_tokens = 0;
  for (const auto& seq : sequences) {
    for (auto token : seq) {
      if (token >= vocab_size) throw DomainError("skip-gram: token id out of range");
      ++counts[token];
    }
    total_tokens += seq.size();
  }

  std::mt19937_64 engine(mix_seed(cfg.seed, 0x5e));
  SkipGramModel model;
  model.input.resize(dims, vocab);
  const double half = 0.5 / static_cast<double>(cfg.dims);
  for (Eigen::Index c = 0; c < vocab; ++c) {
    for (Eigen::Index r = 0; r < dims; ++r) model.input(r, c) = (uniform01(engine) * 2.0 - 1.0) * half;
  }
  model.output = Matrix::Zero(dims, vocab);

  const UnigramSampler sampler(counts);
  if (total_tokens == 0 || sampler.empty()) return model;

  const double planned = static_cast<double>(total_tokens) * static_cast<double>(cfg.epochs);
  double processed = 0.0;
  Vector center_grad(dims);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& seq : sequences) {
      const std::size_t n = seq.size();
      for (std::size_t i = 0; i < n; ++i, processed += 1.0) {
        const double lr = cfg.learning_rate * std::max(1e-4, 1.0 - processed / planned);
        const auto center = static_cast<Eigen::Index>(seq[i]);
        const std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
        const std::size_t hi = std::min(n - 1, i + cfg.window);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const auto context = static_cast<Eigen::Index>(seq[j]);
          auto u = model.input.col(center);
          center_grad.setZero();

          double dot = u.dot(model.output.col(context));
          loss_sum += neg_log_sigmoid(dot);
          double g = sigmoid(dot) - 1.0;
          center_grad.noalias() += g * model.output.col(context);
          model.output.col(context).noalias() -= lr * g * u;

          for (std::size_t k = 0; k < cfg.negatives; ++k) {
            const auto neg = static_cast<Eigen::Index>(sampler.sample(engine));
            if (neg == context) continue;
            dot = u.dot(model.output.col(neg));
            loss_sum += neg_log_sigmoid(-dot);
            g = sigmoid(dot);
            center_grad.noalias() += g * model.output.col(neg);
            model.output.col(neg).noalias() -= lr * g * u;
          }
          u.noalias() -= lr * center_grad;
          ++pairs;
        }
      }
    }
    model.epoch_loss.push_back(pairs > 0 ? loss_sum / static_cast<double>(pairs) : 0.0);
  }
  return model;
}

}  // namespace reviewgraph
