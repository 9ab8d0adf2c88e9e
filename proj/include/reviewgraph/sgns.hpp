#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "reviewgraph/common.hpp"

namespace reviewgraph {

/// Skip-gram with negative sampling over integer token sequences. Shared by
/// the Node2Vec embedder (tokens are node ids) and the Word2Vec baseline.
struct SkipGramConfig {
  std::size_t dims = 100;
  std::size_t window = 5;  // maximum distance on each side of the centre
  std::size_t epochs = 1;
  std::size_t negatives = 5;
  double learning_rate = 0.025;  // decays linearly to learning_rate * 1e-4
  std::uint64_t seed = 0;

  void validate() const;
};

struct SkipGramModel {
  Matrix input;   // dims x vocab; the embeddings
  Matrix output;  // dims x vocab; context vectors
  std::vector<double> epoch_loss;  // mean pair loss observed during each epoch
};

/// Tokens must lie in [0, vocab_size). Input vectors start uniform in
/// [-0.5/dims, 0.5/dims), output vectors at zero. Negatives are drawn from
/// the unigram distribution raised to 0.75; a draw equal to the positive
/// context is skipped. Single-threaded and deterministic.
SkipGramModel train_skipgram(const std::vector<std::vector<std::size_t>>& sequences, std::size_t vocab_size,
                             const SkipGramConfig& cfg);

/// Loss of one (centre, context) pair with k negatives, each column of
/// `negatives` is one negative context vector:
///   -log s(u.v) - sum_k log s(-u.v_k)
double pair_loss(const Vector& center, const Vector& context, const Matrix& negatives);

struct PairGradient {
  double loss = 0.0;
  Vector center;
  Vector context;
  Matrix negatives;
};
PairGradient pair_loss_gradient(const Vector& center, const Vector& context, const Matrix& negatives);

/// Cumulative table for sampling ids proportionally to count^power.
class UnigramSampler {
 public:
  UnigramSampler(const std::vector<std::size_t>& counts, double power = 0.75);

  template <typename Engine>
  std::size_t sample(Engine& engine) const {
    return locate(uniform01(engine) * cumulative_.back());
  }

  double probability(std::size_t id) const;
  bool empty() const { return cumulative_.empty() || cumulative_.back() <= 0.0; }

 private:
  std::size_t locate(double target) const;
  std::vector<double> cumulative_;
};

}  // namespace reviewgraph
