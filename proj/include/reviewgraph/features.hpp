#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reviewgraph/common.hpp"
#include "reviewgraph/kgraph.hpp"

namespace reviewgraph {

struct FeatureMatrix {
  Matrix rows;  // n x f
  Labels labels;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> row_ids;

  std::size_t size() const { return labels.size(); }
  std::size_t width() const { return static_cast<std::size_t>(rows.cols()); }
  bool empty() const { return labels.empty(); }

  /// Throws DomainError on inconsistent sizes or non-finite entries.
  void validate() const;

  /// Rows at `indices`, in that order (repeats allowed).
  FeatureMatrix select(const std::vector<std::size_t>& indices) const;
};

enum class FeatureMode { N2V, N2VAvg, N2VAvgMinMax, SentimentOnly };

FeatureMode parse_feature_mode(std::string_view name);
std::string_view to_string(FeatureMode mode);

/// Columns: embedding dims (dim_0..) unless sentiment-only, then avg and, for
/// the min/max modes, min and max. Rows in ascending review_id. Throws
/// DomainError when the id sets of the inputs differ.
FeatureMatrix assemble(const std::map<std::size_t, Vector>& embeddings,
                       const std::map<std::size_t, SentimentAggregate>& aggregates,
                       const std::map<std::size_t, Label>& labels, FeatureMode mode);

/// Adds one named column on the right.
FeatureMatrix append_column(const FeatureMatrix& m, std::string name, const Vector& column);

enum class Sampling { None, Over, Under };

Sampling parse_sampling(std::string_view name);
std::string_view to_string(Sampling sampling);

/// Row indices realising the sampling. Oversampling keeps every row once and
/// then draws extra rows of each smaller class with replacement until it
/// reaches the majority count. Undersampling keeps, per class, a random
/// subset of minority-count rows; indices come back in ascending order.
/// The draws depend only on the labels and the seed.
std::vector<std::size_t> oversample_indices(const Labels& labels, std::uint64_t seed);
std::vector<std::size_t> undersample_indices(const Labels& labels, std::uint64_t seed);

FeatureMatrix oversample(const FeatureMatrix& m, std::uint64_t seed);
FeatureMatrix undersample(const FeatureMatrix& m, std::uint64_t seed);
FeatureMatrix apply_sampling(const FeatureMatrix& m, Sampling sampling, std::uint64_t seed);

/// Per-column standardisation with population statistics.
struct Scaler {
  Vector mean;
  Vector scale;  // 0 marks a constant column, which maps to 0

  Matrix apply(const Matrix& x) const;
};

Scaler fit_scaler(const Matrix& train);
Scaler fit_scaler(const FeatureMatrix& train);
FeatureMatrix apply_scaler(const Scaler& scaler, const FeatureMatrix& m);

std::map<Label, std::size_t> class_counts(const Labels& labels);

/// `review_id,label,<feature names>` with one row per example.
std::string feature_matrix_to_csv(const FeatureMatrix& m);
FeatureMatrix parse_feature_matrix_csv(std::string_view text);

}  // namespace reviewgraph
