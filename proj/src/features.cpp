#include "reviewgraph/features.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "reviewgraph/csv.hpp"

namespace reviewgraph {

void FeatureMatrix::validate() const {
  if (static_cast<std::size_t>(rows.rows()) != labels.size() || row_ids.size() != labels.size()) {
    throw DomainError("feature matrix: row, label and id counts differ");
  }
  if (feature_names.size() != width()) throw DomainError("feature matrix: name count differs from width");
  if (!rows.allFinite()) throw DomainError("feature matrix: non-finite entry");
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::size_t>& indices) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  out.rows.resize(static_cast<Eigen::Index>(indices.size()), rows.cols());
  out.labels.reserve(indices.size());
  out.row_ids.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = indices[i];
    if (src >= size()) throw DomainError("feature matrix: row index out of range");
    out.rows.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(src));
    out.labels.push_back(labels[src]);
    out.row_ids.push_back(row_ids[src]);
  }
  return out;
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "n2v") return FeatureMode::N2V;
  if (name == "n2v+avg") return FeatureMode::N2VAvg;
  if (name == "n2v+avg+minmax") return FeatureMode::N2VAvgMinMax;
  if (name == "sentiment-only") return FeatureMode::SentimentOnly;
  throw DomainError("unknown feature mode '" + std::string(name) + "'");
}

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::N2V:
      return "n2v";
    case FeatureMode::N2VAvg:
      return "n2v+avg";
    case FeatureMode::N2VAvgMinMax:
      return "n2v+avg+minmax";
    case FeatureMode::SentimentOnly:
      return "sentiment-only";
  }
  return "n2v";
}

namespace {

template <typename A, typename B>
bool same_keys(const std::map<std::size_t, A>& a, const std::map<std::size_t, B>& b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) { return x.first == y.first; });
}

}  // namespace

FeatureMatrix assemble(const std::map<std::size_t, Vector>& embeddings,
                       const std::map<std::size_t, SentimentAggregate>& aggregates,
                       const std::map<std::size_t, Label>& labels, FeatureMode mode) {
  const bool use_embedding = mode != FeatureMode::SentimentOnly;
  const bool use_avg = mode != FeatureMode::N2V;
  const bool use_minmax = mode == FeatureMode::N2VAvgMinMax || mode == FeatureMode::SentimentOnly;

  if (use_embedding && use_avg && !same_keys(embeddings, aggregates)) {
    throw DomainError("assemble: embedding and sentiment review ids differ");
  }
  const auto n = use_embedding ? embeddings.size() : aggregates.size();
  std::vector<std::size_t> ids;
  ids.reserve(n);
  if (use_embedding) {
    for (const auto& entry : embeddings) ids.push_back(entry.first);
  } else {
    for (const auto& entry : aggregates) ids.push_back(entry.first);
  }

  std::size_t dims = 0;
  if (use_embedding && !embeddings.empty()) dims = static_cast<std::size_t>(embeddings.begin()->second.size());

  FeatureMatrix m;
  for (std::size_t d = 0; d < dims; ++d) m.feature_names.push_back("dim_" + std::to_string(d));
  if (use_avg) m.feature_names.emplace_back("avg_sentiment");
  if (use_minmax) {
    m.feature_names.emplace_back("min_sentiment");
    m.feature_names.emplace_back("max_sentiment");
  }
  m.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m.feature_names.size()));

  for (std::size_t r = 0; r < n; ++r) {
    const auto id = ids[r];
    auto label = labels.find(id);
    if (label == labels.end()) throw DomainError("assemble: no label for review " + std::to_string(id));
    const auto row = static_cast<Eigen::Index>(r);
    Eigen::Index col = 0;
    if (use_embedding) {
      const auto& v = embeddings.at(id);
      if (static_cast<std::size_t>(v.size()) != dims) throw DomainError("assemble: embedding widths differ");
      m.rows.row(row).head(v.size()) = v.transpose();
      col = v.size();
    }
    if (use_avg || use_minmax) {
      auto agg = aggregates.find(id);
      if (agg == aggregates.end()) throw DomainError("assemble: no sentiment for review " + std::to_string(id));
      if (use_avg) m.rows(row, col++) = agg->second.avg;
      if (use_minmax) {
        m.rows(row, col++) = agg->second.min;
        m.rows(row, col++) = agg->second.max;
      }
    }
    m.labels.push_back(label->second);
    m.row_ids.push_back(id);
  }
  m.validate();
  return m;
}

FeatureMatrix append_column(const FeatureMatrix& m, std::string name, const Vector& column) {
  if (static_cast<std::size_t>(column.size()) != m.size()) throw DomainError("append_column: length mismatch");
  FeatureMatrix out = m;
  out.rows.conservativeResize(Eigen::NoChange, m.rows.cols() + 1);
  out.rows.col(m.rows.cols()) = column;
  out.feature_names.push_back(std::move(name));
  return out;
}

Sampling parse_sampling(std::string_view name) {
  if (name == "none") return Sampling::None;
  if (name == "over") return Sampling::Over;
  if (name == "under") return Sampling::Under;
  throw DomainError("unknown sampling '" + std::string(name) + "'");
}

std::string_view to_string(Sampling sampling) {
  switch (sampling) {
    case Sampling::None:
      return "none";
    case Sampling::Over:
      return "over";
    case Sampling::Under:
      return "under";
  }
  return "none";
}

std::map<Label, std::size_t> class_counts(const Labels& labels) {
  std::map<Label, std::size_t> counts;
  for (auto label : labels) ++counts[label];
  return counts;
}

namespace {

std::map<Label, std::vector<std::size_t>> rows_by_class(const Labels& labels) {
  if (labels.empty()) throw DomainError("sampling: empty matrix");
  std::map<Label, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

std::vector<std::size_t> oversample_indices(const Labels& labels, std::uint64_t seed) {
  const auto groups = rows_by_class(labels);
  std::size_t majority = 0;
  for (const auto& [label, rows] : groups) majority = std::max(majority, rows.size());

  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  for (const auto& [label, rows] : groups) {
    std::mt19937_64 engine(mix_seed(seed, static_cast<std::uint64_t>(label)));
    for (std::size_t k = rows.size(); k < majority; ++k) out.push_back(rows[uniform_index(engine, rows.size())]);
  }
  return out;
}

std::vector<std::size_t> undersample_indices(const Labels& labels, std::uint64_t seed) {
  auto groups = rows_by_class(labels);
  std::size_t minority = labels.size();
  for (const auto& [label, rows] : groups) minority = std::min(minority, rows.size());

  std::vector<std::size_t> out;
  for (auto& [label, rows] : groups) {
    std::mt19937_64 engine(mix_seed(seed, static_cast<std::uint64_t>(label)));
    shuffle(rows, engine);
    out.insert(out.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(minority));
  }
  std::sort(out.begin(), out.end());
  return out;
}

FeatureMatrix oversample(const FeatureMatrix& m, std::uint64_t seed) {
  return m.select(oversample_indices(m.labels, seed));
}

FeatureMatrix undersample(const FeatureMatrix& m, std::uint64_t seed) {
  return m.select(undersample_indices(m.labels, seed));
}

FeatureMatrix apply_sampling(const FeatureMatrix& m, Sampling sampling, std::uint64_t seed) {
  switch (sampling) {
    case Sampling::Over:
      return oversample(m, seed);
    case Sampling::Under:
      return undersample(m, seed);
    case Sampling::None:
      break;
  }
  return m;
}

Scaler fit_scaler(const Matrix& train) {
  Scaler s;
  const auto n = static_cast<double>(train.rows());
  s.mean = Vector::Zero(train.cols());
  s.scale = Vector::Zero(train.cols());
  if (train.rows() == 0) return s;
  for (Eigen::Index c = 0; c < train.cols(); ++c) {
    const double mean = train.col(c).sum() / n;
    const double var = (train.col(c).array() - mean).square().sum() / n;
    s.mean[c] = mean;
    s.scale[c] = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return s;
}

Scaler fit_scaler(const FeatureMatrix& train) { return fit_scaler(train.rows); }

Matrix Scaler::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw DomainError("scaler: width mismatch");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (scale[c] == 0.0) {
      out.col(c).setZero();
    } else {
      out.col(c) = (x.col(c).array() - mean[c]) / scale[c];
    }
  }
  return out;
}

FeatureMatrix apply_scaler(const Scaler& scaler, const FeatureMatrix& m) {
  FeatureMatrix out = m;
  out.rows = scaler.apply(m.rows);
  return out;
}

std::string feature_matrix_to_csv(const FeatureMatrix& m) {
  csv::Row header{"review_id", "label"};
  header.insert(header.end(), m.feature_names.begin(), m.feature_names.end());
  std::string out = csv::join(header) + "\n";
  for (std::size_t r = 0; r < m.size(); ++r) {
    out += std::to_string(m.row_ids[r]) + "," + std::to_string(m.labels[r]);
    for (Eigen::Index c = 0; c < m.rows.cols(); ++c) {
      out.push_back(',');
      out += format_double(m.rows(static_cast<Eigen::Index>(r), c));
    }
    out.push_back('\n');
  }
  return out;
}

FeatureMatrix parse_feature_matrix_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "review_id" || rows[0][1] != "label") {
    throw InputError("feature CSV: missing review_id,label header");
  }
  FeatureMatrix m;
  m.feature_names.assign(rows[0].begin() + 2, rows[0].end());
  m.rows.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(m.feature_names.size()));
  try {
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != rows[0].size()) throw InputError("feature CSV: row " + std::to_string(r) + " width");
      m.row_ids.push_back(std::stoull(row[0]));
      m.labels.push_back(std::stoi(row[1]));
      for (std::size_t c = 2; c < row.size(); ++c) {
        m.rows(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 2)) = std::stod(row[c]);
      }
    }
  } catch (const std::logic_error& e) {
    throw InputError(std::string("feature CSV: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace reviewgraph
