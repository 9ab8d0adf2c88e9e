#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "reviewgraph/common.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path data_path(const std::string& name) { return fs::path(REVIEWGRAPH_TEST_DATA_DIR) / name; }

/// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("reviewgraph_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline reviewgraph::Labels random_labels(std::mt19937_64& rng, std::size_t n, int lo = 1, int hi = 5) {
  std::uniform_int_distribution<int> pick(lo, hi);
  reviewgraph::Labels out(n);
  for (auto& v : out) v = pick(rng);
  return out;
}

/// Cohen's kappa from an explicit contingency table.
inline double kappa_oracle(const reviewgraph::Labels& y, const reviewgraph::Labels& y_hat) {
  std::map<int, std::map<int, double>> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < y.size(); ++i) {
    table[y[i]][y_hat[i]] += 1;
    rows[y[i]] += 1;
    cols[y_hat[i]] += 1;
  }
  const double n = static_cast<double>(y.size());
  double diag = 0;
  for (auto& [a, row] : table) diag += row.count(a) ? row[a] : 0.0;
  double chance = 0;
  for (auto& [c, count] : rows) chance += count * (cols.count(c) ? cols[c] : 0.0);
  const double p_o = diag / n;
  const double p_e = chance / (n * n);
  if (p_e == 1.0) return p_o == 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1 - p_e);
}

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({1e-6, std::abs(analytic), std::abs(numeric)});
}

inline double cosine(const reviewgraph::Vector& a, const reviewgraph::Vector& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

}  // namespace testing
