#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace reviewgraph {

// Error categories surfaced by the library. The CLI maps them to exit codes.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using Label = int;
using Labels = std::vector<Label>;

/// Non-fatal diagnostics (skipped rows, fallbacks). Defaults to stderr; tests
/// and the CLI may redirect or silence it.
using WarningSink = std::function<void(std::string_view)>;
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

/// splitmix64 finalizer, used to derive independent seeds from (seed, stream).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from 53 random bits. Unlike the std
/// distributions this is identical across standard library implementations.
template <typename Engine>
double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n > 0.
template <typename Engine>
std::size_t uniform_index(Engine& engine, std::size_t n) {
  return static_cast<std::size_t>(uniform01(engine) * static_cast<double>(n)) % n;
}

/// Fisher-Yates with the portable index draw above.
template <typename Engine, typename T>
void shuffle(std::vector<T>& values, Engine& engine) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_index(engine, i)]);
  }
}

/// FNV-1a 64-bit; used for config hashes and input fingerprints.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

/// Number of UTF-8 code points in `text`.
std::size_t utf8_length(std::string_view text);

/// Whole-file helpers. Reading throws InputError, writing throws IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace reviewgraph
