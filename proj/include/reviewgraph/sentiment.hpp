#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace reviewgraph {

struct Triple;

/// Valence dictionary for the rule-based scorer.
struct Lexicon {
  std::unordered_map<std::string, double> valence;   // [-4, 4]
  std::unordered_map<std::string, double> boosters;  // [-1, 1]
  std::unordered_set<std::string> negators;

  /// Throws InputError when a value leaves its allowed range.
  void validate() const;

  static const Lexicon& builtin();
  static Lexicon load(const std::filesystem::path& dir);
};

/// Scorer constants.
inline constexpr double kCompoundAlpha = 15.0;
inline constexpr double kNegationScalar = -0.74;
inline constexpr std::size_t kNegationWindow = 3;

/// Compound valence in (-1, 1): tokens from prepare_word2vec; each lexicon hit
/// is pushed away from zero by an immediately preceding booster and scaled by
/// kNegationScalar when a negator occurs in the kNegationWindow preceding
/// tokens; the sum s is mapped to s / sqrt(s^2 + kCompoundAlpha).
double score_text(std::string_view text, const Lexicon& lexicon = Lexicon::builtin());

/// score_text on "subject predicate object".
double score_triple(const Triple& triple, const Lexicon& lexicon = Lexicon::builtin());

/// The compound normalisation on its own.
double normalize_compound(double sum, double alpha = kCompoundAlpha);

}  // namespace reviewgraph
