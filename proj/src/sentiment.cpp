#include "reviewgraph/sentiment.hpp"

#include <cmath>

#include "reviewgraph/common.hpp"
#include "reviewgraph/extraction.hpp"
#include "reviewgraph/resources.hpp"
#include "reviewgraph/textprep.hpp"

namespace reviewgraph {

namespace {

std::unordered_map<std::string, double> parse_scores(std::string_view text, std::string_view what) {
  std::unordered_map<std::string, double> scores;
  for (const auto& [token, value] : parse_tsv_pairs(text)) {
    try {
      scores[token] = std::stod(value);
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": bad value for '" + token + "'");
    }
  }
  return scores;
}

}  // namespace

void Lexicon::validate() const {
  for (const auto& [token, value] : valence) {
    if (!(value >= -4.0 && value <= 4.0)) throw InputError("valence out of range for '" + token + "'");
  }
  for (const auto& [token, value] : boosters) {
    if (!(value >= -1.0 && value <= 1.0)) throw InputError("booster out of range for '" + token + "'");
  }
}

Lexicon Lexicon::load(const std::filesystem::path& dir) {
  Lexicon lexicon{
      parse_scores(read_resource("lexicon.tsv", dir), "lexicon"),
      parse_scores(read_resource("boosters.tsv", dir), "boosters"),
      parse_word_set(read_resource("negators.txt", dir)),
  };
  lexicon.validate();
  return lexicon;
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lexicon = load({});
  return lexicon;
}

double normalize_compound(double sum, double alpha) {
  if (sum == 0.0) return 0.0;
  return sum / std::sqrt(sum * sum + alpha);
}

double score_text(std::string_view text, const Lexicon& lexicon) {
  const auto tokens = prepare_word2vec(text);
  double sum = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto hit = lexicon.valence.find(tokens[i]);
    if (hit == lexicon.valence.end()) continue;
    double value = hit->second;
    if (i > 0) {
      if (auto boost = lexicon.boosters.find(tokens[i - 1]); boost != lexicon.boosters.end()) {
        value += value > 0 ? boost->second : -boost->second;
      }
    }
    const std::size_t first = i >= kNegationWindow ? i - kNegationWindow : 0;
    for (std::size_t j = first; j < i; ++j) {
      if (lexicon.negators.contains(tokens[j])) {
        value *= kNegationScalar;
        break;
      }
    }
    sum += value;
  }
  return normalize_compound(sum);
}

double score_triple(const Triple& triple, const Lexicon& lexicon) {
  return score_text(triple.subject + " " + triple.predicate + " " + triple.object, lexicon);
}

}  // namespace reviewgraph
