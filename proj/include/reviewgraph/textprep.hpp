#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace reviewgraph {

using TokenList = std::vector<std::string>;

/// Dictionary-plus-suffix-rule lemmatizer. Applies the rules until a fixed
/// point so that lemma(lemma(w)) == lemma(w).
class Lemmatizer {
 public:
  Lemmatizer(std::unordered_map<std::string, std::string> exceptions,
             std::unordered_set<std::string> verb_bases);

  std::string lemma(std::string_view word) const;

  const std::unordered_set<std::string>& verb_bases() const { return verb_bases_; }
  const std::unordered_map<std::string, std::string>& exceptions() const { return exceptions_; }

 private:
  std::string step(const std::string& word) const;

  std::unordered_map<std::string, std::string> exceptions_;
  std::unordered_set<std::string> verb_bases_;
};

/// Read-only lookup tables shared by the three preprocessing variants.
struct TextResources {
  std::unordered_set<std::string> stopwords;
  std::vector<std::pair<std::string, std::string>> contractions;
  Lemmatizer lemmatizer;

  /// Tables compiled into the library (resources/ at build time).
  static const TextResources& builtin();
  /// Tables read from `dir`, falling back to the bundled copy per file.
  static TextResources load(const std::filesystem::path& dir);
};

/// Optional language normalisation hook applied before graph preprocessing.
/// Implementations may throw; the caller then keeps the original text.
using Translator = std::function<std::string(std::string_view)>;

/// Lowercase, drop punctuation, split on whitespace. Hyphens and apostrophes
/// are deleted (joining the pieces), any other non-alphanumeric ASCII byte
/// separates tokens. Stopwords are kept and nothing is lemmatised.
TokenList prepare_word2vec(std::string_view text);

/// prepare_word2vec followed by lemmatisation and stopword removal (a token is
/// dropped when either its surface form or its lemma is a stopword).
TokenList prepare_classic(std::string_view text, const TextResources& res = TextResources::builtin());

/// Cleans raw review text for triple extraction: translation hook, contraction
/// expansion, HTML tag removal, hyphen/apostrophe removal, and a space after
/// sentence punctuation directly followed by a letter. Casing is preserved.
std::string prepare_graph_text(std::string_view text, const Translator& translator = {},
                               const TextResources& res = TextResources::builtin());

/// Splits prepared text into sentences at . ! ? ; and line breaks.
std::vector<std::string> split_sentences(std::string_view text);

bool is_word_byte(unsigned char c);
std::string to_lower_ascii(std::string_view text);

}  // namespace reviewgraph
