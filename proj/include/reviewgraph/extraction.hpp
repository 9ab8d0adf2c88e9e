#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "reviewgraph/textprep.hpp"

namespace reviewgraph {

struct Triple {
  std::size_t review_id = 0;
  std::string subject;
  std::string predicate;
  std::string object;
  std::optional<double> sentiment;

  friend bool operator==(const Triple&, const Triple&) = default;
};

enum class PosTag { Det, Pron, Prep, Cop, Aux, Verb, Adv, Adj, Conj, Neg, Noun, Num, Punct };

/// Closed-class word lists plus suffix heuristics.
class PosGuesser {
 public:
  PosGuesser(std::unordered_map<std::string, PosTag> lexicon, const Lemmatizer& lemmatizer);

  static const PosGuesser& builtin();
  static PosGuesser load(const std::filesystem::path& dir);

  /// `sentence_initial` disables the capitalised-word-is-a-noun rule.
  PosTag tag(std::string_view word, bool sentence_initial) const;

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
  const Lemmatizer* lemmatizer_;
};

/// Pattern extractor over one prepared sentence. Patterns, tried at each
/// position from left to right:
///   NP COP [NEG] (ADV)* [VBN] PREP NP  -> (NP, "COP ... PREP", NP)
///   NP COP [NEG] complement            -> (NP, "COP [not]", complement)
///   NP [AUX] [NEG] VERB [PREP] NP      -> (NP, "VERB [PREP]", NP)
/// Noun phrases are runs of determiner/adjective/noun/number tokens with the
/// determiners dropped; a pronoun is a noun phrase by itself. Terms are
/// lowercased. Sentiment is left unset.
std::vector<Triple> extract_triples(std::string_view sentence,
                                    const PosGuesser& pos = PosGuesser::builtin());

/// Splits prepared review text into sentences and extracts from each; every
/// triple carries `review_id`.
std::vector<Triple> extract_review_triples(std::size_t review_id, std::string_view prepared_text,
                                           const PosGuesser& pos = PosGuesser::builtin());

// ---------------------------------------------------------------------------
// Term normalisation and filtering

struct NormalizeResources {
  const Lemmatizer* lemmatizer = nullptr;
  /// Space separated lemma phrase -> canonical term.
  std::unordered_map<std::string, std::string> synonyms;
  std::size_t longest_synonym = 1;  // words

  static const NormalizeResources& builtin();
  static NormalizeResources load(const std::filesystem::path& dir, const Lemmatizer& lemmatizer);
};

/// Lowercase, strip punctuation (underscores count as spaces), lemmatise each
/// word, apply phrase synonyms (longest match first), join with '_'.
/// std::nullopt means nothing survived and the term must be dropped.
std::optional<std::string> normalize_term(std::string_view term,
                                          const NormalizeResources& res = NormalizeResources::builtin());

/// Normalises all three terms; triples with a dropped term are removed.
std::vector<Triple> normalize_triples(const std::vector<Triple>& triples,
                                      const NormalizeResources& res = NormalizeResources::builtin());

/// Term-length rule. Inclusive: discard when any term has >= limit code
/// points. Exclusive: discard when > limit.
struct LengthFilter {
  std::size_t limit = 14;
  bool inclusive = true;

  bool rejects(std::string_view term) const;
};

std::vector<Triple> filter_triples(const std::vector<Triple>& triples, const LengthFilter& filter = {});

// ---------------------------------------------------------------------------
// Triple CSV: review_id,subject,predicate,object[,sentiment]

struct TripleImport {
  std::vector<Triple> triples;
  std::size_t skipped = 0;
};

TripleImport parse_triples_csv(std::string_view csv);
TripleImport import_triples(const std::filesystem::path& path);

std::string triples_to_csv(const std::vector<Triple>& triples);
void export_triples(const std::vector<Triple>& triples, const std::filesystem::path& path);

}  // namespace reviewgraph
