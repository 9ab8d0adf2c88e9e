#include "reviewgraph/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "reviewgraph/common.hpp"
#include "reviewgraph/csv.hpp"
#include "reviewgraph/resources.hpp"

namespace reviewgraph {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

PosTag parse_tag(std::string_view name) {
  static const std::unordered_map<std::string_view, PosTag> kNames = {
      {"DET", PosTag::Det},   {"PRON", PosTag::Pron}, {"PREP", PosTag::Prep},
      {"COP", PosTag::Cop},   {"AUX", PosTag::Aux},   {"VERB", PosTag::Verb},
      {"ADV", PosTag::Adv},   {"ADJ", PosTag::Adj},   {"CONJ", PosTag::Conj},
      {"NEG", PosTag::Neg},   {"NOUN", PosTag::Noun}, {"NUM", PosTag::Num},
  };
  auto it = kNames.find(name);
  if (it == kNames.end()) throw InputError("unknown POS tag '" + std::string(name) + "'");
  return it->second;
}

struct Token {
  std::string text;
  PosTag tag;
};

std::vector<Token> tokenize(std::string_view sentence, const PosGuesser& pos) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < sentence.size()) {
    const auto c = static_cast<unsigned char>(sentence[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (is_word_byte(c)) {
      std::size_t j = i;
      while (j < sentence.size() && is_word_byte(static_cast<unsigned char>(sentence[j]))) ++j;
      auto word = sentence.substr(i, j - i);
      tokens.push_back({std::string(word), pos.tag(word, tokens.empty())});
      i = j;
      continue;
    }
    tokens.push_back({std::string(1, sentence[i]), PosTag::Punct});
    ++i;
  }
  return tokens;
}

bool is_np_word(PosTag t) { return t == PosTag::Adj || t == PosTag::Noun || t == PosTag::Num; }

bool is_participle(const Token& t) {
  return t.tag == PosTag::Verb && (ends_with(t.text, "ed") || ends_with(t.text, "en"));
}

struct Span {
  std::size_t end = 0;  // one past the last token
  std::string text;
};

class Chunker {
 public:
  explicit Chunker(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  std::size_t size() const { return tokens_.size(); }

  PosTag tag(std::size_t i) const { return i < tokens_.size() ? tokens_[i].tag : PosTag::Punct; }

  std::string lower(std::size_t i) const { return to_lower_ascii(tokens_[i].text); }

  // DET* (ADJ|NOUN|NUM)+, or a single pronoun.
  std::optional<Span> noun_phrase(std::size_t i) const {
    if (tag(i) == PosTag::Pron) return Span{i + 1, lower(i)};
    std::size_t j = i;
    while (tag(j) == PosTag::Det) ++j;
    Span span{j, {}};
    while (j < size() && is_np_word(tag(j))) append(span.text, j++);
    if (span.text.empty()) return std::nullopt;
    span.end = j;
    return span;
  }

  // [DET] (ADV|NEG)* (ADJ|NOUN|NUM|participle)+
  std::optional<Span> complement(std::size_t i) const {
    std::size_t j = i;
    while (tag(j) == PosTag::Det) ++j;
    std::string text;
    while (tag(j) == PosTag::Adv || tag(j) == PosTag::Neg) append(text, j++);
    std::size_t heads = 0;
    while (j < size() && (is_np_word(tag(j)) || is_participle(tokens_[j]))) {
      append(text, j++);
      ++heads;
    }
    if (heads == 0) return std::nullopt;
    return Span{j, text};
  }

  void append(std::string& text, std::size_t i) const {
    if (!text.empty()) text.push_back(' ');
    text += lower(i);
  }

 private:
  std::vector<Token> tokens_;
};

}  // namespace

// ---------------------------------------------------------------------------
// POS guessing

PosGuesser::PosGuesser(std::unordered_map<std::string, PosTag> lexicon, const Lemmatizer& lemmatizer)
    : lexicon_(std::move(lexicon)), lemmatizer_(&lemmatizer) {}

PosGuesser PosGuesser::load(const std::filesystem::path& dir) {
  std::unordered_map<std::string, PosTag> lexicon;
  for (const auto& [word, tag] : parse_tsv_pairs(read_resource("pos.tsv", dir))) {
    lexicon.emplace(word, parse_tag(tag));
  }
  return PosGuesser(std::move(lexicon), TextResources::builtin().lemmatizer);
}

const PosGuesser& PosGuesser::builtin() {
  static const PosGuesser guesser = load({});
  return guesser;
}

PosTag PosGuesser::tag(std::string_view word, bool sentence_initial) const {
  const auto lower = to_lower_ascii(word);
  if (auto it = lexicon_.find(lower); it != lexicon_.end()) return it->second;
  for (unsigned char c : lower) {
    if (std::isdigit(c)) return PosTag::Num;
  }
  if (!sentence_initial && std::isupper(static_cast<unsigned char>(word.front()))) return PosTag::Noun;
  if (lower.size() > 4 && ends_with(lower, "ly")) return PosTag::Adv;
  if (ends_with(lower, "ing") || ends_with(lower, "ed")) {
    const auto base = lemmatizer_->lemma(lower);
    if (base != lower && lemmatizer_->verb_bases().contains(base)) return PosTag::Verb;
    return ends_with(lower, "ed") ? PosTag::Adj : PosTag::Noun;
  }
  for (std::string_view suffix : {"ful", "ous", "ive", "able", "ible", "ical", "less", "ish"}) {
    if (lower.size() > suffix.size() + 2 && ends_with(lower, suffix)) return PosTag::Adj;
  }
  return PosTag::Noun;
}

// ---------------------------------------------------------------------------
// Extraction

std::vector<Triple> extract_triples(std::string_view sentence, const PosGuesser& pos) {
  std::vector<Triple> triples;
  const Chunker chunks(tokenize(sentence, pos));
  auto emit = [&](const std::string& s, const std::string& p, const std::string& o) {
    triples.push_back(Triple{0, s, p, o, std::nullopt});
  };

  std::size_t i = 0;
  while (i < chunks.size()) {
    auto subject = chunks.noun_phrase(i);
    if (!subject) {
      ++i;
      continue;
    }
    const std::size_t j = subject->end;

    if (chunks.tag(j) == PosTag::Cop) {
      std::string predicate = chunks.lower(j);
      std::size_t k = j + 1;
      if (chunks.tag(k) == PosTag::Neg) chunks.append(predicate, k++);

      // Copula + preposition, optionally through adverbs and a participle.
      std::size_t m = k;
      std::string through = predicate;
      while (chunks.tag(m) == PosTag::Adv) chunks.append(through, m++);
      if ((chunks.tag(m) == PosTag::Verb || chunks.tag(m) == PosTag::Adj) &&
          chunks.tag(m + 1) == PosTag::Prep) {
        chunks.append(through, m++);
      }
      if (chunks.tag(m) == PosTag::Prep) {
        chunks.append(through, m);
        if (auto object = chunks.noun_phrase(m + 1)) {
          emit(subject->text, through, object->text);
          i = object->end;
          continue;
        }
      }

      if (auto object = chunks.complement(k)) {
        emit(subject->text, predicate, object->text);
        i = object->end;
        continue;
      }
    }

    std::size_t k = j;
    std::string predicate;
    if (chunks.tag(k) == PosTag::Aux) chunks.append(predicate, k++);
    if (chunks.tag(k) == PosTag::Neg) chunks.append(predicate, k++);
    if (chunks.tag(k) == PosTag::Verb) {
      chunks.append(predicate, k++);
      if (chunks.tag(k) == PosTag::Prep) chunks.append(predicate, k++);
      if (auto object = chunks.noun_phrase(k)) {
        emit(subject->text, predicate, object->text);
        i = object->end;
        continue;
      }
    }
    i = j;
  }
  return triples;
}

std::vector<Triple> extract_review_triples(std::size_t review_id, std::string_view prepared_text,
                                           const PosGuesser& pos) {
  std::vector<Triple> triples;
  for (const auto& sentence : split_sentences(prepared_text)) {
    for (auto& triple : extract_triples(sentence, pos)) {
      triple.review_id = review_id;
      triples.push_back(std::move(triple));
    }
  }
  return triples;
}

// ---------------------------------------------------------------------------
// Normalisation

NormalizeResources NormalizeResources::load(const std::filesystem::path& dir, const Lemmatizer& lemmatizer) {
  NormalizeResources res;
  res.lemmatizer = &lemmatizer;
  for (auto& [phrase, canonical] : parse_tsv_pairs(read_resource("synonyms.tsv", dir))) {
    const auto words = static_cast<std::size_t>(std::count(phrase.begin(), phrase.end(), ' ')) + 1;
    res.longest_synonym = std::max(res.longest_synonym, words);
    res.synonyms.emplace(std::move(phrase), std::move(canonical));
  }
  return res;
}

const NormalizeResources& NormalizeResources::builtin() {
  static const NormalizeResources res = load({}, TextResources::builtin().lemmatizer);
  return res;
}

std::optional<std::string> normalize_term(std::string_view term, const NormalizeResources& res) {
  std::string spaced(term);
  for (auto& c : spaced) {
    if (c == '_') c = ' ';
  }
  auto words = prepare_word2vec(spaced);
  if (words.empty()) return std::nullopt;
  for (auto& word : words) word = res.lemmatizer->lemma(word);

  std::vector<std::string> mapped;
  std::size_t i = 0;
  while (i < words.size()) {
    bool matched = false;
    for (std::size_t len = std::min(res.longest_synonym, words.size() - i); len >= 1; --len) {
      std::string phrase = words[i];
      for (std::size_t k = 1; k < len; ++k) phrase += " " + words[i + k];
      if (auto it = res.synonyms.find(phrase); it != res.synonyms.end()) {
        mapped.push_back(it->second);
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) mapped.push_back(words[i++]);
  }

  std::string out;
  for (const auto& word : mapped) {
    if (!out.empty()) out.push_back('_');
    out += word;
  }
  return out;
}

std::vector<Triple> normalize_triples(const std::vector<Triple>& triples, const NormalizeResources& res) {
  std::vector<Triple> out;
  out.reserve(triples.size());
  for (const auto& triple : triples) {
    auto s = normalize_term(triple.subject, res);
    auto p = normalize_term(triple.predicate, res);
    auto o = normalize_term(triple.object, res);
    if (!s || !p || !o) continue;
    out.push_back(Triple{triple.review_id, *s, *p, *o, triple.sentiment});
  }
  return out;
}

bool LengthFilter::rejects(std::string_view term) const {
  const auto length = utf8_length(term);
  return inclusive ? length >= limit : length > limit;
}

std::vector<Triple> filter_triples(const std::vector<Triple>& triples, const LengthFilter& filter) {
  std::vector<Triple> kept;
  for (const auto& triple : triples) {
    if (filter.rejects(triple.subject) || filter.rejects(triple.predicate) ||
        filter.rejects(triple.object)) {
      continue;
    }
    kept.push_back(triple);
  }
  return kept;
}

// ---------------------------------------------------------------------------
// CSV

TripleImport parse_triples_csv(std::string_view text) {
  auto rows = csv::parse(text);
  if (rows.empty()) throw InputError("triple CSV: missing header");
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column("review_id");
  const auto s_col = column("subject");
  const auto p_col = column("predicate");
  const auto o_col = column("object");
  const auto sent_col = column("sentiment");
  if (!id_col || !s_col || !p_col || !o_col) {
    throw InputError("triple CSV: header must contain review_id,subject,predicate,object");
  }

  TripleImport result;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      ++result.skipped;
      continue;
    }
    Triple triple;
    try {
      std::size_t used = 0;
      const auto id = std::stoull(row[*id_col], &used);
      if (used != row[*id_col].size()) throw std::invalid_argument("id");
      triple.review_id = static_cast<std::size_t>(id);
      if (sent_col && !row[*sent_col].empty()) {
        const double value = std::stod(row[*sent_col], &used);
        if (used != row[*sent_col].size() || !(value >= -1.0 && value <= 1.0)) {
          throw std::invalid_argument("sentiment");
        }
        triple.sentiment = value;
      }
    } catch (const std::exception&) {
      ++result.skipped;
      continue;
    }
    triple.subject = row[*s_col];
    triple.predicate = row[*p_col];
    triple.object = row[*o_col];
    if (triple.subject.empty() || triple.predicate.empty() || triple.object.empty()) {
      ++result.skipped;
      continue;
    }
    result.triples.push_back(std::move(triple));
  }
  if (result.skipped > 0) warn("skipped " + std::to_string(result.skipped) + " bad triple row(s)");
  return result;
}

TripleImport import_triples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read triples file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_triples_csv(buffer.str());
}

std::string triples_to_csv(const std::vector<Triple>& triples) {
  std::string out = "review_id,subject,predicate,object,sentiment\n";
  for (const auto& t : triples) {
    out += csv::join({std::to_string(t.review_id), t.subject, t.predicate, t.object,
                      t.sentiment ? format_double(*t.sentiment) : std::string{}});
    out.push_back('\n');
  }
  return out;
}

void export_triples(const std::vector<Triple>& triples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << triples_to_csv(triples);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace reviewgraph
