#include "reviewgraph/textprep.hpp"

#include <algorithm>
#include <cctype>

#include "reviewgraph/common.hpp"
#include "reviewgraph/resources.hpp"

namespace reviewgraph {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Replaces the UTF-8 right single quotation mark with an ASCII apostrophe.
std::string normalize_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80) {
      const auto third = static_cast<unsigned char>(text[i + 2]);
      if (third == 0x98 || third == 0x99) {  // ‘ ’
        out.push_back('\'');
        i += 2;
        continue;
      }
      if (third == 0x93 || third == 0x94) {  // en dash, em dash
        out.push_back(' ');
        i += 2;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

bool is_apostrophe_like(char c) { return c == '\'' || c == '`'; }

std::string expand_contractions(std::string_view text, const TextResources& res) {
  std::string out;
  out.reserve(text.size() + 16);
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (!std::isalpha(c)) {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < text.size() &&
           (std::isalpha(static_cast<unsigned char>(text[j])) || text[j] == '\'')) {
      ++j;
    }
    auto word = text.substr(i, j - i);
    i = j;
    if (word.find('\'') == std::string_view::npos) {
      out.append(word);
      continue;
    }
    const auto lower = to_lower_ascii(word);
    std::string replacement;
    for (const auto& [contraction, expansion] : res.contractions) {
      if (lower == contraction) {
        replacement = expansion;
        break;
      }
    }
    if (replacement.empty() && ends_with(lower, "n't") && lower.size() > 3) {
      replacement = lower.substr(0, lower.size() - 3) + " not";
    }
    if (replacement.empty()) {
      out.append(word);
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(word.front()))) {
      replacement.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement.front())));
    }
    out.append(replacement);
  }
  return out;
}

std::string strip_html_tags(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '<') {
      auto close = text.find('>', i + 1);
      if (close != std::string_view::npos) {
        out.push_back(' ');
        i = close + 1;
        continue;
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

bool is_sentence_punct(char c) {
  return c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':';
}

}  // namespace

// ---------------------------------------------------------------------------
// Lemmatizer

Lemmatizer::Lemmatizer(std::unordered_map<std::string, std::string> exceptions,
                       std::unordered_set<std::string> verb_bases)
    : exceptions_(std::move(exceptions)), verb_bases_(std::move(verb_bases)) {}

std::string Lemmatizer::step(const std::string& w) const {
  if (auto it = exceptions_.find(w); it != exceptions_.end()) return it->second;
  if (w.size() <= 3 || verb_bases_.contains(w)) return w;

  auto verb_candidate = [&](const std::string& stem) -> std::string {
    if (stem.size() < 2) return {};
    if (verb_bases_.contains(stem)) return stem;
    if (verb_bases_.contains(stem + "e")) return stem + "e";
    const auto n = stem.size();
    if (n >= 3 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1])) {
      auto undoubled = stem.substr(0, n - 1);
      if (verb_bases_.contains(undoubled)) return undoubled;
    }
    if (stem.back() == 'i') {
      auto with_y = stem.substr(0, n - 1) + "y";
      if (verb_bases_.contains(with_y)) return with_y;
    }
    return {};
  };

  if (ends_with(w, "ing") && w.size() > 5) {
    if (auto base = verb_candidate(w.substr(0, w.size() - 3)); !base.empty()) return base;
  }
  if (ends_with(w, "ed") && w.size() > 4) {
    if (auto base = verb_candidate(w.substr(0, w.size() - 2)); !base.empty()) return base;
  }
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is") || ends_with(w, "ous")) {
    return w;
  }
  if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
  for (std::string_view suffix : {"sses", "ches", "shes", "xes", "zzes"}) {
    if (ends_with(w, suffix)) return w.substr(0, w.size() - 2);
  }
  if (w.back() == 's') return w.substr(0, w.size() - 1);
  return w;
}

std::string Lemmatizer::lemma(std::string_view word) const {
  std::string current(word);
  for (int i = 0; i < 4; ++i) {
    auto next = step(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

// ---------------------------------------------------------------------------
// Resources

TextResources TextResources::load(const std::filesystem::path& dir) {
  std::unordered_map<std::string, std::string> exceptions;
  for (auto& [surface, lemma] : parse_tsv_pairs(read_resource("lemmas.tsv", dir))) {
    exceptions.emplace(std::move(surface), std::move(lemma));
  }
  return TextResources{
      parse_word_set(read_resource("stopwords.txt", dir)),
      parse_tsv_pairs(read_resource("contractions.tsv", dir)),
      Lemmatizer(std::move(exceptions), parse_word_set(read_resource("verbs.txt", dir))),
  };
}

const TextResources& TextResources::builtin() {
  static const TextResources resources = load({});
  return resources;
}

// ---------------------------------------------------------------------------
// Preprocessing variants

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

TokenList prepare_word2vec(std::string_view text) {
  const auto normalized = normalize_quotes(text);
  TokenList tokens;
  std::string current;
  for (unsigned char c : normalized) {
    if (c == '-' || is_apostrophe_like(static_cast<char>(c))) continue;
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TokenList prepare_classic(std::string_view text, const TextResources& res) {
  TokenList tokens;
  for (auto& token : prepare_word2vec(text)) {
    if (res.stopwords.contains(token)) continue;
    auto lemma = res.lemmatizer.lemma(token);
    if (res.stopwords.contains(lemma)) continue;
    tokens.push_back(std::move(lemma));
  }
  return tokens;
}

std::string prepare_graph_text(std::string_view text, const Translator& translator,
                               const TextResources& res) {
  std::string source(text);
  if (translator) {
    try {
      source = translator(text);
    } catch (const std::exception& e) {
      warn(std::string("translation failed, keeping original text: ") + e.what());
    }
  }
  auto cleaned = strip_html_tags(expand_contractions(normalize_quotes(source), res));
  std::erase_if(cleaned, [](char c) { return c == '-' || c == '"' || is_apostrophe_like(c); });

  std::string out;
  out.reserve(cleaned.size() + 8);
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    const char c = cleaned[i];
    const bool space = c == ' ' || c == '\t' || c == '\r';
    if (space) {
      if (!out.empty() && out.back() != ' ' && out.back() != '\n') out.push_back(' ');
      continue;
    }
    if (c == '\n' && !out.empty() && out.back() == ' ') out.pop_back();
    out.push_back(c);
    if (is_sentence_punct(c) && i + 1 < cleaned.size() &&
        std::isalpha(static_cast<unsigned char>(cleaned[i + 1]))) {
      out.push_back(' ');
    }
  }
  while (!out.empty() && (out.back() == ' ' || out.back() == '\n')) out.pop_back();
  auto first = out.find_first_not_of(" \n");
  return first == std::string::npos ? std::string{} : out.substr(first);
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::string current;
  auto flush = [&] {
    auto first = current.find_first_not_of(' ');
    auto last = current.find_last_not_of(' ');
    if (first != std::string::npos) sentences.push_back(current.substr(first, last - first + 1));
    current.clear();
  };
  for (char c : text) {
    if (c == '\n' || c == '\r') {
      flush();
      continue;
    }
    current.push_back(c);
    if (c == '.' || c == '!' || c == '?' || c == ';') flush();
  }
  flush();
  return sentences;
}

}  // namespace reviewgraph
