#include <doctest.h>

#include <algorithm>
#include <random>

#include "reviewgraph/textprep.hpp"
#include "test_support.hpp"

using namespace reviewgraph;

TEST_SUITE("textprep") {
  TEST_CASE("classic preparation drops stopwords and lemmatises") {
    CHECK(prepare_classic("The rooms were great!") == TokenList{"room", "great"});
    CHECK(prepare_classic("").empty());
    CHECK(prepare_classic("running running") == TokenList{"run", "run"});
  }

  TEST_CASE("word2vec preparation keeps every word") {
    CHECK(prepare_word2vec("The rooms were great!") == TokenList{"the", "rooms", "were", "great"});
    CHECK(prepare_word2vec("").empty());
    CHECK(prepare_word2vec("Wi-Fi speed") == TokenList{"wifi", "speed"});
  }

  TEST_CASE("graph preparation") {
    CHECK(prepare_graph_text("can't") == "cannot");
    CHECK(prepare_graph_text("Great!Room was fine.") == "Great! Room was fine.");
    CHECK(prepare_graph_text("").empty());
    CHECK(prepare_graph_text("<b>Nice</b> stay") == "Nice stay");
  }

  TEST_CASE("a failing translator leaves the text unchanged") {
    Translator broken = [](std::string_view) -> std::string { throw std::runtime_error("offline"); };
    CHECK(prepare_graph_text("The bed was fine.", broken) == "The bed was fine.");
    Translator upper = [](std::string_view) -> std::string { return "The bed was fine."; };
    CHECK(prepare_graph_text("Das Bett war gut.", upper) == "The bed was fine.");
  }

  TEST_CASE("sentences split at terminal punctuation") {
    const auto s = split_sentences("The bed was fine. Staff were rude! Why? ok");
    CHECK(s.size() == 4);
  }

  TEST_CASE("tokens are non-empty and whitespace free") {
    for (const auto& t : prepare_word2vec("  Hello,\tworld \n ... it's  -- fine ")) {
      CHECK_FALSE(t.empty());
      CHECK(t.find_first_of(" \t\n") == std::string::npos);
    }
  }

  TEST_CASE("lemmatisation is idempotent") {
    const auto& lem = TextResources::builtin().lemmatizer;
    for (std::string w : {"rooms", "running", "stayed", "buses", "was", "were", "better", "beds", "nights"}) {
      CHECK(lem.lemma(lem.lemma(w)) == lem.lemma(w));
    }
  }

  TEST_CASE("each variant is idempotent on its own output on random reviews") {
    const std::vector<std::string> words = {"The", "rooms", "were", "GREAT", "can't", "Wi-Fi", "staff's",
                                            "running", "<i>pool</i>", "bed.", "Nice!Stay", "we'd", "2nd",
                                            "floor", "isn't", "very", "noisy", "breakfast;", "hotels"};
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      std::string text;
      const auto n = rng() % 12;
      for (std::size_t i = 0; i < n; ++i) text += words[rng() % words.size()] + " ";

      const auto w2v = prepare_word2vec(text);
      std::string joined;
      for (const auto& t : w2v) joined += t + " ";
      CHECK(prepare_word2vec(joined) == w2v);

      const auto classic = prepare_classic(text);
      joined.clear();
      for (const auto& t : classic) joined += t + " ";
      CHECK(prepare_classic(joined) == classic);

      const auto graph = prepare_graph_text(text);
      CHECK(prepare_graph_text(graph) == graph);
    }
  }

  TEST_CASE("classic vocabulary is covered by the word2vec vocabulary modulo lemmas and stopwords") {
    const auto& res = TextResources::builtin();
    std::mt19937_64 rng(5);
    const std::vector<std::string> words = {"The", "rooms", "were", "cleaned", "daily", "and", "staff",
                                            "helped", "us", "with", "bags", "Wi-Fi", "worked", "fine"};
    for (int trial = 0; trial < 100; ++trial) {
      std::string text;
      for (int i = 0; i < 8; ++i) text += words[rng() % words.size()] + " ";
      auto w2v = prepare_word2vec(text);
      std::vector<std::string> lemmas;
      for (const auto& t : w2v) {
        if (!res.stopwords.contains(t)) lemmas.push_back(res.lemmatizer.lemma(t));
      }
      for (const auto& t : prepare_classic(text)) {
        CHECK(std::find(lemmas.begin(), lemmas.end(), t) != lemmas.end());
      }
    }
  }
}
