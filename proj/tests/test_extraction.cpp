#include <doctest.h>

#include <random>

#include "reviewgraph/extraction.hpp"
#include "reviewgraph/sentiment.hpp"
#include "reviewgraph/textprep.hpp"
#include "test_support.hpp"

using namespace reviewgraph;

namespace {

Triple spo(std::string s, std::string p, std::string o) { return Triple{0, std::move(s), std::move(p), std::move(o), {}}; }

}  // namespace

TEST_SUITE("extraction") {
  TEST_CASE("copula with an adjective complement") {
    CHECK(extract_triples("The bed was comfortable") == std::vector<Triple>{spo("bed", "was", "comfortable")});
    CHECK(extract_triples("").empty());
    CHECK(extract_triples("Wonderful").empty());
  }

  TEST_CASE("copula with a preposition") {
    CHECK(extract_triples("Great pool is in wonderful spot") ==
          std::vector<Triple>{spo("great pool", "is in", "wonderful spot")});
  }

  TEST_CASE("transitive verb") {
    const auto t = extract_triples("We loved the breakfast");
    REQUIRE(t.size() == 1);
    CHECK(t[0].subject == "we");
    CHECK(t[0].object == "breakfast");
  }

  TEST_CASE("review extraction tags every triple with the review id") {
    const auto prepared = prepare_graph_text("The bed was comfortable.The staff was rude.");
    const auto t = extract_review_triples(17, prepared);
    REQUIRE(t.size() == 2);
    for (const auto& x : t) CHECK(x.review_id == 17);
    CHECK(t[1].object == "rude");
  }

  TEST_CASE("extraction is deterministic") {
    const std::string s = "The breakfast was excellent and the staff were very helpful";
    CHECK(extract_triples(s) == extract_triples(s));
  }

  TEST_CASE("term normalisation") {
    CHECK(normalize_term("Great pool") == "great_pool");
    CHECK(normalize_term("Rooms") == "room");
    CHECK_FALSE(normalize_term("!!!").has_value());
    CHECK(normalize_term("  wi  fi ") == "wifi");
  }

  TEST_CASE("length filter boundaries") {
    const LengthFilter inclusive{14, true};
    const LengthFilter exclusive{14, false};
    CHECK(filter_triples({spo("bed", "was", "comfortable")}).size() == 1);
    CHECK(filter_triples({spo("great_pool", "is_in", "wonderful_spot_by_beach")}).empty());
    const std::string fourteen(14, 'a');
    CHECK(fourteen.size() == 14);
    CHECK(filter_triples({spo("bed", "was", fourteen)}, inclusive).empty());
    CHECK(filter_triples({spo("bed", "was", fourteen)}, exclusive).size() == 1);
    CHECK(filter_triples({spo("bed", "was", fourteen + "a")}, exclusive).empty());
    CHECK(filter_triples({spo(std::string(13, 'b'), "was", "x")}, inclusive).size() == 1);
  }

  TEST_CASE("filtered triples have terms of length 1..13") {
    std::mt19937_64 rng(21);
    std::vector<Triple> triples;
    for (int i = 0; i < 500; ++i) {
      triples.push_back(spo(std::string(1 + rng() % 20, 's'), std::string(1 + rng() % 20, 'p'),
                            std::string(1 + rng() % 20, 'o')));
    }
    for (const auto& t : filter_triples(triples)) {
      for (const auto* term : {&t.subject, &t.predicate, &t.object}) {
        CHECK(term->size() >= 1);
        CHECK(term->size() <= 13);
      }
    }
  }

  TEST_CASE("csv import of a two-row fixture round-trips") {
    std::vector<Triple> triples = {Triple{3, "bed", "was", "comfortable", 0.5},
                                   Triple{4, "staff, front desk", "was", "\"rude\"", -0.25}};
    const auto parsed = parse_triples_csv(triples_to_csv(triples));
    CHECK(parsed.skipped == 0);
    CHECK(parsed.triples == triples);
  }

  TEST_CASE("csv without a sentiment column leaves sentiment unset") {
    const auto parsed = parse_triples_csv("review_id,subject,predicate,object\n1,a,b,c\n");
    REQUIRE(parsed.triples.size() == 1);
    CHECK_FALSE(parsed.triples[0].sentiment.has_value());
  }

  TEST_CASE("missing mandatory column is an input error, bad rows are skipped") {
    CHECK_THROWS_AS(parse_triples_csv("review_id,subject,object\n1,a,c\n"), InputError);
    const auto parsed = parse_triples_csv("review_id,subject,predicate,object\nx,a,b,c\n2,a,b,c\n3,a,b\n");
    CHECK(parsed.triples.size() == 1);
    CHECK(parsed.skipped == 2);
  }

  TEST_CASE("published example rows import with sentiments inside their bounds") {
    const auto parsed = import_triples(testing::data_path("published_triples.csv"));
    REQUIRE(parsed.triples.size() == 20);
    for (const auto& t : parsed.triples) {
      REQUIRE(t.sentiment.has_value());
      CHECK(*t.sentiment >= -0.68);
      CHECK(*t.sentiment <= 0.83);
    }
  }

  TEST_CASE("export then import is the identity on random triples") {
    std::mt19937_64 rng(4);
    const std::vector<std::string> words = {"bed", "was", "very, nice", "\"ok\"", "pool", " spaced ", "x"};
    std::vector<Triple> triples;
    for (std::size_t i = 0; i < 100; ++i) {
      Triple t{i, words[rng() % words.size()], words[rng() % words.size()], words[rng() % words.size()], {}};
      if (rng() % 2) t.sentiment = static_cast<double>(rng() % 2001) / 1000.0 - 1.0;
      triples.push_back(t);
    }
    const auto dir = testing::scratch_dir("triples_roundtrip");
    export_triples(triples, dir / "t.csv");
    CHECK(import_triples(dir / "t.csv").triples == triples);
  }
}
