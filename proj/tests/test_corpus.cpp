#include <doctest.h>

#include <random>

#include "reviewgraph/corpus.hpp"
#include "test_support.hpp"

using namespace reviewgraph;

namespace {

std::string line(const std::string& url, double rating, const std::string& text) {
  return R"({"hotel_url": ")" + url + R"(", "author": "a", "date": "2019-01-01", "rating": )" +
         format_double(rating) + R"(, "title": "t", "text": ")" + text + R"(", "property_dict": {}})" + "\n";
}

const std::string kUrl = "Hotel_Review-g1-d2-Reviews-Hotel_Roma-Rome_Lazio.html";

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("three hand-built records keep their ratings and order") {
    const auto text = line(kUrl, 5, "Lovely stay") + line(kUrl, 1, "Dirty room") + line(kUrl, 4, "Good value");
    const auto loaded = parse_reviews(text);
    REQUIRE(loaded.reviews.size() == 3);
    CHECK(loaded.skipped == 0);
    CHECK(loaded.reviews[0].rating == 5);
    CHECK(loaded.reviews[1].rating == 1);
    CHECK(loaded.reviews[2].rating == 4);
    for (std::size_t i = 0; i < 3; ++i) CHECK(loaded.reviews[i].review_id == i);
    CHECK(loaded.reviews[1].text == "Dirty room");
    CHECK(loaded.reviews[0].hotel_id == "Hotel_Roma");
  }

  TEST_CASE("empty input yields no records") {
    CHECK(parse_reviews("").reviews.empty());
    const auto dir = testing::scratch_dir("corpus_empty");
    write_text_file(dir / "empty.jsonl", "");
    CHECK(load_reviews(dir / "empty.jsonl").reviews.empty());
  }

  TEST_CASE("malformed lines are skipped and counted") {
    const auto text = line(kUrl, 5, "ok") + "{not json\n" + line(kUrl, 7, "rating out of range") +
                      R"({"hotel_url": "x-y-z-Reviews-H-P.html", "rating": "five", "text": "t"})" + "\n" +
                      line(kUrl, 3, "") + line(kUrl, 2.5, "fractional") + "[1, 2]\n" + line(kUrl, 2, "fine");
    const auto loaded = parse_reviews(text);
    REQUIRE(loaded.reviews.size() == 2);
    CHECK(loaded.skipped == 6);
    CHECK(loaded.reviews[1].rating == 2);
    CHECK(loaded.reviews[1].review_id == 1);
  }

  TEST_CASE("limit keeps the first parsable records") {
    std::string text;
    for (int r = 1; r <= 5; ++r) text += line(kUrl, r, "text " + std::to_string(r));
    const auto loaded = parse_reviews(text, 3);
    REQUIRE(loaded.reviews.size() == 3);
    CHECK(loaded.reviews[2].rating == 3);
    CHECK(parse_reviews(text, 0).reviews.size() == 5);
  }

  TEST_CASE("unreadable file is an input error") {
    CHECK_THROWS_AS(load_reviews("/nonexistent/reviews.jsonl"), InputError);
  }

  TEST_CASE("hotel id comes from the name segment of the url") {
    CHECK(hotel_id_from_url("Hotel_Review-g187791-d203112-Reviews-Hotel_Roma_Centrale-Rome_Lazio.html") ==
          "Hotel_Roma_Centrale");
    CHECK_FALSE(hotel_id_from_url("").size());
  }

  TEST_CASE("single review statistics") {
    ReviewRecord r;
    r.hotel_id = "h";
    r.rating = 5;
    r.text = "0123456789";
    const auto s = corpus_stats({r});
    CHECK(s.n_reviews == 1);
    CHECK(s.mean_rating == 5.0);
    CHECK(s.std_rating == 0.0);
    CHECK(s.median_len_chars == 10.0);
    CHECK(s.mean_len_chars == 10.0);
  }

  TEST_CASE("population standard deviation of ratings 1 and 5") {
    ReviewRecord a{0, "h1", 1, "", "ab"};
    ReviewRecord b{1, "h2", 5, "", "abcd"};
    const auto s = corpus_stats({a, b});
    CHECK(s.mean_rating == 3.0);
    CHECK(s.std_rating == 2.0);
    CHECK(s.n_hotels == 2);
    CHECK(s.median_len_chars == 2.0);  // lower middle
  }

  TEST_CASE("empty list is a domain error") { CHECK_THROWS_AS(corpus_stats({}), DomainError); }

  TEST_CASE("class counts sum to the review count on random corpora") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto n = 1 + rng() % 40;
      std::vector<ReviewRecord> reviews;
      for (std::size_t i = 0; i < n; ++i) {
        reviews.push_back({i, "h" + std::to_string(rng() % 4), static_cast<Label>(1 + rng() % 5), "", "x"});
      }
      const auto s = corpus_stats(reviews);
      std::size_t total = 0;
      for (const auto& [label, count] : s.class_counts) total += count;
      CHECK(total == n);
      CHECK(s.std_rating >= 0.0);
    }
  }

  TEST_CASE("fixture files follow the intended class proportions") {
    const auto small = corpus_stats(load_reviews(testing::data_path("reviews_200.jsonl")).reviews);
    CHECK(small.class_counts == std::map<Label, std::size_t>{{1, 10}, {2, 10}, {3, 21}, {4, 58}, {5, 101}});
    const auto large = corpus_stats(load_reviews(testing::data_path("reviews_1000.jsonl")).reviews);
    CHECK(large.class_counts == std::map<Label, std::size_t>{{1, 47}, {2, 52}, {3, 105}, {4, 290}, {5, 506}});
  }

  TEST_CASE("loading is deterministic") {
    const auto a = load_reviews(testing::data_path("reviews_200.jsonl"));
    const auto b = load_reviews(testing::data_path("reviews_200.jsonl"));
    REQUIRE(a.reviews.size() == b.reviews.size());
    for (std::size_t i = 0; i < a.reviews.size(); ++i) CHECK(a.reviews[i].text == b.reviews[i].text);
  }
}
