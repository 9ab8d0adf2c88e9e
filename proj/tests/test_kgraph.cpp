#include <doctest.h>

#include <json.hpp>
#include <random>

#include "reviewgraph/corpus.hpp"
#include "reviewgraph/extraction.hpp"
#include "reviewgraph/kgraph.hpp"
#include "test_support.hpp"

using namespace reviewgraph;

namespace {

ReviewRecord review(std::size_t id, std::string hotel, Label rating) { return {id, std::move(hotel), rating, "", "text"}; }

Triple triple(std::size_t review_id, std::string s, std::string p, std::string o, std::optional<double> sentiment) {
  return Triple{review_id, std::move(s), std::move(p), std::move(o), sentiment};
}

std::size_t count_kind(const KnowledgeGraph& g, std::string_view kind) {
  std::size_t n = 0;
  for (const auto& e : g.edges()) n += e.kind == kind;
  return n;
}

KnowledgeGraph random_graph(std::mt19937_64& rng) {
  std::vector<ReviewRecord> reviews;
  std::vector<Triple> triples;
  const std::vector<std::string> words = {"bed", "room", "pool", "staff", "clean", "rude", "nice", "view", "wifi"};
  const auto n_reviews = 1 + rng() % 6;
  for (std::size_t r = 0; r < n_reviews; ++r) {
    reviews.push_back(review(r, "h" + std::to_string(rng() % 3), static_cast<Label>(1 + rng() % 5)));
    const auto n_triples = rng() % 5;
    for (std::size_t t = 0; t < n_triples; ++t) {
      std::optional<double> s;
      switch (rng() % 3) {
        case 0:
          break;
        case 1:
          s = 0.0;
          break;
        default:
          s = static_cast<double>(rng() % 2001) / 1000.0 - 1.0;
      }
      triples.push_back(triple(r, words[rng() % words.size()], "was", words[rng() % words.size()], s));
    }
  }
  return build_graph(reviews, triples, {"pool", "wifi"}).graph;
}

}  // namespace

TEST_SUITE("kgraph") {
  TEST_CASE("one review with one triple") {
    auto build = build_graph({review(0, "h", 5)}, {triple(0, "bed", "was", "comfortable", 0.5)}, {});
    const auto& g = build.graph;
    CHECK(g.node_count() == 4);
    CHECK(g.edge_count() == 4);
    CHECK(count_kind(g, kHasReview) == 1);
    CHECK(count_kind(g, kContains) == 2);
    CHECK(count_kind(g, "was") == 1);
    CHECK(g.node(0).label == NodeLabel::Hotel);
    CHECK(g.node(1).label == NodeLabel::Review);
    CHECK(g.node(1).props.rating == 5);
  }

  TEST_CASE("no triples, no graph") {
    auto build = build_graph({review(0, "h", 5), review(1, "h", 3)}, {}, {});
    CHECK(build.graph.node_count() == 0);
    CHECK(build.graph.edge_count() == 0);
  }

  TEST_CASE("entities are shared across reviews") {
    auto build = build_graph({review(0, "h", 5), review(1, "h", 2)},
                             {triple(0, "bed", "was", "comfortable", 0.5), triple(1, "bed", "was", "hard", -0.3)}, {});
    const auto& g = build.graph;
    const auto bed = g.find(NodeLabel::Word, "bed");
    REQUIRE(bed.has_value());
    std::size_t contains = 0;
    for (auto e : g.in_edges(*bed)) contains += g.edges()[e].kind == kContains;
    CHECK(contains == 2);
    CHECK(g.nodes_with_label(NodeLabel::Hotel).size() == 1);
  }

  TEST_CASE("listed names become amenity nodes") {
    auto build = build_graph({review(0, "h", 4)}, {triple(0, "pool", "was", "warm", 0.3)}, {"pool"});
    CHECK(build.graph.find(NodeLabel::Amenity, "pool").has_value());
    CHECK_FALSE(build.graph.find(NodeLabel::Word, "pool").has_value());
  }

  TEST_CASE("triples of unknown reviews are skipped and counted") {
    auto build = build_graph({review(0, "h", 4)},
                             {triple(0, "bed", "was", "fine", 0.1), triple(9, "bed", "was", "bad", -0.5)}, {});
    CHECK(build.skipped_triples == 1);
    CHECK(build.graph.edge_count() == 4);
  }

  TEST_CASE("edge endpoint rules are enforced") {
    KnowledgeGraph g;
    const auto h = g.add_node(NodeLabel::Hotel, "h");
    const auto r = g.add_node(NodeLabel::Review, "0");
    const auto w = g.add_node(NodeLabel::Word, "bed");
    CHECK_THROWS_AS(g.add_edge(r, h, std::string(kHasReview)), DomainError);
    CHECK_THROWS_AS(g.add_edge(h, w, std::string(kContains)), DomainError);
    CHECK_THROWS_AS(g.add_edge(r, w, "was"), DomainError);
    CHECK_THROWS_AS(g.add_edge(w, w, "was", 1.5), DomainError);
    CHECK_THROWS_AS(g.add_edge(w, 99, "was"), DomainError);
    CHECK_NOTHROW(g.add_edge(w, w, "was", 0.2));
  }

  TEST_CASE("aggregation over two edges") {
    auto build = build_graph({review(0, "h", 4)},
                             {triple(0, "bed", "was", "fine", 0.5), triple(0, "staff", "was", "slow", -0.2)}, {});
    auto& g = build.graph;
    const auto agg = aggregate_sentiment(g, *g.review_node(0));
    CHECK(agg.avg == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(agg.min == -0.2);
    CHECK(agg.max == 0.5);
    CHECK(g.node(*g.review_node(0)).props.sentiment == agg);
  }

  TEST_CASE("zero and unset sentiments are ignored") {
    auto build = build_graph({review(0, "h", 4)},
                             {triple(0, "bed", "was", "fine", 0.0), triple(0, "staff", "was", "there", std::nullopt)},
                             {});
    auto& g = build.graph;
    CHECK(aggregate_sentiment(g, *g.review_node(0)) == SentimentAggregate{0, 0, 0});

    auto single = build_graph({review(0, "h", 4)},
                              {triple(0, "bed", "was", "fine", 0.0), triple(0, "pool", "was", "great", 0.83)}, {});
    CHECK(aggregate_sentiment(single.graph, *single.graph.review_node(0)) == SentimentAggregate{0.83, 0.83, 0.83});
  }

  TEST_CASE("edges contributed by another review between shared entities stay out") {
    // Review 1 mentions bed and hard through its own triple; review 0 only
    // through bed/comfortable, so review 1's edge has an endpoint outside 0.
    auto build = build_graph({review(0, "h", 5), review(1, "h", 1)},
                             {triple(0, "bed", "was", "comfortable", 0.6), triple(1, "bed", "was", "hard", -0.9)}, {});
    auto& g = build.graph;
    CHECK(aggregate_sentiment(g, *g.review_node(0)) == SentimentAggregate{0.6, 0.6, 0.6});
    CHECK(aggregate_sentiment(g, *g.review_node(1)) == SentimentAggregate{-0.9, -0.9, -0.9});
  }

  TEST_CASE("aggregating a non-review node is a domain error") {
    auto build = build_graph({review(0, "h", 4)}, {triple(0, "bed", "was", "fine", 0.5)}, {});
    CHECK_THROWS_AS(aggregate_sentiment(build.graph, 0), DomainError);
    CHECK_THROWS_AS(aggregate_sentiment(build.graph, 100), DomainError);
  }

  TEST_CASE("min <= avg <= max and endpoint rules on random graphs") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
      auto g = random_graph(rng);
      for (const auto& [id, agg] : aggregate_all(g)) {
        CHECK(agg.min <= agg.avg);
        CHECK(agg.avg <= agg.max);
      }
      for (const auto& e : g.edges()) {
        const auto from = g.node(e.src).label;
        const auto to = g.node(e.dst).label;
        if (e.kind == kHasReview) {
          CHECK((from == NodeLabel::Hotel && to == NodeLabel::Review));
        } else if (e.kind == kContains) {
          CHECK((from == NodeLabel::Review && is_entity(to)));
        } else {
          CHECK((is_entity(from) && is_entity(to)));
        }
      }
    }
  }

  TEST_CASE("node-link json of the four-node example") {
    auto build = build_graph({review(0, "h", 5)}, {triple(0, "bed", "was", "comfortable", 0.5)}, {});
    const auto j = nlohmann::json::parse(to_node_link_json(build.graph));
    CHECK(j["nodes"].size() == 4);
    CHECK(j["links"].size() == 4);
  }

  TEST_CASE("empty graph exports valid empty documents") {
    KnowledgeGraph g;
    const auto j = nlohmann::json::parse(to_node_link_json(g));
    CHECK(j["nodes"].empty());
    CHECK(j["links"].empty());
    CHECK(from_graphml(to_graphml(g)).node_count() == 0);
    CHECK(from_csv_pair(to_csv_pair(g)).node_count() == 0);
  }

  TEST_CASE("export, import, export is byte-identical in every format") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      auto g = random_graph(rng);
      aggregate_all(g);
      if (g.node_count() > 0) g.node(0).props.embedding = Vector::LinSpaced(3, -0.1, 1.0 / 3.0);
      const auto json = to_node_link_json(g);
      CHECK(to_node_link_json(from_node_link_json(json)) == json);
      const auto graphml = to_graphml(g);
      CHECK(to_graphml(from_graphml(graphml)) == graphml);
      const auto pair = to_csv_pair(g);
      const auto again = to_csv_pair(from_csv_pair(pair));
      CHECK(again.nodes == pair.nodes);
      CHECK(again.edges == pair.edges);
    }
  }

  TEST_CASE("file export round-trips through disk") {
    std::mt19937_64 rng(2);
    auto g = random_graph(rng);
    const auto dir = testing::scratch_dir("graph_export");
    for (auto [format, path] : {std::pair{GraphFormat::NodeLinkJson, dir / "g.json"},
                                std::pair{GraphFormat::GraphMl, dir / "g.graphml"},
                                std::pair{GraphFormat::CsvPair, dir / "csv"}}) {
      export_graph(g, format, path);
      CHECK(to_node_link_json(import_graph(format, path)) == to_node_link_json(g));
    }
    CHECK_THROWS_AS(export_graph(g, GraphFormat::NodeLinkJson, "/proc/forbidden/g.json"), IoError);
  }

  TEST_CASE("build is deterministic") {
    std::mt19937_64 a(99), b(99);
    CHECK(to_node_link_json(random_graph(a)) == to_node_link_json(random_graph(b)));
  }
}
