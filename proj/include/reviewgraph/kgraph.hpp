#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "reviewgraph/common.hpp"
#include "reviewgraph/corpus.hpp"
#include "reviewgraph/extraction.hpp"

namespace reviewgraph {

enum class NodeLabel { Hotel, Review, Word, Amenity };

std::string_view to_string(NodeLabel label);
NodeLabel parse_node_label(std::string_view name);

inline bool is_entity(NodeLabel label) { return label == NodeLabel::Word || label == NodeLabel::Amenity; }

using NodeId = std::size_t;

inline constexpr std::string_view kContains = "CONTAINS";
inline constexpr std::string_view kHasReview = "HAS_REVIEW";

struct SentimentAggregate {
  double avg = 0.0;
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const SentimentAggregate&, const SentimentAggregate&) = default;
};

struct NodeProps {
  std::optional<Label> rating;                 // review nodes
  std::optional<SentimentAggregate> sentiment;  // review nodes, after aggregation
  std::optional<Vector> embedding;             // after training
};

struct Node {
  NodeId id = 0;
  NodeLabel label = NodeLabel::Word;
  std::string name;
  NodeProps props;
};

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  std::string kind;
  std::optional<double> sentiment;
};

/// In-memory typed multigraph. Node ids are dense and assigned in creation
/// order. Word and amenity nodes share one name index, so an entity name maps
/// to exactly one node; hotel and review names are indexed per label.
class KnowledgeGraph {
 public:
  /// Returns the existing node when the name is already indexed for the label
  /// (or, for entities, for either entity label).
  NodeId add_node(NodeLabel label, std::string name);

  /// Enforces the endpoint rules: HAS_REVIEW hotel->review, CONTAINS
  /// review->entity, every other kind entity->entity. Throws DomainError.
  std::size_t add_edge(NodeId src, NodeId dst, std::string kind, std::optional<double> sentiment = {});

  bool has_edge(NodeId src, NodeId dst, std::string_view kind) const;

  std::optional<NodeId> find(NodeLabel label, std::string_view name) const;
  std::optional<NodeId> review_node(std::size_t review_id) const;

  const Node& node(NodeId id) const { return nodes_.at(id); }
  Node& node(NodeId id) { return nodes_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Indices into edges() leaving / entering a node.
  const std::vector<std::size_t>& out_edges(NodeId id) const { return out_.at(id); }
  const std::vector<std::size_t>& in_edges(NodeId id) const { return in_.at(id); }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::vector<NodeId> nodes_with_label(NodeLabel label) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::unordered_map<std::string, NodeId> hotels_;
  std::unordered_map<std::string, NodeId> reviews_;
  std::unordered_map<std::string, NodeId> entities_;
};

std::unordered_set<std::string> load_amenities(const std::filesystem::path& dir = {});

struct GraphBuild {
  KnowledgeGraph graph;
  std::size_t skipped_triples = 0;  // triples naming an unknown review_id
};

/// Expects normalised, filtered triples. A review enters the graph with its
/// first triple: hotel node, review node (carrying the rating) and the
/// HAS_REVIEW edge. Per triple: subject and object entity nodes (amenity when
/// the name is listed), a predicate edge carrying the triple sentiment, and
/// CONTAINS edges from the review (deduplicated). Reviews without triples get
/// no node.
GraphBuild build_graph(const std::vector<ReviewRecord>& reviews, const std::vector<Triple>& triples,
                       const std::unordered_set<std::string>& amenities);

/// avg/min/max over the sentiments of predicate edges whose endpoints are
/// both CONTAINS-linked to the review; unset and exactly-zero values are
/// ignored and an empty set yields zeros. The result is stored on the node.
SentimentAggregate aggregate_sentiment(KnowledgeGraph& g, NodeId review);

/// Aggregates every review node; keyed by review_id.
std::map<std::size_t, SentimentAggregate> aggregate_all(KnowledgeGraph& g);

// ---------------------------------------------------------------------------
// Serialisation

enum class GraphFormat { NodeLinkJson, GraphMl, CsvPair };

GraphFormat parse_graph_format(std::string_view name);

std::string to_node_link_json(const KnowledgeGraph& g);
KnowledgeGraph from_node_link_json(std::string_view text);

std::string to_graphml(const KnowledgeGraph& g);
KnowledgeGraph from_graphml(std::string_view text);

struct CsvPair {
  std::string nodes;
  std::string edges;
};
CsvPair to_csv_pair(const KnowledgeGraph& g);
KnowledgeGraph from_csv_pair(const CsvPair& files);

/// Writes `path` (a file, or a directory receiving nodes.csv and edges.csv
/// for the CSV pair). Throws IoError.
void export_graph(const KnowledgeGraph& g, GraphFormat format, const std::filesystem::path& path);
KnowledgeGraph import_graph(GraphFormat format, const std::filesystem::path& path);

}  // namespace reviewgraph
