#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reviewgraph/common.hpp"
#include "reviewgraph/kgraph.hpp"

namespace reviewgraph {

struct WalkConfig {
  std::size_t walk_length = 80;  // nodes per walk, start included
  std::size_t walks_per_node = 10;
  double return_p = 1.0;
  double inout_q = 1.0;
  std::size_t window = 10;
  std::size_t dims = 10;
  std::size_t iterations = 1;
  std::size_t negatives_k = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 0;
  double norm_bound = 1e3;   // divergence detector
  std::size_t threads = 1;   // walk generation only; output does not depend on it

  void validate() const;
};

/// Undirected, untyped view of a graph: sorted unique neighbour lists,
/// self-loops dropped, parallel edges collapsed.
class Adjacency {
 public:
  Adjacency() = default;
  Adjacency(std::size_t n_nodes, const std::vector<std::pair<NodeId, NodeId>>& edges);
  static Adjacency from_graph(const KnowledgeGraph& g);

  std::size_t size() const { return neighbors_.size(); }
  const std::vector<NodeId>& neighbors(NodeId id) const { return neighbors_.at(id); }
  bool connected(NodeId a, NodeId b) const;

 private:
  std::vector<std::vector<NodeId>> neighbors_;
};

using Walk = std::vector<NodeId>;

/// Unnormalised weights over neighbors(cur) for a step that arrived from
/// `prev`: 1/p back to prev, 1 to a neighbour of prev, 1/q otherwise. With no
/// previous node every weight is 1.
std::vector<double> transition_weights(const Adjacency& adj, std::optional<NodeId> prev, NodeId cur, double p,
                                       double q);

/// walks_per_node rounds; each round visits every node in a seeded shuffled
/// order and each walk has its own generator derived from (seed, round, start).
std::vector<Walk> generate_walks(const Adjacency& adj, const WalkConfig& cfg);
std::vector<Walk> generate_walks(const KnowledgeGraph& g, const WalkConfig& cfg);

struct EmbeddingTable {
  std::size_t dims = 0;
  std::map<NodeId, Vector> vectors;
};

struct EmbeddingTraining {
  EmbeddingTable table;
  std::vector<double> epoch_loss;
};

/// Skip-gram over the walks. Every node that occurs in a walk gets a vector.
/// Throws TrainingError when a vector is non-finite or exceeds norm_bound.
EmbeddingTraining train_embeddings(const std::vector<Walk>& walks, const WalkConfig& cfg);

/// Review-node vectors keyed by review_id, also stored on the node props. A
/// review absent from the table gets a zero vector and a warning.
std::map<std::size_t, Vector> review_embeddings(const EmbeddingTable& table, KnowledgeGraph& g);

std::string walk_config_json(const WalkConfig& cfg);

/// CSV `node_id,label,dim_0,...` in node-id order.
std::string embeddings_to_csv(const EmbeddingTable& table, const KnowledgeGraph& g);
EmbeddingTable parse_embeddings_csv(std::string_view text);

/// Writes the CSV and a `<stem>.config.json` sidecar next to it.
void export_embeddings(const EmbeddingTable& table, const KnowledgeGraph& g, const WalkConfig& cfg,
                       const std::filesystem::path& path);

}  // namespace reviewgraph
