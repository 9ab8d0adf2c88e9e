#include "reviewgraph/node2vec.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <json.hpp>

#include "reviewgraph/csv.hpp"
#include "reviewgraph/sgns.hpp"

namespace reviewgraph {

void WalkConfig::validate() const {
  if (walk_length < 1) throw DomainError("walk_length must be >= 1");
  if (dims < 1) throw DomainError("dims must be >= 1");
  if (window < 1) throw DomainError("window must be >= 1");
  if (!(return_p > 0.0) || !(inout_q > 0.0)) throw DomainError("return_p and inout_q must be positive");
  if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be positive");
  if (!(norm_bound > 0.0)) throw DomainError("norm_bound must be positive");
}

Adjacency::Adjacency(std::size_t n_nodes, const std::vector<std::pair<NodeId, NodeId>>& edges)
    : neighbors_(n_nodes) {
  for (auto [a, b] : edges) {
    if (a >= n_nodes || b >= n_nodes) throw DomainError("adjacency: edge endpoint out of range");
    if (a == b) continue;
    neighbors_[a].push_back(b);
    neighbors_[b].push_back(a);
  }
  for (auto& list : neighbors_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

Adjacency Adjacency::from_graph(const KnowledgeGraph& g) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(g.edge_count());
  for (const auto& edge : g.edges()) edges.emplace_back(edge.src, edge.dst);
  return Adjacency(g.node_count(), edges);
}

bool Adjacency::connected(NodeId a, NodeId b) const {
  const auto& list = neighbors_.at(a);
  return std::binary_search(list.begin(), list.end(), b);
}

std::vector<double> transition_weights(const Adjacency& adj, std::optional<NodeId> prev, NodeId cur, double p,
                                       double q) {
  const auto& next = adj.neighbors(cur);
  std::vector<double> weights(next.size(), 1.0);
  if (!prev) return weights;
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (next[i] == *prev) {
      weights[i] = 1.0 / p;
    } else if (!adj.connected(next[i], *prev)) {
      weights[i] = 1.0 / q;
    }
  }
  return weights;
}

namespace {

Walk walk_from(const Adjacency& adj, NodeId start, const WalkConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  Walk walk{start};
  walk.reserve(cfg.walk_length);
  std::vector<double> weights;
  while (walk.size() < cfg.walk_length) {
    const NodeId cur = walk.back();
    const auto& next = adj.neighbors(cur);
    if (next.empty()) break;
    std::optional<NodeId> prev;
    if (walk.size() >= 2) prev = walk[walk.size() - 2];
    if (!prev || (cfg.return_p == 1.0 && cfg.inout_q == 1.0)) {
      walk.push_back(next[uniform_index(engine, next.size())]);
      continue;
    }
    weights = transition_weights(adj, prev, cur, cfg.return_p, cfg.inout_q);
    double total = 0.0;
    for (auto& w : weights) w = total += w;
    const double target = uniform01(engine) * total;
    auto it = std::upper_bound(weights.begin(), weights.end(), target);
    if (it == weights.end()) --it;
    walk.push_back(next[static_cast<std::size_t>(it - weights.begin())]);
  }
  return walk;
}

}  // namespace

std::vector<Walk> generate_walks(const Adjacency& adj, const WalkConfig& cfg) {
  cfg.validate();
  const std::size_t n = adj.size();
  std::vector<Walk> walks(n * cfg.walks_per_node);
  if (n == 0) return walks;

  std::vector<std::vector<NodeId>> orders(cfg.walks_per_node);
  for (std::size_t round = 0; round < cfg.walks_per_node; ++round) {
    auto& order = orders[round];
    order.resize(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 engine(mix_seed(cfg.seed, round));
    shuffle(order, engine);
  }

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t slot = begin; slot < end; ++slot) {
      const std::size_t round = slot / n;
      const NodeId start = orders[round][slot % n];
      walks[slot] = walk_from(adj, start, cfg, mix_seed(mix_seed(cfg.seed, round + 0x10000), start));
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, walks.size());
  if (threads == 1) {
    work(0, walks.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (walks.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(walks.size(), begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& thread : pool) thread.join();
  }
  return walks;
}

std::vector<Walk> generate_walks(const KnowledgeGraph& g, const WalkConfig& cfg) {
  return generate_walks(Adjacency::from_graph(g), cfg);
}

EmbeddingTraining train_embeddings(const std::vector<Walk>& walks, const WalkConfig& cfg) {
  cfg.validate();
  std::size_t vocab = 0;
  for (const auto& walk : walks) {
    for (auto id : walk) vocab = std::max(vocab, id + 1);
  }
  SkipGramConfig sg;
  sg.dims = cfg.dims;
  sg.window = cfg.window;
  sg.epochs = cfg.iterations;
  sg.negatives = cfg.negatives_k;
  sg.learning_rate = cfg.learning_rate;
  sg.seed = mix_seed(cfg.seed, 0xe3b);
  auto model = train_skipgram(walks, vocab, sg);

  std::vector<bool> seen(vocab, false);
  for (const auto& walk : walks) {
    for (auto id : walk) seen[id] = true;
  }
  EmbeddingTraining result;
  result.table.dims = cfg.dims;
  result.epoch_loss = std::move(model.epoch_loss);
  for (std::size_t id = 0; id < vocab; ++id) {
    if (!seen[id]) continue;
    Vector v = model.input.col(static_cast<Eigen::Index>(id));
    if (!v.allFinite() || v.norm() > cfg.norm_bound) {
      throw TrainingError("embedding diverged at node " + std::to_string(id));
    }
    result.table.vectors.emplace(id, std::move(v));
  }
  return result;
}

std::map<std::size_t, Vector> review_embeddings(const EmbeddingTable& table, KnowledgeGraph& g) {
  std::map<std::size_t, Vector> out;
  for (auto id : g.nodes_with_label(NodeLabel::Review)) {
    auto& node = g.node(id);
    Vector v;
    if (auto it = table.vectors.find(id); it != table.vectors.end()) {
      v = it->second;
    } else {
      warn("review node " + node.name + " has no embedding; using a zero vector");
      v = Vector::Zero(static_cast<Eigen::Index>(table.dims));
    }
    node.props.embedding = v;
    out.emplace(std::stoull(node.name), std::move(v));
  }
  return out;
}

std::string walk_config_json(const WalkConfig& cfg) {
  nlohmann::ordered_json j = {
      {"walk_length", cfg.walk_length}, {"walks_per_node", cfg.walks_per_node},
      {"return_p", cfg.return_p},       {"inout_q", cfg.inout_q},
      {"window", cfg.window},           {"dims", cfg.dims},
      {"iterations", cfg.iterations},   {"negatives_k", cfg.negatives_k},
      {"learning_rate", cfg.learning_rate}, {"seed", cfg.seed},
      {"norm_bound", cfg.norm_bound},
  };
  return j.dump(2) + "\n";
}

std::string embeddings_to_csv(const EmbeddingTable& table, const KnowledgeGraph& g) {
  std::string out = "node_id,label";
  for (std::size_t d = 0; d < table.dims; ++d) out += ",dim_" + std::to_string(d);
  out.push_back('\n');
  for (const auto& [id, v] : table.vectors) {
    out += std::to_string(id);
    out.push_back(',');
    out += id < g.node_count() ? std::string(to_string(g.node(id).label)) : std::string{};
    for (Eigen::Index d = 0; d < v.size(); ++d) {
      out.push_back(',');
      out += format_double(v[d]);
    }
    out.push_back('\n');
  }
  return out;
}

EmbeddingTable parse_embeddings_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "node_id") {
    throw InputError("embeddings CSV: missing header");
  }
  EmbeddingTable table;
  table.dims = rows[0].size() - 2;
  try {
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != rows[0].size()) throw InputError("embeddings CSV: row " + std::to_string(r) + " width");
      Vector v(static_cast<Eigen::Index>(table.dims));
      for (std::size_t d = 0; d < table.dims; ++d) v[static_cast<Eigen::Index>(d)] = std::stod(row[d + 2]);
      table.vectors.emplace(std::stoull(row[0]), std::move(v));
    }
  } catch (const std::logic_error& e) {
    throw InputError(std::string("embeddings CSV: ") + e.what());
  }
  return table;
}

void export_embeddings(const EmbeddingTable& table, const KnowledgeGraph& g, const WalkConfig& cfg,
                       const std::filesystem::path& path) {
  write_text_file(path, embeddings_to_csv(table, g));
  auto sidecar = path;
  sidecar.replace_extension(".config.json");
  write_text_file(sidecar, walk_config_json(cfg));
}

}  // namespace reviewgraph
