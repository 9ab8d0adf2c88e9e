#include "reviewgraph/kgraph.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "reviewgraph/csv.hpp"
#include "reviewgraph/resources.hpp"

namespace reviewgraph {

using nlohmann::json;

std::string_view to_string(NodeLabel label) {
  switch (label) {
    case NodeLabel::Hotel:
      return "hotel";
    case NodeLabel::Review:
      return "review";
    case NodeLabel::Word:
      return "word";
    case NodeLabel::Amenity:
      return "amenity";
  }
  return "word";
}

NodeLabel parse_node_label(std::string_view name) {
  if (name == "hotel") return NodeLabel::Hotel;
  if (name == "review") return NodeLabel::Review;
  if (name == "word") return NodeLabel::Word;
  if (name == "amenity") return NodeLabel::Amenity;
  throw InputError("unknown node label '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

NodeId KnowledgeGraph::add_node(NodeLabel label, std::string name) {
  auto& index = label == NodeLabel::Hotel ? hotels_ : label == NodeLabel::Review ? reviews_ : entities_;
  if (auto it = index.find(name); it != index.end()) return it->second;
  const NodeId id = nodes_.size();
  index.emplace(name, id);
  nodes_.push_back(Node{id, label, std::move(name), {}});
  out_.emplace_back();
  in_.emplace_back();
  return id;
}

std::size_t KnowledgeGraph::add_edge(NodeId src, NodeId dst, std::string kind, std::optional<double> sentiment) {
  if (src >= nodes_.size() || dst >= nodes_.size()) throw DomainError("edge endpoint out of range");
  const auto from = nodes_[src].label;
  const auto to = nodes_[dst].label;
  bool valid = false;
  if (kind == kHasReview) {
    valid = from == NodeLabel::Hotel && to == NodeLabel::Review;
  } else if (kind == kContains) {
    valid = from == NodeLabel::Review && is_entity(to);
  } else {
    valid = !kind.empty() && is_entity(from) && is_entity(to);
  }
  if (!valid) {
    throw DomainError("edge '" + kind + "' not allowed from " + std::string(to_string(from)) + " to " +
                      std::string(to_string(to)));
  }
  if (sentiment && !(*sentiment >= -1.0 && *sentiment <= 1.0)) {
    throw DomainError("edge sentiment outside [-1, 1]");
  }
  const std::size_t index = edges_.size();
  edges_.push_back(Edge{src, dst, std::move(kind), sentiment});
  out_[src].push_back(index);
  in_[dst].push_back(index);
  return index;
}

bool KnowledgeGraph::has_edge(NodeId src, NodeId dst, std::string_view kind) const {
  return std::any_of(out_.at(src).begin(), out_.at(src).end(), [&](std::size_t e) {
    return edges_[e].dst == dst && edges_[e].kind == kind;
  });
}

std::optional<NodeId> KnowledgeGraph::find(NodeLabel label, std::string_view name) const {
  const auto& index = label == NodeLabel::Hotel ? hotels_ : label == NodeLabel::Review ? reviews_ : entities_;
  auto it = index.find(std::string(name));
  if (it == index.end()) return std::nullopt;
  if (nodes_[it->second].label != label) return std::nullopt;
  return it->second;
}

std::optional<NodeId> KnowledgeGraph::review_node(std::size_t review_id) const {
  return find(NodeLabel::Review, std::to_string(review_id));
}

std::vector<NodeId> KnowledgeGraph::nodes_with_label(NodeLabel label) const {
  std::vector<NodeId> ids;
  for (const auto& node : nodes_) {
    if (node.label == label) ids.push_back(node.id);
  }
  return ids;
}

// ---------------------------------------------------------------------------
// Construction

std::unordered_set<std::string> load_amenities(const std::filesystem::path& dir) {
  return parse_word_set(read_resource("amenities.txt", dir));
}

GraphBuild build_graph(const std::vector<ReviewRecord>& reviews, const std::vector<Triple>& triples,
                       const std::unordered_set<std::string>& amenities) {
  std::unordered_map<std::size_t, const ReviewRecord*> by_id;
  for (const auto& review : reviews) by_id.emplace(review.review_id, &review);

  GraphBuild build;
  auto& g = build.graph;
  auto entity = [&](const std::string& name) {
    return g.add_node(amenities.contains(name) ? NodeLabel::Amenity : NodeLabel::Word, name);
  };
  for (const auto& triple : triples) {
    auto found = by_id.find(triple.review_id);
    if (found == by_id.end()) {
      ++build.skipped_triples;
      continue;
    }
    auto review_node = g.review_node(triple.review_id);
    if (!review_node) {
      const auto& review = *found->second;
      const auto hotel = g.add_node(NodeLabel::Hotel, review.hotel_id);
      review_node = g.add_node(NodeLabel::Review, std::to_string(review.review_id));
      g.node(*review_node).props.rating = review.rating;
      g.add_edge(hotel, *review_node, std::string(kHasReview));
    }
    const auto subject = entity(triple.subject);
    const auto object = entity(triple.object);
    g.add_edge(subject, object, triple.predicate, triple.sentiment);
    for (auto target : {subject, object}) {
      if (!g.has_edge(*review_node, target, kContains)) g.add_edge(*review_node, target, std::string(kContains));
    }
  }
  if (build.skipped_triples > 0) {
    warn("skipped " + std::to_string(build.skipped_triples) + " triple(s) with unknown review_id");
  }
  return build;
}

SentimentAggregate aggregate_sentiment(KnowledgeGraph& g, NodeId review) {
  if (review >= g.node_count() || g.node(review).label != NodeLabel::Review) {
    throw DomainError("aggregate_sentiment: node " + std::to_string(review) + " is not a review");
  }
  std::unordered_set<NodeId> linked;
  for (auto e : g.out_edges(review)) {
    if (g.edges()[e].kind == kContains) linked.insert(g.edges()[e].dst);
  }
  // Visit linked entities in id order so the summation order is fixed.
  std::vector<NodeId> ordered(linked.begin(), linked.end());
  std::sort(ordered.begin(), ordered.end());

  double sum = 0.0;
  std::size_t count = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (auto id : ordered) {
    for (auto e : g.out_edges(id)) {
      const auto& edge = g.edges()[e];
      if (edge.kind == kContains || !linked.contains(edge.dst)) continue;
      if (!edge.sentiment || *edge.sentiment == 0.0) continue;
      sum += *edge.sentiment;
      lo = std::min(lo, *edge.sentiment);
      hi = std::max(hi, *edge.sentiment);
      ++count;
    }
  }
  SentimentAggregate agg;
  if (count > 0) {
    agg.avg = std::clamp(sum / static_cast<double>(count), lo, hi);
    agg.min = lo;
    agg.max = hi;
  }
  g.node(review).props.sentiment = agg;
  return agg;
}

std::map<std::size_t, SentimentAggregate> aggregate_all(KnowledgeGraph& g) {
  std::map<std::size_t, SentimentAggregate> out;
  for (auto id : g.nodes_with_label(NodeLabel::Review)) {
    out.emplace(std::stoull(g.node(id).name), aggregate_sentiment(g, id));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialisation helpers

namespace {

std::string join_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out.push_back(' ');
    out += format_double(v[i]);
  }
  return out;
}

Vector split_vector(std::string_view text) {
  std::vector<double> values;
  std::size_t i = 0;
  while (i < text.size()) {
    auto j = text.find(' ', i);
    if (j == std::string_view::npos) j = text.size();
    if (j > i) values.push_back(std::stod(std::string(text.substr(i, j - i))));
    i = j + 1;
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::optional<double> parse_optional_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return std::stod(text);
}

// Re-creates nodes in id order; ids in serialised form must be 0..n-1.
void restore_node(KnowledgeGraph& g, NodeId expected, NodeLabel label, std::string name, NodeProps props) {
  const auto id = g.add_node(label, std::move(name));
  if (id != expected) throw InputError("graph import: duplicate or out-of-order node " + std::to_string(expected));
  g.node(id).props = std::move(props);
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string xml_unescape(std::string_view text) {
  static const std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    bool replaced = false;
    if (text[i] == '&') {
      for (const auto& [entity, c] : kEntities) {
        if (text.substr(i, entity.size()) == entity) {
          out.push_back(c);
          i += entity.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(text[i++]);
  }
  return out;
}

std::string attribute(std::string_view tag, std::string_view name) {
  const std::string needle = " " + std::string(name) + "=\"";
  auto pos = tag.find(needle);
  if (pos == std::string_view::npos) return {};
  pos += needle.size();
  auto end = tag.find('"', pos);
  return xml_unescape(tag.substr(pos, end - pos));
}

}  // namespace

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "json" || name == "json-node-link") return GraphFormat::NodeLinkJson;
  if (name == "graphml") return GraphFormat::GraphMl;
  if (name == "csv" || name == "csv-pair") return GraphFormat::CsvPair;
  throw DomainError("unknown graph format '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Node-link JSON

std::string to_node_link_json(const KnowledgeGraph& g) {
  json nodes = json::array();
  for (const auto& node : g.nodes()) {
    json item = {{"id", node.id}, {"label", to_string(node.label)}, {"name", node.name}};
    if (node.props.rating) item["rating"] = *node.props.rating;
    if (node.props.sentiment) {
      item["avg_sentiment"] = node.props.sentiment->avg;
      item["min_sentiment"] = node.props.sentiment->min;
      item["max_sentiment"] = node.props.sentiment->max;
    }
    if (node.props.embedding) {
      const auto& v = *node.props.embedding;
      item["embedding"] = std::vector<double>(v.data(), v.data() + v.size());
    }
    nodes.push_back(std::move(item));
  }
  json links = json::array();
  for (const auto& edge : g.edges()) {
    json item = {{"source", edge.src}, {"target", edge.dst}, {"kind", edge.kind}};
    if (edge.sentiment) item["sentiment"] = *edge.sentiment;
    links.push_back(std::move(item));
  }
  json doc = {{"directed", true}, {"multigraph", true}, {"graph", json::object()},
              {"nodes", std::move(nodes)}, {"links", std::move(links)}};
  return doc.dump(1) + "\n";
}

KnowledgeGraph from_node_link_json(std::string_view text) {
  KnowledgeGraph g;
  try {
    const auto doc = json::parse(text);
    for (const auto& item : doc.at("nodes")) {
      NodeProps props;
      if (item.contains("rating")) props.rating = item.at("rating").get<Label>();
      if (item.contains("avg_sentiment")) {
        props.sentiment = SentimentAggregate{item.at("avg_sentiment").get<double>(),
                                             item.at("min_sentiment").get<double>(),
                                             item.at("max_sentiment").get<double>()};
      }
      if (item.contains("embedding")) {
        const auto values = item.at("embedding").get<std::vector<double>>();
        props.embedding = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
      }
      restore_node(g, item.at("id").get<NodeId>(), parse_node_label(item.at("label").get<std::string>()),
                   item.at("name").get<std::string>(), std::move(props));
    }
    for (const auto& item : doc.at("links")) {
      std::optional<double> sentiment;
      if (item.contains("sentiment")) sentiment = item.at("sentiment").get<double>();
      g.add_edge(item.at("source").get<NodeId>(), item.at("target").get<NodeId>(),
                 item.at("kind").get<std::string>(), sentiment);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
  return g;
}

// ---------------------------------------------------------------------------
// GraphML

std::string to_graphml(const KnowledgeGraph& g) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n"
      "  <key id=\"rating\" for=\"node\" attr.name=\"rating\" attr.type=\"int\"/>\n"
      "  <key id=\"avg_sentiment\" for=\"node\" attr.name=\"avg_sentiment\" attr.type=\"double\"/>\n"
      "  <key id=\"min_sentiment\" for=\"node\" attr.name=\"min_sentiment\" attr.type=\"double\"/>\n"
      "  <key id=\"max_sentiment\" for=\"node\" attr.name=\"max_sentiment\" attr.type=\"double\"/>\n"
      "  <key id=\"embedding\" for=\"node\" attr.name=\"embedding\" attr.type=\"string\"/>\n"
      "  <key id=\"kind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      "  <key id=\"sentiment\" for=\"edge\" attr.name=\"sentiment\" attr.type=\"double\"/>\n"
      "  <graph id=\"G\" edgedefault=\"directed\">\n";
  auto data = [](std::string_view key, std::string_view value) {
    return "<data key=\"" + std::string(key) + "\">" + xml_escape(value) + "</data>";
  };
  for (const auto& node : g.nodes()) {
    out += "    <node id=\"n" + std::to_string(node.id) + "\">";
    out += data("label", to_string(node.label));
    out += data("name", node.name);
    if (node.props.rating) out += data("rating", std::to_string(*node.props.rating));
    if (node.props.sentiment) {
      out += data("avg_sentiment", format_double(node.props.sentiment->avg));
      out += data("min_sentiment", format_double(node.props.sentiment->min));
      out += data("max_sentiment", format_double(node.props.sentiment->max));
    }
    if (node.props.embedding) out += data("embedding", join_vector(*node.props.embedding));
    out += "</node>\n";
  }
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto& edge = g.edges()[i];
    out += "    <edge id=\"e" + std::to_string(i) + "\" source=\"n" + std::to_string(edge.src) +
           "\" target=\"n" + std::to_string(edge.dst) + "\">";
    out += data("kind", edge.kind);
    if (edge.sentiment) out += data("sentiment", format_double(*edge.sentiment));
    out += "</edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

KnowledgeGraph from_graphml(std::string_view text) {
  KnowledgeGraph g;
  enum class Scope { None, Node, Edge };
  Scope scope = Scope::None;
  std::map<std::string, std::string> values;
  std::string element_id, source, target, data_key;
  auto node_index = [](const std::string& id) -> NodeId {
    if (id.size() < 2 || id.front() != 'n') throw InputError("GraphML: bad node id '" + id + "'");
    return std::stoull(id.substr(1));
  };

  std::size_t pos = 0;
  try {
    while ((pos = text.find('<', pos)) != std::string_view::npos) {
      const auto close = text.find('>', pos);
      if (close == std::string_view::npos) throw InputError("GraphML: unterminated tag");
      const auto tag = text.substr(pos, close - pos + 1);
      if (tag.starts_with("<node ")) {
        scope = Scope::Node;
        values.clear();
        element_id = attribute(tag, "id");
      } else if (tag.starts_with("<edge ")) {
        scope = Scope::Edge;
        values.clear();
        source = attribute(tag, "source");
        target = attribute(tag, "target");
      } else if (tag.starts_with("<data ")) {
        data_key = attribute(tag, "key");
        const auto end = text.find("</data>", close);
        if (end == std::string_view::npos) throw InputError("GraphML: unterminated data");
        values[data_key] = xml_unescape(text.substr(close + 1, end - close - 1));
        pos = end + 7;
        continue;
      } else if (tag == "</node>") {
        NodeProps props;
        if (auto it = values.find("rating"); it != values.end()) props.rating = std::stoi(it->second);
        if (values.contains("avg_sentiment")) {
          props.sentiment = SentimentAggregate{std::stod(values.at("avg_sentiment")),
                                               std::stod(values.at("min_sentiment")),
                                               std::stod(values.at("max_sentiment"))};
        }
        if (auto it = values.find("embedding"); it != values.end()) props.embedding = split_vector(it->second);
        restore_node(g, node_index(element_id), parse_node_label(values.at("label")), values.at("name"),
                     std::move(props));
        scope = Scope::None;
      } else if (tag == "</edge>") {
        std::optional<double> sentiment;
        if (auto it = values.find("sentiment"); it != values.end()) sentiment = std::stod(it->second);
        g.add_edge(node_index(source), node_index(target), values.at("kind"), sentiment);
        scope = Scope::None;
      }
      pos = close + 1;
    }
  } catch (const std::out_of_range& e) {
    throw InputError(std::string("GraphML: missing field: ") + e.what());
  }
  (void)scope;
  return g;
}

// ---------------------------------------------------------------------------
// CSV pair

CsvPair to_csv_pair(const KnowledgeGraph& g) {
  CsvPair files;
  files.nodes = "node_id,label,name,rating,avg_sentiment,min_sentiment,max_sentiment,embedding\n";
  for (const auto& node : g.nodes()) {
    const auto& p = node.props;
    files.nodes += csv::join({std::to_string(node.id), std::string(to_string(node.label)), node.name,
                              p.rating ? std::to_string(*p.rating) : "",
                              p.sentiment ? format_double(p.sentiment->avg) : "",
                              p.sentiment ? format_double(p.sentiment->min) : "",
                              p.sentiment ? format_double(p.sentiment->max) : "",
                              p.embedding ? join_vector(*p.embedding) : ""});
    files.nodes.push_back('\n');
  }
  files.edges = "source,target,kind,sentiment\n";
  for (const auto& edge : g.edges()) {
    files.edges += csv::join({std::to_string(edge.src), std::to_string(edge.dst), edge.kind,
                              edge.sentiment ? format_double(*edge.sentiment) : ""});
    files.edges.push_back('\n');
  }
  return files;
}

KnowledgeGraph from_csv_pair(const CsvPair& files) {
  KnowledgeGraph g;
  const auto node_rows = csv::parse(files.nodes);
  const auto edge_rows = csv::parse(files.edges);
  if (node_rows.empty() || edge_rows.empty()) throw InputError("graph CSV: missing header");
  try {
    for (std::size_t r = 1; r < node_rows.size(); ++r) {
      const auto& row = node_rows[r];
      if (row.size() != 8) throw InputError("graph CSV: node row " + std::to_string(r) + " has wrong width");
      NodeProps props;
      if (!row[3].empty()) props.rating = std::stoi(row[3]);
      if (!row[4].empty()) {
        props.sentiment = SentimentAggregate{std::stod(row[4]), std::stod(row[5]), std::stod(row[6])};
      }
      if (!row[7].empty()) props.embedding = split_vector(row[7]);
      restore_node(g, std::stoull(row[0]), parse_node_label(row[1]), row[2], std::move(props));
    }
    for (std::size_t r = 1; r < edge_rows.size(); ++r) {
      const auto& row = edge_rows[r];
      if (row.size() != 4) throw InputError("graph CSV: edge row " + std::to_string(r) + " has wrong width");
      g.add_edge(std::stoull(row[0]), std::stoull(row[1]), row[2], parse_optional_double(row[3]));
    }
  } catch (const std::logic_error& e) {
    throw InputError(std::string("graph CSV: ") + e.what());
  }
  return g;
}

void export_graph(const KnowledgeGraph& g, GraphFormat format, const std::filesystem::path& path) {
  switch (format) {
    case GraphFormat::NodeLinkJson:
      write_text_file(path, to_node_link_json(g));
      break;
    case GraphFormat::GraphMl:
      write_text_file(path, to_graphml(g));
      break;
    case GraphFormat::CsvPair: {
      const auto files = to_csv_pair(g);
      write_text_file(path / "nodes.csv", files.nodes);
      write_text_file(path / "edges.csv", files.edges);
      break;
    }
  }
}

KnowledgeGraph import_graph(GraphFormat format, const std::filesystem::path& path) {
  switch (format) {
    case GraphFormat::NodeLinkJson:
      return from_node_link_json(read_text_file(path));
    case GraphFormat::GraphMl:
      return from_graphml(read_text_file(path));
    case GraphFormat::CsvPair:
      return from_csv_pair({read_text_file(path / "nodes.csv"), read_text_file(path / "edges.csv")});
  }
  throw DomainError("unknown graph format");
}

}  // namespace reviewgraph
