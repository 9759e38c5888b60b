#include "rds/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

namespace rds {

// ---------------------------------------------------------------------------
// NodeAttributes

NodeAttributes::NodeAttributes(NodeId node_count) : node_count_(node_count) {
  if (node_count < 0) throw std::invalid_argument("node count must be non-negative");
}

std::size_t NodeAttributes::add_attribute(std::string_view name) {
  if (auto existing = find(name)) return *existing;
  if (name.empty()) throw std::invalid_argument("attribute name must be non-empty");
  names_.emplace_back(name);
  categories_.emplace_back();
  values_.emplace_back(static_cast<std::size_t>(node_count_), kMissingCategory);
  return names_.size() - 1;
}

std::optional<std::size_t> NodeAttributes::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::size_t NodeAttributes::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw std::invalid_argument("unknown attribute '" + std::string(name) + "'");
}

Category NodeAttributes::intern(std::size_t attribute, std::string_view value) {
  auto& cats = categories_.at(attribute);
  for (std::size_t c = 0; c < cats.size(); ++c)
    if (cats[c] == value) return static_cast<Category>(c);
  if (cats.size() + 1 >= kMissingCategory)
    throw std::length_error("too many categories for attribute '" + names_[attribute] + "'");
  cats.emplace_back(value);
  return static_cast<Category>(cats.size() - 1);
}

std::optional<Category> NodeAttributes::find_category(std::size_t attribute,
                                                      std::string_view value) const {
  const auto& cats = categories_.at(attribute);
  for (std::size_t c = 0; c < cats.size(); ++c)
    if (cats[c] == value) return static_cast<Category>(c);
  return std::nullopt;
}

void NodeAttributes::set(NodeId node, std::string_view attribute, std::string_view value) {
  const std::size_t a = add_attribute(attribute);
  set_code(node, a, intern(a, value));
}

void NodeAttributes::set_code(NodeId node, std::size_t attribute, Category c) {
  if (node < 0 || node >= node_count_)
    throw std::out_of_range("node " + std::to_string(node) + " out of range");
  values_.at(attribute)[static_cast<std::size_t>(node)] = c;
}

std::optional<std::string_view> NodeAttributes::get(NodeId node, std::string_view attribute) const {
  const auto a = find(attribute);
  if (!a) return std::nullopt;
  const Category c = values_[*a].at(static_cast<std::size_t>(node));
  if (c == kMissingCategory) return std::nullopt;
  return categories_[*a][c];
}

NodeAttributes NodeAttributes::subset(std::span<const NodeId> keep) const {
  NodeAttributes out(static_cast<NodeId>(keep.size()));
  out.names_ = names_;
  out.categories_ = categories_;
  out.values_.resize(values_.size());
  for (std::size_t a = 0; a < values_.size(); ++a) {
    out.values_[a].reserve(keep.size());
    for (NodeId u : keep) out.values_[a].push_back(values_[a].at(static_cast<std::size_t>(u)));
  }
  return out;
}

bool NodeAttributes::same_values(const NodeAttributes& other) const {
  if (node_count_ != other.node_count_) return false;
  // Attributes with no assigned values on either side are ignored.
  auto has_any = [](const NodeAttributes& n, std::size_t a) {
    return std::any_of(n.values_[a].begin(), n.values_[a].end(),
                       [](Category c) { return c != kMissingCategory; });
  };
  for (std::size_t a = 0; a < names_.size(); ++a) {
    const auto b = other.find(names_[a]);
    if (!b) {
      if (has_any(*this, a)) return false;
      continue;
    }
    for (NodeId u = 0; u < node_count_; ++u) {
      if (get(u, names_[a]) != other.get(u, names_[a])) return false;
    }
  }
  for (std::size_t b = 0; b < other.names_.size(); ++b)
    if (!find(other.names_[b]) && has_any(other, b)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// AttributedGraph

AttributedGraph::AttributedGraph(NodeAttributes attributes, std::vector<Edge> edges)
    : attributes_(std::move(attributes)) {
  const NodeId n = attributes_.node_count();
  for (const Edge& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      throw std::invalid_argument("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                                  " references an unknown node");
    if (e.src == e.dst)
      throw std::invalid_argument("self-loop at node " + std::to_string(e.src));
    if (!(e.weight > 0.0))
      throw std::invalid_argument("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                                  " has non-positive weight");
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i].src == edges[i - 1].src && edges[i].dst == edges[i - 1].dst)
      throw std::invalid_argument("duplicate edge " + std::to_string(edges[i].src) + "->" +
                                  std::to_string(edges[i].dst));

  const auto un = static_cast<std::size_t>(n);
  out_offsets_.assign(un + 1, 0);
  in_degree_.assign(un, 0);
  out_targets_.reserve(edges.size());
  out_weight_.reserve(edges.size());
  for (const Edge& e : edges) {
    ++out_offsets_[static_cast<std::size_t>(e.src) + 1];
    ++in_degree_[static_cast<std::size_t>(e.dst)];
    out_targets_.push_back(e.dst);
    out_weight_.push_back(e.weight);
  }
  std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());

  rec_offsets_.assign(un + 1, 0);
  for (NodeId u = 0; u < n; ++u) {
    const auto targets = out_neighbors(u);
    const auto weights = out_weights(u);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (has_edge(targets[k], u)) {
        rec_targets_.push_back(targets[k]);
        rec_weight_.push_back(weights[k]);
      }
    }
    rec_offsets_[static_cast<std::size_t>(u) + 1] = rec_targets_.size();
  }
}

void AttributedGraph::check_node(NodeId u) const {
  if (u < 0 || u >= node_count())
    throw std::out_of_range("unknown node " + std::to_string(u));
}

std::span<const NodeId> AttributedGraph::out_neighbors(NodeId u) const {
  check_node(u);
  const auto i = static_cast<std::size_t>(u);
  return {out_targets_.data() + out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]};
}

std::span<const double> AttributedGraph::out_weights(NodeId u) const {
  check_node(u);
  const auto i = static_cast<std::size_t>(u);
  return {out_weight_.data() + out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]};
}

std::span<const NodeId> AttributedGraph::reciprocal_neighbors(NodeId u) const {
  check_node(u);
  const auto i = static_cast<std::size_t>(u);
  return {rec_targets_.data() + rec_offsets_[i], rec_offsets_[i + 1] - rec_offsets_[i]};
}

std::span<const double> AttributedGraph::reciprocal_weights(NodeId u) const {
  check_node(u);
  const auto i = static_cast<std::size_t>(u);
  return {rec_weight_.data() + rec_offsets_[i], rec_offsets_[i + 1] - rec_offsets_[i]};
}

std::size_t AttributedGraph::degree(NodeId u, DegreeMode mode) const {
  check_node(u);
  const auto i = static_cast<std::size_t>(u);
  switch (mode) {
    case DegreeMode::reciprocal: return rec_offsets_[i + 1] - rec_offsets_[i];
    case DegreeMode::out: return out_offsets_[i + 1] - out_offsets_[i];
    case DegreeMode::in: return in_degree_[i];
  }
  return 0;
}

bool AttributedGraph::has_edge(NodeId u, NodeId v) const {
  const auto targets = out_neighbors(u);
  return std::binary_search(targets.begin(), targets.end(), v);
}

std::optional<double> AttributedGraph::weight(NodeId u, NodeId v) const {
  const auto targets = out_neighbors(u);
  const auto it = std::lower_bound(targets.begin(), targets.end(), v);
  if (it == targets.end() || *it != v) return std::nullopt;
  return out_weights(u)[static_cast<std::size_t>(it - targets.begin())];
}

std::vector<Edge> AttributedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    const auto t = out_neighbors(u);
    const auto w = out_weights(u);
    for (std::size_t k = 0; k < t.size(); ++k) out.push_back({u, t[k], w[k]});
  }
  return out;
}

bool operator==(const AttributedGraph& a, const AttributedGraph& b) {
  return a.node_count() == b.node_count() && a.out_offsets_ == b.out_offsets_ &&
         a.out_targets_ == b.out_targets_ && a.out_weight_ == b.out_weight_ &&
         a.attributes_.same_values(b.attributes_);
}

// ---------------------------------------------------------------------------
// NodePartition

NodePartition::NodePartition(const AttributedGraph& graph, std::string_view attribute,
                             std::string_view value)
    : attribute_(attribute), value_(value) {
  const auto& attrs = graph.attributes();
  const std::size_t a = attrs.index_of(attribute);
  const auto code = attrs.find_category(a, value);
  if (!code)
    throw std::invalid_argument("attribute '" + attribute_ + "' has no value '" + value_ + "'");
  const auto codes = attrs.codes(a);
  member_.reserve(codes.size());
  for (Category c : codes) member_.push_back(c == *code ? 1 : 0);
}

NodePartition::NodePartition(std::string attribute, std::string value, std::vector<char> membership)
    : attribute_(std::move(attribute)), value_(std::move(value)), member_(std::move(membership)) {}

std::size_t NodePartition::member_count() const {
  return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), char{1}));
}

NodePartition NodePartition::complement() const {
  std::vector<char> flipped(member_.size());
  std::transform(member_.begin(), member_.end(), flipped.begin(),
                 [](char m) { return static_cast<char>(m ? 0 : 1); });
  return {attribute_, "not " + value_, std::move(flipped)};
}

// ---------------------------------------------------------------------------
// free functions

std::size_t degree(const AttributedGraph& graph, NodeId node, DegreeMode mode) {
  return graph.degree(node, mode);
}

AttributedGraph reciprocal_subgraph(const AttributedGraph& graph) {
  std::vector<Edge> kept;
  kept.reserve(graph.reciprocal_edge_count());
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    const auto t = graph.reciprocal_neighbors(u);
    const auto w = graph.reciprocal_weights(u);
    for (std::size_t k = 0; k < t.size(); ++k) kept.push_back({u, t[k], w[k]});
  }
  return {graph.attributes(), std::move(kept)};
}

AttributedGraph induced_subgraph(const AttributedGraph& graph, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::vector<NodeId> remap(static_cast<std::size_t>(graph.node_count()), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] < 0 || nodes[i] >= graph.node_count())
      throw std::out_of_range("unknown node " + std::to_string(nodes[i]));
    remap[static_cast<std::size_t>(nodes[i])] = static_cast<NodeId>(i);
  }
  std::vector<Edge> kept;
  for (NodeId u : nodes) {
    const auto t = graph.out_neighbors(u);
    const auto w = graph.out_weights(u);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const NodeId v = remap[static_cast<std::size_t>(t[k])];
      if (v >= 0) kept.push_back({remap[static_cast<std::size_t>(u)], v, w[k]});
    }
  }
  return {graph.attributes().subset(nodes), std::move(kept)};
}

namespace {

// Components arrive sorted; choose the largest, earliest minimum id on ties.
std::vector<NodeId> pick_giant(std::vector<std::vector<NodeId>> components) {
  std::vector<NodeId>* best = nullptr;
  for (auto& c : components) {
    if (c.empty()) continue;
    if (!best || c.size() > best->size() || (c.size() == best->size() && c.front() < best->front()))
      best = &c;
  }
  return best ? std::move(*best) : std::vector<NodeId>{};
}

}  // namespace

std::vector<NodeId> giant_reciprocal_component(const AttributedGraph& graph) {
  const auto n = static_cast<std::size_t>(graph.node_count());
  std::vector<char> seen(n, 0);
  std::vector<std::vector<NodeId>> components;
  std::queue<NodeId> frontier;
  for (NodeId s = 0; s < graph.node_count(); ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    std::vector<NodeId> comp;
    seen[static_cast<std::size_t>(s)] = 1;
    frontier.push(s);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop();
      comp.push_back(u);
      for (NodeId v : graph.reciprocal_neighbors(u)) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          frontier.push(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return pick_giant(std::move(components));
}

std::vector<std::vector<NodeId>> strongly_connected_components(const AttributedGraph& graph) {
  // Iterative Tarjan; recursion would overflow on long chains.
  const auto n = static_cast<std::size_t>(graph.node_count());
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<NodeId> stack;
  std::vector<std::pair<NodeId, std::size_t>> call;  // node, next neighbour slot
  std::vector<std::vector<NodeId>> components;
  std::size_t counter = 0;

  for (NodeId root = 0; root < graph.node_count(); ++root) {
    if (index[static_cast<std::size_t>(root)] != kUnvisited) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [u, slot] = call.back();
      const auto ui = static_cast<std::size_t>(u);
      if (slot == 0 && index[ui] == kUnvisited) {
        index[ui] = low[ui] = counter++;
        stack.push_back(u);
        on_stack[ui] = 1;
      }
      const auto succ = graph.out_neighbors(u);
      bool descended = false;
      while (slot < succ.size()) {
        const NodeId v = succ[slot++];
        const auto vi = static_cast<std::size_t>(v);
        if (index[vi] == kUnvisited) {
          call.emplace_back(v, 0);
          descended = true;
          break;
        }
        if (on_stack[vi]) low[ui] = std::min(low[ui], index[vi]);
      }
      if (descended) continue;
      if (low[ui] == index[ui]) {
        std::vector<NodeId> comp;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp.push_back(w);
        } while (w != u);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      const std::size_t finished_low = low[ui];
      call.pop_back();
      if (!call.empty()) {
        const auto parent = static_cast<std::size_t>(call.back().first);
        low[parent] = std::min(low[parent], finished_low);
      }
    }
  }
  return components;
}

std::vector<NodeId> giant_strongly_connected_component(const AttributedGraph& graph) {
  return pick_giant(strongly_connected_components(graph));
}

double true_proportion(const AttributedGraph& graph, const NodePartition& partition) {
  if (graph.empty()) throw std::invalid_argument("true proportion of an empty graph is undefined");
  if (partition.size() != static_cast<std::size_t>(graph.node_count()))
    throw std::invalid_argument("partition does not cover the graph");
  return static_cast<double>(partition.member_count()) / static_cast<double>(graph.node_count());
}

}  // namespace rds
