#pragma once

// Attributed directed graph with reciprocal-edge views.
//
// Nodes are dense integers 0..N-1. Every edge is an ordered pair (src, dst)
// carrying a positive weight; an undirected tie is stored as the two
// directions. Attribute values are categorical strings interned per
// attribute, so hot loops can work with small integers.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rds {

using NodeId = std::int32_t;
using Category = std::uint16_t;

inline constexpr Category kMissingCategory = std::numeric_limits<Category>::max();

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class DegreeMode { reciprocal, out, in };

/// Per-node categorical attributes, interned per attribute name.
class NodeAttributes {
 public:
  NodeAttributes() = default;
  explicit NodeAttributes(NodeId node_count);

  NodeId node_count() const { return node_count_; }
  std::size_t attribute_count() const { return names_.size(); }

  /// Registers an attribute (idempotent) and returns its index.
  std::size_t add_attribute(std::string_view name);
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws if unknown
  const std::string& name(std::size_t attribute) const { return names_.at(attribute); }

  /// Interns `value` as a category of `attribute` and returns its code.
  Category intern(std::size_t attribute, std::string_view value);
  std::optional<Category> find_category(std::size_t attribute, std::string_view value) const;
  std::size_t category_count(std::size_t attribute) const { return categories_.at(attribute).size(); }
  const std::string& category_name(std::size_t attribute, Category c) const {
    return categories_.at(attribute).at(c);
  }

  void set(NodeId node, std::string_view attribute, std::string_view value);
  void set_code(NodeId node, std::size_t attribute, Category c);
  Category code(std::size_t attribute, NodeId node) const { return values_[attribute][node]; }
  std::span<const Category> codes(std::size_t attribute) const { return values_.at(attribute); }
  std::optional<std::string_view> get(NodeId node, std::string_view attribute) const;

  /// Attributes restricted to `keep` (ascending old ids; new id = position).
  NodeAttributes subset(std::span<const NodeId> keep) const;

  /// Compares by attribute names and per-node string values.
  bool same_values(const NodeAttributes& other) const;

 private:
  NodeId node_count_ = 0;
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> categories_;
  std::vector<std::vector<Category>> values_;
};

class AttributedGraph {
 public:
  AttributedGraph() = default;

  /// Validates edges (no self-loops, no duplicates, weights > 0, endpoints in
  /// range) and builds sorted adjacency. Throws std::invalid_argument.
  AttributedGraph(NodeAttributes attributes, std::vector<Edge> edges);

  NodeId node_count() const { return attributes_.node_count(); }
  /// Number of directed edges; a reciprocal tie counts twice.
  std::size_t edge_count() const { return out_targets_.size(); }
  std::size_t reciprocal_edge_count() const { return rec_targets_.size(); }
  bool empty() const { return node_count() == 0; }
  bool all_reciprocal() const { return rec_targets_.size() == out_targets_.size(); }

  std::span<const NodeId> out_neighbors(NodeId u) const;
  std::span<const double> out_weights(NodeId u) const;
  /// Partners v with both u->v and v->u present; weights are those of u->v.
  std::span<const NodeId> reciprocal_neighbors(NodeId u) const;
  std::span<const double> reciprocal_weights(NodeId u) const;

  std::size_t degree(NodeId u, DegreeMode mode) const;
  bool has_edge(NodeId u, NodeId v) const;
  std::optional<double> weight(NodeId u, NodeId v) const;

  /// Edge list in (src, dst) order.
  std::vector<Edge> edges() const;

  const NodeAttributes& attributes() const { return attributes_; }

  friend bool operator==(const AttributedGraph& a, const AttributedGraph& b);

 private:
  void check_node(NodeId u) const;

  NodeAttributes attributes_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<NodeId> out_targets_;
  std::vector<double> out_weight_;
  std::vector<std::size_t> rec_offsets_{0};
  std::vector<NodeId> rec_targets_;
  std::vector<double> rec_weight_;
  std::vector<std::size_t> in_degree_;
};

/// Binary split of the nodes by one attribute value: group A and complement.
/// Nodes without a value for the attribute fall into the complement.
class NodePartition {
 public:
  NodePartition(const AttributedGraph& graph, std::string_view attribute, std::string_view value);
  NodePartition(std::string attribute, std::string value, std::vector<char> membership);

  const std::string& attribute() const { return attribute_; }
  const std::string& value() const { return value_; }
  bool contains(NodeId u) const { return member_[static_cast<std::size_t>(u)] != 0; }
  std::size_t size() const { return member_.size(); }
  std::size_t member_count() const;
  NodePartition complement() const;

 private:
  std::string attribute_;
  std::string value_;
  std::vector<char> member_;
};

std::size_t degree(const AttributedGraph& graph, NodeId node, DegreeMode mode);

AttributedGraph reciprocal_subgraph(const AttributedGraph& graph);

/// Subgraph on `nodes`, relabelled densely in ascending order of old id.
AttributedGraph induced_subgraph(const AttributedGraph& graph, std::vector<NodeId> nodes);

/// Largest connected component of the reciprocal subgraph (sorted ids).
/// Ties go to the component holding the smallest node id.
std::vector<NodeId> giant_reciprocal_component(const AttributedGraph& graph);

/// Largest strongly connected component (sorted ids), same tie-break.
std::vector<NodeId> giant_strongly_connected_component(const AttributedGraph& graph);

/// All strongly connected components, each sorted, in discovery order.
std::vector<std::vector<NodeId>> strongly_connected_components(const AttributedGraph& graph);

double true_proportion(const AttributedGraph& graph, const NodePartition& partition);

}  // namespace rds
