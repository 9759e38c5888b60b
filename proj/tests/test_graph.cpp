#include <doctest.h>

#include <stdexcept>

#include "rds/graph.hpp"
#include "support.hpp"

using namespace rds;
using rds::test::directed;
using rds::test::undirected;

TEST_CASE("degree counts reciprocal partners and directed edges") {
  const auto path = test::path_graph(3);
  CHECK(degree(path, 1, DegreeMode::reciprocal) == 2);
  CHECK(degree(path, 0, DegreeMode::reciprocal) == 1);

  const auto cycle = directed(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(degree(cycle, 0, DegreeMode::out) == 1);
  CHECK(degree(cycle, 0, DegreeMode::in) == 1);
  CHECK(degree(cycle, 0, DegreeMode::reciprocal) == 0);

  const auto lonely = undirected(3, {{0, 1}});
  CHECK(degree(lonely, 2, DegreeMode::reciprocal) == 0);
  CHECK(degree(lonely, 2, DegreeMode::out) == 0);

  CHECK_THROWS_AS(degree(lonely, 3, DegreeMode::out), std::out_of_range);
  CHECK_THROWS(degree(lonely, -1, DegreeMode::in));
}

TEST_CASE("construction rejects invalid edges") {
  CHECK_THROWS_AS(directed(2, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(directed(2, {{0, 1}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(directed(2, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(AttributedGraph(test::labelled(2), {{0, 1, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(AttributedGraph(test::labelled(2), {{0, 1, -2.0}}), std::invalid_argument);
}

TEST_CASE("weights and adjacency queries") {
  const AttributedGraph g(test::labelled(3), {{0, 1, 2.5}, {1, 0, 2.5}, {0, 2, 4.0}});
  CHECK(g.has_edge(0, 2));
  CHECK_FALSE(g.has_edge(2, 0));
  CHECK(g.weight(0, 2) == doctest::Approx(4.0));
  CHECK_FALSE(g.weight(2, 0).has_value());
  CHECK(g.edge_count() == 3);
  CHECK(g.reciprocal_edge_count() == 2);
  CHECK_FALSE(g.all_reciprocal());
  REQUIRE(g.reciprocal_neighbors(0).size() == 1);
  CHECK(g.reciprocal_neighbors(0)[0] == 1);
}

TEST_CASE("reciprocal subgraph keeps exactly the mutual edges") {
  const AttributedGraph g(test::labelled(3), {{0, 1, 3.0}, {1, 0, 3.0}, {0, 2, 1.0}});
  const auto r = reciprocal_subgraph(g);
  CHECK(r.node_count() == 3);
  CHECK(r.edge_count() == 2);
  CHECK(r.has_edge(0, 1));
  CHECK(r.has_edge(1, 0));
  CHECK_FALSE(r.has_edge(0, 2));
  CHECK(r.weight(0, 1) == doctest::Approx(3.0));
  CHECK(r.attributes().same_values(g.attributes()));

  const auto full = test::path_graph(4);
  CHECK(reciprocal_subgraph(full) == full);

  const auto oneway = directed(3, {{0, 1}, {1, 2}, {2, 0}});
  const auto empty = reciprocal_subgraph(oneway);
  CHECK(empty.node_count() == 3);
  CHECK(empty.edge_count() == 0);
}

TEST_CASE("giant reciprocal component") {
  SUBCASE("largest wins") {
    const auto g = undirected(5, {{3, 4}, {0, 1}, {1, 2}});
    CHECK(giant_reciprocal_component(g) == std::vector<NodeId>{0, 1, 2});
    const auto h = undirected(5, {{0, 1}, {2, 3}, {3, 4}});
    CHECK(giant_reciprocal_component(h) == std::vector<NodeId>{2, 3, 4});
  }
  SUBCASE("connected graph gives all nodes") {
    CHECK(giant_reciprocal_component(test::path_graph(6)).size() == 6);
  }
  SUBCASE("equal sizes break toward smaller ids") {
    const auto g = undirected(4, {{2, 3}, {0, 1}});
    CHECK(giant_reciprocal_component(g) == std::vector<NodeId>{0, 1});
  }
  SUBCASE("one-way edges do not connect") {
    const auto g = directed(4, {{0, 1}, {1, 0}, {1, 2}, {2, 3}, {3, 2}, {2, 1}, {0, 3}});
    CHECK(giant_reciprocal_component(g) == std::vector<NodeId>{0, 1, 2, 3});
    const auto h = directed(4, {{0, 1}, {1, 0}, {1, 2}, {2, 3}, {3, 2}});
    CHECK(giant_reciprocal_component(h) == std::vector<NodeId>{0, 1});
  }
  SUBCASE("empty graph") {
    CHECK(giant_reciprocal_component(AttributedGraph{}).empty());
  }
}

TEST_CASE("giant strongly connected component") {
  SUBCASE("3-cycle with a dangling edge") {
    const auto g = directed(4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}});
    CHECK(giant_strongly_connected_component(g) == std::vector<NodeId>{0, 1, 2});
  }
  SUBCASE("reciprocal connected graph") {
    CHECK(giant_strongly_connected_component(test::path_graph(5)).size() == 5);
  }
  SUBCASE("DAG gives the smallest singleton") {
    const auto g = directed(4, {{3, 2}, {2, 1}, {1, 0}, {3, 0}});
    CHECK(giant_strongly_connected_component(g) == std::vector<NodeId>{0});
  }
  SUBCASE("empty graph") {
    CHECK(giant_strongly_connected_component(AttributedGraph{}).empty());
  }
  SUBCASE("long chain does not overflow the stack") {
    std::vector<std::pair<NodeId, NodeId>> arcs;
    const NodeId n = 200000;
    for (NodeId u = 0; u + 1 < n; ++u) arcs.emplace_back(u, u + 1);
    arcs.emplace_back(n - 1, 0);
    CHECK(giant_strongly_connected_component(directed(n, arcs)).size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("true proportion") {
  const auto g = undirected(4, {{0, 1}, {1, 2}, {2, 3}}, {"A", "B", "B", "B"});
  CHECK(true_proportion(g, NodePartition(g, "group", "A")) == doctest::Approx(0.25));
  CHECK(true_proportion(g, NodePartition(g, "group", "B")) == doctest::Approx(0.75));
  const auto all = undirected(2, {{0, 1}}, {"A", "A"});
  CHECK(true_proportion(all, NodePartition(all, "group", "A")) == 1.0);
  NodePartition none("group", "C", std::vector<char>(4, 0));
  CHECK(true_proportion(g, none) == 0.0);
  CHECK_THROWS(true_proportion(AttributedGraph{}, NodePartition("group", "A", {})));
}

TEST_CASE("partition lookups and complement") {
  const auto g = undirected(3, {{0, 1}, {1, 2}}, {"A", "B", "A"});
  const NodePartition a(g, "group", "A");
  CHECK(a.member_count() == 2);
  CHECK(a.contains(0));
  CHECK_FALSE(a.contains(1));
  const auto b = a.complement();
  CHECK(b.member_count() == 1);
  CHECK(b.contains(1));
  CHECK_THROWS(NodePartition(g, "group", "Z"));
  CHECK_THROWS(NodePartition(g, "age", "A"));
}

TEST_CASE("induced subgraph relabels densely and keeps attributes") {
  const auto g = undirected(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, {"A", "B", "A", "B", "A"});
  const auto s = induced_subgraph(g, {4, 2, 3});
  CHECK(s.node_count() == 3);
  CHECK(s.has_edge(0, 1));  // 2-3
  CHECK(s.has_edge(1, 2));  // 3-4
  CHECK_FALSE(s.has_edge(0, 2));
  CHECK(*s.attributes().get(0, "group") == "A");
  CHECK(*s.attributes().get(1, "group") == "B");
}
