#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rds/estimators.hpp"
#include "rds/io.hpp"
#include "rds/netgen.hpp"
#include "support.hpp"

using namespace rds;

namespace {

GeneratorSpec binary_spec(NodeId n, double p, std::optional<double> h_a, std::optional<double> h_b,
                          std::uint64_t seed = 1) {
  GeneratorSpec spec;
  spec.node_count = n;
  spec.degrees = GeometricDegrees{7.0};
  spec.attributes = {{"group", {{"A", p, h_a}, {"B", 1.0 - p, h_b}}}};
  spec.rng_seed = seed;
  return spec;
}

double group_h(const AttributedGraph& g, const char* value) {
  return homophily_index(g, NodePartition(g, "group", value));
}

double mean_degree(const AttributedGraph& g) {
  return static_cast<double>(g.edge_count()) / g.node_count();
}

std::string exported(const AttributedGraph& g) {
  std::ostringstream e, a;
  write_graph(g, e, a);
  return e.str() + a.str();
}

}  // namespace

TEST_CASE("generate plants homophily") {
  SUBCASE("no homophily target") {
    const auto g = generate(binary_spec(1000, 0.4, 0.0, 0.0));
    CHECK(std::abs(group_h(g, "A")) <= 0.02);
  }
  SUBCASE("H = 0.4") {
    const auto g = generate(binary_spec(1000, 0.4, 0.4, std::nullopt, 5));
    const NodePartition a(g, "group", "A");
    CHECK(std::abs(test::naive_homophily(g, a) - 0.4) <= 0.02);
  }
  SUBCASE("output is connected and undirected") {
    const auto g = generate(binary_spec(800, 0.3, 0.5, 0.5, 2));
    CHECK(g.all_reciprocal());
    CHECK(giant_reciprocal_component(g).size() == static_cast<std::size_t>(g.node_count()));
    CHECK(g.node_count() > 700);
    CHECK(true_proportion(g, NodePartition(g, "group", "A")) == doctest::Approx(0.3).epsilon(0.1));
  }
  SUBCASE("power-law degrees are skewed") {
    auto spec = binary_spec(2000, 0.5, std::nullopt, std::nullopt, 3);
    spec.degrees = PowerLawDegrees{2.2, 2, 200};
    const auto g = generate(spec);
    std::size_t top = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) top = std::max(top, g.degree(u, DegreeMode::reciprocal));
    CHECK(static_cast<double>(top) > 8 * mean_degree(g));
  }
  SUBCASE("explicit degrees") {
    GeneratorSpec spec;
    spec.node_count = 4;
    spec.degrees = ExplicitDegrees{{3, 3, 3, 3}};
    const auto g = generate(spec);
    CHECK(g.node_count() <= 4);
    for (NodeId u = 0; u < g.node_count(); ++u) CHECK(g.degree(u, DegreeMode::reciprocal) <= 3);
    spec.node_count = 5;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  }
  SUBCASE("two nodes give one tie") {
    const auto g = generate(binary_spec(2, 0.5, std::nullopt, std::nullopt));
    CHECK(g.node_count() == 2);
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 1));
  }
  SUBCASE("infeasible target names the attribute") {
    try {
      generate(binary_spec(600, 0.5, 0.9, 0.0));
      FAIL("expected infeasible homophily");
    } catch (const InfeasibleHomophilyError& e) {
      CHECK(e.attribute() == "group");
      CHECK(std::string(e.what()).find("group") != std::string::npos);
    }
  }
  SUBCASE("same seed, same graph") {
    CHECK(exported(generate(binary_spec(500, 0.4, 0.3, 0.3, 9))) ==
          exported(generate(binary_spec(500, 0.4, 0.3, 0.3, 9))));
    CHECK(exported(generate(binary_spec(500, 0.4, 0.3, 0.3, 9))) !=
          exported(generate(binary_spec(500, 0.4, 0.3, 0.3, 10))));
  }
  SUBCASE("invalid specs") {
    CHECK_THROWS_AS(generate(binary_spec(1, 0.4, 0.0, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(generate(binary_spec(100, 0.4, 1.0, 0.0)), std::invalid_argument);
    auto bad = binary_spec(100, 0.4, 0.0, 0.0);
    bad.attributes[0].categories[1].proportion = 0.5;
    CHECK_THROWS_AS(generate(bad), std::invalid_argument);
  }
}

TEST_CASE("directed variant") {
  const auto base = generate(binary_spec(1500, 0.4, 0.3, 0.3, 4));
  SUBCASE("zero fraction is the identity") {
    CHECK(make_directed_variant(base, 0.0, std::nullopt, 1) == base);
  }
  SUBCASE("half of the edges are one-way") {
    const auto d = make_directed_variant(base, 0.5, std::nullopt, 2);
    const double one_way = 1.0 - static_cast<double>(d.reciprocal_edge_count()) / d.edge_count();
    CHECK(std::abs(one_way - 0.5) <= 0.02);
    CHECK(giant_strongly_connected_component(d).size() == static_cast<std::size_t>(d.node_count()));
  }
  SUBCASE("bias raises the group's in-degree") {
    const auto d = make_directed_variant(base, 0.5, AttachmentBias{"group", "A", 3.0}, 3);
    const NodePartition a(d, "group", "A");
    double in_a = 0, in_b = 0;
    for (NodeId u = 0; u < d.node_count(); ++u)
      (a.contains(u) ? in_a : in_b) += static_cast<double>(d.degree(u, DegreeMode::in));
    const double na = static_cast<double>(a.member_count());
    CHECK(in_a / na > in_b / (d.node_count() - na));
  }
  SUBCASE("fraction outside [0,1)") {
    CHECK_THROWS_AS(make_directed_variant(base, 1.0, std::nullopt, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_directed_variant(base, -0.1, std::nullopt, 1), std::invalid_argument);
  }
}

TEST_CASE("adding edges keeps the mixing pattern") {
  const auto base = generate(binary_spec(1500, 0.4, 0.4, 0.4, 6));
  CHECK(add_edges_preserving_homophily(base, 0.0, 1) == base);
  const auto dense = add_edges_preserving_homophily(base, 20.0, 7);
  CHECK(std::abs(mean_degree(dense) - mean_degree(base) - 20.0) <= 0.2);
  CHECK(std::abs(group_h(dense, "A") - group_h(base, "A")) <= 0.02);
  CHECK(std::abs(group_h(dense, "B") - group_h(base, "B")) <= 0.02);
  CHECK(dense.attributes().same_values(base.attributes()));
  CHECK(dense.all_reciprocal());
  CHECK_THROWS_AS(add_edges_preserving_homophily(test::path_graph(5), 10.0, 1), std::invalid_argument);
}

TEST_CASE("rewiring keeps homophily but not degrees") {
  const auto base = generate(binary_spec(1500, 0.4, 0.4, 0.4, 8));
  const auto r = rewire_preserving_attributes(base, {"group"}, 3);
  CHECK(std::abs(group_h(r.graph, "A") - group_h(base, "A")) <= 0.02);
  CHECK(r.graph.all_reciprocal());
  CHECK(giant_reciprocal_component(r.graph).size() == static_cast<std::size_t>(r.graph.node_count()));
  CHECK(r.graph.node_count() >= 0.95 * base.node_count());
  std::size_t changed = 0;
  if (r.graph.node_count() == base.node_count())
    for (NodeId u = 0; u < base.node_count(); ++u)
      changed += base.degree(u, DegreeMode::reciprocal) != r.graph.degree(u, DegreeMode::reciprocal);
  CHECK((r.graph.node_count() != base.node_count() || changed > 0));

  SUBCASE("single attribute value randomizes freely") {
    std::mt19937_64 rng(1);
    auto g = test::random_connected(rng, 80, 0.15);
    NodeAttributes same(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) same.set(u, "group", "A");
    g = AttributedGraph(same, g.edges());
    const auto out = rewire_preserving_attributes(g, {}, 4, 0.0);
    CHECK(out.skipped == 0);
    CHECK_FALSE(out.graph == g);
    if (out.graph.node_count() == g.node_count()) CHECK(out.graph.edge_count() == g.edge_count());
  }
  SUBCASE("lone members are skipped") {
    std::mt19937_64 rng(2);
    auto g = test::random_connected(rng, 60, 0.2);
    NodeAttributes attrs(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) attrs.set(u, "group", u == 0 ? "A" : "B");
    g = AttributedGraph(attrs, g.edges());
    CHECK(rewire_preserving_attributes(g, {"group"}, 5, 0.0).skipped > 0);
  }
}

TEST_CASE("edge weights") {
  const AttributedGraph raw(test::labelled(2), {{0, 1, 10.0}, {1, 0, 5.0}});
  const auto mx = assign_edge_weights(raw, MaxCombine{}).graph;
  CHECK(*mx.weight(0, 1) == 10.0);
  CHECK(*mx.weight(1, 0) == 10.0);
  const auto mn = assign_edge_weights(raw, MinCombine{}).graph;
  CHECK(*mn.weight(0, 1) == 5.0);
  CHECK(*mn.weight(1, 0) == 5.0);

  const AttributedGraph flat(test::labelled(2), {{0, 1, 3.0}, {1, 0, 3.0}});
  CHECK(assign_edge_weights(flat, MaxCombine{}).graph == assign_edge_weights(flat, MinCombine{}).graph);

  const AttributedGraph tiny(test::labelled(2), {{0, 1, 0.5}, {1, 0, 0.25}});
  const auto clamp = assign_edge_weights(tiny, MaxCombine{});
  CHECK(clamp.clamped == 1);
  CHECK(*clamp.graph.weight(0, 1) == 1.0);

  const auto base = generate(binary_spec(500, 0.4, 0.2, 0.2, 3));
  LognormalWeights ln;
  ln.rng_seed = 5;
  const auto w = assign_edge_weights(base, ln);
  for (const auto& e : w.graph.edges()) {
    CHECK(e.weight >= 1.0);
    CHECK(*w.graph.weight(e.dst, e.src) == e.weight);
  }
  CHECK(w.clamped > 0);
  CHECK(w.graph.attributes().same_values(base.attributes()));

  ln.shift_attribute = "group";
  ln.shift_value = "A";
  ln.shift = 1.0;
  const auto shifted = assign_edge_weights(base, ln).graph;
  const NodePartition a(shifted, "group", "A");
  double wa = 0, na = 0, wb = 0, nb = 0;
  for (const auto& e : shifted.edges()) {
    if (a.contains(e.src) && a.contains(e.dst)) wa += e.weight, ++na;
    if (!a.contains(e.src) && !a.contains(e.dst)) wb += e.weight, ++nb;
  }
  CHECK(wa / na > wb / nb);
}
