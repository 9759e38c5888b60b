#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "rds/estimators.hpp"
#include "rds/experiments.hpp"
#include "rds/io.hpp"
#include "rds/netgen.hpp"
#include "support.hpp"

using namespace rds;

namespace {

AttributedGraph random_digraph(std::mt19937_64& rng, NodeId n, double p_mutual, double p_oneway) {
  std::vector<Edge> edges;
  std::uniform_real_distribution<double> u(0, 1), w(0.5, 3.0);
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b) {
      const double r = u(rng);
      if (r < p_mutual) {
        const double x = w(rng);
        edges.push_back({a, b, x});
        edges.push_back({b, a, x});
      } else if (r < p_mutual + p_oneway) {
        if (u(rng) < 0.5) edges.push_back({a, b, w(rng)});
        else edges.push_back({b, a, w(rng)});
      }
    }
  return {test::labelled(n), std::move(edges)};
}

RecruitmentSample random_sample(std::mt19937_64& rng, NodeId n, std::size_t size) {
  std::vector<std::pair<NodeId, int>> entries;
  std::uniform_int_distribution<NodeId> node(0, n - 1);
  std::uniform_int_distribution<int> deg(1, 60);
  for (std::size_t i = 0; i < size; ++i) entries.emplace_back(node(rng), deg(rng));
  return test::make_sample(entries);
}

}  // namespace

TEST_CASE("graph invariants on random digraphs") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = random_digraph(rng, 3 + trial % 25, 0.08, 0.1);
    const auto r = reciprocal_subgraph(g);
    CHECK(reciprocal_subgraph(r) == r);
    CHECK(giant_reciprocal_component(g) == giant_strongly_connected_component(r));
    std::size_t out = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) out += g.degree(u, DegreeMode::out);
    CHECK(out == g.edge_count());
    for (NodeId u = 0; u < r.node_count(); ++u) {
      CHECK(r.degree(u, DegreeMode::in) == r.degree(u, DegreeMode::out));
      CHECK(r.degree(u, DegreeMode::out) == r.degree(u, DegreeMode::reciprocal));
    }
    std::size_t covered = 0;
    for (const auto& c : strongly_connected_components(g)) covered += c.size();
    CHECK(covered == static_cast<std::size_t>(g.node_count()));
  }
}

TEST_CASE("recruitment samples keep their bookkeeping") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 30; ++trial) {
    const bool directed = trial % 3 == 2;
    const auto g = directed ? test::random_strongly_connected(gen, 30, 0.08, true)
                            : test::random_connected(gen, 30, 0.1, trial % 2 == 1);
    const NodePartition a(g, "group", "A");
    SamplingConfig c;
    c.target_sample_size = 25 + trial;
    c.seed_count = 1 + trial % 4;
    c.coupons_per_participant = 1 + trial % 3;
    c.replacement = trial % 2 ? Replacement::without : Replacement::with;
    c.ignore_prob = {0.1 * (trial % 4), 0.05 * (trial % 5)};
    c.reject_prob = {0.1 * (trial % 3), 0.2};
    c.recruitment_mode = trial % 4 == 1 ? RecruitmentMode::weight_proportional : RecruitmentMode::uniform;
    c.seed_selection = trial % 5 == 0 ? SeedSelection::degree_proportional : SeedSelection::uniform;
    c.edges = directed ? EdgeSemantics::directed : EdgeSemantics::reciprocal;
    c.rng_seed = 1000 + trial;
    if (c.replacement == Replacement::without) c.target_sample_size = 25;
    const auto s = run_chain(g, a, c);
    REQUIRE(s.participants.size() == static_cast<std::size_t>(c.target_sample_size));
    std::set<NodeId> seen;
    for (std::size_t i = 0; i < s.participants.size(); ++i) {
      const auto& p = s.participants[i];
      CHECK(p.reported_degree >= 1);
      if (p.recruiter_index == kSeedRecruiter) {
        CHECK(p.wave == 0);
      } else {
        REQUIRE(p.recruiter_index < static_cast<std::int64_t>(i));
        const auto& r = s.participants[static_cast<std::size_t>(p.recruiter_index)];
        CHECK(p.wave == r.wave + 1);
        CHECK(p.recruiter == r.node);
        CHECK(g.has_edge(r.node, p.node));
        if (!directed) CHECK(g.has_edge(p.node, r.node));
      }
      if (c.replacement == Replacement::without) CHECK(seen.insert(p.node).second);
    }
    const auto again = run_chain(g, a, c);
    CHECK(again.participants.size() == s.participants.size());
    bool same = again.reseeds == s.reseeds;
    for (std::size_t i = 0; i < s.participants.size() && same; ++i)
      same = again.participants[i].node == s.participants[i].node &&
             again.participants[i].reported_degree == s.participants[i].reported_degree;
    CHECK(same);
  }
}

TEST_CASE("transition rows sum to one and stationary vectors match the degree law") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const auto g = test::random_connected(rng, 5 + trial, 0.15, trial % 2 == 1);
    for (auto mode : {RecruitmentMode::uniform, RecruitmentMode::weight_proportional}) {
      const TransitionMatrix p = transition_matrix(g, mode);
      for (Eigen::Index i = 0; i < p.rows(); ++i) CHECK(std::abs(p.row(i).sum() - 1.0) <= 1e-12);
    }
    const auto v = stationary_distribution(g, RecruitmentMode::uniform).probability;
    const double total = static_cast<double>(g.edge_count());
    for (NodeId u = 0; u < g.node_count(); ++u)
      CHECK(std::abs(v[u] - g.degree(u, DegreeMode::out) / total) <= 1e-9);
  }
}

TEST_CASE("estimator identities") {
  std::mt19937_64 rng(9);
  const auto g = test::random_connected(rng, 50, 0.1);
  const NodePartition a(g, "group", "A");
  const auto st = stationary_distribution(g, RecruitmentMode::uniform, 1e-14, 1000000, EdgeSemantics::reciprocal);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_sample(rng, g.node_count(), 1 + trial % 80);
    const double est = rds2_estimate(s, a);
    CHECK(std::abs(est + rds2_estimate(s, a.complement()) - 1.0) <= 1e-12);
    CHECK(est == doctest::Approx(test::naive_rds2(s, a)).epsilon(1e-13));
    CHECK(est >= 0.0);
    CHECK(est <= 1.0);

    for (int k : {2, 3, 7}) {
      auto scaled = s;
      for (auto& p : scaled.participants) p.reported_degree *= k;
      CHECK(rds2_estimate(scaled, a) == est);
    }

    auto truthful = s;
    for (auto& p : truthful.participants) p.reported_degree = static_cast<int>(g.degree(p.node, DegreeMode::reciprocal));
    CHECK(std::abs(eig_estimate(truthful, st, a) - rds2_estimate(truthful, a)) <= 1e-12);
  }
}

TEST_CASE("metrics are order independent and deterministic") {
  std::mt19937_64 rng(12);
  std::vector<EstimateSeries> series;
  std::uniform_real_distribution<double> u(0.2, 0.6);
  for (std::size_t i = 0; i < 500; ++i) series.push_back({i, {10, 20}, {u(rng), u(rng)}, {u(rng), u(rng)}, 0, 0});
  const auto t = compute_metrics(series, 0.4);
  auto shuffled = series;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto s = compute_metrics(shuffled, 0.4);
  REQUIRE(t.rows.size() == s.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.rows[i].ae == s.rows[i].ae);
    CHECK(t.rows[i].sd == s.rows[i].sd);
    CHECK(t.rows[i].mae == s.rows[i].mae);
    CHECK(t.rows[i].mae >= t.rows[i].bias - 1e-12);
    CHECK(std::abs(t.rows[i].bias - std::abs(t.rows[i].ae - 0.4)) <= 1e-12);
  }
}

TEST_CASE("transforms keep attributes and symmetric weights") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    GeneratorSpec spec;
    spec.node_count = 600;
    spec.attributes = {{"group", {{"A", 0.3, 0.3}, {"B", 0.7, std::nullopt}}},
                       {"age", {{"young", 0.5, std::nullopt}, {"old", 0.5, std::nullopt}}}};
    spec.rng_seed = seed;
    const auto g = generate(spec);
    const auto added = add_edges_preserving_homophily(g, 3.0, seed);
    CHECK(added.attributes().same_values(g.attributes()));
    const auto w = assign_edge_weights(g, LognormalWeights{0.5, 1.0, seed, "", "", 0.0}).graph;
    CHECK(w.attributes().same_values(g.attributes()));
    for (const auto& e : w.edges()) CHECK(*w.weight(e.dst, e.src) == e.weight);
    const auto d = make_directed_variant(g, 0.3, std::nullopt, seed);
    if (d.node_count() == g.node_count()) CHECK(d.attributes().same_values(g.attributes()));

    std::ostringstream e1, a1, e2, a2;
    write_graph(g, e1, a1);
    write_graph(generate(spec), e2, a2);
    CHECK(e1.str() == e2.str());
    CHECK(a1.str() == a2.str());

    std::istringstream ein(e1.str()), ain(a1.str());
    CHECK(read_graph(ein, ain) == g);
  }
}
