#pragma once

// Graph builders and slow reference implementations shared by the tests.

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rds/estimators.hpp"
#include "rds/graph.hpp"
#include "rds/sampler.hpp"

namespace rds::test {

inline NodeAttributes labelled(NodeId n, const std::vector<std::string>& group = {}) {
  NodeAttributes attrs(n);
  for (NodeId u = 0; u < n; ++u)
    attrs.set(u, "group", group.empty() ? (u % 2 ? "B" : "A") : group[static_cast<std::size_t>(u)]);
  return attrs;
}

/// Each pair becomes u->v and v->u.
inline AttributedGraph undirected(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& ties,
                                  const std::vector<std::string>& group = {}) {
  std::vector<Edge> edges;
  for (auto [u, v] : ties) {
    edges.push_back({u, v, 1.0});
    edges.push_back({v, u, 1.0});
  }
  return {labelled(n, group), std::move(edges)};
}

inline AttributedGraph directed(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& arcs,
                                const std::vector<std::string>& group = {}) {
  std::vector<Edge> edges;
  for (auto [u, v] : arcs) edges.push_back({u, v, 1.0});
  return {labelled(n, group), std::move(edges)};
}

inline AttributedGraph path_graph(NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> ties;
  for (NodeId u = 0; u + 1 < n; ++u) ties.emplace_back(u, u + 1);
  return undirected(n, ties);
}

inline AttributedGraph star_graph(NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> ties;
  for (NodeId u = 1; u < n; ++u) ties.emplace_back(0, u);
  return undirected(n, ties);
}

/// Connected undirected graph: random spanning tree plus extra ties, random weights when asked.
inline AttributedGraph random_connected(std::mt19937_64& rng, NodeId n, double extra_density,
                                        bool weighted = false) {
  std::set<std::pair<NodeId, NodeId>> ties;
  for (NodeId v = 1; v < n; ++v) {
    const NodeId u = std::uniform_int_distribution<NodeId>(0, v - 1)(rng);
    ties.emplace(u, v);
  }
  std::bernoulli_distribution extra(extra_density);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (extra(rng)) ties.emplace(u, v);
  std::uniform_real_distribution<double> w(0.5, 5.0);
  std::vector<Edge> edges;
  std::vector<std::string> group(static_cast<std::size_t>(n));
  for (auto& g : group) g = std::bernoulli_distribution(0.4)(rng) ? "A" : "B";
  group[0] = "A";
  if (n > 1) group[1] = "B";
  for (auto [u, v] : ties) {
    const double x = weighted ? w(rng) : 1.0;
    edges.push_back({u, v, x});
    edges.push_back({v, u, x});
  }
  return {labelled(n, group), std::move(edges)};
}

/// Strongly connected digraph: a random Hamiltonian cycle plus random arcs,
/// optionally with random asymmetric weights.
inline AttributedGraph random_strongly_connected(std::mt19937_64& rng, NodeId n, double density,
                                                 bool weighted = false) {
  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::set<std::pair<NodeId, NodeId>> arcs;
  for (std::size_t i = 0; i < order.size(); ++i) arcs.emplace(order[i], order[(i + 1) % order.size()]);
  std::bernoulli_distribution extra(density);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v && extra(rng)) arcs.emplace(u, v);
  std::uniform_real_distribution<double> w(0.5, 5.0);
  std::vector<Edge> edges;
  for (auto [u, v] : arcs) edges.push_back({u, v, weighted ? w(rng) : 1.0});
  return {labelled(n), std::move(edges)};
}

/// Stationary vector from a dense solve of (P^T - I) x = 0 with sum(x) = 1.
inline Eigen::VectorXd dense_stationary(const AttributedGraph& g, bool weighted,
                                        EdgeSemantics edges = EdgeSemantics::directed) {
  const Eigen::Index n = g.node_count();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = edges == EdgeSemantics::directed ? g.out_neighbors(u) : g.reciprocal_neighbors(u);
    const auto wt = edges == EdgeSemantics::directed ? g.out_weights(u) : g.reciprocal_weights(u);
    double total = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) total += weighted ? wt[k] : 1.0;
    for (std::size_t k = 0; k < nb.size(); ++k) p(u, nb[k]) += (weighted ? wt[k] : 1.0) / total;
  }
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b(n) = 1.0;
  return a.colPivHouseholderQr().solve(b);
}

/// Sample with (node, reported degree) pairs; recruiter links form a chain.
inline RecruitmentSample make_sample(const std::vector<std::pair<NodeId, int>>& entries) {
  RecruitmentSample s;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Participant p;
    p.node = entries[i].first;
    p.reported_degree = entries[i].second;
    p.recruiter_index = i == 0 ? kSeedRecruiter : static_cast<std::int64_t>(i - 1);
    p.recruiter = i == 0 ? -1 : entries[i - 1].first;
    p.wave = static_cast<int>(i);
    s.participants.push_back(p);
  }
  return s;
}

/// Inverse-degree weighted share in long double, plain loop.
inline double naive_rds2(const RecruitmentSample& s, const NodePartition& part) {
  long double num = 0, den = 0;
  for (const auto& p : s.participants) {
    const long double w = 1.0L / p.reported_degree;
    den += w;
    if (part.contains(p.node)) num += w;
  }
  return static_cast<double>(num / den);
}

/// H for the group from the full out-edge list.
inline double naive_homophily(const AttributedGraph& g, const NodePartition& part) {
  double in = 0, total = 0;
  for (const auto& e : g.edges()) {
    if (!part.contains(e.src)) continue;
    total += 1;
    if (part.contains(e.dst)) in += 1;
  }
  const double p = static_cast<double>(part.member_count()) / g.node_count();
  return (in / total - p) / (1 - p);
}

}  // namespace rds::test
