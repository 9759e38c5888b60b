#include "rds/estimators.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace rds {

namespace {

template <typename WeightFn>
std::vector<double> weighted_curve(const RecruitmentSample& sample, const NodePartition& partition,
                                   std::span<const int> checkpoints, WeightFn weight_of) {
  const auto& ps = sample.participants;
  std::vector<double> out;
  out.reserve(checkpoints.size());
  CompensatedSum in_group, total;
  std::size_t consumed = 0;
  for (int c : checkpoints) {
    if (c < 1 || static_cast<std::size_t>(c) > ps.size())
      throw std::invalid_argument("checkpoint " + std::to_string(c) + " outside sample of size " +
                                  std::to_string(ps.size()));
    const auto upto = static_cast<std::size_t>(c);
    if (upto < consumed) throw std::invalid_argument("checkpoints must be ascending");
    for (; consumed < upto; ++consumed) {
      const double w = weight_of(ps[consumed]);
      total.add(w);
      if (partition.contains(ps[consumed].node)) in_group.add(w);
    }
    out.push_back(in_group.value() / total.value());
  }
  return out;
}

// Degrees are divided by their common factor first, so scaling every
// reported degree by a positive integer leaves the weights bit-identical.
struct InverseReportedDegree {
  int common = 1;

  InverseReportedDegree(const RecruitmentSample& sample, std::size_t upto) {
    int g = 0;
    for (std::size_t i = 0; i < upto && i < sample.participants.size(); ++i) {
      const auto& p = sample.participants[i];
      if (p.reported_degree < 1)
        throw std::invalid_argument("participant " + std::to_string(p.node) + " reports a degree below 1");
      g = std::gcd(g, p.reported_degree);
    }
    common = std::max(g, 1);
  }
  double operator()(const Participant& p) const {
    return 1.0 / static_cast<double>(p.reported_degree / common);
  }
};

struct InverseStationary {
  const StationaryVector* stationary;
  double operator()(const Participant& p) const {
    const auto& v = stationary->probability;
    if (p.node < 0 || p.node >= v.size())
      throw std::invalid_argument("stationary vector does not cover node " + std::to_string(p.node));
    const double mass = v[p.node];
    if (!(mass > 0.0))
      throw std::domain_error("sampled node " + std::to_string(p.node) +
                              " has zero stationary mass");
    return 1.0 / mass;
  }
};

void require_nonempty(const RecruitmentSample& sample) {
  if (sample.participants.empty()) throw std::invalid_argument("empty sample");
}

}  // namespace

double rds2_estimate(const RecruitmentSample& sample, const NodePartition& partition) {
  require_nonempty(sample);
  return rds2_estimate(sample, partition, sample.participants.size());
}

double rds2_estimate(const RecruitmentSample& sample, const NodePartition& partition,
                     std::size_t prefix) {
  require_nonempty(sample);
  const int c[] = {static_cast<int>(prefix)};
  return weighted_curve(sample, partition, c, InverseReportedDegree(sample, prefix)).front();
}

std::vector<double> rds2_curve(const RecruitmentSample& sample, const NodePartition& partition,
                               std::span<const int> checkpoints) {
  require_nonempty(sample);
  const std::size_t upto = checkpoints.empty() ? 0 : static_cast<std::size_t>(std::max(checkpoints.back(), 0));
  return weighted_curve(sample, partition, checkpoints, InverseReportedDegree(sample, upto));
}

double eig_estimate(const RecruitmentSample& sample, const StationaryVector& stationary,
                    const NodePartition& partition) {
  require_nonempty(sample);
  return eig_estimate(sample, stationary, partition, sample.participants.size());
}

double eig_estimate(const RecruitmentSample& sample, const StationaryVector& stationary,
                    const NodePartition& partition, std::size_t prefix) {
  require_nonempty(sample);
  const int c[] = {static_cast<int>(prefix)};
  return weighted_curve(sample, partition, c, InverseStationary{&stationary}).front();
}

std::vector<double> eig_curve(const RecruitmentSample& sample, const StationaryVector& stationary,
                              const NodePartition& partition, std::span<const int> checkpoints) {
  require_nonempty(sample);
  return weighted_curve(sample, partition, checkpoints, InverseStationary{&stationary});
}

// ---------------------------------------------------------------------------
// Markov chain

TransitionMatrix transition_matrix(const AttributedGraph& graph, RecruitmentMode mode,
                                   EdgeSemantics edges) {
  const NodeId n = graph.node_count();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(edges == EdgeSemantics::directed ? graph.edge_count()
                                                   : graph.reciprocal_edge_count());
  for (NodeId u = 0; u < n; ++u) {
    const auto targets = recruitment_neighbors(graph, u, edges);
    const auto weights = recruitment_weights(graph, u, edges);
    if (targets.empty())
      throw std::domain_error("node " + std::to_string(u) + " has no outgoing recruitment edge");
    double row_total = 0.0;
    if (mode == RecruitmentMode::weight_proportional)
      for (double w : weights) row_total += w;
    else
      row_total = static_cast<double>(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const double w = mode == RecruitmentMode::weight_proportional ? weights[k] : 1.0;
      entries.emplace_back(u, targets[k], w / row_total);
    }
  }
  TransitionMatrix p(n, n);
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

StationaryVector stationary_distribution(const AttributedGraph& graph, RecruitmentMode mode,
                                         double tolerance, std::size_t max_iters,
                                         EdgeSemantics edges) {
  const NodeId n = graph.node_count();
  if (n == 0) throw std::invalid_argument("stationary distribution of an empty graph");
  const AttributedGraph* chain = &graph;
  AttributedGraph reciprocal;
  if (edges == EdgeSemantics::reciprocal && !graph.all_reciprocal()) {
    reciprocal = reciprocal_subgraph(graph);
    chain = &reciprocal;
  }
  if (giant_strongly_connected_component(*chain).size() != static_cast<std::size_t>(n))
    throw std::domain_error("recruitment chain is not strongly connected");

  const TransitionMatrix p = transition_matrix(*chain, mode, EdgeSemantics::directed);
  const Eigen::SparseMatrix<double> pt = p.transpose();

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd next(n);
  // Below this the L1 step is rounding noise; stall there counts as converged.
  const double noise_floor = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::sqrt(double(n)));
  double best_step = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  std::size_t it = 0;
  bool converged = false;
  while (it < max_iters) {
    next.noalias() = pt * x;
    next = 0.5 * (next + x);
    next /= next.sum();
    const double step = (next - x).lpNorm<1>();
    x.swap(next);
    ++it;
    if (step <= tolerance) {
      converged = true;
      break;
    }
    if (step < best_step) {
      best_step = step;
      stalled = 0;
    } else if (step <= noise_floor && ++stalled >= 50) {
      converged = true;
      break;
    }
  }
  const double residual = (pt * x - x).lpNorm<1>();
  if (!converged)
    throw ConvergenceError("power iteration did not converge in " + std::to_string(max_iters) +
                               " iterations (residual " + std::to_string(residual) + ")",
                           residual);
  return {std::move(x), residual, it};
}

// ---------------------------------------------------------------------------
// homophily

namespace {

double homophily_from_membership(const AttributedGraph& graph, std::span<const char> in_group,
                                 const std::string& label) {
  const NodeId n = graph.node_count();
  if (n == 0) throw std::domain_error("homophily of an empty graph is undefined");
  std::size_t members = 0, endpoints = 0, same = 0;
  for (NodeId u = 0; u < n; ++u) {
    if (!in_group[static_cast<std::size_t>(u)]) continue;
    ++members;
    for (NodeId v : graph.out_neighbors(u)) {
      ++endpoints;
      if (in_group[static_cast<std::size_t>(v)]) ++same;
    }
  }
  const double share = static_cast<double>(members) / static_cast<double>(n);
  if (members == static_cast<std::size_t>(n))
    throw std::domain_error("homophily of " + label + " is undefined: the group covers every node");
  if (endpoints == 0)
    throw std::domain_error("homophily of " + label + " is undefined: the group has no edges");
  const double s = static_cast<double>(same) / static_cast<double>(endpoints);
  return (s - share) / (1.0 - share);
}

}  // namespace

double homophily_index(const AttributedGraph& graph, const NodePartition& partition) {
  if (partition.size() != static_cast<std::size_t>(graph.node_count()))
    throw std::invalid_argument("partition does not cover the graph");
  std::vector<char> member(partition.size());
  for (NodeId u = 0; u < graph.node_count(); ++u) member[static_cast<std::size_t>(u)] = partition.contains(u);
  return homophily_from_membership(graph, member, partition.attribute() + "=" + partition.value());
}

std::vector<double> homophily_by_category(const AttributedGraph& graph, std::size_t attribute) {
  const auto& attrs = graph.attributes();
  const auto codes = attrs.codes(attribute);
  std::vector<double> out;
  std::vector<char> member(codes.size());
  for (std::size_t c = 0; c < attrs.category_count(attribute); ++c) {
    for (std::size_t u = 0; u < codes.size(); ++u) member[u] = codes[u] == c;
    try {
      out.push_back(homophily_from_membership(graph, member, attrs.name(attribute)));
    } catch (const std::domain_error&) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

}  // namespace rds
