#include "rds/sampler.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <string>

namespace rds {

namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

bool happens(Rng& rng, double p) { return p > 0.0 && (p >= 1.0 || uniform01(rng) < p); }

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

}  // namespace

std::vector<int> SamplingConfig::checkpoints() const {
  if (checkpoint_sizes.empty()) return {target_sample_size};
  return checkpoint_sizes;
}

void SamplingConfig::validate(NodeId node_count) const {
  if (seed_count < 1) throw std::invalid_argument("seed_count must be positive");
  if (seed_count > node_count) throw std::invalid_argument("seed_count exceeds node count");
  if (coupons_per_participant < 1)
    throw std::invalid_argument("coupons_per_participant must be positive");
  if (target_sample_size < 1) throw std::invalid_argument("target_sample_size must be positive");
  int previous = 0;
  for (int c : checkpoint_sizes) {
    if (c < 1) throw std::invalid_argument("checkpoints must be positive");
    if (c <= previous) throw std::invalid_argument("checkpoints must be strictly ascending");
    if (c > target_sample_size)
      throw std::invalid_argument("checkpoint " + std::to_string(c) + " exceeds target sample size");
    previous = c;
  }
  check_probability(ignore_prob.in_group, "p_i");
  check_probability(ignore_prob.other, "p'_i");
  check_probability(reject_prob.in_group, "p_r");
  check_probability(reject_prob.other, "p'_r");
}

std::span<const NodeId> recruitment_neighbors(const AttributedGraph& graph, NodeId u,
                                              EdgeSemantics edges) {
  return edges == EdgeSemantics::reciprocal ? graph.reciprocal_neighbors(u)
                                            : graph.out_neighbors(u);
}

std::span<const double> recruitment_weights(const AttributedGraph& graph, NodeId u,
                                            EdgeSemantics edges) {
  return edges == EdgeSemantics::reciprocal ? graph.reciprocal_weights(u) : graph.out_weights(u);
}

// ---------------------------------------------------------------------------
// seeds

SeedSelector::SeedSelector(const AttributedGraph& graph, SeedSelection mode, EdgeSemantics edges)
    : graph_(&graph), mode_(mode) {
  if (mode_ == SeedSelection::degree_proportional) {
    cumulative_.resize(static_cast<std::size_t>(graph.node_count()));
    double total = 0.0;
    for (NodeId u = 0; u < graph.node_count(); ++u) {
      total += static_cast<double>(recruitment_neighbors(graph, u, edges).size());
      cumulative_[static_cast<std::size_t>(u)] = total;
    }
  }
}

std::vector<NodeId> SeedSelector::select(std::size_t count, Rng& rng,
                                         std::span<const char> excluded) const {
  const auto n = static_cast<std::size_t>(graph_->node_count());
  const bool weighted = mode_ == SeedSelection::degree_proportional;
  auto weight_of = [&](std::size_t u) {
    if (!weighted) return 1.0;
    return cumulative_[u] - (u == 0 ? 0.0 : cumulative_[u - 1]);
  };
  auto blocked = [&](std::size_t u) { return !excluded.empty() && excluded[u]; };

  std::size_t available = 0;
  for (std::size_t u = 0; u < n; ++u)
    if (!blocked(u) && weight_of(u) > 0.0) ++available;
  if (count > available)
    throw std::invalid_argument("cannot select " + std::to_string(count) + " seeds from " +
                                std::to_string(available) + " eligible nodes");

  std::vector<NodeId> chosen;
  chosen.reserve(count);
  std::vector<char> taken(n, 0);

  // Rejection from the full distribution yields the exact successive
  // (without-replacement) law; fall back to an explicit table once
  // rejections pile up.
  constexpr int kMaxRejections = 64;
  while (chosen.size() < count) {
    std::size_t pick = n;
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
      std::size_t u;
      if (weighted) {
        const double r = uniform01(rng) * cumulative_.back();
        u = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), r) -
                                     cumulative_.begin());
        if (u >= n) u = n - 1;
      } else {
        u = uniform_index(rng, n);
      }
      if (!taken[u] && !blocked(u) && weight_of(u) > 0.0) {
        pick = u;
        break;
      }
    }
    if (pick == n) {
      std::vector<std::size_t> candidates;
      std::vector<double> cum;
      double total = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        if (taken[u] || blocked(u) || weight_of(u) <= 0.0) continue;
        total += weight_of(u);
        candidates.push_back(u);
        cum.push_back(total);
      }
      const double r = uniform01(rng) * total;
      auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
      pick = candidates[std::min(k, candidates.size() - 1)];
    }
    taken[pick] = 1;
    chosen.push_back(static_cast<NodeId>(pick));
  }
  return chosen;
}

std::vector<NodeId> select_seeds(const AttributedGraph& graph, std::size_t count,
                                 SeedSelection mode, Rng& rng, EdgeSemantics edges) {
  if (count > static_cast<std::size_t>(graph.node_count()))
    throw std::invalid_argument("seed count exceeds node count");
  return SeedSelector(graph, mode, edges).select(count, rng);
}

// ---------------------------------------------------------------------------
// ignoring and reporting

std::vector<char> draw_ignore_set(const AttributedGraph& graph, const NodePartition& partition,
                                  NodeId participant, const GroupProbabilities& ignore_prob,
                                  Rng& rng, EdgeSemantics edges) {
  const auto peers = recruitment_neighbors(graph, participant, edges);
  std::vector<char> ignored(peers.size(), 0);
  if (ignore_prob.in_group <= 0.0 && ignore_prob.other <= 0.0) return ignored;
  for (std::size_t k = 0; k < peers.size(); ++k)
    ignored[k] = happens(rng, ignore_prob.for_member(partition.contains(peers[k]))) ? 1 : 0;
  return ignored;
}

int reported_degree(const AttributedGraph& graph, NodeId participant,
                    std::span<const char> ignore_set, EdgeSemantics edges) {
  const auto degree = static_cast<std::ptrdiff_t>(recruitment_neighbors(graph, participant, edges).size());
  const auto ignored = std::count(ignore_set.begin(), ignore_set.end(), char{1});
  return static_cast<int>(std::max<std::ptrdiff_t>(1, degree - ignored));
}

// ---------------------------------------------------------------------------
// chain

RecruitmentSample run_chain(const AttributedGraph& graph, const NodePartition& partition,
                            const SamplingConfig& config, Rng& rng) {
  config.validate(graph.node_count());
  if (partition.size() != static_cast<std::size_t>(graph.node_count()))
    throw std::invalid_argument("partition does not cover the graph");

  const EdgeSemantics edges = config.edges;
  const bool without = config.replacement == Replacement::without;
  const bool weighted = config.recruitment_mode == RecruitmentMode::weight_proportional;
  const auto target = static_cast<std::size_t>(config.target_sample_size);

  RecruitmentSample sample;
  sample.participants.reserve(target);
  std::vector<std::vector<char>> ignore_sets;
  ignore_sets.reserve(target);
  std::vector<char> sampled(without ? static_cast<std::size_t>(graph.node_count()) : 0, 0);
  std::deque<std::size_t> coupons;
  const SeedSelector seeds(graph, config.seed_selection, edges);

  auto join = [&](NodeId node, std::int64_t recruiter_index) {
    auto ignored = draw_ignore_set(graph, partition, node, config.ignore_prob, rng, edges);
    Participant p;
    p.node = node;
    p.recruiter_index = recruiter_index;
    if (recruiter_index != kSeedRecruiter) {
      const auto& r = sample.participants[static_cast<std::size_t>(recruiter_index)];
      p.recruiter = r.node;
      p.wave = r.wave + 1;
    }
    p.reported_degree = reported_degree(graph, node, ignored, edges);
    p.all_ties_ignored =
        std::count(ignored.begin(), ignored.end(), char{1}) == static_cast<std::ptrdiff_t>(ignored.size());
    const std::size_t index = sample.participants.size();
    sample.participants.push_back(p);
    ignore_sets.push_back(std::move(ignored));
    if (without) sampled[static_cast<std::size_t>(node)] = 1;
    for (int c = 0; c < config.coupons_per_participant; ++c) coupons.push_back(index);
  };

  const auto initial = std::min<std::size_t>(static_cast<std::size_t>(config.seed_count), target);
  for (NodeId s : seeds.select(initial, rng)) join(s, kSeedRecruiter);

  std::vector<double> cumulative;
  while (sample.participants.size() < target) {
    if (coupons.empty()) {
      ++sample.chain_deaths;
      const std::size_t have = sample.participants.size();
      if (config.on_chain_death == ChainDeathPolicy::fail)
        throw ChainDeathError("recruitment chain died after " + std::to_string(have) +
                                  " of " + std::to_string(target) + " participants",
                              have);
      std::vector<NodeId> fresh;
      try {
        fresh = seeds.select(1, rng, sampled);
      } catch (const std::invalid_argument&) {
        throw ChainDeathError("recruitment chain died after " + std::to_string(have) +
                                  " participants and no node is left to reseed from",
                              have);
      }
      ++sample.reseeds;
      join(fresh.front(), kSeedRecruiter);
      continue;
    }

    const std::size_t holder = coupons.front();
    coupons.pop_front();
    const NodeId holder_node = sample.participants[holder].node;
    const auto peers = recruitment_neighbors(graph, holder_node, edges);
    const auto weights = recruitment_weights(graph, holder_node, edges);
    const auto& ignored = ignore_sets[holder];
    auto eligible = [&](std::size_t k) {
      return !ignored[k] && !(without && sampled[static_cast<std::size_t>(peers[k])]);
    };

    std::size_t chosen = peers.size();
    if (!weighted && !without && std::none_of(ignored.begin(), ignored.end(), [](char c) { return c; })) {
      if (!peers.empty()) chosen = uniform_index(rng, peers.size());
    } else {
      cumulative.clear();
      double total = 0.0;
      for (std::size_t k = 0; k < peers.size(); ++k) {
        if (eligible(k)) total += weighted ? weights[k] : 1.0;
        cumulative.push_back(total);
      }
      if (total > 0.0) {
        const double r = uniform01(rng) * total;
        chosen = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin());
        // r == total can only come from rounding; take the last eligible peer.
        if (chosen >= peers.size()) {
          chosen = peers.size() - 1;
          while (!eligible(chosen)) --chosen;
        }
      }
    }
    if (chosen >= peers.size()) {
      ++sample.unusable_coupons;
      continue;
    }
    const NodeId peer = peers[chosen];
    if (happens(rng, config.reject_prob.for_member(partition.contains(peer)))) {
      ++sample.rejected_coupons;
      continue;
    }
    join(peer, static_cast<std::int64_t>(holder));
  }
  return sample;
}

RecruitmentSample run_chain(const AttributedGraph& graph, const NodePartition& partition,
                            const SamplingConfig& config) {
  Rng rng(config.rng_seed);
  return run_chain(graph, partition, config, rng);
}

Rng replication_rng(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace rds
