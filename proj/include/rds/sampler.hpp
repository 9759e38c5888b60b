#pragma once

// Simulation of a single respondent-driven recruitment chain.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rds/graph.hpp"

namespace rds {

using Rng = std::mt19937_64;

enum class SeedSelection { uniform, degree_proportional };
enum class Replacement { with, without };
enum class RecruitmentMode { uniform, weight_proportional };
enum class ChainDeathPolicy { fail, reseed };
/// Which ties carry coupons: reciprocal partners, or every out-edge.
enum class EdgeSemantics { reciprocal, directed };

/// A probability that depends on whether the node concerned is in group A.
struct GroupProbabilities {
  double in_group = 0.0;  // p   (node in A)
  double other = 0.0;     // p'  (node in complement)

  double for_member(bool in_a) const { return in_a ? in_group : other; }
  friend bool operator==(const GroupProbabilities&, const GroupProbabilities&) = default;
};

struct SamplingConfig {
  int seed_count = 1;
  SeedSelection seed_selection = SeedSelection::uniform;
  int coupons_per_participant = 1;
  Replacement replacement = Replacement::with;
  int target_sample_size = 500;
  /// Ascending sample sizes at which estimates are snapshot; empty means
  /// {target_sample_size}.
  std::vector<int> checkpoint_sizes;
  /// Probability that a recruiter ignores a tie, keyed by the peer's group.
  GroupProbabilities ignore_prob;
  /// Probability that an invited peer declines, keyed by the peer's group.
  GroupProbabilities reject_prob;
  RecruitmentMode recruitment_mode = RecruitmentMode::uniform;
  ChainDeathPolicy on_chain_death = ChainDeathPolicy::reseed;
  EdgeSemantics edges = EdgeSemantics::reciprocal;
  std::uint64_t rng_seed = 1;

  /// Checkpoints with the empty-list default resolved.
  std::vector<int> checkpoints() const;
  /// Throws std::invalid_argument naming the first violated invariant.
  void validate(NodeId node_count) const;
};

inline constexpr std::int64_t kSeedRecruiter = -1;

struct Participant {
  NodeId node = 0;
  /// Index of the recruiter's entry in the participant list, or kSeedRecruiter.
  std::int64_t recruiter_index = kSeedRecruiter;
  NodeId recruiter = -1;
  int wave = 0;
  int reported_degree = 1;
  /// Mirrors the ignore set being total: the participant recruits nobody.
  bool all_ties_ignored = false;
};

struct RecruitmentSample {
  std::vector<Participant> participants;
  std::size_t chain_deaths = 0;
  std::size_t reseeds = 0;
  std::size_t rejected_coupons = 0;
  std::size_t unusable_coupons = 0;  // holder had no eligible peer
};

class ChainDeathError : public std::runtime_error {
 public:
  ChainDeathError(const std::string& what, std::size_t recruited)
      : std::runtime_error(what), recruited_(recruited) {}
  std::size_t recruited() const { return recruited_; }

 private:
  std::size_t recruited_;
};

/// Neighbour list used for recruitment under the given semantics.
std::span<const NodeId> recruitment_neighbors(const AttributedGraph& graph, NodeId u,
                                              EdgeSemantics edges);
std::span<const double> recruitment_weights(const AttributedGraph& graph, NodeId u,
                                            EdgeSemantics edges);

/// Draws distinct seeds. Degree-proportional mode draws successively with
/// probability proportional to the recruitment degree among nodes not yet
/// taken. `excluded` (may be empty) marks nodes that cannot be chosen.
class SeedSelector {
 public:
  SeedSelector(const AttributedGraph& graph, SeedSelection mode, EdgeSemantics edges);

  std::vector<NodeId> select(std::size_t count, Rng& rng, std::span<const char> excluded = {}) const;

 private:
  const AttributedGraph* graph_;
  SeedSelection mode_;
  std::vector<double> cumulative_;  // degree-proportional only
};

std::vector<NodeId> select_seeds(const AttributedGraph& graph, std::size_t count,
                                 SeedSelection mode, Rng& rng,
                                 EdgeSemantics edges = EdgeSemantics::reciprocal);

/// Flags aligned with recruitment_neighbors(participant); true = ignored.
/// Each tie is ignored independently with the probability of the far peer's group.
std::vector<char> draw_ignore_set(const AttributedGraph& graph, const NodePartition& partition,
                                  NodeId participant, const GroupProbabilities& ignore_prob,
                                  Rng& rng, EdgeSemantics edges = EdgeSemantics::reciprocal);

/// Recruitment degree minus ignored ties, never below 1.
int reported_degree(const AttributedGraph& graph, NodeId participant,
                    std::span<const char> ignore_set,
                    EdgeSemantics edges = EdgeSemantics::reciprocal);

RecruitmentSample run_chain(const AttributedGraph& graph, const NodePartition& partition,
                            const SamplingConfig& config, Rng& rng);

/// Seeds a fresh engine from config.rng_seed.
RecruitmentSample run_chain(const AttributedGraph& graph, const NodePartition& partition,
                            const SamplingConfig& config);

/// Independent stream for replication `index` of a run with `master_seed`.
Rng replication_rng(std::uint64_t master_seed, std::uint64_t index);

}  // namespace rds
