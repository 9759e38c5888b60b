#pragma once

// Synthetic attributed networks and the structural transforms applied to
// them: planted homophily, one-way edges, edge addition that keeps the
// mixing pattern, attribute-preserving rewiring, and tie weights.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rds/graph.hpp"

namespace rds {

/// p(k) proportional to k^-exponent on [min_degree, cutoff].
struct PowerLawDegrees {
  double exponent = 2.5;
  int min_degree = 1;
  int cutoff = 100;
};

/// p(k) = q (1-q)^(k-1), k >= 1, with q = 1/mean.
struct GeometricDegrees {
  double mean = 7.0;
};

struct ExplicitDegrees {
  std::vector<int> degrees;
};

using DegreeDistribution = std::variant<PowerLawDegrees, GeometricDegrees, ExplicitDegrees>;

struct CategoryTarget {
  std::string value;
  double proportion = 0.0;
  /// Planted homophily index for this category; nullopt leaves it free.
  std::optional<double> homophily;
};

struct AttributeSpec {
  std::string name;
  std::vector<CategoryTarget> categories;
};

struct GeneratorSpec {
  NodeId node_count = 1000;
  DegreeDistribution degrees = GeometricDegrees{};
  std::vector<AttributeSpec> attributes;
  std::uint64_t rng_seed = 1;
  /// Accepted |H_measured - H_target| on the final graph.
  double homophily_tolerance = 0.02;
  /// Rewiring passes (one pass = one proposal per edge) before giving up.
  int max_rewire_passes = 200;

  void validate() const;
};

class InfeasibleHomophilyError : public std::runtime_error {
 public:
  InfeasibleHomophilyError(const std::string& attribute, const std::string& what)
      : std::runtime_error(what), attribute_(attribute) {}
  const std::string& attribute() const { return attribute_; }

 private:
  std::string attribute_;
};

/// Undirected, connected attributed graph: erased configuration model,
/// attributes assigned by exact proportions, degree-preserving swaps until
/// every homophily target is met, then the giant reciprocal component.
/// node_count == 2 yields the single-edge graph without homophily rewiring.
AttributedGraph generate(const GeneratorSpec& spec);

/// Skews extra in-edges toward one attribute value: a target node in the
/// group is `factor` times as likely to receive a new one-way edge.
struct AttachmentBias {
  std::string attribute;
  std::string value;
  double factor = 1.0;
};

/// Adds one-way edges to a reciprocal core until `irreciprocal_fraction` of
/// all directed edges lack a reverse partner; restricted to the GSCC.
AttributedGraph make_directed_variant(const AttributedGraph& graph, double irreciprocal_fraction,
                                      const std::optional<AttachmentBias>& bias,
                                      std::uint64_t rng_seed);

/// Adds reciprocal ties raising the mean degree by `degree_increase`. Each
/// new tie copies the attribute profile pair of a uniformly drawn existing
/// tie and joins uniform members of those two profiles, so every
/// attribute's mixing proportions are kept in expectation.
AttributedGraph add_edges_preserving_homophily(const AttributedGraph& graph, double degree_increase,
                                               std::uint64_t rng_seed);

struct RewireResult {
  AttributedGraph graph;
  std::size_t skipped = 0;
};

/// Visits each reciprocal tie once and moves one endpoint (chosen by coin
/// flip) to a uniform node with the same profile over `attributes` (empty =
/// all attributes jointly). Keeps the giant reciprocal component, which must
/// retain at least `min_retained` of the nodes.
RewireResult rewire_preserving_attributes(const AttributedGraph& graph,
                                          const std::vector<std::string>& attributes,
                                          std::uint64_t rng_seed, double min_retained = 0.95);

struct LognormalWeights {
  double mu = 1.0;
  double sigma = 1.0;
  std::uint64_t rng_seed = 1;
  /// Optional shift of the log-mean per endpoint carrying attribute=value.
  std::string shift_attribute;
  std::string shift_value;
  double shift = 0.0;
};
struct MaxCombine {};
struct MinCombine {};
using WeightScheme = std::variant<LognormalWeights, MaxCombine, MinCombine>;

struct WeightResult {
  AttributedGraph graph;
  std::size_t clamped = 0;
};

/// Gives every reciprocal pair one symmetric weight, at least 1.
WeightResult assign_edge_weights(const AttributedGraph& graph, const WeightScheme& scheme);

}  // namespace rds
