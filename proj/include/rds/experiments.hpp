#pragma once

// Replicated chains, checkpoint snapshots, and the AE / Bias / SD / MAE
// aggregates over replications or over a two-axis parameter grid.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rds/estimators.hpp"
#include "rds/graph.hpp"
#include "rds/sampler.hpp"

namespace rds {

enum class Estimator { rds2, eig };

const char* to_string(Estimator e);

struct EstimateSeries {
  std::size_t replication = 0;
  std::vector<int> checkpoints;
  std::vector<double> rds2;
  std::vector<double> eig;  // empty unless a stationary vector was supplied
  std::size_t chain_deaths = 0;
  std::size_t reseeds = 0;

  const std::vector<double>& values(Estimator e) const { return e == Estimator::rds2 ? rds2 : eig; }
};

struct ReplicationOptions {
  /// Enables the eig estimator.
  const StationaryVector* stationary = nullptr;
  /// Worker threads; 0 picks hardware concurrency.
  unsigned threads = 0;
};

/// Runs `replications` independent chains. Replication i draws from
/// replication_rng(config.rng_seed, i); output order and values do not
/// depend on the thread schedule. Chain-death errors propagate.
std::vector<EstimateSeries> run_replications(const AttributedGraph& graph, const NodePartition& partition,
                                             const SamplingConfig& config, std::size_t replications,
                                             const ReplicationOptions& options = {});

struct MetricsRow {
  int checkpoint = 0;
  Estimator estimator = Estimator::rds2;
  double ae = 0.0;
  double bias = 0.0;
  double sd = 0.0;  // population convention (divide by m)
  double mae = 0.0;
  std::size_t m = 0;
  double p_star = 0.0;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;

  /// Row for (checkpoint, estimator); throws if absent.
  const MetricsRow& at(int checkpoint, Estimator e) const;
};

/// One row per checkpoint and available estimator.
MetricsTable compute_metrics(std::span<const EstimateSeries> series, double p_star);

/// Metrics of raw estimates for one checkpoint.
MetricsRow summarize(std::span<const double> estimates, double p_star, int checkpoint, Estimator e);

struct GridAxis {
  /// One of: p_i, p'_i, p_r, p'_r, ignore_prob (both groups), reject_prob
  /// (both groups), seed_count, coupons_per_participant, seed_selection,
  /// replacement.
  std::string name;
  std::vector<std::string> values;
};

/// Sets one axis value on a config; throws std::invalid_argument for an
/// unknown axis or unparsable value.
void apply_axis(SamplingConfig& config, const std::string& name, const std::string& value);

struct GridCell {
  std::string value1;
  std::string value2;
  std::vector<MetricsRow> rows;  // one per estimator
};

struct GridTable {
  std::string axis1;
  std::string axis2;
  std::vector<GridCell> cells;  // row-major over (axis1, axis2)

  const GridCell& at(const std::string& v1, const std::string& v2) const;
};

/// Every cell runs `replications` chains at the base config with both axis
/// values applied, measured at target_sample_size.
GridTable grid_experiment(const AttributedGraph& graph, const NodePartition& partition,
                          const SamplingConfig& base, const GridAxis& axis1, const GridAxis& axis2,
                          std::size_t replications, const ReplicationOptions& options = {});

}  // namespace rds
