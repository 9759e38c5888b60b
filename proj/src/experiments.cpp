#include "rds/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace rds {

const char* to_string(Estimator e) { return e == Estimator::rds2 ? "rds2" : "eig"; }

namespace {

EstimateSeries one_replication(const AttributedGraph& graph, const NodePartition& partition,
                               const SamplingConfig& config, std::span<const int> checkpoints,
                               const StationaryVector* stationary, std::size_t index) {
  Rng rng = replication_rng(config.rng_seed, index);
  const RecruitmentSample sample = run_chain(graph, partition, config, rng);
  EstimateSeries s;
  s.replication = index;
  s.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  s.rds2 = rds2_curve(sample, partition, checkpoints);
  if (stationary) s.eig = eig_curve(sample, *stationary, partition, checkpoints);
  s.chain_deaths = sample.chain_deaths;
  s.reseeds = sample.reseeds;
  return s;
}

}  // namespace

std::vector<EstimateSeries> run_replications(const AttributedGraph& graph, const NodePartition& partition,
                                             const SamplingConfig& config, std::size_t replications,
                                             const ReplicationOptions& options) {
  config.validate(graph.node_count());
  if (options.stationary &&
      options.stationary->probability.size() != static_cast<Eigen::Index>(graph.node_count()))
    throw std::invalid_argument("stationary vector size differs from node count");
  const std::vector<int> checkpoints = config.checkpoints();

  std::vector<EstimateSeries> out(replications);
  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(replications, 1)));

  std::atomic<std::size_t> next{0};
  std::mutex failure_lock;
  std::size_t failed_at = replications;
  std::exception_ptr failure;

  auto work = [&] {
    for (std::size_t i = next++; i < replications; i = next++) {
      try {
        out[i] = one_replication(graph, partition, config, checkpoints, options.stationary, i);
      } catch (...) {
        // Report the lowest failing index so the error is schedule-independent.
        std::lock_guard lock(failure_lock);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

MetricsRow summarize(std::span<const double> values, double p_star, int checkpoint, Estimator e) {
  if (values.empty()) throw std::invalid_argument("no estimates to summarize");
  // Fixed summation order: results do not depend on replication order.
  std::vector<double> estimates(values.begin(), values.end());
  std::sort(estimates.begin(), estimates.end());
  const auto m = static_cast<double>(estimates.size());
  double sum = 0.0, signed_error = 0.0, abs_error = 0.0;
  for (double x : estimates) {
    sum += x;
    signed_error += x - p_star;
    abs_error += std::abs(x - p_star);
  }
  const double ae = sum / m;
  double sq = 0.0;
  for (double x : estimates) sq += (x - ae) * (x - ae);
  MetricsRow row;
  row.checkpoint = checkpoint;
  row.estimator = e;
  row.ae = ae;
  row.bias = std::abs(signed_error) / m;
  row.sd = std::sqrt(sq / m);
  row.mae = abs_error / m;
  row.m = estimates.size();
  row.p_star = p_star;
  return row;
}

MetricsTable compute_metrics(std::span<const EstimateSeries> series, double p_star) {
  if (series.empty()) throw std::invalid_argument("no replications to aggregate");
  const auto& checkpoints = series.front().checkpoints;
  const bool with_eig = !series.front().eig.empty();
  for (const auto& s : series) {
    if (s.checkpoints != checkpoints) throw std::invalid_argument("replications use different checkpoints");
    if (s.rds2.size() != checkpoints.size() || (with_eig && s.eig.size() != checkpoints.size()) ||
        (!with_eig && !s.eig.empty()))
      throw std::invalid_argument("replication estimates do not match checkpoints");
  }
  MetricsTable table;
  std::vector<double> column(series.size());
  for (std::size_t j = 0; j < checkpoints.size(); ++j) {
    for (Estimator e : {Estimator::rds2, Estimator::eig}) {
      if (e == Estimator::eig && !with_eig) continue;
      for (std::size_t i = 0; i < series.size(); ++i) column[i] = series[i].values(e)[j];
      table.rows.push_back(summarize(column, p_star, checkpoints[j], e));
    }
  }
  return table;
}

const MetricsRow& MetricsTable::at(int checkpoint, Estimator e) const {
  for (const auto& r : rows)
    if (r.checkpoint == checkpoint && r.estimator == e) return r;
  throw std::out_of_range("no metrics row for checkpoint " + std::to_string(checkpoint) + " / " + to_string(e));
}

// ---------------------------------------------------------------------------
// grids

namespace {

double parse_probability(const std::string& v) {
  std::size_t used = 0;
  const double p = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("bad number '" + v + "'");
  return p;
}

int parse_count(const std::string& v) {
  std::size_t used = 0;
  const int k = std::stoi(v, &used);
  if (used != v.size()) throw std::invalid_argument("bad integer '" + v + "'");
  return k;
}

}  // namespace

void apply_axis(SamplingConfig& config, const std::string& name, const std::string& value) {
  static const std::vector<std::string> known = {
      "p_i", "p'_i", "p_r", "p'_r", "ignore_prob", "reject_prob",
      "seed_count", "coupons_per_participant", "seed_selection", "replacement"};
  if (std::find(known.begin(), known.end(), name) == known.end())
    throw std::invalid_argument("unknown grid axis '" + name + "'");
  try {
    if (name == "p_i") config.ignore_prob.in_group = parse_probability(value);
    else if (name == "p'_i") config.ignore_prob.other = parse_probability(value);
    else if (name == "p_r") config.reject_prob.in_group = parse_probability(value);
    else if (name == "p'_r") config.reject_prob.other = parse_probability(value);
    else if (name == "ignore_prob") config.ignore_prob.in_group = config.ignore_prob.other = parse_probability(value);
    else if (name == "reject_prob") config.reject_prob.in_group = config.reject_prob.other = parse_probability(value);
    else if (name == "seed_count") config.seed_count = parse_count(value);
    else if (name == "coupons_per_participant") config.coupons_per_participant = parse_count(value);
    else if (name == "seed_selection") {
      if (value == "uniform") config.seed_selection = SeedSelection::uniform;
      else if (value == "degree-proportional") config.seed_selection = SeedSelection::degree_proportional;
      else throw std::invalid_argument(value);
    } else {
      if (value == "with") config.replacement = Replacement::with;
      else if (value == "without") config.replacement = Replacement::without;
      else throw std::invalid_argument(value);
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("grid axis '" + name + "': cannot use value '" + value + "'");
  }
}

const GridCell& GridTable::at(const std::string& v1, const std::string& v2) const {
  for (const auto& c : cells)
    if (c.value1 == v1 && c.value2 == v2) return c;
  throw std::out_of_range("no grid cell (" + v1 + ", " + v2 + ")");
}

GridTable grid_experiment(const AttributedGraph& graph, const NodePartition& partition,
                          const SamplingConfig& base, const GridAxis& axis1, const GridAxis& axis2,
                          std::size_t replications, const ReplicationOptions& options) {
  if (axis1.values.empty() || axis2.values.empty()) throw std::invalid_argument("grid axes need values");
  // Validate names before spending any time on simulation.
  {
    SamplingConfig probe = base;
    apply_axis(probe, axis1.name, axis1.values.front());
    apply_axis(probe, axis2.name, axis2.values.front());
  }
  const double p_star = true_proportion(graph, partition);
  GridTable table{axis1.name, axis2.name, {}};
  for (const auto& v1 : axis1.values) {
    for (const auto& v2 : axis2.values) {
      SamplingConfig cell = base;
      apply_axis(cell, axis1.name, v1);
      apply_axis(cell, axis2.name, v2);
      cell.checkpoint_sizes = {cell.target_sample_size};
      const auto series = run_replications(graph, partition, cell, replications, options);
      table.cells.push_back({v1, v2, compute_metrics(series, p_star).rows});
    }
  }
  return table;
}

}  // namespace rds
