#pragma once

// Population-proportion estimators, the recruitment Markov chain and its
// stationary distribution, and the group homophily index.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rds/graph.hpp"
#include "rds/sampler.hpp"

namespace rds {

using TransitionMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct StationaryVector {
  Eigen::VectorXd probability;
  /// L1 norm of (P^T x - x) at the returned iterate.
  double residual = 0.0;
  std::size_t iterations = 0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Inverse-degree weighted proportion of group A in the sample, using the
/// reported degrees. Repeated participants count once per participation.
double rds2_estimate(const RecruitmentSample& sample, const NodePartition& partition);

/// Same estimator over the first `prefix` participants.
double rds2_estimate(const RecruitmentSample& sample, const NodePartition& partition,
                     std::size_t prefix);

/// Estimator of the whole curve: one value per checkpoint (prefix lengths).
std::vector<double> rds2_curve(const RecruitmentSample& sample, const NodePartition& partition,
                               std::span<const int> checkpoints);

/// Row-stochastic transition matrix of the recruitment walk.
/// Uniform: 1/d_out over out-edges. Weight-proportional: w_ij / sum_k w_ik.
TransitionMatrix transition_matrix(const AttributedGraph& graph, RecruitmentMode mode,
                                   EdgeSemantics edges = EdgeSemantics::directed);

/// Stationary distribution by power iteration on the lazy chain (I + P^T)/2,
/// which shares its fixed point with P^T and is aperiodic. Stops when the
/// L1 distance between successive iterates is at most `tolerance` (or has
/// reached the rounding floor). Requires a strongly connected chain.
StationaryVector stationary_distribution(const AttributedGraph& graph, RecruitmentMode mode,
                                         double tolerance = 1e-13, std::size_t max_iters = 1'000'000,
                                         EdgeSemantics edges = EdgeSemantics::directed);

/// Proportion of A weighting each participation by 1/v_i.
double eig_estimate(const RecruitmentSample& sample, const StationaryVector& stationary,
                    const NodePartition& partition);
double eig_estimate(const RecruitmentSample& sample, const StationaryVector& stationary,
                    const NodePartition& partition, std::size_t prefix);
std::vector<double> eig_curve(const RecruitmentSample& sample, const StationaryVector& stationary,
                              const NodePartition& partition, std::span<const int> checkpoints);

/// H_A = (S_AA - P_A) / (1 - P_A), where S_AA is the share of A members'
/// out-edge endpoints that land in A and P_A the node share of A.
/// Throws std::domain_error when P_A = 1 or A has no edges.
double homophily_index(const AttributedGraph& graph, const NodePartition& partition);

/// One H per category of `attribute` (that category vs. the rest). NaN marks
/// categories whose index is undefined.
std::vector<double> homophily_by_category(const AttributedGraph& graph, std::size_t attribute);

/// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace rds
