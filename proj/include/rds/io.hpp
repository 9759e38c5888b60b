#pragma once

// Plain-text file formats: graph TSV pair, stationary-vector TSV,
// recruitment-sample TSV, metrics CSV with a JSON metadata sidecar.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rds/estimators.hpp"
#include "rds/experiments.hpp"
#include "rds/graph.hpp"
#include "rds/sampler.hpp"

namespace rds {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Edge file: "src<TAB>dst[<TAB>weight]" per directed edge (weight defaults
/// to 1). Attribute file: "node<TAB>name=value[,name=value...]"; it defines
/// the node set, which must be exactly 0..N-1. '#' starts a comment line.
AttributedGraph load_graph(const std::filesystem::path& edge_path,
                           const std::filesystem::path& attribute_path);
AttributedGraph read_graph(std::istream& edges, std::istream& attributes,
                           const std::string& edge_source = "edges",
                           const std::string& attribute_source = "attributes");

void save_graph(const AttributedGraph& graph, const std::filesystem::path& edge_path,
                const std::filesystem::path& attribute_path);
void write_graph(const AttributedGraph& graph, std::ostream& edges, std::ostream& attributes);

/// "<prefix>.edges.tsv" / "<prefix>.attrs.tsv".
std::pair<std::filesystem::path, std::filesystem::path> graph_paths(const std::filesystem::path& prefix);

/// "node<TAB>probability" with round-trip precision.
void write_stationary(const StationaryVector& stationary, std::ostream& out);

void write_sample(const RecruitmentSample& sample, const NodePartition& partition, std::ostream& out);

/// Reals at 6 significant digits.
std::string format_real(double x);

struct RunMetadata {
  std::string config_hash;
  std::uint64_t master_seed = 0;
  /// Ordered key/value notes written after the standard flags.
  std::vector<std::pair<std::string, std::string>> notes;
};

inline constexpr const char* kCurveHeader = "checkpoint,estimator,AE,bias,SD,MAE,m,p_star";
inline constexpr const char* kGridHeader = "axis1,axis2,estimator,AE,bias,SD,MAE,m,p_star";

void write_metrics(const MetricsTable& table, std::ostream& out);
void write_grid(const GridTable& table, std::ostream& out);
/// Writes the CSV and "<path>.meta.json"; throws std::runtime_error if unwritable.
void write_metrics(const MetricsTable& table, const std::filesystem::path& path, const RunMetadata& meta);
void write_grid(const GridTable& table, const std::filesystem::path& path, const RunMetadata& meta);

MetricsTable read_metrics(std::istream& in);

std::string metadata_json(const RunMetadata& meta);

}  // namespace rds
