#pragma once

// Line-oriented experiment configuration:
//
//   # comment
//   [section]
//   key = value
//
// Sections: generator, attribute <name> (repeatable), graph, transform,
// partition, sampling, experiment, grid. Unknown sections and keys are
// errors. See README.md for every key.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rds/experiments.hpp"
#include "rds/netgen.hpp"
#include "rds/sampler.hpp"

namespace rds {

class ConfigFile {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };
  struct Section {
    std::string name;
    std::size_t line = 0;
    std::vector<std::pair<std::string, Entry>> entries;

    const Entry* find(const std::string& key) const;
  };

  static ConfigFile parse(const std::string& text, const std::string& source = "config");
  static ConfigFile load(const std::filesystem::path& path);

  const std::vector<Section>& sections() const { return sections_; }
  const Section* find(const std::string& name) const;
  const std::string& source() const { return source_; }

  /// Sections and keys in file order, whitespace-normalized.
  std::string canonical() const;
  /// 64-bit FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;

 private:
  std::string source_;
  std::vector<Section> sections_;
};

struct AddEdgesStep {
  double degree_increase = 20.0;
};
struct RewireStep {
  std::vector<std::string> attributes;
};
struct WeightStep {
  WeightScheme scheme;
};
struct DirectedVariantStep {
  double irreciprocal_fraction = 0.5;
  std::optional<AttachmentBias> bias;
};
using TransformStep = std::variant<AddEdgesStep, RewireStep, WeightStep, DirectedVariantStep>;

/// Applies one transform; `seed` feeds its randomness.
AttributedGraph apply_transform(const AttributedGraph& graph, const TransformStep& step, std::uint64_t seed);

struct ExperimentConfig {
  std::optional<GeneratorSpec> generator;
  std::optional<std::filesystem::path> graph_prefix;
  bool restrict_to_giant = true;

  std::vector<TransformStep> transforms;
  std::uint64_t transform_seed = 1;

  std::string partition_attribute;
  std::string partition_value;

  SamplingConfig sampling;
  std::vector<Estimator> estimators{Estimator::rds2};
  std::size_t replications = 1000;
  unsigned threads = 0;
  double stationary_tolerance = 1e-13;

  std::optional<GridAxis> grid_axis1;
  std::optional<GridAxis> grid_axis2;

  std::filesystem::path output_dir = "results";
  std::uint64_t master_seed = 1;

  std::string config_hash;

  bool uses(Estimator e) const;
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Relative paths in [graph] resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const ConfigFile& file,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Builds or loads the graph, then applies the transforms in order.
AttributedGraph prepare_graph(const ExperimentConfig& config);

/// Throws std::invalid_argument if the partition attribute or value is unknown.
NodePartition make_partition(const AttributedGraph& graph, const ExperimentConfig& config);

}  // namespace rds
