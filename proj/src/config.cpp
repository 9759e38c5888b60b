#include "rds/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rds/io.hpp"

namespace rds {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const ConfigFile::Entry* ConfigFile::Section::find(const std::string& key) const {
  for (const auto& [k, e] : entries)
    if (k == key) return &e;
  return nullptr;
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& source) {
  ConfigFile file;
  file.source_ = source;
  std::stringstream in(text);
  std::string raw;
  for (std::size_t no = 1; std::getline(in, raw); ++no) {
    // '#' starts a comment anywhere on the line.
    const std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source, no, "unterminated section header");
      std::string name;
      std::stringstream words(line.substr(1, line.size() - 2));
      for (std::string w; words >> w;) name += (name.empty() ? "" : " ") + w;
      if (name.empty()) throw ParseError(source, no, "empty section name");
      for (const auto& s : file.sections_)
        if (s.name == name) throw ParseError(source, no, "section [" + name + "] repeated");
      file.sections_.push_back({name, no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, no, "expected 'key = value'");
    if (file.sections_.empty()) throw ParseError(source, no, "key outside a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError(source, no, "empty key");
    auto& section = file.sections_.back();
    if (section.find(key)) throw ParseError(source, no, "key '" + key + "' repeated");
    section.entries.push_back({key, {value, no}});
  }
  return file;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) { return parse(read_text(path), path.string()); }

const ConfigFile::Section* ConfigFile::find(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

std::string ConfigFile::canonical() const {
  std::string out;
  for (const auto& s : sections_) {
    out += "[" + s.name + "]\n";
    for (const auto& [k, e] : s.entries) out += k + " = " + e.value + "\n";
  }
  return out;
}

std::string ConfigFile::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// typed access

namespace {

class SectionReader {
 public:
  SectionReader(const ConfigFile& file, const ConfigFile::Section& section, std::set<std::string> allowed)
      : file_(file), section_(section) {
    for (const auto& [k, e] : section.entries)
      if (!allowed.count(k)) fail(e.line, "unknown key '" + k + "' in [" + section.name + "]");
  }

  bool has(const std::string& key) const { return section_.find(key) != nullptr; }

  std::optional<std::string> text(const std::string& key) const {
    const auto* e = section_.find(key);
    if (!e) return std::nullopt;
    return e->value;
  }

  template <typename T>
  std::optional<T> number(const std::string& key) const {
    const auto* e = section_.find(key);
    if (!e) return std::nullopt;
    T v{};
    const auto* end = e->value.data() + e->value.size();
    const auto [ptr, ec] = std::from_chars(e->value.data(), end, v);
    if (ec != std::errc{} || ptr != end) fail(e->line, "'" + key + "' must be a number, got '" + e->value + "'");
    return v;
  }

  template <typename T>
  void read(const std::string& key, T& target) const {
    if (auto v = number<T>(key)) target = *v;
  }

  std::optional<bool> boolean(const std::string& key) const {
    const auto v = text(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    fail(line(key), "'" + key + "' must be true or false");
  }

  template <typename T>
  std::vector<T> numbers(const std::string& key) const {
    std::vector<T> out;
    const auto v = text(key);
    if (!v) return out;
    for (const auto& item : split_list(*v)) {
      T x{};
      const auto* end = item.data() + item.size();
      const auto [ptr, ec] = std::from_chars(item.data(), end, x);
      if (ec != std::errc{} || ptr != end) fail(line(key), "'" + key + "': bad number '" + item + "'");
      out.push_back(x);
    }
    return out;
  }

  /// "name:number, name:number"
  std::vector<std::pair<std::string, double>> pairs(const std::string& key) const {
    std::vector<std::pair<std::string, double>> out;
    const auto v = text(key);
    if (!v) return out;
    for (const auto& item : split_list(*v)) {
      const auto colon = item.rfind(':');
      if (colon == std::string::npos) fail(line(key), "'" + key + "': expected value:number, got '" + item + "'");
      const std::string num = trim(std::string_view(item).substr(colon + 1));
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), x);
      if (ec != std::errc{} || ptr != num.data() + num.size())
        fail(line(key), "'" + key + "': bad number '" + num + "'");
      out.emplace_back(trim(std::string_view(item).substr(0, colon)), x);
    }
    return out;
  }

  template <typename E>
  std::optional<E> choice(const std::string& key, std::initializer_list<std::pair<const char*, E>> options) const {
    const auto v = text(key);
    if (!v) return std::nullopt;
    std::string names;
    for (const auto& [name, value] : options) {
      if (*v == name) return value;
      names += std::string(names.empty() ? "" : ", ") + name;
    }
    fail(line(key), "'" + key + "' must be one of: " + names);
  }

  std::size_t line(const std::string& key) const {
    const auto* e = section_.find(key);
    return e ? e->line : section_.line;
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw ParseError(file_.source(), line, what);
  }

 private:
  const ConfigFile& file_;
  const ConfigFile::Section& section_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

GroupProbabilities group_probabilities(const SectionReader& r, const std::string& key) {
  const auto v = r.numbers<double>(key);
  if (v.empty()) return {};
  if (v.size() > 2) r.fail(r.line(key), "'" + key + "' takes one value or 'in_group, other'");
  return {v[0], v.size() == 2 ? v[1] : v[0]};
}

GeneratorSpec read_generator(const ConfigFile& file, const ConfigFile::Section& s,
                             const std::filesystem::path& base_dir) {
  SectionReader r(file, s,
                  {"nodes", "degrees", "mean_degree", "exponent", "min_degree", "cutoff", "degree_file", "seed",
                   "homophily_tolerance", "max_rewire_passes"});
  GeneratorSpec spec;
  r.read("nodes", spec.node_count);
  r.read("seed", spec.rng_seed);
  r.read("homophily_tolerance", spec.homophily_tolerance);
  r.read("max_rewire_passes", spec.max_rewire_passes);
  enum class Kind { geometric, power_law, explicit_list };
  const Kind kind =
      r.choice<Kind>("degrees", {{"geometric", Kind::geometric},
                                 {"power-law", Kind::power_law},
                                 {"explicit", Kind::explicit_list}})
          .value_or(Kind::geometric);
  switch (kind) {
    case Kind::geometric: {
      GeometricDegrees g;
      r.read("mean_degree", g.mean);
      spec.degrees = g;
      break;
    }
    case Kind::power_law: {
      PowerLawDegrees p;
      r.read("exponent", p.exponent);
      r.read("min_degree", p.min_degree);
      r.read("cutoff", p.cutoff);
      spec.degrees = p;
      break;
    }
    case Kind::explicit_list: {
      const auto path = r.text("degree_file");
      if (!path) r.fail(s.line, "explicit degrees need 'degree_file'");
      const std::filesystem::path full = resolve(base_dir, *path);
      ExplicitDegrees d;
      std::stringstream in(read_text(full));
      std::string line;
      for (std::size_t no = 1; std::getline(in, line); ++no) {
        line = trim(std::string_view(line).substr(0, line.find('#')));
        if (line.empty()) continue;
        int k = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), k);
        if (ec != std::errc{} || ptr != line.data() + line.size())
          throw ParseError(full.string(), no, "expected an integer degree");
        d.degrees.push_back(k);
      }
      if (!r.has("nodes")) spec.node_count = static_cast<NodeId>(d.degrees.size());
      spec.degrees = std::move(d);
      break;
    }
  }
  return spec;
}

AttributeSpec read_attribute(const ConfigFile& file, const ConfigFile::Section& s, const std::string& name) {
  SectionReader r(file, s, {"proportions", "homophily"});
  AttributeSpec spec{name, {}};
  for (const auto& [value, p] : r.pairs("proportions")) spec.categories.push_back({value, p, std::nullopt});
  if (spec.categories.empty()) r.fail(s.line, "[" + s.name + "] needs 'proportions'");
  for (const auto& [value, h] : r.pairs("homophily")) {
    auto it = std::find_if(spec.categories.begin(), spec.categories.end(),
                           [&](const CategoryTarget& c) { return c.value == value; });
    if (it == spec.categories.end())
      r.fail(r.line("homophily"), "homophily given for unknown value '" + value + "'");
    it->homophily = h;
  }
  return spec;
}

void read_transforms(const ConfigFile& file, const ConfigFile::Section& s, ExperimentConfig& out) {
  SectionReader r(file, s,
                  {"steps", "seed", "degree_increase", "rewire_attributes", "weight_scheme", "lognormal_mu",
                   "lognormal_sigma", "weight_shift_attribute", "weight_shift_value", "weight_shift",
                   "irreciprocal_fraction", "bias_attribute", "bias_value", "bias_factor"});
  r.read("seed", out.transform_seed);
  const auto steps = split_list(r.text("steps").value_or(""));
  for (const auto& name : steps) {
    if (name == "add-edges") {
      AddEdgesStep step;
      r.read("degree_increase", step.degree_increase);
      out.transforms.emplace_back(step);
    } else if (name == "rewire") {
      out.transforms.emplace_back(RewireStep{split_list(r.text("rewire_attributes").value_or(""))});
    } else if (name == "weight") {
      enum class Kind { lognormal, max, min };
      const Kind kind =
          r.choice<Kind>("weight_scheme", {{"lognormal", Kind::lognormal}, {"max", Kind::max}, {"min", Kind::min}})
              .value_or(Kind::lognormal);
      WeightStep step;
      if (kind == Kind::lognormal) {
        LognormalWeights w;
        r.read("lognormal_mu", w.mu);
        r.read("lognormal_sigma", w.sigma);
        w.shift_attribute = r.text("weight_shift_attribute").value_or("");
        w.shift_value = r.text("weight_shift_value").value_or("");
        r.read("weight_shift", w.shift);
        step.scheme = w;
      } else if (kind == Kind::max) {
        step.scheme = MaxCombine{};
      } else {
        step.scheme = MinCombine{};
      }
      out.transforms.emplace_back(step);
    } else if (name == "directed-variant") {
      DirectedVariantStep step;
      r.read("irreciprocal_fraction", step.irreciprocal_fraction);
      if (r.has("bias_attribute")) {
        AttachmentBias b;
        b.attribute = *r.text("bias_attribute");
        b.value = r.text("bias_value").value_or("");
        r.read("bias_factor", b.factor);
        step.bias = b;
      }
      out.transforms.emplace_back(step);
    } else {
      r.fail(r.line("steps"), "unknown transform '" + name + "' (add-edges, rewire, weight, directed-variant)");
    }
  }
}

void read_sampling(const ConfigFile& file, const ConfigFile::Section& s, SamplingConfig& c) {
  SectionReader r(file, s,
                  {"seeds", "seed_selection", "coupons", "replacement", "sample_size", "checkpoints", "ignore",
                   "reject", "recruitment", "on_chain_death", "edges"});
  r.read("seeds", c.seed_count);
  r.read("coupons", c.coupons_per_participant);
  r.read("sample_size", c.target_sample_size);
  c.checkpoint_sizes = r.numbers<int>("checkpoints");
  c.ignore_prob = group_probabilities(r, "ignore");
  c.reject_prob = group_probabilities(r, "reject");
  if (auto v = r.choice<SeedSelection>("seed_selection", {{"uniform", SeedSelection::uniform},
                                                           {"degree-proportional", SeedSelection::degree_proportional}}))
    c.seed_selection = *v;
  if (auto v = r.choice<Replacement>("replacement", {{"with", Replacement::with}, {"without", Replacement::without}}))
    c.replacement = *v;
  if (auto v = r.choice<RecruitmentMode>("recruitment", {{"uniform", RecruitmentMode::uniform},
                                                          {"weight-proportional", RecruitmentMode::weight_proportional}}))
    c.recruitment_mode = *v;
  if (auto v = r.choice<ChainDeathPolicy>("on_chain_death",
                                          {{"reseed", ChainDeathPolicy::reseed}, {"fail", ChainDeathPolicy::fail}}))
    c.on_chain_death = *v;
  if (auto v = r.choice<EdgeSemantics>("edges",
                                       {{"reciprocal", EdgeSemantics::reciprocal}, {"directed", EdgeSemantics::directed}}))
    c.edges = *v;
}

}  // namespace

bool ExperimentConfig::uses(Estimator e) const {
  return std::find(estimators.begin(), estimators.end(), e) != estimators.end();
}

void ExperimentConfig::validate() const {
  if (generator.has_value() == graph_prefix.has_value())
    throw std::invalid_argument("config needs exactly one of [generator] or [graph]");
  if (partition_attribute.empty() || partition_value.empty())
    throw std::invalid_argument("[partition] needs 'attribute' and 'value'");
  if (replications == 0) throw std::invalid_argument("'replications' must be positive");
  if (estimators.empty()) throw std::invalid_argument("no estimators selected");
  if (grid_axis1.has_value() != grid_axis2.has_value())
    throw std::invalid_argument("[grid] needs both axes");
  if (generator) generator->validate();
}

ExperimentConfig parse_experiment_config(const ConfigFile& file, const std::filesystem::path& base_dir) {
  ExperimentConfig out;
  out.config_hash = file.hash();
  std::vector<AttributeSpec> attributes;
  for (const auto& s : file.sections()) {
    if (s.name == "generator") {
      out.generator = read_generator(file, s, base_dir);
    } else if (s.name.rfind("attribute ", 0) == 0) {
      attributes.push_back(read_attribute(file, s, s.name.substr(10)));
    } else if (s.name == "graph") {
      SectionReader r(file, s, {"prefix", "restrict_to_giant"});
      const auto prefix = r.text("prefix");
      if (!prefix) r.fail(s.line, "[graph] needs 'prefix'");
      out.graph_prefix = resolve(base_dir, *prefix);
      if (auto b = r.boolean("restrict_to_giant")) out.restrict_to_giant = *b;
    } else if (s.name == "transform") {
      read_transforms(file, s, out);
    } else if (s.name == "partition") {
      SectionReader r(file, s, {"attribute", "value"});
      out.partition_attribute = r.text("attribute").value_or("");
      out.partition_value = r.text("value").value_or("");
    } else if (s.name == "sampling") {
      read_sampling(file, s, out.sampling);
    } else if (s.name == "experiment") {
      SectionReader r(file, s, {"replications", "estimators", "seed", "output", "threads", "stationary_tolerance"});
      r.read("replications", out.replications);
      r.read("seed", out.master_seed);
      r.read("threads", out.threads);
      r.read("stationary_tolerance", out.stationary_tolerance);
      if (auto o = r.text("output")) out.output_dir = resolve(base_dir, *o);
      if (r.has("estimators")) {
        out.estimators.clear();
        for (const auto& e : split_list(*r.text("estimators"))) {
          if (e == "rds2") out.estimators.push_back(Estimator::rds2);
          else if (e == "eig") out.estimators.push_back(Estimator::eig);
          else r.fail(r.line("estimators"), "unknown estimator '" + e + "' (rds2, eig)");
        }
      }
    } else if (s.name == "grid") {
      SectionReader r(file, s, {"axis1", "values1", "axis2", "values2"});
      for (int k = 1; k <= 2; ++k) {
        const std::string n = std::to_string(k);
        const auto axis = r.text("axis" + n);
        if (!axis) r.fail(s.line, "[grid] needs 'axis" + n + "'");
        GridAxis g{*axis, split_list(r.text("values" + n).value_or(""))};
        if (g.values.empty()) r.fail(r.line("axis" + n), "[grid] needs 'values" + n + "'");
        SamplingConfig probe;
        try {
          apply_axis(probe, g.name, g.values.front());
        } catch (const std::invalid_argument& e) {
          r.fail(r.line("axis" + n), e.what());
        }
        (k == 1 ? out.grid_axis1 : out.grid_axis2) = std::move(g);
      }
    } else {
      throw ParseError(file.source(), s.line, "unknown section [" + s.name + "]");
    }
  }
  if (!attributes.empty()) {
    if (!out.generator) throw ParseError(file.source(), 0, "[attribute ...] sections need a [generator]");
    out.generator->attributes = std::move(attributes);
  }
  out.sampling.rng_seed = out.master_seed;
  return out;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(ConfigFile::load(path), path.parent_path());
}

AttributedGraph apply_transform(const AttributedGraph& graph, const TransformStep& step, std::uint64_t seed) {
  return std::visit(
      [&](const auto& s) -> AttributedGraph {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, AddEdgesStep>) {
          return add_edges_preserving_homophily(graph, s.degree_increase, seed);
        } else if constexpr (std::is_same_v<S, RewireStep>) {
          return rewire_preserving_attributes(graph, s.attributes, seed).graph;
        } else if constexpr (std::is_same_v<S, WeightStep>) {
          WeightScheme scheme = s.scheme;
          if (auto* w = std::get_if<LognormalWeights>(&scheme)) w->rng_seed = seed;
          return assign_edge_weights(graph, scheme).graph;
        } else {
          return make_directed_variant(graph, s.irreciprocal_fraction, s.bias, seed);
        }
      },
      step);
}

AttributedGraph prepare_graph(const ExperimentConfig& config) {
  AttributedGraph graph;
  if (config.generator) {
    graph = generate(*config.generator);
  } else {
    const auto [edges, attrs] = graph_paths(*config.graph_prefix);
    graph = load_graph(edges, attrs);
    if (config.restrict_to_giant) {
      auto keep = config.sampling.edges == EdgeSemantics::reciprocal ? giant_reciprocal_component(graph)
                                                                      : giant_strongly_connected_component(graph);
      if (keep.size() != static_cast<std::size_t>(graph.node_count())) graph = induced_subgraph(graph, std::move(keep));
    }
  }
  for (std::size_t i = 0; i < config.transforms.size(); ++i)
    graph = apply_transform(graph, config.transforms[i], config.transform_seed + i);
  return graph;
}

NodePartition make_partition(const AttributedGraph& graph, const ExperimentConfig& config) {
  if (!graph.attributes().find(config.partition_attribute))
    throw std::invalid_argument("graph has no attribute '" + config.partition_attribute + "'");
  return {graph, config.partition_attribute, config.partition_value};
}

}  // namespace rds
