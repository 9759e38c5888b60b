#include "rds/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rds/config.hpp"
#include "rds/estimators.hpp"
#include "rds/experiments.hpp"
#include "rds/io.hpp"
#include "rds/netgen.hpp"

namespace rds {

namespace {

namespace fs = std::filesystem;

AttributedGraph load_prefix(const std::string& prefix) {
  const auto [edges, attrs] = graph_paths(prefix);
  return load_graph(edges, attrs);
}

void save_prefix(const AttributedGraph& graph, const std::string& prefix) {
  const fs::path p(prefix);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const auto [edges, attrs] = graph_paths(prefix);
  save_graph(graph, edges, attrs);
}

/// Writes to `path`, or to `fallback` when the path is empty.
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream file(p, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  write(file);
  if (!file) throw std::runtime_error("failed writing " + path);
}

std::string real_or_undefined(double x) { return std::isnan(x) ? "undefined" : format_real(x); }

void print_analysis(const AttributedGraph& g, std::ostream& out) {
  const std::size_t n = static_cast<std::size_t>(g.node_count());
  out << "nodes\t" << n << '\n';
  out << "directed_edges\t" << g.edge_count() << '\n';
  out << "reciprocal_ties\t" << g.reciprocal_edge_count() / 2 << '\n';
  out << "reciprocity\t"
      << (g.edge_count() ? format_real(static_cast<double>(g.reciprocal_edge_count()) /
                                       static_cast<double>(g.edge_count()))
                         : "undefined")
      << '\n';
  out << "giant_reciprocal_component\t" << giant_reciprocal_component(g).size() << '\n';
  out << "giant_strongly_connected_component\t" << giant_strongly_connected_component(g).size() << '\n';

  out << "\ndegree\tmean\tmedian\tmin\tmax\n";
  const std::pair<const char*, DegreeMode> modes[] = {
      {"reciprocal", DegreeMode::reciprocal}, {"out", DegreeMode::out}, {"in", DegreeMode::in}};
  for (const auto& [name, mode] : modes) {
    std::vector<std::size_t> d(n);
    for (std::size_t u = 0; u < n; ++u) d[u] = g.degree(static_cast<NodeId>(u), mode);
    out << name << '\t';
    if (d.empty()) {
      out << "undefined\tundefined\tundefined\tundefined\n";
      continue;
    }
    std::sort(d.begin(), d.end());
    const double mean = static_cast<double>(std::accumulate(d.begin(), d.end(), std::size_t{0})) /
                        static_cast<double>(n);
    const double median = n % 2 ? static_cast<double>(d[n / 2])
                                : 0.5 * static_cast<double>(d[n / 2 - 1] + d[n / 2]);
    out << format_real(mean) << '\t' << format_real(median) << '\t' << d.front() << '\t' << d.back() << '\n';
  }

  out << "\nattribute\tvalue\tcount\tP*\thomophily\n";
  const auto& attrs = g.attributes();
  for (std::size_t a = 0; a < attrs.attribute_count(); ++a) {
    const auto h = homophily_by_category(g, a);
    const auto codes = attrs.codes(a);
    for (std::size_t c = 0; c < attrs.category_count(a); ++c) {
      const auto count = static_cast<std::size_t>(std::count(codes.begin(), codes.end(), static_cast<Category>(c)));
      out << attrs.name(a) << '\t' << attrs.category_name(a, static_cast<Category>(c)) << '\t' << count << '\t'
          << (n ? format_real(static_cast<double>(count) / static_cast<double>(n)) : "undefined") << '\t'
          << real_or_undefined(h[c]) << '\n';
    }
  }
}

struct SharedOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string graph;
  std::string out;
};

ExperimentConfig resolve_config(const SharedOptions& o) {
  ExperimentConfig c = load_experiment_config(o.config);
  if (!o.graph.empty()) {
    c.generator.reset();
    c.graph_prefix = o.graph;
  }
  if (o.seed) {
    c.master_seed = *o.seed;
    c.sampling.rng_seed = *o.seed;
  }
  if (!o.out.empty()) c.output_dir = o.out;
  c.validate();
  return c;
}

std::optional<StationaryVector> stationary_for(const AttributedGraph& g, const ExperimentConfig& c) {
  if (!c.uses(Estimator::eig)) return std::nullopt;
  return stationary_distribution(g, c.sampling.recruitment_mode, c.stationary_tolerance, 1'000'000,
                                 c.sampling.edges == EdgeSemantics::reciprocal ? EdgeSemantics::reciprocal
                                                                               : EdgeSemantics::directed);
}

MetricsTable keep_estimators(MetricsTable t, const ExperimentConfig& c) {
  std::erase_if(t.rows, [&](const MetricsRow& r) { return !c.uses(r.estimator); });
  return t;
}

RunMetadata metadata_for(const ExperimentConfig& c, const std::vector<EstimateSeries>* series, double p_star) {
  RunMetadata meta;
  meta.config_hash = c.config_hash;
  meta.master_seed = c.master_seed;
  std::string names;
  for (Estimator e : c.estimators) names += std::string(names.empty() ? "" : ",") + to_string(e);
  meta.notes.emplace_back("estimators", names);
  meta.notes.emplace_back("replications", std::to_string(c.replications));
  meta.notes.emplace_back("edges", c.sampling.edges == EdgeSemantics::reciprocal ? "reciprocal" : "directed");
  meta.notes.emplace_back("on_chain_death", c.sampling.on_chain_death == ChainDeathPolicy::reseed ? "reseed" : "fail");
  meta.notes.emplace_back("partition", c.partition_attribute + "=" + c.partition_value);
  meta.notes.emplace_back("p_star", format_real(p_star));
  if (series) {
    std::size_t deaths = 0, reseeds = 0;
    for (const auto& s : *series) {
      deaths += s.chain_deaths;
      reseeds += s.reseeds;
    }
    meta.notes.emplace_back("chain_deaths", std::to_string(deaths));
    meta.notes.emplace_back("reseeds", std::to_string(reseeds));
  }
  return meta;
}

void add_shared(CLI::App* cmd, SharedOptions& o, bool config_required) {
  auto* opt = cmd->add_option("--config", o.config, "experiment config file");
  if (config_required) opt->required();
  cmd->add_option("--seed", o.seed, "override the master seed");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Respondent-driven sampling simulator", "rdslab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  SharedOptions gen_o, an_o, st_o, sim_o, exp_o;

  auto* gen = app.add_subcommand("generate", "build a synthetic attributed graph from [generator]");
  add_shared(gen, gen_o, true);
  gen->add_option("--out", gen_o.out, "output prefix (PREFIX.edges.tsv, PREFIX.attrs.tsv)")->required();

  auto* tr = app.add_subcommand("transform", "apply one structural transform to a graph");
  tr->require_subcommand(1);
  std::string tr_in, tr_out;
  std::uint64_t tr_seed = 1;
  auto add_io = [&](CLI::App* c) {
    c->add_option("--graph", tr_in, "input graph prefix")->required();
    c->add_option("--out", tr_out, "output graph prefix")->required();
    c->add_option("--seed", tr_seed, "transform seed");
  };
  AddEdgesStep add_step;
  auto* tr_add = tr->add_subcommand("add-edges", "raise the mean degree keeping the mixing pattern");
  add_io(tr_add);
  tr_add->add_option("--degree-increase", add_step.degree_increase, "mean-degree increase")->capture_default_str();

  RewireStep rewire_step;
  auto* tr_rewire = tr->add_subcommand("rewire", "randomize ties within attribute profiles");
  add_io(tr_rewire);
  tr_rewire->add_option("--attributes", rewire_step.attributes, "attributes to preserve (default: all)")
      ->delimiter(',');

  std::string scheme = "lognormal";
  LognormalWeights lognormal;
  auto* tr_weight = tr->add_subcommand("weight", "assign symmetric tie weights");
  add_io(tr_weight);
  tr_weight->add_option("--scheme", scheme, "lognormal | max | min")
      ->check(CLI::IsMember({"lognormal", "max", "min"}))
      ->capture_default_str();
  tr_weight->add_option("--mu", lognormal.mu)->capture_default_str();
  tr_weight->add_option("--sigma", lognormal.sigma)->capture_default_str();
  tr_weight->add_option("--shift-attribute", lognormal.shift_attribute);
  tr_weight->add_option("--shift-value", lognormal.shift_value);
  tr_weight->add_option("--shift", lognormal.shift, "log-mean shift per endpoint in the group");

  DirectedVariantStep dir_step;
  AttachmentBias bias;
  auto* tr_dir = tr->add_subcommand("directed-variant", "add one-way edges to a reciprocal graph");
  add_io(tr_dir);
  tr_dir->add_option("--fraction", dir_step.irreciprocal_fraction, "target share of one-way edges")
      ->capture_default_str();
  auto* bias_attr = tr_dir->add_option("--bias-attribute", bias.attribute);
  tr_dir->add_option("--bias-value", bias.value)->needs(bias_attr);
  tr_dir->add_option("--bias-factor", bias.factor)->needs(bias_attr);

  auto* an = app.add_subcommand("analyze", "summarize a graph: P*, homophily, degrees, components");
  an->add_option("--graph", an_o.graph, "graph prefix")->required();

  std::string st_mode = "uniform", st_edges = "directed";
  double st_tol = 1e-13;
  auto* st = app.add_subcommand("stationary", "per-node stationary distribution of the recruitment walk");
  st->add_option("--graph", st_o.graph, "graph prefix")->required();
  st->add_option("--recruitment", st_mode, "uniform | weight-proportional")
      ->check(CLI::IsMember({"uniform", "weight-proportional"}))
      ->capture_default_str();
  st->add_option("--edges", st_edges, "directed | reciprocal")
      ->check(CLI::IsMember({"directed", "reciprocal"}))
      ->capture_default_str();
  st->add_option("--tolerance", st_tol)->capture_default_str();
  st->add_option("--out", st_o.out, "output file (default: stdout)");

  auto* sim = app.add_subcommand("simulate", "run one recruitment chain and dump the sample");
  add_shared(sim, sim_o, true);
  sim->add_option("--graph", sim_o.graph, "graph prefix (replaces the config's graph source)");
  sim->add_option("--out", sim_o.out, "output file (default: stdout)");

  unsigned exp_threads = 0;
  auto* ex = app.add_subcommand("experiment", "replicated chains or a parameter grid to metrics CSV");
  add_shared(ex, exp_o, true);
  ex->add_option("--graph", exp_o.graph, "graph prefix (replaces the config's graph source)");
  ex->add_option("--out", exp_o.out, "output directory");
  ex->add_option("--threads", exp_threads, "worker threads (default: config, then all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen) {
      ExperimentConfig c = load_experiment_config(gen_o.config);
      if (!c.generator) throw std::invalid_argument("config has no [generator] section");
      if (gen_o.seed) c.generator->rng_seed = *gen_o.seed;
      const AttributedGraph g = generate(*c.generator);
      save_prefix(g, gen_o.out);
      out << "wrote " << g.node_count() << " nodes, " << g.reciprocal_edge_count() / 2 << " ties to " << gen_o.out
          << ".{edges,attrs}.tsv\n";
    } else if (*tr) {
      const AttributedGraph in = load_prefix(tr_in);
      TransformStep step;
      if (*tr_add) {
        step = add_step;
      } else if (*tr_rewire) {
        step = rewire_step;
      } else if (*tr_weight) {
        if (scheme == "lognormal") step = WeightStep{lognormal};
        else if (scheme == "max") step = WeightStep{MaxCombine{}};
        else step = WeightStep{MinCombine{}};
      } else {
        if (!bias.attribute.empty()) dir_step.bias = bias;
        step = dir_step;
      }
      const AttributedGraph g = apply_transform(in, step, tr_seed);
      save_prefix(g, tr_out);
      out << "wrote " << g.node_count() << " nodes, " << g.edge_count() << " directed edges to " << tr_out
          << ".{edges,attrs}.tsv\n";
    } else if (*an) {
      print_analysis(load_prefix(an_o.graph), out);
    } else if (*st) {
      const AttributedGraph g = load_prefix(st_o.graph);
      const auto mode = st_mode == "uniform" ? RecruitmentMode::uniform : RecruitmentMode::weight_proportional;
      const auto edges = st_edges == "directed" ? EdgeSemantics::directed : EdgeSemantics::reciprocal;
      const StationaryVector v = stationary_distribution(g, mode, st_tol, 1'000'000, edges);
      emit(st_o.out, out, [&](std::ostream& o) { write_stationary(v, o); });
    } else if (*sim) {
      const ExperimentConfig c = resolve_config(sim_o);
      const AttributedGraph g = prepare_graph(c);
      const NodePartition part = make_partition(g, c);
      const RecruitmentSample sample = run_chain(g, part, c.sampling);
      emit(sim_o.out, out, [&](std::ostream& o) { write_sample(sample, part, o); });
      err << "sample " << sample.participants.size() << ", rds2 " << format_real(rds2_estimate(sample, part))
          << ", P* " << format_real(true_proportion(g, part)) << ", reseeds " << sample.reseeds << '\n';
    } else if (*ex) {
      ExperimentConfig c = resolve_config(exp_o);
      if (exp_threads) c.threads = exp_threads;
      const AttributedGraph g = prepare_graph(c);
      const NodePartition part = make_partition(g, c);
      const double p_star = true_proportion(g, part);
      const auto stationary = stationary_for(g, c);
      const ReplicationOptions options{stationary ? &*stationary : nullptr, c.threads};
      fs::create_directories(c.output_dir);
      if (c.grid_axis1) {
        GridTable grid = grid_experiment(g, part, c.sampling, *c.grid_axis1, *c.grid_axis2, c.replications, options);
        for (auto& cell : grid.cells)
          std::erase_if(cell.rows, [&](const MetricsRow& r) { return !c.uses(r.estimator); });
        const fs::path path = c.output_dir / "grid.csv";
        write_grid(grid, path, metadata_for(c, nullptr, p_star));
        out << "wrote " << path.string() << '\n';
      } else {
        const auto series = run_replications(g, part, c.sampling, c.replications, options);
        const MetricsTable table = keep_estimators(compute_metrics(series, p_star), c);
        const fs::path path = c.output_dir / "metrics.csv";
        write_metrics(table, path, metadata_for(c, &series, p_star));
        out << "wrote " << path.string() << '\n';
      }
    }
  } catch (const std::exception& e) {
    err << "rdslab: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"rdslab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rds
