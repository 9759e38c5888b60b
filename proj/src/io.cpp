#include "rds/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace rds {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

bool skip_line(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

std::string exact_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// graphs

AttributedGraph read_graph(std::istream& edge_in, std::istream& attr_in, const std::string& edge_source,
                           const std::string& attribute_source) {
  struct NodeLine {
    NodeId id;
    std::size_t line;
    std::vector<std::pair<std::string, std::string>> values;
  };
  std::vector<NodeLine> nodes;
  std::string line;
  for (std::size_t no = 1; std::getline(attr_in, line); ++no) {
    if (skip_line(line)) continue;
    const auto body = trim(line);
    const auto cut = body.find_first_of(" \t");
    NodeId id;
    if (!parse_number(body.substr(0, cut), id) || id < 0)
      throw ParseError(attribute_source, no, "expected a non-negative node id");
    NodeLine node{id, no, {}};
    if (cut != std::string_view::npos) {
      std::string_view rest = trim(body.substr(cut));
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size())
          throw ParseError(attribute_source, no, "expected name=value, got '" + std::string(item) + "'");
        node.values.emplace_back(std::string(trim(item.substr(0, eq))), std::string(trim(item.substr(eq + 1))));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    }
    nodes.push_back(std::move(node));
  }
  std::vector<std::size_t> seen_at;
  for (const auto& n : nodes) {
    const auto id = static_cast<std::size_t>(n.id);
    if (id >= nodes.size())
      throw ParseError(attribute_source, n.line, "node ids must be exactly 0..N-1 (N = " +
                                                     std::to_string(nodes.size()) + ")");
    if (seen_at.size() < nodes.size()) seen_at.assign(nodes.size(), 0);
    if (seen_at[id]) throw ParseError(attribute_source, n.line, "node " + std::to_string(id) + " listed twice");
    seen_at[id] = n.line;
  }

  NodeAttributes attrs(static_cast<NodeId>(nodes.size()));
  for (const auto& n : nodes)
    for (const auto& [name, value] : n.values) attrs.set(n.id, name, value);

  std::vector<Edge> edges;
  std::vector<std::size_t> edge_lines;
  for (std::size_t no = 1; std::getline(edge_in, line); ++no) {
    if (skip_line(line)) continue;
    const auto fields = split_ws(trim(line));
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError(edge_source, no, "expected 'src dst [weight]'");
    Edge e;
    if (!parse_number(fields[0], e.src) || !parse_number(fields[1], e.dst))
      throw ParseError(edge_source, no, "node ids must be integers");
    if (fields.size() == 3 && !parse_number(fields[2], e.weight))
      throw ParseError(edge_source, no, "weight must be a number");
    if (e.src < 0 || e.dst < 0 || e.src >= attrs.node_count() || e.dst >= attrs.node_count())
      throw ParseError(edge_source, no, "edge references an unknown node");
    if (e.src == e.dst) throw ParseError(edge_source, no, "self-loop at node " + std::to_string(e.src));
    if (!(e.weight > 0.0)) throw ParseError(edge_source, no, "weight must be positive");
    edges.push_back(e);
    edge_lines.push_back(no);
  }
  try {
    return {std::move(attrs), std::move(edges)};
  } catch (const std::invalid_argument& err) {
    // Only duplicates survive the per-line checks above.
    throw ParseError(edge_source, 0, err.what());
  }
}

AttributedGraph load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& attribute_path) {
  auto edges = open_for_read(edge_path);
  auto attrs = open_for_read(attribute_path);
  return read_graph(edges, attrs, edge_path.string(), attribute_path.string());
}

void write_graph(const AttributedGraph& graph, std::ostream& edges, std::ostream& attributes) {
  edges << "# src\tdst\tweight\n";
  for (const auto& e : graph.edges()) edges << e.src << '\t' << e.dst << '\t' << exact_real(e.weight) << '\n';
  const auto& attrs = graph.attributes();
  attributes << "# node\tname=value,...\n";
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    attributes << u;
    bool first = true;
    for (std::size_t a = 0; a < attrs.attribute_count(); ++a) {
      const Category c = attrs.code(a, u);
      if (c == kMissingCategory) continue;
      attributes << (first ? '\t' : ',') << attrs.name(a) << '=' << attrs.category_name(a, c);
      first = false;
    }
    attributes << '\n';
  }
}

void save_graph(const AttributedGraph& graph, const std::filesystem::path& edge_path,
                const std::filesystem::path& attribute_path) {
  auto edges = open_for_write(edge_path);
  auto attrs = open_for_write(attribute_path);
  write_graph(graph, edges, attrs);
  if (!edges || !attrs) throw std::runtime_error("failed writing graph files");
}

std::pair<std::filesystem::path, std::filesystem::path> graph_paths(const std::filesystem::path& prefix) {
  return {std::filesystem::path(prefix.string() + ".edges.tsv"),
          std::filesystem::path(prefix.string() + ".attrs.tsv")};
}

// ---------------------------------------------------------------------------
// vectors and samples

void write_stationary(const StationaryVector& stationary, std::ostream& out) {
  out << "# node\tprobability\n";
  for (Eigen::Index i = 0; i < stationary.probability.size(); ++i)
    out << i << '\t' << exact_real(stationary.probability[i]) << '\n';
}

void write_sample(const RecruitmentSample& sample, const NodePartition& partition, std::ostream& out) {
  out << "index\tnode\trecruiter\twave\treported_degree\tin_group\n";
  for (std::size_t i = 0; i < sample.participants.size(); ++i) {
    const auto& p = sample.participants[i];
    out << i << '\t' << p.node << '\t';
    if (p.recruiter_index == kSeedRecruiter)
      out << "SEED";
    else
      out << p.recruiter;
    out << '\t' << p.wave << '\t' << p.reported_degree << '\t' << (partition.contains(p.node) ? 1 : 0) << '\n';
  }
}

// ---------------------------------------------------------------------------
// metrics

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

namespace {

void write_row_tail(const MetricsRow& r, std::ostream& out) {
  out << to_string(r.estimator) << ',' << format_real(r.ae) << ',' << format_real(r.bias) << ','
      << format_real(r.sd) << ',' << format_real(r.mae) << ',' << r.m << ',' << format_real(r.p_star) << '\n';
}

void write_sidecar(const std::filesystem::path& path, const RunMetadata& meta) {
  auto out = open_for_write(path.string() + ".meta.json");
  out << metadata_json(meta) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string() + ".meta.json");
}

}  // namespace

void write_metrics(const MetricsTable& table, std::ostream& out) {
  out << kCurveHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.checkpoint << ',';
    write_row_tail(r, out);
  }
}

void write_grid(const GridTable& table, std::ostream& out) {
  out << kGridHeader << '\n';
  for (const auto& cell : table.cells)
    for (const auto& r : cell.rows) {
      out << cell.value1 << ',' << cell.value2 << ',';
      write_row_tail(r, out);
    }
}

void write_metrics(const MetricsTable& table, const std::filesystem::path& path, const RunMetadata& meta) {
  auto out = open_for_write(path);
  write_metrics(table, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
  write_sidecar(path, meta);
}

void write_grid(const GridTable& table, const std::filesystem::path& path, const RunMetadata& meta) {
  auto out = open_for_write(path);
  write_grid(table, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
  write_sidecar(path, meta);
}

MetricsTable read_metrics(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCurveHeader)
    throw ParseError("metrics", 1, "unexpected header");
  MetricsTable table;
  for (std::size_t no = 2; std::getline(in, line); ++no) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(std::string(trim(cell)));
    if (f.size() != 8) throw ParseError("metrics", no, "expected 8 columns");
    MetricsRow r;
    bool ok = parse_number(std::string_view(f[0]), r.checkpoint) && parse_number(std::string_view(f[2]), r.ae) &&
              parse_number(std::string_view(f[3]), r.bias) && parse_number(std::string_view(f[4]), r.sd) &&
              parse_number(std::string_view(f[5]), r.mae) && parse_number(std::string_view(f[6]), r.m) &&
              parse_number(std::string_view(f[7]), r.p_star);
    if (f[1] == "rds2") r.estimator = Estimator::rds2;
    else if (f[1] == "eig") r.estimator = Estimator::eig;
    else ok = false;
    if (!ok) throw ParseError("metrics", no, "malformed row");
    table.rows.push_back(r);
  }
  return table;
}

std::string metadata_json(const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["config_hash"] = meta.config_hash;
  j["master_seed"] = meta.master_seed;
  j["checkpoint_semantics"] = "prefix";
  j["sd_convention"] = "population";
  j["coupon_queue"] = "fifo";
  j["seeds_in_sample"] = true;
  j["reported_degree_floor"] = 1;
  j["directed_degree"] = "reported out-degree";
  j["reparticipant_ignore_set"] = "redrawn";
  for (const auto& [k, v] : meta.notes) j[k] = v;
  return j.dump(2);
}

}  // namespace rds
