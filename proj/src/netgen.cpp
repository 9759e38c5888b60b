#include "rds/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <unordered_set>

#include "rds/estimators.hpp"

namespace rds {

namespace {

using Rng = std::mt19937_64;

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

struct UndirectedEdge {
  NodeId u;
  NodeId v;
  double weight = 1.0;
};

std::vector<Edge> both_directions(const std::vector<UndirectedEdge>& edges) {
  std::vector<Edge> out;
  out.reserve(2 * edges.size());
  for (const auto& e : edges) {
    out.push_back({e.u, e.v, e.weight});
    out.push_back({e.v, e.u, e.weight});
  }
  return out;
}

std::vector<UndirectedEdge> undirected_edges(const AttributedGraph& graph) {
  std::vector<UndirectedEdge> out;
  out.reserve(graph.reciprocal_edge_count() / 2);
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    const auto t = graph.reciprocal_neighbors(u);
    const auto w = graph.reciprocal_weights(u);
    for (std::size_t k = 0; k < t.size(); ++k)
      if (u < t[k]) out.push_back({u, t[k], w[k]});
  }
  return out;
}

AttributedGraph restrict_to_giant_reciprocal(const AttributedGraph& graph) {
  auto keep = giant_reciprocal_component(graph);
  if (keep.size() == static_cast<std::size_t>(graph.node_count())) return graph;
  return induced_subgraph(graph, std::move(keep));
}

void require_reciprocal(const AttributedGraph& graph, const char* op) {
  if (!graph.all_reciprocal())
    throw std::invalid_argument(std::string(op) + " requires an all-reciprocal graph");
}

// Joint attribute profile per node over the listed attributes.
std::vector<std::size_t> profile_classes(const AttributedGraph& graph,
                                         const std::vector<std::size_t>& attributes,
                                         std::vector<std::vector<NodeId>>& members) {
  const auto& attrs = graph.attributes();
  std::map<std::vector<Category>, std::size_t> ids;
  std::vector<std::size_t> cls(static_cast<std::size_t>(graph.node_count()));
  std::vector<Category> key(attributes.size());
  members.clear();
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    for (std::size_t i = 0; i < attributes.size(); ++i) key[i] = attrs.code(attributes[i], u);
    auto [it, inserted] = ids.emplace(key, members.size());
    if (inserted) members.emplace_back();
    members[it->second].push_back(u);
    cls[static_cast<std::size_t>(u)] = it->second;
  }
  return cls;
}

std::vector<std::size_t> all_attribute_indices(const AttributedGraph& graph) {
  std::vector<std::size_t> idx(graph.attributes().attribute_count());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

// ---------------------------------------------------------------------------
// homophily planting by degree-preserving double-edge swaps

struct HomophilyTarget {
  std::size_t attribute;
  Category category;
  double share;  // node proportion P_c
  double target;
};

class MixingState {
 public:
  MixingState(const std::vector<std::vector<Category>>& codes, const std::vector<HomophilyTarget>& targets,
              const std::vector<UndirectedEdge>& edges)
      : codes_(codes), targets_(targets) {
    mixing_.resize(codes.size());
    volume_.resize(codes.size());
    for (std::size_t a = 0; a < codes.size(); ++a) {
      const std::size_t k = 1 + *std::max_element(codes[a].begin(), codes[a].end());
      mixing_[a].assign(k * k, 0);
      volume_[a].assign(k, 0);
      width_.push_back(k);
    }
    for (const auto& e : edges) apply(e.u, e.v, +1);
    for (std::size_t a = 0; a < codes.size(); ++a)
      for (std::size_t x = 0; x < width_[a]; ++x)
        for (std::size_t y = 0; y < width_[a]; ++y) volume_[a][x] += mixing_[a][x * width_[a] + y];
  }

  void apply(NodeId u, NodeId v, long delta) {
    for (std::size_t a = 0; a < codes_.size(); ++a) {
      const std::size_t cu = codes_[a][static_cast<std::size_t>(u)];
      const std::size_t cv = codes_[a][static_cast<std::size_t>(v)];
      mixing_[a][cu * width_[a] + cv] += delta;
      mixing_[a][cv * width_[a] + cu] += delta;
    }
  }

  double homophily(const HomophilyTarget& t) const {
    const double vol = static_cast<double>(volume_[t.attribute][t.category]);
    if (vol <= 0.0) return 0.0;
    const double s =
        static_cast<double>(mixing_[t.attribute][t.category * width_[t.attribute] + t.category]) / vol;
    return (s - t.share) / (1.0 - t.share);
  }

  double objective() const {
    double sum = 0.0;
    for (const auto& t : targets_) sum += std::pow(homophily(t) - t.target, 2);
    return sum;
  }

  /// Largest deviation and the attribute it belongs to.
  std::pair<double, std::size_t> worst() const {
    double dev = 0.0;
    std::size_t attr = targets_.empty() ? 0 : targets_.front().attribute;
    for (const auto& t : targets_) {
      const double d = std::abs(homophily(t) - t.target);
      if (d > dev) {
        dev = d;
        attr = t.attribute;
      }
    }
    return {dev, attr};
  }

 private:
  const std::vector<std::vector<Category>>& codes_;
  const std::vector<HomophilyTarget>& targets_;
  std::vector<std::vector<long>> mixing_;
  std::vector<std::vector<long>> volume_;
  std::vector<std::size_t> width_;
};

void plant_homophily(std::vector<UndirectedEdge>& edges, const std::vector<std::vector<Category>>& codes,
                     const std::vector<HomophilyTarget>& targets, const std::vector<std::string>& names,
                     double stop_tolerance, double accept_tolerance, int max_passes, Rng& rng) {
  if (targets.empty() || edges.size() < 2) return;
  std::unordered_set<std::uint64_t> present;
  present.reserve(edges.size() * 2);
  for (const auto& e : edges) present.insert(pair_key(e.u, e.v));

  MixingState state(codes, targets, edges);
  double current = state.objective();
  for (int pass = 0; pass < max_passes; ++pass) {
    if (state.worst().first <= stop_tolerance) return;
    std::size_t accepted = 0;
    for (std::size_t proposal = 0; proposal < edges.size(); ++proposal) {
      const std::size_t i = uniform_index(rng, edges.size());
      const std::size_t j = uniform_index(rng, edges.size());
      if (i == j) continue;
      auto& e1 = edges[i];
      auto& e2 = edges[j];
      NodeId a = e1.u, b = e1.v, c = e2.u, d = e2.v;
      if (rng() & 1) std::swap(c, d);
      // (a,b),(c,d) -> (a,d),(c,b)
      if (a == d || c == b || present.count(pair_key(a, d)) || present.count(pair_key(c, b))) continue;
      state.apply(a, b, -1);
      state.apply(c, d, -1);
      state.apply(a, d, +1);
      state.apply(c, b, +1);
      const double candidate = state.objective();
      if (candidate < current) {
        current = candidate;
        present.erase(pair_key(a, b));
        present.erase(pair_key(c, d));
        present.insert(pair_key(a, d));
        present.insert(pair_key(c, b));
        e1 = {a, d, e1.weight};
        e2 = {c, b, e2.weight};
        ++accepted;
        if (state.worst().first <= stop_tolerance) return;
      } else {
        state.apply(a, d, -1);
        state.apply(c, b, -1);
        state.apply(a, b, +1);
        state.apply(c, d, +1);
      }
    }
    if (accepted == 0) break;
  }
  const auto [dev, attr] = state.worst();
  if (dev > accept_tolerance)
    throw InfeasibleHomophilyError(
        names[attr], "homophily target for attribute '" + names[attr] +
                         "' is infeasible: rewiring stalled at deviation " + std::to_string(dev));
}

// Both categories of a binary attribute carry targets. Swaps cannot change
// stub volumes, and the two targets fix the cross-tie count twice, so they
// agree only at one volume share of category 0. Exchanges labels between
// member pairs (counts unchanged) until that share is hit to within a stub.
bool balance_binary_volume(const std::vector<UndirectedEdge>& edges, std::vector<Category>& codes,
                           const std::vector<HomophilyTarget>& targets, std::size_t attribute, Rng& rng) {
  const HomophilyTarget* t[2] = {nullptr, nullptr};
  for (const auto& x : targets)
    if (x.attribute == attribute && x.category < 2) t[x.category] = &x;
  if (!t[0] || !t[1] || *std::max_element(codes.begin(), codes.end()) != 1) return false;

  std::vector<long> vol(codes.size(), 0);
  for (const auto& e : edges) {
    ++vol[static_cast<std::size_t>(e.u)];
    ++vol[static_cast<std::size_t>(e.v)];
  }
  const double p = t[0]->share;
  const double ratio = p * (1.0 - t[1]->target) / ((1.0 - p) * (1.0 - t[0]->target));
  const double total = static_cast<double>(2 * edges.size());
  const double wanted = total * ratio / (1.0 + ratio);

  std::vector<std::size_t> group[2];
  double have = 0.0;
  for (std::size_t u = 0; u < codes.size(); ++u) {
    group[codes[u]].push_back(u);
    if (codes[u] == 0) have += static_cast<double>(vol[u]);
  }
  if (group[0].empty() || group[1].empty()) return false;
  bool changed = false;
  for (std::size_t tries = 0; tries < 50 * codes.size() && std::abs(have - wanted) > 1.0; ++tries) {
    const std::size_t i = uniform_index(rng, group[0].size());
    const std::size_t j = uniform_index(rng, group[1].size());
    const std::size_t u = group[0][i], v = group[1][j];
    const double next = have - static_cast<double>(vol[u]) + static_cast<double>(vol[v]);
    if (std::abs(next - wanted) >= std::abs(have - wanted)) continue;
    std::swap(codes[u], codes[v]);
    std::swap(group[0][i], group[1][j]);
    have = next;
    changed = true;
  }
  return changed;
}

std::vector<int> draw_degrees(const GeneratorSpec& spec, Rng& rng) {
  const auto n = static_cast<std::size_t>(spec.node_count);
  const int cap = spec.node_count - 1;
  std::vector<int> deg(n);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GeometricDegrees>) {
          std::geometric_distribution<int> g(1.0 / d.mean);
          for (auto& k : deg) k = 1 + g(rng);
        } else if constexpr (std::is_same_v<T, PowerLawDegrees>) {
          std::vector<double> w;
          for (int k = d.min_degree; k <= d.cutoff; ++k) w.push_back(std::pow(double(k), -d.exponent));
          std::discrete_distribution<int> pick(w.begin(), w.end());
          for (auto& k : deg) k = d.min_degree + pick(rng);
        } else {
          deg = d.degrees;
        }
      },
      spec.degrees);
  for (auto& k : deg) k = std::clamp(k, 0, cap);
  if (std::accumulate(deg.begin(), deg.end(), 0L) % 2 != 0) {
    // Parity fix on a random node that can take one more stub.
    for (std::size_t tries = 0;; ++tries) {
      auto& k = deg[uniform_index(rng, n)];
      if (k < cap) {
        ++k;
        break;
      }
      if (tries > 10 * n) {
        --deg[0];
        break;
      }
    }
  }
  return deg;
}

std::vector<UndirectedEdge> erased_configuration_model(const std::vector<int>& degrees, Rng& rng) {
  std::vector<NodeId> stubs;
  for (std::size_t u = 0; u < degrees.size(); ++u)
    stubs.insert(stubs.end(), static_cast<std::size_t>(degrees[u]), static_cast<NodeId>(u));
  std::shuffle(stubs.begin(), stubs.end(), rng);
  std::unordered_set<std::uint64_t> present;
  std::vector<UndirectedEdge> edges;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    const NodeId u = stubs[i], v = stubs[i + 1];
    if (u == v || !present.insert(pair_key(u, v)).second) continue;
    edges.push_back({std::min(u, v), std::max(u, v)});
  }
  return edges;
}

std::vector<Category> assign_categories(const AttributeSpec& spec, std::size_t n, Rng& rng) {
  // Largest-remainder rounding so the counts sum to n exactly.
  std::vector<std::size_t> counts(spec.categories.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double exact = spec.categories[c].proportion * static_cast<double>(n);
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++counts[remainders[r % remainders.size()].second];
  std::vector<Category> codes;
  codes.reserve(n);
  for (std::size_t c = 0; c < counts.size(); ++c) codes.insert(codes.end(), counts[c], static_cast<Category>(c));
  std::shuffle(codes.begin(), codes.end(), rng);
  return codes;
}

}  // namespace

// ---------------------------------------------------------------------------
// generate

void GeneratorSpec::validate() const {
  if (node_count < 2) throw std::invalid_argument("generator needs at least 2 nodes");
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GeometricDegrees>) {
          if (!(d.mean >= 1.0)) throw std::invalid_argument("geometric mean degree must be >= 1");
        } else if constexpr (std::is_same_v<T, PowerLawDegrees>) {
          if (d.min_degree < 1 || d.cutoff < d.min_degree || !(d.exponent > 0.0))
            throw std::invalid_argument("power-law degrees need exponent > 0 and 1 <= min <= cutoff");
        } else {
          if (d.degrees.size() != static_cast<std::size_t>(node_count))
            throw std::invalid_argument("explicit degree sequence length differs from node count");
          if (std::any_of(d.degrees.begin(), d.degrees.end(), [](int k) { return k < 0; }))
            throw std::invalid_argument("negative degree in explicit sequence");
        }
      },
      degrees);
  for (const auto& a : attributes) {
    if (a.categories.empty()) throw std::invalid_argument("attribute '" + a.name + "' has no categories");
    double total = 0.0;
    for (const auto& c : a.categories) {
      if (!(c.proportion >= 0.0 && c.proportion <= 1.0))
        throw std::invalid_argument("proportion of " + a.name + "=" + c.value + " outside [0,1]");
      if (c.homophily && !(*c.homophily >= 0.0 && *c.homophily < 1.0))
        throw std::invalid_argument("homophily target of " + a.name + "=" + c.value + " outside [0,1)");
      total += c.proportion;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("proportions of attribute '" + a.name + "' do not sum to 1");
  }
}

AttributedGraph generate(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.rng_seed);
  const auto n = static_cast<std::size_t>(spec.node_count);

  NodeAttributes attrs(spec.node_count);
  std::vector<std::vector<Category>> codes;
  std::vector<std::string> names;
  for (const auto& a : spec.attributes) {
    const std::size_t idx = attrs.add_attribute(a.name);
    for (const auto& c : a.categories) attrs.intern(idx, c.value);
    codes.push_back(assign_categories(a, n, rng));
    for (std::size_t u = 0; u < n; ++u) attrs.set_code(static_cast<NodeId>(u), idx, codes.back()[u]);
    names.push_back(a.name);
  }

  if (spec.node_count == 2) return {std::move(attrs), {{0, 1, 1.0}, {1, 0, 1.0}}};

  std::vector<UndirectedEdge> edges = erased_configuration_model(draw_degrees(spec, rng), rng);

  const double stop = spec.homophily_tolerance / 4.0;
  AttributedGraph graph;
  for (int round = 0;; ++round) {
    std::vector<HomophilyTarget> targets;
    for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
      const auto& cats = spec.attributes[a].categories;
      for (std::size_t c = 0; c < cats.size(); ++c) {
        if (!cats[c].homophily) continue;
        const auto members = static_cast<double>(std::count(codes[a].begin(), codes[a].end(), c));
        const double share = members / static_cast<double>(codes[a].size());
        if (share >= 1.0 || members == 0) continue;  // index undefined
        targets.push_back({a, static_cast<Category>(c), share, *cats[c].homophily});
      }
    }
    for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
      if (!balance_binary_volume(edges, codes[a], targets, a, rng)) continue;
      for (std::size_t u = 0; u < codes[a].size(); ++u)
        attrs.set_code(static_cast<NodeId>(u), attrs.index_of(spec.attributes[a].name), codes[a][u]);
    }
    plant_homophily(edges, codes, targets, names, stop, spec.homophily_tolerance, spec.max_rewire_passes, rng);

    graph = restrict_to_giant_reciprocal(AttributedGraph(attrs, both_directions(edges)));
    attrs = graph.attributes();

    bool within = true;
    std::string offender;
    for (std::size_t a = 0; a < spec.attributes.size() && within; ++a) {
      const auto h = homophily_by_category(graph, attrs.index_of(spec.attributes[a].name));
      for (std::size_t c = 0; c < spec.attributes[a].categories.size(); ++c) {
        const auto& target = spec.attributes[a].categories[c].homophily;
        if (target && !std::isnan(h[c]) && std::abs(h[c] - *target) > spec.homophily_tolerance) {
          within = false;
          offender = spec.attributes[a].name;
        }
      }
    }
    if (within) return graph;
    if (round >= 4)
      throw InfeasibleHomophilyError(offender, "homophily target for attribute '" + offender +
                                                   "' not met after restricting to the giant component");
    // The component cut shifted the mix; re-plant on the survivors.
    edges = undirected_edges(graph);
    codes.clear();
    for (std::size_t a = 0; a < attrs.attribute_count(); ++a) {
      const auto span = attrs.codes(a);
      codes.emplace_back(span.begin(), span.end());
    }
  }
}

// ---------------------------------------------------------------------------
// directed variant

AttributedGraph make_directed_variant(const AttributedGraph& graph, double irreciprocal_fraction,
                                      const std::optional<AttachmentBias>& bias,
                                      std::uint64_t rng_seed) {
  if (!(irreciprocal_fraction >= 0.0 && irreciprocal_fraction < 1.0))
    throw std::invalid_argument("irreciprocal fraction must lie in [0,1)");
  require_reciprocal(graph, "make_directed_variant");
  if (giant_reciprocal_component(graph).size() != static_cast<std::size_t>(graph.node_count()))
    throw std::invalid_argument("make_directed_variant requires a connected graph");
  if (irreciprocal_fraction == 0.0) return graph;

  const auto n = static_cast<std::size_t>(graph.node_count());
  const double reciprocal = static_cast<double>(graph.edge_count());
  const auto wanted = static_cast<std::size_t>(
      std::llround(irreciprocal_fraction * reciprocal / (1.0 - irreciprocal_fraction)));
  const std::size_t free_pairs = n * (n - 1) / 2 - graph.edge_count() / 2;
  if (wanted > free_pairs)
    throw std::invalid_argument("not enough non-adjacent pairs for the requested fraction");

  std::vector<double> cumulative(n);
  {
    std::vector<char> member(n, 0);
    if (bias) {
      if (!(bias->factor > 0.0)) throw std::invalid_argument("attachment bias factor must be positive");
      const NodePartition group(graph, bias->attribute, bias->value);
      for (std::size_t u = 0; u < n; ++u) member[u] = group.contains(static_cast<NodeId>(u));
    }
    double total = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      total += member[u] ? bias->factor : 1.0;
      cumulative[u] = total;
    }
  }

  Rng rng(rng_seed);
  std::unordered_set<std::uint64_t> present;
  present.reserve(graph.edge_count() + 2 * wanted);
  for (const auto& e : graph.edges()) present.insert(pair_key(e.src, e.dst));
  auto edges = graph.edges();
  std::uniform_real_distribution<double> unit(0.0, cumulative.back());
  const std::size_t max_attempts = 100 * wanted + 100000;
  std::size_t attempts = 0;
  for (std::size_t added = 0; added < wanted;) {
    if (++attempts > max_attempts)
      throw std::runtime_error("could not place the requested one-way edges");
    const auto src = static_cast<NodeId>(uniform_index(rng, n));
    auto dst = static_cast<NodeId>(std::upper_bound(cumulative.begin(), cumulative.end(), unit(rng)) -
                                   cumulative.begin());
    dst = std::min<NodeId>(dst, static_cast<NodeId>(n - 1));
    if (src == dst || !present.insert(pair_key(src, dst)).second) continue;
    edges.push_back({src, dst, 1.0});
    ++added;
  }
  AttributedGraph directed(graph.attributes(), std::move(edges));
  auto keep = giant_strongly_connected_component(directed);
  if (keep.size() == n) return directed;
  return induced_subgraph(directed, std::move(keep));
}

// ---------------------------------------------------------------------------
// edge addition

AttributedGraph add_edges_preserving_homophily(const AttributedGraph& graph, double degree_increase,
                                               std::uint64_t rng_seed) {
  require_reciprocal(graph, "add_edges_preserving_homophily");
  if (!(degree_increase >= 0.0)) throw std::invalid_argument("degree increase must be non-negative");
  const auto n = static_cast<std::size_t>(graph.node_count());
  const auto wanted = static_cast<std::size_t>(std::llround(degree_increase * static_cast<double>(n) / 2.0));
  if (wanted == 0) return graph;
  if (graph.edge_count() / 2 + wanted > n * (n - 1) / 2)
    throw std::invalid_argument("degree increase exceeds the capacity of the complete graph");
  if (graph.edge_count() == 0) throw std::invalid_argument("no existing ties to copy a mixing pattern from");

  std::vector<std::vector<NodeId>> members;
  const auto cls = profile_classes(graph, all_attribute_indices(graph), members);
  const auto existing = graph.edges();
  std::unordered_set<std::uint64_t> present;
  present.reserve(existing.size() / 2 + wanted);
  for (const auto& e : existing) present.insert(pair_key(e.src, e.dst));

  Rng rng(rng_seed);
  auto edges = existing;
  edges.reserve(existing.size() + 2 * wanted);
  const std::size_t max_attempts = 200 * wanted + 10000;
  std::size_t attempts = 0;
  for (std::size_t added = 0; added < wanted;) {
    if (++attempts > max_attempts)
      throw std::runtime_error("could not place new ties matching the mixing pattern");
    const Edge& tmpl = existing[uniform_index(rng, existing.size())];
    const auto& from = members[cls[static_cast<std::size_t>(tmpl.src)]];
    const auto& to = members[cls[static_cast<std::size_t>(tmpl.dst)]];
    const NodeId u = from[uniform_index(rng, from.size())];
    const NodeId v = to[uniform_index(rng, to.size())];
    if (u == v || !present.insert(pair_key(u, v)).second) continue;
    edges.push_back({u, v, 1.0});
    edges.push_back({v, u, 1.0});
    ++added;
  }
  return {graph.attributes(), std::move(edges)};
}

// ---------------------------------------------------------------------------
// rewiring

RewireResult rewire_preserving_attributes(const AttributedGraph& graph,
                                          const std::vector<std::string>& attributes,
                                          std::uint64_t rng_seed, double min_retained) {
  require_reciprocal(graph, "rewire_preserving_attributes");
  std::vector<std::size_t> attr_idx;
  for (const auto& name : attributes) attr_idx.push_back(graph.attributes().index_of(name));
  if (attr_idx.empty()) attr_idx = all_attribute_indices(graph);

  std::vector<std::vector<NodeId>> members;
  const auto cls = profile_classes(graph, attr_idx, members);
  auto edges = undirected_edges(graph);
  std::unordered_set<std::uint64_t> present;
  present.reserve(2 * edges.size());
  for (const auto& e : edges) present.insert(pair_key(e.u, e.v));

  Rng rng(rng_seed);
  constexpr int kAttempts = 32;
  std::size_t skipped = 0;
  for (auto& e : edges) {
    const bool move_second = (rng() & 1) != 0;
    const NodeId kept = move_second ? e.u : e.v;
    const NodeId moved = move_second ? e.v : e.u;
    const auto& candidates = members[cls[static_cast<std::size_t>(moved)]];
    if (candidates.size() < 2) {
      ++skipped;
      continue;
    }
    bool done = false;
    for (int attempt = 0; attempt < kAttempts && !done; ++attempt) {
      const NodeId w = candidates[uniform_index(rng, candidates.size())];
      if (w == kept || present.count(pair_key(kept, w))) continue;
      present.erase(pair_key(e.u, e.v));
      present.insert(pair_key(kept, w));
      e = {kept, w, e.weight};
      done = true;
    }
    if (!done) ++skipped;
  }

  AttributedGraph rewired(graph.attributes(), both_directions(edges));
  auto keep = giant_reciprocal_component(rewired);
  if (static_cast<double>(keep.size()) < min_retained * static_cast<double>(graph.node_count()))
    throw std::runtime_error("rewired graph fell apart: giant component keeps " + std::to_string(keep.size()) +
                             " of " + std::to_string(graph.node_count()) + " nodes");
  if (keep.size() != static_cast<std::size_t>(rewired.node_count()))
    rewired = induced_subgraph(rewired, std::move(keep));
  return {std::move(rewired), skipped};
}

// ---------------------------------------------------------------------------
// weights

WeightResult assign_edge_weights(const AttributedGraph& graph, const WeightScheme& scheme) {
  std::vector<Edge> edges = graph.edges();
  std::size_t clamped = 0;
  // Edge index lookup: edges() is sorted by (src, dst).
  auto slot = [&](NodeId u, NodeId v) {
    const auto it = std::lower_bound(edges.begin(), edges.end(), std::pair(u, v),
                                     [](const Edge& e, const std::pair<NodeId, NodeId>& key) {
                                       return std::pair(e.src, e.dst) < key;
                                     });
    return static_cast<std::size_t>(it - edges.begin());
  };

  std::optional<NodePartition> shifted;
  Rng rng;
  if (const auto* ln = std::get_if<LognormalWeights>(&scheme)) {
    if (!(ln->sigma >= 0.0)) throw std::invalid_argument("lognormal sigma must be non-negative");
    rng.seed(ln->rng_seed);
    if (!ln->shift_attribute.empty()) shifted.emplace(graph, ln->shift_attribute, ln->shift_value);
  }

  for (NodeId u = 0; u < graph.node_count(); ++u) {
    for (NodeId v : graph.reciprocal_neighbors(u)) {
      if (v < u) continue;
      const std::size_t iu = slot(u, v), iv = slot(v, u);
      double w = 1.0;
      if (const auto* ln = std::get_if<LognormalWeights>(&scheme)) {
        double mu = ln->mu;
        if (shifted) mu += ln->shift * (double(shifted->contains(u)) + double(shifted->contains(v)));
        w = std::exp(std::normal_distribution<double>(mu, ln->sigma)(rng));
      } else if (std::holds_alternative<MaxCombine>(scheme)) {
        w = std::max(edges[iu].weight, edges[iv].weight);
      } else {
        w = std::min(edges[iu].weight, edges[iv].weight);
      }
      if (!(w >= 1.0)) {
        w = 1.0;
        ++clamped;
      }
      edges[iu].weight = w;
      edges[iv].weight = w;
    }
  }
  return {AttributedGraph(graph.attributes(), std::move(edges)), clamped};
}

}  // namespace rds
