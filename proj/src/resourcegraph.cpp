#include "undec/resourcegraph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <map>
#include <unordered_map>

#include "undec/error.hpp"
#include "undec/parallel.hpp"

namespace undec {

namespace {

using Bits = std::vector<std::uint64_t>;

bool test_bit(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1u; }
void set_bit(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }

std::vector<std::size_t> topological_order(const QuotientDAG& q) {
  const std::size_t n = q.size();
  std::vector<std::size_t> indeg(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t e = 0; e < q.edges.size(); ++e) {
    const auto& d = q.edges[e];
    if (d.from >= n || d.to >= n) throw DomainError("quotient edge refers to a missing class");
    ++indeg[d.to];
    out[d.from].push_back(e);
  }
  std::deque<std::size_t> ready;
  for (std::size_t c = 0; c < n; ++c)
    if (indeg[c] == 0) ready.push_back(c);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t c = ready.front();
    ready.pop_front();
    order.push_back(c);
    for (const std::size_t e : out[c])
      if (--indeg[q.edges[e].to] == 0) ready.push_back(q.edges[e].to);
  }
  if (order.size() != n) throw ContractViolation("quotient graph has a cycle");
  return order;
}

// Dense rank of each class's value in one table (equal values share a rank).
std::vector<std::size_t> ranks(const MonotoneTable& t) {
  const std::size_t n = t.values.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return t.values[a] < t.values[b]; });
  std::vector<std::size_t> r(n);
  std::size_t rank = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && t.values[idx[i]] != t.values[idx[i - 1]]) ++rank;
    r[idx[i]] = rank;
  }
  return r;
}

std::string edge_label(const GraphEdge& e) { return e.label.empty() ? "-" : e.label; }

}  // namespace

std::optional<std::size_t> ReachGraph::find_state(const ExactMatrix& state) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].state && nodes_[i].state->matrix() == state) return i;
  return std::nullopt;
}

std::optional<std::size_t> ReachGraph::find_id(const std::string& id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].id == id) return i;
  return std::nullopt;
}

std::size_t ReachGraph::add_node(GraphNode node) {
  if (find_id(node.id)) throw DomainError("duplicate node id '" + node.id + "'");
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

void ReachGraph::add_edge(GraphEdge edge) {
  if (edge.from >= nodes_.size() || edge.to >= nodes_.size()) {
    throw DomainError("edge refers to a missing node");
  }
  if (edge.length.sign() <= 0) throw DomainError("edge length must be positive");
  edges_.push_back(std::move(edge));
}

ReachGraph ReachGraph::from_json(const nlohmann::json& j) {
  ReachGraph g;
  try {
    for (const auto& n : j.at("nodes")) {
      const std::string id = n.is_string() ? n.get<std::string>() : n.at("id").get<std::string>();
      std::optional<ExactDensityMatrix> state;
      if (n.is_object() && n.contains("state")) {
        state = ExactDensityMatrix::make(matrix_from_json(n.at("state")));
      }
      g.add_node({id, std::move(state)});
    }
    auto node = [&](const nlohmann::json& v) {
      const auto i = g.find_id(v.get<std::string>());
      if (!i) throw ParseError("edge refers to unknown node '" + v.get<std::string>() + "'");
      return *i;
    };
    for (const auto& e : j.at("edges")) {
      GraphEdge edge{node(e.at("from")), node(e.at("to")), e.value("label", ""), Rational(1)};
      if (e.contains("length")) edge.length = Rational::parse(e.at("length").get<std::string>());
      g.add_edge(std::move(edge));
    }
    if (j.contains("seeds")) {
      for (const auto& s : j.at("seeds")) g.seeds_.push_back(node(s));
    }
    g.depth_bound_ = j.value("depth_bound", std::size_t{0});
    g.truncated_ = j.value("truncated", false);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph: ") + e.what());
  }
  return g;
}

nlohmann::json ReachGraph::to_json() const {
  using nlohmann::json;
  json nodes = json::array();
  for (const auto& n : nodes_) {
    json o = {{"id", n.id}};
    if (n.state) o["state"] = undec::to_json(n.state->matrix());
    nodes.push_back(std::move(o));
  }
  json edges = json::array();
  for (const auto& e : edges_) {
    edges.push_back({{"from", nodes_[e.from].id},
                     {"to", nodes_[e.to].id},
                     {"label", e.label},
                     {"length", e.length.str()}});
  }
  json seeds = json::array();
  for (const auto s : seeds_) seeds.push_back(nodes_[s].id);
  return {{"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"seeds", std::move(seeds)},
          {"depth_bound", depth_bound_},
          {"truncated", truncated_}};
}

ReachGraph explore(const std::vector<LabeledChannel>& channels,
                   const std::vector<ExactDensityMatrix>& seeds, std::size_t max_depth,
                   const ExploreOptions& options) {
  if (seeds.empty()) throw DomainError("explore: no seed states");
  const std::size_t dim = seeds.front().dim();
  for (const auto& s : seeds)
    if (s.dim() != dim) throw ShapeError("explore: seeds of different dimensions");
  for (const auto& c : channels) {
    if (const auto* k = std::get_if<KrausChannel>(&c.map)) {
      if (k->ops.empty()) throw DomainError("channel '" + c.label + "' has no Kraus operators");
      for (const auto& op : k->ops)
        if (op.rows() != dim || op.cols() != dim) {
          throw ShapeError("channel '" + c.label + "' has a Kraus operator of the wrong size");
        }
    }
    if (channel_dim(c.map) != dim) {
      throw ShapeError("channel '" + c.label + "' does not act on dimension " +
                       std::to_string(dim));
    }
    const ExactMatrix j = choi(c.map);
    const CptpCertificate cert = certify_cptp(j, dim);
    if (!cert.ok()) {
      throw NotCptpError("channel '" + c.label + "' is not CPTP: " + cert.reason() +
                         "; Choi matrix " + undec::to_json(j).dump());
    }
  }

  ReachGraph g;
  g.depth_bound_ = max_depth;
  std::unordered_map<Digest, std::vector<std::size_t>> index;
  // Returns the node for `m`, adding it when new and the budget allows.
  auto intern = [&](const ExactMatrix& m, const Digest& d,
                    bool& added) -> std::optional<std::size_t> {
    added = false;
    auto& bucket = index[d];
    for (const auto i : bucket)
      if (g.nodes_[i].state->matrix() == m) return i;
    if (g.nodes_.size() >= options.node_budget) {
      g.truncated_ = true;
      return std::nullopt;
    }
    std::string id = d.hex();
    if (!bucket.empty()) id += "#" + std::to_string(bucket.size());
    g.nodes_.push_back({std::move(id), ExactDensityMatrix::assume_valid(m)});
    bucket.push_back(g.nodes_.size() - 1);
    added = true;
    return g.nodes_.size() - 1;
  };

  std::vector<std::size_t> frontier;
  for (const auto& s : seeds) {
    bool added = false;
    const auto i = intern(s.matrix(), digest(s.matrix()), added);
    if (!i) break;
    if (std::find(g.seeds_.begin(), g.seeds_.end(), *i) == g.seeds_.end()) {
      g.seeds_.push_back(*i);
      frontier.push_back(*i);
    }
  }

  const std::size_t k = channels.size();
  for (std::size_t depth = 1; depth <= max_depth && !frontier.empty() && k > 0; ++depth) {
    const std::size_t n = frontier.size() * k;
    struct Out {
      std::optional<ExactMatrix> m;
      Digest d;
    };
    std::vector<Out> outs(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
      outs[i].m = apply_linear(channels[i % k].map, g.nodes_[frontier[i / k]].state->matrix());
      outs[i].d = digest(*outs[i].m);
    });
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < n; ++i) {
      bool added = false;
      const auto to = intern(*outs[i].m, outs[i].d, added);
      if (!to) continue;
      g.edges_.push_back({frontier[i / k], *to, channels[i % k].label, Rational(1)});
      if (added) next.push_back(*to);
    }
    frontier = std::move(next);
  }
  return g;
}

ExactDensityMatrix reference_state() {
  using G = GaussianRational;
  const G i = G::i();
  const ExactMatrix m = ExactMatrix::from_rows({{G(3), G(0), G(0), G(0)},
                                                {G(1), G(2), G(0), G(0)},
                                                {i, G(1), G(2), G(0)},
                                                {G(1), -i, G(1), G(1)}});
  const ExactMatrix p = m * dagger(m);
  return ExactDensityMatrix::make(GaussianRational(Rational(1)) / trace(p) * p);
}

nlohmann::json ReachResult::to_json() const {
  return {{"reachable", reachable},
          {"status", reachable ? "Reachable" : "NotReachableWithinBound"},
          {"path", path},
          {"depth_bound", depth_bound}};
}

ReachResult reach(const ReachGraph& g, std::size_t from, std::size_t to) {
  if (from >= g.nodes().size()) throw UnknownStateError("reach: source is not a node");
  ReachResult r;
  r.depth_bound = g.depth_bound();
  if (to >= g.nodes().size()) return r;
  std::vector<std::vector<std::size_t>> out(g.nodes().size());
  for (std::size_t e = 0; e < g.edges().size(); ++e) out[g.edges()[e].from].push_back(e);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> via(g.nodes().size(), kNone);
  std::vector<bool> seen(g.nodes().size(), false);
  std::deque<std::size_t> queue{from};
  seen[from] = true;
  while (!queue.empty() && !seen[to]) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (const std::size_t e : out[u]) {
      const std::size_t v = g.edges()[e].to;
      if (seen[v]) continue;
      seen[v] = true;
      via[v] = e;
      queue.push_back(v);
    }
  }
  if (!seen[to]) return r;
  r.reachable = true;
  for (std::size_t v = to; v != from; v = g.edges()[via[v]].from) {
    r.path.push_back(g.edges()[via[v]].label);
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

ReachResult reach(const ReachGraph& g, const ExactDensityMatrix& from,
                  const ExactDensityMatrix& to) {
  const auto f = g.find_state(from.matrix());
  if (!f) throw UnknownStateError("reach: source state is not a node of the graph");
  const auto t = g.find_state(to.matrix());
  return reach(g, *f, t.value_or(g.nodes().size()));
}

QuotientDAG quotient(const ReachGraph& g) {
  const std::size_t n = g.nodes().size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : g.edges()) adj[e.from].push_back(e.to);

  // Iterative Tarjan.
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next child)
  std::size_t counter = 0;
  std::size_t ncomp = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      auto& [v, child] = call.back();
      if (child == 0) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (child < adj[v].size()) {
        const std::size_t w = adj[v][child++];
        if (index[w] == kUnset) {
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  // Renumber classes by first node.
  QuotientDAG q;
  q.class_of.assign(n, 0);
  std::vector<std::size_t> renumber(ncomp, kUnset);
  for (std::size_t v = 0; v < n; ++v) {
    if (renumber[comp[v]] == kUnset) {
      renumber[comp[v]] = q.classes.size();
      q.classes.emplace_back();
    }
    q.class_of[v] = renumber[comp[v]];
    q.classes[q.class_of[v]].push_back(v);
  }
  std::map<std::pair<std::size_t, std::size_t>, Rational> longest;
  for (const auto& e : g.edges()) {
    const std::size_t a = q.class_of[e.from];
    const std::size_t b = q.class_of[e.to];
    if (a == b) continue;
    auto [it, inserted] = longest.try_emplace({a, b}, e.length);
    if (!inserted && it->second < e.length) it->second = e.length;
  }
  for (const auto& [key, len] : longest) q.edges.push_back({key.first, key.second, len});
  return q;
}

nlohmann::json QuotientDAG::to_json(const ReachGraph& g) const {
  using nlohmann::json;
  json cls = json::array();
  for (const auto& c : classes) {
    json members = json::array();
    for (const auto v : c) members.push_back(g.nodes()[v].id);
    cls.push_back(std::move(members));
  }
  json es = json::array();
  for (const auto& e : edges) {
    es.push_back({{"from", e.from}, {"to", e.to}, {"length", e.length.str()}});
  }
  return {{"classes", std::move(cls)}, {"edges", std::move(es)}};
}

MonotoneTable monotone(const QuotientDAG& q, std::size_t base) {
  if (base >= q.size()) throw DomainError("monotone: base class out of range");
  const std::vector<std::size_t> order = topological_order(q);
  std::vector<std::vector<const DagEdge*>> out(q.size());
  for (const auto& e : q.edges) out[e.from].push_back(&e);
  std::vector<std::optional<Rational>> longest(q.size());
  longest[base] = Rational(0);
  for (const std::size_t c : order) {
    if (!longest[c]) continue;
    for (const DagEdge* e : out[c]) {
      const Rational cand = *longest[c] + e->length;
      if (!longest[e->to] || *longest[e->to] < cand) longest[e->to] = cand;
    }
  }
  MonotoneTable t;
  t.base = base;
  for (const auto& l : longest) {
    t.values.push_back(l ? Rational(1) / (*l + Rational(1)) : Rational(2));
  }
  return t;
}

std::vector<MonotoneTable> monotone_family(const QuotientDAG& q) {
  std::vector<MonotoneTable> family;
  family.reserve(q.size());
  for (std::size_t c = 0; c < q.size(); ++c) family.push_back(monotone(q, c));
  return family;
}

nlohmann::json MonotoneTable::to_json() const {
  nlohmann::json values_j = nlohmann::json::object();
  for (std::size_t c = 0; c < values.size(); ++c) values_j[std::to_string(c)] = values[c].str();
  return {{"base", base}, {"values", std::move(values_j)}};
}

CompatibilityResult check_compatible(const ReachGraph& g, const QuotientDAG& q,
                                     const std::vector<MonotoneTable>& family) {
  CompatibilityResult r;
  for (const auto& f : family) {
    if (f.values.size() != q.size()) throw ShapeError("monotone table does not match quotient");
    for (const auto& e : g.edges()) {
      if (f.values[q.class_of[e.from]] < f.values[q.class_of[e.to]]) {
        r.ok = false;
        r.edge = e;
        r.table_base = f.base;
        return r;
      }
    }
  }
  return r;
}

nlohmann::json CompatibilityResult::to_json(const ReachGraph& g) const {
  nlohmann::json j = {{"ok", ok}};
  if (edge) {
    j["counterexample"] = {{"from", g.nodes()[edge->from].id},
                           {"to", g.nodes()[edge->to].id},
                           {"label", edge_label(*edge)},
                           {"table_base", *table_base}};
  }
  return j;
}

CompletenessResult check_complete(const QuotientDAG& q,
                                  const std::vector<MonotoneTable>& family) {
  const std::size_t n = q.size();
  const std::size_t words = (n + 63) / 64;

  // Reachability: reflexive-transitive closure of the DAG edges (Warshall).
  std::vector<Bits> reach(n, Bits(words, 0));
  for (std::size_t c = 0; c < n; ++c) set_bit(reach[c], c);
  for (const auto& e : q.edges) set_bit(reach[e.from], e.to);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (test_bit(reach[i], k))
        for (std::size_t w = 0; w < words; ++w) reach[i][w] |= reach[k][w];

  // Dominance: dom[rho] = {sigma : f(sigma) <= f(rho) for all f}.
  std::vector<Bits> dom(n, Bits(words, ~std::uint64_t{0}));
  for (const auto& f : family) {
    if (f.values.size() != n) throw ShapeError("monotone table does not match quotient");
    const std::vector<std::size_t> rank = ranks(f);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
    Bits running(words, 0);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && rank[idx[j]] == rank[idx[i]]) set_bit(running, idx[j++]);
      for (std::size_t t = i; t < j; ++t)
        for (std::size_t w = 0; w < words; ++w) dom[idx[t]][w] &= running[w];
      i = j;
    }
  }

  CompletenessResult r;
  for (std::size_t rho = 0; rho < n; ++rho) {
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t diff = dom[rho][w] ^ reach[rho][w];
      if (w == words - 1 && n % 64 != 0) diff &= (std::uint64_t{1} << (n % 64)) - 1;
      if (diff == 0) continue;
      const std::size_t sigma = w * 64 + static_cast<std::size_t>(std::countr_zero(diff));
      r.ok = false;
      r.pair = {rho, sigma};
      r.dominated = test_bit(dom[rho], sigma);
      r.reachable = test_bit(reach[rho], sigma);
      return r;
    }
  }
  return r;
}

nlohmann::json CompletenessResult::to_json() const {
  nlohmann::json j = {{"ok", ok}};
  if (pair) {
    j["counterexample"] = {{"rho", pair->first},
                           {"sigma", pair->second},
                           {"dominated", dominated},
                           {"reachable", reachable}};
  }
  return j;
}

std::string to_dot(const ReachGraph& g, const QuotientDAG* q) {
  auto name = [&](std::size_t v) { return "n" + std::to_string(v); };
  auto label = [&](std::size_t v) { return g.nodes()[v].id.substr(0, 8); };
  std::string out = "digraph reach {\n";
  if (q != nullptr) {
    for (std::size_t c = 0; c < q->size(); ++c) {
      out += "  subgraph cluster_" + std::to_string(c) + " {\n    label=\"class " +
             std::to_string(c) + "\";\n";
      for (const auto v : q->classes[c]) {
        out += "    " + name(v) + " [label=\"" + label(v) + "\"];\n";
      }
      out += "  }\n";
    }
  } else {
    for (std::size_t v = 0; v < g.nodes().size(); ++v) {
      out += "  " + name(v) + " [label=\"" + label(v) + "\"];\n";
    }
  }
  for (const auto& e : g.edges()) {
    out += "  " + name(e.from) + " -> " + name(e.to) + " [label=\"" + edge_label(e) + "\"];\n";
  }
  return out + "}\n";
}

std::string to_dot(const QuotientDAG& q) {
  std::string out = "digraph quotient {\n";
  for (std::size_t c = 0; c < q.size(); ++c) {
    out += "  c" + std::to_string(c) + " [label=\"class " + std::to_string(c) + " (" +
           std::to_string(q.classes[c].size()) + ")\"];\n";
  }
  for (const auto& e : q.edges) {
    out += "  c" + std::to_string(e.from) + " -> c" + std::to_string(e.to) + " [label=\"" +
           e.length.str() + "\"];\n";
  }
  return out + "}\n";
}

}  // namespace undec
