#pragma once

// State reachability graphs under finite sets of exact channels, their
// quotient by mutual reachability, and the longest-path monotone family on
// the quotient with exact compatibility and completeness checks.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "undec/channel.hpp"
#include "undec/exact.hpp"

namespace undec {

struct LabeledChannel {
  std::string label;
  AnyChannel map;
};

struct GraphNode {
  /// Digest hex for explored states, the given name for loaded graphs.
  std::string id;
  std::optional<ExactDensityMatrix> state;
};

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string label;
  Rational length{1};
};

struct ExploreOptions {
  std::size_t node_budget = 1u << 16;
  unsigned workers = 1;
};

class ReachGraph {
 public:
  ReachGraph() = default;

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const std::vector<std::size_t>& seeds() const { return seeds_; }
  std::size_t depth_bound() const { return depth_bound_; }
  bool truncated() const { return truncated_; }

  /// Exact lookup of a state among the nodes.
  std::optional<std::size_t> find_state(const ExactMatrix& state) const;
  std::optional<std::size_t> find_id(const std::string& id) const;

  /// Abstract graph from {"nodes": [name | {"id": name}], "edges":
  /// [{"from", "to", "label"?, "length"?}]}. Lengths are positive
  /// rationals in "p/q" form and default to 1.
  static ReachGraph from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Appends a node; ids must be unique.
  std::size_t add_node(GraphNode node);
  void add_edge(GraphEdge edge);
  void set_seeds(std::vector<std::size_t> seeds) { seeds_ = std::move(seeds); }

 private:
  friend ReachGraph explore(const std::vector<LabeledChannel>&,
                            const std::vector<ExactDensityMatrix>&, std::size_t,
                            const ExploreOptions&);

  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::size_t> seeds_;
  std::size_t depth_bound_ = 0;
  bool truncated_ = false;
};

/// Breadth-first closure of the seeds under the channels. Nodes first
/// reached at max_depth are not expanded. Every map is certified CPTP
/// first; a failure throws NotCptpError naming the map and its Choi
/// matrix. Stops adding nodes (and sets truncated) at the node budget.
ReachGraph explore(const std::vector<LabeledChannel>& channels,
                   const std::vector<ExactDensityMatrix>& seeds, std::size_t max_depth,
                   const ExploreOptions& options = {});

/// Fixed full-rank 4×4 state with distinct eigenvalues and no alignment to
/// the computational basis, so that no nontrivial block unitary of the
/// reduction fixes it.
ExactDensityMatrix reference_state();

struct ReachResult {
  bool reachable = false;
  /// Edge labels in application order (first applied first).
  std::vector<std::string> path;
  std::size_t depth_bound = 0;
  nlohmann::json to_json() const;
};

/// Shortest path by BFS over edges in insertion order. `from` must be a
/// node (UnknownStateError otherwise); a `to` outside the graph is not
/// reachable within the bound.
ReachResult reach(const ReachGraph& g, std::size_t from, std::size_t to);
ReachResult reach(const ReachGraph& g, const ExactDensityMatrix& from,
                  const ExactDensityMatrix& to);

struct DagEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  Rational length{1};
};

struct QuotientDAG {
  /// Classes in order of their first node; class_of[node] indexes them.
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> class_of;
  /// One edge per ordered class pair, with the longest parallel length.
  std::vector<DagEdge> edges;

  std::size_t size() const { return classes.size(); }
  nlohmann::json to_json(const ReachGraph& g) const;
};

/// Strongly connected components (Tarjan), collapsed.
QuotientDAG quotient(const ReachGraph& g);

struct MonotoneTable {
  std::size_t base = 0;
  /// Per class: 1/(ℓ+1) for ℓ the longest path length from base, 2 when
  /// unreachable.
  std::vector<Rational> values;
  nlohmann::json to_json() const;
};

/// Throws ContractViolation when q has a cycle.
MonotoneTable monotone(const QuotientDAG& q, std::size_t base);
/// One table per class.
std::vector<MonotoneTable> monotone_family(const QuotientDAG& q);

struct CompatibilityResult {
  bool ok = true;
  std::optional<GraphEdge> edge;  // violating edge
  std::optional<std::size_t> table_base;
  nlohmann::json to_json(const ReachGraph& g) const;
};

/// f(v) <= f(u) for every edge u -> v and every table f.
CompatibilityResult check_compatible(const ReachGraph& g, const QuotientDAG& q,
                                     const std::vector<MonotoneTable>& family);

struct CompletenessResult {
  bool ok = true;
  /// First class pair (rho, sigma) where dominance and reachability differ.
  std::optional<std::pair<std::size_t, std::size_t>> pair;
  bool dominated = false;
  bool reachable = false;
  nlohmann::json to_json() const;
};

/// For every ordered class pair: [f(sigma) <= f(rho) for all f] iff sigma
/// is reachable from rho, with reachability from a transitive closure of
/// the DAG edges.
CompletenessResult check_complete(const QuotientDAG& q,
                                  const std::vector<MonotoneTable>& family);

/// Nodes labelled by id prefix; with a quotient, classes become clusters.
std::string to_dot(const ReachGraph& g, const QuotientDAG* q = nullptr);
std::string to_dot(const QuotientDAG& q);

}  // namespace undec
