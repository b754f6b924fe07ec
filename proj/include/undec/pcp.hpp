#pragma once

// Post Correspondence Problem instances ("dominoes"), their text format,
// and a bounded breadth-first semi-decision search.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "undec/freerot.hpp"

namespace undec {

/// One domino: top = h(a_i), bottom = g(a_i).
struct Tile {
  BinaryWord top;
  BinaryWord bottom;
  friend bool operator==(const Tile&, const Tile&) = default;
};

/// 1-based tile indices.
using TileWord = std::vector<std::size_t>;

enum class Side { Top, Bottom };

class PCPInstance {
 public:
  /// Throws EmptyInstanceError when `tiles` is empty.
  explicit PCPInstance(std::vector<Tile> tiles);

  /// One tile per line as "top|bottom"; '#' starts a comment, blank lines
  /// are skipped. Either side may be empty.
  static PCPInstance parse(std::string_view text);

  std::size_t size() const { return tiles_.size(); }
  /// 1-based.
  const Tile& tile(std::size_t index) const;
  const std::vector<Tile>& tiles() const { return tiles_; }

  /// True when some tile has both sides empty.
  bool has_degenerate_tile() const;

  /// Canonical text form, one "top|bottom" line per tile.
  std::string to_text() const;

  friend bool operator==(const PCPInstance&, const PCPInstance&) = default;

 private:
  std::vector<Tile> tiles_;
};

/// Concatenation of the chosen side's words along w. Throws DomainError on
/// an index outside [1, size].
BinaryWord apply_hom(const PCPInstance& inst, Side side, const TileWord& w);

/// h(w) = g(w) for a nonempty, in-range w.
bool verify_solution(const PCPInstance& inst, const TileWord& w);

enum class SearchStatus { Found, ExhaustedToDepth };
std::string to_string(SearchStatus s);

struct SearchOutcome {
  SearchStatus status = SearchStatus::ExhaustedToDepth;
  std::optional<TileWord> witness;
  std::size_t depth_reached = 0;
  std::size_t nodes_expanded = 0;
  /// The node budget ran out before max_depth was covered.
  bool truncated = false;
  /// Every configuration died out before max_depth: no solution exists at
  /// any length.
  bool frontier_exhausted = false;

  nlohmann::json to_json() const;
};

struct PcpSearchOptions {
  std::size_t node_budget = 1u << 22;
  unsigned workers = 1;
};

/// Breadth-first search over overhang configurations (which side is ahead,
/// and the unmatched suffix). A Found witness is a shortest solution, and
/// the lexicographically least one among solutions of that length.
/// Throws DegenerateInstanceError when a tile has both sides empty.
SearchOutcome solve_bounded(const PCPInstance& inst, std::size_t max_depth,
                            const PcpSearchOptions& options = {});

}  // namespace undec
