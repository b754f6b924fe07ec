#include "undec/pcp.hpp"

#include <unordered_set>

#include "undec/error.hpp"
#include "undec/parallel.hpp"

namespace undec {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Overhang configuration: `top_ahead` says which side holds the unmatched
// suffix. The empty suffix is a solution and is never stored.
struct Config {
  bool top_ahead = true;
  std::string overhang;
  TileWord word;
};

std::string config_key(bool top_ahead, const std::string& overhang) {
  return (top_ahead ? '+' : '-') + overhang;
}

// Extends `c` by tile t. Returns false when neither side is a prefix of the
// other, i.e. the branch can never close.
bool extend(const Config& c, const Tile& t, bool& top_ahead, std::string& overhang) {
  const std::string top = (c.top_ahead ? c.overhang : std::string()) + t.top.bits();
  const std::string bottom = (c.top_ahead ? std::string() : c.overhang) + t.bottom.bits();
  if (top.size() >= bottom.size()) {
    if (top.compare(0, bottom.size(), bottom) != 0) return false;
    top_ahead = true;
    overhang = top.substr(bottom.size());
  } else {
    if (bottom.compare(0, top.size(), top) != 0) return false;
    top_ahead = false;
    overhang = bottom.substr(top.size());
  }
  return true;
}

}  // namespace

PCPInstance::PCPInstance(std::vector<Tile> tiles) : tiles_(std::move(tiles)) {
  if (tiles_.empty()) throw EmptyInstanceError("PCP instance has no tiles");
}

PCPInstance PCPInstance::parse(std::string_view text) {
  std::vector<Tile> tiles;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto bar = line.find('|');
    if (bar == std::string_view::npos || line.find('|', bar + 1) != std::string_view::npos) {
      throw ParseError("expected exactly one '|' separating top and bottom", line_no);
    }
    const std::string_view top = trim(line.substr(0, bar));
    const std::string_view bottom = trim(line.substr(bar + 1));
    for (const std::string_view side : {top, bottom}) {
      for (const char ch : side) {
        if (ch != '0' && ch != '1') {
          throw ParseError("non-binary character '" + std::string(1, ch) + "'", line_no);
        }
      }
    }
    tiles.push_back({BinaryWord(std::string(top)), BinaryWord(std::string(bottom))});
  }
  if (tiles.empty()) throw EmptyInstanceError("PCP instance has no tiles");
  return PCPInstance(std::move(tiles));
}

const Tile& PCPInstance::tile(std::size_t index) const {
  if (index == 0 || index > tiles_.size()) {
    throw DomainError("tile index " + std::to_string(index) + " outside [1, " +
                      std::to_string(tiles_.size()) + "]");
  }
  return tiles_[index - 1];
}

bool PCPInstance::has_degenerate_tile() const {
  for (const auto& t : tiles_)
    if (t.top.empty() && t.bottom.empty()) return true;
  return false;
}

std::string PCPInstance::to_text() const {
  std::string out;
  for (const auto& t : tiles_) out += t.top.bits() + "|" + t.bottom.bits() + "\n";
  return out;
}

BinaryWord apply_hom(const PCPInstance& inst, Side side, const TileWord& w) {
  std::string out;
  for (const std::size_t i : w) {
    const Tile& t = inst.tile(i);
    out += (side == Side::Top ? t.top : t.bottom).bits();
  }
  return BinaryWord(std::move(out));
}

bool verify_solution(const PCPInstance& inst, const TileWord& w) {
  if (w.empty()) return false;
  for (const std::size_t i : w)
    if (i == 0 || i > inst.size()) return false;
  return apply_hom(inst, Side::Top, w) == apply_hom(inst, Side::Bottom, w);
}

std::string to_string(SearchStatus s) {
  return s == SearchStatus::Found ? "Found" : "ExhaustedToDepth";
}

nlohmann::json SearchOutcome::to_json() const {
  nlohmann::json j = {{"status", to_string(status)},
                      {"depth_reached", depth_reached},
                      {"nodes_expanded", nodes_expanded},
                      {"truncated", truncated},
                      {"frontier_exhausted", frontier_exhausted}};
  j["witness"] = witness ? nlohmann::json(*witness) : nlohmann::json(nullptr);
  return j;
}

SearchOutcome solve_bounded(const PCPInstance& inst, std::size_t max_depth,
                            const PcpSearchOptions& options) {
  if (max_depth == 0) throw DomainError("solve_bounded: max_depth must be >= 1");
  if (inst.has_degenerate_tile()) {
    throw DegenerateInstanceError(
        "instance has a tile with both sides empty; every instance containing "
        "it is trivially solvable");
  }
  SearchOutcome out;
  const std::size_t k = inst.size();
  std::vector<Config> frontier{Config{true, "", {}}};
  std::unordered_set<std::string> visited;

  for (std::size_t depth = 1; depth <= max_depth; ++depth) {
    const std::size_t n = frontier.size() * k;
    if (out.nodes_expanded + n > options.node_budget) {
      out.truncated = true;
      out.depth_reached = depth - 1;
      return out;
    }
    struct Child {
      bool alive = false;
      bool top_ahead = true;
      std::string overhang;
    };
    std::vector<Child> children(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
      Child& c = children[i];
      c.alive = extend(frontier[i / k], inst.tiles()[i % k], c.top_ahead, c.overhang);
    });
    out.nodes_expanded += n;

    std::vector<Config> next;
    for (std::size_t i = 0; i < n; ++i) {
      Child& c = children[i];
      if (!c.alive) continue;
      TileWord word = frontier[i / k].word;
      word.push_back(i % k + 1);
      if (c.overhang.empty()) {
        out.status = SearchStatus::Found;
        out.witness = std::move(word);
        out.depth_reached = depth;
        return out;
      }
      if (!visited.insert(config_key(c.top_ahead, c.overhang)).second) continue;
      next.push_back({c.top_ahead, std::move(c.overhang), std::move(word)});
    }
    frontier = std::move(next);
    if (frontier.empty()) {
      out.frontier_exhausted = true;
      break;
    }
  }
  out.depth_reached = max_depth;
  return out;
}

}  // namespace undec
