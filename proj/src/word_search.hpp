#pragma once

// Shortest-word search over a finite set of (U, damped) generators for a
// target unitary up to global phase, by meeting in the middle.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "undec/exact.hpp"
#include "undec/reduction.hpp"

namespace undec::detail {

struct WordTarget {
  ExactMatrix unitary;  // compared up to phase
  bool damped = true;
};

using Seq = std::vector<std::uint16_t>;  // generator indices, application order

struct WordSearchResult {
  /// Every witness of the minimal length that survives deduplication,
  /// sorted lexicographically. Empty when nothing was found.
  std::vector<Seq> witnesses;
  /// Length of the witnesses, or the largest length fully checked.
  std::size_t depth = 0;
  std::size_t nodes_expanded = 0;
  bool truncated = false;
};

/// Product U_{s_n}…U_{s_1} for the application-order sequence s.
ExactMatrix product(const std::vector<ExactMatrix>& gens, const Seq& s);

/// Searches nonempty words of length 1..max_depth. Words are deduplicated
/// by (product up to phase, damped flag); the damped flag of a word is the
/// OR of its generators' flags.
WordSearchResult find_words(const std::vector<ExactMatrix>& gens,
                            const std::vector<bool>& damped, const WordTarget& target,
                            std::size_t max_depth, const SearchOptions& options);

}  // namespace undec::detail
