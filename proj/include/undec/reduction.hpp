#pragma once

// The PCP -> channel-semigroup membership reduction: compiles an instance
// into rotated depolarising generators H_i, G_i, semi-decides whether the
// target ψ(ρ) = λρ + (1-λ)I/4 lies in the generated semigroup, and compares
// two generating sets up to a depth bound.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "undec/channel.hpp"
#include "undec/freerot.hpp"
#include "undec/pcp.hpp"

namespace undec {

/// The compiled generating set. The identity element is implicit.
struct GeneratorSet {
  PCPInstance instance;
  FreePair pair;
  /// H_1..H_k: blockdiag(γ(h(a_i)), A^i B).
  std::vector<ChannelElement> h_gens;
  /// G_1..G_k: blockdiag(γ(g(a_i))†, B†(A^i)†).
  std::vector<ChannelElement> g_gens;

  /// H_1..H_k followed by G_1..G_k; this order is the search tie-break.
  std::vector<ChannelElement> generators() const;

  /// Bundle with the instance text, rotation params, damping assignment and
  /// all 2k unitaries in the canonical exact text format.
  nlohmann::json to_json() const;
  /// Rebuilds from the instance and params and checks the embedded
  /// unitaries match; throws ParseError on any mismatch.
  static GeneratorSet from_json(const nlohmann::json& j);
};

/// Every generator at the same damping, which must lie in (0,1).
GeneratorSet compile(const PCPInstance& inst, const FreePair& pair, const Rational& damping);
/// Per-generator dampings in generators() order (2k values, each in (0,1)).
GeneratorSet compile(const PCPInstance& inst, const FreePair& pair,
                     const std::vector<Rational>& dampings);

/// ψ = (I, damping, []) with damping in (0,1).
ChannelElement make_target(const Rational& damping, std::size_t dim = 4);

/// Label attached to ψ when it is added to a generating set.
inline constexpr const char* kTargetLabel = "PSI";

enum class MembershipMode { Generic, Structured };
std::string to_string(MembershipMode m);

struct SearchOptions {
  std::size_t node_budget = 1u << 21;
  unsigned workers = 1;
};

struct MembershipOutcome {
  SearchStatus status = SearchStatus::ExhaustedToDepth;
  MembershipMode mode = MembershipMode::Generic;
  /// Generator labels in composition order (the last label acts first).
  std::optional<std::vector<std::string>> witness;
  /// c with U = c·I for the witness product.
  std::optional<GaussianRational> scalar_value;
  /// Present when the witness is a cyclic rotation of
  /// G_{a_n}…G_{a_1}H_{a_1}…H_{a_n}; it verifies whenever the pair is free.
  std::optional<TileWord> extracted;
  /// Product of the witness's generator dampings and the exponent of each
  /// generator in it.
  std::optional<Rational> damping;
  std::map<std::string, std::size_t> damping_monomial;
  std::size_t depth_reached = 0;
  std::size_t nodes_expanded = 0;
  bool truncated = false;

  /// True when the witness is scalar with c != 1 (e.g. -I).
  bool nontrivial_phase() const;
  nlohmann::json to_json() const;
};

/// Generic mode: breadth-first over all generator words (meet in the
/// middle, visited set keyed by the exact product up to phase), accepting
/// nonempty words whose product is scalar. Among witnesses of the minimal
/// length, one of the two-phase shape is preferred, then the
/// lexicographically least in application order.
///
/// Structured mode: only words of the shape G_{a_n}…G_{a_1}H_{a_1}…H_{a_n},
/// searched over tile words a_1…a_n with the exact sandwich product as
/// state; the witness is the lexicographically least shortest tile word.
MembershipOutcome membership_search(const GeneratorSet& gens, std::size_t max_depth,
                                    MembershipMode mode, const SearchOptions& options = {});

/// Recognises a cyclic rotation of G_{a_n}…G_{a_1}H_{a_1}…H_{a_n} (labels
/// in composition order) and returns a_1…a_n.
std::optional<TileWord> extract_tile_word(const std::vector<std::string>& witness);

/// A finite generating set; each element carries a one-label word.
using ChannelSet = std::vector<ChannelElement>;

/// gens.generators() plus ψ at `damping`, labelled kTargetLabel.
ChannelSet augmented_with_target(const GeneratorSet& gens, const Rational& damping);

enum class DiffStatus { Distinct, IndistinguishableUpToDepth };
std::string to_string(DiffStatus s);

struct DiffMatch {
  std::string label;          // generator of one set
  std::string found_in;       // "f1" or "f2"
  std::vector<std::string> word;  // composition order, in the other set
};

struct DiffOutcome {
  DiffStatus status = DiffStatus::IndistinguishableUpToDepth;
  /// Largest depth up to which the reported facts were checked.
  std::size_t depth = 0;
  /// For Distinct: the generator that is absent from the other set's
  /// bounded closure.
  std::optional<std::string> witness_label;
  std::optional<std::string> witness_side;  // set containing the witness
  std::optional<Rational> witness_damping;
  std::optional<std::string> witness_unitary_digest;
  std::vector<DiffMatch> matches;
  std::size_t nodes_expanded = 0;
  bool truncated = false;

  nlohmann::json to_json() const;
};

/// Bounded refuter for "f1 and f2 generate the same resource theory".
/// Channels are compared by canonical form: the unitary up to global phase
/// and whether the damping is trivial (λ = 1) or free in (0,1), since each
/// generator family ranges over every λ in (0,1). Each generator of one set
/// is searched in the other's closure up to max_depth; the first one not
/// found is a Distinct witness. Never claims equality.
DiffOutcome theory_diff(const ChannelSet& f1, const ChannelSet& f2, std::size_t max_depth,
                        const SearchOptions& options = {});

}  // namespace undec
