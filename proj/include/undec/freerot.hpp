#pragma once

// The free pair of SU(2) rotations and the homomorphism from binary words
// into the semigroup they generate.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "undec/exact.hpp"

namespace undec {

/// A finite word over {0,1}; may be empty.
class BinaryWord {
 public:
  BinaryWord() = default;
  /// Throws ParseError on any character other than '0' or '1'.
  explicit BinaryWord(std::string bits);

  const std::string& bits() const { return bits_; }
  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  friend BinaryWord operator+(const BinaryWord& a, const BinaryWord& b) {
    BinaryWord out;
    out.bits_ = a.bits_ + b.bits_;
    return out;
  }
  friend bool operator==(const BinaryWord&, const BinaryWord&) = default;
  friend auto operator<=>(const BinaryWord&, const BinaryWord&) = default;

 private:
  std::string bits_;
};

using Axis = std::array<Rational, 3>;

/// cos θ, sin θ and the two rotation axes. The defaults are the 3-4-5
/// triple about z and x.
struct RotationParams {
  Rational cos_theta{3, 5};
  Rational sin_theta{4, 5};
  Axis axis_a{Rational(0), Rational(0), Rational(1)};
  Axis axis_b{Rational(1), Rational(0), Rational(0)};

  nlohmann::json to_json() const;
  static RotationParams from_json(const nlohmann::json& j);
};

/// Checks the freeness conditions: cos θ rational outside {0, ±1, ±1/2},
/// cos² + sin² = 1 exactly, unit axes, orthogonal axes. Throws
/// FreenessConditionError, ExactnessError or AxisError respectively.
void validate(const RotationParams& params);

/// cos θ·I + i sin θ·(axis·σ).
ExactMatrix rotation(const Rational& cos_theta, const Rational& sin_theta,
                     const Axis& axis);

struct FreePair {
  ExactMatrix a;
  ExactMatrix b;
  RotationParams params;
};

/// Builds A and B after validate(params).
FreePair make_free_pair(const RotationParams& params);
/// Builds A and B without any check. Used to inject deliberately non-free
/// pairs into the freeness scan.
FreePair make_pair_unchecked(const RotationParams& params);

/// Homomorphism {0,1}* -> <A,B>: ε ↦ I, 0 ↦ A, 1 ↦ B, concatenation ↦
/// product in word order.
ExactMatrix gamma(const BinaryWord& w, const FreePair& pair);

struct CollisionReport {
  std::size_t scanned_max_len = 0;
  std::size_t word_count = 0;
  /// Pairs of distinct words with equal matrices, as (first seen, later).
  std::vector<std::pair<std::string, std::string>> collisions;
  /// Words whose matrix is c·I.
  std::vector<std::string> scalar_words;
  bool truncated = false;

  bool empty() const { return collisions.empty() && scalar_words.empty(); }
  nlohmann::json to_json() const;
};

struct ScanOptions {
  /// Upper bound on the number of words evaluated.
  std::size_t word_budget = 1u << 22;
  unsigned workers = 1;
};

/// Evaluates gamma on every nonempty word of length <= max_len (by length,
/// then lexicographically) and reports equal-matrix pairs and scalar words.
/// Every digest match is confirmed exactly before being reported.
CollisionReport freeness_scan(const FreePair& pair, std::size_t max_len,
                              const ScanOptions& options = {});

}  // namespace undec
