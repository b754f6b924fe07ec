#pragma once

// Exact quantum channels: rotated depolarising elements (U, λ) and finite
// Kraus maps, with application, composition and Choi-matrix certification.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "undec/exact.hpp"

namespace undec {

/// The map ρ ↦ λ·UρU† + (1-λ)·tr(ρ)·I/d, labelled by the word of generators
/// it was composed from (composition order: the last label acts first).
class ChannelElement {
 public:
  /// Checks that `unitary` is exactly unitary and 0 < damping <= 1.
  static ChannelElement make(ExactMatrix unitary, Rational damping,
                             std::vector<std::string> word);
  /// The identity element: (I, 1, empty word).
  static ChannelElement identity(std::size_t dim);

  const ExactMatrix& unitary() const { return unitary_; }
  const Rational& damping() const { return damping_; }
  const std::vector<std::string>& word() const { return word_; }
  std::size_t dim() const { return unitary_.rows(); }
  bool is_identity_element() const;

  /// x∘y: (U₁U₂, λ₁λ₂, w₁ ++ w₂).
  friend ChannelElement compose(const ChannelElement& x, const ChannelElement& y);

 private:
  ChannelElement(ExactMatrix u, Rational d, std::vector<std::string> w)
      : unitary_(std::move(u)), damping_(std::move(d)), word_(std::move(w)) {}

  ExactMatrix unitary_;
  Rational damping_;
  std::vector<std::string> word_;
};

ChannelElement compose(const ChannelElement& x, const ChannelElement& y);

/// ρ ↦ Σ K ρ K†.
struct KrausChannel {
  std::vector<ExactMatrix> ops;
  std::size_t dim() const { return ops.empty() ? 0 : ops.front().cols(); }
};

using AnyChannel = std::variant<ChannelElement, KrausChannel>;

/// Linear extension to arbitrary square matrices (needed for Choi
/// matrices); throws ShapeError on a dimension mismatch.
ExactMatrix apply_linear(const ChannelElement& c, const ExactMatrix& x);
ExactMatrix apply_linear(const KrausChannel& c, const ExactMatrix& x);
ExactMatrix apply_linear(const AnyChannel& c, const ExactMatrix& x);
std::size_t channel_dim(const AnyChannel& c);

/// Application to a state. The caller is responsible for the map being
/// CPTP (compiled elements always are; Kraus maps are certified by
/// certify_cptp).
ExactDensityMatrix apply(const ChannelElement& c, const ExactDensityMatrix& rho);
ExactDensityMatrix apply(const AnyChannel& c, const ExactDensityMatrix& rho);

/// J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|), of size d²×d².
ExactMatrix choi(const ChannelElement& c);
ExactMatrix choi(const AnyChannel& c);

/// Traces out the second (output) factor of a d²×d² matrix.
ExactMatrix partial_trace_output(const ExactMatrix& j, std::size_t dim);

struct CptpCertificate {
  bool hermitian = false;
  bool psd = false;
  bool trace_preserving = false;
  bool ok() const { return hermitian && psd && trace_preserving; }
  std::string reason() const;
};

/// Complete positivity (Choi PSD) and trace preservation (partial trace
/// over the output equals I), both exact.
CptpCertificate certify_cptp(const ExactMatrix& choi_matrix, std::size_t dim);
CptpCertificate certify_cptp(const AnyChannel& c);

}  // namespace undec
