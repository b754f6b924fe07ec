#pragma once

// Exact arithmetic kernel: rationals, Gaussian rationals (elements of Q(i)),
// dense matrices over them, and the exact predicates used by every search.
// There is no floating point anywhere in here.

#include <gmpxx.h>

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace undec {

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : v_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(mpq_class v);

  /// Parses "p/q" or "p". Rejects non-canonical spellings such as "2/4",
  /// "3/1" or "+1" so that text round-trips are bit-exact.
  static Rational parse(std::string_view text);

  const mpq_class& mpq() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }
  int sign() const { return sgn(v_); }
  bool is_zero() const { return sign() == 0; }

  /// "p/q", with "/q" omitted when q = 1.
  std::string str() const;

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.v_ == b.v_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    const int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

 private:
  mpq_class v_;
};

/// re + im*i with rational parts.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(Rational re) : re_(std::move(re)) {}  // NOLINT
  GaussianRational(long re) : re_(re) {}                 // NOLINT
  GaussianRational(Rational re, Rational im)
      : re_(std::move(re)), im_(std::move(im)) {}

  static GaussianRational i() { return {Rational(0), Rational(1)}; }

  /// Parses the canonical "re+im*i" / "re-im*i" form written by str().
  static GaussianRational parse(std::string_view text);

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_real() const { return im_.is_zero(); }

  GaussianRational conj() const { return {re_, -im_}; }
  /// |z|^2 = re^2 + im^2.
  Rational norm2() const { return re_ * re_ + im_ * im_; }

  std::string str() const;

  GaussianRational operator-() const { return {-re_, -im_}; }
  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a,
                                    const GaussianRational& b) {
    return a += b;
  }
  friend GaussianRational operator-(GaussianRational a,
                                    const GaussianRational& b) {
    return a -= b;
  }
  friend GaussianRational operator*(GaussianRational a,
                                    const GaussianRational& b) {
    return a *= b;
  }
  friend GaussianRational operator/(GaussianRational a,
                                    const GaussianRational& b) {
    return a /= b;
  }
  friend bool operator==(const GaussianRational& a,
                         const GaussianRational& b) = default;

 private:
  Rational re_;
  Rational im_;
};

/// 128-bit fingerprint of a canonical serialization. Equal inputs always
/// give equal digests; callers confirm every digest hit with an exact
/// comparison.
struct Digest {
  std::array<std::uint8_t, 16> bytes{};

  std::string hex() const;
  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

/// BLAKE2b-128 of an arbitrary byte string.
Digest digest_bytes(std::string_view bytes);

/// Dense row-major matrix over Q(i). Immutable after construction.
class ExactMatrix {
 public:
  ExactMatrix(std::size_t rows, std::size_t cols,
              std::vector<GaussianRational> entries);

  static ExactMatrix zero(std::size_t rows, std::size_t cols);
  static ExactMatrix identity(std::size_t n);
  static ExactMatrix diagonal(const std::vector<GaussianRational>& diag);
  static ExactMatrix scalar(std::size_t n, const GaussianRational& c);
  /// [[a, 0], [0, b]].
  static ExactMatrix block_diag(const ExactMatrix& a, const ExactMatrix& b);
  /// Builds from rows; all rows must have the same nonzero length.
  static ExactMatrix from_rows(
      const std::vector<std::vector<GaussianRational>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  const GaussianRational& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  std::span<const GaussianRational> entries() const { return entries_; }

  /// Sub-block of size (nr, nc) starting at (r0, c0).
  ExactMatrix block(std::size_t r0, std::size_t c0, std::size_t nr,
                    std::size_t nc) const;

  /// Canonical byte string: "RxC:" followed by ';'-separated entry strings.
  std::string canonical_string() const;

  friend bool operator==(const ExactMatrix&, const ExactMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<GaussianRational> entries_;
};

/// Exact product; throws ShapeError when a.cols() != b.rows(). Zero entries
/// are skipped, so block-diagonal operands multiply at block cost.
ExactMatrix mat_mul(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix operator+(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix operator-(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix operator*(const GaussianRational& c, const ExactMatrix& a);

/// Conjugate transpose.
ExactMatrix dagger(const ExactMatrix& a);
/// Kronecker product a ⊗ b.
ExactMatrix kron(const ExactMatrix& a, const ExactMatrix& b);

GaussianRational trace(const ExactMatrix& a);
/// Exact determinant by Gaussian elimination over Q(i).
GaussianRational determinant(const ExactMatrix& a);
/// Exact inverse; throws DomainError on a singular matrix.
ExactMatrix inverse(const ExactMatrix& a);
/// m^i; m^0 is the identity of matching size.
ExactMatrix power(const ExactMatrix& m, unsigned i);

/// When a = c·I, returns c.
std::optional<GaussianRational> is_scalar(const ExactMatrix& a);
bool is_hermitian(const ExactMatrix& a);
/// a·a† = I exactly.
bool is_unitary(const ExactMatrix& a);

/// Coefficients c_0..c_n of det(xI - a) (index k holds the coefficient of
/// x^k), by Faddeev-LeVerrier.
std::vector<GaussianRational> characteristic_polynomial(const ExactMatrix& a);

/// Positive semidefiniteness of a Hermitian matrix, decided exactly: the
/// characteristic polynomial of a Hermitian matrix is real-rooted, so all
/// roots are >= 0 iff the coefficient of x^k has sign (-1)^(n-k) or is 0.
/// Throws DomainError on non-Hermitian input.
bool is_psd(const ExactMatrix& a);

Digest digest(const ExactMatrix& a);

/// Divides a by its first nonzero entry (row-major). Two matrices are equal
/// up to a nonzero scalar factor iff their normalized forms are equal. The
/// zero matrix is returned unchanged.
ExactMatrix normalize_phase(const ExactMatrix& a);

/// Row-major JSON array of arrays of canonical entry strings.
nlohmann::json to_json(const ExactMatrix& a);
ExactMatrix matrix_from_json(const nlohmann::json& j);

/// A density matrix: Hermitian, unit trace, positive semidefinite.
class ExactDensityMatrix {
 public:
  /// Validates all three invariants; throws DomainError on failure.
  static ExactDensityMatrix make(ExactMatrix m);
  /// Skips validation. Only for producers that guarantee the invariants,
  /// such as certified CPTP maps applied to a valid state.
  static ExactDensityMatrix assume_valid(ExactMatrix m);

  /// |k><k| in dimension dim.
  static ExactDensityMatrix basis_state(std::size_t dim, std::size_t k);
  /// I/dim.
  static ExactDensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return mat_.rows(); }
  const ExactMatrix& matrix() const { return mat_; }

  friend bool operator==(const ExactDensityMatrix&,
                         const ExactDensityMatrix&) = default;

 private:
  explicit ExactDensityMatrix(ExactMatrix m) : mat_(std::move(m)) {}
  ExactMatrix mat_;
};

/// Validation used by ExactDensityMatrix::make, exposed for tests and
/// post-condition checks.
bool is_density_matrix(const ExactMatrix& m);

}  // namespace undec

template <>
struct std::hash<undec::Digest> {
  std::size_t operator()(const undec::Digest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t k = 0; k < sizeof(std::size_t); ++k) {
      h = (h << 8) | d.bytes[k];
    }
    return h;
  }
};
