#include "undec/exact.hpp"

#include <sodium.h>

#include <algorithm>
#include <cctype>

#include "undec/error.hpp"

namespace undec {

namespace {

bool is_canonical_natural(std::string_view s) {
  if (s.empty()) return false;
  if (!std::all_of(s.begin(), s.end(),
                   [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
    return false;
  }
  return s.size() == 1 || s.front() != '0';
}

}  // namespace

// ---------------------------------------------------------------- Rational

Rational::Rational(long num, long den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  const std::string_view num = body.substr(0, slash);
  const std::string_view den =
      slash == std::string_view::npos ? std::string_view{} : body.substr(slash + 1);
  if (!is_canonical_natural(num) ||
      (slash != std::string_view::npos && !is_canonical_natural(den))) {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  }
  mpz_class n(std::string(num), 10);
  mpz_class d = den.empty() ? mpz_class(1) : mpz_class(std::string(den), 10);
  if (d <= 1 && !den.empty()) {
    throw ParseError("non-canonical denominator in '" + std::string(text) + "'");
  }
  if (negative && n == 0) throw ParseError("negative zero '" + std::string(text) + "'");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  if (g != 1 && n != 0) {
    throw ParseError("rational not in lowest terms '" + std::string(text) + "'");
  }
  if (negative) n = -n;
  Rational r;
  r.v_ = mpq_class(n, d);
  return r;
}

std::string Rational::str() const {
  if (v_.get_den() == 1) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DomainError("division by zero");
  v_ /= o.v_;
  return *this;
}

// -------------------------------------------------------- GaussianRational

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  const Rational n = o.norm2();
  if (n.is_zero()) throw DomainError("division by zero");
  *this *= o.conj();
  re_ /= n;
  im_ /= n;
  return *this;
}

std::string GaussianRational::str() const {
  std::string out = re_.str();
  if (im_.sign() < 0) {
    out += "-";
    out += (-im_).str();
  } else {
    out += "+";
    out += im_.str();
  }
  out += "*i";
  return out;
}

GaussianRational GaussianRational::parse(std::string_view text) {
  constexpr std::string_view suffix = "*i";
  if (text.size() < 4 || text.substr(text.size() - 2) != suffix) {
    throw ParseError("malformed Gaussian rational '" + std::string(text) + "'");
  }
  const std::string_view body = text.substr(0, text.size() - 2);
  const auto sep = body.find_last_of("+-");
  if (sep == std::string_view::npos || sep == 0) {
    throw ParseError("malformed Gaussian rational '" + std::string(text) + "'");
  }
  Rational re = Rational::parse(body.substr(0, sep));
  Rational im = Rational::parse(body.substr(sep + 1));
  if (im.sign() < 0) {
    throw ParseError("malformed Gaussian rational '" + std::string(text) + "'");
  }
  if (body[sep] == '-') {
    if (im.is_zero()) {
      throw ParseError("non-canonical zero imaginary part in '" + std::string(text) + "'");
    }
    im = -im;
  }
  return {std::move(re), std::move(im)};
}

// ------------------------------------------------------------------ Digest

std::string Digest::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const std::uint8_t b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

Digest digest_bytes(std::string_view bytes) {
  static const int init = sodium_init();
  (void)init;
  Digest d;
  crypto_generichash(d.bytes.data(), d.bytes.size(),
                     reinterpret_cast<const unsigned char*>(bytes.data()),
                     bytes.size(), nullptr, 0);
  return d;
}

// ------------------------------------------------------------- ExactMatrix

ExactMatrix::ExactMatrix(std::size_t rows, std::size_t cols,
                         std::vector<GaussianRational> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw ShapeError("matrix with a zero dimension");
  if (entries_.size() != rows * cols) {
    throw ShapeError("entry count " + std::to_string(entries_.size()) +
                     " does not match " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

ExactMatrix ExactMatrix::zero(std::size_t rows, std::size_t cols) {
  return {rows, cols, std::vector<GaussianRational>(rows * cols)};
}

ExactMatrix ExactMatrix::identity(std::size_t n) {
  return scalar(n, GaussianRational(1));
}

ExactMatrix ExactMatrix::scalar(std::size_t n, const GaussianRational& c) {
  std::vector<GaussianRational> e(n * n);
  for (std::size_t k = 0; k < n; ++k) e[k * n + k] = c;
  return {n, n, std::move(e)};
}

ExactMatrix ExactMatrix::diagonal(const std::vector<GaussianRational>& diag) {
  const std::size_t n = diag.size();
  std::vector<GaussianRational> e(n * n);
  for (std::size_t k = 0; k < n; ++k) e[k * n + k] = diag[k];
  return {n, n, std::move(e)};
}

ExactMatrix ExactMatrix::block_diag(const ExactMatrix& a, const ExactMatrix& b) {
  const std::size_t r = a.rows() + b.rows();
  const std::size_t c = a.cols() + b.cols();
  std::vector<GaussianRational> e(r * c);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e[i * c + j] = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      e[(a.rows() + i) * c + a.cols() + j] = b(i, j);
  return {r, c, std::move(e)};
}

ExactMatrix ExactMatrix::from_rows(
    const std::vector<std::vector<GaussianRational>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw ShapeError("matrix with a zero dimension");
  }
  const std::size_t c = rows.front().size();
  std::vector<GaussianRational> e;
  e.reserve(rows.size() * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix rows");
    e.insert(e.end(), row.begin(), row.end());
  }
  return {rows.size(), c, std::move(e)};
}

ExactMatrix ExactMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                               std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw ShapeError("block out of range");
  std::vector<GaussianRational> e;
  e.reserve(nr * nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) e.push_back((*this)(r0 + i, c0 + j));
  return {nr, nc, std::move(e)};
}

std::string ExactMatrix::canonical_string() const {
  std::string out = std::to_string(rows_) + "x" + std::to_string(cols_) + ":";
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (k) out.push_back(';');
    out += entries_[k].str();
  }
  return out;
}

// -------------------------------------------------------------- operations

ExactMatrix mat_mul(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("mat_mul: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " times " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  const std::size_t inner = a.cols();
  std::vector<GaussianRational> out;
  out.reserve(n * m);
  mpq_class re;
  mpq_class im;
  mpq_class t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      re = 0;
      im = 0;
      for (std::size_t k = 0; k < inner; ++k) {
        const GaussianRational& x = a(i, k);
        const GaussianRational& y = b(k, j);
        const mpq_class& xr = x.re().mpq();
        const mpq_class& xi = x.im().mpq();
        const mpq_class& yr = y.re().mpq();
        const mpq_class& yi = y.im().mpq();
        const bool xr0 = sgn(xr) == 0;
        const bool xi0 = sgn(xi) == 0;
        const bool yr0 = sgn(yr) == 0;
        const bool yi0 = sgn(yi) == 0;
        if ((xr0 && xi0) || (yr0 && yi0)) continue;
        if (!xr0 && !yr0) { t = xr * yr; re += t; }
        if (!xi0 && !yi0) { t = xi * yi; re -= t; }
        if (!xr0 && !yi0) { t = xr * yi; im += t; }
        if (!xi0 && !yr0) { t = xi * yr; im += t; }
      }
      out.emplace_back(Rational(re), Rational(im));
    }
  }
  return {n, m, std::move(out)};
}

ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
  return mat_mul(a, b);
}

ExactMatrix operator+(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("matrix sum of different shapes");
  }
  std::vector<GaussianRational> e(a.entries().begin(), a.entries().end());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] += b.entries()[k];
  return {a.rows(), a.cols(), std::move(e)};
}

ExactMatrix operator-(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("matrix difference of different shapes");
  }
  std::vector<GaussianRational> e(a.entries().begin(), a.entries().end());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] -= b.entries()[k];
  return {a.rows(), a.cols(), std::move(e)};
}

ExactMatrix operator*(const GaussianRational& c, const ExactMatrix& a) {
  std::vector<GaussianRational> e;
  e.reserve(a.entries().size());
  for (const auto& x : a.entries()) e.push_back(x.is_zero() ? x : c * x);
  return {a.rows(), a.cols(), std::move(e)};
}

ExactMatrix dagger(const ExactMatrix& a) {
  std::vector<GaussianRational> e;
  e.reserve(a.entries().size());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) e.push_back(a(i, j).conj());
  return {a.cols(), a.rows(), std::move(e)};
}

ExactMatrix kron(const ExactMatrix& a, const ExactMatrix& b) {
  const std::size_t r = a.rows() * b.rows();
  const std::size_t c = a.cols() * b.cols();
  std::vector<GaussianRational> e(r * c);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero()) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          e[(i * b.rows() + k) * c + j * b.cols() + l] = a(i, j) * b(k, l);
    }
  return {r, c, std::move(e)};
}

GaussianRational trace(const ExactMatrix& a) {
  if (!a.is_square()) throw ShapeError("trace of a non-square matrix");
  GaussianRational t;
  for (std::size_t k = 0; k < a.rows(); ++k) t += a(k, k);
  return t;
}

GaussianRational determinant(const ExactMatrix& a) {
  if (!a.is_square()) throw ShapeError("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  std::vector<GaussianRational> m(a.entries().begin(), a.entries().end());
  GaussianRational det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot * n + col].is_zero()) ++pivot;
    if (pivot == n) return GaussianRational(0);
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[pivot * n + j], m[col * n + j]);
      det = -det;
    }
    const GaussianRational p = m[col * n + col];
    det *= p;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r * n + col].is_zero()) continue;
      const GaussianRational f = m[r * n + col] / p;
      for (std::size_t j = col; j < n; ++j) m[r * n + j] -= f * m[col * n + j];
    }
  }
  return det;
}

ExactMatrix inverse(const ExactMatrix& a) {
  if (!a.is_square()) throw ShapeError("inverse of a non-square matrix");
  const std::size_t n = a.rows();
  std::vector<GaussianRational> m(a.entries().begin(), a.entries().end());
  std::vector<GaussianRational> inv(n * n);
  for (std::size_t k = 0; k < n; ++k) inv[k * n + k] = GaussianRational(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot * n + col].is_zero()) ++pivot;
    if (pivot == n) throw DomainError("inverse of a singular matrix");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m[pivot * n + j], m[col * n + j]);
        std::swap(inv[pivot * n + j], inv[col * n + j]);
      }
    }
    const GaussianRational p = m[col * n + col];
    for (std::size_t j = 0; j < n; ++j) {
      m[col * n + j] /= p;
      inv[col * n + j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r * n + col].is_zero()) continue;
      const GaussianRational f = m[r * n + col];
      for (std::size_t j = 0; j < n; ++j) {
        m[r * n + j] -= f * m[col * n + j];
        inv[r * n + j] -= f * inv[col * n + j];
      }
    }
  }
  return {n, n, std::move(inv)};
}

ExactMatrix power(const ExactMatrix& m, unsigned i) {
  if (!m.is_square()) throw ShapeError("power of a non-square matrix");
  ExactMatrix result = ExactMatrix::identity(m.rows());
  ExactMatrix base = m;
  while (i) {
    if (i & 1u) result = result * base;
    i >>= 1u;
    if (i) base = base * base;
  }
  return result;
}

std::optional<GaussianRational> is_scalar(const ExactMatrix& a) {
  if (!a.is_square()) return std::nullopt;
  const GaussianRational& c = a(0, 0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i == j ? !(a(i, j) == c) : !a(i, j).is_zero()) return std::nullopt;
    }
  return c;
}

bool is_hermitian(const ExactMatrix& a) {
  if (!a.is_square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      if (!(a(i, j) == a(j, i).conj())) return false;
  return true;
}

bool is_unitary(const ExactMatrix& a) {
  if (!a.is_square()) return false;
  return a * dagger(a) == ExactMatrix::identity(a.rows());
}

std::vector<GaussianRational> characteristic_polynomial(const ExactMatrix& a) {
  if (!a.is_square()) throw ShapeError("characteristic polynomial of a non-square matrix");
  const std::size_t n = a.rows();
  std::vector<GaussianRational> c(n + 1);
  c[n] = GaussianRational(1);
  // M_1 = I, AM_1 = A; M_k = A M_{k-1} + c_{n-k+1} I; c_{n-k} = -tr(A M_k)/k.
  ExactMatrix am = a;
  c[n - 1] = -trace(am);
  for (std::size_t k = 2; k <= n; ++k) {
    std::vector<GaussianRational> e(am.entries().begin(), am.entries().end());
    for (std::size_t d = 0; d < n; ++d) e[d * n + d] += c[n - k + 1];
    const ExactMatrix m(n, n, std::move(e));
    am = a * m;
    c[n - k] = -trace(am) / GaussianRational(static_cast<long>(k));
  }
  return c;
}

bool is_psd(const ExactMatrix& a) {
  if (!is_hermitian(a)) throw DomainError("is_psd: matrix is not Hermitian");
  const std::vector<GaussianRational> c = characteristic_polynomial(a);
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k <= n; ++k) {
    if (!c[k].is_real()) throw Error("is_psd: Hermitian matrix gave a non-real coefficient");
    const int s = c[k].re().sign();
    if (s == 0) continue;
    const int want = ((n - k) % 2 == 0) ? 1 : -1;
    if (s != want) return false;
  }
  return true;
}

Digest digest(const ExactMatrix& a) { return digest_bytes(a.canonical_string()); }

ExactMatrix normalize_phase(const ExactMatrix& a) {
  for (const auto& x : a.entries()) {
    if (!x.is_zero()) {
      const GaussianRational inv = GaussianRational(1) / x;
      return inv * a;
    }
  }
  return a;
}

nlohmann::json to_json(const ExactMatrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(a(i, j).str());
    rows.push_back(std::move(row));
  }
  return rows;
}

ExactMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix JSON must be a nonempty array");
  std::vector<std::vector<GaussianRational>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) throw ParseError("matrix JSON row must be an array");
    std::vector<GaussianRational> r;
    for (const auto& e : row) {
      if (!e.is_string()) throw ParseError("matrix entry must be a string");
      r.push_back(GaussianRational::parse(e.get<std::string>()));
    }
    if (!rows.empty() && r.size() != rows.front().size()) {
      throw ParseError("matrix JSON rows have different lengths");
    }
    rows.push_back(std::move(r));
  }
  return ExactMatrix::from_rows(rows);
}

// ----------------------------------------------------- ExactDensityMatrix

bool is_density_matrix(const ExactMatrix& m) {
  if (!is_hermitian(m)) return false;
  if (!(trace(m) == GaussianRational(1))) return false;
  return is_psd(m);
}

ExactDensityMatrix ExactDensityMatrix::make(ExactMatrix m) {
  if (!m.is_square()) throw ShapeError("density matrix must be square");
  if (!is_hermitian(m)) throw DomainError("density matrix must be Hermitian");
  if (!(trace(m) == GaussianRational(1))) throw DomainError("density matrix must have unit trace");
  if (!is_psd(m)) throw DomainError("density matrix must be positive semidefinite");
  return ExactDensityMatrix(std::move(m));
}

ExactDensityMatrix ExactDensityMatrix::assume_valid(ExactMatrix m) {
  return ExactDensityMatrix(std::move(m));
}

ExactDensityMatrix ExactDensityMatrix::basis_state(std::size_t dim, std::size_t k) {
  if (k >= dim) throw DomainError("basis index out of range");
  std::vector<GaussianRational> d(dim);
  d[k] = GaussianRational(1);
  return ExactDensityMatrix(ExactMatrix::diagonal(d));
}

ExactDensityMatrix ExactDensityMatrix::maximally_mixed(std::size_t dim) {
  return ExactDensityMatrix(
      ExactMatrix::scalar(dim, GaussianRational(Rational(1, static_cast<long>(dim)))));
}

}  // namespace undec
