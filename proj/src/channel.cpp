#include "undec/channel.hpp"

#include "undec/error.hpp"

namespace undec {

ChannelElement ChannelElement::make(ExactMatrix unitary, Rational damping,
                                    std::vector<std::string> word) {
  if (!is_unitary(unitary)) throw DomainError("channel element: matrix is not unitary");
  if (damping.sign() <= 0 || damping > Rational(1)) {
    throw DomainError("channel element: damping " + damping.str() + " outside (0,1]");
  }
  return ChannelElement(std::move(unitary), std::move(damping), std::move(word));
}

ChannelElement ChannelElement::identity(std::size_t dim) {
  return ChannelElement(ExactMatrix::identity(dim), Rational(1), {});
}

bool ChannelElement::is_identity_element() const {
  return damping_ == Rational(1) && word_.empty();
}

ChannelElement compose(const ChannelElement& x, const ChannelElement& y) {
  std::vector<std::string> w = x.word_;
  w.insert(w.end(), y.word_.begin(), y.word_.end());
  return ChannelElement(x.unitary_ * y.unitary_, x.damping_ * y.damping_, std::move(w));
}

ExactMatrix apply_linear(const ChannelElement& c, const ExactMatrix& x) {
  if (!x.is_square() || x.rows() != c.dim()) {
    throw ShapeError("channel of dimension " + std::to_string(c.dim()) +
                     " applied to a " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()) + " matrix");
  }
  const ExactMatrix rotated = c.unitary() * x * dagger(c.unitary());
  if (c.damping() == Rational(1)) return rotated;
  const Rational mix = (Rational(1) - c.damping()) / Rational(static_cast<long>(c.dim()));
  return GaussianRational(c.damping()) * rotated +
         ExactMatrix::scalar(c.dim(), trace(x) * GaussianRational(mix));
}

ExactMatrix apply_linear(const KrausChannel& c, const ExactMatrix& x) {
  if (c.ops.empty()) throw DomainError("Kraus channel with no operators");
  if (!x.is_square() || x.rows() != c.dim()) {
    throw ShapeError("Kraus channel of dimension " + std::to_string(c.dim()) +
                     " applied to a " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()) + " matrix");
  }
  ExactMatrix out = ExactMatrix::zero(c.ops.front().rows(), c.ops.front().rows());
  for (const auto& k : c.ops) out = out + k * x * dagger(k);
  return out;
}

ExactMatrix apply_linear(const AnyChannel& c, const ExactMatrix& x) {
  return std::visit([&](const auto& ch) { return apply_linear(ch, x); }, c);
}

std::size_t channel_dim(const AnyChannel& c) {
  return std::visit([](const auto& ch) { return ch.dim(); }, c);
}

ExactDensityMatrix apply(const ChannelElement& c, const ExactDensityMatrix& rho) {
  return ExactDensityMatrix::assume_valid(apply_linear(c, rho.matrix()));
}

ExactDensityMatrix apply(const AnyChannel& c, const ExactDensityMatrix& rho) {
  return ExactDensityMatrix::assume_valid(apply_linear(c, rho.matrix()));
}

namespace {

ExactMatrix choi_of(const auto& c, std::size_t d) {
  const std::size_t n = d * d;
  std::vector<GaussianRational> e(n * n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<GaussianRational> unit(d * d);
      unit[i * d + j] = GaussianRational(1);
      const ExactMatrix out = apply_linear(c, ExactMatrix(d, d, std::move(unit)));
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) e[(i * d + a) * n + (j * d + b)] = out(a, b);
    }
  return {n, n, std::move(e)};
}

}  // namespace

ExactMatrix choi(const ChannelElement& c) { return choi_of(c, c.dim()); }

ExactMatrix choi(const AnyChannel& c) {
  return std::visit([](const auto& ch) { return choi_of(ch, ch.dim()); }, c);
}

ExactMatrix partial_trace_output(const ExactMatrix& j, std::size_t d) {
  if (!j.is_square() || j.rows() != d * d) {
    throw ShapeError("partial trace: matrix is not d²×d² for d = " + std::to_string(d));
  }
  std::vector<GaussianRational> e(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t a = 0; a < d; ++a) e[i * d + k] += j(i * d + a, k * d + a);
  return {d, d, std::move(e)};
}

std::string CptpCertificate::reason() const {
  if (!hermitian) return "Choi matrix is not Hermitian";
  if (!psd) return "Choi matrix is not positive semidefinite";
  if (!trace_preserving) return "partial trace of the Choi matrix is not the identity";
  return "ok";
}

CptpCertificate certify_cptp(const ExactMatrix& j, std::size_t d) {
  CptpCertificate cert;
  cert.hermitian = is_hermitian(j);
  cert.psd = cert.hermitian && is_psd(j);
  cert.trace_preserving = partial_trace_output(j, d) == ExactMatrix::identity(d);
  return cert;
}

CptpCertificate certify_cptp(const AnyChannel& c) {
  return certify_cptp(choi(c), channel_dim(c));
}

}  // namespace undec
