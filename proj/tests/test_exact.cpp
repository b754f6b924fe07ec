#include <catch_amalgamated.hpp>

#include <map>

#include "oracles.hpp"
#include "undec/error.hpp"
#include "undec/exact.hpp"
#include "undec/freerot.hpp"

using namespace undec;
using G = GaussianRational;

namespace {

ExactMatrix diag2(const G& a, const G& b) { return ExactMatrix::diagonal({a, b}); }

}  // namespace

TEST_CASE("rational canonical form and parsing") {
  CHECK(Rational(2, 4).str() == "1/2");
  CHECK(Rational(3, -6).str() == "-1/2");
  CHECK(Rational(6, 3).str() == "2");
  CHECK(Rational(0, -5).str() == "0");
  CHECK_THROWS_AS(Rational(1, 0), DomainError);

  CHECK(Rational::parse("-7/3") == Rational(-7, 3));
  CHECK(Rational::parse("12") == Rational(12));
  for (const char* bad : {"2/4", "3/1", "+1", "1/0", "-0", "01", "1/-2", "", "a", "1/", "/2",
                          "1.5", " 1"}) {
    INFO(bad);
    CHECK_THROWS_AS(Rational::parse(bad), ParseError);
  }
}

TEST_CASE("rational arithmetic round-trips on 1000 random inputs") {
  oracle::Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const Rational a = oracle::random_rational(rng, 1000, 997);
    const Rational b = oracle::random_rational(rng, 1000, 997);
    CHECK((a + b) - b == a);
    CHECK(Rational::parse(a.str()) == a);
    if (!b.is_zero()) CHECK((a * b) / b == a);
  }
}

TEST_CASE("gaussian rationals") {
  const G z(Rational(1, 2), Rational(-3, 4));
  CHECK(z.str() == "1/2-3/4*i");
  CHECK(G(0).str() == "0+0*i");
  CHECK(G::parse("1/2-3/4*i") == z);
  CHECK(G::parse("-2+5*i") == G(Rational(-2), Rational(5)));
  CHECK(z.conj().conj() == z);
  CHECK(z.norm2() == Rational(13, 16));
  CHECK((z * z.conj()).im().is_zero());
  CHECK_THROWS_AS(G(1) / G(0), DomainError);
  for (const char* bad : {"1", "1+i", "1+2/4*i", "1+-2*i", "1*i"}) {
    INFO(bad);
    CHECK_THROWS_AS(G::parse(bad), ParseError);
  }
  oracle::Rng rng(12);
  for (int t = 0; t < 300; ++t) {
    const G a = oracle::random_gaussian(rng);
    CHECK(G::parse(a.str()) == a);
  }
}

TEST_CASE("mat_mul") {
  const FreePair p = make_free_pair({});
  CHECK(ExactMatrix::identity(2) * p.a == p.a);
  CHECK(p.a * dagger(p.a) == ExactMatrix::identity(2));
  CHECK((p.a * p.b) * p.a == p.a * (p.b * p.a));
  CHECK_THROWS_AS(ExactMatrix::identity(2) * ExactMatrix::identity(3), ShapeError);
  CHECK_THROWS_AS(ExactMatrix(2, 2, {G(1)}), ShapeError);

  oracle::Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    const ExactMatrix a = oracle::random_matrix(rng, 3, 2);
    const ExactMatrix b = oracle::random_matrix(rng, 2, 4);
    const ExactMatrix c = oracle::random_matrix(rng, 4, 3);
    CHECK((a * b) * c == a * (b * c));
  }
}

TEST_CASE("dagger") {
  CHECK(dagger(ExactMatrix::identity(3)) == ExactMatrix::identity(3));
  const G c(Rational(3, 5), Rational(4, 5));
  CHECK(dagger(diag2(c, c.conj())) == diag2(c.conj(), c));
  oracle::Rng rng(14);
  for (int t = 0; t < 100; ++t) {
    const ExactMatrix a = oracle::random_matrix(rng, 2, 2);
    const ExactMatrix b = oracle::random_matrix(rng, 2, 2);
    CHECK(dagger(a * b) == dagger(b) * dagger(a));
    CHECK(dagger(dagger(a)) == a);
  }
}

TEST_CASE("is_scalar") {
  const auto one = is_scalar(ExactMatrix::identity(4));
  REQUIRE(one);
  CHECK(*one == G(1));
  const auto minus = is_scalar(ExactMatrix::scalar(4, G(-1)));
  REQUIRE(minus);
  CHECK(*minus == G(-1));
  CHECK_FALSE(is_scalar(ExactMatrix::block_diag(ExactMatrix::identity(2),
                                                ExactMatrix::scalar(2, G(-1)))));
  CHECK_FALSE(is_scalar(ExactMatrix::zero(2, 3)));
}

TEST_CASE("is_psd examples") {
  CHECK(is_psd(ExactMatrix::scalar(4, G(Rational(1, 4)))));
  CHECK_FALSE(is_psd(diag2(G(1), G(Rational(-1, 2)))));
  const ExactMatrix mix = ExactMatrix::diagonal(
      {G(Rational(5, 8)), G(Rational(1, 8)), G(Rational(1, 8)), G(Rational(1, 8))});
  CHECK(is_psd(mix));
  CHECK(is_psd(ExactMatrix::zero(3, 3)));
  CHECK_THROWS_AS(is_psd(ExactMatrix::from_rows({{G(1), G(1)}, {G(0), G(1)}})), DomainError);
}

TEST_CASE("characteristic polynomial matches interpolation") {
  oracle::Rng rng(15);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (int t = 0; t < 10; ++t) {
      const ExactMatrix h = oracle::random_hermitian(rng, n);
      const auto c = characteristic_polynomial(h);
      const auto ref = oracle::charpoly_by_interpolation(h);
      REQUIRE(c.size() == ref.size());
      for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == G(ref[k]));
    }
  }
}

TEST_CASE("is_psd agrees with the Sturm oracle on Hermitian matrices with rational spectra") {
  oracle::Rng rng(16);
  int positives = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
    const ExactMatrix u = oracle::cayley_unitary(rng, n);
    std::vector<G> spectrum;
    const bool make_psd = t % 2 == 0;
    for (std::size_t k = 0; k < n; ++k) {
      Rational v(oracle::uniform(rng, 0, 6), oracle::uniform(rng, 1, 5));
      if (!make_psd && k == n - 1) v = -v - Rational(1, 7);
      spectrum.push_back(G(v));
    }
    const ExactMatrix h = u * ExactMatrix::diagonal(spectrum) * dagger(u);
    REQUIRE(is_hermitian(h));
    const bool expected = oracle::psd_by_sturm(h);
    CHECK(is_psd(h) == expected);
    CHECK(expected == make_psd);
    positives += expected ? 1 : 0;
  }
  CHECK(positives == 100);
}

TEST_CASE("is_psd agrees with the Sturm oracle on unstructured Hermitian matrices") {
  oracle::Rng rng(17);
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 4);
    ExactMatrix h = oracle::random_hermitian(rng, n);
    if (t % 3 == 0) h = h * h;  // PSD by construction
    CHECK(is_psd(h) == oracle::psd_by_sturm(h));
  }
}

TEST_CASE("determinant and inverse") {
  oracle::Rng rng(18);
  for (int t = 0; t < 40; ++t) {
    const ExactMatrix a = oracle::random_matrix(rng, 4, 4);
    CHECK(determinant(a) == oracle::det(a));
    if (!determinant(a).is_zero()) CHECK(a * inverse(a) == ExactMatrix::identity(4));
  }
  CHECK_THROWS_AS(inverse(ExactMatrix::zero(2, 2)), DomainError);
}

TEST_CASE("power and trace") {
  const FreePair p = make_free_pair({});
  CHECK(power(p.a, 0) == ExactMatrix::identity(2));
  CHECK(power(p.a, 1) == p.a);
  CHECK(power(p.a, 2) == p.a * p.a);
  CHECK(trace(power(p.a, 3)) == G(Rational(-234, 125)));
  for (unsigned i = 0; i <= 8; ++i)
    for (unsigned j = 0; j <= 8; ++j) CHECK(power(p.a, i) * power(p.a, j) == power(p.a, i + j));
}

TEST_CASE("kron") {
  const ExactMatrix x = ExactMatrix::from_rows({{G(0), G(1)}, {G(1), G(0)}});
  const ExactMatrix k = kron(x, ExactMatrix::identity(2));
  CHECK(k.rows() == 4);
  CHECK(k(0, 2) == G(1));
  CHECK(k(1, 3) == G(1));
  CHECK(k(0, 0) == G(0));
  oracle::Rng rng(19);
  const ExactMatrix a = oracle::random_matrix(rng, 2, 2), b = oracle::random_matrix(rng, 2, 2);
  const ExactMatrix c = oracle::random_matrix(rng, 2, 2), d = oracle::random_matrix(rng, 2, 2);
  CHECK(kron(a, b) * kron(c, d) == kron(a * c, b * d));
}

TEST_CASE("digest and phase normalization") {
  const FreePair p = make_free_pair({});
  CHECK(digest(ExactMatrix::identity(4)) == digest(ExactMatrix::identity(4)));
  CHECK(digest(p.a) != digest(p.b));
  CHECK(digest(p.a * p.b) == digest(p.a * p.b));
  CHECK(digest(p.a * p.b).hex() == digest(make_free_pair({}).a * make_free_pair({}).b).hex());
  CHECK(digest(p.a).hex().size() == 32);

  oracle::Rng rng(20);
  std::map<Digest, ExactMatrix> seen;
  for (int t = 0; t < 200; ++t) {
    const ExactMatrix m = oracle::random_matrix(rng, 3, 3, 2, 2);
    G c = oracle::random_gaussian(rng);
    if (c.is_zero()) c = G(1);
    CHECK(normalize_phase(c * m) == normalize_phase(m));
    const Digest d = digest(m);
    const auto [it, inserted] = seen.emplace(d, m);
    if (!inserted) CHECK(it->second == m);
  }
  CHECK(normalize_phase(ExactMatrix::zero(2, 2)) == ExactMatrix::zero(2, 2));
}

TEST_CASE("matrix JSON round-trip") {
  oracle::Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const ExactMatrix m = oracle::random_matrix(rng, 1 + t % 4, 1 + t % 3);
    CHECK(matrix_from_json(to_json(m)) == m);
  }
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"([["1+0*i"],["1+0*i","2+0*i"]])")),
                  ParseError);
}

TEST_CASE("density matrices") {
  CHECK(is_density_matrix(ExactDensityMatrix::maximally_mixed(4).matrix()));
  CHECK(ExactDensityMatrix::basis_state(4, 2).matrix()(2, 2) == G(1));
  CHECK_THROWS_AS(ExactDensityMatrix::make(ExactMatrix::identity(2)), DomainError);
  CHECK_THROWS_AS(ExactDensityMatrix::make(diag2(G(Rational(3, 2)), G(Rational(-1, 2)))),
                  DomainError);
  CHECK_THROWS_AS(
      ExactDensityMatrix::make(ExactMatrix::from_rows({{G(Rational(1, 2)), G(1)},
                                                       {G(0), G(Rational(1, 2))}})),
      DomainError);
  oracle::Rng rng(22);
  for (int t = 0; t < 30; ++t) {
    CHECK_NOTHROW(ExactDensityMatrix::make(oracle::random_density(rng, 4)));
  }
}
