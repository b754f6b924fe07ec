#include "undec/freerot.hpp"

#include <unordered_map>

#include "undec/error.hpp"
#include "undec/parallel.hpp"

namespace undec {

namespace {

Rational dot(const Axis& u, const Axis& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

nlohmann::json axis_json(const Axis& a) {
  return nlohmann::json::array({a[0].str(), a[1].str(), a[2].str()});
}

Axis axis_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("axis must be an array of 3 rationals");
  Axis a;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!j[k].is_string()) throw ParseError("axis component must be a string");
    a[k] = Rational::parse(j[k].get<std::string>());
  }
  return a;
}

}  // namespace

BinaryWord::BinaryWord(std::string bits) : bits_(std::move(bits)) {
  for (std::size_t k = 0; k < bits_.size(); ++k) {
    if (bits_[k] != '0' && bits_[k] != '1') {
      throw ParseError("non-binary character '" + std::string(1, bits_[k]) +
                       "' in word '" + bits_ + "'");
    }
  }
}

nlohmann::json RotationParams::to_json() const {
  return {{"cos", cos_theta.str()},
          {"sin", sin_theta.str()},
          {"axis_a", axis_json(axis_a)},
          {"axis_b", axis_json(axis_b)}};
}

RotationParams RotationParams::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("rotation params must be a JSON object");
  RotationParams p;
  try {
    if (j.contains("cos")) p.cos_theta = Rational::parse(j.at("cos").get<std::string>());
    if (j.contains("sin")) p.sin_theta = Rational::parse(j.at("sin").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rotation params: ") + e.what());
  }
  if (j.contains("axis_a")) p.axis_a = axis_from_json(j.at("axis_a"));
  if (j.contains("axis_b")) p.axis_b = axis_from_json(j.at("axis_b"));
  return p;
}

void validate(const RotationParams& p) {
  const Rational& c = p.cos_theta;
  const Rational half(1, 2);
  if (c.is_zero() || c == Rational(1) || c == Rational(-1) || c == half || c == -half) {
    throw FreenessConditionError("cos θ = " + c.str() +
                                 " is excluded (must avoid 0, ±1, ±1/2)");
  }
  if (!(c * c + p.sin_theta * p.sin_theta == Rational(1))) {
    throw ExactnessError("cos² θ + sin² θ != 1 for cos = " + c.str() +
                         ", sin = " + p.sin_theta.str());
  }
  if (!(dot(p.axis_a, p.axis_a) == Rational(1)) || !(dot(p.axis_b, p.axis_b) == Rational(1))) {
    throw AxisError("rotation axes must have unit squared norm");
  }
  if (!dot(p.axis_a, p.axis_b).is_zero()) {
    throw AxisError("rotation axes must be orthogonal");
  }
}

ExactMatrix rotation(const Rational& c, const Rational& s, const Axis& n) {
  // axis·σ = [[n_z, n_x - i n_y], [n_x + i n_y, -n_z]]
  const GaussianRational is(Rational(0), s);
  const GaussianRational a00 = GaussianRational(n[2]);
  const GaussianRational a01(n[0], -n[1]);
  const GaussianRational a10(n[0], n[1]);
  const GaussianRational a11 = GaussianRational(-n[2]);
  return ExactMatrix::from_rows({{GaussianRational(c) + is * a00, is * a01},
                                 {is * a10, GaussianRational(c) + is * a11}});
}

FreePair make_free_pair(const RotationParams& params) {
  validate(params);
  return make_pair_unchecked(params);
}

FreePair make_pair_unchecked(const RotationParams& params) {
  return {rotation(params.cos_theta, params.sin_theta, params.axis_a),
          rotation(params.cos_theta, params.sin_theta, params.axis_b), params};
}

ExactMatrix gamma(const BinaryWord& w, const FreePair& pair) {
  ExactMatrix out = ExactMatrix::identity(pair.a.rows());
  for (const char bit : w.bits()) out = out * (bit == '0' ? pair.a : pair.b);
  return out;
}

nlohmann::json CollisionReport::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& [a, b] : collisions) cs.push_back({{"word_a", a}, {"word_b", b}});
  return {{"scanned_max_len", scanned_max_len},
          {"word_count", word_count},
          {"collisions", cs},
          {"scalar_words", scalar_words},
          {"truncated", truncated}};
}

CollisionReport freeness_scan(const FreePair& pair, std::size_t max_len,
                              const ScanOptions& options) {
  if (max_len == 0) throw DomainError("freeness_scan: max_len must be >= 1");
  CollisionReport report;
  report.scanned_max_len = max_len;

  struct Seen {
    std::string word;
    ExactMatrix mat;
  };
  std::unordered_map<Digest, std::vector<Seen>> seen;

  std::vector<std::string> words{""};
  std::vector<ExactMatrix> mats{ExactMatrix::identity(pair.a.rows())};

  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t n = words.size() * 2;
    if (report.word_count + n > options.word_budget) {
      report.truncated = true;
      break;
    }
    std::vector<std::string> next_words(n);
    std::vector<std::optional<ExactMatrix>> next_mats(n);
    std::vector<Digest> digests(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
      const std::size_t parent = i / 2;
      const bool one = (i % 2) == 1;
      next_words[i] = words[parent] + (one ? '1' : '0');
      next_mats[i] = mats[parent] * (one ? pair.b : pair.a);
      digests[i] = digest(*next_mats[i]);
    });

    std::vector<ExactMatrix> kept;
    kept.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const ExactMatrix& m = *next_mats[i];
      if (is_scalar(m)) report.scalar_words.push_back(next_words[i]);
      auto& bucket = seen[digests[i]];
      bool collided = false;
      for (const auto& s : bucket) {
        if (s.mat == m) {
          report.collisions.emplace_back(s.word, next_words[i]);
          collided = true;
          break;
        }
      }
      if (!collided) bucket.push_back({next_words[i], m});
      kept.push_back(m);
    }
    report.word_count += n;
    words = std::move(next_words);
    mats = std::move(kept);
  }
  return report;
}

}  // namespace undec
