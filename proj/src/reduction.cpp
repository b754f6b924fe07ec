#include "undec/reduction.hpp"

#include <algorithm>
#include <unordered_map>

#include "undec/error.hpp"
#include "undec/parallel.hpp"
#include "word_search.hpp"

namespace undec {

namespace {

void check_open_unit(const Rational& d, const char* what) {
  if (d.sign() <= 0 || d >= Rational(1)) {
    throw DomainError(std::string(what) + ": damping " + d.str() + " outside (0,1)");
  }
}

std::string label(char kind, std::size_t index) { return kind + std::to_string(index); }

// "H3" -> ('H', 3); anything else -> ('\0', 0).
std::pair<char, std::size_t> parse_label(const std::string& l) {
  if (l.size() < 2 || (l[0] != 'H' && l[0] != 'G')) return {'\0', 0};
  std::size_t v = 0;
  for (std::size_t i = 1; i < l.size(); ++i) {
    if (l[i] < '0' || l[i] > '9') return {'\0', 0};
    v = v * 10 + static_cast<std::size_t>(l[i] - '0');
  }
  if (v == 0) return {'\0', 0};
  return {l[0], v};
}

std::string element_label(const ChannelElement& c) {
  if (c.word().empty()) return "I";
  std::string out;
  for (const auto& w : c.word()) out += (out.empty() ? "" : ".") + w;
  return out;
}

void fill_damping(MembershipOutcome& out, const std::vector<ChannelElement>& gens,
                  const std::vector<std::string>& word) {
  Rational d(1);
  for (const auto& l : word) {
    for (const auto& g : gens) {
      if (g.word().front() == l) {
        d *= g.damping();
        break;
      }
    }
    ++out.damping_monomial[l];
  }
  out.damping = d;
}

MembershipOutcome generic_search(const GeneratorSet& gs, std::size_t max_depth,
                                 const SearchOptions& options) {
  MembershipOutcome out;
  out.mode = MembershipMode::Generic;
  const std::vector<ChannelElement> gens = gs.generators();
  std::vector<ExactMatrix> mats;
  std::vector<bool> damped;
  for (const auto& g : gens) {
    mats.push_back(g.unitary());
    damped.push_back(g.damping() < Rational(1));
  }
  const detail::WordSearchResult r = detail::find_words(
      mats, damped, {ExactMatrix::identity(4), true}, max_depth, options);
  out.depth_reached = r.depth;
  out.nodes_expanded = r.nodes_expanded;
  out.truncated = r.truncated;
  if (r.witnesses.empty()) return out;

  auto to_labels = [&](const detail::Seq& s) {
    std::vector<std::string> w;
    for (auto it = s.rbegin(); it != s.rend(); ++it) w.push_back(gens[*it].word().front());
    return w;
  };
  const detail::Seq* chosen = &r.witnesses.front();
  for (const auto& s : r.witnesses) {
    if (extract_tile_word(to_labels(s))) {
      chosen = &s;
      break;
    }
  }
  out.status = SearchStatus::Found;
  out.witness = to_labels(*chosen);
  out.scalar_value = is_scalar(detail::product(mats, *chosen));
  out.extracted = extract_tile_word(*out.witness);
  fill_damping(out, gens, *out.witness);
  return out;
}

MembershipOutcome structured_search(const GeneratorSet& gs, std::size_t max_depth,
                                    const SearchOptions& options) {
  MembershipOutcome out;
  out.mode = MembershipMode::Structured;
  const std::size_t k = gs.instance.size();
  const std::size_t max_tiles = max_depth / 2;

  struct Node {
    ExactMatrix m;
    TileWord word;
  };
  std::vector<Node> frontier{{ExactMatrix::identity(4), {}}};
  // Sandwich products up to phase, keyed by digest; the tile word lets
  // digest hits be confirmed by recomputation.
  std::unordered_map<Digest, std::vector<TileWord>> visited;
  auto sandwich = [&](const TileWord& w) {
    ExactMatrix m = ExactMatrix::identity(4);
    for (const std::size_t i : w) {
      m = gs.g_gens[i - 1].unitary() * m * gs.h_gens[i - 1].unitary();
    }
    return m;
  };
  visited[digest(frontier.front().m)].push_back({});

  for (std::size_t n = 1; n <= max_tiles; ++n) {
    const std::size_t count = frontier.size() * k;
    if (out.nodes_expanded + count > options.node_budget) {
      out.truncated = true;
      out.depth_reached = 2 * (n - 1);
      return out;
    }
    struct Child {
      std::optional<ExactMatrix> m;
      std::optional<ExactMatrix> normalized;
      Digest key;
      bool scalar = false;
    };
    std::vector<Child> children(count);
    parallel_for(count, options.workers, [&](std::size_t i) {
      Child& c = children[i];
      const std::size_t t = i % k;
      c.m = gs.g_gens[t].unitary() * frontier[i / k].m * gs.h_gens[t].unitary();
      c.scalar = is_scalar(*c.m).has_value();
      if (!c.scalar) {
        c.normalized = normalize_phase(*c.m);
        c.key = digest(*c.normalized);
      }
    });
    out.nodes_expanded += count;

    std::vector<Node> next;
    for (std::size_t i = 0; i < count; ++i) {
      Child& c = children[i];
      TileWord word = frontier[i / k].word;
      word.push_back(i % k + 1);
      if (c.scalar) {
        out.status = SearchStatus::Found;
        out.scalar_value = is_scalar(*c.m);
        std::vector<std::string> w;
        for (auto it = word.rbegin(); it != word.rend(); ++it) w.push_back(label('G', *it));
        for (const std::size_t t : word) w.push_back(label('H', t));
        out.witness = std::move(w);
        out.extracted = word;
        out.depth_reached = 2 * n;
        fill_damping(out, gs.generators(), *out.witness);
        return out;
      }
      auto& bucket = visited[c.key];
      const bool seen = std::any_of(bucket.begin(), bucket.end(), [&](const TileWord& o) {
        return normalize_phase(sandwich(o)) == *c.normalized;
      });
      if (seen) continue;
      bucket.push_back(word);
      next.push_back({std::move(*c.m), std::move(word)});
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  out.depth_reached = max_depth;
  return out;
}

}  // namespace

std::vector<ChannelElement> GeneratorSet::generators() const {
  std::vector<ChannelElement> out = h_gens;
  out.insert(out.end(), g_gens.begin(), g_gens.end());
  return out;
}

nlohmann::json GeneratorSet::to_json() const {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : generators()) {
    gens.push_back({{"label", g.word().front()},
                    {"damping", g.damping().str()},
                    {"unitary", undec::to_json(g.unitary())}});
  }
  return {{"instance", instance.to_text()},
          {"params", pair.params.to_json()},
          {"generators", std::move(gens)}};
}

GeneratorSet GeneratorSet::from_json(const nlohmann::json& j) {
  try {
    const PCPInstance inst = PCPInstance::parse(j.at("instance").get<std::string>());
    const FreePair pair = make_free_pair(RotationParams::from_json(j.at("params")));
    const auto& gens = j.at("generators");
    if (!gens.is_array() || gens.size() != 2 * inst.size()) {
      throw ParseError("bundle must list 2k generators");
    }
    std::vector<Rational> dampings;
    for (const auto& g : gens) dampings.push_back(Rational::parse(g.at("damping").get<std::string>()));
    GeneratorSet out = compile(inst, pair, dampings);
    const auto built = out.generators();
    for (std::size_t i = 0; i < built.size(); ++i) {
      if (gens[i].at("label").get<std::string>() != built[i].word().front()) {
        throw ParseError("generator " + std::to_string(i + 1) + " has label " +
                         gens[i].at("label").get<std::string>() + ", expected " +
                         built[i].word().front());
      }
      if (matrix_from_json(gens[i].at("unitary")) != built[i].unitary()) {
        throw ParseError("unitary of " + built[i].word().front() +
                         " does not match the instance and params");
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("generator bundle: ") + e.what());
  }
}

GeneratorSet compile(const PCPInstance& inst, const FreePair& pair, const Rational& damping) {
  return compile(inst, pair, std::vector<Rational>(2 * inst.size(), damping));
}

GeneratorSet compile(const PCPInstance& inst, const FreePair& pair,
                     const std::vector<Rational>& dampings) {
  const std::size_t k = inst.size();
  if (dampings.size() != 2 * k) {
    throw DomainError("compile: expected " + std::to_string(2 * k) + " dampings, got " +
                      std::to_string(dampings.size()));
  }
  for (const auto& d : dampings) check_open_unit(d, "compile");
  GeneratorSet out{inst, pair, {}, {}};
  for (std::size_t i = 1; i <= k; ++i) {
    const Tile& t = inst.tile(i);
    const ExactMatrix index_block = power(pair.a, static_cast<unsigned>(i)) * pair.b;
    out.h_gens.push_back(ChannelElement::make(
        ExactMatrix::block_diag(gamma(t.top, pair), index_block), dampings[i - 1],
        {label('H', i)}));
    out.g_gens.push_back(ChannelElement::make(
        ExactMatrix::block_diag(dagger(gamma(t.bottom, pair)), dagger(index_block)),
        dampings[k + i - 1], {label('G', i)}));
  }
  return out;
}

ChannelElement make_target(const Rational& damping, std::size_t dim) {
  check_open_unit(damping, "make_target");
  return ChannelElement::make(ExactMatrix::identity(dim), damping, {});
}

std::string to_string(MembershipMode m) {
  return m == MembershipMode::Generic ? "generic" : "structured";
}

bool MembershipOutcome::nontrivial_phase() const {
  return scalar_value && *scalar_value != GaussianRational(1);
}

nlohmann::json MembershipOutcome::to_json() const {
  using nlohmann::json;
  json j = {{"status", to_string(status)},
            {"mode", to_string(mode)},
            {"depth_reached", depth_reached},
            {"nodes_expanded", nodes_expanded},
            {"truncated", truncated}};
  j["witness"] = witness ? json(*witness) : json(nullptr);
  j["scalar_value"] = scalar_value ? json(scalar_value->str()) : json(nullptr);
  j["nontrivial_phase"] = nontrivial_phase();
  j["extracted"] = extracted ? json(*extracted) : json(nullptr);
  j["damping"] = damping ? json(damping->str()) : json(nullptr);
  j["damping_monomial"] = damping_monomial;
  return j;
}

MembershipOutcome membership_search(const GeneratorSet& gens, std::size_t max_depth,
                                    MembershipMode mode, const SearchOptions& options) {
  if (max_depth == 0) throw DomainError("membership_search: max_depth must be >= 1");
  return mode == MembershipMode::Generic ? generic_search(gens, max_depth, options)
                                         : structured_search(gens, max_depth, options);
}

std::optional<TileWord> extract_tile_word(const std::vector<std::string>& witness) {
  const std::size_t len = witness.size();
  if (len == 0 || len % 2 != 0) return std::nullopt;
  std::vector<std::pair<char, std::size_t>> parsed;
  for (const auto& l : witness) {
    parsed.push_back(parse_label(l));
    if (parsed.back().first == '\0') return std::nullopt;
  }
  const std::size_t n = len / 2;
  for (std::size_t r = 0; r < len; ++r) {
    auto at = [&](std::size_t i) { return parsed[(r + i) % len]; };
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const auto g = at(i);
      const auto h = at(len - 1 - i);
      ok = g.first == 'G' && h.first == 'H' && g.second == h.second;
    }
    if (!ok) continue;
    TileWord w;
    for (std::size_t i = n; i < len; ++i) w.push_back(at(i).second);
    return w;
  }
  return std::nullopt;
}

ChannelSet augmented_with_target(const GeneratorSet& gens, const Rational& damping) {
  ChannelSet out = gens.generators();
  const ChannelElement psi = make_target(damping);
  out.push_back(ChannelElement::make(psi.unitary(), psi.damping(), {kTargetLabel}));
  return out;
}

std::string to_string(DiffStatus s) {
  return s == DiffStatus::Distinct ? "Distinct" : "IndistinguishableUpToDepth";
}

nlohmann::json DiffOutcome::to_json() const {
  using nlohmann::json;
  json j = {{"status", to_string(status)},
            {"depth", depth},
            {"nodes_expanded", nodes_expanded},
            {"truncated", truncated}};
  if (witness_label) {
    j["witness"] = {{"label", *witness_label},
                    {"side", *witness_side},
                    {"depth", 1},
                    {"damping", witness_damping->str()},
                    {"unitary_digest", *witness_unitary_digest}};
  } else {
    j["witness"] = nullptr;
  }
  json m = json::array();
  for (const auto& x : matches) {
    m.push_back({{"label", x.label}, {"found_in", x.found_in}, {"word", x.word}});
  }
  j["matches"] = std::move(m);
  return j;
}

DiffOutcome theory_diff(const ChannelSet& f1, const ChannelSet& f2, std::size_t max_depth,
                        const SearchOptions& options) {
  if (max_depth == 0) throw DomainError("theory_diff: max_depth must be >= 1");
  std::size_t dim = 0;
  for (const ChannelSet* set : {&f1, &f2})
    for (const auto& c : *set) {
      if (dim == 0) dim = c.dim();
      if (c.dim() != dim) throw ShapeError("theory_diff: channels of different dimensions");
    }

  DiffOutcome out;
  out.depth = max_depth;
  // Generators of `from` are looked up in the bounded closure of `in`.
  auto one_way = [&](const ChannelSet& from, const ChannelSet& in, const char* from_name,
                     const char* in_name) {
    std::vector<ExactMatrix> mats;
    std::vector<bool> damped;
    for (const auto& c : in) {
      mats.push_back(c.unitary());
      damped.push_back(c.damping() < Rational(1));
    }
    for (const auto& x : from) {
      const bool x_damped = x.damping() < Rational(1);
      if (!x_damped && is_scalar(x.unitary())) {
        out.matches.push_back({element_label(x), in_name, {}});
        continue;
      }
      const detail::WordSearchResult r =
          detail::find_words(mats, damped, {x.unitary(), x_damped}, max_depth, options);
      out.nodes_expanded += r.nodes_expanded;
      if (r.witnesses.empty()) {
        out.status = DiffStatus::Distinct;
        out.depth = r.depth;
        out.truncated = r.truncated;
        out.witness_label = element_label(x);
        out.witness_side = from_name;
        out.witness_damping = x.damping();
        out.witness_unitary_digest = digest(normalize_phase(x.unitary())).hex();
        return false;
      }
      std::vector<std::string> word;
      const auto& s = r.witnesses.front();
      for (auto it = s.rbegin(); it != s.rend(); ++it) {
        const auto& w = in[*it].word();
        word.insert(word.end(), w.begin(), w.end());
      }
      out.matches.push_back({element_label(x), in_name, std::move(word)});
    }
    return true;
  };
  if (one_way(f2, f1, "f2", "f1")) one_way(f1, f2, "f1", "f2");
  return out;
}

}  // namespace undec
