#include "word_search.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "undec/parallel.hpp"

namespace undec::detail {

namespace {

struct Entry {
  Seq seq;
  bool damped = false;
};

struct Ref {
  std::uint32_t layer;
  std::uint32_t index;
};

class Layers {
 public:
  explicit Layers(std::size_t dim) {
    layers_.push_back({Entry{}});
    current_.push_back(ExactMatrix::identity(dim));
    index_[digest(current_.front())].push_back({0, 0});
  }

  std::size_t built() const { return layers_.size() - 1; }
  const std::vector<Entry>& layer(std::size_t t) const { return layers_[t]; }
  const ExactMatrix& current(std::size_t i) const { return current_[i]; }
  const Entry& entry(Ref r) const { return layers_[r.layer][r.index]; }

  const std::vector<Ref>* lookup(const Digest& d) const {
    const auto it = index_.find(d);
    return it == index_.end() ? nullptr : &it->second;
  }

  // Adds layer built()+1. Returns false (and adds nothing) when the node
  // budget would be exceeded.
  bool grow(const std::vector<ExactMatrix>& gens, const std::vector<bool>& damped,
            const SearchOptions& options, std::size_t& nodes) {
    const std::vector<Entry>& parents = layers_.back();
    const std::size_t g = gens.size();
    const std::size_t n = parents.size() * g;
    if (nodes + n > options.node_budget) return false;

    struct Child {
      std::optional<ExactMatrix> mat;
      std::optional<ExactMatrix> normalized;
      Digest key;
    };
    std::vector<Child> children(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
      Child& c = children[i];
      c.mat = gens[i % g] * current_[i / g];
      c.normalized = normalize_phase(*c.mat);
      c.key = digest(*c.normalized);
    });
    nodes += n;

    const auto layer_no = static_cast<std::uint32_t>(layers_.size());
    std::vector<Entry> next;
    std::vector<ExactMatrix> next_mats;
    std::vector<ExactMatrix> next_normalized;
    for (std::size_t i = 0; i < n; ++i) {
      Child& c = children[i];
      const bool flag = parents[i / g].damped || damped[i % g];
      std::vector<Ref>& bucket = index_[c.key];
      bool seen = false;
      for (const Ref& r : bucket) {
        const Entry& e = r.layer == layer_no ? next[r.index] : entry(r);
        if (e.damped != flag) continue;
        const ExactMatrix other = r.layer == layer_no
                                      ? next_normalized[r.index]
                                      : normalize_phase(product(gens, e.seq));
        if (other == *c.normalized) {
          seen = true;
          break;
        }
      }
      if (seen) continue;
      Seq seq = parents[i / g].seq;
      seq.push_back(static_cast<std::uint16_t>(i % g));
      bucket.push_back({layer_no, static_cast<std::uint32_t>(next.size())});
      next.push_back({std::move(seq), flag});
      next_mats.push_back(std::move(*c.mat));
      next_normalized.push_back(std::move(*c.normalized));
    }
    layers_.push_back(std::move(next));
    current_ = std::move(next_mats);
    return true;
  }

 private:
  std::vector<std::vector<Entry>> layers_;
  std::vector<ExactMatrix> current_;  // unnormalized products of the last layer
  std::unordered_map<Digest, std::vector<Ref>> index_;
};

}  // namespace

ExactMatrix product(const std::vector<ExactMatrix>& gens, const Seq& s) {
  ExactMatrix m = ExactMatrix::identity(gens.front().rows());
  for (const auto g : s) m = gens[g] * m;
  return m;
}

WordSearchResult find_words(const std::vector<ExactMatrix>& gens,
                            const std::vector<bool>& damped, const WordTarget& target,
                            std::size_t max_depth, const SearchOptions& options) {
  WordSearchResult out;
  if (gens.empty()) {
    out.depth = max_depth;
    return out;
  }
  Layers layers(gens.front().rows());
  const ExactMatrix target_n = normalize_phase(target.unitary);

  for (std::size_t d = 1; d <= max_depth; ++d) {
    const std::size_t a = (d + 1) / 2;
    const std::size_t b = d - a;
    while (layers.built() < a) {
      if (!layers.grow(gens, damped, options, out.nodes_expanded)) {
        out.truncated = true;
        out.depth = d - 1;
        return out;
      }
    }
    // The last built layer is always a, so its products are at hand.
    const std::vector<Entry>& left = layers.layer(a);
    std::vector<std::vector<Seq>> hits(left.size());
    parallel_for(left.size(), options.workers, [&](std::size_t i) {
      const ExactMatrix want = normalize_phase(target_n * dagger(layers.current(i)));
      const std::vector<Ref>* bucket = layers.lookup(digest(want));
      if (bucket == nullptr) return;
      for (const Ref& r : *bucket) {
        if (r.layer != b) continue;
        const Entry& right = layers.entry(r);
        if ((left[i].damped || right.damped) != target.damped) continue;
        if (normalize_phase(product(gens, right.seq)) != want) continue;
        Seq w = left[i].seq;
        w.insert(w.end(), right.seq.begin(), right.seq.end());
        hits[i].push_back(std::move(w));
      }
    });
    for (auto& h : hits)
      for (auto& w : h) out.witnesses.push_back(std::move(w));
    if (!out.witnesses.empty()) {
      std::sort(out.witnesses.begin(), out.witnesses.end());
      out.witnesses.erase(std::unique(out.witnesses.begin(), out.witnesses.end()),
                          out.witnesses.end());
      out.depth = d;
      return out;
    }
    out.depth = d;
  }
  return out;
}

}  // namespace undec::detail
