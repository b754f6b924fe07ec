// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "undec/channel.hpp"
#include "undec/cli.hpp"
#include "undec/freerot.hpp"
#include "undec/pcp.hpp"
#include "undec/reduction.hpp"
#include "undec/resourcegraph.hpp"

using namespace undec;
using G = GaussianRational;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double kFreenessSecondsLimit = 60.0;
constexpr std::size_t kFreenessMaxLen = 12;
constexpr std::size_t kFreenessWords = 8190;
constexpr int kComposePairs = 1000;
constexpr std::size_t kMinCorpus = 20;
constexpr std::size_t kMinSolvable = 10;
constexpr std::size_t kMinUnsolved = 10;
constexpr std::size_t kMaxMinimalLength = 8;
constexpr std::size_t kClassifyDepth = 10;
constexpr int kRandomGraphs = 50;
constexpr std::size_t kMaxRandomNodes = 200;
constexpr std::size_t kMaxExploreDepth = 6;
constexpr int kReruns = 3;

struct Entry {
  std::string name;
  PCPInstance instance;
  std::string path;
};

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<Entry> load_corpus() {
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(UNDEC_TEST_DATA "/corpus"))
    paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<Entry> out;
  for (const auto& p : paths)
    out.push_back({p.stem().string(), PCPInstance::parse(read(p)), p.string()});
  return out;
}

const FreePair& pair() {
  static const FreePair p = make_free_pair({});
  return p;
}

// Tile-word depth d searched by solve_bounded; membership runs at 2d.
std::size_t matched_depth(const PCPInstance& inst) {
  switch (inst.size()) {
    case 1: return 10;
    case 2: return 8;
    default: return 5;
  }
}

// Explore depth for criterion 5, kept where the node count stays small.
std::size_t explore_depth(const PCPInstance& inst) {
  switch (inst.size()) {
    case 1: return kMaxExploreDepth;
    case 2: return 4;
    default: return 3;
  }
}

std::vector<LabeledChannel> labeled(const std::vector<ChannelElement>& gens) {
  std::vector<LabeledChannel> out;
  for (const auto& g : gens) out.push_back({g.word().front(), g});
  return out;
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

// ---- 1

void freeness() {
  const auto t = Clock::now();
  const CollisionReport r = freeness_scan(pair(), kFreenessMaxLen, {1u << 22, 1});
  const double s = seconds_since(t);
  const bool ok = r.word_count == kFreenessWords && r.collisions.empty() &&
                  r.scalar_words.empty() && !r.truncated && s < kFreenessSecondsLimit;
  std::ostringstream d;
  d << r.word_count << " words, " << r.collisions.size() << " collisions, "
    << r.scalar_words.size() << " scalar words, " << s << " s";
  report(1, ok, d.str());
}

// ---- 2

void composition() {
  oracle::Rng rng(2024);
  int bad = 0;
  for (int t = 0; t < kComposePairs; ++t) {
    const Rational dx(oracle::uniform(rng, 1, 12), 12);
    const Rational dy(oracle::uniform(rng, 1, 12), 12);
    const ChannelElement x = ChannelElement::make(oracle::cayley_unitary(rng, 4), dx, {"x"});
    const ChannelElement y = ChannelElement::make(oracle::cayley_unitary(rng, 4), dy, {"y"});
    const ExactDensityMatrix rho = ExactDensityMatrix::make(oracle::random_density(rng, 4));
    const ChannelElement xy = compose(x, y);
    if (!(apply(xy, rho) == apply(x, apply(y, rho))) || !(xy.damping() == dx * dy)) ++bad;
  }
  report(2, bad == 0,
         std::to_string(kComposePairs - bad) + "/" + std::to_string(kComposePairs) +
             " pairs exact");
}

// ---- 3

// Output partial trace computed independently of the library.
ExactMatrix partial_trace(const ExactMatrix& j, std::size_t d) {
  std::vector<G> out(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t a = 0; a < d; ++a) out[i * d + k] += j(i * d + a, k * d + a);
  return {d, d, std::move(out)};
}

void cptp(const std::vector<Entry>& corpus) {
  std::size_t gens = 0, bad = 0;
  for (const auto& e : corpus) {
    const GeneratorSet gs = compile(e.instance, pair(), Rational(1, 2));
    for (const auto& g : gs.generators()) {
      const ExactMatrix j = choi(g);
      ++gens;
      const bool ok = certify_cptp(j, 4).ok() && oracle::psd_by_sturm(j) &&
                      partial_trace(j, 4) == ExactMatrix::identity(4);
      if (!ok) ++bad;
    }
  }
  report(3, corpus.size() >= kMinCorpus && bad == 0,
         std::to_string(corpus.size()) + " instances, " + std::to_string(gens - bad) + "/" +
             std::to_string(gens) + " generators certified");
}

// ---- 4

void equivalence(const std::vector<Entry>& corpus) {
  std::size_t solvable = 0, unsolved = 0, disagreements = 0, bad_extract = 0, bad_depth = 0;
  std::vector<std::string> problems;
  for (const auto& e : corpus) {
    const auto classify = solve_bounded(e.instance, kClassifyDepth);
    const auto minimal = oracle::brute_force_pcp(e.instance, kMaxMinimalLength);
    if (classify.status == SearchStatus::Found) {
      if (minimal) ++solvable;
    } else {
      ++unsolved;
    }

    const std::size_t d = matched_depth(e.instance);
    const auto p = solve_bounded(e.instance, d);
    const GeneratorSet gs = compile(e.instance, pair(), Rational(1, 2));
    for (const auto mode : {MembershipMode::Generic, MembershipMode::Structured}) {
      const MembershipOutcome m = membership_search(gs, 2 * d, mode);
      const char* mode_name = mode == MembershipMode::Generic ? "generic" : "structured";
      if (m.status != p.status || m.truncated || p.truncated) {
        ++disagreements;
        problems.push_back(e.name + "/" + mode_name + " status");
        continue;
      }
      if (!m.witness) continue;
      if (!m.extracted || !verify_solution(e.instance, *m.extracted)) {
        ++bad_extract;
        problems.push_back(e.name + "/" + mode_name + " extraction");
      }
      if (!minimal || m.witness->size() != 2 * minimal->size()) {
        ++bad_depth;
        problems.push_back(e.name + "/" + mode_name + " depth");
      }
    }
  }
  std::ostringstream detail;
  detail << solvable << " solvable, " << unsolved << " unsolved to depth " << kClassifyDepth
         << ", " << disagreements << " status disagreements, " << bad_extract
         << " bad extractions, " << bad_depth << " depth mismatches";
  for (const auto& p : problems) detail << " [" << p << "]";
  report(4,
         solvable >= kMinSolvable && unsolved >= kMinUnsolved && disagreements == 0 &&
             bad_extract == 0 && bad_depth == 0,
         detail.str());
}

// ---- 5 and 6

ReachGraph from_adj(const oracle::Adj& adj) {
  ReachGraph g;
  for (std::size_t i = 0; i < adj.size(); ++i) g.add_node({"n" + std::to_string(i), {}});
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (const auto v : adj[u]) g.add_edge({u, v, "e", Rational(1)});
  return g;
}

oracle::Adj to_adj(const ReachGraph& g) {
  oracle::Adj adj(g.nodes().size());
  for (const auto& e : g.edges()) adj[e.from].push_back(e.to);
  return adj;
}

// Checks and oracle agreement: dominance under the family equals
// reachability in the closure of the original graph.
bool monotones_sound(const ReachGraph& g) {
  const QuotientDAG q = quotient(g);
  const auto family = monotone_family(q);
  if (!check_compatible(g, q, family).ok || !check_complete(q, family).ok) return false;
  const auto closure = oracle::transitive_closure(to_adj(g));
  // Compare per class using one representative node each.
  for (std::size_t a = 0; a < q.size(); ++a)
    for (std::size_t b = 0; b < q.size(); ++b) {
      bool dominated = true;
      for (const auto& f : family) dominated = dominated && f.values[b] <= f.values[a];
      if (dominated != closure[q.classes[a][0]][q.classes[b][0]]) return false;
    }
  return true;
}

void monotones(const std::vector<Entry>& corpus) {
  oracle::Rng rng(5050);
  int random_ok = 0;
  std::size_t max_classes = 0;
  for (int t = 0; t < kRandomGraphs; ++t) {
    const auto n = static_cast<std::size_t>(
        oracle::uniform(rng, 1, static_cast<long>(kMaxRandomNodes)));
    // Sparse enough that many classes survive the quotient.
    const ReachGraph g = from_adj(oracle::random_digraph(rng, n, oracle::uniform(rng, 0, 2)));
    max_classes = std::max(max_classes, quotient(g).size());
    if (monotones_sound(g)) ++random_ok;
  }

  std::size_t explored_ok = 0, largest = 0;
  for (const auto& e : corpus) {
    const GeneratorSet gs = compile(e.instance, pair(), Rational(1, 2));
    const ReachGraph g =
        explore(labeled(gs.generators()), {reference_state()}, explore_depth(e.instance));
    largest = std::max(largest, g.nodes().size());
    if (!g.truncated() && monotones_sound(g)) ++explored_ok;
  }

  const ReachGraph ref_graph = ReachGraph::from_json(
      nlohmann::json::parse(read(UNDEC_TEST_DATA "/fixtures/monotone_graph.json")));
  const QuotientDAG fq = quotient(ref_graph);
  const MonotoneTable ft = monotone(fq, fq.class_of[*ref_graph.find_id("rho")]);
  const bool graph_ok = ft.values[fq.class_of[*ref_graph.find_id("sigma")]] == Rational(1, 7) &&
                        ft.values[fq.class_of[*ref_graph.find_id("island_p")]] == Rational(2) &&
                        monotones_sound(ref_graph);

  std::ostringstream d;
  d << random_ok << "/" << kRandomGraphs << " random graphs (max " << max_classes
    << " classes), " << explored_ok << "/" << corpus.size()
    << " explored graphs (largest " << largest << " nodes), reference graph "
    << (graph_ok ? "1/7 and 2" : "wrong");
  report(5,
         random_ok == kRandomGraphs && max_classes <= kMaxRandomNodes &&
             explored_ok == corpus.size() && graph_ok,
         d.str());
}

bool acyclic(const QuotientDAG& q) {
  std::vector<std::size_t> indeg(q.size(), 0);
  std::vector<std::vector<std::size_t>> out(q.size());
  for (const auto& e : q.edges) {
    if (e.from == e.to) return false;
    ++indeg[e.to];
    out[e.from].push_back(e.to);
  }
  std::vector<std::size_t> ready;
  for (std::size_t c = 0; c < q.size(); ++c)
    if (indeg[c] == 0) ready.push_back(c);
  std::size_t done = 0;
  while (!ready.empty()) {
    const auto c = ready.back();
    ready.pop_back();
    ++done;
    for (const auto v : out[c])
      if (--indeg[v] == 0) ready.push_back(v);
  }
  return done == q.size();
}

void quotients() {
  oracle::Rng rng(6060);
  int ok = 0;
  for (int t = 0; t < kRandomGraphs; ++t) {
    const auto n = static_cast<std::size_t>(
        oracle::uniform(rng, 1, static_cast<long>(kMaxRandomNodes)));
    const oracle::Adj adj = oracle::random_digraph(rng, n, oracle::uniform(rng, 0, 3));
    const QuotientDAG q = quotient(from_adj(adj));
    std::vector<std::vector<bool>> r;
    for (std::size_t u = 0; u < n; ++u) r.push_back(oracle::bfs_reachable(adj, u));
    bool same = acyclic(q);
    for (std::size_t u = 0; u < n && same; ++u)
      for (std::size_t v = 0; v < n && same; ++v)
        same = (q.class_of[u] == q.class_of[v]) == (r[u][v] && r[v][u]);
    if (same) ++ok;
  }
  report(6, ok == kRandomGraphs,
         std::to_string(ok) + "/" + std::to_string(kRandomGraphs) + " graphs");
}

// ---- 7

void distinguishability(const std::vector<Entry>& corpus) {
  std::size_t agree = 0, indist = 0;
  bool unconditional = false;
  std::vector<std::string> problems;
  for (const auto& e : corpus) {
    const std::size_t bound = 2 * matched_depth(e.instance);
    const GeneratorSet gs = compile(e.instance, pair(), Rational(1, 2));
    const DiffOutcome r =
        theory_diff(gs.generators(), augmented_with_target(gs, Rational(1, 2)), bound);
    const auto minimal = oracle::brute_force_pcp(e.instance, bound / 2);
    const bool realizable = minimal && 2 * minimal->size() <= bound;
    const bool says_indist = r.status == DiffStatus::IndistinguishableUpToDepth;
    const auto j = r.to_json();
    if (j["depth"] != bound || r.truncated) unconditional = true;
    if (says_indist == realizable) {
      ++agree;
    } else {
      problems.push_back(e.name);
    }
    if (says_indist) ++indist;
  }
  std::ostringstream d;
  d << agree << "/" << corpus.size() << " instances agree (" << indist
    << " indistinguishable to their bound)";
  for (const auto& p : problems) d << " [" << p << "]";
  report(7, agree == corpus.size() && !unconditional, d.str());
}

// ---- 8

std::string strip_timing(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  j.erase("timing");
  return j.dump();
}

void reproducibility(const std::vector<Entry>& corpus) {
  auto path = [&](const char* name) {
    for (const auto& e : corpus)
      if (e.name == name) return e.path;
    return std::string();
  };
  const std::vector<std::vector<std::string>> cmds = {
      {"verify-free", "--depth", "8"},
      {"solve-pcp", "--instance", path("s10_mixed")},
      {"membership", "--instance", path("s04_four"), "--depth", "8"},
      {"membership", "--instance", path("s10_mixed"), "--depth", "10", "--mode", "structured"},
      {"membership", "--instance", path("u10"), "--depth", "6"},
      {"reach", "--instance", path("s02_pair"), "--depth", "3"},
      {"monotones", "--instance", path("s01_single"), "--depth", "4"},
      {"monotones", "--graph", UNDEC_TEST_DATA "/fixtures/monotone_graph.json", "--base", "rho"},
      {"diff", "--instance", path("u10"), "--depth", "3"},
  };
  std::size_t stable = 0;
  for (const auto& base : cmds) {
    std::string ref;
    bool same = true;
    for (const char* w : {"1", "2", "8"}) {
      for (int k = 0; k < kReruns; ++k) {
        auto args = base;
        args.insert(args.end(), {"--workers", w});
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        const std::string s = std::to_string(code) + strip_timing(out.str());
        if (ref.empty()) ref = s;
        same = same && s == ref && code != kExitError;
      }
    }
    if (same) ++stable;
  }
  report(8, stable == cmds.size(),
         std::to_string(stable) + "/" + std::to_string(cmds.size()) +
             " configurations identical over " + std::to_string(kReruns) +
             " runs at workers 1, 2, 8");
}

}  // namespace

int main() {
  const std::vector<Entry> corpus = load_corpus();
  const std::vector<std::function<void()>> steps = {
      freeness,
      composition,
      [&] { cptp(corpus); },
      [&] { equivalence(corpus); },
      [&] { monotones(corpus); },
      quotients,
      [&] { distinguishability(corpus); },
      [&] { reproducibility(corpus); },
  };
  for (std::size_t i = 0; i < steps.size(); ++i) {
    try {
      steps[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
    }
  }
  std::printf("note: tests/fixtures/gaps holds instances with a scalar generator word but no "
              "PCP solution; they are outside the corpus and covered by test_reduction\n");
  return failures == 0 ? 0 : 1;
}
