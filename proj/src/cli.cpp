#include "undec/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "undec/error.hpp"
#include "undec/freerot.hpp"
#include "undec/pcp.hpp"
#include "undec/reduction.hpp"
#include "undec/resourcegraph.hpp"

namespace undec {

namespace {

using nlohmann::json;

struct Config {
  std::string subcommand;
  std::string instance;
  std::string instance2;
  std::string graph;
  std::string params_file;
  std::string cos;
  std::string sin;
  std::string axis_a;
  std::string axis_b;
  bool unchecked_pair = false;
  std::string damping = "1/2";
  std::size_t depth = 0;
  std::size_t budget = 0;
  unsigned workers = 1;
  std::string out;
  std::string dot;
  std::string mode = "generic";
  std::string seed_state = "reference";
  std::string base;
};

// Everything a report needs besides the outcome.
struct Context {
  Config cfg;
  RotationParams params;
  Rational damping;
  json inputs = json::object();
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Axis parse_axis(const std::string& text) {
  Axis a;
  std::size_t k = 0;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (k == 3) throw ParseError("axis '" + text + "' must have 3 components");
    a[k++] = Rational::parse(part);
  }
  if (k != 3) throw ParseError("axis '" + text + "' must have 3 components");
  return a;
}

std::string axis_text(const Axis& a) {
  return a[0].str() + "," + a[1].str() + "," + a[2].str();
}

void record_input(Context& ctx, const std::string& role, const std::string& path,
                  const std::string& content) {
  ctx.inputs[role] = {{"path", path}, {"blake2b_128", digest_bytes(content).hex()}};
}

PCPInstance load_instance(Context& ctx, const std::string& path, const std::string& role) {
  if (path.empty()) throw DomainError("--" + role + " is required");
  const std::string text = read_file(path);
  record_input(ctx, role, path, text);
  return PCPInstance::parse(text);
}

FreePair make_pair(const Context& ctx) {
  return ctx.cfg.unchecked_pair ? make_pair_unchecked(ctx.params) : make_free_pair(ctx.params);
}

json config_json(const Context& ctx) {
  const Config& c = ctx.cfg;
  json j = {{"subcommand", c.subcommand},
            {"cos", ctx.params.cos_theta.str()},
            {"sin", ctx.params.sin_theta.str()},
            {"axis_a", axis_text(ctx.params.axis_a)},
            {"axis_b", axis_text(ctx.params.axis_b)},
            {"unchecked_pair", c.unchecked_pair},
            {"damping", ctx.damping.str()},
            {"depth", c.depth},
            {"budget", c.budget},
            {"mode", c.mode},
            {"seed_state", c.seed_state}};
  if (!c.instance.empty()) j["instance"] = c.instance;
  if (!c.instance2.empty()) j["instance2"] = c.instance2;
  if (!c.graph.empty()) j["graph"] = c.graph;
  if (!c.params_file.empty()) j["params"] = c.params_file;
  if (!c.base.empty()) j["base"] = c.base;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + path + "'");
  f << text;
}

ExactDensityMatrix seed_state(const std::string& name) {
  if (name == "reference") return reference_state();
  if (name == "zero") return ExactDensityMatrix::basis_state(4, 0);
  if (name == "mixed") return ExactDensityMatrix::maximally_mixed(4);
  throw DomainError("unknown seed state '" + name + "' (reference, zero, mixed)");
}

std::vector<LabeledChannel> labeled(const std::vector<ChannelElement>& gens) {
  std::vector<LabeledChannel> out;
  for (const auto& g : gens) out.push_back({g.word().front(), g});
  return out;
}

// ---- subcommands: each fills `outcome` and returns an exit code.

int cmd_verify_free(Context& ctx, json& outcome) {
  const FreePair pair = make_pair(ctx);
  ScanOptions opt;
  if (ctx.cfg.budget) opt.word_budget = ctx.cfg.budget;
  opt.workers = ctx.cfg.workers;
  const CollisionReport r = freeness_scan(pair, ctx.cfg.depth, opt);
  outcome = r.to_json();
  if (!r.empty()) return kExitCollision;
  return r.truncated ? kExitExhausted : kExitOk;
}

int cmd_solve_pcp(Context& ctx, json& outcome) {
  const PCPInstance inst = load_instance(ctx, ctx.cfg.instance, "instance");
  PcpSearchOptions opt;
  if (ctx.cfg.budget) opt.node_budget = ctx.cfg.budget;
  opt.workers = ctx.cfg.workers;
  const SearchOutcome r = solve_bounded(inst, ctx.cfg.depth, opt);
  outcome = r.to_json();
  return r.status == SearchStatus::Found ? kExitOk : kExitExhausted;
}

int cmd_compile(Context& ctx, json& outcome) {
  const PCPInstance inst = load_instance(ctx, ctx.cfg.instance, "instance");
  const GeneratorSet gs = compile(inst, make_pair(ctx), ctx.damping);
  json bundle = gs.to_json();
  json certs = json::array();
  bool all_ok = true;
  for (const auto& g : gs.generators()) {
    const CptpCertificate c = certify_cptp(choi(g), 4);
    all_ok = all_ok && c.ok();
    certs.push_back({{"label", g.word().front()}, {"cptp", c.ok()}, {"detail", c.reason()}});
  }
  outcome = {{"bundle", std::move(bundle)}, {"certificates", std::move(certs)}};
  return all_ok ? kExitOk : kExitMismatch;
}

int cmd_membership(Context& ctx, json& outcome) {
  const PCPInstance inst = load_instance(ctx, ctx.cfg.instance, "instance");
  const GeneratorSet gs = compile(inst, make_pair(ctx), ctx.damping);
  MembershipMode mode;
  if (ctx.cfg.mode == "generic") {
    mode = MembershipMode::Generic;
  } else if (ctx.cfg.mode == "structured") {
    mode = MembershipMode::Structured;
  } else {
    throw DomainError("unknown mode '" + ctx.cfg.mode + "' (generic, structured)");
  }
  SearchOptions opt;
  if (ctx.cfg.budget) opt.node_budget = ctx.cfg.budget;
  opt.workers = ctx.cfg.workers;
  const MembershipOutcome m = membership_search(gs, ctx.cfg.depth, mode, opt);

  // Oracle: a tile word of length n yields a generator word of length 2n.
  const std::size_t pcp_depth = std::max<std::size_t>(1, ctx.cfg.depth / 2);
  PcpSearchOptions popt;
  popt.workers = ctx.cfg.workers;
  const SearchOutcome p = solve_bounded(inst, pcp_depth, popt);

  const bool m_found = m.status == SearchStatus::Found;
  const bool p_found = p.status == SearchStatus::Found;
  bool extracted_ok = true;
  if (m.extracted) extracted_ok = verify_solution(inst, *m.extracted);
  std::string agreement;
  int code;
  if (m_found != p_found && !(m.truncated || p.truncated)) {
    agreement = "mismatch";
    code = kExitMismatch;
  } else if (m_found && !extracted_ok) {
    agreement = "extracted word does not verify";
    code = kExitMismatch;
  } else if (m_found != p_found) {
    agreement = "inconclusive (budget)";
    code = kExitExhausted;
  } else {
    agreement = "agree";
    code = m_found ? kExitOk : kExitExhausted;
  }
  outcome = {{"membership", m.to_json()},
             {"oracle", p.to_json()},
             {"oracle_depth", pcp_depth},
             {"agreement", agreement}};
  if (m.extracted) outcome["extracted_verifies"] = extracted_ok;
  return code;
}

int cmd_reach(Context& ctx, json& outcome) {
  const PCPInstance inst = load_instance(ctx, ctx.cfg.instance, "instance");
  const GeneratorSet gs = compile(inst, make_pair(ctx), ctx.damping);
  const ExactDensityMatrix seed = seed_state(ctx.cfg.seed_state);
  ExploreOptions opt;
  if (ctx.cfg.budget) opt.node_budget = ctx.cfg.budget;
  opt.workers = ctx.cfg.workers;
  const ReachGraph g = explore(labeled(gs.generators()), {seed}, ctx.cfg.depth, opt);
  if (!ctx.cfg.dot.empty()) write_text(ctx.cfg.dot, to_dot(g));

  // A word of j generators has damping λ^j, so ψ can only be met at those.
  json queries = json::array();
  bool any = false;
  Rational d(1);
  for (std::size_t j = 1; j <= ctx.cfg.depth; ++j) {
    d *= ctx.damping;
    const ExactDensityMatrix target = apply(make_target(d), seed);
    const ReachResult r = reach(g, seed, target);
    any = any || r.reachable;
    json q = r.to_json();
    q["target_damping"] = d.str();
    queries.push_back(std::move(q));
  }
  outcome = {{"nodes", g.nodes().size()},
             {"edges", g.edges().size()},
             {"truncated", g.truncated()},
             {"queries", std::move(queries)},
             {"reachable", any}};
  return any ? kExitOk : kExitExhausted;
}

int cmd_monotones(Context& ctx, json& outcome) {
  ReachGraph g;
  if (!ctx.cfg.graph.empty()) {
    const std::string text = read_file(ctx.cfg.graph);
    record_input(ctx, "graph", ctx.cfg.graph, text);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("graph file: ") + e.what());
    }
    g = ReachGraph::from_json(j);
  } else {
    const PCPInstance inst = load_instance(ctx, ctx.cfg.instance, "instance");
    const GeneratorSet gs = compile(inst, make_pair(ctx), ctx.damping);
    ExploreOptions opt;
    if (ctx.cfg.budget) opt.node_budget = ctx.cfg.budget;
    opt.workers = ctx.cfg.workers;
    g = explore(labeled(gs.generators()), {seed_state(ctx.cfg.seed_state)}, ctx.cfg.depth, opt);
  }
  const QuotientDAG q = quotient(g);
  if (!ctx.cfg.dot.empty()) write_text(ctx.cfg.dot, to_dot(g, &q));
  const std::vector<MonotoneTable> family = monotone_family(q);
  const CompatibilityResult compat = check_compatible(g, q, family);
  const CompletenessResult complete = check_complete(q, family);

  outcome = {{"nodes", g.nodes().size()},
             {"edges", g.edges().size()},
             {"classes", q.size()},
             {"quotient", q.to_json(g)},
             {"compatible", compat.to_json(g)},
             {"complete", complete.to_json()}};
  if (!ctx.cfg.base.empty()) {
    const auto node = g.find_id(ctx.cfg.base);
    if (!node) throw UnknownStateError("--base '" + ctx.cfg.base + "' is not a node id");
    const MonotoneTable& t = family[q.class_of[*node]];
    json by_node = json::object();
    for (std::size_t v = 0; v < g.nodes().size(); ++v) {
      by_node[g.nodes()[v].id] = t.values[q.class_of[v]].str();
    }
    outcome["base_table"] = t.to_json();
    outcome["base_values_by_node"] = std::move(by_node);
  }
  return compat.ok && complete.ok ? kExitOk : kExitMismatch;
}

int cmd_diff(Context& ctx, json& outcome) {
  const PCPInstance inst = load_instance(ctx, ctx.cfg.instance, "instance");
  const FreePair pair = make_pair(ctx);
  const GeneratorSet gs = compile(inst, pair, ctx.damping);
  const ChannelSet f1 = gs.generators();
  ChannelSet f2;
  std::string f2_desc;
  if (ctx.cfg.instance2.empty()) {
    f2 = augmented_with_target(gs, ctx.damping);
    f2_desc = "f1 plus target";
  } else {
    const PCPInstance inst2 = load_instance(ctx, ctx.cfg.instance2, "instance2");
    f2 = compile(inst2, pair, ctx.damping).generators();
    f2_desc = "compiled instance2";
  }
  SearchOptions opt;
  if (ctx.cfg.budget) opt.node_budget = ctx.cfg.budget;
  opt.workers = ctx.cfg.workers;
  const DiffOutcome d = theory_diff(f1, f2, ctx.cfg.depth, opt);
  outcome = d.to_json();
  outcome["f2"] = f2_desc;
  return d.status == DiffStatus::Distinct ? kExitOk : kExitExhausted;
}

void add_common(CLI::App* sub, Config& c, bool pair_opts, bool instance) {
  if (instance) sub->add_option("--instance", c.instance, "PCP instance file");
  if (pair_opts) {
    sub->add_option("--params", c.params_file, "rotation params JSON file");
    sub->add_option("--cos", c.cos, "cos θ as p/q");
    sub->add_option("--sin", c.sin, "sin θ as p/q");
    sub->add_option("--axis-a", c.axis_a, "axis of A as x,y,z");
    sub->add_option("--axis-b", c.axis_b, "axis of B as x,y,z");
    sub->add_flag("--unchecked-pair", c.unchecked_pair, "skip the freeness checks");
    sub->add_option("--damping", c.damping, "generator damping in (0,1)");
  }
  sub->add_option("--depth", c.depth, "search depth bound");
  sub->add_option("--budget", c.budget, "node budget (0 = module default)");
  sub->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1u, 256u));
  sub->add_option("--out", c.out, "report file (default stdout)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Exact PCP-to-channel-membership reduction toolkit", "undec"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    std::size_t default_depth;
    std::function<int(Context&, json&)> run;
  };
  const std::vector<Sub> subs = {
      {"verify-free", "scan the rotation pair for word collisions", 12, cmd_verify_free},
      {"solve-pcp", "bounded PCP search", 10, cmd_solve_pcp},
      {"compile", "compile an instance into its generator bundle", 4, cmd_compile},
      {"membership", "search for the target in the generated semigroup", 8, cmd_membership},
      {"reach", "explore states and query the target state", 4, cmd_reach},
      {"monotones", "quotient, monotone family and checks", 4, cmd_monotones},
      {"diff", "bounded distinguishability of two generating sets", 4, cmd_diff},
  };
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    const std::string name = s.name;
    const bool pair_opts = name != "solve-pcp";
    const bool instance = name != "verify-free";
    add_common(sub, c, pair_opts, instance);
    if (name == "membership") sub->add_option("--mode", c.mode, "generic or structured");
    if (name == "reach" || name == "monotones") {
      sub->add_option("--dot", c.dot, "DOT output file");
      sub->add_option("--seed-state", c.seed_state, "reference, zero or mixed");
    }
    if (name == "monotones") {
      sub->add_option("--graph", c.graph, "graph JSON file instead of an instance");
      sub->add_option("--base", c.base, "node id whose table is reported");
    }
    if (name == "diff") sub->add_option("--instance2", c.instance2, "second instance file");
    handles.push_back(sub);
  }

  std::vector<std::string> argv_s{"undec"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_s) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  std::size_t which = 0;
  while (!handles[which]->parsed()) ++which;
  c.subcommand = subs[which].name;
  if (handles[which]->get_option("--depth")->count() == 0) c.depth = subs[which].default_depth;

  Context ctx;
  ctx.cfg = c;
  json outcome;
  int code = kExitError;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!c.params_file.empty()) {
      json pj;
      try {
        pj = json::parse(read_file(c.params_file));
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("params file: ") + e.what());
      }
      record_input(ctx, "params", c.params_file, pj.dump());
      ctx.params = RotationParams::from_json(pj);
    }
    if (!c.cos.empty()) ctx.params.cos_theta = Rational::parse(c.cos);
    if (!c.sin.empty()) ctx.params.sin_theta = Rational::parse(c.sin);
    if (!c.axis_a.empty()) ctx.params.axis_a = parse_axis(c.axis_a);
    if (!c.axis_b.empty()) ctx.params.axis_b = parse_axis(c.axis_b);
    if (!c.unchecked_pair) validate(ctx.params);
    ctx.damping = Rational::parse(c.damping);
    if (ctx.damping.sign() <= 0 || ctx.damping >= Rational(1)) {
      throw DomainError("damping " + ctx.damping.str() + " outside (0,1)");
    }
    if (c.depth == 0) throw DomainError("--depth must be >= 1");
    code = subs[which].run(ctx, outcome);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    outcome = {{"error", e.what()}};
    code = kExitError;
  }
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();

  json report = {{"tool", "undec"},
                 {"config", config_json(ctx)},
                 {"inputs", ctx.inputs},
                 {"outcome", std::move(outcome)},
                 {"exit_code", code},
                 {"timing", {{"wall_ms", wall_ms}, {"workers", c.workers}}}};
  const std::string text = report.dump(2) + "\n";
  try {
    if (c.out.empty()) {
      out << text;
    } else {
      write_text(c.out, text);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return code;
}

}  // namespace undec
