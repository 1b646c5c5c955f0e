#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aa/antialign.hpp"
#include "aa/errors.hpp"
#include "aa/oracle.hpp"
#include "aa/precision.hpp"
#include "aa/solver.hpp"

namespace {

using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kNotFound = 3, kExplosion = 4, kDiffMismatch = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string model;
  std::string log;
  std::string model_format;
  std::string log_format;
  std::string dist = "lev";
  std::size_t n = 0;
  std::size_t length_budget = 0;
  std::string m;
  std::size_t max_d = 0;
  bool prefix = false;
  std::string epsilon = "0.05";
  bool flower_patch = false;
  std::size_t flower_horizon = 2;
  std::string dimacs_out;
  std::string format = "json";
  std::string output;
  bool timings = false;
  bool diff = false;
  std::size_t state_cap = 1'000'000;

  CLI::Option* n_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* m_opt = nullptr;
  CLI::Option* max_d_opt = nullptr;
  CLI::Option* epsilon_opt = nullptr;
};

std::string read_file(const std::string& path, const char* flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(std::string(flag) + ": cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string extension(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

aa::NetFormat net_format(const Options& o) {
  const std::string f = o.model_format.empty() ? extension(o.model) : "." + o.model_format;
  if (f == ".pnml") return aa::NetFormat::Pnml;
  if (f == ".tnet") return aa::NetFormat::Tnet;
  throw UsageError("--model: cannot tell the format of " + o.model + "; pass --model-format pnml|tnet");
}

aa::LogFormat log_format(const Options& o) {
  const std::string f = o.log_format.empty() ? extension(o.log) : "." + o.log_format;
  if (f == ".xes") return aa::LogFormat::Xes;
  if (f == ".tlog") return aa::LogFormat::Tlog;
  throw UsageError("--log: cannot tell the format of " + o.log + "; pass --log-format xes|tlog");
}

aa::PetriNet load_net(const Options& o) {
  const auto format = net_format(o);
  const std::string text = read_file(o.model, "--model");
  try {
    return aa::parse_net(text, format);
  } catch (const aa::Error& e) {
    throw InputError(o.model + ": " + e.what());
  }
}

aa::EventLog load_log(const Options& o, const aa::PetriNet& net) {
  const auto format = log_format(o);
  const std::string text = read_file(o.log, "--log");
  try {
    return aa::parse_log(text, format, net.alphabet());
  } catch (const aa::Error& e) {
    throw InputError(o.log + ": " + e.what());
  }
}

aa::Rational rational_flag(const std::string& text, const char* flag) {
  try {
    return aa::parse_rational(text);
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + ": not a rational number: " + text);
  }
}

std::vector<aa::DistanceKind> kinds(const Options& o) {
  if (o.dist == "ham") return {aa::DistanceKind::Hamming};
  if (o.dist == "lev") return {aa::DistanceKind::Levenshtein};
  return {aa::DistanceKind::Hamming, aa::DistanceKind::Levenshtein};
}

std::optional<aa::Rational> threshold(const Options& o) {
  if (!o.m_opt || o.m_opt->count() == 0) return std::nullopt;
  const auto m = rational_flag(o.m, "--m");
  if (m < aa::Rational(0) || m > aa::Rational(1)) throw UsageError("--m: threshold must lie in [0, 1]");
  return m;
}

aa::Rational epsilon(const Options& o) {
  const auto eps = rational_flag(o.epsilon, "--epsilon");
  if (eps < aa::Rational(0)) throw UsageError("--epsilon: must be >= 0");
  return eps;
}

aa::SearchOptions search_options(const Options& o, const aa::sat::SolverBackend* backend) {
  aa::SearchOptions s;
  if (o.max_d_opt && o.max_d_opt->count() > 0) s.max_d = o.max_d;
  s.prefix_mode = o.prefix;
  s.backend = backend;
  s.limits.max_nodes = o.state_cap;
  return s;
}

json run_json(const aa::PetriNet& net, const aa::EventLog& log, const std::optional<aa::Run>& run) {
  if (!run) return nullptr;
  const auto& alphabet = aa::merged(net.alphabet(), log.alphabet());
  json transitions = json::array();
  json word = json::array();
  for (auto t : run->firings) transitions.push_back(net.transition_name(t));
  for (auto a : run->visible) word.push_back(alphabet.name(a));
  json j;
  j["transitions"] = std::move(transitions);
  j["word"] = std::move(word);
  j["length"] = run->firings.size();
  return j;
}

std::string word_text(const json& run) {
  if (run.is_null()) return "none";
  std::string out = "<";
  for (std::size_t k = 0; k < run["word"].size(); ++k) out += (k ? "," : "") + run["word"][k].get<std::string>();
  return out + ">";
}

json stats_json(const aa::SearchStats& s, double seconds) {
  json j;
  j["seconds"] = seconds;
  j["sat_queries"] = s.queries;
  j["refinements"] = s.refinements;
  j["variables"] = s.variables;
  j["clauses"] = s.clauses;
  return j;
}

json report_json(const aa::PrecisionReport& r, const aa::PetriNet& net, const aa::EventLog& log, bool timings) {
  json j;
  j["metric"] = r.metric;
  j["distance_kind"] = std::string(aa::to_string(r.kind));
  j["epsilon"] = aa::to_string(r.epsilon);
  j["value"] = aa::round3(r.value);
  j["value_rational"] = aa::to_string(r.value);
  j["status"] = std::string(aa::to_string(r.status));
  j["witness_run"] = run_json(net, log, r.witness.run);
  j["witness_distance"] = r.witness.found() ? json(aa::to_string(r.witness.distance)) : json(nullptr);
  j["depth_used"] = r.depth_used;
  j["flower_flag"] = r.flower_flag;
  if (timings) j["timings"] = stats_json(r.witness.stats, r.seconds);
  return j;
}

std::string report_text(const json& j) {
  std::ostringstream out;
  char value[32];
  std::snprintf(value, sizeof value, "%.3f", j["value"].get<double>());
  out << j["metric"].get<std::string>() << "[" << j["distance_kind"].get<std::string>() << "] ";
  if (j["status"] == "exact")
    out << "= " << value << " (exact)";
  else
    out << ">= " << value << " (1-m)";
  out << "  witness " << word_text(j["witness_run"]);
  if (!j["witness_distance"].is_null()) out << " at distance " << j["witness_distance"].get<std::string>();
  out << "\n";
  return out.str();
}

void emit(const Options& o, const json& j, const std::string& text) {
  const std::string body = o.format == "text" ? text : j.dump(2) + "\n";
  if (o.output.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw InputError("--output: cannot write " + o.output);
  out << body;
}

int cmd_antialign(const Options& o, const aa::sat::SolverBackend* backend) {
  const bool has_n = o.n_opt->count() > 0;
  const bool has_budget = o.budget_opt->count() > 0;
  if (has_n == has_budget) throw UsageError("antialign needs exactly one of --n and --length-budget");
  const auto m = threshold(o);
  if (m && has_budget) throw UsageError("--m applies to a fixed length --n only");
  if (!o.dimacs_out.empty() && (!has_n || o.dist == "both"))
    throw UsageError("--dimacs-out needs --n and a single distance kind");
  const auto eps = epsilon(o);
  const auto net = load_net(o);
  const auto log = load_log(o, net);
  const auto options = search_options(o, backend);

  json results = json::array();
  std::string text;
  bool all_found = true;
  for (auto kind : kinds(o)) {
    aa::AntiAlignmentResult r;
    if (has_budget) {
      r = aa::max_anti_alignment(net, log, kind, o.length_budget, eps, options);
    } else if (m) {
      aa::AntiAlignmentQuery q;
      q.n = o.n;
      q.kind = kind;
      q.threshold = m;
      q.options = options;
      r = aa::find_anti_alignment(net, log, q);
    } else {
      r = aa::max_anti_alignment_at_length(net, log, o.n, kind, options);
    }
    all_found = all_found && r.found();

    json j;
    j["distance_kind"] = std::string(aa::to_string(kind));
    if (has_n) j["n"] = o.n;
    if (has_budget) {
      j["length_budget"] = o.length_budget;
      j["epsilon"] = aa::to_string(eps);
    }
    j["threshold"] = m ? json(aa::to_string(*m)) : json(nullptr);
    j["found"] = r.found();
    j["run"] = run_json(net, log, r.run);
    j["distance"] = r.found() ? json(aa::to_string(r.distance)) : json(nullptr);
    j["distance_decimal"] = r.found() ? json(aa::round3(aa::to_score(r.distance))) : json(nullptr);
    if (has_budget) j["score"] = r.found() ? json(aa::to_string(r.score)) : json(nullptr);
    j["is_lower_bound"] = r.is_lower_bound;
    if (o.timings) j["timings"] = stats_json(r.stats, r.stats.seconds);
    text += std::string(aa::to_string(kind)) + ": " + word_text(j["run"]);
    if (r.found()) text += " at distance " + aa::to_string(r.distance);
    text += "\n";
    results.push_back(std::move(j));

    if (!o.dimacs_out.empty()) {
      const auto cnf = aa::build_threshold_cnf(net, log, o.n, kind, m.value_or(aa::Rational(0)), options);
      std::ofstream dimacs(o.dimacs_out, std::ios::binary);
      std::ofstream map(o.dimacs_out + ".map.json", std::ios::binary);
      if (!dimacs || !map) throw InputError("--dimacs-out: cannot write " + o.dimacs_out);
      aa::sat::write_dimacs(dimacs, cnf.cnf);
      aa::write_var_map(map, cnf.run.vars, cnf.cnf, net, cnf.distance.traces);
    }
  }
  emit(o, results.size() == 1 ? results[0] : results, text);
  return all_found ? kOk : kNotFound;
}

aa::PrecisionConfig precision_config(const Options& o, const aa::sat::SolverBackend* backend) {
  aa::PrecisionConfig cfg;
  cfg.epsilon = epsilon(o);
  cfg.threshold = threshold(o);
  if (cfg.threshold && cfg.threshold->numerator() == 0) throw UsageError("--m: threshold must be positive");
  if (o.budget_opt->count() > 0) cfg.length_budget = o.length_budget;
  if (o.n_opt->count() > 0) throw UsageError("--n applies to antialign only; use --length-budget");
  cfg.flower_patch = o.flower_patch;
  cfg.flower_horizon = o.flower_horizon;
  cfg.search = search_options(o, backend);
  if (cfg.threshold && cfg.epsilon.numerator() == 0) throw UsageError("--m needs --epsilon > 0");
  return cfg;
}

int cmd_precision(const Options& o, const aa::sat::SolverBackend* backend) {
  if (!o.dimacs_out.empty()) throw UsageError("--dimacs-out applies to antialign only");
  auto cfg = precision_config(o, backend);
  const auto net = load_net(o);
  const auto log = load_log(o, net);
  json results = json::array();
  std::string text;
  for (auto kind : kinds(o)) {
    cfg.kind = kind;
    const auto j = report_json(aa::compute_precision(net, log, cfg), net, log, o.timings);
    text += report_text(j);
    results.push_back(j);
  }
  emit(o, results.size() == 1 ? results[0] : results, text);
  return kOk;
}

int cmd_oracle(const Options& o, const aa::sat::SolverBackend* backend) {
  if (!o.dimacs_out.empty()) throw UsageError("--dimacs-out applies to antialign only");
  if (o.max_d_opt->count() > 0 || o.prefix) throw UsageError("the oracle supports neither --max-d nor --prefix");
  auto cfg = precision_config(o, backend);
  const auto net = load_net(o);
  const auto log = load_log(o, net);
  json results = json::array();
  std::string text;
  bool identical = true;
  for (auto kind : kinds(o)) {
    cfg.kind = kind;
    const auto oracle = aa::oracle_precision(net, log, cfg);
    auto j = report_json(oracle, net, log, o.timings);
    text += "oracle " + report_text(j);
    if (o.diff) {
      const auto sat = aa::compute_precision(net, log, cfg);
      const bool same = sat.value == oracle.value && sat.status == oracle.status;
      identical = identical && same;
      json pair;
      pair["oracle"] = std::move(j);
      pair["sat"] = report_json(sat, net, log, o.timings);
      pair["identical"] = same;
      text += "sat    " + report_text(pair["sat"]) + (same ? "identical\n" : "DIFFERENT\n");
      results.push_back(std::move(pair));
    } else {
      results.push_back(std::move(j));
    }
  }
  emit(o, results.size() == 1 ? results[0] : results, text);
  return identical ? kOk : kDiffMismatch;
}

int cmd_check(const Options& o) {
  const auto net = load_net(o);
  const aa::ExplorationLimits limits{o.state_cap};
  json j;
  json model;
  std::size_t silent = 0;
  for (aa::TransitionId t = 0; t < net.transition_count(); ++t) silent += net.is_silent(t);
  model["path"] = o.model;
  model["places"] = net.place_count();
  model["transitions"] = net.transition_count();
  model["silent_transitions"] = silent;
  model["activities"] = net.alphabet().visible().size();
  const bool safe = aa::check_safe(net, limits);
  model["safe"] = safe;
  if (safe) {
    const auto graph = aa::ReachabilityGraph::build(net, limits);
    model["reachable_markings"] = graph.size();
    model["final_reachable"] = graph.find(net.final_marking()) != aa::ReachabilityGraph::npos;
    model["executable_loop"] = aa::has_executable_loop(net, limits);
  }
  j["model"] = std::move(model);
  std::string text = o.model + ": " + std::to_string(net.place_count()) + " places, " +
                     std::to_string(net.transition_count()) + " transitions, " + (safe ? "safe" : "NOT safe") + "\n";
  if (!o.log.empty()) {
    const auto log = load_log(o, net);
    json l;
    l["path"] = o.log;
    l["traces"] = log.total_count();
    l["unique_traces"] = log.unique_count();
    l["max_length"] = log.max_length();
    l["activities"] = log.alphabet().visible().size();
    j["log"] = std::move(l);
    text += o.log + ": " + std::to_string(log.total_count()) + " traces, " + std::to_string(log.unique_count()) +
            " unique\n";
  }
  emit(o, j, text);
  return safe ? kOk : kInput;
}

void add_common(CLI::App* sub, Options& o, bool needs_log) {
  sub->add_option("--model", o.model, "Petri net file (.pnml or .tnet)")->required();
  auto* log = sub->add_option("--log", o.log, "event log file (.xes or .tlog)");
  if (needs_log) log->required();
  sub->add_option("--model-format", o.model_format, "override model format")
      ->check(CLI::IsMember({"pnml", "tnet"}));
  sub->add_option("--log-format", o.log_format, "override log format")->check(CLI::IsMember({"xes", "tlog"}));
  sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
  sub->add_option("--output", o.output, "write output to this file");
  sub->add_option("--state-cap", o.state_cap, "state/search node cap for explicit exploration");
}

void add_search(CLI::App* sub, Options& o) {
  sub->add_option("--dist", o.dist, "distance: ham, lev or both")->check(CLI::IsMember({"ham", "lev", "both"}));
  o.n_opt = sub->add_option("--n", o.n, "run length");
  o.budget_opt = sub->add_option("--length-budget", o.length_budget, "maximal run length");
  o.m_opt = sub->add_option("--m", o.m, "distance threshold, p/q or decimal");
  o.max_d_opt = sub->add_option("--max-d", o.max_d, "cap on required edits (Levenshtein)");
  sub->add_flag("--prefix", o.prefix, "prefix mode: no final marking, traces cut to n");
  o.epsilon_opt = sub->add_option("--epsilon", o.epsilon, "length discount epsilon")->capture_default_str();
  sub->add_flag("--timings", o.timings, "include timings in the output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anti-alignments and anti-alignment precision for safe Petri nets"};
  app.require_subcommand(1);
  Options oa, op, oo, oc;

  auto* antialign = app.add_subcommand("antialign", "find a run far from every log trace");
  add_common(antialign, oa, true);
  add_search(antialign, oa);
  antialign->add_option("--dimacs-out", oa.dimacs_out, "write the CNF and a .map.json sidecar");

  auto* precision = app.add_subcommand("precision", "anti-alignment precision of a model w.r.t. a log");
  add_common(precision, op, true);
  add_search(precision, op);
  precision->add_flag("--flower-patch", op.flower_patch, "report 0 for flower models");
  precision->add_option("--flower-horizon", op.flower_horizon, "word length checked by the flower test");
  precision->add_option("--dimacs-out", op.dimacs_out, "not supported here (antialign only)");

  auto* oracle = app.add_subcommand("oracle", "precision by exhaustive enumeration");
  add_common(oracle, oo, true);
  add_search(oracle, oo);
  oracle->add_flag("--flower-patch", oo.flower_patch, "report 0 for flower models");
  oracle->add_option("--flower-horizon", oo.flower_horizon, "word length checked by the flower test");
  oracle->add_flag("--diff", oo.diff, "also run the SAT search and compare (exit 5 on difference)");
  oracle->add_option("--dimacs-out", oo.dimacs_out, "not supported here (antialign only)");

  auto* check = app.add_subcommand("check", "parse and validate a model and optional log");
  add_common(check, oc, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(oc);
    const auto backend = aa::sat::backend_from_env();
    if (antialign->parsed()) return cmd_antialign(oa, backend.get());
    if (precision->parsed()) return cmd_precision(op, backend.get());
    return cmd_oracle(oo, backend.get());
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const aa::ExplosionGuard& e) {
    std::cerr << "state space too large: " << e.what() << "\n";
    return kExplosion;
  } catch (const aa::LoopWithZeroEpsilon& e) {
    std::cerr << "LoopWithZeroEpsilon: " << e.what() << "\n";
    return kInput;
  } catch (const aa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
}
