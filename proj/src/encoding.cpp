#include "aa/encoding.hpp"

#include <algorithm>

#include "aa/errors.hpp"
#include "json.hpp"

namespace aa {

using sat::Formula;

namespace {

Formula lit(int v) { return Formula::var(v); }
Formula nlit(int v) { return sat::neg(Formula::var(v)); }

auto key_of(const VarInfo& info) {
  return std::make_tuple(static_cast<int>(info.role), info.step, info.index, info.j, info.k);
}

// (c => (x <=> b)) as clauses; b may be a conjunction of two formulas.
void guarded_iff(std::vector<Formula>& out, const Formula& c, const Formula& x, const Formula& b) {
  if (c.is_false()) return;
  const Formula nc = sat::neg(c);
  if (b.kind() == Formula::Kind::And && b.children().size() == 2) {
    const Formula& b1 = b.children()[0];
    const Formula& b2 = b.children()[1];
    out.push_back(sat::disj({nc, sat::neg(x), b1}));
    out.push_back(sat::disj({nc, sat::neg(x), b2}));
    out.push_back(sat::disj({nc, x, sat::neg(b1), sat::neg(b2)}));
    return;
  }
  out.push_back(sat::disj({nc, sat::neg(x), b}));
  out.push_back(sat::disj({nc, x, sat::neg(b)}));
}

void at_most_one(std::vector<Formula>& out, std::vector<Formula> items, std::size_t step, VarMap& vars) {
  while (items.size() > kPairwiseLimit) {
    std::vector<Formula> commanders;
    for (std::size_t g = 0; g < items.size(); g += 3) {
      const std::size_t end = std::min(items.size(), g + 3);
      const Formula c = lit(vars.add({VarRole::Aux, step, 0, 0, 0}));
      for (std::size_t a = g; a < end; ++a) {
        out.push_back(sat::disj(sat::neg(items[a]), c));
        for (std::size_t b = a + 1; b < end; ++b) out.push_back(sat::disj(sat::neg(items[a]), sat::neg(items[b])));
      }
      commanders.push_back(c);
    }
    items = std::move(commanders);
  }
  for (std::size_t a = 0; a < items.size(); ++a)
    for (std::size_t b = a + 1; b < items.size(); ++b) out.push_back(sat::disj(sat::neg(items[a]), sat::neg(items[b])));
}

}  // namespace

std::string_view to_string(VarRole role) {
  switch (role) {
    case VarRole::Tau: return "tau";
    case VarRole::Mark: return "mark";
    case VarRole::Mismatch: return "mismatch";
    case VarRole::Edit: return "edit";
    case VarRole::Visible: return "visible";
    case VarRole::Aux: return "aux";
  }
  return "aux";
}

VarMap::VarMap(std::size_t length, std::size_t transitions, std::size_t places)
    : length_(length), transitions_(transitions), places_(places) {
  for (std::size_t i = 1; i <= length; ++i)
    for (std::size_t t = 0; t < transitions; ++t) add({VarRole::Tau, i, t, 0, 0});
  for (std::size_t i = 0; i <= length; ++i)
    for (std::size_t p = 0; p < places; ++p) add({VarRole::Mark, i, p, 0, 0});
}

int VarMap::tau(std::size_t i, TransitionId t) const {
  return static_cast<int>(1 + (i - 1) * transitions_ + t);
}

int VarMap::mark(std::size_t i, PlaceId p) const {
  return static_cast<int>(1 + length_ * transitions_ + i * places_ + p);
}

int VarMap::add(const VarInfo& info) {
  const int v = static_cast<int>(roles_.size());
  roles_.push_back(info);
  if (info.role != VarRole::Aux) index_.emplace(key_of(info), v);
  return v;
}

std::optional<int> VarMap::find(const VarInfo& info) const {
  const auto it = index_.find(key_of(info));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t VarMap::count(VarRole role) const {
  return static_cast<std::size_t>(
      std::count_if(roles_.begin() + 1, roles_.end(), [&](const VarInfo& i) { return i.role == role; }));
}

Formula RunEncoding::label_eq(std::size_t i, ActivityId a) const {
  auto it = label_cache.find({i, a});
  if (it == label_cache.end()) {
    std::vector<Formula> eq, neq;
    for (TransitionId t = 0; t < net->transition_count(); ++t) {
      if (net->is_silent(t)) continue;
      (net->label(t) == a ? eq : neq).push_back(lit(vars.tau(i, t)));
    }
    it = label_cache.emplace(std::make_pair(i, a), std::make_pair(sat::disj(std::move(eq)), sat::disj(std::move(neq))))
             .first;
  }
  return it->second.first;
}

Formula RunEncoding::label_neq(std::size_t i, ActivityId a) const {
  label_eq(i, a);
  return label_cache.at({i, a}).second;
}

RunEncoding encode_run(const PetriNet& net, std::size_t n, bool require_final) {
  RunEncoding run;
  run.net = &net;
  run.length = n;
  run.require_final = require_final;
  run.vars = VarMap(n, net.transition_count(), net.place_count());
  VarMap& vars = run.vars;

  std::vector<Formula> parts;
  const Marking m0 = net.initial();
  for (PlaceId p = 0; p < net.place_count(); ++p)
    parts.push_back(m0.contains(p) ? lit(vars.mark(0, p)) : nlit(vars.mark(0, p)));
  if (require_final) {
    const Marking mf = net.final_marking();
    for (PlaceId p = 0; p < net.place_count(); ++p)
      parts.push_back(mf.contains(p) ? lit(vars.mark(n, p)) : nlit(vars.mark(n, p)));
  }

  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<Formula> step;
    for (TransitionId t = 0; t < net.transition_count(); ++t) step.push_back(lit(vars.tau(i, t)));
    parts.push_back(sat::disj(step));
    at_most_one(parts, step, i, vars);

    for (TransitionId t = 0; t < net.transition_count(); ++t) {
      const Formula nt = nlit(vars.tau(i, t));
      const auto pre = net.pre(t);
      const auto post = net.post(t);
      for (PlaceId p : pre) parts.push_back(sat::disj(nt, lit(vars.mark(i - 1, p))));
      for (PlaceId p : post) parts.push_back(sat::disj(nt, lit(vars.mark(i, p))));
      for (PlaceId p : pre)
        if (!std::binary_search(post.begin(), post.end(), p)) parts.push_back(sat::disj(nt, nlit(vars.mark(i, p))));
      for (PlaceId p = 0; p < net.place_count(); ++p) {
        if (std::binary_search(pre.begin(), pre.end(), p) || std::binary_search(post.begin(), post.end(), p)) continue;
        parts.push_back(sat::disj({nt, nlit(vars.mark(i, p)), lit(vars.mark(i - 1, p))}));
        parts.push_back(sat::disj({nt, lit(vars.mark(i, p)), nlit(vars.mark(i - 1, p))}));
      }
    }
  }

  run.visible_steps.assign(n + 1, Formula::bottom());
  run.silent_steps.assign(n + 1, Formula::bottom());
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<Formula> vis, sil;
    for (TransitionId t = 0; t < net.transition_count(); ++t)
      (net.is_silent(t) ? sil : vis).push_back(lit(vars.tau(i, t)));
    run.visible_steps[i] = sat::disj(std::move(vis));
    run.silent_steps[i] = sat::disj(std::move(sil));
  }

  run.visible.resize(n + 1);
  run.visible[0] = {Formula::top()};
  const bool silent = net.has_silent();
  for (std::size_t i = 1; i <= n; ++i) {
    run.visible[i].resize(i + 1);
    for (std::size_t v = 0; v <= i; ++v) {
      if (!silent) {
        run.visible[i][v] = Formula::constant(v == i);
        continue;
      }
      const Formula stay = v < i ? sat::conj(run.visible[i - 1][v], run.silent_steps[i]) : Formula::bottom();
      const Formula grow = v > 0 ? sat::conj(run.visible[i - 1][v - 1], run.visible_steps[i]) : Formula::bottom();
      const Formula x = lit(vars.add({VarRole::Visible, i, 0, 0, v}));
      parts.push_back(sat::iff(x, sat::disj(stay, grow)));
      run.visible[i][v] = x;
    }
  }

  run.formula = sat::conj(std::move(parts));
  return run;
}

DistanceEncoding encode_distance(RunEncoding& run, DistanceKind kind, std::vector<Trace> traces,
                                 std::vector<std::size_t> caps) {
  DistanceEncoding enc;
  enc.kind = kind;
  enc.traces = std::move(traces);
  enc.caps = std::move(caps);
  enc.caps.resize(enc.traces.size(), 0);
  VarMap& vars = run.vars;
  const std::size_t n = run.length;
  std::vector<Formula> parts;

  for (std::size_t s = 0; s < enc.traces.size(); ++s) {
    const Trace& sigma = enc.traces[s];
    const std::size_t len = sigma.size();
    const std::size_t cap = enc.caps[s];
    std::vector<Formula> at_least{Formula::top()};

    if (kind == DistanceKind::Hamming) {
      std::vector<Formula> source(n + len + 1, Formula::bottom());
      for (std::size_t i = 1; i <= n; ++i) {
        std::vector<Formula> alts;
        for (std::size_t v = 1; v <= i; ++v)
          alts.push_back(sat::conj(run.visible[i][v], run.label_neq(i, v <= len ? sigma[v - 1] : RunEncoding::kPadding)));
        source[i] = sat::disj(std::move(alts));
      }
      for (std::size_t j = 1; j <= len; ++j) {
        std::vector<Formula> shorter;
        for (std::size_t v = 0; v < j && v <= n; ++v) shorter.push_back(run.visible[n][v]);
        source[n + j] = sat::disj(std::move(shorter));
      }

      std::vector<std::vector<int>> delta(cap + 1, std::vector<int>(source.size(), 0));
      for (std::size_t k = 1; k <= cap; ++k) {
        std::vector<Formula> any;
        for (std::size_t i = 1; i < source.size(); ++i) {
          if (source[i].is_false()) continue;
          const int d = vars.add({VarRole::Mismatch, i, s, 0, k});
          delta[k][i] = d;
          any.push_back(lit(d));
          parts.push_back(sat::disj(nlit(d), source[i]));
          if (k >= 2) {
            std::vector<Formula> earlier{nlit(d)};
            for (std::size_t e = 1; e < i; ++e)
              if (delta[k - 1][e]) earlier.push_back(lit(delta[k - 1][e]));
            parts.push_back(sat::disj(std::move(earlier)));
          }
          for (std::size_t k2 = 1; k2 < k; ++k2)
            if (delta[k2][i]) parts.push_back(sat::disj(nlit(delta[k2][i]), nlit(d)));
        }
        at_least.push_back(sat::disj(std::move(any)));
      }
    } else {
      // table[i][j][d]
      std::vector<std::vector<std::vector<Formula>>> table(
          n + 1, std::vector<std::vector<Formula>>(len + 1, std::vector<Formula>(cap + 1, Formula::top())));
      for (std::size_t j = 0; j <= len; ++j)
        for (std::size_t d = 0; d <= cap; ++d) table[0][j][d] = Formula::constant(j >= d);
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j <= len; ++j)
          for (std::size_t d = 1; d <= cap; ++d)
            table[i][j][d] = d > i + j ? Formula::bottom() : lit(vars.add({VarRole::Edit, i, s, j, d}));
        const Formula& sil = run.silent_steps[i];
        const Formula& vis = run.visible_steps[i];
        for (std::size_t j = 0; j <= len; ++j) {
          for (std::size_t d = 1; d <= cap; ++d) {
            const Formula& x = table[i][j][d];
            if (x.is_constant()) continue;
            guarded_iff(parts, sil, x, table[i - 1][j][d]);
            if (j == 0) {
              guarded_iff(parts, vis, x, table[i - 1][0][d - 1]);
            } else {
              guarded_iff(parts, run.label_eq(i, sigma[j - 1]), x, table[i - 1][j - 1][d]);
              guarded_iff(parts, run.label_neq(i, sigma[j - 1]), x,
                          sat::conj(table[i][j - 1][d - 1], table[i - 1][j][d - 1]));
            }
          }
        }
      }
      for (std::size_t d = 1; d <= cap; ++d) at_least.push_back(table[n][len][d]);
    }
    enc.at_least.push_back(std::move(at_least));
  }
  enc.structure = sat::conj(std::move(parts));
  return enc;
}

Formula requirement(const RunEncoding& run, const DistanceEncoding& dist, std::size_t s,
                    std::span<const std::size_t> need, sat::Lit guard) {
  std::vector<Formula> parts;
  const auto& final_row = run.visible[run.length];
  for (std::size_t v = 0; v < final_row.size() && v < need.size(); ++v) {
    if (final_row[v].is_false() || need[v] == 0) continue;
    const Formula goal = need[v] < dist.at_least[s].size() ? dist.at_least[s][need[v]] : Formula::bottom();
    parts.push_back(
        sat::disj({guard ? Formula::literal(-guard) : Formula::bottom(), sat::neg(final_row[v]), goal}));
  }
  return sat::conj(std::move(parts));
}

ThresholdFormula encode_hamming_threshold(const EventLog& log, std::size_t m, RunEncoding& run) {
  std::vector<Trace> traces;
  for (const auto& [trace, mult] : log.entries()) traces.push_back(trace);
  for (const auto& t : traces)
    if (m > std::max(run.length, t.size())) return {Formula::bottom(), true};
  const std::size_t count = traces.size();
  auto enc = encode_distance(run, DistanceKind::Hamming, std::move(traces), std::vector<std::size_t>(count, m));
  std::vector<Formula> parts{enc.structure};
  for (std::size_t s = 0; s < count; ++s) parts.push_back(enc.at_least[s][m]);
  return {sat::conj(std::move(parts)), false};
}

Formula encode_levenshtein(const EventLog& log, const std::map<Trace, std::size_t, ShortLex>& required_edits,
                           RunEncoding& run) {
  std::vector<Trace> traces;
  std::vector<std::size_t> caps;
  for (const auto& [trace, mult] : log.entries()) {
    traces.push_back(trace);
    const auto it = required_edits.find(trace);
    caps.push_back(it == required_edits.end() ? 0 : it->second);
  }
  auto enc = encode_distance(run, DistanceKind::Levenshtein, traces, caps);
  std::vector<Formula> parts{enc.structure};
  for (std::size_t s = 0; s < traces.size(); ++s) {
    if (caps[s] > run.length + traces[s].size()) return Formula::bottom();
    parts.push_back(enc.at_least[s][caps[s]]);
  }
  return sat::conj(std::move(parts));
}

Run decode_run(const sat::Model& model, const RunEncoding& run) {
  std::vector<TransitionId> firings;
  for (std::size_t i = 1; i <= run.length; ++i) {
    std::optional<TransitionId> chosen;
    for (TransitionId t = 0; t < run.net->transition_count(); ++t) {
      const auto v = static_cast<std::size_t>(run.vars.tau(i, t));
      if (v >= model.size()) throw MalformedModel("model does not cover tau variables");
      if (!model[v]) continue;
      if (chosen) throw MalformedModel("step " + std::to_string(i) + " fires two transitions");
      chosen = t;
    }
    if (!chosen) throw MalformedModel("step " + std::to_string(i) + " fires no transition");
    firings.push_back(*chosen);
  }
  return make_run(*run.net, std::move(firings));
}

EditTableEncoding encode_edit_table(std::span<const ActivityId> u, std::span<const ActivityId> v) {
  EditTableEncoding enc;
  enc.rows = u.size();
  enc.cols = v.size();
  enc.depth = u.size() + v.size();
  auto d = [&](std::size_t i, std::size_t j, std::size_t k) { return lit(enc.var(i, j, k)); };
  std::vector<Formula> parts;

  // (1)
  parts.push_back(d(0, 0, 0));
  for (std::size_t k = 1; k <= enc.depth; ++k) parts.push_back(sat::neg(d(0, 0, k)));
  // (2), (3)
  for (std::size_t k = 0; k < enc.depth; ++k) {
    for (std::size_t i = 0; i < enc.rows; ++i) parts.push_back(sat::iff(d(i + 1, 0, k + 1), d(i, 0, k)));
    for (std::size_t j = 0; j < enc.cols; ++j) parts.push_back(sat::iff(d(0, j + 1, k + 1), d(0, j, k)));
  }
  // every pair of prefixes is at least 0 edits apart
  for (std::size_t i = 0; i <= enc.rows; ++i)
    for (std::size_t j = 0; j <= enc.cols; ++j) parts.push_back(d(i, j, 0));
  // (4), (5)
  for (std::size_t i = 0; i < enc.rows; ++i) {
    for (std::size_t j = 0; j < enc.cols; ++j) {
      const Formula same = Formula::constant(u[i] == v[j]);
      for (std::size_t k = 0; k <= enc.depth; ++k)
        parts.push_back(sat::implies(same, sat::iff(d(i + 1, j + 1, k), d(i, j, k))));
      for (std::size_t k = 0; k < enc.depth; ++k)
        parts.push_back(sat::implies(sat::neg(same),
                                     sat::iff(d(i + 1, j + 1, k + 1), sat::conj(d(i + 1, j, k), d(i, j + 1, k)))));
    }
  }
  enc.formula = sat::conj(std::move(parts));
  return enc;
}

void write_var_map(std::ostream& out, const VarMap& vars, const sat::CnfFormula& cnf, const PetriNet& net,
                   std::span<const Trace> traces) {
  using nlohmann::ordered_json;
  const Alphabet& names = net.alphabet();
  ordered_json doc;
  doc["variables"] = cnf.var_count;
  doc["clauses"] = cnf.clauses.size();
  doc["length"] = vars.length();
  ordered_json trace_list = ordered_json::array();
  for (const auto& t : traces) {
    ordered_json word = ordered_json::array();
    for (ActivityId a : t) word.push_back(a < names.size() ? names.name(a) : std::to_string(a));
    trace_list.push_back(std::move(word));
  }
  doc["traces"] = std::move(trace_list);
  ordered_json map = ordered_json::array();
  for (std::size_t v = 1; v <= vars.var_count(); ++v) {
    const VarInfo& info = vars.info(static_cast<int>(v));
    ordered_json e;
    e["var"] = v;
    e["role"] = to_string(info.role);
    e["step"] = info.step;
    switch (info.role) {
      case VarRole::Tau:
        e["transition"] = net.transition_name(static_cast<TransitionId>(info.index));
        e["label"] = names.name(net.label(static_cast<TransitionId>(info.index)));
        break;
      case VarRole::Mark: e["place"] = net.place_name(static_cast<PlaceId>(info.index)); break;
      case VarRole::Mismatch:
        e["trace"] = info.index;
        e["k"] = info.k;
        break;
      case VarRole::Edit:
        e["trace"] = info.index;
        e["j"] = info.j;
        e["d"] = info.k;
        break;
      case VarRole::Visible: e["count"] = info.k; break;
      case VarRole::Aux: break;
    }
    map.push_back(std::move(e));
  }
  doc["map"] = std::move(map);
  doc["aux"] = {{"first", vars.var_count() + 1}, {"last", cnf.var_count}};
  out << doc.dump(2) << '\n';
}

}  // namespace aa
