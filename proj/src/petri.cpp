#include "aa/petri.hpp"

#include <algorithm>
#include <deque>

#include "aa/errors.hpp"

namespace aa {

Marking::Marking(std::size_t place_count, std::initializer_list<PlaceId> marked)
    : Marking(place_count, std::span(marked.begin(), marked.size())) {}

Marking::Marking(std::size_t place_count, std::span<const PlaceId> marked) : bits_(place_count, false) {
  for (PlaceId p : marked) bits_.at(p) = true;
}

std::vector<PlaceId> Marking::places() const {
  std::vector<PlaceId> out;
  for (PlaceId p = 0; p < bits_.size(); ++p)
    if (bits_[p]) out.push_back(p);
  return out;
}

PlaceId PetriNet::add_place(std::string name) {
  place_names_.push_back(std::move(name));
  return static_cast<PlaceId>(place_names_.size() - 1);
}

TransitionId PetriNet::add_transition(std::string name, ActivityId label) {
  if (label >= alphabet_.size()) throw AlphabetMismatch("transition label outside the net's activity table");
  transitions_.push_back({std::move(name), label, {}, {}});
  return static_cast<TransitionId>(transitions_.size() - 1);
}

TransitionId PetriNet::add_transition(std::string name, std::string_view label) {
  return add_transition(std::move(name), alphabet_.intern(label));
}

namespace {

void insert_sorted(std::vector<PlaceId>& v, PlaceId p) {
  auto it = std::lower_bound(v.begin(), v.end(), p);
  if (it == v.end() || *it != p) v.insert(it, p);
}

std::vector<PlaceId> checked_places(std::span<const PlaceId> places, std::size_t count) {
  std::vector<PlaceId> out;
  for (PlaceId p : places) {
    if (p >= count) throw std::out_of_range("marking references an unknown place");
    insert_sorted(out, p);
  }
  return out;
}

}  // namespace

void PetriNet::add_input(TransitionId t, PlaceId p) {
  if (p >= place_count()) throw std::out_of_range("arc references an unknown place");
  insert_sorted(transitions_.at(t).pre, p);
}

void PetriNet::add_output(TransitionId t, PlaceId p) {
  if (p >= place_count()) throw std::out_of_range("arc references an unknown place");
  insert_sorted(transitions_.at(t).post, p);
}

void PetriNet::set_initial(std::span<const PlaceId> places) { initial_ = checked_places(places, place_count()); }
void PetriNet::set_final(std::span<const PlaceId> places) { final_ = checked_places(places, place_count()); }

bool PetriNet::has_silent() const {
  return std::any_of(transitions_.begin(), transitions_.end(),
                     [this](const Transition& t) { return alphabet_.is_silent(t.label); });
}

std::optional<PlaceId> PetriNet::find_place(std::string_view name) const {
  for (PlaceId p = 0; p < place_names_.size(); ++p)
    if (place_names_[p] == name) return p;
  return std::nullopt;
}

std::optional<TransitionId> PetriNet::find_transition(std::string_view name) const {
  for (TransitionId t = 0; t < transitions_.size(); ++t)
    if (transitions_[t].name == name) return t;
  return std::nullopt;
}

Run make_run(const PetriNet& net, std::vector<TransitionId> firings) {
  Run run;
  run.full = is_full_run(net, firings);
  for (TransitionId t : firings) {
    const ActivityId a = net.label(t);
    run.labels.push_back(a);
    if (!net.alphabet().is_silent(a)) run.visible.push_back(a);
  }
  run.firings = std::move(firings);
  return run;
}

bool is_enabled(const PetriNet& net, const Marking& m, TransitionId t) {
  const auto pre = net.pre(t);
  return std::all_of(pre.begin(), pre.end(), [&](PlaceId p) { return m.contains(p); });
}

std::vector<TransitionId> enabled(const PetriNet& net, const Marking& m) {
  std::vector<TransitionId> out;
  for (TransitionId t = 0; t < net.transition_count(); ++t)
    if (is_enabled(net, m, t)) out.push_back(t);
  return out;
}

Marking fire(const PetriNet& net, const Marking& m, TransitionId t) {
  if (!is_enabled(net, m, t)) throw NotEnabled("transition " + net.transition_name(t) + " is not enabled");
  Marking out = m;
  for (PlaceId p : net.pre(t)) out.set(p, false);
  for (PlaceId p : net.post(t)) {
    if (out.contains(p)) throw SafetyViolation("firing " + net.transition_name(t) + " puts a second token on " +
                                               net.place_name(p));
    out.set(p, true);
  }
  return out;
}

bool is_full_run(const PetriNet& net, std::span<const TransitionId> firings) {
  Marking m = net.initial();
  for (TransitionId t : firings) {
    if (t >= net.transition_count() || !is_enabled(net, m, t)) return false;
    try {
      m = fire(net, m, t);
    } catch (const SafetyViolation&) {
      return false;
    }
  }
  return m == net.final_marking();
}

ReachabilityGraph ReachabilityGraph::build(const PetriNet& net, ExplorationLimits limits) {
  ReachabilityGraph g;
  auto intern = [&](Marking m) {
    auto [it, inserted] = g.index_.emplace(m, g.markings_.size());
    if (inserted) {
      if (g.markings_.size() >= limits.max_nodes)
        throw ExplosionGuard("reachability graph exceeds " + std::to_string(limits.max_nodes) + " states");
      g.markings_.push_back(std::move(m));
      g.edges_.emplace_back();
    }
    return it->second;
  };
  intern(net.initial());
  for (std::size_t s = 0; s < g.markings_.size(); ++s) {
    for (TransitionId t = 0; t < net.transition_count(); ++t) {
      if (!is_enabled(net, g.markings_[s], t)) continue;
      const std::size_t target = intern(fire(net, g.markings_[s], t));
      g.edges_[s].push_back({t, target});
    }
  }
  return g;
}

std::size_t ReachabilityGraph::find(const Marking& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? npos : it->second;
}

std::vector<std::size_t> ReachabilityGraph::distance_to(std::size_t target) const {
  std::vector<std::size_t> dist(size(), npos);
  if (target == npos) return dist;
  std::vector<std::vector<std::size_t>> preds(size());
  for (std::size_t s = 0; s < size(); ++s)
    for (const Edge& e : edges_[s]) preds[e.target].push_back(s);
  std::deque<std::size_t> queue{target};
  dist[target] = 0;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t p : preds[s]) {
      if (dist[p] != npos) continue;
      dist[p] = dist[s] + 1;
      queue.push_back(p);
    }
  }
  return dist;
}

namespace {

struct RunSearch {
  const PetriNet& net;
  const ReachabilityGraph& graph;
  const std::vector<std::size_t>& to_final;
  std::size_t final_state;
  std::size_t max_nodes;
  const std::function<void(const Run&)>& visit;
  std::size_t nodes = 0;
  std::vector<TransitionId> path;

  void dfs(std::size_t state, std::size_t remaining) {
    if (++nodes > max_nodes) throw ExplosionGuard("run enumeration exceeds " + std::to_string(max_nodes) + " nodes");
    if (remaining == 0) {
      if (state == final_state) {
        Run run = make_run(net, path);
        run.full = true;
        visit(run);
      }
      return;
    }
    for (const auto& e : graph.successors(state)) {
      if (to_final[e.target] == ReachabilityGraph::npos || to_final[e.target] > remaining - 1) continue;
      path.push_back(e.transition);
      dfs(e.target, remaining - 1);
      path.pop_back();
    }
  }
};

}  // namespace

void enumerate_full_runs(const PetriNet& net, std::size_t max_len, const std::function<void(const Run&)>& visit,
                         ExplorationLimits limits) {
  const auto graph = ReachabilityGraph::build(net, limits);
  const std::size_t final_state = graph.find(net.final_marking());
  if (final_state == ReachabilityGraph::npos) return;
  const auto to_final = graph.distance_to(final_state);
  RunSearch search{net, graph, to_final, final_state, limits.max_nodes, visit, 0, {}};
  for (std::size_t len = to_final[0] == ReachabilityGraph::npos ? max_len + 1 : to_final[0]; len <= max_len; ++len)
    search.dfs(0, len);
}

std::vector<Run> full_runs(const PetriNet& net, std::size_t max_len, ExplorationLimits limits) {
  std::vector<Run> out;
  enumerate_full_runs(net, max_len, [&](const Run& r) { out.push_back(r); }, limits);
  return out;
}

bool has_executable_loop(const PetriNet& net, ExplorationLimits limits) {
  const auto graph = ReachabilityGraph::build(net, limits);
  const auto to_final = graph.distance_to(graph.find(net.final_marking()));
  // Kahn's algorithm on the co-reachable part: leftovers lie on or behind a cycle.
  const std::size_t n = graph.size();
  std::vector<std::size_t> indegree(n, 0);
  std::size_t live = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (to_final[s] == ReachabilityGraph::npos) continue;
    ++live;
    for (const auto& e : graph.successors(s))
      if (to_final[e.target] != ReachabilityGraph::npos) ++indegree[e.target];
  }
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s)
    if (to_final[s] != ReachabilityGraph::npos && indegree[s] == 0) stack.push_back(s);
  std::size_t removed = 0;
  while (!stack.empty()) {
    const std::size_t s = stack.back();
    stack.pop_back();
    ++removed;
    for (const auto& e : graph.successors(s)) {
      if (to_final[e.target] == ReachabilityGraph::npos) continue;
      if (--indegree[e.target] == 0) stack.push_back(e.target);
    }
  }
  return removed != live;
}

bool check_safe(const PetriNet& net, ExplorationLimits limits) {
  using Counts = std::vector<bool>;
  const Counts start = net.initial().bits();
  std::unordered_map<Counts, bool> seen{{start, true}};
  std::deque<Counts> queue{start};
  while (!queue.empty()) {
    const Counts m = queue.front();
    queue.pop_front();
    for (TransitionId t = 0; t < net.transition_count(); ++t) {
      const auto pre = net.pre(t);
      if (!std::all_of(pre.begin(), pre.end(), [&](PlaceId p) { return m[p]; })) continue;
      Counts next = m;
      for (PlaceId p : pre) next[p] = false;
      for (PlaceId p : net.post(t)) {
        if (next[p]) return false;
        next[p] = true;
      }
      if (seen.emplace(next, true).second) {
        if (seen.size() > limits.max_nodes)
          throw ExplosionGuard("safety check exceeds " + std::to_string(limits.max_nodes) + " states");
        queue.push_back(std::move(next));
      }
    }
  }
  return true;
}

}  // namespace aa
