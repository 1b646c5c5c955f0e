#include <algorithm>
#include <deque>
#include <map>

#include "aa/errors.hpp"
#include "aa/petri.hpp"

namespace aa {

LogTreeNet log_tree_net(const EventLog& log, const Alphabet& alphabet) {
  const auto sigma = alphabet.visible();
  if (sigma.empty()) throw EmptyAlphabet("log tree needs at least one visible activity");
  if (!compatible(log.alphabet(), alphabet)) throw AlphabetMismatch("log and alphabet disagree");
  for (const auto& [trace, k] : log.entries())
    for (ActivityId a : trace)
      if (a >= alphabet.size()) throw AlphabetMismatch("log activity " + log.alphabet().name(a) + " not in alphabet");

  // Prefix trie, nodes numbered in creation order.
  struct Node {
    std::map<ActivityId, std::size_t> children;
    bool accepting = false;
  };
  std::vector<Node> trie(1);
  for (const auto& [trace, k] : log.entries()) {
    std::size_t node = 0;
    for (ActivityId a : trace) {
      auto it = trie[node].children.find(a);
      if (it == trie[node].children.end()) {
        trie.emplace_back();
        it = trie[node].children.emplace(a, trie.size() - 1).first;
      }
      node = it->second;
    }
    trie[node].accepting = true;
  }

  LogTreeNet out{PetriNet(alphabet), 0, 0, {}};
  PetriNet& net = out.net;
  for (std::size_t i = 0; i < trie.size(); ++i) net.add_place("q" + std::to_string(i));
  out.escape = net.add_place("p_esc");
  for (std::size_t i = 0; i < trie.size(); ++i) {
    if (trie[i].accepting) out.accepting.push_back(static_cast<PlaceId>(i));
    for (ActivityId a : sigma) {
      const auto it = trie[i].children.find(a);
      const PlaceId target = it == trie[i].children.end() ? out.escape : static_cast<PlaceId>(it->second);
      const TransitionId t = net.add_transition("q" + std::to_string(i) + "_" + alphabet.name(a), a);
      net.add_input(t, static_cast<PlaceId>(i));
      net.add_output(t, target);
    }
  }
  for (ActivityId a : sigma) {
    const TransitionId t = net.add_transition("esc_" + alphabet.name(a), a);
    net.add_input(t, out.escape);
    net.add_output(t, out.escape);
  }
  net.set_initial({out.root});
  net.set_final({out.escape});
  return out;
}

ProductNet synchronous_product(const PetriNet& net, const LogTreeNet& tree) {
  const Alphabet& alphabet = merged(net.alphabet(), tree.net.alphabet());
  ProductNet out{PetriNet(alphabet), {}, {}, {}};
  PetriNet& prod = out.net;
  for (PlaceId p = 0; p < net.place_count(); ++p) prod.add_place(net.place_name(p));
  const auto offset = static_cast<PlaceId>(net.place_count());
  for (PlaceId p = 0; p < tree.net.place_count(); ++p) prod.add_place("tree." + tree.net.place_name(p));

  for (TransitionId t = 0; t < net.transition_count(); ++t) {
    if (net.is_silent(t)) {
      const TransitionId pt = prod.add_transition(net.transition_name(t), net.label(t));
      for (PlaceId p : net.pre(t)) prod.add_input(pt, p);
      for (PlaceId p : net.post(t)) prod.add_output(pt, p);
      out.origin.push_back(t);
      continue;
    }
    bool synchronized = false;
    for (TransitionId u = 0; u < tree.net.transition_count(); ++u) {
      if (tree.net.label(u) != net.label(t)) continue;
      synchronized = true;
      const TransitionId pt = prod.add_transition(net.transition_name(t) + "|" + tree.net.transition_name(u), net.label(t));
      for (PlaceId p : net.pre(t)) prod.add_input(pt, p);
      for (PlaceId p : net.post(t)) prod.add_output(pt, p);
      for (PlaceId p : tree.net.pre(u)) prod.add_input(pt, p + offset);
      for (PlaceId p : tree.net.post(u)) prod.add_output(pt, p + offset);
      out.origin.push_back(t);
    }
    if (!synchronized)
      throw AlphabetMismatch("label " + alphabet.name(net.label(t)) + " of transition " + net.transition_name(t) +
                             " is missing from the log tree");
  }

  std::vector<PlaceId> initial = net.initial().places();
  initial.push_back(tree.root + offset);
  prod.set_initial(initial);

  const std::vector<PlaceId> final_places = net.final_marking().places();
  auto with_tree_place = [&](PlaceId q) {
    std::vector<PlaceId> places = final_places;
    places.push_back(q + offset);
    return Marking(prod.place_count(), places);
  };
  std::vector<PlaceId> target = final_places;
  target.push_back(tree.escape + offset);
  prod.set_final(target);
  out.target = with_tree_place(tree.escape);
  for (PlaceId q = 0; q < tree.net.place_count(); ++q)
    if (!std::binary_search(tree.accepting.begin(), tree.accepting.end(), q)) out.deviating.push_back(with_tree_place(q));
  return out;
}

namespace {

std::optional<std::vector<TransitionId>> shortest_path(const ReachabilityGraph& graph,
                                                       const std::vector<std::size_t>& targets) {
  std::vector<bool> is_target(graph.size(), false);
  for (std::size_t t : targets)
    if (t != ReachabilityGraph::npos) is_target[t] = true;
  struct Parent {
    std::size_t state = ReachabilityGraph::npos;
    TransitionId transition = 0;
  };
  std::vector<Parent> parent(graph.size());
  std::vector<bool> seen(graph.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    if (is_target[s]) {
      std::vector<TransitionId> path;
      for (std::size_t cur = s; cur != 0; cur = parent[cur].state) path.push_back(parent[cur].transition);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (const auto& e : graph.successors(s)) {
      if (seen[e.target]) continue;
      seen[e.target] = true;
      parent[e.target] = {s, e.transition};
      queue.push_back(e.target);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Run> find_run_outside_log(const PetriNet& net, const EventLog& log, ExplorationLimits limits) {
  const Alphabet& alphabet = merged(net.alphabet(), log.alphabet());
  if (alphabet.visible().empty()) {
    // Only the empty word is possible.
    if (contains(log, {})) return std::nullopt;
    const auto graph = ReachabilityGraph::build(net, limits);
    auto path = shortest_path(graph, {graph.find(net.final_marking())});
    if (!path) return std::nullopt;
    return make_run(net, std::move(*path));
  }
  const LogTreeNet tree = log_tree_net(log, alphabet);
  const ProductNet product = synchronous_product(net, tree);
  const auto graph = ReachabilityGraph::build(product.net, limits);
  std::vector<std::size_t> targets;
  for (const auto& m : product.deviating) targets.push_back(graph.find(m));
  auto path = shortest_path(graph, targets);
  if (!path) return std::nullopt;
  std::vector<TransitionId> firings;
  for (TransitionId pt : *path) firings.push_back(product.origin[pt]);
  return make_run(net, std::move(firings));
}

}  // namespace aa
