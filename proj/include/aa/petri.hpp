#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aa/alphabet.hpp"
#include "aa/eventlog.hpp"

namespace aa {

using PlaceId = std::uint32_t;
using TransitionId = std::uint32_t;

/// Marking of a safe net: one bit per place.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t place_count) : bits_(place_count, false) {}
  Marking(std::size_t place_count, std::initializer_list<PlaceId> marked);
  Marking(std::size_t place_count, std::span<const PlaceId> marked);

  bool contains(PlaceId p) const { return p < bits_.size() && bits_[p]; }
  void set(PlaceId p, bool value = true) { bits_.at(p) = value; }
  std::size_t place_count() const { return bits_.size(); }
  std::vector<PlaceId> places() const;
  bool operator==(const Marking&) const = default;

  const std::vector<bool>& bits() const { return bits_; }

 private:
  std::vector<bool> bits_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const { return std::hash<std::vector<bool>>{}(m.bits()); }
};

/// Safe labeled Petri net <P, T, F, M0, Mf, Sigma, lambda>. Pre- and post-sets
/// are kept sorted and duplicate-free.
class PetriNet {
 public:
  PetriNet() = default;
  explicit PetriNet(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  PlaceId add_place(std::string name);
  TransitionId add_transition(std::string name, ActivityId label);
  /// Interns `label`; "tau" yields a silent transition.
  TransitionId add_transition(std::string name, std::string_view label);
  void add_input(TransitionId t, PlaceId p);
  void add_output(TransitionId t, PlaceId p);
  void set_initial(std::span<const PlaceId> places);
  void set_initial(std::initializer_list<PlaceId> places) { set_initial(std::span(places.begin(), places.size())); }
  void set_final(std::span<const PlaceId> places);
  void set_final(std::initializer_list<PlaceId> places) { set_final(std::span(places.begin(), places.size())); }

  std::size_t place_count() const { return place_names_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }
  std::span<const PlaceId> pre(TransitionId t) const { return transitions_.at(t).pre; }
  std::span<const PlaceId> post(TransitionId t) const { return transitions_.at(t).post; }
  ActivityId label(TransitionId t) const { return transitions_.at(t).label; }
  bool is_silent(TransitionId t) const { return alphabet_.is_silent(label(t)); }
  bool has_silent() const;

  /// Markings are resized when places are added after they were set.
  Marking initial() const { return resized(initial_); }
  Marking final_marking() const { return resized(final_); }

  const std::string& place_name(PlaceId p) const { return place_names_.at(p); }
  const std::string& transition_name(TransitionId t) const { return transitions_.at(t).name; }
  std::optional<PlaceId> find_place(std::string_view name) const;
  std::optional<TransitionId> find_transition(std::string_view name) const;

  const Alphabet& alphabet() const { return alphabet_; }
  Alphabet& alphabet() { return alphabet_; }

 private:
  struct Transition {
    std::string name;
    ActivityId label;
    std::vector<PlaceId> pre;
    std::vector<PlaceId> post;
  };
  Marking resized(const std::vector<PlaceId>& places) const { return Marking(place_count(), places); }

  Alphabet alphabet_;
  std::vector<std::string> place_names_;
  std::vector<Transition> transitions_;
  std::vector<PlaceId> initial_;
  std::vector<PlaceId> final_;
};

/// Firing sequence with its label projections.
struct Run {
  std::vector<TransitionId> firings;
  std::vector<ActivityId> labels;
  std::vector<ActivityId> visible;
  bool full = false;

  bool operator==(const Run&) const = default;
};

/// Fills labels/visible from the net and sets `full` via is_full_run.
Run make_run(const PetriNet& net, std::vector<TransitionId> firings);

std::vector<TransitionId> enabled(const PetriNet& net, const Marking& m);
bool is_enabled(const PetriNet& net, const Marking& m, TransitionId t);

/// Throws NotEnabled or SafetyViolation.
Marking fire(const PetriNet& net, const Marking& m, TransitionId t);

bool is_full_run(const PetriNet& net, std::span<const TransitionId> firings);

struct ExplorationLimits {
  std::size_t max_nodes = 10'000'000;
};

/// Explicit reachability graph of a safe net.
class ReachabilityGraph {
 public:
  struct Edge {
    TransitionId transition;
    std::size_t target;
  };
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Breadth-first from M0; successors sorted by transition id. Throws
  /// ExplosionGuard past `limits.max_nodes` states.
  static ReachabilityGraph build(const PetriNet& net, ExplorationLimits limits = {});

  std::size_t size() const { return markings_.size(); }
  const Marking& marking(std::size_t s) const { return markings_[s]; }
  std::span<const Edge> successors(std::size_t s) const { return edges_[s]; }
  std::size_t find(const Marking& m) const;
  /// Shortest number of firings from each state to `target`, npos if none.
  std::vector<std::size_t> distance_to(std::size_t target) const;

 private:
  std::vector<Marking> markings_;
  std::vector<std::vector<Edge>> edges_;
  std::unordered_map<Marking, std::size_t, MarkingHash> index_;
};

/// Calls `visit` on every full run of length <= max_len, each once, ordered
/// by length and then lexicographically by transition id. The search-node
/// budget is `limits.max_nodes`.
void enumerate_full_runs(const PetriNet& net, std::size_t max_len, const std::function<void(const Run&)>& visit,
                         ExplorationLimits limits = {});
std::vector<Run> full_runs(const PetriNet& net, std::size_t max_len, ExplorationLimits limits = {});

bool has_executable_loop(const PetriNet& net, ExplorationLimits limits = {});

/// Exhaustive exploration with token counting; false at the first reachable
/// marking with two tokens on a place.
bool check_safe(const PetriNet& net, ExplorationLimits limits = {});

/// Deterministic net spelling the log as a prefix tree; words leaving the tree
/// move the token to the sink place `escape`.
struct LogTreeNet {
  PetriNet net;
  PlaceId root = 0;
  PlaceId escape = 0;
  /// Tree places reached exactly by the log's traces.
  std::vector<PlaceId> accepting;
};

LogTreeNet log_tree_net(const EventLog& log, const Alphabet& alphabet);

/// Product of a net with a log tree. Visible transitions synchronize on equal
/// labels; silent ones move alone. `target` is Mf(net) + {escape}, the final
/// marking of the product net. A full run of the net whose word is a strict
/// prefix of a log trace ends on a non-accepting tree place instead, so the
/// complete set of witnesses for a word outside the log is `deviating`:
/// Mf(net) + {q} for every non-accepting tree place q (escape included).
struct ProductNet {
  PetriNet net;
  /// Net transition behind each product transition.
  std::vector<TransitionId> origin;
  Marking target;
  std::vector<Marking> deviating;
};

ProductNet synchronous_product(const PetriNet& net, const LogTreeNet& tree);

/// A shortest full run of `net` whose visible word is not a trace of `log`,
/// found by reachability in the product with the log tree; nullopt when the
/// language is included in the log.
std::optional<Run> find_run_outside_log(const PetriNet& net, const EventLog& log, ExplorationLimits limits = {});

enum class NetFormat { Pnml, Tnet };

PetriNet parse_net(std::string_view text, NetFormat format, Alphabet seed = {});
std::string serialize_tnet(const PetriNet& net);

}  // namespace aa
