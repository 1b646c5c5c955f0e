#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aa/distance.hpp"
#include "aa/eventlog.hpp"
#include "aa/petri.hpp"
#include "aa/precision.hpp"
#include "aa/rational.hpp"

namespace aa {

struct OracleBest {
  Run run;
  Rational distance{0};
  Score score{0};
};

/// Scores every full run of length <= max_len by dist/(1+eps)^len. Ties keep
/// the first run in length-then-lexicographic order, as the SAT search does.
std::optional<OracleBest> brute_force_max(const PetriNet& net, const EventLog& log, std::size_t max_len,
                                          DistanceKind kind, const Rational& epsilon, ExplorationLimits limits = {});

/// Shortest full run whose word is not a log trace, found by enumeration.
std::optional<Run> brute_force_deviating_run(const PetriNet& net, const EventLog& log, ExplorationLimits limits = {});

/// Precision computed by enumeration only, same report layout as compute_precision.
PrecisionReport oracle_precision(const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg);

struct RandomModelSpec {
  std::uint64_t seed = 1;
  std::size_t max_places = 6;
  std::size_t max_transitions = 8;
  std::size_t alphabet_size = 4;
  bool acyclic = false;
  bool allow_silent = true;
  /// Random arcs instead of block-structured nets.
  bool free_form = false;
  std::size_t max_traces = 5;
  std::size_t max_trace_length = 6;
  /// Every trace is the word of some full run.
  bool fitting = false;
  std::size_t max_attempts = 2000;
};

struct Instance {
  PetriNet net;
  EventLog log;
};

Instance generate_instance(const RandomModelSpec& spec);

using PrecisionMetric = std::function<Score(const PetriNet&, const EventLog&)>;

PrecisionMetric sat_metric(PrecisionConfig cfg);

struct AxiomOptions {
  std::uint64_t seed = 1;
  /// Serial tau insertion changes run lengths, so it is only language
  /// preserving for the undiscounted metric.
  bool silent_insertion = false;
  std::optional<std::filesystem::path> dump_dir;
  ExplorationLimits limits{200'000};
};

struct AxiomVerdict {
  std::string axiom;
  bool passed = true;
  std::size_t checked = 0;
  std::vector<std::string> counterexamples;
};

struct AxiomReport {
  std::vector<AxiomVerdict> verdicts;
  /// No instance was checked.
  bool vacuous = true;

  bool passed() const;
  const AxiomVerdict& operator[](std::string_view axiom) const;
};

/// Checks A1 (determinism), A2 (extra behaviour lowers precision), A4 (equal
/// value on language-preserving rewrites) and A5 (more fitting traces raise
/// precision). The family's logs should be fitting.
AxiomReport axiom_suite(std::span<const Instance> family, const PrecisionMetric& metric,
                        const AxiomOptions& options = {});

/// Copy of `net` with an extra transition parallel to `t`, labelled `label`.
PetriNet with_parallel_transition(const PetriNet& net, TransitionId t, ActivityId label);
/// Copy of `net` where `t` is split into two transitions with equal arcs and label.
PetriNet with_duplicate_transition(const PetriNet& net, TransitionId t);
/// Copy of `net` with a place carrying the same arcs and markings as `p`.
PetriNet with_duplicate_place(const PetriNet& net, PlaceId p);
/// Copy of `net` where `t` outputs to a fresh place emptied by a silent transition.
PetriNet with_silent_step(const PetriNet& net, TransitionId t);

}  // namespace aa
