#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aa/cnf.hpp"

namespace aa::sat {

/// Satisfying assignment indexed by variable (entry 0 unused).
using Model = std::vector<bool>;

/// Conflict-driven clause-learning solver: two watched literals, VSIDS
/// branching with phase saving, first-UIP learning, Luby restarts and
/// activity-based learnt-clause reduction. Fully deterministic. Clauses may be
/// added between calls to solve(); assumptions hold for one call only.
class CdclSolver {
 public:
  struct Stats {
    std::uint64_t solves = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
  };

  CdclSolver();
  ~CdclSolver();
  CdclSolver(CdclSolver&&) noexcept;
  CdclSolver& operator=(CdclSolver&&) noexcept;

  void reserve_vars(std::size_t count);
  std::size_t var_count() const;
  /// False once the clause set is unsatisfiable at the root.
  bool add_clause(std::span<const Lit> lits);
  void add_cnf(const CnfFormula& cnf);

  /// True when satisfiable under the assumptions; the model is then available.
  bool solve(std::span<const Lit> assumptions = {});
  bool model_value(int var) const;
  Model model() const;

  const Stats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Incremental solving handle produced by a backend.
class SolverSession {
 public:
  virtual ~SolverSession() = default;
  virtual void add_clause(std::span<const Lit> clause) = 0;
  virtual std::optional<Model> solve(std::span<const Lit> assumptions = {}) = 0;
};

/// Pluggable solver backend. Implementations must be deterministic for
/// identical input and keep no state shared between sessions.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<SolverSession> open(const CnfFormula& cnf) const = 0;

  std::optional<Model> solve(const CnfFormula& cnf) const { return open(cnf)->solve(); }
};

std::unique_ptr<SolverBackend> make_cdcl_backend();

/// Runs `command <file.cnf>` on a DIMACS dump and reads SAT-competition
/// output ("s SATISFIABLE" / "v ..." lines). Exit codes 10/20 are honoured.
std::unique_ptr<SolverBackend> make_external_backend(std::string command);

/// "cdcl" (default when empty) or "exec:<command>". Throws SolverFailure on
/// anything else.
std::unique_ptr<SolverBackend> make_backend(std::string_view spec);

/// Backend named by the AA_SOLVER environment variable.
std::unique_ptr<SolverBackend> backend_from_env();

/// Parses SAT-competition solver output. Returns nullopt for UNSAT; throws
/// SolverFailure if no status line is present.
std::optional<Model> parse_competition_output(std::string_view text, std::size_t var_count);

}  // namespace aa::sat
