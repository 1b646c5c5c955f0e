#pragma once

#include <cstddef>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "aa/formula.hpp"

namespace aa::sat {

using Clause = std::vector<Lit>;

struct CnfFormula {
  std::size_t var_count = 0;
  std::vector<Clause> clauses;

  int new_var() { return static_cast<int>(++var_count); }
  void add(Clause clause) { clauses.push_back(std::move(clause)); }
};

struct FormulaStats {
  std::size_t variables = 0;
  std::size_t clauses = 0;
  bool operator==(const FormulaStats&) const = default;
};

inline FormulaStats formula_stats(const CnfFormula& cnf) { return {cnf.var_count, cnf.clauses.size()}; }

/// Polarity-aware Tseytin conversion into an existing clause database.
/// Top-level conjunctions are split, disjunctions of literals pass through as
/// clauses, and every other subformula gets a fresh variable defined only in
/// the direction(s) its occurrences need.
class TseytinEncoder {
 public:
  explicit TseytinEncoder(CnfFormula& cnf) : cnf_(cnf) {}

  void assert_formula(const Formula& f);
  /// Literal equivalent (in the polarities requested so far) to `f`.
  Lit define(const Formula& f) { return encode(f, kBoth); }
  std::size_t aux_count() const { return aux_; }

 private:
  static constexpr unsigned kPos = 1, kNeg = 2, kBoth = 3;
  struct Definition {
    int var = 0;
    unsigned emitted = 0;
  };

  Lit encode(const Formula& f, unsigned polarity);
  Lit constant_true();

  CnfFormula& cnf_;
  std::unordered_map<const void*, Definition> defs_;
  std::vector<Formula> keep_alive_;
  int true_var_ = 0;
  std::size_t aux_ = 0;
};

CnfFormula tseytin(const Formula& f, std::size_t var_count);

/// `p cnf <vars> <clauses>` followed by one zero-terminated clause per line.
void write_dimacs(std::ostream& out, const CnfFormula& cnf);

}  // namespace aa::sat
