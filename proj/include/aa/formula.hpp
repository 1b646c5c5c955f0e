#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

namespace aa::sat {

/// DIMACS-style literal: +v / -v for variable v >= 1.
using Lit = int;

/// Immutable propositional formula over numbered variables. Handles share
/// structure, so a subformula referenced twice is encoded once by Tseytin.
/// The builders fold constants, so True/False only survive at the root.
class Formula {
 public:
  enum class Kind { True, False, Var, Not, And, Or, Iff };

  Formula() : Formula(top()) {}
  static Formula top();
  static Formula bottom();
  static Formula constant(bool value) { return value ? top() : bottom(); }
  static Formula var(int v);
  static Formula literal(Lit l);

  Kind kind() const { return node_->kind; }
  int variable() const { return node_->var; }
  std::span<const Formula> children() const { return node_->children; }
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }
  bool is_constant() const { return is_true() || is_false(); }
  /// Var or Not(Var).
  bool is_literal() const;
  Lit as_literal() const;
  const void* identity() const { return node_.get(); }

  friend Formula neg(const Formula& f);
  friend Formula conj(std::vector<Formula> parts);
  friend Formula disj(std::vector<Formula> parts);
  friend Formula iff(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    int var = 0;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Kind kind, std::vector<Formula> children);
  static Formula nary(Kind kind, std::vector<Formula> parts, const Formula& absorbing, const Formula& neutral);

  std::shared_ptr<const Node> node_;
};

Formula neg(const Formula& f);
Formula conj(std::vector<Formula> parts);
Formula disj(std::vector<Formula> parts);
inline Formula conj(const Formula& a, const Formula& b) { return conj(std::vector<Formula>{a, b}); }
inline Formula disj(const Formula& a, const Formula& b) { return disj(std::vector<Formula>{a, b}); }
inline Formula implies(const Formula& a, const Formula& b) { return disj(neg(a), b); }
Formula iff(const Formula& a, const Formula& b);

/// Truth value under `assignment[v]` (index 0 unused).
bool evaluate(const Formula& f, const std::vector<bool>& assignment);

/// Number of distinct nodes reachable from `f`.
std::size_t node_count(const Formula& f);

}  // namespace aa::sat
