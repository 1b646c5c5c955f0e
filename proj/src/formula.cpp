#include "aa/formula.hpp"

#include <cstdlib>
#include <stdexcept>
#include <unordered_set>

namespace aa::sat {

Formula Formula::make(Kind kind, std::vector<Formula> children) {
  return Formula(std::make_shared<const Node>(Node{kind, 0, std::move(children)}));
}

Formula Formula::top() {
  static const Formula t = make(Kind::True, {});
  return t;
}

Formula Formula::bottom() {
  static const Formula f = make(Kind::False, {});
  return f;
}

Formula Formula::var(int v) {
  if (v <= 0) throw std::invalid_argument("variables are numbered from 1");
  return Formula(std::make_shared<const Node>(Node{Kind::Var, v, {}}));
}

Formula Formula::literal(Lit l) { return l > 0 ? var(l) : neg(var(-l)); }

bool Formula::is_literal() const {
  return kind() == Kind::Var || (kind() == Kind::Not && children()[0].kind() == Kind::Var);
}

Lit Formula::as_literal() const {
  if (kind() == Kind::Var) return variable();
  if (is_literal()) return -children()[0].variable();
  throw std::logic_error("formula is not a literal");
}

Formula neg(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::True: return Formula::bottom();
    case Formula::Kind::False: return Formula::top();
    case Formula::Kind::Not: return f.children()[0];
    default: return Formula::make(Formula::Kind::Not, {f});
  }
}

Formula Formula::nary(Kind kind, std::vector<Formula> parts, const Formula& absorbing, const Formula& neutral) {
  std::vector<Formula> kept;
  kept.reserve(parts.size());
  for (auto& p : parts) {
    if (p.kind() == absorbing.kind()) return absorbing;
    if (p.kind() == neutral.kind()) continue;
    if (p.kind() == kind) {
      for (const auto& c : p.children()) kept.push_back(c);
    } else {
      kept.push_back(std::move(p));
    }
  }
  if (kept.empty()) return neutral;
  if (kept.size() == 1) return kept.front();
  return make(kind, std::move(kept));
}

Formula conj(std::vector<Formula> parts) {
  return Formula::nary(Formula::Kind::And, std::move(parts), Formula::bottom(), Formula::top());
}

Formula disj(std::vector<Formula> parts) {
  return Formula::nary(Formula::Kind::Or, std::move(parts), Formula::top(), Formula::bottom());
}

Formula iff(const Formula& a, const Formula& b) {
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  if (a.is_false()) return neg(b);
  if (b.is_false()) return neg(a);
  return Formula::make(Formula::Kind::Iff, {a, b});
}

bool evaluate(const Formula& f, const std::vector<bool>& assignment) {
  switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Var: return assignment.at(static_cast<std::size_t>(f.variable()));
    case Formula::Kind::Not: return !evaluate(f.children()[0], assignment);
    case Formula::Kind::And:
      for (const auto& c : f.children())
        if (!evaluate(c, assignment)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children())
        if (evaluate(c, assignment)) return true;
      return false;
    case Formula::Kind::Iff: return evaluate(f.children()[0], assignment) == evaluate(f.children()[1], assignment);
  }
  return false;
}

std::size_t node_count(const Formula& f) {
  std::unordered_set<const void*> seen;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur.identity()).second) continue;
    for (const auto& c : cur.children()) stack.push_back(c);
  }
  return seen.size();
}

}  // namespace aa::sat
