#include "aa/cnf.hpp"

namespace aa::sat {

Lit TseytinEncoder::constant_true() {
  if (true_var_ == 0) {
    true_var_ = cnf_.new_var();
    ++aux_;
    cnf_.add({true_var_});
  }
  return true_var_;
}

Lit TseytinEncoder::encode(const Formula& f, unsigned polarity) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return constant_true();
    case K::False: return -constant_true();
    case K::Var: return f.variable();
    case K::Not: {
      const unsigned flipped = ((polarity & kPos) ? kNeg : 0) | ((polarity & kNeg) ? kPos : 0);
      return -encode(f.children()[0], flipped);
    }
    default: break;
  }

  auto [it, inserted] = defs_.try_emplace(f.identity());
  if (inserted) {
    it->second.var = cnf_.new_var();
    ++aux_;
    keep_alive_.push_back(f);
  }
  const int x = it->second.var;
  const unsigned missing = polarity & ~it->second.emitted;
  if (missing == 0) return x;
  it->second.emitted |= missing;

  const auto kids = f.children();
  if (f.kind() == K::Iff) {
    const Lit a = encode(kids[0], kBoth);
    const Lit b = encode(kids[1], kBoth);
    if (missing & kPos) {
      cnf_.add({-x, -a, b});
      cnf_.add({-x, a, -b});
    }
    if (missing & kNeg) {
      cnf_.add({x, a, b});
      cnf_.add({x, -a, -b});
    }
    return x;
  }

  std::vector<Lit> lits;
  lits.reserve(kids.size());
  for (const auto& k : kids) lits.push_back(encode(k, missing));
  const bool is_and = f.kind() == K::And;
  // And: x -> each kid; (all kids) -> x.  Or: x -> some kid; each kid -> x.
  if (missing & kPos) {
    if (is_and) {
      for (Lit l : lits) cnf_.add({-x, l});
    } else {
      Clause c{-x};
      c.insert(c.end(), lits.begin(), lits.end());
      cnf_.add(std::move(c));
    }
  }
  if (missing & kNeg) {
    if (is_and) {
      Clause c{x};
      for (Lit l : lits) c.push_back(-l);
      cnf_.add(std::move(c));
    } else {
      for (Lit l : lits) cnf_.add({x, -l});
    }
  }
  return x;
}

void TseytinEncoder::assert_formula(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return;
    case K::False: cnf_.add({}); return;
    case K::Var: cnf_.add({f.variable()}); return;
    case K::And:
      for (const auto& c : f.children()) assert_formula(c);
      return;
    case K::Or: {
      Clause c;
      for (const auto& k : f.children()) c.push_back(encode(k, kPos));
      cnf_.add(std::move(c));
      return;
    }
    case K::Not: {
      const auto& inner = f.children()[0];
      if (inner.kind() == K::Or) {
        for (const auto& k : inner.children()) assert_formula(neg(k));
        return;
      }
      cnf_.add({-encode(inner, kNeg)});
      return;
    }
    case K::Iff: {
      const Lit a = encode(f.children()[0], kBoth);
      const Lit b = encode(f.children()[1], kBoth);
      cnf_.add({-a, b});
      cnf_.add({a, -b});
      return;
    }
  }
}

CnfFormula tseytin(const Formula& f, std::size_t var_count) {
  CnfFormula cnf;
  cnf.var_count = var_count;
  TseytinEncoder enc(cnf);
  enc.assert_formula(f);
  return cnf;
}

void write_dimacs(std::ostream& out, const CnfFormula& cnf) {
  out << "p cnf " << cnf.var_count << " " << cnf.clauses.size() << "\n";
  for (const auto& clause : cnf.clauses) {
    for (Lit l : clause) out << l << " ";
    out << "0\n";
  }
}

}  // namespace aa::sat
