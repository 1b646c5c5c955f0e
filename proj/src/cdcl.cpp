#include <algorithm>
#include <cstdlib>
#include <limits>

#include "aa/solver.hpp"

namespace aa::sat {

namespace {

using ILit = std::uint32_t;
using CRef = std::uint32_t;
constexpr CRef kNoReason = std::numeric_limits<CRef>::max();
constexpr std::uint8_t kTrue = 0, kFalse = 1, kUndef = 2;

ILit to_ilit(Lit l) { return 2 * static_cast<ILit>(std::abs(l) - 1) + (l < 0 ? 1u : 0u); }
std::uint32_t var_of(ILit x) { return x >> 1; }

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

struct CdclSolver::Impl {
  struct ClauseData {
    std::vector<ILit> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0;
  };
  struct Watcher {
    CRef cref;
    ILit blocker;
  };

  std::vector<ClauseData> clauses;
  std::vector<std::vector<Watcher>> watches;  // by literal that is watched
  std::vector<std::uint8_t> assigns;           // value of the positive literal
  std::vector<int> level;
  std::vector<CRef> reason;
  std::vector<bool> phase;
  std::vector<double> activity;
  std::vector<std::uint8_t> seen;
  std::vector<ILit> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;
  bool ok = true;

  // max-heap of variables keyed by activity
  std::vector<std::uint32_t> heap;
  std::vector<int> heap_pos;

  double var_inc = 1.0, var_decay = 0.95;
  double cla_inc = 1.0, cla_decay = 0.999;
  std::size_t learnt_count = 0;
  double max_learnts = 0;

  std::vector<bool> model;
  Stats stats;

  std::uint8_t value(ILit x) const {
    const std::uint8_t a = assigns[var_of(x)];
    return a == kUndef ? kUndef : static_cast<std::uint8_t>(a ^ (x & 1u));
  }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  void reserve(std::size_t n) {
    while (assigns.size() < n) {
      const auto v = static_cast<std::uint32_t>(assigns.size());
      assigns.push_back(kUndef);
      level.push_back(0);
      reason.push_back(kNoReason);
      phase.push_back(false);
      activity.push_back(0);
      seen.push_back(0);
      watches.emplace_back();
      watches.emplace_back();
      heap_pos.push_back(-1);
      heap_insert(v);
    }
  }

  // heap
  bool heap_less(std::uint32_t a, std::uint32_t b) const {
    return activity[a] > activity[b] || (activity[a] == activity[b] && a < b);
  }
  void heap_up(std::size_t i) {
    const std::uint32_t v = heap[i];
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!heap_less(v, heap[parent])) break;
      heap[i] = heap[parent];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = parent;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_down(std::size_t i) {
    const std::uint32_t v = heap[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap.size()) break;
      if (child + 1 < heap.size() && heap_less(heap[child + 1], heap[child])) ++child;
      if (!heap_less(heap[child], v)) break;
      heap[i] = heap[child];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = child;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_insert(std::uint32_t v) {
    if (heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }
  std::uint32_t heap_pop() {
    const std::uint32_t top = heap.front();
    heap_pos[top] = -1;
    heap.front() = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap_pos[heap.front()] = 0;
      heap_down(0);
    }
    return top;
  }

  void bump_var(std::uint32_t v) {
    if ((activity[v] += var_inc) > 1e100) {
      for (auto& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos[v]));
  }
  void bump_clause(ClauseData& c) {
    if ((c.activity += cla_inc) > 1e20) {
      for (auto& cl : clauses)
        if (cl.learnt) cl.activity *= 1e-20;
      cla_inc *= 1e-20;
    }
  }

  void enqueue(ILit x, CRef from) {
    const auto v = var_of(x);
    assigns[v] = (x & 1u) ? kFalse : kTrue;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(x);
  }

  void cancel_until(int target) {
    if (decision_level() <= target) return;
    for (std::size_t i = trail.size(); i-- > trail_lim[static_cast<std::size_t>(target)];) {
      const auto v = var_of(trail[i]);
      phase[v] = (trail[i] & 1u) == 0;
      assigns[v] = kUndef;
      reason[v] = kNoReason;
      heap_insert(v);
    }
    trail.resize(trail_lim[static_cast<std::size_t>(target)]);
    trail_lim.resize(static_cast<std::size_t>(target));
    qhead = trail.size();
  }

  CRef attach(std::vector<ILit> lits, bool learnt) {
    const auto cref = static_cast<CRef>(clauses.size());
    watches[lits[0]].push_back({cref, lits[1]});
    watches[lits[1]].push_back({cref, lits[0]});
    clauses.push_back({std::move(lits), learnt, false, 0});
    if (learnt) ++learnt_count;
    return cref;
  }

  CRef propagate() {
    while (qhead < trail.size()) {
      const ILit p = trail[qhead++];
      const ILit false_lit = p ^ 1u;
      auto& ws = watches[false_lit];
      ++stats.propagations;
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        const Watcher w = ws[i];
        if (value(w.blocker) == kTrue) {
          ws[j++] = w;
          ++i;
          continue;
        }
        ClauseData& c = clauses[w.cref];
        if (c.deleted) {
          ++i;
          continue;
        }
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        ++i;
        const ILit first = c.lits[0];
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != kFalse) {
            std::swap(c.lits[1], c.lits[k]);
            watches[c.lits[1]].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) == kFalse) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          qhead = trail.size();
          return w.cref;
        }
        enqueue(first, w.cref);
      }
      ws.resize(j);
    }
    return kNoReason;
  }

  bool redundant(ILit x) const {
    const CRef r = reason[var_of(x)];
    if (r == kNoReason) return false;
    const auto& lits = clauses[r].lits;
    for (std::size_t k = 1; k < lits.size(); ++k) {
      const auto v = var_of(lits[k]);
      if (!seen[v] && level[v] > 0) return false;
    }
    return true;
  }

  std::vector<ILit> analyze(CRef confl, int& backtrack) {
    std::vector<ILit> learnt{0};
    int path = 0;
    ILit p = 0;
    bool have_p = false;
    std::size_t index = trail.size();
    do {
      ClauseData& c = clauses[confl];
      if (c.learnt) bump_clause(c);
      for (std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
        const ILit q = c.lits[k];
        const auto v = var_of(q);
        if (seen[v] || level[v] == 0) continue;
        seen[v] = 1;
        bump_var(v);
        if (level[v] >= decision_level()) ++path;
        else learnt.push_back(q);
      }
      while (!seen[var_of(trail[--index])]) {
      }
      p = trail[index];
      have_p = true;
      confl = reason[var_of(p)];
      seen[var_of(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = p ^ 1u;

    std::vector<ILit> all = learnt;
    std::size_t keep = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k)
      if (!redundant(learnt[k])) learnt[keep++] = learnt[k];
    learnt.resize(keep);
    for (ILit x : all) seen[var_of(x)] = 0;

    backtrack = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level[var_of(learnt[k])] > level[var_of(learnt[max_i])]) max_i = k;
      std::swap(learnt[1], learnt[max_i]);
      backtrack = level[var_of(learnt[1])];
    }
    return learnt;
  }

  bool locked(CRef cref) const {
    const auto& c = clauses[cref];
    const auto v = var_of(c.lits[0]);
    return reason[v] == cref && value(c.lits[0]) == kTrue;
  }

  void reduce_db() {
    std::vector<CRef> learnts;
    for (CRef i = 0; i < clauses.size(); ++i)
      if (clauses[i].learnt && !clauses[i].deleted && clauses[i].lits.size() > 2) learnts.push_back(i);
    std::sort(learnts.begin(), learnts.end(), [&](CRef a, CRef b) {
      return clauses[a].activity < clauses[b].activity || (clauses[a].activity == clauses[b].activity && a < b);
    });
    for (std::size_t k = 0; k < learnts.size() / 2; ++k) {
      if (locked(learnts[k])) continue;
      auto& c = clauses[learnts[k]];
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
      --learnt_count;
    }
  }

  bool add_clause(std::span<const Lit> input) {
    if (!ok) return false;
    cancel_until(0);
    std::vector<ILit> lits;
    for (Lit l : input) {
      if (l == 0) continue;
      reserve(static_cast<std::size_t>(std::abs(l)));
      lits.push_back(to_ilit(l));
    }
    std::sort(lits.begin(), lits.end());
    std::vector<ILit> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (i > 0 && lits[i] == lits[i - 1]) continue;
      if (i > 0 && lits[i] == (lits[i - 1] ^ 1u)) return true;
      const auto val = value(lits[i]);
      if (val == kTrue) return true;
      if (val == kFalse) continue;
      kept.push_back(lits[i]);
    }
    if (kept.empty()) return ok = false;
    if (kept.size() == 1) {
      enqueue(kept[0], kNoReason);
      return ok = (propagate() == kNoReason);
    }
    attach(std::move(kept), false);
    return true;
  }

  std::optional<std::uint32_t> pick_branch() {
    while (!heap.empty()) {
      const std::uint32_t v = heap_pop();
      if (assigns[v] == kUndef) return v;
    }
    return std::nullopt;
  }

  // 1 = sat, 0 = unsat, -1 = restart
  int search(std::span<const Lit> assumptions, std::uint64_t conflict_budget) {
    std::uint64_t conflicts = 0;
    for (;;) {
      const CRef confl = propagate();
      if (confl != kNoReason) {
        ++stats.conflicts;
        ++conflicts;
        if (decision_level() == 0) {
          ok = false;
          return 0;
        }
        int backtrack = 0;
        auto learnt = analyze(confl, backtrack);
        cancel_until(backtrack);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          const ILit first = learnt[0];
          const CRef cref = attach(std::move(learnt), true);
          bump_clause(clauses[cref]);
          enqueue(first, cref);
        }
        var_inc /= var_decay;
        cla_inc /= cla_decay;
        continue;
      }
      if (conflicts >= conflict_budget) {
        cancel_until(0);
        return -1;
      }
      if (static_cast<double>(learnt_count) - static_cast<double>(trail.size()) >= max_learnts) {
        reduce_db();
        max_learnts *= 1.1;
      }
      std::optional<ILit> next;
      while (decision_level() < static_cast<int>(assumptions.size())) {
        const ILit a = to_ilit(assumptions[static_cast<std::size_t>(decision_level())]);
        const auto val = value(a);
        if (val == kTrue) {
          trail_lim.push_back(trail.size());
        } else if (val == kFalse) {
          return 0;
        } else {
          next = a;
          break;
        }
      }
      if (!next) {
        const auto v = pick_branch();
        if (!v) return 1;
        ++stats.decisions;
        next = 2 * *v + (phase[*v] ? 0u : 1u);
      }
      trail_lim.push_back(trail.size());
      enqueue(*next, kNoReason);
    }
  }

  bool solve(std::span<const Lit> assumptions) {
    ++stats.solves;
    model.clear();
    if (!ok) return false;
    for (Lit a : assumptions) reserve(static_cast<std::size_t>(std::abs(a)));
    max_learnts = std::max(2000.0, static_cast<double>(clauses.size()) / 3.0);
    int status = -1;
    for (int restart = 0; status == -1; ++restart)
      status = search(assumptions, static_cast<std::uint64_t>(luby(2.0, restart) * 100));
    if (status == 1) {
      model.assign(assigns.size() + 1, false);
      for (std::size_t v = 0; v < assigns.size(); ++v) model[v + 1] = assigns[v] == kTrue;
    }
    cancel_until(0);
    return status == 1;
  }
};

CdclSolver::CdclSolver() : impl_(std::make_unique<Impl>()) {}
CdclSolver::~CdclSolver() = default;
CdclSolver::CdclSolver(CdclSolver&&) noexcept = default;
CdclSolver& CdclSolver::operator=(CdclSolver&&) noexcept = default;

void CdclSolver::reserve_vars(std::size_t count) { impl_->reserve(count); }
std::size_t CdclSolver::var_count() const { return impl_->assigns.size(); }
bool CdclSolver::add_clause(std::span<const Lit> lits) { return impl_->add_clause(lits); }

void CdclSolver::add_cnf(const CnfFormula& cnf) {
  reserve_vars(cnf.var_count);
  for (const auto& c : cnf.clauses) add_clause(c);
}

bool CdclSolver::solve(std::span<const Lit> assumptions) { return impl_->solve(assumptions); }

bool CdclSolver::model_value(int var) const {
  const auto v = static_cast<std::size_t>(var);
  return v < impl_->model.size() && impl_->model[v];
}

Model CdclSolver::model() const { return impl_->model; }
const CdclSolver::Stats& CdclSolver::stats() const { return impl_->stats; }

}  // namespace aa::sat
