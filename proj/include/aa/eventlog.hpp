#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aa/alphabet.hpp"

namespace aa {

using Trace = std::vector<ActivityId>;

/// Length first, then activity ids lexicographically.
struct ShortLex {
  template <class A, class B>
  bool operator()(const A& a, const B& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

/// Multiset of traces over an activity table. Silent activities are rejected.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  void add(Trace trace, std::size_t multiplicity = 1);
  /// Interns names into the log's own table.
  void add(std::initializer_list<std::string_view> names, std::size_t multiplicity = 1);

  const Alphabet& alphabet() const { return alphabet_; }
  Alphabet& alphabet() { return alphabet_; }

  const std::map<Trace, std::size_t, ShortLex>& entries() const { return entries_; }
  std::size_t unique_count() const { return entries_.size(); }
  std::size_t total_count() const;
  bool empty() const { return entries_.empty(); }
  std::size_t max_length() const;

 private:
  Alphabet alphabet_;
  std::map<Trace, std::size_t, ShortLex> entries_;
};

/// Support of the log with multiplicities, in short-lex order.
std::vector<std::pair<Trace, std::size_t>> unique_traces(const EventLog& log);

bool contains(const EventLog& log, std::span<const ActivityId> visible);

enum class LogFormat { Xes, Tlog };

/// Parses a log; activity names are interned into `seed` (pass the net's
/// table so ids agree).
EventLog parse_log(std::string_view text, LogFormat format, Alphabet seed = {});

/// tlog text; `parse_log(serialize_tlog(l), Tlog)` reproduces `l`.
std::string serialize_tlog(const EventLog& log);

}  // namespace aa
