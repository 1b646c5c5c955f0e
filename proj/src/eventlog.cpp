#include "aa/eventlog.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "aa/errors.hpp"

namespace aa {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

ActivityId intern_visible(Alphabet& alphabet, std::string_view name, std::size_t line, const char* ctx) {
  if (name.empty()) throw ParseError("empty activity name", line, ctx ? ctx : "");
  const ActivityId id = alphabet.intern(name);
  if (alphabet.is_silent(id)) throw ParseError("silent activity in log", line, ctx ? ctx : "");
  return id;
}

EventLog parse_tlog(std::string_view text, Alphabet seed) {
  EventLog log(std::move(seed));
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }

    std::size_t multiplicity = 1;
    std::size_t digits = 0;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
    if (digits > 0 && digits + 1 < line.size() && line[digits] == 'x' &&
        std::isspace(static_cast<unsigned char>(line[digits + 1]))) {
      multiplicity = std::stoul(std::string(line.substr(0, digits)));
      if (multiplicity == 0) throw ParseError("multiplicity must be positive", line_no);
      line = trim(line.substr(digits + 1));
    }

    Trace trace;
    if (line != "-") {
      std::size_t start = 0;
      while (start <= line.size()) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) comma = line.size();
        trace.push_back(intern_visible(log.alphabet(), trim(line.substr(start, comma - start)), line_no, nullptr));
        start = comma + 1;
      }
    }
    log.add(std::move(trace), multiplicity);
    if (end == text.size()) break;
  }
  return log;
}

using boost::property_tree::ptree;

std::optional<std::string> string_attr(const ptree& event, const std::string& key) {
  for (const auto& [tag, child] : event) {
    if (tag != "string") continue;
    if (child.get<std::string>("<xmlattr>.key", "") == key) return child.get<std::string>("<xmlattr>.value", "");
  }
  return std::nullopt;
}

EventLog parse_xes(std::string_view text, Alphabet seed) {
  EventLog log(std::move(seed));
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return log;
  ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_xml(in, tree);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  const auto root = tree.get_child_optional("log");
  if (!root) throw ParseError("missing <log> root element", 0, "log");

  for (const auto& [tag, trace_node] : *root) {
    if (tag != "trace") continue;
    Trace trace;
    for (const auto& [etag, event] : trace_node) {
      if (etag != "event") continue;
      if (auto lifecycle = string_attr(event, "lifecycle:transition"); lifecycle && lower(*lifecycle) != "complete")
        continue;
      auto name = string_attr(event, "concept:name");
      if (!name) throw ParseError("event without concept:name", 0, "event");
      trace.push_back(intern_visible(log.alphabet(), *name, 0, "event"));
    }
    log.add(std::move(trace));
  }
  return log;
}

}  // namespace

void EventLog::add(Trace trace, std::size_t multiplicity) {
  if (multiplicity == 0) return;
  for (ActivityId a : trace) {
    if (a >= alphabet_.size()) throw AlphabetMismatch("trace uses an activity id outside the log's table");
    if (alphabet_.is_silent(a)) throw AlphabetMismatch("silent activity in a log trace");
  }
  entries_[std::move(trace)] += multiplicity;
}

void EventLog::add(std::initializer_list<std::string_view> names, std::size_t multiplicity) {
  Trace trace;
  for (auto n : names) trace.push_back(intern_visible(alphabet_, n, 0, nullptr));
  add(std::move(trace), multiplicity);
}

std::size_t EventLog::total_count() const {
  return std::accumulate(entries_.begin(), entries_.end(), std::size_t{0},
                         [](std::size_t acc, const auto& e) { return acc + e.second; });
}

std::size_t EventLog::max_length() const {
  std::size_t out = 0;
  for (const auto& [t, k] : entries_) out = std::max(out, t.size());
  return out;
}

std::vector<std::pair<Trace, std::size_t>> unique_traces(const EventLog& log) {
  return {log.entries().begin(), log.entries().end()};
}

bool contains(const EventLog& log, std::span<const ActivityId> visible) {
  return log.entries().find(Trace(visible.begin(), visible.end())) != log.entries().end();
}

EventLog parse_log(std::string_view text, LogFormat format, Alphabet seed) {
  return format == LogFormat::Tlog ? parse_tlog(text, std::move(seed)) : parse_xes(text, std::move(seed));
}

std::string serialize_tlog(const EventLog& log) {
  std::string out;
  for (const auto& [trace, k] : log.entries()) {
    if (k > 1) out += std::to_string(k) + "x ";
    if (trace.empty()) out += "-";
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (i > 0) out += ",";
      out += log.alphabet().name(trace[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace aa
