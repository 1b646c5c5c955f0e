#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aa {

using ActivityId = std::uint32_t;

struct Activity {
  ActivityId id = 0;
  std::string name;
  bool silent = false;
};

/// Interning table for activity names. Ids are dense and assigned in
/// insertion order; at most one entry is the silent label.
class Alphabet {
 public:
  static constexpr std::string_view kSilentName = "tau";

  /// Id for `name`, adding it when new. The name "tau" maps to the silent label.
  ActivityId intern(std::string_view name);
  ActivityId silent();

  std::optional<ActivityId> find(std::string_view name) const;
  std::optional<ActivityId> silent_id() const { return silent_; }

  const Activity& operator[](ActivityId id) const { return entries_.at(id); }
  const std::string& name(ActivityId id) const { return entries_.at(id).name; }
  bool is_silent(ActivityId id) const { return silent_ && *silent_ == id; }
  std::size_t size() const { return entries_.size(); }

  /// Non-silent activity ids in id order.
  std::vector<ActivityId> visible() const;

  bool operator==(const Alphabet& other) const;

 private:
  std::vector<Activity> entries_;
  std::unordered_map<std::string, ActivityId> index_;
  std::optional<ActivityId> silent_;
};

/// One table must be a prefix of the other (same names, same ids).
bool compatible(const Alphabet& a, const Alphabet& b);

/// Throws AlphabetMismatch unless compatible; returns the longer table.
const Alphabet& merged(const Alphabet& a, const Alphabet& b);

}  // namespace aa
