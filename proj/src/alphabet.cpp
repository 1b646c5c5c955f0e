#include "aa/alphabet.hpp"

#include "aa/errors.hpp"

namespace aa {

ActivityId Alphabet::intern(std::string_view name) {
  if (name == kSilentName) return silent();
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  const auto id = static_cast<ActivityId>(entries_.size());
  entries_.push_back({id, std::string(name), false});
  index_.emplace(std::string(name), id);
  return id;
}

ActivityId Alphabet::silent() {
  if (silent_) return *silent_;
  const auto id = static_cast<ActivityId>(entries_.size());
  entries_.push_back({id, std::string(kSilentName), true});
  index_.emplace(std::string(kSilentName), id);
  silent_ = id;
  return id;
}

std::optional<ActivityId> Alphabet::find(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  return std::nullopt;
}

std::vector<ActivityId> Alphabet::visible() const {
  std::vector<ActivityId> out;
  for (const auto& a : entries_)
    if (!a.silent) out.push_back(a.id);
  return out;
}

bool Alphabet::operator==(const Alphabet& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].name != other.entries_[i].name || entries_[i].silent != other.entries_[i].silent) return false;
  return true;
}

bool compatible(const Alphabet& a, const Alphabet& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (ActivityId i = 0; i < n; ++i)
    if (a[i].name != b[i].name || a[i].silent != b[i].silent) return false;
  return true;
}

const Alphabet& merged(const Alphabet& a, const Alphabet& b) {
  if (!compatible(a, b)) throw AlphabetMismatch("activity tables disagree on shared ids");
  return a.size() >= b.size() ? a : b;
}

}  // namespace aa
