#pragma once

#include <map>
#include <set>
#include <string>

namespace fastslow {

/// Fast/slow action partition plus the species kept when comparing labels.
struct EquivConfig {
  std::set<std::string> fast;
  std::set<std::string> slow;
  std::set<std::string> delta;
  /// Species of the second model mapped onto names of the first.
  std::map<std::string, std::string> alias;

  /// Name under which a species is compared.
  const std::string& canonical(const std::string& species) const {
    auto it = alias.find(species);
    return it == alias.end() ? species : it->second;
  }

  bool is_fast(const std::string& action) const { return fast.count(action) != 0; }
  bool is_slow(const std::string& action) const { return slow.count(action) != 0; }

  friend bool operator==(const EquivConfig&, const EquivConfig&) = default;
};

}  // namespace fastslow
