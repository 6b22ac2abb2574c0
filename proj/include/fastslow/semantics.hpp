#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "fastslow/config.hpp"
#include "fastslow/model.hpp"

namespace fastslow {

/// Levels of every species, indexed by the system's species order.
struct State {
  std::vector<int> levels;

  std::size_t size() const noexcept { return levels.size(); }
  int operator[](std::size_t i) const { return levels[i]; }

  friend auto operator<=>(const State&, const State&) = default;
  friend bool operator==(const State&, const State&) = default;
};

std::string to_string(const State& s);

struct StateHash {
  std::size_t operator()(const State& s) const noexcept;
};

/// One `S:op(l, k)` entry of a capability label; `level` is the source level.
struct LabelEntry {
  std::string species;
  Role role = Role::Reactant;
  int level = 0;
  int stoich = 1;

  friend auto operator<=>(const LabelEntry&, const LabelEntry&) = default;
  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

/// (action, w) with w kept as a sorted set of entries.
struct CapabilityLabel {
  std::string action;
  std::vector<LabelEntry> entries;

  friend auto operator<=>(const CapabilityLabel&, const CapabilityLabel&) = default;
  friend bool operator==(const CapabilityLabel&, const CapabilityLabel&) = default;
};

std::string to_string(const LabelEntry& e);
std::string to_string(const CapabilityLabel& l);

/// w1 :: w2 under set semantics.
std::vector<LabelEntry> concat(const std::vector<LabelEntry>& w1, const std::vector<LabelEntry>& w2);

/// w_delta: keeps entries whose aliased species is in delta, renaming them to the alias.
CapabilityLabel filter_label(const CapabilityLabel& label, const EquivConfig& cfg);

struct Successor {
  CapabilityLabel label;
  State target;

  friend bool operator==(const Successor&, const Successor&) = default;
};

/// Capability relation of a fixed system, with the composition compiled once.
class CapabilitySemantics {
 public:
  explicit CapabilitySemantics(const SystemDef& sys);

  const std::vector<std::string>& species() const noexcept { return species_; }
  const std::vector<int>& max_levels() const noexcept { return max_levels_; }
  State initial_state() const;
  bool in_bounds(const State& s) const;

  /// All capability transitions out of `s`.
  std::vector<Successor> step(const State& s) const;

 private:
  struct LeafRule {
    std::size_t species = 0;
    std::vector<Prefix> prefixes;
  };
  struct CompiledNode {
    int leaf = -1;  // index into leaves_ when >= 0
    int left = -1;
    int right = -1;
    std::vector<std::string> sync;  // sorted synchronisation set
  };
  struct Partial {
    std::string action;
    std::vector<LabelEntry> entries;
    std::vector<std::pair<std::size_t, int>> updates;  // species index, new level
  };

  int compile(const SystemDef& sys, const CompositionTree& t, std::vector<std::string>& actions_out);
  std::vector<Partial> derive(int node, const State& s) const;

  std::vector<std::string> species_;
  std::vector<int> max_levels_;
  std::vector<int> initial_;
  std::vector<LeafRule> leaves_;
  std::vector<CompiledNode> nodes_;
  int root_ = -1;
};

std::vector<Successor> step(const SystemDef& sys, const State& s);

struct Transition {
  std::size_t src = 0;
  CapabilityLabel label;
  std::size_t dst = 0;
};

/// Explicit transition system over the derivative set of the initial state.
struct Lts {
  std::vector<std::string> species;
  std::vector<State> states;
  std::size_t initial = 0;
  std::vector<Transition> transitions;
  std::vector<std::vector<std::size_t>> outgoing;  // transition indices per source

  std::size_t num_states() const noexcept { return states.size(); }
  std::optional<std::size_t> find(const State& s) const;
  std::set<std::string> actions() const;

  /// Rebuilds `outgoing` and the state index after states/transitions change.
  void reindex();

 private:
  std::unordered_map<State, std::size_t, StateHash> index_;
};

inline constexpr std::size_t kDefaultStateLimit = 1'000'000;

/// Breadth-first closure of `step` from the initial state. Successors of each
/// state are numbered in lexicographic order of their target vectors.
/// Throws Error(StateLimitExceeded) once more than `state_limit` states appear.
Lts build_lts(const SystemDef& sys, std::size_t state_limit = kDefaultStateLimit);

/// Dense ids for filtered labels, shared between the two sides of a comparison.
class LabelTable {
 public:
  int intern(const CapabilityLabel& label);
  const CapabilityLabel& label(int id) const { return labels_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::map<CapabilityLabel, int> ids_;
  std::vector<CapabilityLabel> labels_;
};

/// Fast step relation, its reflexive-transitive closure, and the strong and
/// weak slow views of an Lts under a fast/slow partition. Weak successor sets
/// are computed on demand and memoised.
class WeakViews {
 public:
  struct SlowStep {
    int label = 0;  // id in the shared LabelTable
    std::size_t target = 0;
    std::size_t transition = 0;

    friend auto operator<=>(const SlowStep&, const SlowStep&) = default;
  };

  /// Throws Error(UnpartitionedAction) if an action of `lts` is in neither class,
  /// Error(Config) if an action is in both.
  WeakViews(const Lts& lts, const EquivConfig& cfg, std::shared_ptr<LabelTable> labels);
  WeakViews(const Lts& lts, const EquivConfig& cfg);

  const Lts& lts() const noexcept { return *lts_; }
  const LabelTable& labels() const noexcept { return *labels_; }
  std::size_t size() const noexcept { return fast_.size(); }

  /// P ->> P' (one edge per state pair, labels dropped).
  const std::vector<std::size_t>& fast_successors(std::size_t s) const { return fast_[s]; }
  /// Fast actions behind each fast edge, for diagnostics.
  const std::vector<std::vector<std::string>>& fast_actions(std::size_t s) const { return fast_actions_[s]; }
  /// P ==> P', sorted, always containing s.
  const std::vector<std::size_t>& closure(std::size_t s) const;
  /// P -(a, w_delta)-> P' for slow a.
  const std::vector<SlowStep>& slow_successors(std::size_t s) const { return slow_[s]; }
  /// P =(a, w_delta)=> P': for each label id, the sorted set of targets.
  const std::map<int, std::vector<std::size_t>>& weak_slow(std::size_t s) const;

 private:
  const Lts* lts_;
  std::shared_ptr<LabelTable> labels_;
  std::vector<std::vector<std::size_t>> fast_;
  std::vector<std::vector<std::vector<std::string>>> fast_actions_;
  std::vector<std::vector<SlowStep>> slow_;
  mutable std::vector<std::optional<std::vector<std::size_t>>> closure_;
  mutable std::vector<std::optional<std::map<int, std::vector<std::size_t>>>> weak_slow_;
};

}  // namespace fastslow
