#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fastslow/config.hpp"
#include "fastslow/model.hpp"
#include "fastslow/semantics.hpp"

namespace fastslow {

/// Cross pairs (state of a, state of b). Each pair stands for itself and its mirror.
struct PairRelation {
  std::set<std::pair<std::size_t, std::size_t>> pairs;

  bool contains(std::size_t p, std::size_t q) const { return pairs.count({p, q}) != 0; }
  std::size_t size() const noexcept { return pairs.size(); }
};

enum class Verdict { Equivalent, NotEquivalent, RelationNotABisimulation };

std::string_view verdict_name(Verdict v) noexcept;

enum class Side { Left, Right };

/// One unmatched challenge: at pair (left, right) the `challenger` side made a
/// move that no weak move of the other side answers inside the relation.
struct WitnessStep {
  std::size_t left = 0;
  std::size_t right = 0;
  Side challenger = Side::Left;
  bool fast = false;
  std::string action;             // underlying action(s) of the challenging move
  CapabilityLabel filtered;       // filtered label of a slow challenge
  std::size_t target = 0;         // challenger's target state
  std::size_t defender_moves = 0; // weak moves with matching label, all outside the relation
};

struct Witness {
  std::vector<WitnessStep> trace;  // first step is at the pair that fails
  bool truncated = false;
};

struct CheckOutcome {
  Verdict verdict = Verdict::Equivalent;
  std::optional<Witness> witness;  // present iff verdict is negative

  bool equivalent() const noexcept { return verdict == Verdict::Equivalent; }
};

std::string describe(const WitnessStep& step, const Lts& a, const Lts& b);
std::string describe(const Witness& w, const Lts& a, const Lts& b);

inline constexpr std::size_t kWitnessCap = 32;

enum class Game { FastSlow, Slow };

/// Checks that `r` (closed symmetrically) is a fast-slow bisimulation for cfg.fast.
CheckOutcome check_fast_slow_relation(const PairRelation& r, const Lts& a, const Lts& b,
                                      const EquivConfig& cfg);
/// As above without the fast-step clause.
CheckOutcome check_slow_relation(const PairRelation& r, const Lts& a, const Lts& b,
                                 const EquivConfig& cfg);

struct LargestResult {
  PairRelation relation;
  CheckOutcome outcome;  // for the pair of initial states
  std::size_t rounds = 0;
};

/// Greatest fixpoint from all cross pairs, deleting violating pairs round by round.
LargestResult largest_fast_slow(const Lts& a, const Lts& b, const EquivConfig& cfg,
                                std::size_t witness_cap = kWitnessCap);
LargestResult largest_slow(const Lts& a, const Lts& b, const EquivConfig& cfg,
                           std::size_t witness_cap = kWitnessCap);

/// Generic entry points over prebuilt views sharing one LabelTable.
CheckOutcome check_relation(Game game, const PairRelation& r, const WeakViews& a, const WeakViews& b);
LargestResult largest_bisimulation(Game game, const WeakViews& a, const WeakViews& b,
                                   std::size_t witness_cap = kWitnessCap);

/// A_f ∩ actions(p) ∩ actions(q); empty means cooperation preserves the equivalence.
std::set<std::string> shared_fast_actions(const SystemDef& p, const SystemDef& q,
                                          const EquivConfig& cfg);

struct CongruenceReport {
  std::set<std::string> shared_with_p1;
  std::set<std::string> shared_with_p2;
  bool side_condition = false;
  LargestResult components;
  LargestResult composed;
  Lts lts_p1, lts_p2, lts_p1q, lts_p2q;
};

CongruenceReport congruence_probe(const SystemDef& p1, const SystemDef& p2, const SystemDef& q,
                                  const EquivConfig& cfg, std::size_t state_limit = kDefaultStateLimit);

/// Level-vector pairs resolved against each Lts. Throws Error(Relation) for
/// vectors that name no reachable state.
PairRelation resolve_relation(const std::vector<std::pair<State, State>>& vectors, const Lts& a,
                              const Lts& b);
std::vector<std::pair<State, State>> relation_vectors(const PairRelation& r, const Lts& a,
                                                      const Lts& b);

}  // namespace fastslow
