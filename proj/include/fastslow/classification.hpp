#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fastslow/config.hpp"
#include "fastslow/equivalence.hpp"
#include "fastslow/linalg.hpp"
#include "fastslow/model.hpp"
#include "fastslow/semantics.hpp"

namespace fastslow {

using linalg::IntMatrix;
using linalg::IntRowVector;

/// Rows are species (declaration order), columns are reactions (first appearance).
/// Entry is -k for a reactant, +k for a product, 0 otherwise.
struct StoichMatrix {
  IntMatrix entries;
  std::vector<std::string> species;
  std::vector<std::string> reactions;
};

StoichMatrix stoich_matrix(const SystemDef& sys);

/// Columns of `m` whose reaction is fast (or slow), in column order.
IntMatrix fast_columns(const StoichMatrix& m, const EquivConfig& cfg);
IntMatrix slow_columns(const StoichMatrix& m, const EquivConfig& cfg);

struct Variable {
  IntRowVector coefficients;
  std::optional<std::string> species;  // set when the variable is a single species
  std::string name;
};

struct ConservedVariable : Variable {
  std::int64_t constant = 0;  // value at the initial state
};

Variable make_variable(IntRowVector coefficients, const std::vector<std::string>& species);

struct VariableClassification {
  std::vector<std::string> species;
  std::vector<std::string> reactions;
  std::vector<ConservedVariable> conserved;
  std::vector<Variable> slow;
  std::vector<Variable> fast;
  bool negative_conserved = false;  // some conserved vector has a negative entry
  bool block_shape_verified = false;

  std::size_t n_c() const noexcept { return conserved.size(); }
  std::size_t n_s() const noexcept { return slow.size(); }
  std::size_t n_f() const noexcept { return fast.size(); }
  /// Conserved, slow and fast vectors stacked in that order.
  IntMatrix stacked() const;
};

/// Canonical integer basis of {y | y^T S = 0}: identity on the lexicographically
/// first pivot column set giving non-negative rows, or plain reduced form when
/// no such set exists.
std::vector<IntRowVector> conserved_basis(const StoichMatrix& m);

/// Species indices in the order unit vectors are tried.
using Preference = std::vector<std::size_t>;

/// Completes the conserved span to {y | y^T S_f = 0}; returns only the added
/// vectors. Single-species vectors are tried first, in `preference` order
/// (default: species in delta, then declaration order).
std::vector<IntRowVector> slow_basis(const StoichMatrix& m, const EquivConfig& cfg,
                                     const std::vector<IntRowVector>& conserved,
                                     std::optional<Preference> preference = std::nullopt);

/// n - n_c - n_s single-species vectors making the stack nonsingular, tried in
/// `preference` order (default: declaration order).
std::vector<IntRowVector> complete_fast(const StoichMatrix& m,
                                        const std::vector<IntRowVector>& conserved,
                                        const std::vector<IntRowVector>& slow,
                                        std::optional<Preference> preference = std::nullopt);

struct ClassificationOptions {
  /// Overrides both unit-vector preferences with this species order.
  std::optional<std::vector<std::string>> species_preference;
};

/// Full pipeline. Fast variables prefer intermediates, i.e. species produced by
/// a fast reaction that consumes more molecules than it produces, then
/// declaration order.
VariableClassification classify(const SystemDef& sys, const EquivConfig& cfg,
                                const ClassificationOptions& options = {});

/// Whether the reordered matrix has zero conserved rows and zero slow-by-fast block.
bool verify_block_shape(const StoichMatrix& m, const EquivConfig& cfg,
                        const VariableClassification& cls);

/// States rewritten as (slow values, fast values). Throws Error(StateCollision)
/// if two reachable states share coordinates or a conserved value varies.
Lts transform_lts(const Lts& lts, const VariableClassification& cls);

struct SufficiencyReport {
  bool applicable = false;
  std::vector<std::string> reasons;  // each failed condition
};

SufficiencyReport slow_sufficiency(const VariableClassification& a, const VariableClassification& b,
                                   const EquivConfig& cfg);

struct ShortcutResult {
  VariableClassification cls_a, cls_b;
  SufficiencyReport sufficiency;
  std::optional<std::string> rejection;  // relation refused before checking
  Lts lts_a, lts_b;                      // original transition systems
  Lts transformed_a, transformed_b;
  PairRelation lifted;                   // same indices in original and transformed systems
  CheckOutcome slow;                     // slow check on the transformed systems
  CheckOutcome cross_check;              // fast-slow check on the original systems

  bool certified() const {
    return sufficiency.applicable && !rejection && slow.equivalent() && cross_check.equivalent();
  }
};

/// Classify, transform, lift a slow-coordinate relation and check it. The
/// relation's first vector is (slow, fast) coordinates of a, the second the
/// slow coordinates of b.
ShortcutResult shortcut_check(const SystemDef& a, const SystemDef& b, const EquivConfig& cfg,
                              const std::vector<std::pair<State, State>>& relation,
                              std::size_t state_limit = kDefaultStateLimit);

}  // namespace fastslow
