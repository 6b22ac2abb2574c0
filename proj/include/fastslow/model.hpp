#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fastslow {

/// Role a species plays in a reaction. Only reactants and products change levels.
enum class Role { Reactant, Product, Activator, Inhibitor, GenericModifier };

bool changes_level(Role role) noexcept;
std::string_view role_name(Role role) noexcept;
std::optional<Role> role_from_name(std::string_view name) noexcept;

struct Prefix {
  std::string action;
  int stoich = 1;
  Role role = Role::Reactant;

  friend bool operator==(const Prefix&, const Prefix&) = default;
};

/// Sequential component `C = sum_i (a_i, k_i) op_i C` with its molecule-count ceiling.
struct SpeciesDef {
  std::string name;
  std::vector<Prefix> prefixes;
  std::int64_t max_count = 1;

  std::set<std::string> actions() const;

  friend bool operator==(const SpeciesDef&, const SpeciesDef&) = default;
};

struct Cooperation {
  bool shared_all = true;
  std::set<std::string> actions;  // only meaningful when !shared_all

  static Cooperation all() { return {}; }
  static Cooperation over(std::set<std::string> actions) { return {false, std::move(actions)}; }

  friend bool operator==(const Cooperation&, const Cooperation&) = default;
};

/// Model component: either a species leaf `S(l)` or `P <L> Q`. Immutable; children are shared.
class CompositionTree {
 public:
  struct Leaf {
    std::string species;
    int level = 0;
  };
  struct Node {
    std::shared_ptr<const CompositionTree> left;
    Cooperation coop;
    std::shared_ptr<const CompositionTree> right;
  };

  static CompositionTree leaf(std::string species, int level);
  static CompositionTree node(CompositionTree left, Cooperation coop, CompositionTree right);

  bool is_leaf() const noexcept { return std::holds_alternative<Leaf>(repr_); }
  const Leaf& as_leaf() const { return std::get<Leaf>(repr_); }
  const Node& as_node() const { return std::get<Node>(repr_); }

  /// Leaves from left to right.
  std::vector<Leaf> leaves() const;

  friend bool operator==(const CompositionTree& a, const CompositionTree& b);

 private:
  explicit CompositionTree(std::variant<Leaf, Node> repr) : repr_(std::move(repr)) {}
  std::variant<Leaf, Node> repr_;
};

/// A parsed Bio-PEPA system with levels (single implicit compartment).
struct SystemDef {
  std::vector<SpeciesDef> species;  // declaration order
  CompositionTree tree = CompositionTree::leaf("", 0);
  std::int64_t step_size = 1;
  std::map<std::string, std::string> params;
  std::map<std::string, std::string> rates;

  const SpeciesDef* find_species(std::string_view name) const;

  /// Names of the species used in the composition, in declaration order.
  std::vector<std::string> species_order() const;

  /// All action names of the species used in the composition.
  std::set<std::string> actions() const;

  friend bool operator==(const SystemDef&, const SystemDef&) = default;
};

enum class IssueKind {
  DuplicateAction,
  EmptyDefinition,
  NonPositiveStoich,
  NonPositiveMax,
  RepeatedSpecies,
  UndeclaredSpecies,
  DanglingCoopAction,
  LevelOutOfRange,
  NonPositiveStep,
};

struct ValidationIssue {
  IssueKind kind;
  std::string subject;  // species or action name the issue is about
  std::string message;
};

using ValidationReport = std::vector<ValidationIssue>;

std::string_view issue_name(IssueKind kind) noexcept;

ValidationReport validate_species(const SpeciesDef& def);
ValidationReport validate_system(const SystemDef& sys);

/// Highest level of a species: ceil(M / H).
std::int64_t max_level(const SpeciesDef& def, std::int64_t step_size);
std::int64_t max_level(std::int64_t max_count, std::int64_t step_size);

/// Name given to the extension of `a` by `b`.
std::string extension_name(std::string_view a, std::string_view b);

/// A{B}: a's prefixes followed by b's, under the synthesized name "A{B}".
/// Throws Error(OverlappingActions) when the action sets intersect.
SpeciesDef extend_species(const SpeciesDef& a, const SpeciesDef& b);

/// p <*> q with merged context. Throws Error(RepeatedSpecies) on name clash,
/// Error(Validation) if the result is not well-defined.
SystemDef compose(const SystemDef& p, const SystemDef& q);

}  // namespace fastslow
