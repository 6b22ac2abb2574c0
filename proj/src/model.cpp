#include "fastslow/model.hpp"

#include <algorithm>
#include <sstream>

#include "fastslow/error.hpp"

namespace fastslow {

bool changes_level(Role role) noexcept {
  return role == Role::Reactant || role == Role::Product;
}

std::string_view role_name(Role role) noexcept {
  switch (role) {
    case Role::Reactant: return "reactant";
    case Role::Product: return "product";
    case Role::Activator: return "activator";
    case Role::Inhibitor: return "inhibitor";
    case Role::GenericModifier: return "modifier";
  }
  return "?";
}

std::optional<Role> role_from_name(std::string_view name) noexcept {
  for (Role r : {Role::Reactant, Role::Product, Role::Activator, Role::Inhibitor,
                 Role::GenericModifier}) {
    if (role_name(r) == name) return r;
  }
  return std::nullopt;
}

std::set<std::string> SpeciesDef::actions() const {
  std::set<std::string> out;
  for (const auto& p : prefixes) out.insert(p.action);
  return out;
}

CompositionTree CompositionTree::leaf(std::string species, int level) {
  return CompositionTree(Leaf{std::move(species), level});
}

CompositionTree CompositionTree::node(CompositionTree left, Cooperation coop,
                                      CompositionTree right) {
  return CompositionTree(Node{std::make_shared<const CompositionTree>(std::move(left)),
                              std::move(coop),
                              std::make_shared<const CompositionTree>(std::move(right))});
}

std::vector<CompositionTree::Leaf> CompositionTree::leaves() const {
  std::vector<Leaf> out;
  std::vector<const CompositionTree*> stack{this};
  while (!stack.empty()) {
    const auto* t = stack.back();
    stack.pop_back();
    if (t->is_leaf()) {
      out.push_back(t->as_leaf());
    } else {
      stack.push_back(t->as_node().right.get());
      stack.push_back(t->as_node().left.get());
    }
  }
  return out;
}

bool operator==(const CompositionTree& a, const CompositionTree& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) {
    return a.as_leaf().species == b.as_leaf().species && a.as_leaf().level == b.as_leaf().level;
  }
  const auto& na = a.as_node();
  const auto& nb = b.as_node();
  return na.coop == nb.coop && *na.left == *nb.left && *na.right == *nb.right;
}

const SpeciesDef* SystemDef::find_species(std::string_view name) const {
  auto it = std::find_if(species.begin(), species.end(),
                         [&](const SpeciesDef& s) { return s.name == name; });
  return it == species.end() ? nullptr : &*it;
}

std::vector<std::string> SystemDef::species_order() const {
  std::set<std::string> used;
  for (const auto& l : tree.leaves()) used.insert(l.species);
  std::vector<std::string> out;
  for (const auto& s : species) {
    if (used.count(s.name) && std::find(out.begin(), out.end(), s.name) == out.end()) {
      out.push_back(s.name);
    }
  }
  return out;
}

std::set<std::string> SystemDef::actions() const {
  std::set<std::string> out;
  for (const auto& name : species_order()) {
    auto a = find_species(name)->actions();
    out.insert(a.begin(), a.end());
  }
  return out;
}

std::string_view issue_name(IssueKind kind) noexcept {
  switch (kind) {
    case IssueKind::DuplicateAction: return "duplicate-action";
    case IssueKind::EmptyDefinition: return "empty-definition";
    case IssueKind::NonPositiveStoich: return "non-positive-stoichiometry";
    case IssueKind::NonPositiveMax: return "non-positive-max";
    case IssueKind::RepeatedSpecies: return "repeated-species";
    case IssueKind::UndeclaredSpecies: return "undeclared-species";
    case IssueKind::DanglingCoopAction: return "dangling-coop-action";
    case IssueKind::LevelOutOfRange: return "level-out-of-range";
    case IssueKind::NonPositiveStep: return "non-positive-step";
  }
  return "?";
}

ValidationReport validate_species(const SpeciesDef& def) {
  ValidationReport report;
  if (def.prefixes.empty()) {
    report.push_back({IssueKind::EmptyDefinition, def.name,
                      "species " + def.name + " has no summands"});
  }
  std::set<std::string> seen;
  std::set<std::string> reported;
  for (const auto& p : def.prefixes) {
    if (p.stoich < 1) {
      report.push_back({IssueKind::NonPositiveStoich, p.action,
                        "stoichiometry of " + p.action + " in " + def.name + " must be >= 1"});
    }
    if (!seen.insert(p.action).second && reported.insert(p.action).second) {
      report.push_back({IssueKind::DuplicateAction, p.action,
                        "action " + p.action + " occurs more than once in " + def.name});
    }
  }
  if (def.max_count < 1) {
    report.push_back({IssueKind::NonPositiveMax, def.name,
                      "maximum count of " + def.name + " must be >= 1"});
  }
  return report;
}

namespace {

std::set<std::string> subtree_actions(const SystemDef& sys, const CompositionTree& t) {
  std::set<std::string> out;
  for (const auto& l : t.leaves()) {
    if (const auto* s = sys.find_species(l.species)) {
      auto a = s->actions();
      out.insert(a.begin(), a.end());
    }
  }
  return out;
}

void check_cooperation_sets(const SystemDef& sys, const CompositionTree& t,
                            ValidationReport& report) {
  if (t.is_leaf()) return;
  const auto& n = t.as_node();
  if (!n.coop.shared_all) {
    auto left = subtree_actions(sys, *n.left);
    auto right = subtree_actions(sys, *n.right);
    for (const auto& a : n.coop.actions) {
      if (!left.count(a) || !right.count(a)) {
        report.push_back({IssueKind::DanglingCoopAction, a,
                          "cooperation action " + a + " does not occur on both sides"});
      }
    }
  }
  check_cooperation_sets(sys, *n.left, report);
  check_cooperation_sets(sys, *n.right, report);
}

}  // namespace

ValidationReport validate_system(const SystemDef& sys) {
  ValidationReport report;
  if (sys.step_size < 1) {
    report.push_back({IssueKind::NonPositiveStep, "step", "step size must be >= 1"});
  }
  std::set<std::string> declared;
  for (const auto& s : sys.species) {
    if (!declared.insert(s.name).second) {
      report.push_back({IssueKind::RepeatedSpecies, s.name,
                        "species " + s.name + " is declared more than once"});
    }
  }
  std::set<std::string> used;
  for (const auto& leaf : sys.tree.leaves()) {
    if (!used.insert(leaf.species).second) {
      report.push_back({IssueKind::RepeatedSpecies, leaf.species,
                        "species " + leaf.species + " appears more than once in the system"});
      continue;
    }
    const auto* def = sys.find_species(leaf.species);
    if (def == nullptr) {
      report.push_back({IssueKind::UndeclaredSpecies, leaf.species,
                        "species " + leaf.species + " is not declared"});
      continue;
    }
    auto issues = validate_species(*def);
    report.insert(report.end(), issues.begin(), issues.end());
    if (def->max_count >= 1 && sys.step_size >= 1) {
      auto top = max_level(*def, sys.step_size);
      if (leaf.level < 0 || leaf.level > top) {
        std::ostringstream msg;
        msg << "initial level " << leaf.level << " of " << leaf.species << " outside 0.." << top;
        report.push_back({IssueKind::LevelOutOfRange, leaf.species, msg.str()});
      }
    }
  }
  check_cooperation_sets(sys, sys.tree, report);
  return report;
}

std::int64_t max_level(std::int64_t max_count, std::int64_t step_size) {
  if (step_size < 1) throw Error(ErrorKind::Validation, "step size must be >= 1");
  if (max_count <= 0) return 0;
  return (max_count + step_size - 1) / step_size;
}

std::int64_t max_level(const SpeciesDef& def, std::int64_t step_size) {
  return max_level(def.max_count, step_size);
}

std::string extension_name(std::string_view a, std::string_view b) {
  std::string out(a);
  out += '{';
  out += b;
  out += '}';
  return out;
}

SpeciesDef extend_species(const SpeciesDef& a, const SpeciesDef& b) {
  std::set<std::string> overlap;
  auto bs = b.actions();
  for (const auto& act : a.actions()) {
    if (bs.count(act)) overlap.insert(act);
  }
  if (!overlap.empty()) {
    std::string msg = "overlapping-actions:";
    for (const auto& o : overlap) msg += " " + o;
    throw Error(ErrorKind::OverlappingActions, msg);
  }
  SpeciesDef out{extension_name(a.name, b.name), a.prefixes, a.max_count};
  out.prefixes.insert(out.prefixes.end(), b.prefixes.begin(), b.prefixes.end());
  return out;
}

SystemDef compose(const SystemDef& p, const SystemDef& q) {
  for (const auto& s : q.species) {
    if (p.find_species(s.name) != nullptr) {
      throw Error(ErrorKind::RepeatedSpecies, "repeated-species: " + s.name);
    }
  }
  if (p.step_size != q.step_size) {
    throw Error(ErrorKind::Validation, "composed systems must share one step size");
  }
  SystemDef out;
  out.species = p.species;
  out.species.insert(out.species.end(), q.species.begin(), q.species.end());
  out.tree = CompositionTree::node(p.tree, Cooperation::all(), q.tree);
  out.step_size = p.step_size;
  out.params = p.params;
  out.rates = p.rates;
  for (const auto& [k, v] : q.params) out.params.emplace(k, v);
  for (const auto& [k, v] : q.rates) out.rates.emplace(k, v);
  auto report = validate_system(out);
  if (!report.empty()) {
    throw Error(ErrorKind::Validation, std::string(issue_name(report.front().kind)) + ": " +
                                           report.front().message);
  }
  return out;
}

}  // namespace fastslow
