#include "fastslow/semantics.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <tuple>

#include "fastslow/error.hpp"

namespace fastslow {

std::string to_string(const State& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.levels[i]);
  }
  return out + ")";
}

std::size_t StateHash::operator()(const State& s) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (int v : s.levels) {
    h ^= static_cast<std::size_t>(static_cast<unsigned>(v));
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::string_view role_symbol(Role r) {
  switch (r) {
    case Role::Reactant: return "<<";
    case Role::Product: return ">>";
    case Role::Activator: return "(+)";
    case Role::Inhibitor: return "(-)";
    case Role::GenericModifier: return "(.)";
  }
  return "?";
}

}  // namespace

std::string to_string(const LabelEntry& e) {
  std::ostringstream out;
  out << e.species << ":" << role_symbol(e.role) << "(" << e.level << "," << e.stoich << ")";
  return out.str();
}

std::string to_string(const CapabilityLabel& l) {
  std::string out = l.action + " {";
  for (std::size_t i = 0; i < l.entries.size(); ++i) {
    if (i) out += ", ";
    out += to_string(l.entries[i]);
  }
  return out + "}";
}

std::vector<LabelEntry> concat(const std::vector<LabelEntry>& w1, const std::vector<LabelEntry>& w2) {
  std::vector<LabelEntry> out(w1);
  out.insert(out.end(), w2.begin(), w2.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CapabilityLabel filter_label(const CapabilityLabel& label, const EquivConfig& cfg) {
  CapabilityLabel out{label.action, {}};
  for (const auto& e : label.entries) {
    const auto& name = cfg.canonical(e.species);
    if (cfg.delta.count(name)) out.entries.push_back({name, e.role, e.level, e.stoich});
  }
  std::sort(out.entries.begin(), out.entries.end());
  out.entries.erase(std::unique(out.entries.begin(), out.entries.end()), out.entries.end());
  return out;
}

CapabilitySemantics::CapabilitySemantics(const SystemDef& sys) {
  auto report = validate_system(sys);
  if (!report.empty()) {
    throw Error(ErrorKind::Validation,
                std::string(issue_name(report.front().kind)) + ": " + report.front().message);
  }
  species_ = sys.species_order();
  max_levels_.resize(species_.size());
  initial_.resize(species_.size());
  for (std::size_t i = 0; i < species_.size(); ++i) {
    max_levels_[i] = static_cast<int>(max_level(*sys.find_species(species_[i]), sys.step_size));
  }
  std::vector<std::string> actions;
  root_ = compile(sys, sys.tree, actions);
}

int CapabilitySemantics::compile(const SystemDef& sys, const CompositionTree& t,
                                 std::vector<std::string>& actions_out) {
  CompiledNode node;
  if (t.is_leaf()) {
    const auto& leaf = t.as_leaf();
    auto idx = static_cast<std::size_t>(
        std::find(species_.begin(), species_.end(), leaf.species) - species_.begin());
    initial_[idx] = leaf.level;
    const auto* def = sys.find_species(leaf.species);
    leaves_.push_back({idx, def->prefixes});
    node.leaf = static_cast<int>(leaves_.size() - 1);
    auto acts = def->actions();
    actions_out.assign(acts.begin(), acts.end());
  } else {
    const auto& n = t.as_node();
    std::vector<std::string> left_actions;
    std::vector<std::string> right_actions;
    node.left = compile(sys, *n.left, left_actions);
    node.right = compile(sys, *n.right, right_actions);
    if (n.coop.shared_all) {
      std::set_intersection(left_actions.begin(), left_actions.end(), right_actions.begin(),
                            right_actions.end(), std::back_inserter(node.sync));
    } else {
      node.sync.assign(n.coop.actions.begin(), n.coop.actions.end());
    }
    std::set_union(left_actions.begin(), left_actions.end(), right_actions.begin(),
                   right_actions.end(), std::back_inserter(actions_out));
  }
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size() - 1);
}

State CapabilitySemantics::initial_state() const { return State{initial_}; }

bool CapabilitySemantics::in_bounds(const State& s) const {
  if (s.size() != species_.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] > max_levels_[i]) return false;
  }
  return true;
}

std::vector<CapabilitySemantics::Partial> CapabilitySemantics::derive(int id, const State& s) const {
  const auto& node = nodes_[static_cast<std::size_t>(id)];
  std::vector<Partial> out;
  if (node.leaf >= 0) {
    const auto& rule = leaves_[static_cast<std::size_t>(node.leaf)];
    const int l = s[rule.species];
    const int top = max_levels_[rule.species];
    for (const auto& p : rule.prefixes) {
      const int k = p.stoich;
      int next = l;
      bool enabled = false;
      switch (p.role) {
        case Role::Reactant:  // prefixReac: k <= l <= N
          enabled = k <= l && l <= top;
          next = l - k;
          break;
        case Role::Product:  // prefixProd: 0 <= l <= N - k
          enabled = 0 <= l && l <= top - k;
          next = l + k;
          break;
        case Role::Activator:
          enabled = k <= l && l <= top;
          break;
        case Role::Inhibitor:
        case Role::GenericModifier:
          enabled = 0 <= l && l <= top;
          break;
      }
      if (!enabled) continue;
      out.push_back({p.action, {{species_[rule.species], p.role, l, k}}, {{rule.species, next}}});
    }
    return out;
  }
  auto left = derive(node.left, s);
  auto right = derive(node.right, s);
  auto synced = [&](const std::string& a) {
    return std::binary_search(node.sync.begin(), node.sync.end(), a);
  };
  for (auto& p : left) {
    if (!synced(p.action)) out.push_back(p);
  }
  for (auto& q : right) {
    if (!synced(q.action)) out.push_back(q);
  }
  for (const auto& p : left) {
    if (!synced(p.action)) continue;
    for (const auto& q : right) {
      if (q.action != p.action) continue;
      Partial joint{p.action, concat(p.entries, q.entries), p.updates};
      joint.updates.insert(joint.updates.end(), q.updates.begin(), q.updates.end());
      out.push_back(std::move(joint));
    }
  }
  return out;
}

std::vector<Successor> CapabilitySemantics::step(const State& s) const {
  std::vector<Successor> out;
  for (auto& p : derive(root_, s)) {
    State target = s;
    for (auto [idx, level] : p.updates) target.levels[idx] = level;
    std::sort(p.entries.begin(), p.entries.end());
    out.push_back({{std::move(p.action), std::move(p.entries)}, std::move(target)});
  }
  return out;
}

std::vector<Successor> step(const SystemDef& sys, const State& s) {
  return CapabilitySemantics(sys).step(s);
}

std::optional<std::size_t> Lts::find(const State& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> Lts::actions() const {
  std::set<std::string> out;
  for (const auto& t : transitions) out.insert(t.label.action);
  return out;
}

void Lts::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < states.size(); ++i) index_.emplace(states[i], i);
  outgoing.assign(states.size(), {});
  for (std::size_t t = 0; t < transitions.size(); ++t) {
    if (transitions[t].src >= states.size() || transitions[t].dst >= states.size()) {
      throw Error(ErrorKind::IndexOutOfRange, "transition endpoint outside the state set");
    }
    outgoing[transitions[t].src].push_back(t);
  }
}

Lts build_lts(const SystemDef& sys, std::size_t state_limit) {
  CapabilitySemantics sem(sys);
  Lts lts;
  lts.species = sem.species();
  std::unordered_map<State, std::size_t, StateHash> seen;
  auto add_state = [&](const State& s) {
    auto [it, inserted] = seen.emplace(s, lts.states.size());
    if (inserted) {
      if (lts.states.size() >= state_limit) {
        throw Error(ErrorKind::StateLimitExceeded,
                    "state-space-limit-exceeded: more than " + std::to_string(state_limit) + " states");
      }
      lts.states.push_back(s);
    }
    return it->second;
  };
  lts.initial = add_state(sem.initial_state());
  for (std::size_t cur = 0; cur < lts.states.size(); ++cur) {
    auto succ = sem.step(lts.states[cur]);
    std::sort(succ.begin(), succ.end(), [](const Successor& a, const Successor& b) {
      return std::tie(a.target, a.label) < std::tie(b.target, b.label);
    });
    for (auto& s : succ) {
      const std::size_t dst = add_state(s.target);
      lts.transitions.push_back({cur, std::move(s.label), dst});
    }
  }
  lts.reindex();
  return lts;
}

int LabelTable::intern(const CapabilityLabel& label) {
  auto [it, inserted] = ids_.emplace(label, static_cast<int>(labels_.size()));
  if (inserted) labels_.push_back(label);
  return it->second;
}

WeakViews::WeakViews(const Lts& lts, const EquivConfig& cfg)
    : WeakViews(lts, cfg, std::make_shared<LabelTable>()) {}

WeakViews::WeakViews(const Lts& lts, const EquivConfig& cfg, std::shared_ptr<LabelTable> labels)
    : lts_(&lts), labels_(std::move(labels)) {
  for (const auto& a : cfg.fast) {
    if (cfg.slow.count(a)) throw Error(ErrorKind::Config, "action-in-both-classes: " + a);
  }
  const std::size_t n = lts.num_states();
  fast_.assign(n, {});
  fast_actions_.assign(n, {});
  slow_.assign(n, {});
  closure_.assign(n, std::nullopt);
  weak_slow_.assign(n, std::nullopt);
  for (std::size_t t = 0; t < lts.transitions.size(); ++t) {
    const auto& tr = lts.transitions[t];
    const auto& action = tr.label.action;
    if (cfg.is_fast(action)) {
      auto& succ = fast_[tr.src];
      auto it = std::find(succ.begin(), succ.end(), tr.dst);
      if (it == succ.end()) {
        succ.push_back(tr.dst);
        fast_actions_[tr.src].push_back({action});
      } else {
        fast_actions_[tr.src][static_cast<std::size_t>(it - succ.begin())].push_back(action);
      }
    } else if (cfg.is_slow(action)) {
      slow_[tr.src].push_back({labels_->intern(filter_label(tr.label, cfg)), tr.dst, t});
    } else {
      throw Error(ErrorKind::UnpartitionedAction, "unpartitioned-action: " + action);
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    // keep fast_actions_ aligned while sorting fast_ by target
    std::vector<std::size_t> order(fast_[s].size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fast_[s][a] < fast_[s][b]; });
    std::vector<std::size_t> targets;
    std::vector<std::vector<std::string>> acts;
    for (auto i : order) {
      targets.push_back(fast_[s][i]);
      acts.push_back(fast_actions_[s][i]);
    }
    fast_[s] = std::move(targets);
    fast_actions_[s] = std::move(acts);
  }
}

const std::vector<std::size_t>& WeakViews::closure(std::size_t s) const {
  auto& slot = closure_.at(s);
  if (!slot) {
    std::vector<char> seen(fast_.size(), 0);
    std::vector<std::size_t> out{s};
    seen[s] = 1;
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (auto nxt : fast_[out[i]]) {
        if (!seen[nxt]) {
          seen[nxt] = 1;
          out.push_back(nxt);
        }
      }
    }
    std::sort(out.begin(), out.end());
    slot = std::move(out);
  }
  return *slot;
}

const std::map<int, std::vector<std::size_t>>& WeakViews::weak_slow(std::size_t s) const {
  auto& slot = weak_slow_.at(s);
  if (!slot) {
    std::map<int, std::vector<std::size_t>> out;
    for (auto u : closure(s)) {
      for (const auto& st : slow_[u]) {
        const auto& after = closure(st.target);
        auto& bucket = out[st.label];
        bucket.insert(bucket.end(), after.begin(), after.end());
      }
    }
    for (auto& [label, targets] : out) {
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    }
    slot = std::move(out);
  }
  return *slot;
}

}  // namespace fastslow
