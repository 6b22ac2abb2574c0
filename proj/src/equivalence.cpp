#include "fastslow/equivalence.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "fastslow/error.hpp"

namespace fastslow {

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::Equivalent: return "equivalent";
    case Verdict::NotEquivalent: return "not-equivalent";
    case Verdict::RelationNotABisimulation: return "relation-not-a-bisimulation";
  }
  return "?";
}

std::string describe(const WitnessStep& step, const Lts& a, const Lts& b) {
  const Lts& chal = step.challenger == Side::Left ? a : b;
  const std::size_t from = step.challenger == Side::Left ? step.left : step.right;
  std::ostringstream out;
  out << "at " << to_string(a.states[step.left]) << " ~ " << to_string(b.states[step.right]) << ": "
      << (step.challenger == Side::Left ? "left" : "right") << " ";
  if (step.fast) {
    out << "fast step (" << step.action << ")";
  } else {
    out << "slow step " << to_string(step.filtered);
  }
  out << " " << to_string(chal.states[from]) << " -> " << to_string(chal.states[step.target]);
  if (step.defender_moves == 0) {
    out << " has no matching move";
  } else {
    out << " is answered only outside the relation (" << step.defender_moves << " candidate"
        << (step.defender_moves == 1 ? "" : "s") << ")";
  }
  return out.str();
}

std::string describe(const Witness& w, const Lts& a, const Lts& b) {
  std::string out;
  for (const auto& s : w.trace) {
    if (!out.empty()) out += "\n";
    out += describe(s, a, b);
  }
  if (w.truncated) out += "\n...";
  return out;
}

namespace {

using InRelation = std::function<bool(std::size_t, std::size_t)>;  // (a-state, b-state)

struct Violation {
  WitnessStep step;
  std::optional<std::pair<std::size_t, std::size_t>> next;  // first defence pair, already rejected
};

// Challenges from `chal` at state `c` answered by `def` at state `d`, in either
// the slow or the fast clause. `side` says which of the two systems challenges.
std::optional<Violation> one_side(bool fast_clause, Side side, std::size_t c, std::size_t d,
                                  const WeakViews& chal, const WeakViews& def,
                                  const InRelation& in) {
  auto pair_of = [side](std::size_t cs, std::size_t ds) {
    return side == Side::Left ? std::make_pair(cs, ds) : std::make_pair(ds, cs);
  };
  auto answered = [&](std::size_t target, const std::vector<std::size_t>& defences) {
    return std::any_of(defences.begin(), defences.end(), [&](std::size_t t) {
      auto [pa, pb] = pair_of(target, t);
      return in(pa, pb);
    });
  };
  auto make = [&](bool fast, std::string action, CapabilityLabel filtered, std::size_t target,
                  const std::vector<std::size_t>& defences) {
    Violation v;
    auto [l, r] = pair_of(c, d);
    v.step = {l, r, side, fast, std::move(action), std::move(filtered), target, defences.size()};
    if (!defences.empty()) v.next = pair_of(target, defences.front());
    return v;
  };
  if (fast_clause) {
    const auto& succ = chal.fast_successors(c);
    const auto& defences = def.closure(d);
    for (std::size_t i = 0; i < succ.size(); ++i) {
      if (answered(succ[i], defences)) continue;
      std::string acts;
      for (const auto& a : chal.fast_actions(c)[i]) acts += (acts.empty() ? "" : ",") + a;
      return make(true, acts, {}, succ[i], defences);
    }
    return std::nullopt;
  }
  static const std::vector<std::size_t> kNone;
  for (const auto& st : chal.slow_successors(c)) {
    const auto& weak = def.weak_slow(d);
    auto it = weak.find(st.label);
    const auto& defences = it == weak.end() ? kNone : it->second;
    if (answered(st.target, defences)) continue;
    const auto& lbl = chal.labels().label(st.label);
    return make(false, lbl.action, lbl, st.target, defences);
  }
  return std::nullopt;
}

std::optional<Violation> find_violation(Game game, std::size_t p, std::size_t q, const WeakViews& a,
                                        const WeakViews& b, const InRelation& in) {
  // slow challenges first, so a mismatched slow label is reported before fast drift
  if (auto v = one_side(false, Side::Left, p, q, a, b, in)) return v;
  if (auto v = one_side(false, Side::Right, q, p, b, a, in)) return v;
  if (game == Game::Slow) return std::nullopt;
  if (auto v = one_side(true, Side::Left, p, q, a, b, in)) return v;
  return one_side(true, Side::Right, q, p, b, a, in);
}

void require_shared_table(const WeakViews& a, const WeakViews& b) {
  if (&a.labels() != &b.labels()) {
    throw Error(ErrorKind::Config, "weak views must share one label table");
  }
}

}  // namespace

CheckOutcome check_relation(Game game, const PairRelation& r, const WeakViews& a,
                            const WeakViews& b) {
  require_shared_table(a, b);
  if (r.pairs.empty()) throw Error(ErrorKind::Relation, "relation is empty");
  for (auto [p, q] : r.pairs) {
    if (p >= a.size() || q >= b.size()) {
      throw Error(ErrorKind::IndexOutOfRange, "relation pair (" + std::to_string(p) + ", " +
                                                  std::to_string(q) + ") out of range");
    }
  }
  InRelation in = [&](std::size_t p, std::size_t q) { return r.contains(p, q); };
  for (auto [p, q] : r.pairs) {
    if (auto v = find_violation(game, p, q, a, b, in)) {
      return {Verdict::RelationNotABisimulation, Witness{{v->step}, false}};
    }
  }
  return {Verdict::Equivalent, std::nullopt};
}

namespace {

CheckOutcome check_on_lts(Game game, const PairRelation& r, const Lts& a, const Lts& b,
                          const EquivConfig& cfg) {
  auto table = std::make_shared<LabelTable>();
  WeakViews va(a, cfg, table);
  WeakViews vb(b, cfg, table);
  return check_relation(game, r, va, vb);
}

}  // namespace

CheckOutcome check_fast_slow_relation(const PairRelation& r, const Lts& a, const Lts& b,
                                      const EquivConfig& cfg) {
  return check_on_lts(Game::FastSlow, r, a, b, cfg);
}

CheckOutcome check_slow_relation(const PairRelation& r, const Lts& a, const Lts& b,
                                 const EquivConfig& cfg) {
  return check_on_lts(Game::Slow, r, a, b, cfg);
}

LargestResult largest_bisimulation(Game game, const WeakViews& a, const WeakViews& b,
                                   std::size_t witness_cap) {
  require_shared_table(a, b);
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  std::vector<char> alive(na * nb, 1);
  std::map<std::pair<std::size_t, std::size_t>, Violation> reasons;
  InRelation in = [&](std::size_t p, std::size_t q) { return alive[p * nb + q] != 0; };

  LargestResult result;
  for (;;) {
    ++result.rounds;
    std::vector<std::pair<std::size_t, Violation>> doomed;
    for (std::size_t p = 0; p < na; ++p) {
      for (std::size_t q = 0; q < nb; ++q) {
        if (!alive[p * nb + q]) continue;
        if (auto v = find_violation(game, p, q, a, b, in)) doomed.emplace_back(p * nb + q, std::move(*v));
      }
    }
    if (doomed.empty()) break;
    for (auto& [idx, v] : doomed) {
      alive[idx] = 0;
      reasons.emplace(std::make_pair(idx / nb, idx % nb), std::move(v));
    }
  }
  for (std::size_t p = 0; p < na; ++p) {
    for (std::size_t q = 0; q < nb; ++q) {
      if (alive[p * nb + q]) result.relation.pairs.emplace(p, q);
    }
  }

  const std::size_t ia = a.lts().initial;
  const std::size_t ib = b.lts().initial;
  if (na == 0 || nb == 0 || alive[ia * nb + ib]) return result;

  Witness w;
  std::optional<std::pair<std::size_t, std::size_t>> at = std::make_pair(ia, ib);
  while (at) {
    if (w.trace.size() >= witness_cap) {
      w.truncated = true;
      break;
    }
    const auto& reason = reasons.at(*at);
    w.trace.push_back(reason.step);
    at = reason.next;
  }
  result.outcome = {Verdict::NotEquivalent, std::move(w)};
  return result;
}

namespace {

LargestResult largest_on_lts(Game game, const Lts& a, const Lts& b, const EquivConfig& cfg,
                             std::size_t witness_cap) {
  auto table = std::make_shared<LabelTable>();
  WeakViews va(a, cfg, table);
  WeakViews vb(b, cfg, table);
  return largest_bisimulation(game, va, vb, witness_cap);
}

}  // namespace

LargestResult largest_fast_slow(const Lts& a, const Lts& b, const EquivConfig& cfg,
                                std::size_t witness_cap) {
  return largest_on_lts(Game::FastSlow, a, b, cfg, witness_cap);
}

LargestResult largest_slow(const Lts& a, const Lts& b, const EquivConfig& cfg,
                           std::size_t witness_cap) {
  return largest_on_lts(Game::Slow, a, b, cfg, witness_cap);
}

std::set<std::string> shared_fast_actions(const SystemDef& p, const SystemDef& q,
                                          const EquivConfig& cfg) {
  std::set<std::string> out;
  auto qa = q.actions();
  for (const auto& a : p.actions()) {
    if (cfg.is_fast(a) && qa.count(a)) out.insert(a);
  }
  return out;
}

CongruenceReport congruence_probe(const SystemDef& p1, const SystemDef& p2, const SystemDef& q,
                                  const EquivConfig& cfg, std::size_t state_limit) {
  CongruenceReport rep;
  rep.shared_with_p1 = shared_fast_actions(p1, q, cfg);
  rep.shared_with_p2 = shared_fast_actions(p2, q, cfg);
  rep.side_condition = rep.shared_with_p1.empty() && rep.shared_with_p2.empty();
  rep.lts_p1 = build_lts(p1, state_limit);
  rep.lts_p2 = build_lts(p2, state_limit);
  rep.lts_p1q = build_lts(compose(p1, q), state_limit);
  rep.lts_p2q = build_lts(compose(p2, q), state_limit);
  rep.components = largest_fast_slow(rep.lts_p1, rep.lts_p2, cfg);
  rep.composed = largest_fast_slow(rep.lts_p1q, rep.lts_p2q, cfg);
  return rep;
}

PairRelation resolve_relation(const std::vector<std::pair<State, State>>& vectors, const Lts& a,
                              const Lts& b) {
  PairRelation r;
  for (const auto& [sa, sb] : vectors) {
    auto ia = a.find(sa);
    auto ib = b.find(sb);
    if (!ia || !ib) {
      throw Error(ErrorKind::Relation, "relation vector " + to_string(ia ? sb : sa) +
                                           " names no reachable state");
    }
    r.pairs.emplace(*ia, *ib);
  }
  return r;
}

std::vector<std::pair<State, State>> relation_vectors(const PairRelation& r, const Lts& a,
                                                      const Lts& b) {
  std::vector<std::pair<State, State>> out;
  for (auto [p, q] : r.pairs) out.emplace_back(a.states.at(p), b.states.at(q));
  return out;
}

}  // namespace fastslow
