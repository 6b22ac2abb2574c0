// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fastslow/classification.hpp"
#include "fastslow/equivalence.hpp"
#include "fastslow/error.hpp"
#include "fastslow/lts_io.hpp"
#include "fastslow/parser.hpp"
#include "support/fixtures.hpp"
#include "support/inhibition.hpp"
#include "support/oracles.hpp"
#include "support/random_model.hpp"

using namespace fastslow;
using namespace fastslow::testing;

namespace {

// Collects failed expectations for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  void note(std::string n) { notes.push_back(std::move(n)); }
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<void(Check&)> body;
};

bool run(const Criterion& c) {
  Check check;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.body(check);
  } catch (const std::exception& e) {
    check.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > c.budget_s) {
    check.failures.push_back("took " + std::to_string(secs) + " s, budget " + std::to_string(c.budget_s) + " s");
  }
  const bool ok = check.failures.empty();
  std::printf("[%s] criterion %d: %s (%.3f s)\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), secs);
  for (const auto& n : check.notes) std::printf("       %s\n", n.c_str());
  for (const auto& f : check.failures) std::printf("       - %s\n", f.c_str());
  std::fflush(stdout);
  return ok;
}

std::size_t count_action(const Lts& lts, const std::string& a) {
  std::size_t n = 0;
  for (const auto& t : lts.transitions) n += t.label.action == a;
  return n;
}

const int kParams[3][3] = {{5, 3, 0}, {3, 2, 2}, {2, 2, 3}};

std::string param_name(const int* p) {
  return "(" + std::to_string(p[0]) + "," + std::to_string(p[1]) + "," + std::to_string(p[2]) + ")";
}

// ---- criterion 1 ----------------------------------------------------------

void transition_systems(Check& c) {
  const Lts full = build_lts(fixture_model("inhibition.model"));
  c.expect(full.num_states() == 18, "Sys has " + std::to_string(full.num_states()) + " states, want 18");
  const Lts reduced = build_lts(fixture_model("inhibition_reduced.model"));
  c.expect(reduced.num_states() == 6, "Sys' has " + std::to_string(reduced.num_states()) + " states, want 6");
  c.expect(reduced.transitions.size() == 5 && count_action(reduced, "g") == 5,
           "Sys' should have exactly 5 g-transitions");
  // chain: each state has at most one successor, walking from the initial state
  std::size_t at = reduced.initial;
  std::vector<State> walk{reduced.states[at]};
  while (!reduced.outgoing[at].empty()) {
    c.expect(reduced.outgoing[at].size() == 1, "Sys' branches at " + to_string(reduced.states[at]));
    at = reduced.transitions[reduced.outgoing[at].front()].dst;
    walk.push_back(reduced.states[at]);
    if (walk.size() > 10) break;
  }
  c.expect(walk.size() == 6, "Sys' chain has " + std::to_string(walk.size()) + " states");
  c.expect(walk.front() == State{{5, 3, 0, 0}}, "Sys' chain starts at " + to_string(walk.front()));
  c.expect(walk.back() == State{{0, 3, 0, 5}}, "Sys' chain ends at " + to_string(walk.back()));
}

// ---- criterion 2 ----------------------------------------------------------

void closed_form_relation(Check& c) {
  const auto cfg = fixture_config("inhibition.cfg");
  for (const auto& p : kParams) {
    const Lts a = build_lts(parse_model(sys_text(p[0], p[1], p[2])));
    const Lts b = build_lts(parse_model(reduced_text(p[0], p[1], p[2])));
    const auto r = resolve_relation(relation_r(p[0], p[1], p[2]), a, b);
    c.expect(r.contains(a.initial, b.initial), param_name(p) + ": R misses the initial pair");
    const auto out = check_fast_slow_relation(r, a, b, cfg);
    c.expect(out.verdict == Verdict::Equivalent,
             param_name(p) + ": R rejected: " + (out.witness ? describe(*out.witness, a, b) : ""));
  }
}

// ---- criterion 3 ----------------------------------------------------------

void largest_relation(Check& c) {
  const auto cfg = fixture_config("inhibition.cfg");
  for (const auto& p : kParams) {
    const Lts a = build_lts(parse_model(sys_text(p[0], p[1], p[2])));
    const Lts b = build_lts(parse_model(reduced_text(p[0], p[1], p[2])));
    const auto res = largest_fast_slow(a, b, cfg);
    c.expect(res.outcome.verdict == Verdict::Equivalent, param_name(p) + ": Sys and Sys' not related");
    c.expect(res.relation.contains(a.initial, b.initial), param_name(p) + ": initial pair missing");
    std::size_t reachable = 0;
    for (const auto& [sa, sb] : relation_r(p[0], p[1], p[2])) {
      auto ia = a.find(sa);
      auto ib = b.find(sb);
      if (!ia || !ib) continue;
      ++reachable;
      c.expect(res.relation.contains(*ia, *ib),
               param_name(p) + ": largest relation lacks " + to_string(sa) + " ~ " + to_string(sb));
    }
    c.expect(reachable > 0, param_name(p) + ": no pair of R is reachable");
  }
}

// ---- criterion 4 ----------------------------------------------------------

void counterexample(Check& c) {
  const auto cfg = fixture_config("counter.cfg");
  const Lts s1 = build_lts(fixture_model("counter_s1.model"));
  const Lts s2 = build_lts(fixture_model("counter_s2.model"));
  const auto alone = largest_fast_slow(s1, s2, cfg);
  c.expect(alone.outcome.verdict == Verdict::Equivalent, "S1(0) and S2(0) should be fast-slow bisimilar");

  const auto shared = shared_fast_actions(fixture_model("counter_s1.model"), fixture_model("counter_context.model"), cfg);
  c.expect(shared == std::set<std::string>{"alpha"}, "shared fast actions with S should be {alpha}");

  const Lts p = build_lts(fixture_model("counter_s1_ctx.model"));
  const Lts q = build_lts(fixture_model("counter_s2_ctx.model"));
  const auto composed = largest_fast_slow(p, q, cfg);
  c.expect(composed.outcome.verdict == Verdict::NotEquivalent, "compositions should not be bisimilar");
  c.expect(composed.outcome.witness && !composed.outcome.witness->trace.empty() &&
               !describe(*composed.outcome.witness, p, q).empty(),
           "no printable witness");

  // the same composition built programmatically agrees with the fixture
  const auto probe = congruence_probe(fixture_model("counter_s1.model"), fixture_model("counter_s2.model"),
                                      fixture_model("counter_context.model"), cfg);
  c.expect(!probe.side_condition, "side condition should fail");
  c.expect(probe.components.outcome.equivalent() && !probe.composed.outcome.equivalent(),
           "congruence probe verdicts disagree with the direct check");
}

// ---- criterion 5 ----------------------------------------------------------

std::string single(const std::string& name, const std::string& body, int max, int level) {
  return "max " + name + " = " + std::to_string(max) + ";\nspecies " + name + " = " + body + ";\nsystem = " +
         name + "[" + std::to_string(level) + "];\n";
}

void congruence_instance(Check& c) {
  const auto cfg = fixture_config("congruence.cfg");
  const int n = 3;
  const auto ctx = fixture_model("congruence_context.model");
  for (int l = 0; l <= n; ++l) {
    const auto p1 = parse_model(single("C1", "(alpha,1) >> C1", n, l));
    const auto p2 = parse_model(single("C2", "(alpha,1) >> C2 + (beta,1) (+) C2", n, l));
    const auto alone = largest_fast_slow(build_lts(p1), build_lts(p2), cfg);
    c.expect(alone.outcome.equivalent(), "C1(" + std::to_string(l) + ") and C2 not bisimilar");
    const auto probe = congruence_probe(p1, p2, ctx, cfg);
    c.expect(probe.side_condition, "side condition should hold at level " + std::to_string(l));
    c.expect(probe.composed.outcome.equivalent(),
             "compositions with C not bisimilar at level " + std::to_string(l));
  }
}

// ---- criterion 6 ----------------------------------------------------------

linalg::RationalMatrix rows_of(const std::vector<std::vector<int>>& rows) {
  linalg::RationalMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

linalg::RationalMatrix conserved_rows(const VariableClassification& cls) {
  linalg::RationalMatrix m(static_cast<Eigen::Index>(cls.n_c()), static_cast<Eigen::Index>(cls.species.size()));
  for (std::size_t i = 0; i < cls.n_c(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = linalg::to_rational(cls.conserved[i].coefficients);
  }
  return m;
}

std::vector<std::string> species_of(const std::vector<Variable>& vars) {
  std::vector<std::string> out;
  for (const auto& v : vars) out.push_back(v.species.value_or("<" + v.name + ">"));
  return out;
}

void classification(Check& c) {
  const auto cfg = fixture_config("inhibition.cfg");
  const auto full = classify(fixture_model("inhibition.model"), cfg);
  // species order S, E, I, P, EI, SE
  const auto want_full = rows_of({{1, 0, 0, 1, 0, 1}, {0, 1, 0, 0, 1, 1}, {0, 0, 1, 0, 1, 0}});
  c.expect(full.n_c() == 3 && linalg::same_row_span(conserved_rows(full), want_full),
           "Sys conserved span differs from {S+SE+P, E+EI+SE, EI+I}");
  c.expect(species_of(full.slow) == std::vector<std::string>{"P"}, "Sys slow basis should be {P}");
  auto fast = species_of(full.fast);
  std::sort(fast.begin(), fast.end());
  c.expect(fast == std::vector<std::string>{"EI", "SE"}, "Sys fast basis should be {EI, SE}");
  c.expect(full.block_shape_verified, "Sys block shape not verified");

  const auto red = classify(fixture_model("inhibition_reduced.model"), cfg);
  // species order S', E', I', P'
  const auto want_red = rows_of({{1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 1, 0}});
  c.expect(red.n_c() == 3 && linalg::same_row_span(conserved_rows(red), want_red),
           "Sys' conserved span differs from {S'+P', E', I'}");
  c.expect(species_of(red.slow) == std::vector<std::string>{"P'"}, "Sys' slow basis should be {P'}");
  c.expect(red.fast.empty(), "Sys' should have no fast variables");
  c.expect(red.block_shape_verified, "Sys' block shape not verified");
}

// ---- criterion 7 ----------------------------------------------------------

void shortcut(Check& c) {
  const auto cfg = fixture_config("inhibition.cfg");
  const auto json = Json::parse(read_fixture("inhibition_slow_relation.json"));
  const auto res = shortcut_check(fixture_model("inhibition.model"), fixture_model("inhibition_reduced.model"), cfg,
                                  relation_from_json(json));
  c.expect(res.sufficiency.applicable, "slow_sufficiency not applicable");
  for (const auto& r : res.sufficiency.reasons) c.expect(false, "precondition: " + r);
  c.expect(!res.rejection, "relation rejected: " + res.rejection.value_or(""));
  c.expect(res.slow.verdict == Verdict::Equivalent, "R' fails the slow check");
  c.expect(res.cross_check.verdict == Verdict::Equivalent, "lifted relation fails the fast-slow check");
  // lifting R' must give exactly R on the original systems
  const auto direct = resolve_relation(relation_r(5, 3, 0), res.lts_a, res.lts_b);
  c.expect(direct.pairs == res.lifted.pairs, "lifted relation differs from R");
}

// ---- criterion 8 ----------------------------------------------------------

constexpr int kCases = 1000;

int role_delta(Role r, int k) {
  if (r == Role::Reactant) return -k;
  if (r == Role::Product) return k;
  return 0;
}

std::int64_t dot(const IntRowVector& y, const State& s) {
  std::int64_t acc = 0;
  for (Eigen::Index j = 0; j < y.cols(); ++j) acc += y(j) * s[static_cast<std::size_t>(j)];
  return acc;
}

// Reports how much a property suite exercised, also when it stops early.
struct Tally {
  Check& check;
  std::string name;
  std::size_t cases = 0;
  std::size_t states = 0;
  ~Tally() {
    std::string n = name + ": " + std::to_string(cases) + " cases";
    if (states) n += ", " + std::to_string(states) + " states";
    check.note(n);
  }
};

// Random system whose transition system has at least `lo` and fewer than `hi` states.
std::pair<SystemDef, Lts> bounded_system(std::mt19937_64& rng, std::size_t lo, std::size_t hi,
                                          const RandomModelOptions& o = {}) {
  for (;;) {
    auto sys = random_system(rng, o);
    Lts lts;
    try {
      lts = build_lts(sys, hi);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::StateLimitExceeded) throw;
      continue;
    }
    if (lts.num_states() >= lo && lts.num_states() < hi) return {std::move(sys), std::move(lts)};
  }
}

void property_level_delta(Check& c, std::mt19937_64& rng) {
  Tally tally{c, "level delta per transition"};
  for (int i = 0; i < kCases; ++i, ++tally.cases) {
    auto [sys, lts] = bounded_system(rng, 4, 5000);
    tally.states += lts.num_states();
    for (const auto& t : lts.transitions) {
      std::vector<int> delta(lts.species.size(), 0);
      for (const auto& e : t.label.entries) {
        const auto j = static_cast<std::size_t>(
            std::find(lts.species.begin(), lts.species.end(), e.species) - lts.species.begin());
        if (j >= lts.species.size() || e.level != lts.states[t.src][j]) {
          c.expect(false, "label entry " + to_string(e) + " does not match its source state");
          return;
        }
        delta[j] += role_delta(e.role, e.stoich);
      }
      for (std::size_t j = 0; j < delta.size(); ++j) {
        if (lts.states[t.dst][j] - lts.states[t.src][j] != delta[j]) {
          c.expect(false, "level delta mismatch on " + to_string(t.label) + "\n" + render_model(sys));
          return;
        }
      }
    }
  }
}

void property_conserved_and_slow(Check& c, std::mt19937_64& rng) {
  Tally tally{c, "conserved and slow invariants"};
  // stoichiometric invariants assume every action is one synchronised reaction
  RandomModelOptions synchronised;
  synchronised.explicit_coop = 0;
  for (int i = 0; i < kCases; ++i, ++tally.cases) {
    auto [sys, lts] = bounded_system(rng, 4, 5000, synchronised);
    const auto cfg = random_partition(rng, sys.actions());
    tally.states += lts.num_states();
    const auto cls = classify(sys, cfg);
    if (!cls.block_shape_verified) {
      c.expect(false, "block shape not verified\n" + render_model(sys));
      return;
    }
    for (const auto& t : lts.transitions) {
      for (const auto& y : cls.conserved) {
        if (dot(y.coefficients, lts.states[t.src]) != dot(y.coefficients, lts.states[t.dst])) {
          c.expect(false, "conserved " + y.name + " changes\n" + render_model(sys));
          return;
        }
      }
      if (!cfg.is_fast(t.label.action)) continue;
      for (const auto& y : cls.slow) {
        if (dot(y.coefficients, lts.states[t.src]) != dot(y.coefficients, lts.states[t.dst])) {
          c.expect(false, "slow " + y.name + " changes on a fast step\n" + render_model(sys));
          return;
        }
      }
    }
  }
}

std::vector<LabelEntry> random_entries(std::mt19937_64& rng) {
  std::vector<LabelEntry> out;
  const int k = pick(rng, 0, 4);
  for (int i = 0; i < k; ++i) {
    out.push_back({"X" + std::to_string(pick(rng, 0, 3)), static_cast<Role>(pick(rng, 0, 4)), pick(rng, 0, 3),
                   pick(rng, 1, 2)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void property_filter_homomorphism(Check& c, std::mt19937_64& rng) {
  Tally tally{c, "filter homomorphism"};
  for (int i = 0; i < kCases; ++i, ++tally.cases) {
    EquivConfig cfg;
    for (int s = 0; s < 4; ++s) {
      if (pick(rng, 0, 1)) cfg.delta.insert("X" + std::to_string(s));
    }
    if (pick(rng, 0, 1)) cfg.alias["X3"] = "X" + std::to_string(pick(rng, 0, 2));
    const auto w1 = random_entries(rng);
    const auto w2 = random_entries(rng);
    const auto lhs = filter_label({"a", concat(w1, w2)}, cfg);
    const auto rhs = concat(filter_label({"a", w1}, cfg).entries, filter_label({"a", w2}, cfg).entries);
    if (lhs.entries != rhs) {
      c.expect(false, "filter(w1 :: w2) != filter(w1) :: filter(w2)");
      return;
    }
  }
}

void property_closure(Check& c, std::mt19937_64& rng) {
  Tally tally{c, "fast closure vs triple loop"};
  for (int i = 0; i < kCases; ++i, ++tally.cases) {
    auto [sys, lts] = bounded_system(rng, 4, 50);
    tally.states += lts.num_states();
    const auto cfg = random_partition(rng, sys.actions(), 0.6);
    const WeakViews v(lts, cfg);
    const auto oracle = fast_closure_oracle(lts, cfg);
    for (std::size_t s = 0; s < lts.num_states(); ++s) {
      const auto& cl = v.closure(s);
      std::vector<std::size_t> want;
      for (std::size_t t = 0; t < lts.num_states(); ++t) {
        if (oracle[s][t]) want.push_back(t);
      }
      if (cl != want) {
        c.expect(false, "closure differs from the triple-loop oracle\n" + render_model(sys));
        return;
      }
      if (!std::binary_search(cl.begin(), cl.end(), s)) {
        c.expect(false, "closure not reflexive");
        return;
      }
      for (auto m : cl) {
        for (auto t : v.closure(m)) {
          if (!std::binary_search(cl.begin(), cl.end(), t)) {
            c.expect(false, "closure not transitive");
            return;
          }
        }
      }
    }
  }
}

// Two random systems over the same species names so that delta can match.
std::pair<Lts, Lts> random_pair(std::mt19937_64& rng, std::size_t limit, std::set<std::string>& actions,
                                SystemDef* sa = nullptr) {
  auto [a, la] = bounded_system(rng, 3, limit);
  auto [b, lb] = bounded_system(rng, 3, limit);
  actions = a.actions();
  auto more = b.actions();
  actions.insert(more.begin(), more.end());
  if (sa) *sa = a;
  return {std::move(la), std::move(lb)};
}

EquivConfig random_delta(std::mt19937_64& rng, EquivConfig cfg) {
  for (int s = 0; s < 5; ++s) {
    if (pick(rng, 0, 2) == 0) cfg.delta.insert("X" + std::to_string(s));
  }
  return cfg;
}

void property_strong_degeneration(Check& c, std::mt19937_64& rng) {
  Tally tally{c, "no fast actions vs strong bisimilarity"};
  for (int i = 0; i < kCases; ++i, ++tally.cases) {
    std::set<std::string> actions;
    // half the cases compare a system with itself so equivalent verdicts occur too
    auto [a, b] = random_pair(rng, 30, actions);
    if (i % 2 == 0) b = a;
    tally.states += a.num_states() + b.num_states();
    EquivConfig cfg;
    cfg.slow = actions;
    cfg = random_delta(rng, cfg);
    const auto res = largest_fast_slow(a, b, cfg);
    const auto blocks = strong_blocks_oracle(a, b, cfg);
    const std::size_t na = a.num_states();
    for (std::size_t p = 0; p < na; ++p) {
      for (std::size_t q = 0; q < b.num_states(); ++q) {
        if (res.relation.contains(p, q) != (blocks[p] == blocks[na + q])) {
          c.expect(false, "fast-slow with no fast actions differs from strong bisimilarity");
          return;
        }
      }
    }
  }
}

void property_largest(Check& c, std::mt19937_64& rng) {
  Tally tally{c, "largest relation soundness and maximality"};
  for (int i = 0; i < kCases; ++i, ++tally.cases) {
    std::set<std::string> actions;
    auto [a, b] = random_pair(rng, 30, actions);
    if (i % 2 == 0) b = a;
    tally.states += a.num_states() + b.num_states();
    const auto cfg = random_delta(rng, random_partition(rng, actions));
    for (const Game game : {Game::FastSlow, Game::Slow}) {
      auto table = std::make_shared<LabelTable>();
      const WeakViews va(a, cfg, table);
      const WeakViews vb(b, cfg, table);
      const auto res = largest_bisimulation(game, va, vb);
      // soundness
      if (!res.relation.pairs.empty() &&
          check_relation(game, res.relation, va, vb).verdict != Verdict::Equivalent) {
        c.expect(false, "largest relation is not a bisimulation");
        return;
      }
      if (res.outcome.equivalent() != res.relation.contains(a.initial, b.initial)) {
        c.expect(false, "verdict disagrees with the initial pair");
        return;
      }
      // maximality against the naive fixpoint, then by sampled extension
      const auto oracle = largest_oracle(a, b, cfg, game == Game::FastSlow);
      std::vector<std::pair<std::size_t, std::size_t>> outside;
      for (std::size_t p = 0; p < a.num_states(); ++p) {
        for (std::size_t q = 0; q < b.num_states(); ++q) {
          if (res.relation.contains(p, q) != (oracle[p][q] != 0)) {
            c.expect(false, "largest relation differs from the naive fixpoint");
            return;
          }
          if (!oracle[p][q]) outside.emplace_back(p, q);
        }
      }
      std::shuffle(outside.begin(), outside.end(), rng);
      for (std::size_t k = 0; k < std::min<std::size_t>(3, outside.size()); ++k) {
        PairRelation bigger = res.relation;
        bigger.pairs.insert(outside[k]);
        if (check_relation(game, bigger, va, vb).verdict == Verdict::Equivalent) {
          c.expect(false, "largest relation can be extended");
          return;
        }
      }
    }
  }
}

void property_suites(Check& c) {
  std::mt19937_64 rng(20240611);
  property_level_delta(c, rng);
  property_conserved_and_slow(c, rng);
  property_filter_homomorphism(c, rng);
  property_closure(c, rng);
  property_strong_degeneration(c, rng);
  property_largest(c, rng);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "transition systems of Sys and Sys' at (5,3,0)", 1.0, transition_systems},
      {2, "closed-form relation R passes the fast-slow check", 5.0, closed_form_relation},
      {3, "largest fast-slow bisimulation relates Sys and Sys' and contains R", 30.0, largest_relation},
      {4, "counterexample: congruence fails with a shared fast action", 1.0, counterexample},
      {5, "congruence instance with a disjoint context", 1.0, congruence_instance},
      {6, "conserved, slow and fast variables of Sys and Sys'", 1.0, classification},
      {7, "slow-coordinate shortcut certifies R'", 5.0, shortcut},
      {8, "property suites on random models", 120.0, property_suites},
  };
  int failed = 0;
  for (const auto& c : criteria) failed += run(c) ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
