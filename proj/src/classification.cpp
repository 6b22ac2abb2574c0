#include "fastslow/classification.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fastslow/error.hpp"

namespace fastslow {

using linalg::Rational;
using linalg::RationalMatrix;

StoichMatrix stoich_matrix(const SystemDef& sys) {
  StoichMatrix m;
  m.species = sys.species_order();
  for (const auto& name : m.species) {
    for (const auto& p : sys.find_species(name)->prefixes) {
      if (std::find(m.reactions.begin(), m.reactions.end(), p.action) == m.reactions.end()) {
        m.reactions.push_back(p.action);
      }
    }
  }
  m.entries = IntMatrix::Zero(static_cast<Eigen::Index>(m.species.size()),
                              static_cast<Eigen::Index>(m.reactions.size()));
  for (std::size_t i = 0; i < m.species.size(); ++i) {
    for (const auto& p : sys.find_species(m.species[i])->prefixes) {
      auto j = std::find(m.reactions.begin(), m.reactions.end(), p.action) - m.reactions.begin();
      std::int64_t v = 0;
      if (p.role == Role::Reactant) v = -p.stoich;
      if (p.role == Role::Product) v = p.stoich;
      m.entries(static_cast<Eigen::Index>(i), j) = v;
    }
  }
  return m;
}

namespace {

IntMatrix select_columns(const StoichMatrix& m, const EquivConfig& cfg, bool fast) {
  std::vector<Eigen::Index> cols;
  for (std::size_t j = 0; j < m.reactions.size(); ++j) {
    if (cfg.is_fast(m.reactions[j]) == fast) cols.push_back(static_cast<Eigen::Index>(j));
  }
  IntMatrix out(m.entries.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = m.entries.col(cols[k]);
  }
  return out;
}

RationalMatrix stack_rows(const std::vector<IntRowVector>& rows, Eigen::Index n) {
  RationalMatrix out(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = linalg::to_rational(rows[i]);
  }
  return out;
}

RationalMatrix unit_row(Eigen::Index n, std::size_t i) {
  RationalMatrix e = RationalMatrix::Zero(1, n);
  e(0, static_cast<Eigen::Index>(i)) = 1;
  return e;
}

bool non_negative(const RationalMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) < 0) return false;
    }
  }
  return true;
}

// Calls f on each k-subset of {0..n-1} in lexicographic order until it returns true.
template <typename F>
bool for_each_subset(Eigen::Index n, Eigen::Index k, std::size_t budget, F&& f) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (std::size_t seen = 0; seen < budget; ++seen) {
    if (f(idx)) return true;
    Eigen::Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return false;
}

constexpr std::size_t kPivotSearchBudget = 20000;

std::vector<IntRowVector> to_rows(const IntMatrix& m) {
  std::vector<IntRowVector> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m.row(i));
  return out;
}

std::string term(std::int64_t c, const std::string& name, bool first) {
  std::string out;
  if (c < 0) {
    out += "-";
  } else if (!first) {
    out += "+";
  }
  if (c != 1 && c != -1) out += std::to_string(c < 0 ? -c : c);
  return out + name;
}

}  // namespace

IntMatrix fast_columns(const StoichMatrix& m, const EquivConfig& cfg) {
  return select_columns(m, cfg, true);
}

IntMatrix slow_columns(const StoichMatrix& m, const EquivConfig& cfg) {
  return select_columns(m, cfg, false);
}

Variable make_variable(IntRowVector coefficients, const std::vector<std::string>& species) {
  Variable v;
  std::string name;
  std::size_t nonzero = 0;
  std::size_t last = 0;
  for (Eigen::Index j = 0; j < coefficients.cols(); ++j) {
    const auto c = coefficients(j);
    if (c == 0) continue;
    name += term(c, species[static_cast<std::size_t>(j)], nonzero == 0);
    ++nonzero;
    last = static_cast<std::size_t>(j);
  }
  if (nonzero == 1 && coefficients(static_cast<Eigen::Index>(last)) == 1) v.species = species[last];
  v.name = name.empty() ? "0" : name;
  v.coefficients = std::move(coefficients);
  return v;
}

IntMatrix VariableClassification::stacked() const {
  const auto n = static_cast<Eigen::Index>(species.size());
  IntMatrix out(static_cast<Eigen::Index>(n_c() + n_s() + n_f()), n);
  Eigen::Index r = 0;
  for (const auto& v : conserved) out.row(r++) = v.coefficients;
  for (const auto& v : slow) out.row(r++) = v.coefficients;
  for (const auto& v : fast) out.row(r++) = v.coefficients;
  return out;
}

std::vector<IntRowVector> conserved_basis(const StoichMatrix& m) {
  const RationalMatrix basis = linalg::left_null_space(linalg::to_rational(m.entries));
  const Eigen::Index r = basis.rows();
  const Eigen::Index n = basis.cols();
  if (r == 0) return {};
  RationalMatrix canonical = linalg::rref(basis).reduced;
  if (!non_negative(canonical)) {
    for_each_subset(n, r, kPivotSearchBudget, [&](const std::vector<Eigen::Index>& cols) {
      // put the chosen columns first so their pivots are taken before any other
      std::vector<Eigen::Index> order(cols);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::find(cols.begin(), cols.end(), j) == cols.end()) order.push_back(j);
      }
      RationalMatrix permuted(r, n);
      for (Eigen::Index j = 0; j < n; ++j) permuted.col(j) = basis.col(order[static_cast<std::size_t>(j)]);
      auto ech = linalg::rref(permuted);
      for (Eigen::Index i = 0; i < r; ++i) {
        if (ech.pivots[static_cast<std::size_t>(i)] != i) return false;
      }
      if (!non_negative(ech.reduced)) return false;
      RationalMatrix back(r, n);
      for (Eigen::Index j = 0; j < n; ++j) back.col(order[static_cast<std::size_t>(j)]) = ech.reduced.col(j);
      canonical = back;
      return true;
    });
  }
  return to_rows(linalg::primitive_rows(canonical));
}

namespace {

Preference delta_first(const StoichMatrix& m, const EquivConfig& cfg) {
  Preference out;
  for (std::size_t i = 0; i < m.species.size(); ++i) {
    if (cfg.delta.count(cfg.canonical(m.species[i]))) out.push_back(i);
  }
  for (std::size_t i = 0; i < m.species.size(); ++i) {
    if (!cfg.delta.count(cfg.canonical(m.species[i]))) out.push_back(i);
  }
  return out;
}

// Species formed by an associating fast reaction (more reactant than product molecules).
std::vector<char> intermediates(const StoichMatrix& m, const EquivConfig& cfg) {
  std::vector<char> out(m.species.size(), 0);
  for (std::size_t j = 0; j < m.reactions.size(); ++j) {
    if (!cfg.is_fast(m.reactions[j])) continue;
    const auto col = m.entries.col(static_cast<Eigen::Index>(j));
    std::int64_t consumed = 0;
    std::int64_t produced = 0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (col(i) < 0) consumed -= col(i);
      else produced += col(i);
    }
    if (consumed <= produced) continue;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (col(i) > 0) out[static_cast<std::size_t>(i)] = 1;
    }
  }
  return out;
}

Preference declaration_order(std::size_t n) {
  Preference out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

}  // namespace

std::vector<IntRowVector> slow_basis(const StoichMatrix& m, const EquivConfig& cfg,
                                     const std::vector<IntRowVector>& conserved,
                                     std::optional<Preference> preference) {
  const auto n = static_cast<Eigen::Index>(m.species.size());
  const RationalMatrix space = linalg::left_null_space(linalg::to_rational(fast_columns(m, cfg)));
  const auto target = linalg::rank(space);
  RationalMatrix chosen = stack_rows(conserved, n);
  std::vector<IntRowVector> out;
  auto try_add = [&](const RationalMatrix& v) {
    if (linalg::rank(chosen) >= target) return;
    if (!linalg::in_row_span(space, v) || linalg::in_row_span(chosen, v)) return;
    chosen = linalg::vstack(chosen, v);
    out.push_back(linalg::primitive(v.row(0)));
  };
  for (auto i : preference.value_or(delta_first(m, cfg))) try_add(unit_row(n, i));
  const RationalMatrix reduced = linalg::rref(space).reduced;
  for (Eigen::Index i = 0; i < reduced.rows(); ++i) try_add(reduced.row(i));
  return out;
}

std::vector<IntRowVector> complete_fast(const StoichMatrix& m,
                                        const std::vector<IntRowVector>& conserved,
                                        const std::vector<IntRowVector>& slow,
                                        std::optional<Preference> preference) {
  const auto n = static_cast<Eigen::Index>(m.species.size());
  std::vector<IntRowVector> rows(conserved);
  rows.insert(rows.end(), slow.begin(), slow.end());
  RationalMatrix chosen = stack_rows(rows, n);
  std::vector<IntRowVector> out;
  for (auto i : preference.value_or(declaration_order(m.species.size()))) {
    if (linalg::rank(chosen) >= n) break;
    auto e = unit_row(n, i);
    if (linalg::in_row_span(chosen, e)) continue;
    chosen = linalg::vstack(chosen, e);
    out.push_back(linalg::primitive(e.row(0)));
  }
  return out;
}

bool verify_block_shape(const StoichMatrix& m, const EquivConfig& cfg,
                        const VariableClassification& cls) {
  const IntMatrix fast = fast_columns(m, cfg);
  const IntMatrix all = m.entries;
  for (const auto& v : cls.conserved) {
    if (m.reactions.size() && (v.coefficients * all).cwiseAbs().maxCoeff() != 0) return false;
  }
  for (const auto& v : cls.slow) {
    if (fast.cols() && (v.coefficients * fast).cwiseAbs().maxCoeff() != 0) return false;
  }
  return linalg::rank(linalg::to_rational(cls.stacked())) ==
         static_cast<Eigen::Index>(cls.species.size());
}

VariableClassification classify(const SystemDef& sys, const EquivConfig& cfg,
                                const ClassificationOptions& options) {
  const StoichMatrix m = stoich_matrix(sys);
  for (const auto& r : m.reactions) {
    if (!cfg.is_fast(r) && !cfg.is_slow(r)) {
      throw Error(ErrorKind::UnpartitionedAction, "unpartitioned-action: " + r);
    }
  }
  VariableClassification cls;
  cls.species = m.species;
  cls.reactions = m.reactions;

  std::optional<Preference> slow_pref;
  Preference fast_pref;
  if (options.species_preference) {
    Preference p;
    for (const auto& name : *options.species_preference) {
      auto it = std::find(m.species.begin(), m.species.end(), name);
      if (it == m.species.end()) throw Error(ErrorKind::Config, "unknown species in preference: " + name);
      p.push_back(static_cast<std::size_t>(it - m.species.begin()));
    }
    for (std::size_t i = 0; i < m.species.size(); ++i) {
      if (std::find(p.begin(), p.end(), i) == p.end()) p.push_back(i);
    }
    slow_pref = p;
    fast_pref = p;
  } else {
    const auto inter = intermediates(m, cfg);
    for (std::size_t i = 0; i < m.species.size(); ++i) {
      if (inter[i]) fast_pref.push_back(i);
    }
    for (std::size_t i = 0; i < m.species.size(); ++i) {
      if (!inter[i]) fast_pref.push_back(i);
    }
  }

  const auto conserved = conserved_basis(m);
  const auto slow = slow_basis(m, cfg, conserved, slow_pref);
  const auto fast = complete_fast(m, conserved, slow, fast_pref);

  const State init = CapabilitySemantics(sys).initial_state();
  for (const auto& y : conserved) {
    ConservedVariable c;
    static_cast<Variable&>(c) = make_variable(y, m.species);
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      c.constant += y(j) * init[static_cast<std::size_t>(j)];
      if (y(j) < 0) cls.negative_conserved = true;
    }
    cls.conserved.push_back(std::move(c));
  }
  for (const auto& y : slow) cls.slow.push_back(make_variable(y, m.species));
  for (const auto& y : fast) cls.fast.push_back(make_variable(y, m.species));
  cls.block_shape_verified = verify_block_shape(m, cfg, cls);
  return cls;
}

Lts transform_lts(const Lts& lts, const VariableClassification& cls) {
  if (lts.species != cls.species) {
    throw Error(ErrorKind::Config, "classification was computed for a different species order");
  }
  auto value = [](const IntRowVector& y, const State& s) {
    std::int64_t acc = 0;
    for (Eigen::Index j = 0; j < y.cols(); ++j) acc += y(j) * s[static_cast<std::size_t>(j)];
    return acc;
  };
  Lts out;
  for (const auto& v : cls.slow) out.species.push_back(v.name);
  for (const auto& v : cls.fast) out.species.push_back(v.name);
  std::map<State, std::size_t> seen;
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    const auto& s = lts.states[i];
    for (const auto& c : cls.conserved) {
      if (value(c.coefficients, s) != c.constant) {
        throw Error(ErrorKind::StateCollision, "conserved variable " + c.name + " varies at state " +
                                                   to_string(s));
      }
    }
    State coords;
    for (const auto& v : cls.slow) coords.levels.push_back(static_cast<int>(value(v.coefficients, s)));
    for (const auto& v : cls.fast) coords.levels.push_back(static_cast<int>(value(v.coefficients, s)));
    auto [it, inserted] = seen.emplace(coords, i);
    if (!inserted) {
      throw Error(ErrorKind::StateCollision, "state-collision: " + to_string(lts.states[it->second]) +
                                                 " and " + to_string(s) + " both map to " +
                                                 to_string(coords));
    }
    out.states.push_back(std::move(coords));
  }
  out.initial = lts.initial;
  out.transitions = lts.transitions;
  out.reindex();
  return out;
}

SufficiencyReport slow_sufficiency(const VariableClassification& a, const VariableClassification& b,
                                   const EquivConfig& cfg) {
  SufficiencyReport rep;
  if (a.slow.empty() || b.slow.empty()) {
    rep.reasons.push_back("no slow variables: the technique cannot be used");
  }
  if (!b.fast.empty()) rep.reasons.push_back("second model has fast variables");
  std::set<std::string> slow[2];
  const VariableClassification* sides[2] = {&a, &b};
  for (int side = 0; side < 2; ++side) {
    for (const auto& v : sides[side]->slow) {
      if (!v.species) {
        rep.reasons.push_back("slow variable " + v.name + " not an individual species");
      } else {
        slow[side].insert(cfg.canonical(*v.species));
      }
    }
  }
  if (slow[0] != slow[1]) rep.reasons.push_back("slow species differ between the models");
  rep.applicable = rep.reasons.empty();
  return rep;
}

ShortcutResult shortcut_check(const SystemDef& a, const SystemDef& b, const EquivConfig& cfg,
                              const std::vector<std::pair<State, State>>& relation,
                              std::size_t state_limit) {
  ShortcutResult res;
  res.cls_a = classify(a, cfg);
  res.cls_b = classify(b, cfg);
  res.sufficiency = slow_sufficiency(res.cls_a, res.cls_b, cfg);
  res.slow = res.cross_check = {Verdict::NotEquivalent, std::nullopt};
  if (!res.sufficiency.applicable) return res;

  res.lts_a = build_lts(a, state_limit);
  res.lts_b = build_lts(b, state_limit);
  res.transformed_a = transform_lts(res.lts_a, res.cls_a);
  res.transformed_b = transform_lts(res.lts_b, res.cls_b);

  // coordinate of b holding the same slow species as coordinate i of a
  std::vector<std::size_t> match;
  for (const auto& va : res.cls_a.slow) {
    for (std::size_t j = 0; j < res.cls_b.slow.size(); ++j) {
      if (cfg.canonical(*res.cls_b.slow[j].species) == cfg.canonical(*va.species)) match.push_back(j);
    }
  }
  const std::size_t width_a = res.cls_a.n_s() + res.cls_a.n_f();
  for (const auto& [sa, sb] : relation) {
    if (sa.size() != width_a || sb.size() != res.cls_b.n_s()) {
      throw Error(ErrorKind::Relation, "relation vector " + to_string(sa) + " / " + to_string(sb) +
                                           " has the wrong number of coordinates");
    }
    for (std::size_t i = 0; i < match.size(); ++i) {
      if (sa[i] != sb[match[i]]) {
        res.rejection = "pair " + to_string(sa) + " ~ " + to_string(sb) +
                        " has unequal slow coordinates; the slow-only check requires s_i = s'_i";
        return res;
      }
    }
  }
  for (const auto& [sa, sb] : relation) {
    auto ia = res.transformed_a.find(sa);
    auto ib = res.transformed_b.find(sb);
    if (!ia || !ib) {
      throw Error(ErrorKind::LiftAmbiguity, "lift-ambiguity: " + to_string(ia ? sb : sa) +
                                                " matches no reachable state");
    }
    res.lifted.pairs.emplace(*ia, *ib);
  }
  if (res.lifted.pairs.empty()) throw Error(ErrorKind::Relation, "relation is empty");
  res.slow = check_slow_relation(res.lifted, res.transformed_a, res.transformed_b, cfg);
  res.cross_check = check_fast_slow_relation(res.lifted, res.lts_a, res.lts_b, cfg);
  return res;
}

}  // namespace fastslow
