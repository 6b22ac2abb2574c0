#pragma once

// Deliberately naive reference implementations used to cross-check the
// library. Nothing here shares code with the weak views or the fixpoint.

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "fastslow/config.hpp"
#include "fastslow/semantics.hpp"

namespace fastslow::testing {

using BoolMatrix = std::vector<std::vector<char>>;

/// Reflexive-transitive closure of the fast transitions by triple loop.
inline BoolMatrix fast_closure_oracle(const Lts& lts, const EquivConfig& cfg) {
  const std::size_t n = lts.states.size();
  BoolMatrix r(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = 1;
  for (const auto& t : lts.transitions) {
    if (cfg.is_fast(t.label.action)) r[t.src][t.dst] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!r[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (r[k][j]) r[i][j] = 1;
      }
    }
  }
  return r;
}

using LabelledSet = std::set<std::pair<CapabilityLabel, std::size_t>>;

/// Per state: filtered slow steps (strong) and closure-slow-closure (weak).
struct NaiveViews {
  BoolMatrix closure;
  std::vector<LabelledSet> strong;
  std::vector<LabelledSet> weak;
};

inline NaiveViews naive_views(const Lts& lts, const EquivConfig& cfg) {
  NaiveViews v;
  const std::size_t n = lts.states.size();
  v.closure = fast_closure_oracle(lts, cfg);
  v.strong.assign(n, {});
  v.weak.assign(n, {});
  for (const auto& t : lts.transitions) {
    if (!cfg.is_fast(t.label.action)) v.strong[t.src].insert({filter_label(t.label, cfg), t.dst});
  }
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < n; ++a) {
      if (!v.closure[s][a]) continue;
      for (const auto& [lbl, b] : v.strong[a]) {
        for (std::size_t c = 0; c < n; ++c) {
          if (v.closure[b][c]) v.weak[s].insert({lbl, c});
        }
      }
    }
  }
  return v;
}

/// Greatest fixpoint of the fast-slow (or slow-only) game, deleting one pair
/// at a time until nothing changes.
inline BoolMatrix largest_oracle(const Lts& a, const Lts& b, const EquivConfig& cfg, bool with_fast) {
  const auto va = naive_views(a, cfg);
  const auto vb = naive_views(b, cfg);
  const std::size_t na = a.states.size();
  const std::size_t nb = b.states.size();
  BoolMatrix rel(na, std::vector<char>(nb, 1));

  auto fast_ok = [&](const NaiveViews& def, std::size_t c, std::size_t d,
                     bool left) {
    const std::size_t nd = def.closure.size();
    for (const auto& t : (left ? a : b).transitions) {
      if (t.src != c || !cfg.is_fast(t.label.action)) continue;
      bool matched = false;
      for (std::size_t x = 0; x < nd && !matched; ++x) {
        if (def.closure[d][x] && (left ? rel[t.dst][x] : rel[x][t.dst])) matched = true;
      }
      if (!matched) return false;
    }
    return true;
  };
  auto slow_ok = [&](const NaiveViews& chal, const NaiveViews& def, std::size_t c, std::size_t d,
                     bool left) {
    for (const auto& [lbl, t] : chal.strong[c]) {
      bool matched = false;
      for (const auto& [l2, x] : def.weak[d]) {
        if (l2 == lbl && (left ? rel[t][x] : rel[x][t])) {
          matched = true;
          break;
        }
      }
      if (!matched) return false;
    }
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t p = 0; p < na; ++p) {
      for (std::size_t q = 0; q < nb; ++q) {
        if (!rel[p][q]) continue;
        bool ok = slow_ok(va, vb, p, q, true) && slow_ok(vb, va, q, p, false);
        if (ok && with_fast) ok = fast_ok(vb, p, q, true) && fast_ok(va, q, p, false);
        if (!ok) {
          rel[p][q] = 0;
          changed = true;
        }
      }
    }
  }
  return rel;
}

/// Strong bisimilarity on filtered labels by signature refinement over the
/// disjoint union of both systems. Returns block ids (a's states first).
inline std::vector<int> strong_blocks_oracle(const Lts& a, const Lts& b, const EquivConfig& cfg) {
  const std::size_t na = a.states.size();
  const std::size_t n = na + b.states.size();
  std::vector<std::vector<std::pair<CapabilityLabel, std::size_t>>> edges(n);
  for (const auto& t : a.transitions) edges[t.src].push_back({filter_label(t.label, cfg), t.dst});
  for (const auto& t : b.transitions) edges[na + t.src].push_back({filter_label(t.label, cfg), na + t.dst});
  std::vector<int> block(n, 0);
  for (;;) {
    std::map<std::pair<int, std::set<std::pair<CapabilityLabel, int>>>, int> ids;
    std::vector<int> next(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::set<std::pair<CapabilityLabel, int>> sig;
      for (const auto& [l, t] : edges[s]) sig.insert({l, block[t]});
      auto key = std::make_pair(block[s], std::move(sig));
      auto it = ids.find(key);
      if (it == ids.end()) it = ids.emplace(std::move(key), static_cast<int>(ids.size())).first;
      next[s] = it->second;
    }
    const bool stable = std::set<int>(next.begin(), next.end()).size() ==
                        std::set<int>(block.begin(), block.end()).size();
    block = std::move(next);
    if (stable) return block;
  }
}

}  // namespace fastslow::testing
