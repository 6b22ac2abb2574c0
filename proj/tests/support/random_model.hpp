#pragma once

// Seeded generators of small well-formed systems and fast/slow partitions.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "fastslow/config.hpp"
#include "fastslow/model.hpp"

namespace fastslow::testing {

struct RandomModelOptions {
  int max_species = 5;
  int max_actions = 5;
  int max_level = 4;
  int max_stoich = 2;
  double explicit_coop = 0.25;  // chance of a node using an explicit action set
};

inline int pick(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Role random_role(std::mt19937_64& rng) {
  const int r = pick(rng, 0, 19);
  if (r < 7) return Role::Reactant;
  if (r < 14) return Role::Product;
  if (r < 16) return Role::Activator;
  if (r < 18) return Role::Inhibitor;
  return Role::GenericModifier;
}

inline SystemDef random_system(std::mt19937_64& rng, const RandomModelOptions& o = {}) {
  const int n_species = pick(rng, 1, o.max_species);
  const int n_actions = pick(rng, 1, o.max_actions);
  SystemDef sys;
  for (int i = 0; i < n_species; ++i) {
    SpeciesDef s;
    s.name = "X" + std::to_string(i);
    s.max_count = pick(rng, 1, o.max_level);
    sys.species.push_back(std::move(s));
  }
  auto add = [&](int species, int action) {
    auto& s = sys.species[static_cast<std::size_t>(species)];
    const std::string name = "r" + std::to_string(action);
    for (const auto& p : s.prefixes) {
      if (p.action == name) return;
    }
    const int k = pick(rng, 0, 4) == 0 ? pick(rng, 1, o.max_stoich) : 1;
    s.prefixes.push_back({name, k, random_role(rng)});
  };
  // each action touches one to three species
  for (int a = 0; a < n_actions; ++a) {
    const int k = pick(rng, 1, std::min(3, n_species));
    for (int j = 0; j < k; ++j) add(pick(rng, 0, n_species - 1), a);
  }
  for (int i = 0; i < n_species; ++i) {
    if (sys.species[static_cast<std::size_t>(i)].prefixes.empty()) add(i, pick(rng, 0, n_actions - 1));
  }
  std::vector<CompositionTree> parts;
  for (const auto& s : sys.species) {
    parts.push_back(CompositionTree::leaf(s.name, pick(rng, 0, static_cast<int>(s.max_count))));
  }
  auto actions_of = [&](const CompositionTree& t) {
    std::set<std::string> out;
    for (const auto& l : t.leaves()) {
      auto a = sys.find_species(l.species)->actions();
      out.insert(a.begin(), a.end());
    }
    return out;
  };
  while (parts.size() > 1) {
    const auto i = static_cast<std::size_t>(pick(rng, 0, static_cast<int>(parts.size()) - 2));
    CompositionTree l = parts[i];
    CompositionTree r = parts[i + 1];
    Cooperation coop = Cooperation::all();
    if (std::uniform_real_distribution<double>(0, 1)(rng) < o.explicit_coop) {
      auto la = actions_of(l);
      auto ra = actions_of(r);
      std::set<std::string> shared;
      std::set_intersection(la.begin(), la.end(), ra.begin(), ra.end(), std::inserter(shared, shared.end()));
      std::set<std::string> chosen;
      for (const auto& a : shared) {
        if (pick(rng, 0, 1)) chosen.insert(a);
      }
      coop = Cooperation::over(chosen);
    }
    parts[i] = CompositionTree::node(l, coop, r);
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  sys.tree = parts.front();
  return sys;
}

/// Every action of `sys` assigned to fast or slow at random.
inline EquivConfig random_partition(std::mt19937_64& rng, const std::set<std::string>& actions,
                                    double fast_share = 0.5) {
  EquivConfig cfg;
  for (const auto& a : actions) {
    (std::uniform_real_distribution<double>(0, 1)(rng) < fast_share ? cfg.fast : cfg.slow).insert(a);
  }
  return cfg;
}

}  // namespace fastslow::testing
