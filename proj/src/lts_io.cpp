#include "fastslow/lts_io.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "fastslow/error.hpp"

namespace fastslow {

namespace {

Json entry_json(const LabelEntry& e) {
  return Json{{"species", e.species},
              {"role", std::string(role_name(e.role))},
              {"level", e.level},
              {"stoich", e.stoich}};
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

bool is_int_vector(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& x : j) {
    if (!x.is_number_integer()) return false;
  }
  return true;
}

State to_state(const Json& j) {
  if (!is_int_vector(j)) throw Error(ErrorKind::Relation, "expected an integer vector, got " + j.dump());
  return State{j.get<std::vector<int>>()};
}

Json rows_json(const std::vector<Variable>& vars) {
  Json out = Json::array();
  for (const auto& v : vars) {
    Json o{{"vector", std::vector<std::int64_t>(v.coefficients.data(),
                                                v.coefficients.data() + v.coefficients.size())},
           {"name", v.name}};
    if (v.species) o["species"] = *v.species;
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace

Json lts_to_json(const Lts& lts) {
  Json states = Json::array();
  for (const auto& s : lts.states) states.push_back(s.levels);
  Json transitions = Json::array();
  for (const auto& t : lts.transitions) {
    Json entries = Json::array();
    for (const auto& e : t.label.entries) entries.push_back(entry_json(e));
    transitions.push_back(
        Json{{"src", t.src}, {"action", t.label.action}, {"entries", std::move(entries)}, {"dst", t.dst}});
  }
  return Json{{"species", lts.species},
              {"states", std::move(states)},
              {"initial", lts.initial},
              {"transitions", std::move(transitions)}};
}

Lts lts_from_json(const Json& j) {
  Lts lts;
  try {
    lts.species = j.at("species").get<std::vector<std::string>>();
    for (const auto& s : j.at("states")) lts.states.push_back(State{s.get<std::vector<int>>()});
    lts.initial = j.at("initial").get<std::size_t>();
    for (const auto& t : j.at("transitions")) {
      Transition tr;
      tr.src = t.at("src").get<std::size_t>();
      tr.dst = t.at("dst").get<std::size_t>();
      tr.label.action = t.at("action").get<std::string>();
      for (const auto& e : t.at("entries")) {
        auto role = role_from_name(e.at("role").get<std::string>());
        if (!role) throw Error(ErrorKind::Syntax, "unknown role " + e.at("role").dump());
        tr.label.entries.push_back(
            {e.at("species").get<std::string>(), *role, e.at("level").get<int>(), e.at("stoich").get<int>()});
      }
      std::sort(tr.label.entries.begin(), tr.label.entries.end());
      lts.transitions.push_back(std::move(tr));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed transition system: ") + e.what());
  }
  if (lts.initial >= lts.states.size() && !lts.states.empty()) {
    throw Error(ErrorKind::IndexOutOfRange, "initial state out of range");
  }
  lts.reindex();
  return lts;
}

std::string lts_to_dot(const Lts& lts, const EquivConfig* cfg) {
  std::ostringstream out;
  out << "digraph lts {\n";
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    out << "  s" << i << " [label=\"" << to_string(lts.states[i]) << "\"";
    if (i == lts.initial) out << ", shape=doublecircle";
    out << "];\n";
  }
  for (const auto& t : lts.transitions) {
    std::string label = t.label.action;
    if (cfg) {
      std::string entries;
      for (const auto& e : filter_label(t.label, *cfg).entries) {
        entries += (entries.empty() ? "" : ", ") + to_string(e);
      }
      if (!entries.empty()) label += "; " + entries;
    }
    out << "  s" << t.src << " -> s" << t.dst << " [label=\"" << dot_escape(label) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

VectorRelation relation_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Relation, "relation must be a JSON array");
  VectorRelation out;
  // vectors of one model all have the same length; that decides between the
  // two layouts, and pair form wins when both read consistently
  auto uniform = [](auto&& vectors) {
    std::optional<std::size_t> len;
    for (const Json* v : vectors) {
      if (!v->is_array() || (len && v->size() != *len)) return false;
      len = v->size();
    }
    return true;
  };
  auto pair_form_fits = [&] {
    std::vector<const Json*> firsts, seconds;
    for (const auto& p : j) {
      if (!p.is_array() || p.size() != 2) return false;
      firsts.push_back(&p[0]);
      seconds.push_back(&p[1]);
    }
    return uniform(firsts) && uniform(seconds);
  };
  auto column_form_fits = [&] {
    if (j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].empty() || !j[0][0].is_array()) {
      return false;
    }
    std::vector<const Json*> left, right;
    for (const auto& v : j[0]) left.push_back(&v);
    for (const auto& v : j[1]) right.push_back(&v);
    return uniform(left) && uniform(right);
  };
  const bool column_form = !pair_form_fits() && column_form_fits();
  if (column_form) {
    if (j[0].size() != j[1].size()) {
      throw Error(ErrorKind::Relation, "relation columns have different lengths");
    }
    for (std::size_t i = 0; i < j[0].size(); ++i) out.emplace_back(to_state(j[0][i]), to_state(j[1][i]));
    return out;
  }
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) {
      throw Error(ErrorKind::Relation, "relation entry must be a pair of vectors, got " + p.dump());
    }
    out.emplace_back(to_state(p[0]), to_state(p[1]));
  }
  return out;
}

Json relation_to_json(const VectorRelation& r) {
  Json out = Json::array();
  for (const auto& [a, b] : r) out.push_back(Json::array({a.levels, b.levels}));
  return out;
}

Json classification_to_json(const VariableClassification& cls) {
  Json conserved = Json::array();
  for (const auto& c : cls.conserved) {
    conserved.push_back(Json{{"vector", std::vector<std::int64_t>(c.coefficients.data(),
                                                                   c.coefficients.data() + c.coefficients.size())},
                             {"name", c.name},
                             {"constant", c.constant}});
  }
  return Json{{"species", cls.species},
              {"conserved", std::move(conserved)},
              {"slow", rows_json(cls.slow)},
              {"fast", rows_json(cls.fast)},
              {"blockShapeVerified", cls.block_shape_verified},
              {"negativeConserved", cls.negative_conserved}};
}

}  // namespace fastslow
