#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fastslow/classification.hpp"
#include "fastslow/equivalence.hpp"
#include "fastslow/error.hpp"
#include "fastslow/lts_io.hpp"
#include "fastslow/parser.hpp"

using namespace fastslow;

namespace {

enum Exit : int {
  kOk = 0,
  kNotEquivalent = 1,
  kInputError = 2,
  kStateCap = 3,
  kNotABisimulation = 4,
  kPreconditions = 5,
};

// Signals that a diagnostic has been printed and the command should stop.
struct Abort {
  int code;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": cannot read file\n";
    throw Abort{kInputError};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

// Echo of the command and digests of every input file.
struct RunReport {
  Json doc = Json::object();
  Json inputs = Json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  explicit RunReport(const std::string& command) { doc["command"] = command; }

  std::string load(const std::string& path) {
    std::string text = read_file(path);
    inputs[path] = "fnv1a64:" + fnv1a(text);
    return text;
  }

  Json finish(bool deterministic) {
    Json out = Json::object();
    out["command"] = doc["command"];
    out["inputs"] = inputs;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (it.key() != "command") out[it.key()] = it.value();
    }
    if (!deterministic) {
      out["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    }
    return out;
  }
};

SystemDef load_model(RunReport& report, const std::string& path) {
  const std::string text = report.load(path);
  try {
    return parse_model(text);
  } catch (const ParseError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << format_diagnostic(d, path) << "\n";
    throw Abort{kInputError};
  }
}

EquivConfig load_config(RunReport& report, const std::string& path, std::vector<const SystemDef*> models) {
  const std::string text = report.load(path);
  try {
    return parse_config(text, models);
  } catch (const ParseError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << format_diagnostic(d, path) << "\n";
    throw Abort{kInputError};
  }
}

VectorRelation load_relation(RunReport& report, const std::string& path) {
  const std::string text = report.load(path);
  try {
    return relation_from_json(Json::parse(text));
  } catch (const Json::parse_error& e) {
    std::cerr << path << ": " << e.what() << "\n";
    throw Abort{kInputError};
  } catch (const Error& e) {
    std::cerr << path << ": " << e.what() << "\n";
    throw Abort{kInputError};
  }
}

Lts build(const SystemDef& sys, std::size_t max_states, const std::string& what) {
  try {
    return build_lts(sys, max_states);
  } catch (const Error& e) {
    std::cerr << what << ": " << e.what() << "\n";
    throw Abort{e.kind() == ErrorKind::StateLimitExceeded ? kStateCap : kInputError};
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << path << ": cannot write file\n";
    throw Abort{kInputError};
  }
  out << text;
}

struct OutputOptions {
  bool json = false;
  bool deterministic = false;
  std::string report_path;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
  cmd->add_flag("--json", o.json, "Print the report as JSON");
  cmd->add_flag("--deterministic", o.deterministic, "Omit timing fields");
  cmd->add_option("--report", o.report_path, "Also write the JSON report to this file");
}

// Prints the human text unless --json is set, then the JSON report where requested.
void emit(RunReport& report, const OutputOptions& o, const std::string& human) {
  const Json doc = report.finish(o.deterministic);
  if (o.json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << human;
  }
  if (!o.report_path.empty()) write_output(o.report_path, doc.dump(2) + "\n");
}

Json witness_json(const Witness& w, const Lts& a, const Lts& b) {
  Json steps = Json::array();
  for (const auto& s : w.trace) {
    steps.push_back({{"left", a.states[s.left].levels},
                     {"right", b.states[s.right].levels},
                     {"challenger", s.challenger == Side::Left ? "left" : "right"},
                     {"kind", s.fast ? "fast" : "slow"},
                     {"action", s.action},
                     {"label", s.fast ? "" : to_string(s.filtered)},
                     {"target", (s.challenger == Side::Left ? a : b).states[s.target].levels},
                     {"defenderMoves", s.defender_moves},
                     {"text", describe(s, a, b)}});
  }
  return {{"trace", steps}, {"truncated", w.truncated}};
}

Json counts(const Lts& lts) {
  return {{"states", lts.num_states()}, {"transitions", lts.transitions.size()}};
}

// ---- lts -------------------------------------------------------------------

struct LtsArgs {
  std::string model;
  std::string format = "json";
  std::string out;
  std::string config;
  std::size_t max_states = kDefaultStateLimit;
};

int cmd_lts(const LtsArgs& args) {
  RunReport report("lts");
  const SystemDef sys = load_model(report, args.model);
  const Lts lts = build(sys, args.max_states, args.model);
  std::optional<EquivConfig> cfg;
  if (!args.config.empty()) cfg = load_config(report, args.config, {&sys});
  const std::string text = args.format == "dot" ? lts_to_dot(lts, cfg ? &*cfg : nullptr) : lts_to_json(lts).dump(2) + "\n";
  write_output(args.out, text);
  // counts go to stdout only when the transition system itself does not
  (args.out.empty() ? std::cerr : std::cout)
      << lts.num_states() << " states, " << lts.transitions.size() << " transitions\n";
  return kOk;
}

// ---- check -----------------------------------------------------------------

struct CheckArgs {
  std::string model_a;
  std::string model_b;
  std::string config;
  std::string relation;
  std::string mode = "fast-slow";
  std::size_t max_states = kDefaultStateLimit;
  bool verbose = false;
  OutputOptions out;
};

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Equivalent: return kOk;
    case Verdict::NotEquivalent: return kNotEquivalent;
    case Verdict::RelationNotABisimulation: return kNotABisimulation;
  }
  return kInputError;
}

std::string verdict_text(const CheckOutcome& o, const Lts& a, const Lts& b) {
  std::string text = "verdict: " + std::string(verdict_name(o.verdict)) + "\n";
  if (o.witness) text += "witness:\n" + describe(*o.witness, a, b) + "\n";
  return text;
}

// Relation or largest-relation check in the fast-slow or slow game.
int check_game(const CheckArgs& args, RunReport& report, const SystemDef& sa, const SystemDef& sb,
               const EquivConfig& cfg) {
  const Game game = args.mode == "slow" ? Game::Slow : Game::FastSlow;
  const Lts a = build(sa, args.max_states, args.model_a);
  const Lts b = build(sb, args.max_states, args.model_b);
  report.doc["mode"] = args.mode;
  report.doc["left"] = counts(a);
  report.doc["right"] = counts(b);
  std::string human;
  std::optional<VectorRelation> vectors;
  if (!args.relation.empty()) vectors = load_relation(report, args.relation);

  auto table = std::make_shared<LabelTable>();
  std::optional<WeakViews> va, vb;
  try {
    va.emplace(a, cfg, table);
    vb.emplace(b, cfg, table);
  } catch (const Error& e) {
    std::cerr << args.config << ": " << e.what() << "\n";
    return kInputError;
  }

  CheckOutcome outcome;
  if (vectors) {
    PairRelation r;
    try {
      r = resolve_relation(*vectors, a, b);
      outcome = check_relation(game, r, *va, *vb);
    } catch (const Error& e) {
      std::cerr << args.relation << ": " << e.what() << "\n";
      return kInputError;
    }
    report.doc["relation"] = {{"pairs", r.size()},
                              {"bisimulation", outcome.equivalent()},
                              {"relatesInitialStates", r.contains(a.initial, b.initial)}};
    if (outcome.equivalent() && !r.contains(a.initial, b.initial)) {
      human += "the relation is a bisimulation but does not relate the initial states; computing the largest one\n";
      vectors.reset();
    }
  }
  if (!vectors) {
    const auto res = largest_bisimulation(game, *va, *vb);
    outcome = res.outcome;
    report.doc["largest"] = {{"pairs", res.relation.size()}, {"rounds", res.rounds}};
    if (args.verbose) report.doc["largest"]["relation"] = relation_to_json(relation_vectors(res.relation, a, b));
  }
  report.doc["verdict"] = verdict_name(outcome.verdict);
  if (outcome.witness) report.doc["witness"] = witness_json(*outcome.witness, a, b);
  human += verdict_text(outcome, a, b);
  emit(report, args.out, human);
  return verdict_exit(outcome.verdict);
}

int check_shortcut(const CheckArgs& args, RunReport& report, const SystemDef& sa, const SystemDef& sb,
                   const EquivConfig& cfg) {
  if (args.relation.empty()) {
    std::cerr << "check: --mode shortcut needs --relation in slow/fast coordinates\n";
    return kInputError;
  }
  const VectorRelation vectors = load_relation(report, args.relation);
  ShortcutResult res;
  try {
    res = shortcut_check(sa, sb, cfg, vectors, args.max_states);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::StateLimitExceeded ? kStateCap : kInputError;
  }
  report.doc["mode"] = "shortcut";
  report.doc["classification"] = {{"left", classification_to_json(res.cls_a)},
                                  {"right", classification_to_json(res.cls_b)}};
  report.doc["preconditions"] = {{"applicable", res.sufficiency.applicable}, {"reasons", res.sufficiency.reasons}};
  std::string human;
  if (!res.sufficiency.applicable || res.rejection) {
    auto reasons = res.sufficiency.reasons;
    if (res.rejection) reasons.push_back(*res.rejection);
    report.doc["preconditions"]["reasons"] = reasons;
    report.doc["verdict"] = "preconditions-unmet";
    for (const auto& r : reasons) std::cerr << "shortcut precondition: " << r << "\n";
    emit(report, args.out, "verdict: preconditions-unmet\n");
    return kPreconditions;
  }
  report.doc["left"] = counts(res.lts_a);
  report.doc["right"] = counts(res.lts_b);
  report.doc["slowCheck"] = verdict_name(res.slow.verdict);
  report.doc["crossCheck"] = verdict_name(res.cross_check.verdict);
  const bool initial = res.lifted.contains(res.lts_a.initial, res.lts_b.initial);
  report.doc["relatesInitialStates"] = initial;
  CheckOutcome outcome = res.slow;
  if (res.slow.equivalent() && !res.cross_check.equivalent()) {
    // cannot happen when the preconditions hold; reported rather than hidden
    outcome = res.cross_check;
  }
  if (outcome.equivalent() && !initial) outcome = largest_fast_slow(res.lts_a, res.lts_b, cfg).outcome;
  report.doc["verdict"] = verdict_name(outcome.verdict);
  const Lts& wa = res.slow.equivalent() ? res.lts_a : res.transformed_a;
  const Lts& wb = res.slow.equivalent() ? res.lts_b : res.transformed_b;
  if (outcome.witness) report.doc["witness"] = witness_json(*outcome.witness, wa, wb);
  human += "slow check: " + std::string(verdict_name(res.slow.verdict)) + "\n";
  human += "fast-slow cross-check: " + std::string(verdict_name(res.cross_check.verdict)) + "\n";
  human += verdict_text(outcome, wa, wb);
  emit(report, args.out, human);
  return verdict_exit(outcome.verdict);
}

int cmd_check(const CheckArgs& args) {
  RunReport report("check");
  const SystemDef sa = load_model(report, args.model_a);
  const SystemDef sb = load_model(report, args.model_b);
  const EquivConfig cfg = load_config(report, args.config, {&sa, &sb});
  if (args.mode == "shortcut") return check_shortcut(args, report, sa, sb, cfg);
  return check_game(args, report, sa, sb, cfg);
}

// ---- classify ----------------------------------------------------------------

struct ClassifyArgs {
  std::string model;
  std::string config;
  std::vector<std::string> prefer;
  OutputOptions out;
};

int cmd_classify(const ClassifyArgs& args) {
  RunReport report("classify");
  const SystemDef sys = load_model(report, args.model);
  const EquivConfig cfg = load_config(report, args.config, {&sys});
  ClassificationOptions options;
  if (!args.prefer.empty()) options.species_preference = args.prefer;
  VariableClassification cls;
  try {
    cls = classify(sys, cfg, options);
  } catch (const Error& e) {
    std::cerr << args.model << ": " << e.what() << "\n";
    return kInputError;
  }
  report.doc["classification"] = classification_to_json(cls);
  std::ostringstream human;
  human << "species: ";
  for (std::size_t i = 0; i < cls.species.size(); ++i) human << (i ? ", " : "") << cls.species[i];
  human << "\n";
  for (const auto& c : cls.conserved) human << "  conserved  " << c.name << " = " << c.constant << "\n";
  for (const auto& v : cls.slow) human << "  slow       " << v.name << "\n";
  for (const auto& v : cls.fast) human << "  fast       " << v.name << "\n";
  human << "block shape verified: " << (cls.block_shape_verified ? "yes" : "no") << "\n";
  if (cls.negative_conserved) {
    std::cerr << "warning: no non-negative basis of conserved quantities exists; some vectors have negative entries\n";
  }
  emit(report, args.out, human.str());
  if (cls.slow.empty()) {
    std::cerr << "no slow variables: this technique cannot be used\n";
    return kPreconditions;
  }
  return kOk;
}

// ---- congruence ----------------------------------------------------------------

struct CongruenceArgs {
  std::string p1, p2, q;
  std::string config;
  std::size_t max_states = kDefaultStateLimit;
  OutputOptions out;
};

int cmd_congruence(const CongruenceArgs& args) {
  RunReport report("congruence");
  const SystemDef p1 = load_model(report, args.p1);
  const SystemDef p2 = load_model(report, args.p2);
  const SystemDef q = load_model(report, args.q);
  const EquivConfig cfg = load_config(report, args.config, {&p1, &p2, &q});
  CongruenceReport rep;
  try {
    rep = congruence_probe(p1, p2, q, cfg, args.max_states);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::StateLimitExceeded ? kStateCap : kInputError;
  }
  std::set<std::string> shared = rep.shared_with_p1;
  shared.insert(rep.shared_with_p2.begin(), rep.shared_with_p2.end());
  report.doc["sharedFastActions"] = {{"first", rep.shared_with_p1}, {"second", rep.shared_with_p2}};
  report.doc["sideCondition"] = rep.side_condition;
  report.doc["components"] = verdict_name(rep.components.outcome.verdict);
  report.doc["composed"] = verdict_name(rep.composed.outcome.verdict);
  if (rep.composed.outcome.witness) {
    report.doc["witness"] = witness_json(*rep.composed.outcome.witness, rep.lts_p1q, rep.lts_p2q);
  }
  std::ostringstream human;
  human << "shared fast actions: {";
  bool first = true;
  for (const auto& a : shared) {
    human << (first ? "" : ", ") << a;
    first = false;
  }
  human << "}\n";
  human << "side condition: " << (rep.side_condition ? "holds" : "fails") << "\n";
  human << "components: " << verdict_name(rep.components.outcome.verdict) << "\n";
  human << "composed: " << verdict_name(rep.composed.outcome.verdict) << "\n";
  if (rep.composed.outcome.witness) {
    human << "witness:\n" << describe(*rep.composed.outcome.witness, rep.lts_p1q, rep.lts_p2q) << "\n";
  }
  emit(report, args.out, human.str());
  return rep.side_condition && rep.composed.outcome.equivalent() ? kOk : kNotEquivalent;
}

// ---- extend ----------------------------------------------------------------

struct ExtendArgs {
  std::string model;
  std::string a, b;
};

int cmd_extend(const ExtendArgs& args) {
  RunReport report("extend");
  SystemDef sys = load_model(report, args.model);
  const SpeciesDef* a = sys.find_species(args.a);
  const SpeciesDef* b = sys.find_species(args.b);
  if (!a || !b) {
    std::cerr << args.model << ": unknown species " << (a ? args.b : args.a) << "\n";
    return kInputError;
  }
  SpeciesDef ext;
  try {
    ext = extend_species(*a, *b);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  }
  if (sys.find_species(ext.name)) {
    std::cerr << args.model << ": species " << ext.name << " already declared\n";
    return kInputError;
  }
  sys.species.push_back(std::move(ext));
  std::cout << render_model(sys);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast-slow bisimulation tools for Bio-PEPA models with levels"};
  app.require_subcommand(1);

  LtsArgs lts;
  auto* c_lts = app.add_subcommand("lts", "Build and export the transition system of a model");
  c_lts->add_option("model", lts.model, "Model file")->required();
  c_lts->add_option("--format", lts.format, "Output format")->check(CLI::IsMember({"dot", "json"}));
  c_lts->add_option("--out", lts.out, "Output file (default: standard output)");
  c_lts->add_option("--config", lts.config, "Label DOT edges with filtered entries under this config");
  c_lts->add_option("--max-states", lts.max_states, "State cap");

  CheckArgs check;
  auto* c_check = app.add_subcommand("check", "Decide fast-slow or slow bisimilarity of two models");
  c_check->add_option("model_a", check.model_a, "First model")->required();
  c_check->add_option("model_b", check.model_b, "Second model")->required();
  c_check->add_option("--config", check.config, "Fast/slow configuration")->required();
  c_check->add_option("--relation", check.relation, "Candidate relation (JSON pairs of level vectors)");
  c_check->add_option("--mode", check.mode, "Game to play")->check(CLI::IsMember({"fast-slow", "slow", "shortcut"}));
  c_check->add_option("--max-states", check.max_states, "State cap");
  c_check->add_flag("--verbose", check.verbose, "Include the largest relation in the report");
  add_output_options(c_check, check.out);

  ClassifyArgs cls;
  auto* c_cls = app.add_subcommand("classify", "Conserved, slow and fast variables of a model");
  c_cls->add_option("model", cls.model, "Model file")->required();
  c_cls->add_option("--config", cls.config, "Fast/slow configuration")->required();
  c_cls->add_option("--prefer", cls.prefer, "Species tried first when choosing unit vectors")->delimiter(',');
  add_output_options(c_cls, cls.out);

  CongruenceArgs cong;
  auto* c_cong = app.add_subcommand("congruence", "Check whether cooperation with a context preserves bisimilarity");
  c_cong->add_option("p1", cong.p1, "First component")->required();
  c_cong->add_option("p2", cong.p2, "Second component")->required();
  c_cong->add_option("q", cong.q, "Context")->required();
  c_cong->add_option("--config", cong.config, "Fast/slow configuration")->required();
  c_cong->add_option("--max-states", cong.max_states, "State cap");
  add_output_options(c_cong, cong.out);

  ExtendArgs ext;
  auto* c_ext = app.add_subcommand("extend", "Add the extension A{B} to a model and print it");
  c_ext->add_option("model", ext.model, "Model file")->required();
  c_ext->add_option("a", ext.a, "Species to extend")->required();
  c_ext->add_option("b", ext.b, "Species whose capabilities are added")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*c_lts) return cmd_lts(lts);
    if (*c_check) return cmd_check(check);
    if (*c_cls) return cmd_classify(cls);
    if (*c_cong) return cmd_congruence(cong);
    if (*c_ext) return cmd_extend(ext);
  } catch (const Abort& a) {
    return a.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
