#include "fastslow/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>

namespace fastslow {

std::string format_diagnostic(const Diagnostic& d, std::string_view file_name) {
  std::ostringstream out;
  out << file_name << ":" << d.span.line << ":" << d.span.column << ": " << d.code << ": "
      << d.message;
  return out.str();
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += '\n';
    out += format_diagnostic(d);
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
}

// Length of the identifier starting at text[pos], 0 if none. Accepts A{B} suffixes.
std::size_t scan_identifier(std::string_view text, std::size_t pos) {
  if (pos >= text.size() || !ident_start(text[pos])) return 0;
  std::size_t i = pos + 1;
  while (i < text.size() && ident_char(text[i])) ++i;
  while (i < text.size() && text[i] == '{') {
    std::size_t inner = scan_identifier(text, i + 1);
    if (inner == 0 || i + 1 + inner >= text.size() || text[i + 1 + inner] != '}') break;
    i += inner + 2;
  }
  return i - pos;
}

enum class Tok {
  Ident, Int, String,
  LParen, RParen, LBracket, RBracket, Comma, Semi, Equals, Plus,
  Reactant, Product, Activator, Inhibitor, Modifier,  // << >> (+) (-) (.)
  CoopAll, LAngle, RAngle,                            // <*> < >
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::String: return "string";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Equals: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Reactant: return "'<<'";
    case Tok::Product: return "'>>'";
    case Tok::Activator: return "'(+)'";
    case Tok::Inhibitor: return "'(-)'";
    case Tok::Modifier: return "'(.)'";
    case Tok::CoopAll: return "'<*>'";
    case Tok::LAngle: return "'<'";
    case Tok::RAngle: return "'>'";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", span(pos_, pos_)});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  SourceSpan span(std::size_t b, std::size_t e) const {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < b && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col, b, e};
  }

  [[noreturn]] void fail(std::size_t b, std::size_t e, const std::string& msg) const {
    throw ParseError({{span(b, e), "syntax-error", msg}});
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  bool starts(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  Token make(Tok k, std::size_t len) {
    Token t{k, std::string(text_.substr(pos_, len)), span(pos_, pos_ + len)};
    pos_ += len;
    return t;
  }

  Token next() {
    const char c = text_[pos_];
    if (auto n = scan_identifier(text_, pos_)) return make(Tok::Ident, n);
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t n = 0;
      while (pos_ + n < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + n]))) ++n;
      return make(Tok::Int, n);
    }
    if (c == '"') return string_literal();
    if (starts("<*>")) return make(Tok::CoopAll, 3);
    if (starts("<<")) return make(Tok::Reactant, 2);
    if (starts(">>")) return make(Tok::Product, 2);
    if (starts("(+)")) return make(Tok::Activator, 3);
    if (starts("(-)")) return make(Tok::Inhibitor, 3);
    if (starts("(.)")) return make(Tok::Modifier, 3);
    switch (c) {
      case '(': return make(Tok::LParen, 1);
      case ')': return make(Tok::RParen, 1);
      case '[': return make(Tok::LBracket, 1);
      case ']': return make(Tok::RBracket, 1);
      case ',': return make(Tok::Comma, 1);
      case ';': return make(Tok::Semi, 1);
      case '=': return make(Tok::Equals, 1);
      case '+': return make(Tok::Plus, 1);
      case '<': return make(Tok::LAngle, 1);
      case '>': return make(Tok::RAngle, 1);
      default: break;
    }
    fail(pos_, pos_ + 1, std::string("unexpected character '") + c + "'");
  }

  Token string_literal() {
    const std::size_t start = pos_;
    std::string value;
    std::size_t i = pos_ + 1;
    for (;;) {
      if (i >= text_.size() || text_[i] == '\n') fail(start, i, "unterminated string");
      if (text_[i] == '"') break;
      if (text_[i] == '\\' && i + 1 < text_.size()) {
        value += text_[i + 1];
        i += 2;
        continue;
      }
      value += text_[i++];
    }
    Token t{Tok::String, value, span(start, i + 1)};
    pos_ = i + 1;
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct LeafSite {
  std::string species;
  SourceSpan span;
};

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : text_(text), toks_(Lexer(text).run()) {}

  SystemDef run() {
    while (peek().kind != Tok::End) declaration();
    if (!tree_) {
      throw ParseError({{peek().span, "syntax-error", "missing system declaration"}});
    }
    SystemDef sys;
    sys.tree = *tree_;
    sys.step_size = step_.value_or(1);
    sys.params = params_;
    sys.rates = rates_;
    for (auto& d : decls_) {
      auto it = max_.find(d.def.name);
      if (it == max_.end()) {
        diags_.push_back({d.span, "missing-max", "no max declaration for species " + d.def.name});
      } else {
        d.def.max_count = it->second.first;
      }
      sys.species.push_back(d.def);
    }
    for (const auto& [name, entry] : max_) {
      if (sys.find_species(name) == nullptr) {
        diags_.push_back({entry.second, "unknown-species", "max given for undeclared species " + name});
      }
    }
    validate(sys);
    if (!diags_.empty()) throw ParseError(std::move(diags_));
    return sys;
  }

 private:
  struct SpeciesDecl {
    SpeciesDef def;
    SourceSpan span;
  };

  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError({{at.span, "syntax-error", msg}});
  }

  const Token& expect(Tok kind, std::string_view what = {}) {
    if (peek().kind != kind) {
      std::string msg = "expected ";
      msg += what.empty() ? describe(kind) : what;
      msg += ", found ";
      msg += peek().kind == Tok::End ? std::string("end of input") : "'" + peek().text + "'";
      fail(peek(), msg);
    }
    return advance();
  }

  std::int64_t integer(const Token& t) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || v > (std::int64_t{1} << 40)) fail(t, "integer out of range: " + t.text);
    return v;
  }

  SourceSpan cover(const SourceSpan& a, const SourceSpan& b) const {
    return {a.line, a.column, a.begin, b.end};
  }

  void declaration() {
    const Token& kw = expect(Tok::Ident, "declaration keyword");
    if (kw.text == "step") {
      expect(Tok::Equals);
      auto v = integer(expect(Tok::Int));
      auto& semi = expect(Tok::Semi);
      if (step_) diags_.push_back({cover(kw.span, semi.span), "duplicate-step", "step declared twice"});
      step_ = v;
    } else if (kw.text == "max") {
      const auto& name = expect(Tok::Ident, "species name");
      expect(Tok::Equals);
      auto v = integer(expect(Tok::Int));
      auto& semi = expect(Tok::Semi);
      if (!max_.emplace(name.text, std::make_pair(v, cover(kw.span, semi.span))).second) {
        diags_.push_back({cover(kw.span, semi.span), "duplicate-max", "max declared twice for " + name.text});
      }
    } else if (kw.text == "species") {
      species_decl(kw);
    } else if (kw.text == "system") {
      expect(Tok::Equals);
      sys_begin_ = kw.span;
      auto tree = composition();
      auto& semi = expect(Tok::Semi);
      sys_span_ = cover(kw.span, semi.span);
      if (tree_) diags_.push_back({sys_span_, "duplicate-system", "system declared twice"});
      tree_ = std::move(tree);
    } else if (kw.text == "param" || kw.text == "rate") {
      const auto& name = expect(Tok::Ident, "name");
      expect(Tok::Equals);
      const auto& value = expect(Tok::String);
      auto& semi = expect(Tok::Semi);
      auto& target = kw.text == "param" ? params_ : rates_;
      if (!target.emplace(name.text, value.text).second) {
        diags_.push_back({cover(kw.span, semi.span), "duplicate-" + kw.text,
                          kw.text + " " + name.text + " declared twice"});
      }
    } else {
      fail(kw, "unknown declaration '" + kw.text + "'");
    }
  }

  void species_decl(const Token& kw) {
    const auto& name = expect(Tok::Ident, "species name");
    expect(Tok::Equals);
    SpeciesDef def;
    def.name = name.text;
    do {
      expect(Tok::LParen);
      const auto& action = expect(Tok::Ident, "action name");
      expect(Tok::Comma);
      const auto& k = expect(Tok::Int, "stoichiometric coefficient");
      expect(Tok::RParen);
      Prefix p{action.text, static_cast<int>(integer(k)), Role::Reactant};
      switch (peek().kind) {
        case Tok::Reactant: p.role = Role::Reactant; break;
        case Tok::Product: p.role = Role::Product; break;
        case Tok::Activator: p.role = Role::Activator; break;
        case Tok::Inhibitor: p.role = Role::Inhibitor; break;
        case Tok::Modifier: p.role = Role::GenericModifier; break;
        default: fail(peek(), "expected prefix operator (<<, >>, (+), (-), (.))");
      }
      advance();
      const auto& cont = expect(Tok::Ident, "species name");
      if (cont.text != def.name) {
        diags_.push_back({cont.span, "continuation-mismatch",
                          "summand of " + def.name + " must continue as " + def.name +
                              ", not " + cont.text});
      }
      def.prefixes.push_back(std::move(p));
    } while (peek().kind == Tok::Plus && (advance(), true));
    const auto& semi = expect(Tok::Semi);
    decls_.push_back({std::move(def), cover(kw.span, semi.span)});
  }

  CompositionTree composition() {
    auto left = primary();
    for (;;) {
      Cooperation coop;
      if (peek().kind == Tok::CoopAll) {
        advance();
      } else if (peek().kind == Tok::LAngle) {
        advance();
        coop.shared_all = false;
        // `<>` is the empty set: pure interleaving
        if (peek().kind != Tok::RAngle) {
          coop.actions.insert(expect(Tok::Ident, "action name").text);
          while (peek().kind == Tok::Comma) {
            advance();
            coop.actions.insert(expect(Tok::Ident, "action name").text);
          }
        }
        expect(Tok::RAngle);
      } else {
        return left;
      }
      auto right = primary();
      left = CompositionTree::node(std::move(left), std::move(coop), std::move(right));
    }
  }

  CompositionTree primary() {
    if (peek().kind == Tok::LParen) {
      advance();
      auto inner = composition();
      expect(Tok::RParen);
      return inner;
    }
    const auto& name = expect(Tok::Ident, "species leaf");
    expect(Tok::LBracket);
    const auto& lvl = expect(Tok::Int, "initial level");
    const auto& close = expect(Tok::RBracket);
    leaf_sites_.push_back({name.text, cover(name.span, close.span)});
    return CompositionTree::leaf(name.text, static_cast<int>(integer(lvl)));
  }

  SourceSpan species_span(const std::string& name) const {
    for (const auto& d : decls_) {
      if (d.def.name == name) return d.span;
    }
    return sys_span_;
  }

  SourceSpan leaf_span(const std::string& name, std::size_t occurrence = 0) const {
    for (const auto& l : leaf_sites_) {
      if (l.species == name && occurrence-- == 0) return l.span;
    }
    return sys_span_;
  }

  void validate(const SystemDef& sys) {
    std::map<std::string, int> seen_decl;
    for (const auto& d : decls_) {
      if (seen_decl[d.def.name]++ == 0) {
        for (const auto& issue : validate_species(d.def)) {
          if (issue.kind == IssueKind::NonPositiveMax && !max_.count(d.def.name)) continue;
          diags_.push_back({d.span, std::string(issue_name(issue.kind)), issue.message});
        }
      }
    }
    std::map<std::string, std::size_t> repeats;
    for (const auto& issue : validate_system(sys)) {
      switch (issue.kind) {
        case IssueKind::RepeatedSpecies: {
          // declared twice vs. used twice
          std::size_t occ = ++repeats[issue.subject];
          SourceSpan at = seen_decl[issue.subject] > 1 && occ == 1 ? species_span(issue.subject)
                                                                  : leaf_span(issue.subject, 1);
          diags_.push_back({at, "repeated-species", issue.message});
          break;
        }
        case IssueKind::UndeclaredSpecies:
        case IssueKind::LevelOutOfRange:
          diags_.push_back({leaf_span(issue.subject), std::string(issue_name(issue.kind)),
                            issue.message});
          break;
        case IssueKind::DanglingCoopAction:
        case IssueKind::NonPositiveStep:
          diags_.push_back({sys_span_, std::string(issue_name(issue.kind)), issue.message});
          break;
        default:
          break;  // species-level issues reported above
      }
    }
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
  std::vector<SpeciesDecl> decls_;
  std::map<std::string, std::pair<std::int64_t, SourceSpan>> max_;
  std::map<std::string, std::string> params_;
  std::map<std::string, std::string> rates_;
  std::optional<std::int64_t> step_;
  std::optional<CompositionTree> tree_;
  std::vector<LeafSite> leaf_sites_;
  SourceSpan sys_begin_;
  SourceSpan sys_span_;
};

std::string_view operator_spelling(Role r) {
  switch (r) {
    case Role::Reactant: return "<<";
    case Role::Product: return ">>";
    case Role::Activator: return "(+)";
    case Role::Inhibitor: return "(-)";
    case Role::GenericModifier: return "(.)";
  }
  return "?";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

void render_tree(const CompositionTree& t, std::ostream& out) {
  if (t.is_leaf()) {
    out << t.as_leaf().species << "[" << t.as_leaf().level << "]";
    return;
  }
  const auto& n = t.as_node();
  render_tree(*n.left, out);
  if (n.coop.shared_all) {
    out << " <*> ";
  } else {
    out << " <";
    bool first = true;
    for (const auto& a : n.coop.actions) {
      out << (first ? "" : ",") << a;
      first = false;
    }
    out << "> ";
  }
  if (n.right->is_leaf()) {
    render_tree(*n.right, out);
  } else {
    out << "(";
    render_tree(*n.right, out);
    out << ")";
  }
}

}  // namespace

bool is_identifier(std::string_view name) {
  return !name.empty() && scan_identifier(name, 0) == name.size();
}

SystemDef parse_model(std::string_view text) { return ModelParser(text).run(); }

std::string render_model(const SystemDef& sys) {
  std::ostringstream out;
  out << "step = " << sys.step_size << ";\n";
  for (const auto& [k, v] : sys.params) out << "param " << k << " = " << quote(v) << ";\n";
  for (const auto& [k, v] : sys.rates) out << "rate " << k << " = " << quote(v) << ";\n";
  for (const auto& s : sys.species) {
    out << "\nmax " << s.name << " = " << s.max_count << ";\n";
    out << "species " << s.name << " =";
    bool first = true;
    for (const auto& p : s.prefixes) {
      out << (first ? " " : "\n    + ") << "(" << p.action << "," << p.stoich << ") "
          << operator_spelling(p.role) << " " << s.name;
      first = false;
    }
    out << ";\n";
  }
  out << "\nsystem = ";
  render_tree(sys.tree, out);
  out << ";\n";
  return out.str();
}

EquivConfig parse_config(std::string_view text, std::span<const SystemDef* const> models) {
  EquivConfig cfg;
  std::vector<Diagnostic> diags;
  std::map<std::string, SourceSpan> fast_at;
  std::map<std::string, SourceSpan> slow_at;
  std::map<std::string, SourceSpan> delta_at;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  while (offset <= text.size()) {
    ++line_no;
    auto nl = text.find('\n', offset);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(offset, nl - offset);
    const std::size_t line_start = offset;
    offset = nl + 1;
    if (auto c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);
    if (auto c = line.find('#'); c != std::string_view::npos) line = line.substr(0, c);
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    std::string_view body = trim(line);
    if (body.empty()) continue;
    const std::size_t col = static_cast<std::size_t>(body.data() - text.data()) - line_start + 1;
    SourceSpan at{line_no, col, static_cast<std::size_t>(body.data() - text.data()),
                  static_cast<std::size_t>(body.data() - text.data()) + body.size()};
    auto colon = body.find(':');
    if (colon == std::string_view::npos) {
      diags.push_back({at, "syntax-error", "expected 'key: value'"});
      continue;
    }
    std::string key(trim(body.substr(0, colon)));
    std::string_view value = trim(body.substr(colon + 1));
    if (key == "alias") {
      auto eq = value.find('=');
      std::string from(trim(value.substr(0, eq == std::string_view::npos ? 0 : eq)));
      std::string to(eq == std::string_view::npos ? "" : trim(value.substr(eq + 1)));
      if (eq == std::string_view::npos || !is_identifier(from) || !is_identifier(to)) {
        diags.push_back({at, "syntax-error", "expected 'alias: Species' = Species'"});
      } else if (!cfg.alias.emplace(from, to).second) {
        diags.push_back({at, "duplicate-alias", "alias for " + from + " given twice"});
      }
      continue;
    }
    std::set<std::string>* target = nullptr;
    std::map<std::string, SourceSpan>* where = nullptr;
    if (key == "fast") {
      target = &cfg.fast;
      where = &fast_at;
    } else if (key == "slow") {
      target = &cfg.slow;
      where = &slow_at;
    } else if (key == "delta") {
      target = &cfg.delta;
      where = &delta_at;
    } else {
      diags.push_back({at, "syntax-error", "unknown key '" + key + "'"});
      continue;
    }
    while (!value.empty()) {
      auto comma = value.find(',');
      std::string item(trim(value.substr(0, comma)));
      if (!is_identifier(item)) {
        diags.push_back({at, "syntax-error", "invalid name '" + item + "' in " + key});
      } else {
        target->insert(item);
        where->emplace(item, at);
      }
      if (comma == std::string_view::npos) break;
      value = value.substr(comma + 1);
    }
  }
  for (const auto& a : cfg.fast) {
    if (cfg.slow.count(a)) {
      diags.push_back({slow_at[a], "action-in-both-classes", "action " + a + " is both fast and slow"});
    }
  }
  if (!models.empty()) {
    std::set<std::string> known;
    for (const auto* m : models) {
      for (const auto& s : m->species_order()) known.insert(cfg.canonical(s));
    }
    for (const auto& d : cfg.delta) {
      if (!known.count(cfg.canonical(d))) {
        diags.push_back({delta_at[d], "unknown-species-in-delta", "delta species " + d + " occurs in no model"});
      }
    }
  }
  if (!diags.empty()) throw ParseError(std::move(diags));
  return cfg;
}

std::string render_config(const EquivConfig& cfg) {
  std::ostringstream out;
  auto list = [&](const char* key, const std::set<std::string>& xs) {
    out << key << ":";
    bool first = true;
    for (const auto& x : xs) {
      out << (first ? " " : ", ") << x;
      first = false;
    }
    out << "\n";
  };
  list("fast", cfg.fast);
  list("slow", cfg.slow);
  list("delta", cfg.delta);
  for (const auto& [from, to] : cfg.alias) out << "alias: " << from << " = " << to << "\n";
  return out.str();
}

}  // namespace fastslow
