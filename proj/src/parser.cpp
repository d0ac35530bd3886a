#include "tachyon/parser.hpp"

#include <cctype>
#include <sstream>

namespace tachyon {

std::string format_diagnostic(const Diagnostic& d, const std::string& file) {
  std::ostringstream os;
  if (!file.empty()) os << file << ':';
  os << d.span.line << ':' << d.span.column << ": " << (d.severity == Severity::Error ? "error" : "warning")
     << ": " << d.message;
  return os.str();
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int64_t value = 0;
  SourceSpan span;
};

constexpr std::string_view kPuncts[] = {"-->", "->", "<=", ">=", "==", "!=", "&&", "||", ":=", "<>", "[]",
                                        "+",   "-",  "*",  "/",  "%",  "<",  ">",  "!",  "=",  "(",  ")",
                                        "[",   "]",  "{",  "}",  ",",  ";",  ":",  ".",  "?"};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run(std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.span = here(0);
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t b = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
        t.kind = Token::Kind::Ident;
        t.text = std::string(src_.substr(b, pos_ - b));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t b = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.kind = Token::Kind::Int;
        t.text = std::string(src_.substr(b, pos_ - b));
        try {
          std::size_t used = 0;
          t.value = std::stoll(t.text, &used);
        } catch (const std::exception&) {
          diags.push_back({t.span, "integer literal out of range", Severity::Error});
        }
      } else {
        bool found = false;
        for (auto p : kPuncts) {
          if (src_.substr(pos_, p.size()) == p) {
            t.kind = Token::Kind::Punct;
            t.text = std::string(p);
            for (std::size_t k = 0; k < p.size(); ++k) advance();
            found = true;
            break;
          }
        }
        if (!found) {
          diags.push_back({here(1), std::string("unexpected character '") + c + "'", Severity::Error});
          advance();
          continue;
        }
      }
      t.span.length = pos_ - t.span.offset;
      out.push_back(std::move(t));
    }
  }

 private:
  SourceSpan here(std::size_t len) const { return {pos_, len, line_, col_}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' || src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ < src_.size()) {
          advance();
          advance();
        }
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags) : toks_(std::move(toks)), diags_(diags) {}

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is(std::string_view p, std::size_t k = 0) const {
    const Token& t = peek(k);
    return t.kind == Token::Kind::Punct && t.text == p;
  }
  bool is_kw(std::string_view w, std::size_t k = 0) const {
    const Token& t = peek(k);
    return t.kind == Token::Kind::Ident && t.text == w;
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(std::string_view p) {
    if (!is(p)) return false;
    next();
    return true;
  }
  bool accept_kw(std::string_view w) {
    if (!is_kw(w)) return false;
    next();
    return true;
  }

  [[noreturn]] void error(const std::string& msg) const { throw CompileError(peek().span, msg); }

  static std::string describe(const Token& t) {
    if (t.kind == Token::Kind::End) return "end of input";
    return "'" + t.text + "'";
  }

  void expect(std::string_view p) {
    if (!accept(p)) error("expected '" + std::string(p) + "' but found " + describe(peek()));
  }
  void expect_kw(std::string_view w) {
    if (!accept_kw(w)) error("expected '" + std::string(w) + "' but found " + describe(peek()));
  }
  std::string ident(const char* what) {
    if (peek().kind != Token::Kind::Ident || is_reserved(peek().text))
      error(std::string("expected ") + what + " but found " + describe(peek()));
    return next().text;
  }

  static bool is_reserved(const std::string& s) {
    static const char* words[] = {"const",      "clock",  "var",      "chan",      "broadcast", "macro",
                                  "template",   "init",   "urgent",   "committed", "location",  "branchpoint",
                                  "edge",       "select", "guard",    "sync",      "update",    "controllable",
                                  "uncontrollable", "weight", "invariant", "exit_weight", "system", "if",
                                  "else",       "int",    "bool",     "true",      "false",     "and",
                                  "or",         "not",    "imply"};
    for (const char* w : words)
      if (s == w) return true;
    return false;
  }

  SourceSpan span_from(const SourceSpan& start) const {
    const Token& prev = toks_[pos_ == 0 ? 0 : pos_ - 1];
    SourceSpan s = start;
    std::size_t end = prev.span.offset + prev.span.length;
    s.length = end > start.offset ? end - start.offset : 0;
    return s;
  }

  // -- expressions ----------------------------------------------------------

  Expr expr() { return imply(); }

  Expr imply() {
    SourceSpan s = peek().span;
    Expr l = disj();
    if (accept_kw("imply")) {
      Expr r = imply();
      return Expr::binary(BinaryOp::Imply, std::move(l), std::move(r), span_from(s));
    }
    return l;
  }

  Expr disj() {
    SourceSpan s = peek().span;
    Expr l = conj();
    while (accept("||") || accept_kw("or")) {
      Expr r = conj();
      l = Expr::binary(BinaryOp::Or, std::move(l), std::move(r), span_from(s));
    }
    return l;
  }

  Expr conj() {
    SourceSpan s = peek().span;
    Expr l = comparison();
    while (accept("&&") || accept_kw("and")) {
      Expr r = comparison();
      l = Expr::binary(BinaryOp::And, std::move(l), std::move(r), span_from(s));
    }
    return l;
  }

  std::optional<BinaryOp> comparison_op() const {
    static const std::pair<const char*, BinaryOp> ops[] = {{"<", BinaryOp::Lt},  {"<=", BinaryOp::Le},
                                                           {"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne},
                                                           {">=", BinaryOp::Ge}, {">", BinaryOp::Gt}};
    for (const auto& [t, op] : ops)
      if (is(t)) return op;
    return std::nullopt;
  }

  Expr comparison() {
    SourceSpan s = peek().span;
    Expr l = additive();
    while (auto op = comparison_op()) {
      next();
      Expr r = additive();
      l = Expr::binary(*op, std::move(l), std::move(r), span_from(s));
    }
    return l;
  }

  Expr additive() {
    SourceSpan s = peek().span;
    Expr l = multiplicative();
    while (is("+") || is("-")) {
      BinaryOp op = next().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      Expr r = multiplicative();
      l = Expr::binary(op, std::move(l), std::move(r), span_from(s));
    }
    return l;
  }

  Expr multiplicative() {
    SourceSpan s = peek().span;
    Expr l = unary();
    while (is("*") || is("/") || is("%")) {
      const std::string& t = next().text;
      BinaryOp op = t == "*" ? BinaryOp::Mul : t == "/" ? BinaryOp::Div : BinaryOp::Mod;
      Expr r = unary();
      l = Expr::binary(op, std::move(l), std::move(r), span_from(s));
    }
    return l;
  }

  Expr unary() {
    SourceSpan s = peek().span;
    if (accept("-")) {
      Expr e = unary();
      if (e.kind == Expr::Kind::IntLit && e.value != INT64_MIN) {
        e.value = -e.value;
        e.span = span_from(s);
        return e;
      }
      return Expr::unary(UnaryOp::Neg, std::move(e), span_from(s));
    }
    if (accept("!") || accept_kw("not")) {
      Expr e = unary();
      return Expr::unary(UnaryOp::Not, std::move(e), span_from(s));
    }
    return primary();
  }

  int64_t signed_int() {
    bool neg = accept("-");
    if (peek().kind != Token::Kind::Int) error("expected integer but found " + describe(peek()));
    int64_t v = next().value;
    return neg ? -v : v;
  }

  Expr primary() {
    SourceSpan s = peek().span;
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      next();
      return Expr::int_lit(t.value, s);
    }
    if (accept_kw("true")) return Expr::bool_lit(true, s);
    if (accept_kw("false")) return Expr::bool_lit(false, s);
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.kind == Token::Kind::Ident && !is_reserved(t.text)) {
      std::string name = next().text;
      if (is("(")) {
        next();
        std::vector<int64_t> args;
        if (!is(")")) {
          do {
            args.push_back(signed_int());
          } while (accept(","));
        }
        expect(")");
        expect(".");
        std::string member = ident("member name");
        return Expr::member_ref(std::move(name), std::move(args), true, std::move(member), span_from(s));
      }
      if (accept(".")) {
        std::string member = ident("member name");
        return Expr::member_ref(std::move(name), {}, false, std::move(member), span_from(s));
      }
      if (accept("[")) {
        Expr idx = expr();
        expect("]");
        return Expr::index(Expr::name_ref(name, s), std::move(idx), span_from(s));
      }
      return Expr::name_ref(std::move(name), s);
    }
    error("expected expression but found " + describe(t));
  }

  // -- statements -----------------------------------------------------------

  Stmt stmt() {
    SourceSpan s = peek().span;
    Stmt st;
    if (accept_kw("if")) {
      st.kind = Stmt::Kind::If;
      expect("(");
      st.cond = expr();
      expect(")");
      st.then_body = block();
      if (accept_kw("else")) st.else_body = block();
      st.span = span_from(s);
      return st;
    }
    std::string name = ident("statement");
    if (accept("(")) {
      expect(")");
      st.kind = Stmt::Kind::Call;
      st.callee = name;
      st.span = span_from(s);
      return st;
    }
    st.kind = Stmt::Kind::Assign;
    if (accept("[")) {
      Expr idx = expr();
      expect("]");
      st.target = Expr::index(Expr::name_ref(name, s), std::move(idx), span_from(s));
    } else {
      st.target = Expr::name_ref(name, s);
    }
    if (!accept(":=") && !accept("=")) error("expected ':=' but found " + describe(peek()));
    st.value = expr();
    st.span = span_from(s);
    return st;
  }

  Update block() {
    expect("{");
    Update u;
    while (!accept("}")) {
      if (at_end()) error("expected '}' but found end of input");
      if (accept(";")) continue;
      u.push_back(stmt());
      if (u.back().kind != Stmt::Kind::If && !is("}")) expect(";");
    }
    return u;
  }

  // -- declarations ---------------------------------------------------------

  bool data_decl(Declarations& d, bool global) {
    SourceSpan s = peek().span;
    if (accept_kw("const")) {
      ConstDecl c;
      c.name = ident("constant name");
      expect("=");
      c.value = expr();
      expect(";");
      c.span = span_from(s);
      d.consts.push_back(std::move(c));
      return true;
    }
    if (accept_kw("clock")) {
      do {
        SourceSpan cs = peek().span;
        ClockDecl c;
        c.name = ident("clock name");
        c.span = span_from(cs);
        d.clocks.push_back(std::move(c));
      } while (accept(","));
      expect(";");
      return true;
    }
    if (accept_kw("var")) {
      VarDecl v;
      v.name = ident("variable name");
      expect(":");
      if (accept_kw("int")) v.type = Type::Int;
      else if (accept_kw("bool")) v.type = Type::Bool;
      else error("expected 'int' or 'bool' but found " + describe(peek()));
      if (accept("[")) {
        v.size = expr();
        expect("]");
      }
      if (accept("=")) v.init = expr();
      expect(";");
      v.span = span_from(s);
      d.vars.push_back(std::move(v));
      return true;
    }
    if (!global) return false;
    if (is_kw("chan") || is_kw("broadcast")) {
      bool broadcast = accept_kw("broadcast");
      expect_kw("chan");
      do {
        SourceSpan cs = peek().span;
        ChanDecl c;
        c.broadcast = broadcast;
        c.name = ident("channel name");
        if (accept("[")) {
          c.size = expr();
          expect("]");
        }
        c.span = span_from(cs);
        d.chans.push_back(std::move(c));
      } while (accept(","));
      expect(";");
      return true;
    }
    if (accept_kw("macro")) {
      MacroDecl m;
      m.name = ident("macro name");
      if (accept("(")) expect(")");
      m.body = block();
      accept(";");
      m.span = span_from(s);
      d.macros.push_back(std::move(m));
      return true;
    }
    return false;
  }

  LocationDecl location() {
    SourceSpan s = peek().span;
    LocationDecl l;
    while (true) {
      if (accept_kw("init")) l.initial = true;
      else if (accept_kw("urgent")) l.kind = LocationKind::Urgent;
      else if (accept_kw("committed")) l.kind = LocationKind::Committed;
      else break;
    }
    if (accept_kw("branchpoint")) l.branchpoint = true;
    else expect_kw("location");
    l.name = ident("location name");
    if (accept("{")) {
      while (!accept("}")) {
        if (accept_kw("invariant")) {
          l.invariant = expr();
        } else if (accept_kw("exit_weight")) {
          l.exit_weight = expr();
        } else {
          error("expected location attribute but found " + describe(peek()));
        }
        expect(";");
      }
      accept(";");
    } else {
      expect(";");
    }
    l.span = span_from(s);
    return l;
  }

  EdgeDecl edge() {
    SourceSpan s = peek().span;
    expect_kw("edge");
    EdgeDecl e;
    e.source = ident("location name");
    expect("->");
    e.target = ident("location name");
    if (accept("{")) {
      while (!accept("}")) {
        SourceSpan as = peek().span;
        if (accept_kw("select")) {
          do {
            SourceSpan ss = peek().span;
            SelectDecl sd;
            sd.name = ident("select name");
            expect(":");
            expect_kw("int");
            expect("[");
            sd.lo = expr();
            expect(",");
            sd.hi = expr();
            expect("]");
            sd.span = span_from(ss);
            e.selects.push_back(std::move(sd));
          } while (accept(","));
        } else if (accept_kw("guard")) {
          e.guard = expr();
        } else if (accept_kw("sync")) {
          SyncDecl sd;
          sd.channel = ident("channel name");
          if (accept("[")) {
            sd.index = expr();
            expect("]");
          }
          if (accept("!")) sd.kind = SyncKind::Send;
          else if (accept("?")) sd.kind = SyncKind::Receive;
          else error("expected '!' or '?' but found " + describe(peek()));
          sd.span = span_from(as);
          e.sync = std::move(sd);
        } else if (accept_kw("update")) {
          do {
            e.update.push_back(stmt());
          } while (accept(","));
        } else if (accept_kw("controllable")) {
          e.controllable = true;
        } else if (accept_kw("uncontrollable")) {
          e.controllable = false;
        } else if (accept_kw("weight")) {
          e.weight = expr();
        } else {
          error("expected edge attribute but found " + describe(peek()));
        }
        expect(";");
      }
      accept(";");
    } else {
      expect(";");
    }
    e.span = span_from(s);
    return e;
  }

  TemplateDecl templ() {
    SourceSpan s = peek().span;
    expect_kw("template");
    TemplateDecl t;
    t.name = ident("template name");
    if (accept("(")) {
      if (!is(")")) {
        do {
          SourceSpan ps = peek().span;
          Param p;
          p.name = ident("parameter name");
          expect(":");
          expect_kw("int");
          p.span = span_from(ps);
          t.params.push_back(std::move(p));
        } while (accept(","));
      }
      expect(")");
    }
    expect("{");
    while (!accept("}")) {
      if (at_end()) error("expected '}' but found end of input");
      if (data_decl(t.locals, false)) continue;
      if (is_kw("edge")) {
        t.edges.push_back(edge());
      } else if (is_kw("init") || is_kw("urgent") || is_kw("committed") || is_kw("location") ||
                 is_kw("branchpoint")) {
        t.locations.push_back(location());
      } else {
        error("expected declaration, location or edge but found " + describe(peek()));
      }
    }
    accept(";");
    t.span = span_from(s);
    return t;
  }

  void system(ModelAst& m) {
    expect_kw("system");
    if (accept(";")) return;
    do {
      SourceSpan s = peek().span;
      InstanceDecl inst;
      inst.template_name = ident("template name");
      if (accept("(")) {
        inst.call = true;
        if (!is(")")) {
          do {
            inst.args.push_back(expr());
          } while (accept(","));
        }
        expect(")");
      }
      inst.span = span_from(s);
      m.system.push_back(std::move(inst));
    } while (accept(","));
    expect(";");
  }

  bool at_top_keyword() const {
    for (const char* w : {"const", "clock", "var", "chan", "broadcast", "macro", "template", "system"})
      if (is_kw(w)) return true;
    return false;
  }

  void recover() {
    int depth = 0;
    next();
    while (!at_end()) {
      if (depth == 0 && at_top_keyword()) return;
      if (is("{")) ++depth;
      if (is("}") && depth > 0) --depth;
      next();
    }
  }

  ModelAst model() {
    ModelAst m;
    bool any = false;
    bool seen_system = false;
    while (!at_end() && diags_.size() < 20) {
      try {
        if (data_decl(m.globals, true)) {
          any = true;
        } else if (is_kw("template")) {
          m.templates.push_back(templ());
          any = true;
        } else if (is_kw("system")) {
          if (seen_system) error("duplicate system declaration");
          system(m);
          seen_system = true;
          any = true;
        } else {
          error("expected declaration but found " + describe(peek()));
        }
      } catch (const CompileError& e) {
        diags_.push_back(e.diagnostic());
        recover();
      }
    }
    if (!any && diags_.empty()) diags_.push_back({peek().span, "expected declaration", Severity::Error});
    return m;
  }

  // -- queries ----------------------------------------------------------------

  std::vector<std::string> name_list() {
    std::vector<std::string> out;
    expect("{");
    if (!is("}")) {
      do {
        std::string n = ident("name");
        while (accept(".")) n += "." + ident("member name");
        out.push_back(std::move(n));
      } while (accept(","));
    }
    expect("}");
    return out;
  }

  Query query() {
    Query q;
    if (is_kw("strategy")) {
      next();
      q.kind = Query::Kind::StrategyMin;
      q.name = ident("strategy name");
      expect("=");
      if (!is_kw("minE")) error("expected 'minE' but found " + describe(peek()));
      next();
      expect("(");
      q.cost = ident("cost variable");
      expect(")");
      expect("[");
      expect("<=");
      q.horizon_expr = expr();
      expect("]");
      q.observed_discrete = name_list();
      expect("->");
      q.observed_continuous = name_list();
      expect(":");
      expect("<>");
      q.phi = expr();
    } else if (is_kw("E") && is("<>", 1)) {
      next();
      next();
      q.kind = Query::Kind::Reach;
      q.phi = expr();
    } else if (is_kw("A") && is("[]", 1)) {
      next();
      next();
      q.kind = Query::Kind::Invariant;
      q.phi = expr();
    } else if (is_kw("E") && is("[", 1)) {
      next();
      next();
      q.kind = Query::Kind::Estimate;
      if (!is_kw("time")) error("expected 'time' but found " + describe(peek()));
      next();
      expect("<=");
      q.horizon_expr = expr();
      expect(";");
      q.runs_expr = expr();
      expect("]");
      expect("(");
      if (!is_kw("max")) error("expected 'max' but found " + describe(peek()));
      next();
      expect(":");
      q.value = expr();
      expect(")");
      if (is_kw("under")) {
        next();
        q.under = ident("strategy name");
      }
    } else {
      SourceSpan s = peek().span;
      Expr p = expr();
      if (accept("->") || accept("-->")) {
        q.kind = Query::Kind::LeadsTo;
        q.phi = std::move(p);
        q.psi = expr();
      } else if (at_end()) {
        throw CompileError(span_from(s), "missing quantifier (expected E<>, A[] or a leads-to)");
      } else {
        error("expected '-->' but found " + describe(peek()));
      }
    }
    if (!at_end()) error("unexpected " + describe(peek()) + " after query");
    return q;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// ---------------------------------------------------------------------------
// Pretty printer

void print_data(std::ostream& os, const Declarations& d, const std::string& ind) {
  for (const auto& c : d.consts) os << ind << "const " << c.name << " = " << to_string(c.value) << ";\n";
  for (const auto& c : d.clocks) os << ind << "clock " << c.name << ";\n";
  for (const auto& v : d.vars) {
    os << ind << "var " << v.name << ": " << (v.type == Type::Bool ? "bool" : "int");
    if (v.size) os << '[' << to_string(*v.size) << ']';
    if (v.init) os << " = " << to_string(*v.init);
    os << ";\n";
  }
  for (const auto& c : d.chans) {
    os << ind << (c.broadcast ? "broadcast chan " : "chan ") << c.name;
    if (c.size) os << '[' << to_string(*c.size) << ']';
    os << ";\n";
  }
  for (const auto& m : d.macros) {
    os << ind << "macro " << m.name << " {\n";
    for (const auto& s : m.body) os << ind << "  " << to_string(s) << ";\n";
    os << ind << "}\n";
  }
}

void print_template(std::ostream& os, const TemplateDecl& t) {
  os << "template " << t.name << '(';
  for (std::size_t i = 0; i < t.params.size(); ++i) os << (i ? ", " : "") << t.params[i].name << ": int";
  os << ") {\n";
  print_data(os, t.locals, "  ");
  for (const auto& l : t.locations) {
    os << "  ";
    if (l.initial) os << "init ";
    if (l.kind == LocationKind::Urgent) os << "urgent ";
    if (l.kind == LocationKind::Committed) os << "committed ";
    os << (l.branchpoint ? "branchpoint " : "location ") << l.name;
    if (l.invariant || l.exit_weight) {
      os << " {";
      if (l.invariant) os << " invariant " << to_string(*l.invariant) << ";";
      if (l.exit_weight) os << " exit_weight " << to_string(*l.exit_weight) << ";";
      os << " }\n";
    } else {
      os << ";\n";
    }
  }
  for (const auto& e : t.edges) {
    os << "  edge " << e.source << " -> " << e.target;
    std::vector<std::string> attrs;
    if (!e.selects.empty()) {
      std::string s = "select ";
      for (std::size_t i = 0; i < e.selects.size(); ++i) {
        const auto& sd = e.selects[i];
        if (i) s += ", ";
        s += sd.name + ": int[" + to_string(sd.lo) + ", " + to_string(sd.hi) + "]";
      }
      attrs.push_back(s);
    }
    if (e.guard) attrs.push_back("guard " + to_string(*e.guard));
    if (e.sync) {
      std::string s = "sync " + e.sync->channel;
      if (e.sync->index) s += "[" + to_string(*e.sync->index) + "]";
      s += e.sync->kind == SyncKind::Send ? "!" : "?";
      attrs.push_back(s);
    }
    if (!e.update.empty()) attrs.push_back("update " + to_string(e.update, ", "));
    if (e.controllable) attrs.push_back("controllable");
    if (e.weight) attrs.push_back("weight " + to_string(*e.weight));
    if (attrs.empty()) {
      os << ";\n";
    } else {
      os << " {";
      for (const auto& a : attrs) os << ' ' << a << ';';
      os << " }\n";
    }
  }
  os << "}\n";
}

}  // namespace

Parsed<ModelAst> parse_model_ast(std::string_view text) {
  Parsed<ModelAst> out;
  auto toks = Lexer(text).run(out.diagnostics);
  Parser p(std::move(toks), out.diagnostics);
  ModelAst m = p.model();
  if (out.diagnostics.size() > 20) out.diagnostics.resize(20);
  if (out.diagnostics.empty()) out.value = std::move(m);
  return out;
}

Parsed<TANetwork> parse_model(std::string_view text) {
  auto ast = parse_model_ast(text);
  if (!ast.ok()) return {std::nullopt, std::move(ast.diagnostics)};
  return compile_network(*ast);
}

Parsed<Query> parse_query(std::string_view line) {
  Parsed<Query> out;
  auto toks = Lexer(line).run(out.diagnostics);
  if (!out.diagnostics.empty()) return out;
  Parser p(std::move(toks), out.diagnostics);
  try {
    Query q = p.query();
    q.text = trim(line);
    q.span = {0, line.size(), 1, 1};
    out.value = std::move(q);
  } catch (const CompileError& e) {
    out.diagnostics.push_back(e.diagnostic());
  }
  return out;
}

Parsed<std::vector<Query>> parse_queries(std::string_view text) {
  Parsed<std::vector<Query>> out;
  out.value.emplace();
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    std::string t = trim(line);
    if (!t.empty() && t[0] != '#' && t.rfind("//", 0) != 0) {
      auto q = parse_query(line);
      for (auto d : q.diagnostics) {
        d.span.offset += start;
        d.span.line = line_no;
        out.diagnostics.push_back(d);
      }
      if (q.ok()) {
        q->span = {start, line.size(), line_no, 1};
        out.value->push_back(std::move(*q));
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

bool Query::operator==(const Query& o) const {
  return kind == o.kind && phi == o.phi && psi == o.psi && name == o.name && cost == o.cost &&
         observed_discrete == o.observed_discrete && observed_continuous == o.observed_continuous &&
         horizon_expr == o.horizon_expr && runs_expr == o.runs_expr && mode == o.mode && value == o.value &&
         under == o.under;
}

std::string to_string(const Query& q) {
  auto list = [](const std::vector<std::string>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return s + "}";
  };
  switch (q.kind) {
    case Query::Kind::Reach: return "E<> " + to_string(q.phi);
    case Query::Kind::Invariant: return "A[] " + to_string(q.phi);
    case Query::Kind::LeadsTo: return to_string(q.phi) + " --> " + to_string(q.psi);
    case Query::Kind::StrategyMin:
      return "strategy " + q.name + " = minE(" + q.cost + ")[<=" + to_string(q.horizon_expr) + "]" +
             list(q.observed_discrete) + " -> " + list(q.observed_continuous) + ": <> " + to_string(q.phi);
    case Query::Kind::Estimate: {
      std::string s = "E[time<=" + to_string(q.horizon_expr) + "; " + to_string(q.runs_expr) + "](" + q.mode +
                      ": " + to_string(q.value) + ")";
      if (q.under) s += " under " + *q.under;
      return s;
    }
  }
  return {};
}

void resolve_query(Query& q, const TANetwork& n) {
  auto scope = n.query_scope();
  auto predicate = [&](Expr& e) {
    if (typecheck_or_throw(e, *scope) != Type::Bool) throw CompileError(e.span, "type mismatch: predicate must be bool");
  };
  auto horizon = [&](Expr& e, const char* what) {
    typecheck_or_throw(e, *scope);
    auto v = constant_value(e);
    if (!v) throw CompileError(e.span, std::string(what) + " must be a constant expression");
    if (*v <= 0) throw CompileError(e.span, std::string(what) + " must be positive");
    return *v;
  };
  switch (q.kind) {
    case Query::Kind::Reach:
    case Query::Kind::Invariant: predicate(q.phi); break;
    case Query::Kind::LeadsTo:
      predicate(q.phi);
      predicate(q.psi);
      break;
    case Query::Kind::StrategyMin: {
      const Symbol* cost = scope->find(q.cost);
      if (!cost || cost->kind != RefKind::Var || cost->length != 0 || cost->type != Type::Int)
        throw CompileError(q.span, "cost '" + q.cost + "' must be an int variable");
      for (const auto& lists : {q.observed_discrete, q.observed_continuous}) {
        for (const auto& name : lists) {
          const Symbol* s = scope->find(name);
          if (!s && !n.find_slot(name) && !n.find_clock(name))
            throw CompileError(q.span, "unresolved name '" + name + "'");
        }
      }
      q.horizon = horizon(q.horizon_expr, "horizon");
      predicate(q.phi);
      break;
    }
    case Query::Kind::Estimate:
      q.horizon = horizon(q.horizon_expr, "horizon");
      q.runs = horizon(q.runs_expr, "run count");
      if (typecheck_or_throw(q.value, *scope) == Type::Clock)
        throw CompileError(q.value.span, "clock outside clock-constraint atom");
      break;
  }
}

std::string pretty_print(const ModelAst& ast) {
  std::ostringstream os;
  print_data(os, ast.globals, "");
  for (const auto& t : ast.templates) {
    os << '\n';
    print_template(os, t);
  }
  os << "\nsystem";
  for (std::size_t i = 0; i < ast.system.size(); ++i) {
    const auto& inst = ast.system[i];
    os << (i ? ", " : " ") << inst.template_name;
    if (inst.call) {
      os << '(';
      for (std::size_t k = 0; k < inst.args.size(); ++k) os << (k ? ", " : "") << to_string(inst.args[k]);
      os << ')';
    }
  }
  os << ";\n";
  return os.str();
}

std::string pretty_print(const TANetwork& n) { return pretty_print(n.ast); }

}  // namespace tachyon
