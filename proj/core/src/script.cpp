#include "loopforms/script.hpp"

#include <algorithm>
#include <sstream>

#include "loopforms/forms.hpp"
#include "loopforms/laurent.hpp"
#include "loopforms/loops.hpp"
#include "loopforms/poles.hpp"
#include "loopforms/slices.hpp"
#include "loopforms/supermatrix.hpp"
#include "loopforms/weil.hpp"

namespace loopforms::script {

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) { next(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    next();
    return t;
  }

 private:
  void next() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++col_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    cur_ = Token{Tok::End, "", line_, col_};
    if (pos_ >= s_.size()) return;
    char c = s_[pos_];
    cur_.line = line_;
    cur_.col = col_;
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      cur_.kind = Tok::Ident;
      cur_.text = s_.substr(start, pos_ - start);
    } else if (isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      cur_.kind = Tok::Int;
      cur_.text = s_.substr(start, pos_ - start);
    } else {
      cur_.kind = Tok::Punct;
      cur_.text = std::string(1, c);
      ++pos_;
      // two-character names for commands like psi-scaling are handled
      // at the parser level; every punctuation token is one character
    }
    col_ += static_cast<int>(cur_.text.size());
  }

  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token cur_;
};

// ---------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(const std::string& text) : lx_(text) {}

  Script parse_script() {
    Script s;
    bool have_command = false;
    while (lx_.peek().kind != Tok::End) {
      const Token& t = lx_.peek();
      if (t.kind != Tok::Ident) fail("expected a declaration or command keyword");
      const std::string& kw = t.text;
      if (kw == "even" || kw == "odd")
        s.vars.push_back(parse_vardecl());
      else if (kw == "form")
        s.forms.push_back(parse_formdecl());
      else if (kw == "loop")
        s.loops.push_back(parse_loopdecl());
      else if (kw == "poles")
        s.pole_families.push_back(parse_polesdecl());
      else if (kw == "matrix")
        s.matrices.push_back(parse_matrixdecl());
      else {
        s.command = parse_command();
        have_command = true;
        break;
      }
    }
    if (!have_command) fail("script needs one command");
    if (lx_.peek().kind != Tok::End) fail("trailing input after the command");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(lx_.peek().line, lx_.peek().col, msg + " (got '" +
                                                          (lx_.peek().kind == Tok::End
                                                               ? std::string("<end>")
                                                               : lx_.peek().text) +
                                                          "')");
  }

  Token expect_ident() {
    if (lx_.peek().kind != Tok::Ident) fail("expected an identifier");
    return lx_.take();
  }

  int expect_int() {
    bool neg = false;
    if (lx_.peek().kind == Tok::Punct && lx_.peek().text == "-") {
      lx_.take();
      neg = true;
    }
    if (lx_.peek().kind != Tok::Int) fail("expected an integer");
    int v = std::stoi(lx_.take().text);
    return neg ? -v : v;
  }

  void expect_punct(const char* p) {
    if (lx_.peek().kind != Tok::Punct || lx_.peek().text != p)
      fail(std::string("expected '") + p + "'");
    lx_.take();
  }

  bool accept_punct(const char* p) {
    if (lx_.peek().kind == Tok::Punct && lx_.peek().text == p) {
      lx_.take();
      return true;
    }
    return false;
  }

  bool accept_ident(const char* kw) {
    if (lx_.peek().kind == Tok::Ident && lx_.peek().text == kw) {
      lx_.take();
      return true;
    }
    return false;
  }

  VarDecl parse_vardecl() {
    VarDecl d;
    d.parity = lx_.take().text == "odd" ? Parity::Odd : Parity::Even;
    while (lx_.peek().kind == Tok::Ident && lx_.peek().text != "cap") {
      std::string n = lx_.take().text;
      if (n == "t" || n == "lambda" || n == "d") fail("'" + n + "' is reserved");
      d.names.push_back(std::move(n));
    }
    if (d.names.empty()) fail("expected variable names");
    if (accept_ident("cap")) d.cap = expect_int();
    expect_punct(";");
    return d;
  }

  FormDecl parse_formdecl() {
    lx_.take();  // form
    FormDecl d;
    d.name = expect_ident().text;
    expect_punct("=");
    d.value = parse_expr();
    expect_punct(";");
    return d;
  }

  CoordAssign parse_coordassign() {
    CoordAssign a;
    a.coord = expect_ident().text;
    expect_punct(":");
    a.value = parse_expr();
    return a;
  }

  LoopDecl parse_loopdecl() {
    lx_.take();  // loop
    LoopDecl d;
    d.name = expect_ident().text;
    expect_punct("=");
    d.coords.push_back(parse_coordassign());
    while (accept_punct(",")) d.coords.push_back(parse_coordassign());
    expect_punct(";");
    return d;
  }

  PolesDecl parse_polesdecl() {
    lx_.take();  // poles
    PolesDecl d;
    d.name = expect_ident().text;
    expect_punct("=");
    bool more = true;
    while (more) {
      if (!accept_ident("at")) fail("expected 'at'");
      PoleSpec p;
      p.location = parse_expr();
      p.flip = accept_ident("flip");
      if (!accept_ident("res")) fail("expected 'res'");
      expect_punct("(");
      p.residues.push_back(parse_expr());
      while (accept_punct(",")) p.residues.push_back(parse_expr());
      expect_punct(")");
      d.poles.push_back(std::move(p));
      more = accept_punct(",");
    }
    if (accept_ident("tail")) {
      d.tail.push_back(parse_coordassign());
      while (accept_punct(",")) d.tail.push_back(parse_coordassign());
    }
    expect_punct(";");
    return d;
  }

  MatrixDecl parse_matrixdecl() {
    lx_.take();  // matrix
    MatrixDecl d;
    d.name = expect_ident().text;
    expect_punct("=");
    expect_punct("(");
    d.d1 = expect_int();
    expect_punct("|");
    d.d2 = expect_int();
    expect_punct(")");
    expect_punct("[");
    do {
      std::vector<ExprPtr> row;
      row.push_back(parse_expr());
      while (accept_punct(",")) row.push_back(parse_expr());
      d.rows.push_back(std::move(row));
    } while (accept_punct("|"));
    expect_punct("]");
    expect_punct(";");
    return d;
  }

  Command parse_command() {
    Command c;
    std::string kw = lx_.take().text;
    if (kw == "check") {
      std::string what = expect_ident().text;
      if (what == "sl12") {
        c.kind = "sl12";
      } else if (what == "exactness") {
        c.kind = "exactness";
        c.ints.push_back(expect_int());
      } else if (what == "truncation") {
        c.kind = "truncation";
        c.ints.push_back(expect_int());
        c.ints.push_back(expect_int());
      } else {
        fail("unknown check '" + what + "'");
      }
    } else if (kw == "transgress" || kw == "radon") {
      c.kind = kw;
      c.names.push_back(expect_ident().text);
      c.names.push_back(expect_ident().text);
    } else if (kw == "hessian") {
      c.kind = "hessian";
      c.names.push_back(expect_ident().text);
      c.ints.push_back(expect_int());
      if (accept_ident("at")) {
        expect_punct("(");
        std::vector<Rat> pt;
        pt.push_back(parse_rational());
        while (accept_punct(",")) pt.push_back(parse_rational());
        expect_punct(")");
        c.at_point = std::move(pt);
      }
    } else if (kw == "additivity") {
      c.kind = "additivity";
      c.names.push_back(expect_ident().text);
      c.names.push_back(expect_ident().text);
      c.ints.push_back(expect_int());
    } else if (kw == "psi") {
      expect_punct("-");
      if (expect_ident().text != "scaling") fail("expected 'scaling'");
      c.kind = "psi-scaling";
      c.names.push_back(expect_ident().text);
      c.ints.push_back(expect_int());
    } else if (kw == "berezinian" || kw == "taylor") {
      c.kind = kw;
      c.names.push_back(expect_ident().text);
    } else {
      fail("unknown command '" + kw + "'");
    }
    expect_punct(";");
    return c;
  }

  Rat parse_rational() {
    bool neg = false;
    if (accept_punct("-")) neg = true;
    if (lx_.peek().kind != Tok::Int) fail("expected a rational");
    long num = std::stol(lx_.take().text);
    long den = 1;
    if (accept_punct("/")) {
      if (lx_.peek().kind != Tok::Int) fail("expected a denominator");
      den = std::stol(lx_.take().text);
    }
    return rat(neg ? -num : num, den);
  }

  // expr := ["-"] term (("+"|"-") term)*
  ExprPtr parse_expr() {
    ExprPtr e;
    if (accept_punct("-")) {
      auto n = std::make_shared<Expr>();
      n->kind = Expr::Kind::Neg;
      n->a = parse_term();
      e = n;
    } else {
      e = parse_term();
    }
    for (;;) {
      if (accept_punct("+")) {
        auto n = std::make_shared<Expr>();
        n->kind = Expr::Kind::Add;
        n->a = e;
        n->b = parse_term();
        e = n;
      } else if (accept_punct("-")) {
        auto n = std::make_shared<Expr>();
        n->kind = Expr::Kind::Sub;
        n->a = e;
        n->b = parse_term();
        e = n;
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    while (lx_.peek().kind == Tok::Punct && lx_.peek().text == "*") {
      lx_.take();
      auto n = std::make_shared<Expr>();
      n->kind = Expr::Kind::Mul;
      n->a = e;
      n->b = parse_factor();
      e = n;
    }
    return e;
  }

  // factor := rational | ident | "d" factor | "(" expr ")" | factor "^" int
  ExprPtr parse_factor() {
    ExprPtr e;
    const Token& t = lx_.peek();
    if (t.kind == Tok::Int) {
      auto n = std::make_shared<Expr>();
      n->kind = Expr::Kind::Number;
      n->number = parse_rational();
      e = n;
    } else if (t.kind == Tok::Punct && t.text == "(") {
      lx_.take();
      e = parse_expr();
      expect_punct(")");
    } else if (t.kind == Tok::Ident && t.text == "d") {
      lx_.take();
      auto n = std::make_shared<Expr>();
      n->kind = Expr::Kind::D;
      n->a = parse_factor();
      e = n;
    } else if (t.kind == Tok::Ident) {
      auto n = std::make_shared<Expr>();
      n->kind = Expr::Kind::Ref;
      n->name = lx_.take().text;
      e = n;
    } else {
      fail("expected a factor");
    }
    while (accept_punct("^")) {
      auto n = std::make_shared<Expr>();
      n->kind = Expr::Kind::Pow;
      n->a = e;
      n->power = expect_int();
      e = n;
    }
    return e;
  }

  Lexer lx_;
};

// ------------------------------------------------------------- printer

void print_expr(std::ostream& os, const Expr& e, int parent_prec);

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Neg:
      return 1;
    case Expr::Kind::Mul:
      return 2;
    case Expr::Kind::D:
      return 3;
    case Expr::Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print_expr(std::ostream& os, const Expr& e, int parent_prec) {
  int prec = precedence(e.kind);
  bool paren = prec < parent_prec;
  if (paren) os << "(";
  switch (e.kind) {
    case Expr::Kind::Number:
      os << rat_to_string(e.number);
      break;
    case Expr::Kind::Ref:
      os << e.name;
      break;
    case Expr::Kind::Neg:
      os << "-";
      print_expr(os, *e.a, prec + 1);
      break;
    case Expr::Kind::Add:
      print_expr(os, *e.a, prec);
      os << " + ";
      print_expr(os, *e.b, prec + 1);
      break;
    case Expr::Kind::Sub:
      print_expr(os, *e.a, prec);
      os << " - ";
      print_expr(os, *e.b, prec + 1);
      break;
    case Expr::Kind::Mul:
      print_expr(os, *e.a, prec);
      os << "*";
      print_expr(os, *e.b, prec + 1);
      break;
    case Expr::Kind::D:
      os << "d ";
      print_expr(os, *e.a, prec);
      break;
    case Expr::Kind::Pow:
      print_expr(os, *e.a, prec + 1);
      os << "^" << e.power;
      break;
  }
  if (paren) os << ")";
}

std::string expr_str(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, *e, 0);
  return os.str();
}

}  // namespace

std::string Script::to_canonical_string() const {
  std::ostringstream os;
  for (const auto& v : vars) {
    os << (v.parity == Parity::Odd ? "odd" : "even");
    for (const auto& n : v.names) os << " " << n;
    if (v.cap) os << " cap " << *v.cap;
    os << ";\n";
  }
  for (const auto& f : forms) os << "form " << f.name << " = " << expr_str(f.value) << ";\n";
  for (const auto& l : loops) {
    os << "loop " << l.name << " = ";
    for (size_t i = 0; i < l.coords.size(); ++i) {
      if (i) os << ", ";
      os << l.coords[i].coord << ": " << expr_str(l.coords[i].value);
    }
    os << ";\n";
  }
  for (const auto& p : pole_families) {
    os << "poles " << p.name << " = ";
    for (size_t i = 0; i < p.poles.size(); ++i) {
      if (i) os << ", ";
      os << "at " << expr_str(p.poles[i].location);
      if (p.poles[i].flip) os << " flip";
      os << " res (";
      for (size_t r = 0; r < p.poles[i].residues.size(); ++r) {
        if (r) os << ", ";
        os << expr_str(p.poles[i].residues[r]);
      }
      os << ")";
    }
    if (!p.tail.empty()) {
      os << " tail ";
      for (size_t i = 0; i < p.tail.size(); ++i) {
        if (i) os << ", ";
        os << p.tail[i].coord << ": " << expr_str(p.tail[i].value);
      }
    }
    os << ";\n";
  }
  for (const auto& m : matrices) {
    os << "matrix " << m.name << " = (" << m.d1 << "|" << m.d2 << ") [";
    for (size_t r = 0; r < m.rows.size(); ++r) {
      if (r) os << " | ";
      for (size_t c = 0; c < m.rows[r].size(); ++c) {
        if (c) os << ", ";
        os << expr_str(m.rows[r][c]);
      }
    }
    os << "];\n";
  }
  const Command& c = command;
  if (c.kind == "sl12")
    os << "check sl12";
  else if (c.kind == "exactness")
    os << "check exactness " << c.ints[0];
  else if (c.kind == "truncation")
    os << "check truncation " << c.ints[0] << " " << c.ints[1];
  else if (c.kind == "hessian") {
    os << "hessian " << c.names[0] << " " << c.ints[0];
    if (c.at_point) {
      os << " at (";
      for (size_t i = 0; i < c.at_point->size(); ++i) {
        if (i) os << ", ";
        os << rat_to_string((*c.at_point)[i]);
      }
      os << ")";
    }
  } else if (c.kind == "additivity")
    os << "additivity " << c.names[0] << " " << c.names[1] << " " << c.ints[0];
  else if (c.kind == "psi-scaling")
    os << "psi-scaling " << c.names[0] << " " << c.ints[0];
  else {
    os << c.kind;
    for (const auto& n : c.names) os << " " << n;
    for (int i : c.ints) os << " " << i;
  }
  os << ";\n";
  return os.str();
}

Script parse(const std::string& text) { return Parser(text).parse_script(); }

// ------------------------------------------------------------- runner

namespace {

struct Env {
  Script script;
  RunOptions opts;

  std::vector<VarSpec> all_vars;       // declaration order
  std::vector<VarSpec> coord_vars;     // loop/pole assigned, else all
  std::vector<VarSpec> param_vars;
  bool uses_lambda = false;

  FormContextPtr base_fc;   // X
  FormContextPtr value_fc;  // coords as 0-modes + params (+ lambda)

  std::map<std::string, SuperPoly> forms;       // over base_fc
  std::map<std::string, LoopPoint> loops;       // over value_fc
  std::map<std::string, PoleFamily> families;   // over value_fc
  std::map<std::string, SuperMatrix> matrices;  // over value_fc
};

[[noreturn]] void run_fail(const std::string& msg) { throw AlgebraError(msg); }

bool expr_mentions(const Expr& e, const std::string& name) {
  switch (e.kind) {
    case Expr::Kind::Ref:
      return e.name == name;
    case Expr::Kind::Number:
      return false;
    case Expr::Kind::Neg:
    case Expr::Kind::D:
    case Expr::Kind::Pow:
      return expr_mentions(*e.a, name);
    default:
      return expr_mentions(*e.a, name) || expr_mentions(*e.b, name);
  }
}

// SuperPoly-valued evaluation over the base form context
SuperPoly eval_form(const Env& env, const Expr& e) {
  const ContextPtr& ctx = env.base_fc->ctx();
  switch (e.kind) {
    case Expr::Kind::Number:
      return SuperPoly::constant(ctx, e.number);
    case Expr::Kind::Ref: {
      auto it = env.forms.find(e.name);
      if (it != env.forms.end()) return it->second;
      if (auto v = ctx->find(e.name)) return SuperPoly::variable(ctx, *v);
      run_fail("undeclared name '" + e.name + "' in a form expression");
    }
    case Expr::Kind::D:
      return env.base_fc->d()(eval_form(env, *e.a));
    case Expr::Kind::Neg:
      return -eval_form(env, *e.a);
    case Expr::Kind::Add:
      return eval_form(env, *e.a) + eval_form(env, *e.b);
    case Expr::Kind::Sub:
      return eval_form(env, *e.a) - eval_form(env, *e.b);
    case Expr::Kind::Mul:
      return eval_form(env, *e.a) * eval_form(env, *e.b);
    case Expr::Kind::Pow: {
      if (e.power < 0) run_fail("negative powers are not allowed in form expressions");
      return eval_form(env, *e.a).pow(e.power);
    }
  }
  run_fail("unreachable form expression");
}

// Laurent-valued evaluation over the value context (loop coordinates,
// pole data, matrix entries); t is the series variable
NilLaurent eval_laurent(const Env& env, const Expr& e) {
  const ContextPtr& ctx = env.value_fc->ctx();
  auto scalar = [&](const SuperPoly& p) { return NilLaurent::term(ctx, 0, p); };
  switch (e.kind) {
    case Expr::Kind::Number:
      return scalar(SuperPoly::constant(ctx, e.number));
    case Expr::Kind::Ref: {
      if (e.name == "t") return NilLaurent::term(ctx, 1, SuperPoly::constant(ctx, 1));
      if (e.name == "lambda") return scalar(SuperPoly::variable(ctx, "lambda"));
      if (auto v = ctx->find(e.name)) return scalar(SuperPoly::variable(ctx, *v));
      run_fail("undeclared name '" + e.name + "' in a series expression");
    }
    case Expr::Kind::D:
      run_fail("'d' is not allowed in series expressions");
    case Expr::Kind::Neg:
      return -eval_laurent(env, *e.a);
    case Expr::Kind::Add:
      return eval_laurent(env, *e.a) + eval_laurent(env, *e.b);
    case Expr::Kind::Sub:
      return eval_laurent(env, *e.a) - eval_laurent(env, *e.b);
    case Expr::Kind::Mul:
      return eval_laurent(env, *e.a) * eval_laurent(env, *e.b);
    case Expr::Kind::Pow: {
      NilLaurent base = eval_laurent(env, *e.a);
      int p = e.power;
      if (p >= 0) {
        NilLaurent r = scalar(SuperPoly::constant(ctx, 1));
        for (int k = 0; k < p; ++k) r = r * base;
        return r;
      }
      // negative powers: invertible single terms only (t^k, c lambda^k)
      if (base.terms().size() != 1) run_fail("cannot invert a sum in a series expression");
      auto [n, c] = *base.terms().begin();
      SuperPoly cinv = invert_simple(c);
      NilLaurent r = scalar(SuperPoly::constant(ctx, 1));
      NilLaurent inv = NilLaurent::term(ctx, -n, cinv);
      for (int k = 0; k < -p; ++k) r = r * inv;
      return r;
    }
  }
  run_fail("unreachable series expression");
}

SuperPoly eval_scalar(const Env& env, const Expr& e, const char* where) {
  NilLaurent s = eval_laurent(env, e);
  for (const auto& [n, c] : s.terms())
    if (n != 0) run_fail(std::string(where) + " must not involve t");
  return s.terms().empty() ? SuperPoly::zero(env.value_fc->ctx()) : s.terms().begin()->second;
}

void build_contexts(Env& env) {
  const Script& s = env.script;
  std::vector<std::string> coord_names;
  for (const auto& l : s.loops)
    for (const auto& a : l.coords)
      if (std::find(coord_names.begin(), coord_names.end(), a.coord) == coord_names.end())
        coord_names.push_back(a.coord);
  if (!s.pole_families.empty() && coord_names.empty()) {
    // pole residues are indexed positionally; coordinates = uncapped vars
    for (const auto& d : s.vars)
      if (!d.cap)
        for (const auto& n : d.names) coord_names.push_back(n);
  }

  for (const auto& d : s.vars)
    for (const auto& n : d.names) {
      VarSpec v;
      v.name = n;
      v.parity = d.parity;
      v.nil_cap = d.cap;
      env.all_vars.push_back(v);
    }
  for (const auto& v : env.all_vars) {
    bool is_coord = coord_names.empty() ||
                    std::find(coord_names.begin(), coord_names.end(), v.name) != coord_names.end();
    (is_coord ? env.coord_vars : env.param_vars).push_back(v);
  }

  auto mentions_lambda = [&] {
    for (const auto& l : s.loops)
      for (const auto& a : l.coords)
        if (expr_mentions(*a.value, "lambda")) return true;
    for (const auto& p : s.pole_families) {
      for (const auto& pl : p.poles) {
        if (expr_mentions(*pl.location, "lambda")) return true;
        for (const auto& r : pl.residues)
          if (expr_mentions(*r, "lambda")) return true;
      }
      for (const auto& a : p.tail)
        if (expr_mentions(*a.value, "lambda")) return true;
    }
    return false;
  };
  env.uses_lambda = !s.pole_families.empty() || mentions_lambda();

  int twin_cap = env.opts.caps.value_or(6);
  env.base_fc = FormContext::make(env.coord_vars, twin_cap);

  std::vector<VarSpec> value_vars = env.coord_vars;
  for (const auto& p : env.param_vars) value_vars.push_back(p);
  if (env.uses_lambda) value_vars.push_back({"lambda", Parity::Even, std::nullopt, true});
  env.value_fc = FormContext::make(std::move(value_vars), twin_cap);
}

void build_objects(Env& env) {
  const Script& s = env.script;
  for (const auto& f : s.forms) {
    if (env.forms.count(f.name)) run_fail("duplicate form name " + f.name);
    env.forms.emplace(f.name, eval_form(env, *f.value));
  }
  for (const auto& l : s.loops) {
    LoopPoint g;
    g.base_fc = env.base_fc;
    g.value_fc = env.value_fc;
    g.coords.assign(static_cast<size_t>(env.base_fc->n_base()), NilLaurent(env.value_fc->ctx()));
    std::vector<bool> seen(static_cast<size_t>(env.base_fc->n_base()), false);
    for (const auto& a : l.coords) {
      auto v = env.base_fc->ctx()->find(a.coord);
      if (!v || *v >= env.base_fc->n_base()) run_fail("loop assigns unknown coordinate " + a.coord);
      if (seen[static_cast<size_t>(*v)]) run_fail("loop assigns " + a.coord + " twice");
      seen[static_cast<size_t>(*v)] = true;
      g.coords[static_cast<size_t>(*v)] = eval_laurent(env, *a.value);
    }
    for (int b = 0; b < env.base_fc->n_base(); ++b)
      if (!seen[static_cast<size_t>(b)])
        run_fail("loop " + l.name + " misses coordinate " + env.base_fc->ctx()->var(b).name);
    g.validate();
    env.loops.emplace(l.name, std::move(g));
  }
  for (const auto& p : s.pole_families) {
    PoleFamily fam;
    fam.base_fc = env.base_fc;
    fam.value_fc = env.value_fc;
    for (const auto& pl : p.poles) {
      Pole pole;
      pole.location = eval_scalar(env, *pl.location, "a pole location");
      pole.orientation = pl.flip ? -1 : 1;
      if (static_cast<int>(pl.residues.size()) != env.base_fc->n_base())
        run_fail("pole family " + p.name + " needs one residue per coordinate");
      for (const auto& r : pl.residues)
        pole.residues.push_back(eval_scalar(env, *r, "a pole residue"));
      fam.poles.push_back(std::move(pole));
    }
    if (!p.tail.empty()) {
      fam.tail.assign(static_cast<size_t>(env.base_fc->n_base()),
                      NilLaurent(env.value_fc->ctx()));
      for (const auto& a : p.tail) {
        auto v = env.base_fc->ctx()->find(a.coord);
        if (!v || *v >= env.base_fc->n_base()) run_fail("tail assigns unknown coordinate");
        fam.tail[static_cast<size_t>(*v)] = eval_laurent(env, *a.value);
      }
    }
    fam.validate();
    env.families.emplace(p.name, std::move(fam));
  }
  for (const auto& m : s.matrices) {
    SuperMatrix g(env.value_fc->ctx(), m.d1, m.d2);
    if (static_cast<int>(m.rows.size()) != m.d1 + m.d2)
      run_fail("matrix " + m.name + " needs " + std::to_string(m.d1 + m.d2) + " rows");
    for (int i = 0; i < m.d1 + m.d2; ++i) {
      if (static_cast<int>(m.rows[static_cast<size_t>(i)].size()) != m.d1 + m.d2)
        run_fail("matrix " + m.name + " row " + std::to_string(i) + " has the wrong length");
      for (int j = 0; j < m.d1 + m.d2; ++j)
        g.set(i, j, eval_scalar(env, *m.rows[static_cast<size_t>(i)][static_cast<size_t>(j)],
                                "a matrix entry"));
    }
    g.validate_parity();
    env.matrices.emplace(m.name, std::move(g));
  }
}

const SuperPoly& need_form(const Env& env, const std::string& n) {
  auto it = env.forms.find(n);
  if (it == env.forms.end()) run_fail("no form named '" + n + "'");
  return it->second;
}

const LoopPoint& need_loop(const Env& env, const std::string& n) {
  auto it = env.loops.find(n);
  if (it == env.loops.end()) run_fail("no loop named '" + n + "'");
  return it->second;
}

LoopEvaluator make_evaluator(const Env& env, const SuperPoly& p, const std::string& name) {
  DifferentialForm f{env.base_fc, p};
  auto parts = form_degree_parts(f);
  if (parts.size() == 1 && parts.count(1)) return LoopEvaluator::transgression(f);
  if (parts.size() == 1 && parts.count(2)) return LoopEvaluator::radon(f);
  run_fail("'" + name + "' must be homogeneous of form degree 1 or 2");
}

void add_check(Json& report, bool& ok, const std::string& name, bool passed,
               const Json& details = Json::object()) {
  Json c;
  c["name"] = name;
  c["passed"] = passed;
  if (!details.empty()) c["details"] = details;
  report["checks"].push_back(c);
  ok = ok && passed;
}

Json inputs_json(const Env& env) {
  Json in = Json::object();
  Json vars = Json::array();
  for (const auto& v : env.all_vars) {
    Json jv;
    jv["name"] = v.name;
    jv["parity"] = v.parity == Parity::Odd ? "odd" : "even";
    if (v.nil_cap) jv["cap"] = *v.nil_cap;
    vars.push_back(jv);
  }
  in["variables"] = vars;
  if (!env.forms.empty()) {
    Json forms = Json::object();
    for (const auto& [n, p] : env.forms) forms[n] = p.to_string();
    in["forms"] = forms;
  }
  if (!env.loops.empty()) {
    Json loops = Json::object();
    for (const auto& [n, g] : env.loops) {
      Json coords = Json::object();
      for (int b = 0; b < env.base_fc->n_base(); ++b)
        coords[env.base_fc->ctx()->var(b).name] = g.coords[static_cast<size_t>(b)].to_string();
      loops[n] = coords;
    }
    in["loops"] = loops;
  }
  if (!env.families.empty()) {
    Json fams = Json::object();
    for (const auto& [n, fam] : env.families) {
      Json jf = Json::array();
      for (const auto& p : fam.poles) {
        Json jp;
        jp["location"] = p.location.to_string();
        jp["orientation"] = p.orientation;
        Json res = Json::array();
        for (const auto& r : p.residues) res.push_back(r.to_string());
        jp["residues"] = res;
        jf.push_back(jp);
      }
      fams[n] = jf;
    }
    in["pole_families"] = fams;
  }
  return in;
}

void run_sl12(Env& env, Json& report, bool& ok) {
  Sl12Report rep = sl12_structure_check();
  Json res;
  res["dimension"] = {{"even", rep.even_count}, {"odd", rep.odd_count}};
  Json mats = Json::object();
  for (size_t b = 0; b < rep.labels.size(); ++b) {
    Json rows = Json::array();
    for (int i = 0; i < 3; ++i) {
      Json row = Json::array();
      for (int j = 0; j < 3; ++j) row.push_back(rat_to_string(rep.matrices[b].at(i, j)));
      rows.push_back(row);
    }
    mats[rep.labels[b]] = rows;
  }
  res["matrices"] = mats;
  Json straces = Json::object();
  for (size_t b = 0; b < rep.labels.size(); ++b)
    straces[rep.labels[b]] = rat_to_string(rep.supertraces[b]);
  res["supertraces"] = straces;
  Json table = Json::array();
  int verified = 0;
  for (const auto& e : rep.table) {
    Json je;
    je["bracket"] = "[" + e.a + "," + e.b + "]";
    Json coeffs = Json::object();
    for (size_t k = 0; k < e.coefficients.size(); ++k)
      if (e.coefficients[k] != 0) coeffs[rep.labels[k]] = rat_to_string(e.coefficients[k]);
    je["expansion"] = coeffs;
    bool got = e.abstract_ok && e.matrix_ok && e.induced_ok;
    je["verified"] = got;
    if (got) ++verified;
    table.push_back(je);
  }
  res["bracket_table"] = table;
  report["results"] = res;

  add_check(report, ok, "dimension is (4|4)", rep.even_count == 4 && rep.odd_count == 4);
  add_check(report, ok, "all supertraces vanish", rep.all_supertraces_zero);
  add_check(report, ok, "the eight matrices are independent", rep.injective);
  add_check(report, ok, "bracket table closes", rep.closes);
  add_check(report, ok, "36/36 brackets verified three ways",
            verified == static_cast<int>(rep.table.size()),
            Json{{"verified", verified}, {"total", rep.table.size()}});
}

void run_exactness(Env& env, Json& report, bool& ok) {
  int cap = env.opts.caps.value_or(env.script.command.ints[0]);
  std::vector<VarSpec> base_vars = env.coord_vars;
  auto base = Context::make(base_vars);
  SliceCaps caps{4, 4, cap, 500000};
  BigradedSlice slice = BigradedSlice::build(base, caps);
  Json rows = Json::array();
  for (int j = 0; j <= 3; ++j) {
    ExactnessReport rep = row_exactness_report(slice, j, "D1");
    Json jr;
    jr["row"] = j;
    Json positions = Json::array();
    for (const auto& p : rep.positions) {
      Json jp;
      jp["i"] = p.position;
      jp["dim"] = p.dimension;
      if (p.verifiable) {
        jp["dim_kernel"] = p.dim_kernel;
        jp["dim_image_prev"] = p.dim_image_prev;
        jp["defect"] = p.defect;
      } else {
        jp["unverifiable"] = true;
      }
      jp["homotopy_identity"] = p.homotopy_identity;
      positions.push_back(jp);
    }
    jr["positions"] = positions;
    rows.push_back(jr);
    if (j >= 1) {
      add_check(report, ok, "row " + std::to_string(j) + " exact at verifiable positions",
                rep.interior_exact);
      bool homotopy = true;
      for (const auto& p : rep.positions) homotopy = homotopy && p.homotopy_identity;
      add_check(report, ok, "row " + std::to_string(j) + " homotopy identity D1 D1* + D1* D1 = j",
                homotopy);
    } else {
      add_check(report, ok, "row 0 position 0 defect is 1 (constants)",
                !rep.positions.empty() && rep.positions[0].verifiable &&
                    rep.positions[0].defect == 1);
    }
  }
  report["results"] = Json{{"rows", rows}};
}

void run_truncation(Env& env, Json& report, bool& ok) {
  int p = env.script.command.ints[0];
  int cap = env.opts.caps.value_or(env.script.command.ints[1]);
  std::vector<VarSpec> base_vars = env.coord_vars;
  auto base = Context::make(base_vars);
  SliceCaps caps{p + 1, cap, cap, 500000};
  TruncationCompareReport rep = truncation_cohomology_compare(base, p, caps);
  Json slots = Json::array();
  int compared = 0;
  for (const auto& s : rep.slots) {
    Json js;
    js["slot"] = s.q;
    js["weight"] = s.weight;
    js["left_dim"] = s.left_dim;
    js["right_dim"] = s.right_dim;
    js["comparable"] = s.comparable;
    if (s.comparable) {
      js["equal"] = s.equal;
      ++compared;
    }
    slots.push_back(js);
  }
  report["results"] = Json{{"p", p}, {"slots", slots}, {"compared", compared}};
  add_check(report, ok, "dimension tables agree on every comparable slot",
            rep.all_comparable_equal, Json{{"compared", compared}});
}

void run_transgress(Env& env, Json& report, bool& ok, bool as_radon) {
  const SuperPoly& fp = need_form(env, env.script.command.names[0]);
  const LoopPoint& gamma = need_loop(env, env.script.command.names[1]);
  DifferentialForm f{env.base_fc, fp};
  SuperPoly value = as_radon ? radon(f, gamma) : transgress(f, gamma);
  report["results"] = Json{{"value", value.to_string()}};
  if (as_radon) {
    add_check(report, ok, "input 2-form is closed", is_closed(f));
    // primitive independence is structural: tau kills exact forms
    DifferentialForm eta = poincare_homotopy(f);
    add_check(report, ok, "primitive reproduces the form", de_rham_d(eta) == f);
  }
}

void run_hessian(Env& env, Json& report, bool& ok) {
  const Command& c = env.script.command;
  LoopEvaluator f = make_evaluator(env, need_form(env, c.names[0]), c.names[0]);
  int n = c.ints[0];
  const int nb = env.base_fc->n_base();
  Json matrix = Json::array();
  std::vector<std::vector<SuperPoly>> h;
  for (int i = 0; i < nb; ++i) {
    Json row = Json::array();
    std::vector<SuperPoly> hrow;
    for (int j = 0; j < nb; ++j) {
      SuperPoly v = hessian_form(f, c.at_point, n, i, j);
      row.push_back(v.to_string());
      hrow.push_back(v);
    }
    matrix.push_back(row);
    h.push_back(std::move(hrow));
  }
  report["results"] = Json{{"n", n}, {"omega", matrix}};
  bool skew = true;
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      int s = (env.base_fc->ctx()->parity(i) == Parity::Odd &&
               env.base_fc->ctx()->parity(j) == Parity::Odd)
                  ? -1
                  : 1;
      if (h[static_cast<size_t>(i)][static_cast<size_t>(j)].to_string() !=
          (h[static_cast<size_t>(j)][static_cast<size_t>(i)] * Rat(-s)).to_string())
        skew = false;
    }
  add_check(report, ok, "super skew-symmetry", skew);
}

void run_additivity(Env& env, Json& report, bool& ok) {
  const Command& c = env.script.command;
  LoopEvaluator f = make_evaluator(env, need_form(env, c.names[0]), c.names[0]);
  auto it = env.families.find(c.names[1]);
  if (it == env.families.end()) run_fail("no pole family named '" + c.names[1] + "'");
  int d = c.ints[0];
  // the nil order is fixed by the declared caps; the argument pins it
  for (const auto& pole : it->second.poles)
    for (const auto& r : pole.residues)
      for (const auto& [m, coeff] : r.terms())
        for (VarId v = 0; v < env.value_fc->ctx()->size(); ++v)
          if (m.exp(v) > 0 && env.value_fc->ctx()->effective_cap(v) > 0 &&
              env.value_fc->ctx()->parity(v) == Parity::Even &&
              env.value_fc->ctx()->effective_cap(v) != d)
            run_fail("residue parameter " + env.value_fc->ctx()->var(v).name + " has cap " +
                     std::to_string(env.value_fc->ctx()->effective_cap(v)) +
                     ", expected the nil order " + std::to_string(d));
  AdditivityReport rep = additivity_check(f, it->second);
  Json neg = Json::object();
  for (const auto& [e, part] : rep.lambda_negative)
    neg["lambda^" + std::to_string(e)] = part.to_string();
  report["results"] = Json{{"value", rep.value.to_string()}, {"lambda_negative", neg}};
  add_check(report, ok, "per-pole sum is regular at lambda = 0", rep.regular);
}

void run_psi_scaling(Env& env, Json& report, bool& ok) {
  const Command& c = env.script.command;
  LoopEvaluator f = make_evaluator(env, need_form(env, c.names[0]), c.names[0]);
  ScalingCheck check = psi_n_scaling_check(f, c.ints[0]);
  Json res;
  res["n"] = check.n;
  Json mism = Json::array();
  for (const auto& m : check.mismatches) mism.push_back(m);
  res["mismatches"] = mism;
  report["results"] = res;
  add_check(report, ok, "omega^{+-n} = n omega^{+-1}", check.ok);
}

void run_berezinian(Env& env, Json& report, bool& ok) {
  auto it = env.matrices.find(env.script.command.names[0]);
  if (it == env.matrices.end()) run_fail("no matrix named '" + env.script.command.names[0] + "'");
  SuperPoly ber = berezinian(it->second);
  report["results"] = Json{{"berezinian", ber.to_string()}};
  add_check(report, ok, "berezinian is even", ber.is_homogeneous(Parity::Even));
}

void run_taylor(Env& env, Json& report, bool& ok) {
  const Command& c = env.script.command;
  LoopEvaluator f = make_evaluator(env, need_form(env, c.names[0]), c.names[0]);
  TaylorProfile prof = taylor_profile(f, 3);
  Json res;
  Json om = Json::object();
  for (const auto& [ij, w] : prof.omega)
    om["omega[" + std::to_string(ij.first) + "," + std::to_string(ij.second) + "]"] =
        w.to_string();
  res["omega"] = om;
  Json ps = Json::object();
  for (const auto& [ijk, w] : prof.psi)
    ps["psi[" + std::to_string(ijk[0]) + "," + std::to_string(ijk[1]) + "," +
       std::to_string(ijk[2]) + "]"] = w.to_string();
  res["psi"] = ps;
  Json ph = Json::object();
  for (const auto& [ijkl, w] : prof.phi)
    ph["phi[" + std::to_string(ijkl[0]) + "," + std::to_string(ijkl[1]) + "," +
       std::to_string(ijkl[2]) + "," + std::to_string(ijkl[3]) + "]"] = w.to_string();
  res["phi"] = ph;
  res["higher"] = prof.higher.to_string();
  report["results"] = res;
  add_check(report, ok, "expansion is quasihomogeneous of degree 0", prof.quasihomogeneous,
            prof.quasihomogeneous ? Json::object()
                                  : Json{{"failure", prof.failure_part.to_string()}});
}

}  // namespace

RunResult run(const Script& s, const RunOptions& opts) {
  Env env;
  env.script = s;
  env.opts = opts;
  build_contexts(env);
  build_objects(env);

  Json report;
  report["command"] = s.command.kind;
  report["script"] = s.to_canonical_string();
  if (opts.seed != 0) report["seed"] = opts.seed;
  report["inputs"] = inputs_json(env);
  report["results"] = Json::object();
  report["checks"] = Json::array();

  bool ok = true;
  const std::string& k = s.command.kind;
  if (k == "sl12")
    run_sl12(env, report, ok);
  else if (k == "exactness")
    run_exactness(env, report, ok);
  else if (k == "truncation")
    run_truncation(env, report, ok);
  else if (k == "transgress")
    run_transgress(env, report, ok, false);
  else if (k == "radon")
    run_transgress(env, report, ok, true);
  else if (k == "hessian")
    run_hessian(env, report, ok);
  else if (k == "additivity")
    run_additivity(env, report, ok);
  else if (k == "psi-scaling")
    run_psi_scaling(env, report, ok);
  else if (k == "berezinian")
    run_berezinian(env, report, ok);
  else if (k == "taylor")
    run_taylor(env, report, ok);
  else
    run_fail("unknown command kind " + k);

  report["ok"] = ok;
  return RunResult{std::move(report), ok};
}

std::string render_text(const Json& report) {
  std::ostringstream os;
  os << "command: " << report.at("command").get<std::string>() << "\n";
  if (report.contains("results")) {
    const Json& res = report.at("results");
    for (auto it = res.begin(); it != res.end(); ++it) {
      os << it.key() << ": ";
      if (it.value().is_string())
        os << it.value().get<std::string>();
      else
        os << it.value().dump();
      os << "\n";
    }
  }
  for (const Json& c : report.at("checks"))
    os << (c.at("passed").get<bool>() ? "[pass] " : "[FAIL] ") << c.at("name").get<std::string>()
       << "\n";
  os << (report.at("ok").get<bool>() ? "OK" : "FAILED") << "\n";
  return os.str();
}

}  // namespace loopforms::script
