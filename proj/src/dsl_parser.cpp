#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "qrr/dsl.hpp"

namespace qrr::dsl {

namespace {

struct BuiltinInfo {
  Builtin id;
  std::string_view name;
  int min_args;
  int max_args;  // -1: variadic
};

constexpr BuiltinInfo kBuiltins[] = {
    {Builtin::Sum, "sum", 4, 4},       {Builtin::Prod, "prod", 4, 4},
    {Builtin::Poch, "poch", 3, 3},     {Builtin::PochMulti, "pochm", 3, -1},
    {Builtin::QBin, "qbin", 2, 3},     {Builtin::QPow, "qpow", 1, 1},
    {Builtin::Aq, "aq", 1, 2},         {Builtin::SW, "sw", 2, 2},
    {Builtin::SchurA, "schura", 1, 2}, {Builtin::SchurB, "schurb", 1, 2},
    {Builtin::Bessel, "bessel", 3, 3}, {Builtin::Phi, "phi", 3, -1},
    {Builtin::Psi, "psi", 3, -1},      {Builtin::Floor, "floor", 1, 1},
    {Builtin::Coef, "coef", 3, 3},
};

const BuiltinInfo* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

std::string where(const Span& s) { return std::to_string(s.line) + ":" + std::to_string(s.column); }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Span span{line, col};
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), span});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), span});
      advance(j - i);
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      default:
        fail(ErrorKind::SyntaxError, "unexpected character '" + std::string(1, c) + "' at " + where(span));
    }
    out.push_back({k, std::string(1, c), span});
    advance(1);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

Expr make(NodeKind kind, Span span, std::vector<Expr> args = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->span = span;
  n->args = std::move(args);
  return n;
}

bool is_inf(const Expr& e) { return e->kind == NodeKind::Inf; }
bool is_neg_inf(const Expr& e) { return e->kind == NodeKind::Neg && is_inf(e->args[0]); }

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Expr parse_all() {
    Expr e = expr();
    if (peek().kind != Tok::End) syntax("unexpected '" + peek().text + "'");
    check_inf(e, false);
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void syntax(const std::string& msg) const {
    const Token& t = peek();
    std::string at = t.kind == Tok::End ? "end of input" : where(t.span);
    fail(ErrorKind::SyntaxError, msg + " at " + at + (t.kind == Tok::End ? " (" + where(t.span) + ")" : ""));
  }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) syntax(std::string("expected ") + what);
    take();
  }

  Expr expr() {
    Expr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      Token op = take();
      Expr rhs = term();
      lhs = make(op.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub, op.span, {lhs, rhs});
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      Token op = take();
      Expr rhs = factor();
      lhs = make(op.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div, op.span, {lhs, rhs});
    }
    return lhs;
  }

  Expr factor() {
    if (peek().kind == Tok::Minus) {
      Token op = take();
      return make(NodeKind::Neg, op.span, {factor()});
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (peek().kind == Tok::Caret) {
      Token op = take();
      Expr exponent;
      if (peek().kind == Tok::Minus) {
        Token neg = take();
        exponent = make(NodeKind::Neg, neg.span, {atom()});
      } else {
        exponent = atom();
      }
      return make(NodeKind::Pow, op.span, {base, exponent});
    }
    return base;
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        take();
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Number;
        n->span = t.span;
        n->number = Coefficient(t.text, 10);
        return n;
      }
      case Tok::LParen: {
        take();
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        Token id = take();
        if (id.text == "q") return make(NodeKind::Q, id.span);
        if (id.text == "inf") return make(NodeKind::Inf, id.span);
        const BuiltinInfo* b = find_builtin(id.text);
        if (peek().kind == Tok::LParen) {
          if (!b) fail(ErrorKind::SyntaxError, "unknown function '" + id.text + "' at " + where(id.span));
          return call(*b, id.span);
        }
        if (b) fail(ErrorKind::SyntaxError, "'" + id.text + "' is reserved and must be called at " + where(id.span));
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Var;
        n->name = id.text;
        n->span = id.span;
        return n;
      }
      default:
        syntax(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
    }
  }

  Expr call(const BuiltinInfo& b, Span span) {
    expect(Tok::LParen, "'('");
    std::vector<Expr> args;
    args.push_back(expr());
    while (peek().kind == Tok::Comma) {
      take();
      args.push_back(expr());
    }
    expect(Tok::RParen, "')'");
    int n = static_cast<int>(args.size());
    auto arity = [&](const std::string& want) {
      fail(ErrorKind::ArityError, std::string(b.name) + " expects " + want + " arguments, got " +
                                      std::to_string(n) + " at " + where(span));
    };
    if (n < b.min_args || (b.max_args >= 0 && n > b.max_args)) {
      std::string want = b.max_args < 0 ? "at least " + std::to_string(b.min_args)
                         : b.min_args == b.max_args
                             ? std::to_string(b.min_args)
                             : std::to_string(b.min_args) + " to " + std::to_string(b.max_args);
      arity(want);
    }
    if (b.id == Builtin::Sum || b.id == Builtin::Prod || b.id == Builtin::Coef) {
      if (args[0]->kind != NodeKind::Var) {
        fail(ErrorKind::SyntaxError, std::string(b.name) + " needs an index variable at " + where(args[0]->span));
      }
    }
    if (b.id == Builtin::Phi || b.id == Builtin::Psi) {
      for (int i = 0; i < 2; ++i) {
        if (args[i]->kind != NodeKind::Number || args[i]->number.get_den() != 1) {
          fail(ErrorKind::SyntaxError, std::string(b.name) + " needs literal r and s at " + where(args[i]->span));
        }
      }
      long r = args[0]->number.get_num().get_si();
      long s = args[1]->number.get_num().get_si();
      if (n != 3 + r + s) arity(std::to_string(3 + r + s));
    }
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Call;
    node->builtin = b.id;
    node->span = span;
    node->args = std::move(args);
    return node;
  }

  // inf is only meaningful as an upper summation bound, -inf as a lower
  // one, and as a Pochhammer index.
  void check_inf(const Expr& e, bool allowed) {
    if (is_inf(e)) {
      if (!allowed) fail(ErrorKind::SyntaxError, "'inf' is not allowed here at " + where(e->span));
      return;
    }
    if (e->kind == NodeKind::Call) {
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        bool ok = false;
        if ((e->builtin == Builtin::Sum || e->builtin == Builtin::Prod) && i == 2) ok = true;
        if (e->builtin == Builtin::Poch && i == 2) ok = true;
        if (e->builtin == Builtin::PochMulti && i == 1) ok = true;
        if (e->builtin == Builtin::Sum && i == 1 && is_neg_inf(e->args[i])) continue;
        check_inf(e->args[i], ok);
      }
      return;
    }
    for (const auto& a : e->args) check_inf(a, false);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

int precedence(const Expr& e) {
  switch (e->kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    case NodeKind::Number: return e->number.get_den() == 1 ? 5 : 2;
    default: return 5;
  }
}

void print_to(std::ostringstream& os, const Expr& e);

void print_child(std::ostringstream& os, const Expr& e, int min_prec) {
  if (precedence(e) < min_prec) {
    os << '(';
    print_to(os, e);
    os << ')';
  } else {
    print_to(os, e);
  }
}

void print_to(std::ostringstream& os, const Expr& e) {
  switch (e->kind) {
    case NodeKind::Number:
      if (e->number.get_den() == 1) {
        os << e->number.get_num().get_str();
      } else {
        os << e->number.get_num().get_str() << '/' << e->number.get_den().get_str();
      }
      return;
    case NodeKind::Q: os << 'q'; return;
    case NodeKind::Inf: os << "inf"; return;
    case NodeKind::Var: os << e->name; return;
    case NodeKind::Neg:
      os << '-';
      print_child(os, e->args[0], 3);
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: {
      int p = precedence(e);
      const char* op = e->kind == NodeKind::Add ? " + " : e->kind == NodeKind::Sub ? " - "
                       : e->kind == NodeKind::Mul ? "*" : "/";
      print_child(os, e->args[0], p);
      os << op;
      print_child(os, e->args[1], p + 1);
      return;
    }
    case NodeKind::Pow: {
      print_child(os, e->args[0], 5);
      os << '^';
      const Expr& x = e->args[1];
      if (x->kind == NodeKind::Neg) {
        os << '-';
        print_child(os, x->args[0], 5);
      } else {
        print_child(os, x, 5);
      }
      return;
    }
    case NodeKind::Call:
      os << builtin_name(e->builtin) << '(';
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (i) os << ", ";
        print_to(os, e->args[i]);
      }
      os << ')';
      return;
  }
}

void collect_free(const Expr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  if (e->kind == NodeKind::Var) {
    if (!bound.count(e->name)) out.insert(e->name);
    return;
  }
  if (e->kind == NodeKind::Call && (e->builtin == Builtin::Sum || e->builtin == Builtin::Prod)) {
    collect_free(e->args[1], bound, out);
    collect_free(e->args[2], bound, out);
    const std::string& v = e->args[0]->name;
    bool was = bound.count(v) > 0;
    bound.insert(v);
    collect_free(e->args[3], bound, out);
    if (!was) bound.erase(v);
    return;
  }
  if (e->kind == NodeKind::Call && e->builtin == Builtin::Coef) {
    collect_free(e->args[1], bound, out);
    const std::string& v = e->args[0]->name;
    bool was = bound.count(v) > 0;
    bound.insert(v);
    collect_free(e->args[2], bound, out);
    if (!was) bound.erase(v);
    return;
  }
  for (const auto& a : e->args) collect_free(a, bound, out);
}

}  // namespace

std::string_view builtin_name(Builtin b) {
  for (const auto& info : kBuiltins) {
    if (info.id == b) return info.name;
  }
  return "?";
}

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

std::string print(const Expr& e) {
  std::ostringstream os;
  print_to(os, e);
  return os.str();
}

bool same(const Expr& a, const Expr& b) {
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  if (a->kind == NodeKind::Number && a->number != b->number) return false;
  if (a->kind == NodeKind::Var && a->name != b->name) return false;
  if (a->kind == NodeKind::Call && a->builtin != b->builtin) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!same(a->args[i], b->args[i])) return false;
  }
  return true;
}

std::vector<std::string> free_variables(const Expr& e) {
  std::set<std::string> bound, out;
  collect_free(e, bound, out);
  return {out.begin(), out.end()};
}

std::string to_string(const Value& v) {
  if (const auto* c = std::get_if<Coefficient>(&v)) return c->get_str();
  return std::get<Monomial>(v).str();
}

}  // namespace qrr::dsl
