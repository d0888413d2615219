#include "mhn/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "mhn/errors.hpp"

namespace mhn {

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr e;
    nodes_ = &e.nodes_;
    e.root_ = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  using Op = Expr::Op;

  // expr   := term (('+'|'-') term)*
  // term   := unary (('*'|'/') unary)*
  // unary  := '-' unary | power
  // power  := atom ('^' unary)?          (right-associative)
  // atom   := number | name | name '(' args ')' | '(' expr ')'
  int parse_expr() {
    int left = parse_term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        left = binary(Op::Add, left, parse_term());
      else if (accept('-'))
        left = binary(Op::Sub, left, parse_term());
      else
        return left;
    }
  }

  int parse_term() {
    int left = parse_unary();
    for (;;) {
      skip_ws();
      if (accept('*'))
        left = binary(Op::Mul, left, parse_unary());
      else if (accept('/'))
        left = binary(Op::Div, left, parse_unary());
      else
        return left;
    }
  }

  int parse_unary() {
    skip_ws();
    if (accept('-')) {
      int a = parse_unary();
      return unary(Op::Neg, a);
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_atom();
    skip_ws();
    if (accept('^')) {
      int exp = parse_unary();  // '2^3^2' nests to the right, '2^-1' allowed
      return binary(Op::Pow, base, exp);
    }
    return base;
  }

  int parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (accept('(')) {
      int inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail("expected a number, name or '('");
    return -1;
  }

  int parse_number() {
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += std::size_t(end - begin);
    Expr::Node n;
    n.op = Op::Num;
    n.value = v;
    return push(n);
  }

  int parse_name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x") return leaf(Op::VarX);
    if (name == "y") return leaf(Op::VarY);
    if (name == "r") return leaf(Op::VarR);

    Op fn;
    int arity = 1;
    if (name == "sin") fn = Op::Sin;
    else if (name == "cos") fn = Op::Cos;
    else if (name == "exp") fn = Op::Exp;
    else if (name == "sqrt") fn = Op::Sqrt;
    else if (name == "abs") fn = Op::Abs;
    else if (name == "min") { fn = Op::Min; arity = 2; }
    else if (name == "max") { fn = Op::Max; arity = 2; }
    else { pos_ = start; fail("unknown name"); return -1; }

    skip_ws();
    expect('(');
    int a = parse_expr();
    int b = -1;
    if (arity == 2) {
      skip_ws();
      expect(',');
      b = parse_expr();
    }
    expect(')');
    Expr::Node n;
    n.op = fn;
    n.a = a;
    n.b = b;
    return push(n);
  }

  int leaf(Op op) {
    Expr::Node n;
    n.op = op;
    return push(n);
  }
  int unary(Op op, int a) {
    Expr::Node n;
    n.op = op;
    n.a = a;
    return push(n);
  }
  int binary(Op op, int a, int b) {
    Expr::Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    return push(n);
  }
  int push(const Expr::Node& n) {
    nodes_->push_back(n);
    return int(nodes_->size()) - 1;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& msg) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " at position %zu", pos_);
    throw ExprError("syntax error: " + msg + buf, pos_);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Expr::Node>* nodes_ = nullptr;
};

Expr Expr::parse(std::string_view src) { return ExprParser(src).run(); }

double Expr::eval(double x, double y) const {
  if (root_ < 0) throw ExprError("eval of an empty expression");
  return eval_node(root_, x, y, std::hypot(x, y));
}

double Expr::eval_node(int idx, double x, double y, double r) const {
  const Node& n = nodes_[std::size_t(idx)];
  switch (n.op) {
    case Op::Num: return n.value;
    case Op::VarX: return x;
    case Op::VarY: return y;
    case Op::VarR: return r;
    case Op::Add: return eval_node(n.a, x, y, r) + eval_node(n.b, x, y, r);
    case Op::Sub: return eval_node(n.a, x, y, r) - eval_node(n.b, x, y, r);
    case Op::Mul: return eval_node(n.a, x, y, r) * eval_node(n.b, x, y, r);
    case Op::Div: {
      const double den = eval_node(n.b, x, y, r);
      if (den == 0.0) throw ExprError("division by zero");
      return eval_node(n.a, x, y, r) / den;
    }
    case Op::Pow: {
      const double base = eval_node(n.a, x, y, r);
      const double ex = eval_node(n.b, x, y, r);
      const double v = std::pow(base, ex);
      if (!std::isfinite(v)) throw ExprError("domain error in '^'");
      return v;
    }
    case Op::Neg: return -eval_node(n.a, x, y, r);
    case Op::Sin: return std::sin(eval_node(n.a, x, y, r));
    case Op::Cos: return std::cos(eval_node(n.a, x, y, r));
    case Op::Exp: {
      const double v = std::exp(eval_node(n.a, x, y, r));
      if (!std::isfinite(v)) throw ExprError("overflow in exp");
      return v;
    }
    case Op::Sqrt: {
      const double arg = eval_node(n.a, x, y, r);
      if (arg < 0.0) throw ExprError("sqrt of a negative value");
      return std::sqrt(arg);
    }
    case Op::Abs: return std::abs(eval_node(n.a, x, y, r));
    case Op::Min: return std::min(eval_node(n.a, x, y, r), eval_node(n.b, x, y, r));
    case Op::Max: return std::max(eval_node(n.a, x, y, r), eval_node(n.b, x, y, r));
  }
  throw ExprError("corrupt expression node");
}

std::string Expr::to_string() const {
  if (root_ < 0) return "";
  std::string out;
  print_node(root_, out);
  return out;
}

void Expr::print_node(int idx, std::string& out) const {
  const Node& n = nodes_[std::size_t(idx)];
  auto bin = [&](const char* op) {
    out += '(';
    print_node(n.a, out);
    out += op;
    print_node(n.b, out);
    out += ')';
  };
  auto fn = [&](const char* name) {
    out += name;
    out += '(';
    print_node(n.a, out);
    if (n.b >= 0) {
      out += ", ";
      print_node(n.b, out);
    }
    out += ')';
  };
  switch (n.op) {
    case Op::Num: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Op::VarX: out += 'x'; return;
    case Op::VarY: out += 'y'; return;
    case Op::VarR: out += 'r'; return;
    case Op::Add: bin(" + "); return;
    case Op::Sub: bin(" - "); return;
    case Op::Mul: bin("*"); return;
    case Op::Div: bin("/"); return;
    case Op::Pow: bin("^"); return;
    case Op::Neg:
      out += "(-";
      print_node(n.a, out);
      out += ')';
      return;
    case Op::Sin: fn("sin"); return;
    case Op::Cos: fn("cos"); return;
    case Op::Exp: fn("exp"); return;
    case Op::Sqrt: fn("sqrt"); return;
    case Op::Abs: fn("abs"); return;
    case Op::Min: fn("min"); return;
    case Op::Max: fn("max"); return;
  }
}

ScanResult positivity_scan(const Expr& e, std::span<const Point> pts) {
  if (pts.empty()) throw std::invalid_argument("positivity_scan: empty point set");
  ScanResult out{e.eval(pts[0]), pts[0]};
  for (const Point& p : pts.subspan(1)) {
    const double v = e.eval(p);
    if (v < out.min_value) {
      out.min_value = v;
      out.argmin = p;
    }
  }
  return out;
}

}  // namespace mhn
