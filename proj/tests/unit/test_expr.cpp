#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mhn/errors.hpp"
#include "mhn/expr.hpp"

using namespace mhn;

namespace {

// Independent oracle: its own tree representation, printer and evaluator,
// sharing nothing with the production parser.
struct ONode {
  char op;  // 'n' number, 'x','y','r', '+','-','*','/','^','~' neg, or function tag
  double value = 0;
  std::unique_ptr<ONode> a, b;
};
using ONodePtr = std::unique_ptr<ONode>;

double oracle_eval(const ONode& n, double x, double y) {
  const double r = std::sqrt(x * x + y * y);
  switch (n.op) {
    case 'n': return n.value;
    case 'x': return x;
    case 'y': return y;
    case 'r': return r;
    case '+': return oracle_eval(*n.a, x, y) + oracle_eval(*n.b, x, y);
    case '-': return oracle_eval(*n.a, x, y) - oracle_eval(*n.b, x, y);
    case '*': return oracle_eval(*n.a, x, y) * oracle_eval(*n.b, x, y);
    case '/': return oracle_eval(*n.a, x, y) / oracle_eval(*n.b, x, y);
    case '^': return std::pow(oracle_eval(*n.a, x, y), oracle_eval(*n.b, x, y));
    case '~': return -oracle_eval(*n.a, x, y);
    case 's': return std::sin(oracle_eval(*n.a, x, y));
    case 'c': return std::cos(oracle_eval(*n.a, x, y));
    case 'e': return std::exp(oracle_eval(*n.a, x, y));
    case 'q': return std::sqrt(oracle_eval(*n.a, x, y));
    case 'A': return std::abs(oracle_eval(*n.a, x, y));
    case 'm': return std::min(oracle_eval(*n.a, x, y), oracle_eval(*n.b, x, y));
    case 'M': return std::max(oracle_eval(*n.a, x, y), oracle_eval(*n.b, x, y));
  }
  return 0;
}

std::string oracle_print(const ONode& n) {
  char buf[32];
  switch (n.op) {
    case 'n':
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return buf;
    case 'x': return "x";
    case 'y': return "y";
    case 'r': return "r";
    case '~': return "(-" + oracle_print(*n.a) + ")";
    case 's': return "sin(" + oracle_print(*n.a) + ")";
    case 'c': return "cos(" + oracle_print(*n.a) + ")";
    case 'e': return "exp(" + oracle_print(*n.a) + ")";
    case 'q': return "sqrt(" + oracle_print(*n.a) + ")";
    case 'A': return "abs(" + oracle_print(*n.a) + ")";
    case 'm': return "min(" + oracle_print(*n.a) + ", " + oracle_print(*n.b) + ")";
    case 'M': return "max(" + oracle_print(*n.a) + ", " + oracle_print(*n.b) + ")";
    default:
      return "(" + oracle_print(*n.a) + " " + n.op + " " + oracle_print(*n.b) + ")";
  }
}

ONodePtr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto node = std::make_unique<ONode>();
  if (depth <= 0 || u01(rng) < 0.25) {
    const double pick = u01(rng);
    if (pick < 0.4) {
      node->op = 'n';
      node->value = std::round(u01(rng) * 200.0 - 100.0) / 8.0;
    } else if (pick < 0.6)
      node->op = 'x';
    else if (pick < 0.8)
      node->op = 'y';
    else
      node->op = 'r';
    return node;
  }
  static const char ops[] = {'+', '-', '*', '/', '~', 's', 'c', 'm', 'M'};
  node->op = ops[std::size_t(u01(rng) * 9.0) % 9];
  node->a = random_tree(rng, depth - 1);
  const bool binary = node->op == '+' || node->op == '-' || node->op == '*' ||
                      node->op == '/' || node->op == 'm' || node->op == 'M';
  if (binary) node->b = random_tree(rng, depth - 1);
  return node;
}

}  // namespace

TEST_CASE("expression fixed examples") {
  CHECK(Expr::parse("0.5 - 0.36*r^2").eval(1.0, 0.0) == doctest::Approx(0.14).epsilon(1e-15));
  CHECK(Expr::parse("x*y").eval(2, 3) == 6.0);
  CHECK(Expr::parse("r").eval(3, 4) == 5.0);
  CHECK(Expr::parse("sin(0)").eval(0, 0) == 0.0);
  CHECK(Expr::parse("exp(1)").eval(0, 0) == doctest::Approx(2.718281828459045).epsilon(1e-15));
  CHECK_THROWS_AS(Expr::parse("1/(x-x)").eval(2.5, 0), ExprError);
  CHECK_THROWS_AS(Expr::parse("sqrt(0 - 1)").eval(0, 0), ExprError);
}

TEST_CASE("precedence and associativity table") {
  struct Case {
    const char* src;
    double x, y, expect;
  };
  static const Case table[] = {
      {"1 + 2*3", 0, 0, 7},
      {"(1 + 2)*3", 0, 0, 9},
      {"2^3^2", 0, 0, 512},        // right-associative
      {"-2^2", 0, 0, -4},          // ^ binds tighter than unary minus
      {"(-2)^2", 0, 0, 4},
      {"2^-1", 0, 0, 0.5},
      {"6/3/2", 0, 0, 1},          // left-associative
      {"1 - 2 - 3", 0, 0, -4},
      {"2*-3", 0, 0, -6},
      {"-x + y", 1, 5, 4},
      {"min(2, 3)", 0, 0, 2},
      {"max(2, 3)", 0, 0, 3},
      {"abs(0 - 7)", 0, 0, 7},
      {"sqrt(x^2)", -3, 0, 3},
      {"x^2*y", 2, 5, 20},         // (x^2)*y
      {"2*x^2", 3, 0, 18},
      {"cos(0)*4", 0, 0, 4},
      {"1/4 + 1/4", 0, 0, 0.5},
      {"x - -y", 2, 3, 5},
      {"10/(1 + 4)", 0, 0, 2},
  };
  for (const Case& c : table) {
    CAPTURE(c.src);
    CHECK(Expr::parse(c.src).eval(c.x, c.y) == doctest::Approx(c.expect).epsilon(1e-14));
  }
}

TEST_CASE("syntax errors carry positions") {
  CHECK_THROWS_AS(Expr::parse("1 +"), ExprError);
  CHECK_THROWS_AS(Expr::parse("foo(2)"), ExprError);
  CHECK_THROWS_AS(Expr::parse("(1 + 2"), ExprError);
  CHECK_THROWS_AS(Expr::parse("min(1)"), ExprError);
  CHECK_THROWS_AS(Expr::parse("1 2"), ExprError);
  try {
    Expr::parse("1 + * 2");
    FAIL("expected ExprError");
  } catch (const ExprError& e) {
    CHECK(e.pos() == 4);
  }
}

TEST_CASE("parse-print-parse idempotence") {
  static const char* fixed[] = {"0.5 - 0.36*r^2", "x*y + sin(x)", "max(x, min(y, 1))",
                                "-x^2", "exp(x)/(1 + y^2)"};
  for (const char* src : fixed) {
    const std::string once = Expr::parse(src).to_string();
    CHECK(Expr::parse(once).to_string() == once);
  }

  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tree = random_tree(rng, 4);
    const std::string printed = oracle_print(*tree);
    const std::string once = Expr::parse(printed).to_string();
    REQUIRE(Expr::parse(once).to_string() == once);
  }
}

TEST_CASE("eval agrees with the independent oracle") {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  int compared = 0;
  for (int trial = 0; trial < 400 && compared < 100; ++trial) {
    const auto tree = random_tree(rng, 4);
    const std::string printed = oracle_print(*tree);
    const Expr parsed = Expr::parse(printed);
    const double x = coord(rng), y = coord(rng);
    const double want = oracle_eval(*tree, x, y);
    if (!std::isfinite(want)) {
      // the production evaluator reports domain failures instead
      CHECK_THROWS_AS(parsed.eval(x, y), ExprError);
      continue;
    }
    double got = 0;
    try {
      got = parsed.eval(x, y);
    } catch (const ExprError&) {
      // a domain error on an intermediate the oracle happened to cancel out
      continue;
    }
    REQUIRE(got == doctest::Approx(want).epsilon(1e-12));
    ++compared;
  }
  CHECK(compared >= 100);
}

TEST_CASE("positivity scan") {
  std::vector<Point> pts;
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    pts.push_back({t, 0.0});
    pts.push_back({0.0, t});
    pts.push_back({t * 0.70710678, t * 0.70710678});
  }
  pts.push_back({1.0, 0.0});

  const auto scan = positivity_scan(Expr::parse("0.5 - 0.36*r^2"), pts);
  CHECK(scan.min_value == doctest::Approx(0.14).epsilon(1e-12));
  CHECK(std::hypot(scan.argmin.x, scan.argmin.y) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(positivity_scan(Expr::parse("1"), pts).min_value == 1.0);
  CHECK(positivity_scan(Expr::parse("x - 0.25"), pts).min_value < 0);  // rejected upstream
}
