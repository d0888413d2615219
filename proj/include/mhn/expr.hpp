#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mhn {

struct Point {
  double x = 0;
  double y = 0;
};

/// Parsed arithmetic expression over the variables x, y and r = sqrt(x^2+y^2).
/// Operators + - * / ^ with the usual precedence (^ right-associative, then
/// unary minus, then * /, then + -), parentheses, and the functions
/// sin cos exp sqrt abs min max. Evaluation raises ExprError on domain
/// failures (division by zero, sqrt of a negative, non-finite results).
class Expr {
 public:
  Expr() = default;
  static Expr parse(std::string_view src);

  double eval(double x, double y) const;
  double eval(Point p) const { return eval(p.x, p.y); }
  std::string to_string() const;
  bool empty() const { return nodes_.empty(); }

 private:
  enum class Op : unsigned char {
    Num, VarX, VarY, VarR,
    Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Exp, Sqrt, Abs, Min, Max
  };
  struct Node {
    Op op{};
    double value = 0;  // Num only
    int a = -1;
    int b = -1;
  };

  double eval_node(int idx, double x, double y, double r) const;
  void print_node(int idx, std::string& out) const;

  std::vector<Node> nodes_;
  int root_ = -1;

  friend class ExprParser;
};

struct ScanResult {
  double min_value;
  Point argmin;
};

/// Minimum of an expression over a point set; used at ingestion to enforce
/// strict positivity of the alpha_l fields.
ScanResult positivity_scan(const Expr& e, std::span<const Point> pts);

}  // namespace mhn
