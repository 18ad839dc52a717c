#ifndef LAGMECH_EXPR_HPP
#define LAGMECH_EXPR_HPP

#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lagmech/dual.hpp"
#include "lagmech/errors.hpp"

namespace lagmech {

// Ordered variable bindings. Velocities are plain variables named
// "<coord>_dot"; the frame parameter is named "t".
using VarEnv = std::vector<std::pair<std::string, double>>;

namespace detail {

enum class NodeKind { Number, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Atan2 };

struct Node {
  NodeKind kind{};
  double number = 0.0;        // Number
  std::string name;           // Var
  Func func{};                // Call
  bool const_exponent = false;  // Pow: exponent is variable-free
  double exponent = 0.0;        // Pow: cached when const_exponent
  std::shared_ptr<const Node> a, b;
};

bool node_depends_on(const Node& n, const std::string& var);
bool node_has_vars(const Node& n);
void node_print(const Node& n, std::string& out);

template <class T, class Lookup>
T node_eval(const Node& n, const Lookup& lookup) {
  switch (n.kind) {
    case NodeKind::Number:
      return T(n.number);
    case NodeKind::Var:
      return lookup(n.name);
    case NodeKind::Add:
      return node_eval<T>(*n.a, lookup) + node_eval<T>(*n.b, lookup);
    case NodeKind::Sub:
      return node_eval<T>(*n.a, lookup) - node_eval<T>(*n.b, lookup);
    case NodeKind::Mul:
      return node_eval<T>(*n.a, lookup) * node_eval<T>(*n.b, lookup);
    case NodeKind::Div: {
      T num = node_eval<T>(*n.a, lookup);
      T den = node_eval<T>(*n.b, lookup);
      if (scalar_part(den) == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case NodeKind::Neg:
      return -node_eval<T>(*n.a, lookup);
    case NodeKind::Pow: {
      T base = node_eval<T>(*n.a, lookup);
      if (n.const_exponent) {
        double p = n.exponent;
        if (scalar_part(base) < 0.0 && p != std::floor(p))
          throw EvalError("negative base with non-integer exponent");
        if (scalar_part(base) == 0.0 && p < 0.0)
          throw EvalError("zero base with negative exponent");
        return pow_const(base, p);
      }
      if (scalar_part(base) <= 0.0)
        throw EvalError("non-positive base with variable exponent");
      return pow(base, node_eval<T>(*n.b, lookup));
    }
    case NodeKind::Call: {
      T x = node_eval<T>(*n.a, lookup);
      switch (n.func) {
        case Func::Sin: return sin(x);
        case Func::Cos: return cos(x);
        case Func::Tan: return tan(x);
        case Func::Exp: return exp(x);
        case Func::Log:
          if (scalar_part(x) <= 0.0) throw EvalError("log of non-positive value");
          return log(x);
        case Func::Sqrt:
          if (scalar_part(x) < 0.0) throw EvalError("sqrt of negative value");
          return sqrt(x);
        case Func::Atan2: {
          T y = node_eval<T>(*n.b, lookup);
          if (scalar_part(x) == 0.0 && scalar_part(y) == 0.0)
            throw EvalError("atan2(0, 0)");
          return atan2(x, y);
        }
      }
      throw EvalError("unhandled function");
    }
  }
  throw EvalError("unhandled node kind");
}

}  // namespace detail

// Immutable scalar expression over named variables. Evaluation is pure
// and reentrant; exact derivatives come from dual-number evaluation.
class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view source);
  static Expr constant(double value);

  bool valid() const { return root_ != nullptr; }

  double eval(const VarEnv& env) const;

  // Exact partial derivative at env (forward-mode dual numbers).
  double diff(const std::string& var, const VarEnv& env) const;

  // The partial derivative as an expression (exact rule application, no
  // simplification beyond constant folding of trivial cases).
  Expr derivative(const std::string& var) const;

  // Generic evaluation with a value lookup; T is double or (nested) Dual.
  template <class T, class Lookup>
  T eval_generic(const Lookup& lookup) const {
    if (!root_) throw EvalError("empty expression");
    return detail::node_eval<T>(*root_, lookup);
  }

  bool depends_on(const std::string& var) const;
  std::string str() const;

 private:
  explicit Expr(std::shared_ptr<const detail::Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const detail::Node> root_;
};

}  // namespace lagmech

#endif
