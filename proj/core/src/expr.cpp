#include "lagmech/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>

namespace lagmech {

namespace detail {

bool node_depends_on(const Node& n, const std::string& var) {
  switch (n.kind) {
    case NodeKind::Number: return false;
    case NodeKind::Var: return n.name == var;
    default:
      if (n.a && node_depends_on(*n.a, var)) return true;
      if (n.b && node_depends_on(*n.b, var)) return true;
      return false;
  }
}

bool node_has_vars(const Node& n) {
  switch (n.kind) {
    case NodeKind::Number: return false;
    case NodeKind::Var: return true;
    default:
      if (n.a && node_has_vars(*n.a)) return true;
      if (n.b && node_has_vars(*n.b)) return true;
      return false;
  }
}

static const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Atan2: return "atan2";
  }
  return "?";
}

void node_print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      return;
    }
    case NodeKind::Var:
      out += n.name;
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
    case NodeKind::Pow: {
      const char* op = n.kind == NodeKind::Add   ? "+"
                       : n.kind == NodeKind::Sub ? "-"
                       : n.kind == NodeKind::Mul ? "*"
                       : n.kind == NodeKind::Div ? "/"
                                                 : "^";
      out += '(';
      node_print(*n.a, out);
      out += op;
      node_print(*n.b, out);
      out += ')';
      return;
    }
    case NodeKind::Neg:
      out += "(-";
      node_print(*n.a, out);
      out += ')';
      return;
    case NodeKind::Call:
      out += func_name(n.func);
      out += '(';
      node_print(*n.a, out);
      if (n.b) {
        out += ',';
        node_print(*n.b, out);
      }
      out += ')';
      return;
  }
}

}  // namespace detail

namespace {

using detail::Func;
using detail::Node;
using detail::NodeKind;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr binary(NodeKind k, NodePtr a, NodePtr b) {
  Node n;
  n.kind = k;
  n.a = std::move(a);
  n.b = std::move(b);
  if (k == NodeKind::Pow && !detail::node_has_vars(*n.b)) {
    n.const_exponent = true;
    n.exponent = detail::node_eval<double>(
        *n.b, [](const std::string&) -> double { throw EvalError("unreachable"); });
  }
  return make_node(std::move(n));
}

// Recursive-descent parser for:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | base ("^" factor)?
//   base   := number | ident | ident "(" expr ("," expr)? ")" | "(" expr ")"
// ^ is right-associative and binds tighter than unary minus.
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr left = parse_term();
    for (;;) {
      if (accept('+'))
        left = binary(NodeKind::Add, left, parse_term());
      else if (accept('-'))
        left = binary(NodeKind::Sub, left, parse_term());
      else
        return left;
    }
  }

  NodePtr parse_term() {
    NodePtr left = parse_factor();
    for (;;) {
      if (accept('*'))
        left = binary(NodeKind::Mul, left, parse_factor());
      else if (accept('/'))
        left = binary(NodeKind::Div, left, parse_factor());
      else
        return left;
    }
  }

  NodePtr parse_factor() {
    if (accept('-')) {
      Node n;
      n.kind = NodeKind::Neg;
      n.a = parse_factor();
      return make_node(std::move(n));
    }
    NodePtr b = parse_base();
    if (accept('^')) return binary(NodeKind::Pow, b, parse_factor());
    return b;
  }

  NodePtr parse_base() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc())
      throw ParseError("malformed number", pos_);
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    Node n;
    n.kind = NodeKind::Number;
    n.number = value;
    return make_node(std::move(n));
  }

  NodePtr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    if (peek() != '(') {
      Node n;
      n.kind = NodeKind::Var;
      n.name = std::move(name);
      return make_node(std::move(n));
    }
    static const std::map<std::string, std::pair<Func, int>> funcs = {
        {"sin", {Func::Sin, 1}},  {"cos", {Func::Cos, 1}},
        {"tan", {Func::Tan, 1}},  {"exp", {Func::Exp, 1}},
        {"log", {Func::Log, 1}},  {"sqrt", {Func::Sqrt, 1}},
        {"atan2", {Func::Atan2, 2}}};
    auto it = funcs.find(name);
    if (it == funcs.end())
      throw ParseError("unknown function '" + name + "'", start);
    expect('(');
    Node n;
    n.kind = NodeKind::Call;
    n.func = it->second.first;
    n.a = parse_expr();
    if (it->second.second == 2) {
      expect(',');
      n.b = parse_expr();
    } else if (peek() == ',') {
      throw ParseError("function '" + name + "' takes one argument", pos_);
    }
    expect(')');
    return make_node(std::move(n));
  }
};

NodePtr num(double v) {
  Node n;
  n.kind = NodeKind::Number;
  n.number = v;
  return make_node(std::move(n));
}

bool is_zero(const NodePtr& n) { return n->kind == NodeKind::Number && n->number == 0.0; }
bool is_one(const NodePtr& n) { return n->kind == NodeKind::Number && n->number == 1.0; }

NodePtr add(NodePtr a, NodePtr b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return binary(NodeKind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) {
    Node n;
    n.kind = NodeKind::Neg;
    n.a = std::move(b);
    return make_node(std::move(n));
  }
  return binary(NodeKind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_zero(a) || is_zero(b)) return num(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return binary(NodeKind::Mul, std::move(a), std::move(b));
}

NodePtr divide(NodePtr a, NodePtr b) {
  if (is_zero(a)) return num(0.0);
  if (is_one(b)) return a;
  return binary(NodeKind::Div, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
  if (is_zero(a)) return a;
  Node n;
  n.kind = NodeKind::Neg;
  n.a = std::move(a);
  return make_node(std::move(n));
}

NodePtr call1(Func f, NodePtr a) {
  Node n;
  n.kind = NodeKind::Call;
  n.func = f;
  n.a = std::move(a);
  return make_node(std::move(n));
}

NodePtr node_derivative(const NodePtr& n, const std::string& var) {
  switch (n->kind) {
    case NodeKind::Number:
      return num(0.0);
    case NodeKind::Var:
      return num(n->name == var ? 1.0 : 0.0);
    case NodeKind::Add:
      return add(node_derivative(n->a, var), node_derivative(n->b, var));
    case NodeKind::Sub:
      return sub(node_derivative(n->a, var), node_derivative(n->b, var));
    case NodeKind::Mul:
      return add(mul(node_derivative(n->a, var), n->b),
                 mul(n->a, node_derivative(n->b, var)));
    case NodeKind::Div:
      // (a'b - ab') / b^2
      return divide(sub(mul(node_derivative(n->a, var), n->b),
                        mul(n->a, node_derivative(n->b, var))),
                    binary(NodeKind::Pow, n->b, num(2.0)));
    case NodeKind::Neg:
      return neg(node_derivative(n->a, var));
    case NodeKind::Pow: {
      NodePtr da = node_derivative(n->a, var);
      if (n->const_exponent) {
        // p a^(p-1) a'
        double p = n->exponent;
        if (p == 0.0 || is_zero(da)) return num(0.0);
        NodePtr body = p == 1.0 ? da
                                : mul(num(p), binary(NodeKind::Pow, n->a, num(p - 1.0)));
        return p == 1.0 ? da : mul(body, da);
      }
      // a^b (b' log a + b a'/a)
      NodePtr db = node_derivative(n->b, var);
      NodePtr inner = add(mul(db, call1(Func::Log, n->a)), mul(n->b, divide(da, n->a)));
      return mul(binary(NodeKind::Pow, n->a, n->b), inner);
    }
    case NodeKind::Call: {
      NodePtr da = node_derivative(n->a, var);
      switch (n->func) {
        case Func::Sin:
          return mul(call1(Func::Cos, n->a), da);
        case Func::Cos:
          return neg(mul(call1(Func::Sin, n->a), da));
        case Func::Tan:
          return divide(da, binary(NodeKind::Pow, call1(Func::Cos, n->a), num(2.0)));
        case Func::Exp:
          return mul(make_node([&] {
                       Node c = *n;
                       return c;
                     }()),
                     da);
        case Func::Log:
          return divide(da, n->a);
        case Func::Sqrt:
          return divide(da, mul(num(2.0), make_node([&] {
                                  Node c = *n;
                                  return c;
                                }())));
        case Func::Atan2: {
          // d atan2(y, x) with our argument order atan2(a, b) = atan2(y=a, x=b):
          // (a'b - ab') / (a^2 + b^2)
          NodePtr db = node_derivative(n->b, var);
          NodePtr denom = add(binary(NodeKind::Pow, n->a, num(2.0)),
                              binary(NodeKind::Pow, n->b, num(2.0)));
          return divide(sub(mul(da, n->b), mul(n->a, db)), denom);
        }
      }
      throw EvalError("unhandled function");
    }
  }
  throw EvalError("unhandled node kind");
}

struct EnvLookupD {
  const VarEnv& env;
  double operator()(const std::string& name) const {
    for (const auto& [n, v] : env)
      if (n == name) return v;
    throw EvalError("unbound variable '" + name + "'");
  }
};

}  // namespace

Expr Expr::parse(std::string_view source) {
  Parser p(source);
  return Expr(p.run());
}

Expr Expr::constant(double value) {
  Node n;
  n.kind = NodeKind::Number;
  n.number = value;
  return Expr(make_node(std::move(n)));
}

double Expr::eval(const VarEnv& env) const {
  if (!root_) throw EvalError("empty expression");
  return detail::node_eval<double>(*root_, EnvLookupD{env});
}

double Expr::diff(const std::string& var, const VarEnv& env) const {
  if (!root_) throw EvalError("empty expression");
  auto lookup = [&](const std::string& name) -> Dual<double> {
    for (const auto& [n, v] : env)
      if (n == name) return {v, name == var ? 1.0 : 0.0};
    throw EvalError("unbound variable '" + name + "'");
  };
  return detail::node_eval<Dual<double>>(*root_, lookup).d;
}

Expr Expr::derivative(const std::string& var) const {
  if (!root_) throw EvalError("empty expression");
  return Expr(node_derivative(root_, var));
}

bool Expr::depends_on(const std::string& var) const {
  return root_ && detail::node_depends_on(*root_, var);
}

std::string Expr::str() const {
  std::string out;
  if (root_) detail::node_print(*root_, out);
  return out;
}

}  // namespace lagmech
