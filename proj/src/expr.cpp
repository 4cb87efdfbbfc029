#include "statcurv/expr.hpp"

#include "statcurv/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace statcurv {
namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(ExprOp op, std::vector<NodePtr> args = {}, double number = 0.0, int index = 0) {
  auto node = std::make_shared<ExprNode>();
  node->op = op;
  node->args = std::move(args);
  node->number = number;
  node->index = index;
  return node;
}

bool is_function(std::string_view name, ExprOp& op) {
  if (name == "pow") op = ExprOp::Pow;
  else if (name == "exp") op = ExprOp::Exp;
  else if (name == "log") op = ExprOp::Log;
  else if (name == "sqrt") op = ExprOp::Sqrt;
  else if (name == "sin") op = ExprOp::Sin;
  else if (name == "cos") op = ExprOp::Cos;
  else return false;
  return true;
}

class Parser {
 public:
  Parser(std::string_view src, int n) : src_(src), n_(n) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  std::string_view src_;
  int n_;
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
    if (!accept(c)) {
      if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make_node(ExprOp::Add, {lhs, term()});
      else if (accept('-')) lhs = make_node(ExprOp::Sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) lhs = make_node(ExprOp::Mul, {lhs, factor()});
      else if (accept('/')) lhs = make_node(ExprOp::Div, {lhs, factor()});
      else return lhs;
    }
  }

  NodePtr factor() {
    if (accept('-')) return make_node(ExprOp::Neg, {atom()});
    return atom();
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
        pos_ = p;
      }
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      throw ParseError("malformed number '" + std::string(first, last) + "'", start);
    }
    return make_node(ExprOp::Number, {}, value);
  }

  int integer_literal() {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < src_.size() && src_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == digits) throw ParseError("pow exponent must be an integer literal", start);
    if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
      throw ParseError("pow exponent must be an integer literal", start);
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + digits, src_.data() + pos_, value);
    if (ec != std::errc() || value > 64) throw ParseError("pow exponent out of range", start);
    return negative ? -value : value;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 'x') {
      bool all_digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) all_digits = all_digits && std::isdigit(static_cast<unsigned char>(name[i]));
      if (all_digits) {
        int k = 0;
        auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
        if (ec != std::errc() || k < 1 || k > n_) {
          throw ParseError("coordinate index out of range: '" + std::string(name) + "' with dimension " +
                               std::to_string(n_),
                           start);
        }
        return make_node(ExprOp::Coord, {}, 0.0, k - 1);
      }
    }
    if (name == "normsq") return make_node(ExprOp::NormSq);

    ExprOp op{};
    if (!is_function(name, op)) throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    expect('(');
    NodePtr arg = expr();
    if (op == ExprOp::Pow) {
      expect(',');
      const int k = integer_literal();
      expect(')');
      return make_node(ExprOp::Pow, {arg}, 0.0, k);
    }
    expect(')');
    return make_node(op, {arg});
  }
};

// ---- printing ---------------------------------------------------------------

int precedence(const ExprNode& node) {
  switch (node.op) {
    case ExprOp::Add:
    case ExprOp::Sub: return 1;
    case ExprOp::Mul:
    case ExprOp::Div: return 2;
    case ExprOp::Neg: return 3;
    case ExprOp::Number: return node.number < 0 || std::signbit(node.number) ? 3 : 4;
    default: return 4;
  }
}

const char* function_name(ExprOp op) {
  switch (op) {
    case ExprOp::Pow: return "pow";
    case ExprOp::Exp: return "exp";
    case ExprOp::Log: return "log";
    case ExprOp::Sqrt: return "sqrt";
    case ExprOp::Sin: return "sin";
    case ExprOp::Cos: return "cos";
    default: return "?";
  }
}

void print(const ExprNode& node, std::string& out);

void print_at_least(const ExprNode& node, int min_prec, std::string& out) {
  if (precedence(node) < min_prec) {
    out += '(';
    print(node, out);
    out += ')';
  } else {
    print(node, out);
  }
}

void print(const ExprNode& node, std::string& out) {
  switch (node.op) {
    case ExprOp::Number: out += format_number(node.number); return;
    case ExprOp::Coord: out += "x" + std::to_string(node.index + 1); return;
    case ExprOp::NormSq: out += "normsq"; return;
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Div: {
      const int p = precedence(node);
      const char* sym = node.op == ExprOp::Add ? " + " : node.op == ExprOp::Sub ? " - " : node.op == ExprOp::Mul ? "*" : "/";
      print_at_least(*node.args[0], p, out);
      out += sym;
      print_at_least(*node.args[1], p + 1, out);
      return;
    }
    case ExprOp::Neg:
      out += '-';
      print_at_least(*node.args[0], 4, out);
      return;
    case ExprOp::Pow:
      out += "pow(";
      print(*node.args[0], out);
      out += ", " + std::to_string(node.index) + ")";
      return;
    default:
      out += function_name(node.op);
      out += '(';
      print(*node.args[0], out);
      out += ')';
      return;
  }
}

std::string node_text(const ExprNode& node) {
  std::string s;
  print(node, s);
  return s;
}

// ---- evaluation -------------------------------------------------------------

Jet2 eval_node(const ExprNode& node, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  switch (node.op) {
    case ExprOp::Number: return Jet2::constant(node.number, n);
    case ExprOp::Coord: return Jet2::variable(x[node.index], n, node.index);
    case ExprOp::NormSq: {
      Jet2 out = Jet2::constant(0.0, n);
      for (int i = 0; i < n; ++i) {
        out.value += x[i] * x[i];
        out.grad[i] = 2.0 * x[i];
        out.hess(i, i) = 2.0;
      }
      return out;
    }
    case ExprOp::Add: return eval_node(*node.args[0], x) + eval_node(*node.args[1], x);
    case ExprOp::Sub: return eval_node(*node.args[0], x) - eval_node(*node.args[1], x);
    case ExprOp::Mul: return eval_node(*node.args[0], x) * eval_node(*node.args[1], x);
    case ExprOp::Div: {
      const Jet2 num = eval_node(*node.args[0], x);
      const Jet2 den = eval_node(*node.args[1], x);
      if (den.value == 0.0) throw DomainError("division by zero", node_text(node));
      return num / den;
    }
    case ExprOp::Neg: return -eval_node(*node.args[0], x);
    case ExprOp::Pow: {
      const Jet2 base = eval_node(*node.args[0], x);
      if (node.index < 0 && base.value == 0.0) throw DomainError("negative power of zero", node_text(node));
      return powi(base, node.index);
    }
    case ExprOp::Exp: return exp(eval_node(*node.args[0], x));
    case ExprOp::Log: {
      const Jet2 a = eval_node(*node.args[0], x);
      if (!(a.value > 0.0)) throw DomainError("log of non-positive value", node_text(node));
      return log(a);
    }
    case ExprOp::Sqrt: {
      const Jet2 a = eval_node(*node.args[0], x);
      if (!(a.value > 0.0)) throw DomainError("sqrt of non-positive value", node_text(node));
      return sqrt(a);
    }
    case ExprOp::Sin: return sin(eval_node(*node.args[0], x));
    case ExprOp::Cos: return cos(eval_node(*node.args[0], x));
  }
  throw Error("corrupt expression node");
}

double value_node(const ExprNode& node, std::span<const double> x) {
  switch (node.op) {
    case ExprOp::Number: return node.number;
    case ExprOp::Coord: return x[node.index];
    case ExprOp::NormSq: {
      double s = 0.0;
      for (double xi : x) s += xi * xi;
      return s;
    }
    case ExprOp::Add: return value_node(*node.args[0], x) + value_node(*node.args[1], x);
    case ExprOp::Sub: return value_node(*node.args[0], x) - value_node(*node.args[1], x);
    case ExprOp::Mul: return value_node(*node.args[0], x) * value_node(*node.args[1], x);
    case ExprOp::Div: {
      const double den = value_node(*node.args[1], x);
      if (den == 0.0) throw DomainError("division by zero", node_text(node));
      return value_node(*node.args[0], x) / den;
    }
    case ExprOp::Neg: return -value_node(*node.args[0], x);
    case ExprOp::Pow: {
      const double base = value_node(*node.args[0], x);
      if (node.index < 0 && base == 0.0) throw DomainError("negative power of zero", node_text(node));
      return std::pow(base, node.index);
    }
    case ExprOp::Exp: return std::exp(value_node(*node.args[0], x));
    case ExprOp::Log: {
      const double a = value_node(*node.args[0], x);
      if (!(a > 0.0)) throw DomainError("log of non-positive value", node_text(node));
      return std::log(a);
    }
    case ExprOp::Sqrt: {
      const double a = value_node(*node.args[0], x);
      if (!(a > 0.0)) throw DomainError("sqrt of non-positive value", node_text(node));
      return std::sqrt(a);
    }
    case ExprOp::Sin: return std::sin(value_node(*node.args[0], x));
    case ExprOp::Cos: return std::cos(value_node(*node.args[0], x));
  }
  throw Error("corrupt expression node");
}

bool constant_node(const ExprNode& node) {
  if (node.op == ExprOp::Coord || node.op == ExprOp::NormSq) return false;
  for (const auto& a : node.args) {
    if (!constant_node(*a)) return false;
  }
  return true;
}

void check_point(const Expr& e, std::span<const double> point) {
  if (e.empty()) throw Error("evaluating an empty expression");
  if (static_cast<int>(point.size()) != e.dimension()) {
    throw SpecError("point has " + std::to_string(point.size()) + " coordinates, expression expects " +
                    std::to_string(e.dimension()));
  }
  for (double v : point) {
    if (!std::isfinite(v)) throw DomainError("non-finite coordinate", e.to_string());
  }
}

// ---- symbolic differentiation -------------------------------------------------

bool is_number(const NodePtr& n, double v) { return n->op == ExprOp::Number && n->number == v; }

NodePtr num(double v) { return make_node(ExprOp::Number, {}, v); }

NodePtr add(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0)) return b;
  if (is_number(b, 0.0)) return a;
  return make_node(ExprOp::Add, {std::move(a), std::move(b)});
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_number(b, 0.0)) return a;
  if (is_number(a, 0.0)) return make_node(ExprOp::Neg, {std::move(b)});
  return make_node(ExprOp::Sub, {std::move(a), std::move(b)});
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0) || is_number(b, 0.0)) return num(0.0);
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  return make_node(ExprOp::Mul, {std::move(a), std::move(b)});
}

NodePtr derive(const NodePtr& node, int m) {
  const auto& a = node->args;
  switch (node->op) {
    case ExprOp::Number: return num(0.0);
    case ExprOp::Coord: return num(node->index == m ? 1.0 : 0.0);
    case ExprOp::NormSq: return mul(num(2.0), make_node(ExprOp::Coord, {}, 0.0, m));
    case ExprOp::Add: return add(derive(a[0], m), derive(a[1], m));
    case ExprOp::Sub: return sub(derive(a[0], m), derive(a[1], m));
    case ExprOp::Mul: return add(mul(derive(a[0], m), a[1]), mul(a[0], derive(a[1], m)));
    case ExprOp::Div: {
      NodePtr da = derive(a[0], m);
      NodePtr db = derive(a[1], m);
      if (is_number(db, 0.0)) {
        if (is_number(da, 0.0)) return num(0.0);
        return make_node(ExprOp::Div, {da, a[1]});
      }
      return make_node(ExprOp::Div, {sub(mul(da, a[1]), mul(a[0], db)), make_node(ExprOp::Pow, {a[1]}, 0.0, 2)});
    }
    case ExprOp::Neg: {
      NodePtr d = derive(a[0], m);
      return is_number(d, 0.0) ? d : make_node(ExprOp::Neg, {d});
    }
    case ExprOp::Pow: {
      const int k = node->index;
      if (k == 0) return num(0.0);
      NodePtr outer = k == 1 ? num(1.0) : (k == 2 ? a[0] : make_node(ExprOp::Pow, {a[0]}, 0.0, k - 1));
      return mul(mul(num(static_cast<double>(k)), outer), derive(a[0], m));
    }
    case ExprOp::Exp: return mul(node, derive(a[0], m));
    case ExprOp::Log: {
      NodePtr d = derive(a[0], m);
      return is_number(d, 0.0) ? d : make_node(ExprOp::Div, {d, a[0]});
    }
    case ExprOp::Sqrt: {
      NodePtr d = derive(a[0], m);
      return is_number(d, 0.0) ? d : make_node(ExprOp::Div, {d, mul(num(2.0), node)});
    }
    case ExprOp::Sin: return mul(make_node(ExprOp::Cos, {a[0]}), derive(a[0], m));
    case ExprOp::Cos: {
      NodePtr d = derive(a[0], m);
      return is_number(d, 0.0) ? d : make_node(ExprOp::Neg, {mul(make_node(ExprOp::Sin, {a[0]}), d)});
    }
  }
  throw Error("corrupt expression node");
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

bool Expr::is_constant() const { return constant_node(*root_); }

std::string Expr::to_string() const { return node_text(*root_); }

Expr Expr::constant(double value, int dimension) { return {make_node(ExprOp::Number, {}, value), dimension}; }

Expr Expr::operator+(const Expr& other) const {
  if (other.dimension_ != dimension_) throw SpecError("adding expressions of different dimensions");
  return {make_node(ExprOp::Add, {root_, other.root_}), dimension_};
}

Expr parse_expression(std::string_view source, int dimension) {
  if (dimension < 1 || dimension > kMaxDimension) {
    throw SpecError("dimension " + std::to_string(dimension) + " outside supported range 1.." +
                    std::to_string(kMaxDimension));
  }
  return {Parser(source, dimension).parse(), dimension};
}

Expr differentiate(const Expr& e, int index) {
  if (e.empty()) throw Error("differentiating an empty expression");
  if (index < 0 || index >= e.dimension()) throw SpecError("derivative index out of range");
  return {derive(e.root_ptr(), index), e.dimension()};
}

Jet2 eval_jet2(const Expr& e, std::span<const double> point) {
  check_point(e, point);
  Jet2 out = eval_node(e.root(), point);
  if (!out.finite()) throw DomainError("non-finite result", e.to_string());
  return out;
}

double eval_value(const Expr& e, std::span<const double> point) {
  check_point(e, point);
  const double v = value_node(e.root(), point);
  if (!std::isfinite(v)) throw DomainError("non-finite result", e.to_string());
  return v;
}

}  // namespace statcurv
