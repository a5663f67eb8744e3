#include "randopt/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "randopt/errors.hpp"

namespace randopt {

namespace {

bool is_number(const NodePtr& n, double v) { return n->op == Op::Number && n->value == v; }

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, int index = 0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->index = index;
  return n;
}

constexpr int kMaxNesting = 256;
// Long sums and products build left-leaning chains; evaluation and
// differentiation recurse over the tree, so its depth is bounded as well.
constexpr int kMaxTreeDepth = 4096;

int tree_depth(const NodePtr& root) {
  int best = 0;
  std::vector<std::pair<const Node*, int>> stack{{root.get(), 1}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (n->lhs) stack.emplace_back(n->lhs.get(), d + 1);
    if (n->rhs) stack.emplace_back(n->rhs.get(), d + 1);
  }
  return best;
}

NodePtr literal(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Number;
  n->value = v;
  return n;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view text, int n, int k) : text_(text), n_(n), k_(k) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    if (tree_depth(e) > kMaxTreeDepth) {
      fail_at(0, {"an expression tree at most " + std::to_string(kMaxTreeDepth) + " levels deep"});
    }
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int n_;
  int k_;
  int nesting_ = 0;

  /// Bounds the recursion of the descent parser on inputs like "((((...".
  class NestingGuard {
   public:
    explicit NestingGuard(Parser& p) : p_(p) {
      if (++p_.nesting_ > kMaxNesting) {
        p_.fail({"at most " + std::to_string(kMaxNesting) + " nested parentheses, functions or signs"});
      }
    }
    ~NestingGuard() { --p_.nesting_; }
    NestingGuard(const NestingGuard&) = delete;
    NestingGuard& operator=(const NestingGuard&) = delete;

   private:
    Parser& p_;
  };

  [[noreturn]] void fail(std::vector<std::string> expected) const { fail_at(pos_, std::move(expected)); }

  [[noreturn]] void fail_at(std::size_t at, std::vector<std::string> expected) const {
    std::string msg = "parse error at offset " + std::to_string(at) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += " or ";
      msg += expected[i];
    }
    if (at < text_.size()) {
      msg += ", found '";
      msg += text_[at];
      msg += "'";
    } else {
      msg += ", found end of input";
    }
    throw ParseError(at, std::move(expected), msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r'))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  bool at_number_start() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]));
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        lhs = make(Op::Add, lhs, term());
      } else if (peek('-')) {
        ++pos_;
        lhs = make(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        lhs = make(Op::Mul, lhs, factor());
      } else if (peek('/')) {
        ++pos_;
        lhs = make(Op::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    if (peek('-')) {
      ++pos_;
      // "-<literal>" not followed by '^' is a negative literal
      if (at_number_start()) {
        const std::size_t save = pos_;
        double v = number();
        if (!peek('^')) return literal(-v);
        pos_ = save;
      }
      NestingGuard guard(*this);
      return make(Op::Neg, factor());
    }
    NodePtr b = base();
    if (peek('^')) {
      ++pos_;
      return make(Op::Pow, b, nullptr, integer());
    }
    return b;
  }

  int integer() {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    if (pos_ >= text_.size() || !is_digit(text_[pos_])) fail({"integer exponent"});
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail({"integer exponent"});
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, value);
    if (ec != std::errc() || value > 1024) fail_at(start, {"integer exponent in [-1024, 1024]"});
    (void)ptr;
    return negative ? -value : value;
  }

  double number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && is_digit(text_[p])) {
        pos_ = p;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      } else {
        fail_at(p, {"exponent digits"});
      }
    }
    // from_chars does not accept a leading '+', and we never pass one
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(v)) {
      fail_at(start, {"finite number"});
    }
    return v;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail({"number", "variable", "parameter", "function", "'('", "'-'"});
    const char c = text_[pos_];
    if (c == '(') {
      NestingGuard guard(*this);
      ++pos_;
      NodePtr e = expr();
      if (!peek(')')) fail({"')'"});
      ++pos_;
      return e;
    }
    if (at_number_start()) return literal(number());
    if (is_alpha(c)) return identifier();
    fail({"number", "variable", "parameter", "function", "'('", "'-'"});
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (is_alpha(text_[pos_]) || is_digit(text_[pos_]))) ++pos_;
    const std::string_view id = text_.substr(start, pos_ - start);

    struct Fn {
      std::string_view name;
      Op op;
    };
    static constexpr Fn functions[] = {
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt}};
    for (const auto& fn : functions) {
      if (id == fn.name) {
        if (!peek('(')) fail({"'('"});
        NestingGuard guard(*this);
        ++pos_;
        NodePtr arg = expr();
        if (!peek(')')) fail({"')'"});
        ++pos_;
        return make(fn.op, arg);
      }
    }

    if (id.size() >= 2 && (id[0] == 'x' || id[0] == 'p')) {
      bool digits = true;
      for (char d : id.substr(1)) digits = digits && is_digit(d);
      if (digits) {
        long idx = 0;
        auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), idx);
        (void)ptr;
        const bool is_var = id[0] == 'x';
        const int limit = is_var ? n_ : k_;
        if (ec != std::errc() || idx < 1 || idx > limit) {
          throw DimensionError(std::string(id) + " at offset " + std::to_string(start) + " is out of range (" +
                               (is_var ? "n" : "k") + " = " + std::to_string(limit) + ")");
        }
        return make(is_var ? Op::Var : Op::Param, nullptr, nullptr, static_cast<int>(idx - 1));
      }
    }
    fail_at(start, {"variable x<i>", "parameter p<i>", "sin", "cos", "exp", "log", "sqrt"});
  }
};

// ---------------------------------------------------------------------------
// Evaluation

double check_finite(double v) {
  if (!std::isfinite(v)) throw EvalError(EvalError::Kind::DomainViolation, "result is not finite");
  return v;
}

double eval_node(const Node& n, std::span<const double> x, std::span<const double> p) {
  switch (n.op) {
    case Op::Number:
      return n.value;
    case Op::Var:
      return x[n.index];
    case Op::Param:
      return p[n.index];
    case Op::Neg:
      return -eval_node(*n.lhs, x, p);
    case Op::Add:
      return check_finite(eval_node(*n.lhs, x, p) + eval_node(*n.rhs, x, p));
    case Op::Sub:
      return check_finite(eval_node(*n.lhs, x, p) - eval_node(*n.rhs, x, p));
    case Op::Mul:
      return check_finite(eval_node(*n.lhs, x, p) * eval_node(*n.rhs, x, p));
    case Op::Div: {
      const double num = eval_node(*n.lhs, x, p);
      const double den = eval_node(*n.rhs, x, p);
      if (den == 0.0) throw EvalError(EvalError::Kind::DivByZero, "division by zero");
      return check_finite(num / den);
    }
    case Op::Pow: {
      const double b = eval_node(*n.lhs, x, p);
      if (n.index < 0 && b == 0.0) throw EvalError(EvalError::Kind::DivByZero, "zero to a negative power");
      return check_finite(std::pow(b, static_cast<double>(n.index)));
    }
    case Op::Sin:
      return std::sin(eval_node(*n.lhs, x, p));
    case Op::Cos:
      return std::cos(eval_node(*n.lhs, x, p));
    case Op::Exp:
      return check_finite(std::exp(eval_node(*n.lhs, x, p)));
    case Op::Log: {
      const double a = eval_node(*n.lhs, x, p);
      if (!(a > 0.0)) throw EvalError(EvalError::Kind::DomainViolation, "log of a non-positive number");
      return std::log(a);
    }
    case Op::Sqrt: {
      const double a = eval_node(*n.lhs, x, p);
      if (!(a >= 0.0)) throw EvalError(EvalError::Kind::DomainViolation, "sqrt of a negative number");
      return std::sqrt(a);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Printing

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Number:
      return std::signbit(n.value) ? 3 : 5;
    case Op::Var:
    case Op::Param:
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
      return 5;
    case Op::Pow:
      return 4;
    case Op::Neg:
      return 3;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Add:
    case Op::Sub:
      return 1;
  }
  return 0;
}

void print_number(double v, std::string& out) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, ptr);
}

void print(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool parens, std::string& out) {
  if (parens) out += '(';
  print(n, out);
  if (parens) out += ')';
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin:
      return "sin";
    case Op::Cos:
      return "cos";
    case Op::Exp:
      return "exp";
    case Op::Log:
      return "log";
    case Op::Sqrt:
      return "sqrt";
    default:
      return "?";
  }
}

void print(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::Number:
      print_number(n.value, out);
      return;
    case Op::Var:
      out += 'x';
      out += std::to_string(n.index + 1);
      return;
    case Op::Param:
      out += 'p';
      out += std::to_string(n.index + 1);
      return;
    case Op::Neg:
      out += '-';
      // a bare literal after '-' would be read back as a negative literal
      print_wrapped(*n.lhs, precedence(*n.lhs) < 3 || n.lhs->op == Op::Number, out);
      return;
    case Op::Add:
    case Op::Sub:
      print_wrapped(*n.lhs, precedence(*n.lhs) < 1, out);
      out += n.op == Op::Add ? " + " : " - ";
      print_wrapped(*n.rhs, precedence(*n.rhs) <= 1, out);
      return;
    case Op::Mul:
    case Op::Div:
      print_wrapped(*n.lhs, precedence(*n.lhs) < 2, out);
      out += n.op == Op::Mul ? "*" : "/";
      print_wrapped(*n.rhs, precedence(*n.rhs) <= 2, out);
      return;
    case Op::Pow:
      print_wrapped(*n.lhs, precedence(*n.lhs) < 5, out);
      out += '^';
      out += std::to_string(n.index);
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
      out += function_name(n.op);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
  }
}

// ---------------------------------------------------------------------------
// Differentiation

NodePtr derive(const NodePtr& n, int var) {
  using namespace build;
  switch (n->op) {
    case Op::Number:
    case Op::Param:
      return number(0.0);
    case Op::Var:
      return number(n->index == var ? 1.0 : 0.0);
    case Op::Neg:
      return neg(derive(n->lhs, var));
    case Op::Add:
      return add(derive(n->lhs, var), derive(n->rhs, var));
    case Op::Sub:
      return sub(derive(n->lhs, var), derive(n->rhs, var));
    case Op::Mul:
      return add(mul(derive(n->lhs, var), n->rhs), mul(n->lhs, derive(n->rhs, var)));
    case Op::Div: {
      NodePtr du = derive(n->lhs, var);
      NodePtr dv = derive(n->rhs, var);
      if (is_number(dv, 0.0)) return div(du, n->rhs);
      return div(sub(mul(du, n->rhs), mul(n->lhs, dv)), pow(n->rhs, 2));
    }
    case Op::Pow: {
      const int k = n->index;
      if (k == 0) return number(0.0);
      return mul(mul(number(static_cast<double>(k)), pow(n->lhs, k - 1)), derive(n->lhs, var));
    }
    case Op::Sin:
      return mul(func(Op::Cos, n->lhs), derive(n->lhs, var));
    case Op::Cos:
      return mul(neg(func(Op::Sin, n->lhs)), derive(n->lhs, var));
    case Op::Exp:
      return mul(func(Op::Exp, n->lhs), derive(n->lhs, var));
    case Op::Log:
      return div(derive(n->lhs, var), n->lhs);
    case Op::Sqrt:
      return div(derive(n->lhs, var), mul(number(2.0), func(Op::Sqrt, n->lhs)));
  }
  return number(0.0);
}

NodePtr substitute(const NodePtr& n, std::span<const double> p) {
  using namespace build;
  switch (n->op) {
    case Op::Number:
    case Op::Var:
      return n;
    case Op::Param:
      return number(p[n->index]);
    case Op::Neg:
      return neg(substitute(n->lhs, p));
    case Op::Add:
      return add(substitute(n->lhs, p), substitute(n->rhs, p));
    case Op::Sub:
      return sub(substitute(n->lhs, p), substitute(n->rhs, p));
    case Op::Mul:
      return mul(substitute(n->lhs, p), substitute(n->rhs, p));
    case Op::Div:
      return div(substitute(n->lhs, p), substitute(n->rhs, p));
    case Op::Pow:
      return pow(substitute(n->lhs, p), n->index);
    default:
      return func(n->op, substitute(n->lhs, p));
  }
}

bool equal_nodes(const Node& a, const Node& b, double tol) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Number:
      return a.value == b.value || std::abs(a.value - b.value) <= tol;
    case Op::Var:
    case Op::Param:
      return a.index == b.index;
    case Op::Pow:
      return a.index == b.index && equal_nodes(*a.lhs, *b.lhs, tol);
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return equal_nodes(*a.lhs, *b.lhs, tol) && equal_nodes(*a.rhs, *b.rhs, tol);
    default:
      return equal_nodes(*a.lhs, *b.lhs, tol);
  }
}

bool has_param(const Node& n) {
  if (n.op == Op::Param) return true;
  if (n.lhs && has_param(*n.lhs)) return true;
  return n.rhs && has_param(*n.rhs);
}

}  // namespace

// ---------------------------------------------------------------------------

namespace build {

namespace {
std::optional<double> folded(double v) {
  if (std::isfinite(v)) return v;
  return std::nullopt;
}
}  // namespace

NodePtr number(double v) { return literal(v); }
NodePtr var(int i) { return make(Op::Var, nullptr, nullptr, i); }
NodePtr param(int i) { return make(Op::Param, nullptr, nullptr, i); }

NodePtr neg(NodePtr a) {
  if (a->op == Op::Number) return literal(-a->value);
  if (a->op == Op::Neg) return a->lhs;
  return make(Op::Neg, std::move(a));
}

NodePtr add(NodePtr a, NodePtr b) {
  if (a->op == Op::Number && b->op == Op::Number) {
    if (auto v = folded(a->value + b->value)) return literal(*v);
  }
  if (is_number(a, 0.0)) return b;
  if (is_number(b, 0.0)) return a;
  return make(Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (a->op == Op::Number && b->op == Op::Number) {
    if (auto v = folded(a->value - b->value)) return literal(*v);
  }
  if (is_number(b, 0.0)) return a;
  if (is_number(a, 0.0)) return neg(std::move(b));
  return make(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (a->op == Op::Number && b->op == Op::Number) {
    if (auto v = folded(a->value * b->value)) return literal(*v);
  }
  if (is_number(a, 0.0) || is_number(b, 0.0)) return literal(0.0);
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  if (is_number(a, -1.0)) return neg(std::move(b));
  if (is_number(b, -1.0)) return neg(std::move(a));
  // c * (c' * e) -> (c c') * e
  if (a->op == Op::Number && b->op == Op::Mul && b->lhs->op == Op::Number) {
    if (auto v = folded(a->value * b->lhs->value)) return mul(literal(*v), b->rhs);
  }
  return make(Op::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (a->op == Op::Number && b->op == Op::Number && b->value != 0.0) {
    if (auto v = folded(a->value / b->value)) return literal(*v);
  }
  if (is_number(b, 1.0)) return a;
  if (is_number(a, 0.0) && !is_number(b, 0.0)) return literal(0.0);
  return make(Op::Div, std::move(a), std::move(b));
}

NodePtr pow(NodePtr a, int k) {
  if (k == 0) return literal(1.0);
  if (k == 1) return a;
  if (a->op == Op::Number && !(a->value == 0.0 && k < 0)) {
    if (auto v = folded(std::pow(a->value, static_cast<double>(k)))) return literal(*v);
  }
  return make(Op::Pow, std::move(a), nullptr, k);
}

NodePtr func(Op op, NodePtr a) {
  if (a->op == Op::Number) {
    const double v = a->value;
    std::optional<double> r;
    switch (op) {
      case Op::Sin:
        r = std::sin(v);
        break;
      case Op::Cos:
        r = std::cos(v);
        break;
      case Op::Exp:
        r = folded(std::exp(v));
        break;
      case Op::Log:
        if (v > 0.0) r = std::log(v);
        break;
      case Op::Sqrt:
        if (v >= 0.0) r = std::sqrt(v);
        break;
      default:
        break;
    }
    if (r) return literal(*r);
  }
  return make(op, std::move(a));
}

}  // namespace build

bool Expression::depends_on_params() const { return root_ && has_param(*root_); }

Expression parse(std::string_view text, int n, int k) {
  Parser parser(text, n, k);
  return Expression(parser.parse_all(), n, k);
}

double eval(const Expression& e, std::span<const double> x, std::span<const double> p) {
  if (static_cast<int>(x.size()) != e.num_vars() || static_cast<int>(p.size()) != e.num_params()) {
    throw DimensionError("environment has " + std::to_string(x.size()) + " variables and " +
                         std::to_string(p.size()) + " parameters; expression expects " +
                         std::to_string(e.num_vars()) + " and " + std::to_string(e.num_params()));
  }
  return check_finite(eval_node(*e.root(), x, p));
}

Expression differentiate(const Expression& e, int var) {
  if (var < 0 || var >= e.num_vars()) {
    throw DimensionError("cannot differentiate with respect to x" + std::to_string(var + 1));
  }
  return Expression(derive(e.root(), var), e.num_vars(), e.num_params());
}

std::string to_string(const Expression& e) {
  std::string out;
  print(*e.root(), out);
  return out;
}

Expression substitute_params(const Expression& e, std::span<const double> p) {
  if (static_cast<int>(p.size()) != e.num_params()) {
    throw DimensionError("expected " + std::to_string(e.num_params()) + " parameters");
  }
  return Expression(substitute(e.root(), p), e.num_vars(), 0);
}

bool structurally_equal(const Expression& a, const Expression& b, double tol) {
  return a.num_vars() == b.num_vars() && equal_nodes(*a.root(), *b.root(), tol);
}

}  // namespace randopt
