#include "gkls/ratelang.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>

namespace gkls {

enum class NodeKind { constant, variable, negate, add, sub, mul, div, pow, call };

struct RateNode {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;
  RateFunction fn = RateFunction::tanh;
  std::shared_ptr<const RateNode> lhs;
  std::shared_ptr<const RateNode> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const RateNode>;

constexpr std::array<std::pair<std::string_view, RateFunction>, 6> kFunctions{{
    {"tanh", RateFunction::tanh},
    {"exp", RateFunction::exp},
    {"sin", RateFunction::sin},
    {"cos", RateFunction::cos},
    {"sqrt", RateFunction::sqrt},
    {"abs", RateFunction::abs},
}};

std::string_view function_name(RateFunction fn) {
  for (const auto& [name, f] : kFunctions)
    if (f == fn) return name;
  return "?";
}

NodePtr make_leaf(NodeKind kind, double value = 0.0) {
  auto n = std::make_shared<RateNode>();
  n->kind = kind;
  n->value = value;
  return n;
}

NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<RateNode>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string operand_text(double a) { return format_number(a); }

[[noreturn]] void domain_error(const std::string& op, const std::string& operands) {
  throw Error(Errc::DomainError, op + "(" + operands + ")");
}

double checked(double result, const char* op, const std::string& operands) {
  if (!std::isfinite(result)) domain_error(op, operands);
  return result;
}

double eval_node(const RateNode& n, double t) {
  switch (n.kind) {
    case NodeKind::constant: return n.value;
    case NodeKind::variable: return t;
    case NodeKind::negate: return -eval_node(*n.lhs, t);
    case NodeKind::add: {
      const double a = eval_node(*n.lhs, t), b = eval_node(*n.rhs, t);
      return checked(a + b, "add", operand_text(a) + ", " + operand_text(b));
    }
    case NodeKind::sub: {
      const double a = eval_node(*n.lhs, t), b = eval_node(*n.rhs, t);
      return checked(a - b, "sub", operand_text(a) + ", " + operand_text(b));
    }
    case NodeKind::mul: {
      const double a = eval_node(*n.lhs, t), b = eval_node(*n.rhs, t);
      return checked(a * b, "mul", operand_text(a) + ", " + operand_text(b));
    }
    case NodeKind::div: {
      const double a = eval_node(*n.lhs, t), b = eval_node(*n.rhs, t);
      if (b == 0.0) domain_error("div", operand_text(a) + ", " + operand_text(b));
      return checked(a / b, "div", operand_text(a) + ", " + operand_text(b));
    }
    case NodeKind::pow: {
      const double a = eval_node(*n.lhs, t), b = eval_node(*n.rhs, t);
      const std::string ops = operand_text(a) + ", " + operand_text(b);
      if (a < 0.0 && std::trunc(b) != b) domain_error("pow", ops);
      if (a == 0.0 && b < 0.0) domain_error("pow", ops);
      return checked(std::pow(a, b), "pow", ops);
    }
    case NodeKind::call: {
      const double x = eval_node(*n.lhs, t);
      const std::string name(function_name(n.fn));
      switch (n.fn) {
        case RateFunction::tanh: return std::tanh(x);
        case RateFunction::exp: return checked(std::exp(x), "exp", operand_text(x));
        case RateFunction::sin: return std::sin(x);
        case RateFunction::cos: return std::cos(x);
        case RateFunction::sqrt:
          if (x < 0.0) domain_error("sqrt", operand_text(x));
          return std::sqrt(x);
        case RateFunction::abs: return std::abs(x);
      }
      return 0.0;
    }
  }
  return 0.0;
}

void print_node(const RateNode& n, std::ostringstream& os) {
  auto binary = [&](const char* op) {
    os << '(';
    print_node(*n.lhs, os);
    os << ' ' << op << ' ';
    print_node(*n.rhs, os);
    os << ')';
  };
  switch (n.kind) {
    case NodeKind::constant:
      if (n.value < 0.0 || std::signbit(n.value)) {
        os << "(-" << format_number(-n.value) << ')';
      } else {
        os << format_number(n.value);
      }
      return;
    case NodeKind::variable: os << 't'; return;
    case NodeKind::negate:
      os << "(-";
      print_node(*n.lhs, os);
      os << ')';
      return;
    case NodeKind::add: binary("+"); return;
    case NodeKind::sub: binary("-"); return;
    case NodeKind::mul: binary("*"); return;
    case NodeKind::div: binary("/"); return;
    case NodeKind::pow: binary("^"); return;
    case NodeKind::call:
      os << function_name(n.fn) << '(';
      print_node(*n.lhs, os);
      os << ')';
      return;
  }
}

bool equal_nodes(const RateNode* a, const RateNode* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::constant: return a->value == b->value;
    case NodeKind::variable: return true;
    case NodeKind::call: return a->fn == b->fn && equal_nodes(a->lhs.get(), b->lhs.get());
    default: return equal_nodes(a->lhs.get(), b->lhs.get()) && equal_nodes(a->rhs.get(), b->rhs.get());
  }
}

int node_depth(const RateNode* n) {
  if (!n) return 0;
  return 1 + std::max(node_depth(n->lhs.get()), node_depth(n->rhs.get()));
}

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind = Tok::end;
  std::size_t pos = 0;
  std::string_view text;
  double number = 0.0;
};

std::string describe(const Token& tok) {
  switch (tok.kind) {
    case Tok::end: return "end of input";
    case Tok::number:
    case Tok::ident: return "'" + std::string(tok.text) + "'";
    default: return "'" + std::string(tok.text) + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
    Token tok;
    tok.pos = pos_;
    if (pos_ >= src_.size()) return tok;
    const char c = src_[pos_];
    auto single = [&](Tok kind) {
      tok.kind = kind;
      tok.text = src_.substr(pos_, 1);
      ++pos_;
      return tok;
    };
    switch (c) {
      case '+': return single(Tok::plus);
      case '-': return single(Tok::minus);
      case '*': return single(Tok::star);
      case '/': return single(Tok::slash);
      case '^': return single(Tok::caret);
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      default: break;
    }
    if (is_digit(c) || c == '.') return lex_number(tok);
    if (is_alpha(c)) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
      tok.kind = Tok::ident;
      tok.text = src_.substr(start, pos_ - start);
      return tok;
    }
    throw ParseError(Errc::SyntaxError, pos_, "number, 't', function, '-' or '('",
                     "unexpected character '" + std::string(1, c) + "' at position " + std::to_string(pos_));
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  Token lex_number(Token tok) {
    const std::size_t start = pos_;
    std::size_t digits = 0;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_, ++digits;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_, ++digits;
    }
    if (digits == 0)
      throw ParseError(Errc::SyntaxError, start, "digit", "malformed number at position " + std::to_string(start));
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p >= src_.size() || !is_digit(src_[p]))
        throw ParseError(Errc::SyntaxError, p, "exponent digits", "malformed exponent at position " + std::to_string(p));
      while (p < src_.size() && is_digit(src_[p])) ++p;
      pos_ = p;
    }
    tok.kind = Tok::number;
    tok.text = src_.substr(start, pos_ - start);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc() || ptr != tok.text.data() + tok.text.size() || !std::isfinite(value))
      throw ParseError(Errc::SyntaxError, start, "finite number", "numeric literal out of range at position " + std::to_string(start));
    tok.number = value;
    return tok;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

constexpr int kAdditive = 10;
constexpr int kMultiplicative = 20;
constexpr int kUnary = 30;
constexpr int kPower = 40;

int infix_power(Tok kind) {
  switch (kind) {
    case Tok::plus:
    case Tok::minus: return kAdditive;
    case Tok::star:
    case Tok::slash: return kMultiplicative;
    case Tok::caret: return kPower;
    default: return 0;
  }
}

}  // namespace

class RateParser {
 public:
  explicit RateParser(std::string_view src) : lexer_(src) { advance(); }

  RateExpr parse() {
    if (current_.kind == Tok::end) throw ParseError(Errc::SyntaxError, 0, "expression", "empty expression");
    NodePtr root = expression(0);
    if (current_.kind != Tok::end)
      throw ParseError(Errc::SyntaxError, current_.pos, "operator or end of input",
                       "unexpected " + describe(current_) + " at position " + std::to_string(current_.pos) +
                           ", expected operator or end of input");
    return RateExpr(std::move(root));
  }

 private:
  void advance() { current_ = lexer_.next(); }

  void expect(Tok kind, const char* what) {
    if (current_.kind != kind)
      throw ParseError(Errc::SyntaxError, current_.pos, what,
                       "unexpected " + describe(current_) + " at position " + std::to_string(current_.pos) +
                           ", expected " + what);
    advance();
  }

  NodePtr expression(int min_power) {
    NodePtr lhs = prefix();
    for (;;) {
      const int power = infix_power(current_.kind);
      if (power == 0 || power <= min_power) break;
      const Tok op = current_.kind;
      advance();
      // '^' recurses one notch lower so that it associates to the right.
      NodePtr rhs = expression(op == Tok::caret ? power - 1 : power);
      switch (op) {
        case Tok::plus: lhs = make_node(NodeKind::add, lhs, rhs); break;
        case Tok::minus: lhs = make_node(NodeKind::sub, lhs, rhs); break;
        case Tok::star: lhs = make_node(NodeKind::mul, lhs, rhs); break;
        case Tok::slash: lhs = make_node(NodeKind::div, lhs, rhs); break;
        case Tok::caret: lhs = make_node(NodeKind::pow, lhs, rhs); break;
        default: break;
      }
    }
    return lhs;
  }

  NodePtr prefix() {
    const Token tok = current_;
    switch (tok.kind) {
      case Tok::number:
        advance();
        return make_leaf(NodeKind::constant, tok.number);
      case Tok::minus:
        advance();
        return make_node(NodeKind::negate, expression(kUnary));
      case Tok::lparen: {
        advance();
        NodePtr inner = expression(0);
        expect(Tok::rparen, "')'");
        return inner;
      }
      case Tok::ident: {
        advance();
        if (tok.text == "t") return make_leaf(NodeKind::variable);
        for (const auto& [name, fn] : kFunctions) {
          if (name != tok.text) continue;
          expect(Tok::lparen, "'(' after function name");
          auto call = std::make_shared<RateNode>();
          call->kind = NodeKind::call;
          call->fn = fn;
          call->lhs = expression(0);
          expect(Tok::rparen, "')'");
          return call;
        }
        if (current_.kind == Tok::lparen)
          throw ParseError(Errc::UnknownFunction, tok.pos, "tanh, exp, sin, cos, sqrt or abs",
                           "'" + std::string(tok.text) + "'");
        throw ParseError(Errc::SyntaxError, tok.pos, "'t'",
                         "unknown identifier '" + std::string(tok.text) + "' at position " + std::to_string(tok.pos));
      }
      default:
        throw ParseError(Errc::SyntaxError, tok.pos, "number, 't', function, '-' or '('",
                         "unexpected " + describe(tok) + " at position " + std::to_string(tok.pos) +
                             ", expected number, 't', function, '-' or '('");
    }
  }

  Lexer lexer_;
  Token current_;
};

RateExpr::RateExpr() : root_(make_leaf(NodeKind::constant, 0.0)) {}

RateExpr RateExpr::constant(double value) {
  if (!std::isfinite(value)) throw Error(Errc::DomainError, "constant(" + format_number(value) + ")");
  return RateExpr(make_leaf(NodeKind::constant, value));
}

double RateExpr::eval(double t) const {
  if (!std::isfinite(t)) domain_error("eval", "t=" + format_number(t));
  return eval_node(*root_, t);
}

std::string RateExpr::to_string() const {
  std::ostringstream os;
  print_node(*root_, os);
  return os.str();
}

bool RateExpr::is_constant() const {
  struct Walk {
    static bool has_t(const RateNode* n) {
      if (!n) return false;
      return n->kind == NodeKind::variable || has_t(n->lhs.get()) || has_t(n->rhs.get());
    }
  };
  return !Walk::has_t(root_.get());
}

int RateExpr::depth() const { return node_depth(root_.get()); }

bool operator==(const RateExpr& a, const RateExpr& b) { return equal_nodes(a.root_.get(), b.root_.get()); }

RateExpr parse_rate(std::string_view text) { return RateParser(text).parse(); }

}  // namespace gkls
