#pragma once

// Scalar rate expressions gamma(t) such as "1 - 0.5*tanh(t)".
//
// Grammar, loosest to tightest:  + -   then  * /   then unary -   then ^
// ("^" is right-associative). Calls are limited to tanh, exp, sin, cos,
// sqrt and abs; the only bound variable is t. Implicit multiplication is
// rejected.

#include <memory>
#include <string>
#include <string_view>

#include "gkls/error.hpp"

namespace gkls {

class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t position, std::string expected, const std::string& what)
      : Error(code, what), position_(position), expected_(std::move(expected)) {}

  /// Zero-based byte offset into the source text.
  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

enum class RateFunction { tanh, exp, sin, cos, sqrt, abs };

struct RateNode;

/// Immutable expression tree; copies share nodes and may be evaluated from
/// several threads at once.
class RateExpr {
 public:
  RateExpr();  // the constant 0

  static RateExpr constant(double value);

  /// Value at time t. Division by zero, non-real powers, negative square
  /// roots and overflow throw Errc::DomainError instead of yielding NaN/Inf.
  double eval(double t) const;

  /// Fully parenthesized source text; parsing it gives back an equal tree.
  std::string to_string() const;

  bool is_constant() const;
  int depth() const;

  friend bool operator==(const RateExpr& a, const RateExpr& b);

 private:
  explicit RateExpr(std::shared_ptr<const RateNode> root) : root_(std::move(root)) {}
  std::shared_ptr<const RateNode> root_;

  friend class RateParser;
};

RateExpr parse_rate(std::string_view text);

}  // namespace gkls
