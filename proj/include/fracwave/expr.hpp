#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fracwave/error.hpp"

namespace fracwave::expr {

inline constexpr std::size_t kMaxSourceBytes = 64 * 1024;
inline constexpr int kMaxDepth = 64;

enum class TokenKind { Number, Identifier, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

const char* to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  SourceSpan span;
  double number = 0.0;  ///< Number tokens only
  std::string text;     ///< source text of the token
};

/// Splits `source` into tokens, ending with an End token at the source length.
/// Throws SpanError(Syntax) on illegal characters and malformed numbers.
std::vector<Token> tokenize(std::string_view source);

enum class NodeKind { Number, VarX, VarT, Pi, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Exp, Sqrt, Abs };

struct Node {
  NodeKind kind;
  SourceSpan span;
  double value = 0.0;             ///< Number
  Function function = Function::Sin;  ///< Call
  std::shared_ptr<const Node> lhs;  ///< operand of Neg and Call, left of binaries
  std::shared_ptr<const Node> rhs;
  int depth = 1;
};

/// Immutable parsed expression in the variables x and t.
class Expr {
 public:
  Expr() = default;
  Expr(std::shared_ptr<const Node> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  const Node& root() const { return *root_; }
  const std::string& source() const noexcept { return source_; }
  bool empty() const noexcept { return !root_; }

  double operator()(double x, double t) const;
  bool depends_on_x() const;
  bool depends_on_t() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

/// Precedence climbing: ^ (right-associative) binds tightest, then unary minus,
/// then * and /, then + and -. Throws SpanError(Syntax).
Expr parse(const std::vector<Token>& tokens, std::string_view source);
Expr parse(std::string_view source);

/// Strict evaluation: division by zero, domain errors and non-finite results
/// throw SpanError (Evaluation or Domain) located at the offending node.
double evaluate(const Expr& e, double x, double t);

/// Fully parenthesised form that parses back to the same tree.
std::string to_string(const Expr& e);

bool structurally_equal(const Node& a, const Node& b);

/// Source line with a caret marker under `span`, for diagnostics.
std::string underline(std::string_view source, SourceSpan span);

}  // namespace fracwave::expr
