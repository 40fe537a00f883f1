#include "fracwave/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fracwave::expr {
namespace {

constexpr int kMaxNesting = 256;

[[noreturn]] void fail(const std::string& what, SourceSpan span) {
  throw SpanError(ErrorCode::Syntax, what, span);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

std::size_t utf8_length(unsigned char lead) {
  if (lead >= 0xF0) return 4;
  if (lead >= 0xE0) return 3;
  if (lead >= 0xC0) return 2;
  return 1;
}

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

}  // namespace

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Number: return "number";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Caret: return "'^'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Comma: return "','";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view source) {
  if (source.size() > kMaxSourceBytes)
    fail("expression longer than 64 KiB", {kMaxSourceBytes, source.size()});
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = source.size();
  auto push = [&](TokenKind kind, std::size_t start, std::size_t end) {
    tokens.push_back({kind, {start, end}, 0.0, std::string(source.substr(start, end - start))});
  };
  while (i < n) {
    const char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(source[i + 1]))) {
      while (i < n && is_digit(source[i])) ++i;
      if (i < n && source[i] == '.') {
        ++i;
        while (i < n && is_digit(source[i])) ++i;
      }
      if (i < n && (source[i] == 'e' || source[i] == 'E')) {
        ++i;
        if (i < n && (source[i] == '+' || source[i] == '-')) ++i;
        if (i >= n || !is_digit(source[i]))
          fail("malformed number " + quoted(source.substr(start, i - start)) + ": exponent needs digits",
               {start, i});
        while (i < n && is_digit(source[i])) ++i;
      }
      if (i < n && source[i] == '.') fail("malformed number: unexpected '.'", {i, i + 1});
      double value = 0.0;
      const auto res = std::from_chars(source.data() + start, source.data() + i, value);
      if (res.ec != std::errc() || !std::isfinite(value))
        fail("number " + quoted(source.substr(start, i - start)) + " is out of range", {start, i});
      push(TokenKind::Number, start, i);
      tokens.back().number = value;
      continue;
    }
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(source[i])) ++i;
      push(TokenKind::Identifier, start, i);
      continue;
    }
    TokenKind kind;
    switch (c) {
      case '+': kind = TokenKind::Plus; break;
      case '-': kind = TokenKind::Minus; break;
      case '*': kind = TokenKind::Star; break;
      case '/': kind = TokenKind::Slash; break;
      case '^': kind = TokenKind::Caret; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case ',': kind = TokenKind::Comma; break;
      default: {
        const std::size_t len = std::min(utf8_length(static_cast<unsigned char>(c)), n - i);
        fail("illegal character " + quoted(source.substr(i, len)), {i, i + len});
      }
    }
    push(kind, start, i + 1);
    ++i;
  }
  tokens.push_back({TokenKind::End, {n, n}, 0.0, ""});
  return tokens;
}

namespace {

using NodePtr = std::shared_ptr<const Node>;

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, std::string_view source) : tokens_(tokens), source_(source) {
    if (tokens_.empty() || tokens_.back().kind != TokenKind::End)
      throw Error(ErrorCode::InvalidArgument, "token list must end with an End token");
  }

  NodePtr parse() {
    NodePtr root = expression(1);
    const Token& tok = peek();
    if (tok.kind == TokenKind::RParen) fail("unbalanced parenthesis: unexpected ')'", tok.span);
    if (tok.kind == TokenKind::Number || tok.kind == TokenKind::Identifier || tok.kind == TokenKind::LParen)
      fail("missing operator before " + quoted(tok.text) + " (no implicit multiplication)", tok.span);
    if (tok.kind != TokenKind::End) fail("unexpected " + std::string(to_string(tok.kind)), tok.span);
    return root;
  }

 private:
  struct Guard {
    explicit Guard(Parser& p) : p(p) {
      if (++p.nesting_ > kMaxNesting) fail("expression nested too deeply", p.peek().span);
    }
    ~Guard() { --p.nesting_; }
    Parser& p;
  };

  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  static int precedence(TokenKind kind) {
    switch (kind) {
      case TokenKind::Plus:
      case TokenKind::Minus: return 1;
      case TokenKind::Star:
      case TokenKind::Slash: return 2;
      case TokenKind::Caret: return 4;
      default: return 0;
    }
  }

  static NodePtr make(NodeKind kind, SourceSpan span, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->span = span;
    int depth = 0;
    if (lhs) depth = std::max(depth, lhs->depth);
    if (rhs) depth = std::max(depth, rhs->depth);
    node->depth = depth + 1;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    if (node->depth > kMaxDepth) fail("expression tree deeper than 64 levels", span);
    return node;
  }

  // Unary minus sits between ^ (4) and * / (2).
  NodePtr expression(int min_prec) {
    Guard guard(*this);
    NodePtr lhs = operand();
    for (;;) {
      const Token& op = peek();
      const int prec = precedence(op.kind);
      if (prec == 0 || prec < min_prec) break;
      advance();
      const bool right_assoc = op.kind == TokenKind::Caret;
      NodePtr rhs = expression(right_assoc ? prec : prec + 1);
      NodeKind kind = NodeKind::Add;
      switch (op.kind) {
        case TokenKind::Plus: kind = NodeKind::Add; break;
        case TokenKind::Minus: kind = NodeKind::Sub; break;
        case TokenKind::Star: kind = NodeKind::Mul; break;
        case TokenKind::Slash: kind = NodeKind::Div; break;
        default: kind = NodeKind::Pow; break;
      }
      const SourceSpan span{lhs->span.start, rhs->span.end};
      lhs = make(kind, span, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr operand() {
    Guard guard(*this);
    const Token& tok = advance();
    switch (tok.kind) {
      case TokenKind::Minus: {
        NodePtr inner = expression(3);
        const SourceSpan span{tok.span.start, inner->span.end};
        return make(NodeKind::Neg, span, std::move(inner));
      }
      case TokenKind::Number: {
        auto node = make(NodeKind::Number, tok.span);
        std::const_pointer_cast<Node>(node)->value = tok.number;
        return node;
      }
      case TokenKind::Identifier: return identifier(tok);
      case TokenKind::LParen: {
        NodePtr inner = expression(1);
        const std::size_t close = peek().span.end;
        expect_close(tok);
        // Widen the span over the parentheses so diagnostics quote balanced text.
        auto wrapped = std::make_shared<Node>(*inner);
        wrapped->span = {tok.span.start, close};
        return wrapped;
      }
      case TokenKind::RParen: fail("unbalanced parenthesis: unexpected ')'", tok.span);
      case TokenKind::End: fail("unexpected end of input", tok.span);
      default: fail("unexpected " + std::string(to_string(tok.kind)), tok.span);
    }
  }

  void expect_close(const Token& open) {
    const Token& tok = peek();
    if (tok.kind == TokenKind::RParen) {
      advance();
      return;
    }
    if (tok.kind == TokenKind::Comma) fail("functions take exactly one argument", tok.span);
    std::ostringstream msg;
    msg << "unbalanced parenthesis: '(' at offset " << open.span.start << " is not closed";
    if (tok.kind != TokenKind::End) msg << "; found " << quoted(tok.text);
    fail(msg.str(), tok.span);
  }

  NodePtr identifier(const Token& tok) {
    if (tok.text == "x") return make(NodeKind::VarX, tok.span);
    if (tok.text == "t") return make(NodeKind::VarT, tok.span);
    if (tok.text == "pi") return make(NodeKind::Pi, tok.span);
    static const std::pair<const char*, Function> kFunctions[] = {
        {"sin", Function::Sin}, {"cos", Function::Cos}, {"exp", Function::Exp},
        {"sqrt", Function::Sqrt}, {"abs", Function::Abs}};
    for (const auto& [name, fn] : kFunctions) {
      if (tok.text != name) continue;
      const Token& open = peek();
      if (open.kind != TokenKind::LParen) fail("function " + quoted(tok.text) + " needs '('", open.span);
      advance();
      if (peek().kind == TokenKind::RParen) fail("function " + quoted(tok.text) + " needs an argument", peek().span);
      NodePtr arg = expression(1);
      const SourceSpan close = peek().span;
      expect_close(open);
      auto node = make(NodeKind::Call, {tok.span.start, close.end}, std::move(arg));
      std::const_pointer_cast<Node>(node)->function = fn;
      return node;
    }
    fail("unknown identifier " + quoted(tok.text) + " (expected x, t, pi, sin, cos, exp, sqrt or abs)", tok.span);
  }

  const std::vector<Token>& tokens_;
  std::string_view source_;
  std::size_t pos_ = 0;
  int nesting_ = 0;
};

struct Evaluator {
  const std::string& source;
  double x;
  double t;

  [[noreturn]] void raise(ErrorCode code, const std::string& what, const Node& node) const {
    std::ostringstream msg;
    msg << what << " in " << quoted(std::string_view(source).substr(node.span.start, node.span.end - node.span.start))
        << " at x = " << x << ", t = " << t;
    throw SpanError(code, msg.str(), node.span);
  }

  double finite(double v, const Node& node) const {
    if (!std::isfinite(v)) raise(ErrorCode::Evaluation, "non-finite result", node);
    return v;
  }

  double eval(const Node& n) const {
    switch (n.kind) {
      case NodeKind::Number: return n.value;
      case NodeKind::VarX: return x;
      case NodeKind::VarT: return t;
      case NodeKind::Pi: return std::numbers::pi;
      case NodeKind::Neg: return -eval(*n.lhs);
      case NodeKind::Add: return finite(eval(*n.lhs) + eval(*n.rhs), n);
      case NodeKind::Sub: return finite(eval(*n.lhs) - eval(*n.rhs), n);
      case NodeKind::Mul: return finite(eval(*n.lhs) * eval(*n.rhs), n);
      case NodeKind::Div: {
        const double num = eval(*n.lhs);
        const double den = eval(*n.rhs);
        if (den == 0.0) raise(ErrorCode::Evaluation, "division by zero", n);
        return finite(num / den, n);
      }
      case NodeKind::Pow: {
        const double base = eval(*n.lhs);
        const double ex = eval(*n.rhs);
        if (base < 0.0 && std::trunc(ex) != ex)
          raise(ErrorCode::Domain, "negative base with a fractional exponent", n);
        if (base == 0.0 && ex < 0.0) raise(ErrorCode::Evaluation, "division by zero", n);
        return finite(std::pow(base, ex), n);
      }
      case NodeKind::Call: {
        const double a = eval(*n.lhs);
        switch (n.function) {
          case Function::Sin: return std::sin(a);
          case Function::Cos: return std::cos(a);
          case Function::Exp: return finite(std::exp(a), n);
          case Function::Sqrt:
            if (a < 0.0) raise(ErrorCode::Domain, "square root of a negative number", n);
            return std::sqrt(a);
          case Function::Abs: return std::fabs(a);
        }
      }
    }
    raise(ErrorCode::Evaluation, "malformed expression", n);
  }
};

bool contains(const Node& n, NodeKind kind) {
  if (n.kind == kind) return true;
  return (n.lhs && contains(*n.lhs, kind)) || (n.rhs && contains(*n.rhs, kind));
}

const char* function_name(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Sqrt: return "sqrt";
    case Function::Abs: return "abs";
  }
  return "?";
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, n.value);
      out.append(buf, res.ptr);
      return;
    }
    case NodeKind::VarX: out += 'x'; return;
    case NodeKind::VarT: out += 't'; return;
    case NodeKind::Pi: out += "pi"; return;
    case NodeKind::Neg:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      return;
    case NodeKind::Call:
      out += function_name(n.function);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
    default: break;
  }
  const char* op = n.kind == NodeKind::Add   ? " + "
                   : n.kind == NodeKind::Sub ? " - "
                   : n.kind == NodeKind::Mul ? " * "
                   : n.kind == NodeKind::Div ? " / "
                                             : " ^ ";
  out += '(';
  print(*n.lhs, out);
  out += op;
  print(*n.rhs, out);
  out += ')';
}

}  // namespace

Expr parse(const std::vector<Token>& tokens, std::string_view source) {
  return Expr(Parser(tokens, source).parse(), std::string(source));
}

Expr parse(std::string_view source) { return parse(tokenize(source), source); }

double evaluate(const Expr& e, double x, double t) {
  if (e.empty()) throw Error(ErrorCode::InvalidArgument, "evaluating an empty expression");
  return Evaluator{e.source(), x, t}.eval(e.root());
}

double Expr::operator()(double x, double t) const { return evaluate(*this, x, t); }

bool Expr::depends_on_x() const { return root_ && contains(*root_, NodeKind::VarX); }

bool Expr::depends_on_t() const { return root_ && contains(*root_, NodeKind::VarT); }

std::string to_string(const Expr& e) {
  std::string out;
  if (!e.empty()) print(e.root(), out);
  return out;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == NodeKind::Number && a.value != b.value) return false;
  if (a.kind == NodeKind::Call && a.function != b.function) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !structurally_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !structurally_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

std::string underline(std::string_view source, SourceSpan span) {
  const std::size_t start = std::min(span.start, source.size());
  std::size_t line_start = 0;
  if (start > 0) {
    const std::size_t nl = source.rfind('\n', start - 1);
    if (nl != std::string_view::npos) line_start = nl + 1;
  }
  std::size_t line_end = source.find('\n', start);
  if (line_end == std::string_view::npos) line_end = source.size();
  const std::size_t end = std::clamp(span.end, start, line_end);
  std::string out(source.substr(line_start, line_end - line_start));
  out += '\n';
  out.append(start - line_start, ' ');
  out += '^';
  if (end > start + 1) out.append(end - start - 1, '~');
  return out;
}

}  // namespace fracwave::expr
