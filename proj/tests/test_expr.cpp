#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracwave/expr.hpp"

using namespace fracwave;
using namespace fracwave::expr;

namespace {

std::vector<TokenKind> kinds(std::string_view s) {
  std::vector<TokenKind> out;
  for (const Token& t : tokenize(s)) out.push_back(t.kind);
  return out;
}

// Runs `fn` and returns the SpanError it throws.
template <class Fn>
SpanError span_error(Fn&& fn) {
  try {
    fn();
  } catch (const SpanError& e) {
    return e;
  }
  FAIL("expected a SpanError");
  return SpanError(ErrorCode::Syntax, "", {0, 0});
}

const std::vector<std::string> kCorpus = {
    "1+x",
    "sin(pi*t)",
    "2+3*4",
    "2^3^2",
    "-x^2",
    "--x",
    "-(x-1)*-t",
    "1-2-3",
    "8/4/2",
    "2^-1",
    "(2^3)^2",
    "sin(pi*x)*exp(-t)",
    "1+0.5*sin(pi*x)*exp(-t)",
    "sqrt(abs(cos(x)))+1e-3*t",
    ".5e+2*x - 3.25E-1",
    "1 + 0.3*cos(2*pi*x)",
    "x*(1-x)*exp(-t^2)",
};

}  // namespace

TEST_CASE("tokenize: examples") {
  using K = TokenKind;
  CHECK(kinds("1+x") == std::vector{K::Number, K::Plus, K::Identifier, K::End});
  CHECK(kinds("sin(pi*t)") ==
        std::vector{K::Identifier, K::LParen, K::Identifier, K::Star, K::Identifier, K::RParen, K::End});
  const auto toks = tokenize("  12.5e-1 ,x ");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0].number == 1.25);
  CHECK(toks[0].span.start == 2);
  CHECK(toks[0].span.end == 9);
  CHECK(toks[1].kind == K::Comma);
  CHECK(toks[3].span.start == 13);
}

TEST_CASE("tokenize: lexical errors carry spans") {
  auto e = span_error([] { tokenize("1..2"); });
  CHECK(e.code() == ErrorCode::Syntax);
  CHECK(e.span().start == 2);
  CHECK(e.span().end == 3);

  e = span_error([] { tokenize("1e"); });
  CHECK(e.span().start == 0);
  CHECK(e.span().end == 2);

  e = span_error([] { tokenize("2*1e+"); });
  CHECK(e.span().start == 2);

  e = span_error([] { tokenize("x $ 1"); });
  CHECK(e.span().start == 2);
  CHECK(e.span().end == 3);

  e = span_error([] { tokenize("x+\xc3\xa9"); });
  CHECK(e.span().start == 2);
  CHECK(e.span().end == 4);

  e = span_error([] { tokenize("1e999"); });
  CHECK(e.span().end == 5);

  CHECK_THROWS_AS(tokenize(std::string(kMaxSourceBytes + 1, ' ')), SpanError);
  CHECK_NOTHROW(tokenize(std::string(kMaxSourceBytes, ' ')));
}

TEST_CASE("parse: precedence and associativity") {
  CHECK(parse("2+3*4")(0, 0) == 14.0);
  CHECK(parse("2^3^2")(0, 0) == 512.0);
  CHECK(parse("-x^2")(3, 0) == -9.0);
  CHECK(parse("1-2-3")(0, 0) == -4.0);
  CHECK(parse("8/4/2")(0, 0) == 1.0);
  CHECK(parse("2^-1")(0, 0) == 0.5);
  CHECK(parse("-2*3")(0, 0) == -6.0);
  CHECK(parse("--x")(2, 0) == 2.0);
  CHECK(to_string(parse("-x^2")) == "(-(x ^ 2))");
  CHECK(to_string(parse("-x*t")) == "((-x) * t)");
}

TEST_CASE("parse: errors carry spans") {
  struct Case {
    const char* src;
    std::size_t start;
    const char* fragment;
  };
  const Case cases[] = {
      {"foo+1", 0, "unknown identifier"},
      {"2x", 1, "implicit multiplication"},
      {"(1+x", 4, "unbalanced"},
      {"1+x)", 3, "unbalanced"},
      {"sin(x,t)", 5, "one argument"},
      {"sin x", 4, "needs '('"},
      {"1+", 2, "end of input"},
      {"*x", 0, "unexpected"},
      {"cos()", 4, "needs an argument"},
      {"", 0, "end of input"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.src);
    const auto e = span_error([&] { parse(c.src); });
    CHECK(e.code() == ErrorCode::Syntax);
    CHECK(e.span().start == c.start);
    CHECK(std::string(e.what()).find(c.fragment) != std::string::npos);
  }
}

TEST_CASE("parse: depth limit") {
  std::string deep = "x";
  for (int i = 0; i < kMaxDepth - 1; ++i) deep = "-" + deep;
  CHECK(parse(deep).root().depth == kMaxDepth);
  CHECK_THROWS_AS(parse("-" + deep), SpanError);
  CHECK_THROWS_AS(parse(std::string(5000, '(') + "x" + std::string(5000, ')')), SpanError);
}

TEST_CASE("evaluate: examples") {
  CHECK(parse("sin(pi*x)*exp(-t)")(0.5, 0.0) == 1.0);
  const double want = 1.0 + 0.5 * std::sin(std::numbers::pi / 4) * std::exp(-1.0);
  CHECK(parse("1+0.5*sin(pi*x)*exp(-t)")(0.25, 1.0) == doctest::Approx(want).epsilon(1e-15));
  CHECK(want == doctest::Approx(1.1300650).epsilon(1e-7));
  CHECK(parse("abs(-3)+sqrt(4)")(0, 0) == 5.0);
}

TEST_CASE("evaluate: strict errors located at the node") {
  const std::string src = "1 + 1/(x-0.5)";
  const Expr e = parse(src);
  CHECK(e(0.25, 0) == -3.0);
  auto err = span_error([&] { e(0.5, 0); });
  CHECK(err.code() == ErrorCode::Evaluation);
  CHECK(src.substr(err.span().start, err.span().end - err.span().start) == "1/(x-0.5)");

  err = span_error([] { parse("2*sqrt(x-1)")(0, 0); });
  CHECK(err.code() == ErrorCode::Domain);
  CHECK(err.span().start == 2);

  CHECK(span_error([] { parse("(-8)^(1/3)")(0, 0); }).code() == ErrorCode::Domain);
  CHECK(parse("(-2)^3")(0, 0) == -8.0);
  CHECK(span_error([] { parse("0^-1")(0, 0); }).code() == ErrorCode::Evaluation);
  CHECK(span_error([] { parse("exp(1000)")(0, 0); }).code() == ErrorCode::Evaluation);
  CHECK(span_error([] { parse("10^400")(0, 0); }).code() == ErrorCode::Evaluation);
  CHECK(span_error([] { parse("1e300*1e300")(0, 0); }).code() == ErrorCode::Evaluation);
}

TEST_CASE("round trip and purity on the corpus") {
  for (const auto& s : kCorpus) {
    CAPTURE(s);
    const Expr a = parse(s);
    const std::string printed = to_string(a);
    const Expr b = parse(printed);
    CHECK(structurally_equal(a.root(), b.root()));
    CHECK(to_string(b) == printed);
    for (double x : {0.0, 0.3, 1.0}) {
      const double v1 = a(x, 0.7);
      const double v2 = a(x, 0.7);
      CHECK(std::memcmp(&v1, &v2, sizeof v1) == 0);
      const double w = b(x, 0.7);
      CHECK(std::memcmp(&v1, &w, sizeof v1) == 0);
    }
  }
}

TEST_CASE("variable dependence") {
  CHECK(parse("1+x").depends_on_x());
  CHECK_FALSE(parse("1+x").depends_on_t());
  CHECK(parse("exp(-t)").depends_on_t());
  CHECK_FALSE(parse("pi^2").depends_on_x());
}

TEST_CASE("underline marks the span") {
  CHECK(underline("1 + foo", {4, 7}) == "1 + foo\n    ^~~");
  CHECK(underline("a\nbc $", {5, 6}) == "bc $\n   ^");
  CHECK(underline("x", {1, 1}) == "x\n ^");
}

namespace {

// Random grammar-valid source with redundant parentheses and spacing.
std::string random_expression(std::mt19937_64& rng, int depth) {
  static const char* kLeaves[] = {"x", "t", "pi", "1", "0.5", "2.5e-1", "3", ".75"};
  static const char* kOps[] = {"+", "-", "*", "/", "^"};
  static const char* kFns[] = {"sin", "cos", "exp", "sqrt", "abs"};
  const auto pick = rng() % 10;
  std::string s;
  if (depth <= 0 || pick < 3) {
    s = kLeaves[rng() % std::size(kLeaves)];
  } else if (pick < 7) {
    s = random_expression(rng, depth - 1) + (rng() % 2 ? " " : "") + kOps[rng() % std::size(kOps)] +
        random_expression(rng, depth - 1);
  } else if (pick < 9) {
    s = std::string(kFns[rng() % std::size(kFns)]) + "(" + random_expression(rng, depth - 1) + ")";
  } else {
    s = "-" + random_expression(rng, depth - 1);
  }
  return rng() % 3 == 0 ? "(" + s + ")" : s;
}

}  // namespace

TEST_CASE("fuzz: every input yields a value or a structured error") {
  static const char* kPieces[] = {"x", "t", "pi", "sin", "cos", "exp", "sqrt", "abs", "foo", "1", "0",
                                  "2.5", "1e3", "1e", ".", "..", "+", "-", "*", "/", "^", "(", ")",
                                  ",", " ", "$", "\xc3", "1e-400", "9e999"};
  std::mt19937_64 rng(20240601);
  std::size_t values = 0;
  std::size_t errors = 0;
  std::size_t round_trips = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    if (i % 2 == 0) {
      s = random_expression(rng, 6);
    } else {
      const int len = 1 + static_cast<int>(rng() % 24);
      for (int k = 0; k < len; ++k) s += kPieces[rng() % std::size(kPieces)];
    }
    try {
      const Expr e = parse(s);
      const Expr back = parse(to_string(e));
      if (!structurally_equal(e.root(), back.root())) FAIL("round trip failed for " << s);
      ++round_trips;
      (void)e(0.3, 0.7);
      ++values;
    } catch (const SpanError& err) {
      if (err.span().start > err.span().end || err.span().end > s.size())
        FAIL("span outside source for " << s);
      ++errors;
    }
  }
  CHECK(values + errors == 10000);
  CHECK(round_trips >= 5000);
  MESSAGE("fuzz: " << values << " values, " << errors << " errors, " << round_trips << " parsed");
}
