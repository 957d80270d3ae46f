#include <cmath>
#include <string>

#include "doctest.h"
#include "l2ext/expr.hpp"
#include "support.hpp"

using namespace l2ext;

TEST_SUITE("expr") {

TEST_CASE("precedence and associativity") {
  CHECK(parse("2*x+1").eval(3.0) == doctest::Approx(7.0));
  CHECK(parse("1-2-3").eval(0.0) == doctest::Approx(-4.0));
  CHECK(parse("8/4/2").eval(0.0) == doctest::Approx(1.0));
  CHECK(parse("2*x^2").eval(3.0) == doctest::Approx(18.0));
  CHECK(parse("x^-1").eval(4.0) == doctest::Approx(0.25));
  CHECK(parse(" x * log( e * x ) ").eval(1.0) == doctest::Approx(1.0));
  CHECK(parse("exp(log(x))").eval(2.5) == doctest::Approx(2.5));
}

TEST_CASE("parameters bind and unbound ones raise") {
  const Expr e = parse("x^2 / s");
  CHECK(e.params() == std::set<std::string>{"s"});
  CHECK(e.eval(2.0, {{"s", 0.5}}) == doctest::Approx(8.0));
  CHECK(e.bind({{"s", 4.0}}).eval(2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(e.eval(2.0), DomainError);
  CHECK_THROWS_AS(parse("x^2/s", {"t"}), ParseError);
}

TEST_CASE("parse errors carry offsets") {
  try {
    parse("2*+x");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("(x"), ParseError);
  CHECK_THROWS_AS(parse("x^y"), ParseError);
  CHECK_THROWS_AS(parse("log x"), ParseError);
  CHECK_THROWS_AS(parse("x $ 2"), ParseError);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(parse("log(x-2)").eval(1.0), DomainError);
  CHECK_THROWS_AS(parse("1/(x-1)").eval(1.0), DomainError);
  CHECK_THROWS_AS(parse("(x-2)^0.5").eval(1.0), DomainError);
}

TEST_CASE("derivatives of known functions") {
  CHECK(differentiate(parse("x^3")).eval(2.0) == doctest::Approx(12.0));
  CHECK(differentiate(parse("x*log(e*x)")).eval(1.0) == doctest::Approx(2.0));
  CHECK(differentiate(parse("exp(2*x)")).eval(0.5) == doctest::Approx(2.0 * std::exp(1.0)));
  CHECK(differentiate(parse("1/x")).eval(2.0) == doctest::Approx(-0.25));
  CHECK(differentiate(parse("5")).eval(2.0) == 0.0);
}

namespace {

// Random well-formed expression text over x, a parameter `a`, and every operator.
std::string random_text(Rng& rng, int depth) {
  if (depth == 0 || rng.coin(0.25)) {
    const int k = rng.integer(0, 2);
    if (k == 0) return "x";
    if (k == 1) return "a";
    return std::to_string(rng.integer(1, 40) / 8.0).substr(0, 5);
  }
  const std::string l = random_text(rng, depth - 1);
  switch (rng.integer(0, 6)) {
    case 0:
      return "(" + l + "+" + random_text(rng, depth - 1) + ")";
    case 1:
      return "(" + l + "-" + random_text(rng, depth - 1) + ")";
    case 2:
      return l + "*" + random_text(rng, depth - 1);
    case 3:
      return l + "/(" + random_text(rng, depth - 1) + ")";
    case 4: {
      static const char* pows[] = {"2", "3", "0.5", "-1", "1.5"};
      return "(" + l + ")^" + pows[rng.integer(0, 4)];
    }
    case 5:
      return "exp(" + l + "/8)";
    default:
      return "log(" + l + ")";
  }
}

}  // namespace

TEST_CASE("property: print/parse round-trip preserves the tree") {
  Rng rng(20261016);
  for (int i = 0; i < 300; ++i) {
    const std::string text = random_text(rng, 4);
    const Expr e = parse(text);
    const Expr back = parse(e.to_string());
    INFO(text, " -> ", e.to_string());
    CHECK(back == e);
    CHECK(back.to_string() == e.to_string());
  }
}

TEST_CASE("property: symbolic derivative matches central differences") {
  Rng rng(7);
  const ParamMap params{{"a", 1.7}};
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const Expr e = parse(random_text(rng, 3));
    const Expr d = differentiate(e);
    const double x = rng.uniform(1.2, 3.0);
    const double h = 1e-5;
    double f0, fp, fm, dv;
    try {
      f0 = e.eval(x, params);
      fp = e.eval(x + h, params);
      fm = e.eval(x - h, params);
      dv = d.eval(x, params);
    } catch (const DomainError&) {
      continue;
    }
    if (!std::isfinite(f0) || !std::isfinite(fp) || !std::isfinite(fm) || std::abs(f0) > 1e4) continue;
    const double fd = (fp - fm) / (2.0 * h);
    INFO(e.to_string(), " at x = ", x);
    CHECK(std::abs(fd - dv) <= 1e-5 * (1.0 + std::abs(dv) + std::abs(f0)));
    ++checked;
  }
  CHECK(checked > 150);
}

}  // TEST_SUITE
