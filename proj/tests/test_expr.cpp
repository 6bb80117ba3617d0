#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "core/chart.hpp"
#include "core/expr.hpp"
#include "support/oracles.hpp"

using namespace pencilkit;
using pencilkit::testing::close;

namespace {

const std::vector<std::string> kCoords = {"x1", "x2"};

Expr parse2(const std::string& text) {
  return parse_expression(text, kCoords);
}

// random expressions that stay evaluable on [0.5, 2]^2
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  switch (pick(rng)) {
    case 0: {
      std::uniform_real_distribution<double> c(-3.0, 3.0);
      return Expr::constant(c(rng));
    }
    case 1: return Expr::variable("x1", 0);
    case 2: return Expr::variable("x2", 1);
    case 3: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 4: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 6:
      // keep denominators away from zero
      return random_expr(rng, depth - 1) /
             (Expr::constant(3.0) + sin(random_expr(rng, depth - 1)));
    case 7: return sin(random_expr(rng, depth - 1));
    case 8: return exp(Expr::constant(0.25) * sin(random_expr(rng, depth - 1)));
    default:
      return pow(random_expr(rng, depth - 1), 2);
  }
}

Point random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  return {u(rng), u(rng)};
}

}  // namespace

TEST_CASE("parse literals and operator structure") {
  CHECK(parse2("0").is_zero());
  const Expr e = parse2("x1^2 * sin(x2)");
  CHECK(e.kind() == ExprKind::Mul);
  CHECK(e.left().kind() == ExprKind::Pow);
  CHECK(e.left().exponent() == 2);
  CHECK(e.right().kind() == ExprKind::Sin);
  CHECK(e.right().left().kind() == ExprKind::Variable);
  CHECK(e.right().left().index() == 1);
}

TEST_CASE("evaluation matches hand values") {
  const Expr e = parse2("exp(x1+x2)/x1");
  CHECK(close(e.evaluate(Point{1.0, 0.0}), 2.718281828459045, 1e-12));
  const Expr id = parse2("sin(x1)^2 + cos(x1)^2");
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i)
    CHECK(std::fabs(id.evaluate(random_point(rng)) - 1.0) < 1e-12);
}

TEST_CASE("parser reports positions and unknown identifiers") {
  CHECK_THROWS_WITH_AS(parse2("x1 + "), doctest::Contains("offset"), Error);
  try {
    parse2("x1 * (x2");
    FAIL("expected a syntax error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::SyntaxError);
  }
  try {
    parse2("x1 + y7");
    FAIL("expected an unknown identifier");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::UnknownIdentifier);
    CHECK(std::string(err.what()).find("y7") != std::string::npos);
  }
  // function names need call syntax
  CHECK_THROWS_AS(parse2("sin + 1"), Error);
}

TEST_CASE("integer exponents, including negative ones") {
  const Expr e = parse2("x1^-2");
  CHECK(close(e.evaluate(Point{2.0, 0.0}), 0.25, 1e-14));
  // '-' binds to the whole factor
  const Expr f = parse2("-x1^2");
  CHECK(close(f.evaluate(Point{3.0, 0.0}), -9.0, 1e-14));
}

TEST_CASE("evaluation domain errors carry the point") {
  const Expr e = parse2("1/x1");
  try {
    e.evaluate(Point{0.0, 1.5});
    FAIL("expected a domain error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::EvalDomain);
    REQUIRE(err.witness().size() == 2);
    CHECK(err.witness()[0] == 0.0);
    CHECK(err.witness()[1] == 1.5);
  }
  CHECK_THROWS_AS(parse2("log(x1 - 1)").evaluate(Point{0.5, 0.0}), Error);
  CHECK_THROWS_AS(parse2("sqrt(x1 - 1)").evaluate(Point{0.5, 0.0}), Error);
}

TEST_CASE("derivative: constants, power rule, chain rule") {
  CHECK(parse2("3.5").derivative(0).is_zero());
  const Expr e = parse2("x1^2 * sin(x2)");
  const Expr d = e.derivative(0);
  const Expr expected = parse2("2*x1*sin(x2)");
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Point p = random_point(rng);
    CHECK(close(d.evaluate(p), expected.evaluate(p), 1e-12));
  }
  const Expr chain = parse2("exp(x1*x2)");
  CHECK(close(chain.derivative(1).evaluate(Point{1.0, 1.0}),
              2.718281828459045, 1e-9));
}

TEST_CASE("derivative agrees with central differences on random trees") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Expr e = random_expr(rng, 4);
    for (int coord = 0; coord < 2; ++coord) {
      const Expr d = e.derivative(coord);
      for (int rep = 0; rep < 3; ++rep) {
        const Point p = random_point(rng);
        double fd, sym;
        try {
          fd = testing::fd_partial_expr(e, p, coord);
          sym = d.evaluate(p);
        } catch (const Error&) {
          continue;  // a random tree can still wander out of domain
        }
        if (std::fabs(fd) > 1e6) continue;  // FD noise dominates
        CHECK(close(sym, fd, 1e-6));
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("simplify removes trivial structure") {
  const Expr zero = Expr::constant(0.0) * parse2("exp(x1)");
  CHECK(zero.is_zero());
  CHECK(pow(parse2("x1+x2"), 1).same_tree(parse2("x1+x2")));
  const Expr diff = parse2("x1 - x1");
  CHECK(diff.is_zero());

  const Expr doubled = parse2("x1 + x1");
  const Expr twice = parse2("2*x1");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Point p = random_point(rng);
    CHECK(close(doubled.evaluate(p), twice.evaluate(p), 1e-12));
  }
}

TEST_CASE("simplify is semantics-preserving and idempotent") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const Expr e = random_expr(rng, 4);
    const Expr s = e.simplified();
    const Expr ss = s.simplified();
    CHECK(ss.same_tree(s));  // idempotent on the nose
    for (int rep = 0; rep < 5; ++rep) {
      const Point p = random_point(rng);
      double ve, vs;
      try {
        ve = e.evaluate(p);
        vs = s.evaluate(p);
      } catch (const Error&) {
        continue;
      }
      CHECK(close(vs, ve, 1e-12));
    }
  }
}

TEST_CASE("print / parse round trip preserves evaluation") {
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 80; ++trial) {
    const Expr e = random_expr(rng, 4);
    const std::string text = e.str();
    Expr reparsed = parse_expression(text, kCoords);
    const std::string text2 = reparsed.str();
    Expr reparsed2 = parse_expression(text2, kCoords);
    for (int rep = 0; rep < 4; ++rep) {
      const Point p = random_point(rng);
      double v0, v1, v2;
      try {
        v0 = e.evaluate(p);
        v1 = reparsed.evaluate(p);
        v2 = reparsed2.evaluate(p);
      } catch (const Error&) {
        continue;
      }
      CHECK(close(v1, v0, 1e-12));
      CHECK(v1 == v2);  // printing is a fixpoint after one round
    }
  }
}

TEST_CASE("substitution composes expressions") {
  const Expr e = parse2("x1^2 + x2");
  const std::vector<Expr> repl = {parse2("x1 + x2"), parse2("x1*x2")};
  const Expr composed = e.substituted(repl);
  const Point p{1.5, 0.5};
  CHECK(close(composed.evaluate(p), std::pow(2.0, 2) + 0.75, 1e-12));
}

TEST_CASE("evaluation is bit-deterministic") {
  std::mt19937_64 rng(1);
  const Expr e = random_expr(rng, 5);
  const Point p = random_point(rng);
  double v0;
  try {
    v0 = e.evaluate(p);
  } catch (const Error&) {
    return;
  }
  for (int i = 0; i < 10; ++i) CHECK(e.evaluate(p) == v0);
}
