#include "doctest.h"

#include "flagforge/errors.hpp"
#include "flagforge/rational.hpp"

using namespace flagforge;

TEST_CASE("parse and print rationals") {
  CHECK(to_string(parse_rational("6/4")) == "3/2");
  CHECK(to_string(parse_rational("-2/6")) == "-1/3");
  CHECK(to_string(parse_rational("0.198")) == "99/500");
  CHECK(to_string(parse_rational("1e-6")) == "1/1000000");
  CHECK(to_string(parse_rational("2.5E1")) == "25");
  CHECK(to_string(parse_rational(" 7 ")) == "7");
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK_THROWS_AS(parse_rational(""), ParseError);
}

TEST_CASE("best rational approximation") {
  CHECK(best_approximation(0.4999999913, 100) == Rational(1, 2));
  CHECK(best_approximation(0.3333334, 10) == Rational(1, 3));
  CHECK(best_approximation(-0.75, 10) == Rational(-3, 4));
  CHECK(best_approximation(3.14159265358979, 1000) == Rational(355, 113));
  // 0.3 with limit 2: candidates 0, 1/2; 1/2 is closer than 0 (0.2 vs 0.3)
  CHECK(best_approximation(0.3, 2) == Rational(1, 2));
  CHECK(best_approximation(0.0, 5) == Rational(0));
}

TEST_CASE("best approximation is optimal among small denominators") {
  // brute force oracle over all p/q with q <= limit
  for (double x : {0.1234567, 0.7071067811865476, 0.198208, 2.718281828, -0.41}) {
    for (std::uint64_t limit : {3ULL, 10ULL, 57ULL, 1000ULL}) {
      Rational got = best_approximation(x, limit);
      Rational target(x);
      Rational best_err = abs(got - target);
      CHECK(got.get_den() <= Integer(static_cast<unsigned long>(limit)));
      for (std::uint64_t q = 1; q <= limit; ++q) {
        Integer p = Integer(Rational(target * Rational(static_cast<unsigned long>(q))).get_num() /
                            Rational(target * Rational(static_cast<unsigned long>(q))).get_den());
        for (Integer cand : {Integer(p - 1), p, Integer(p + 1)}) {
          Rational c(cand, Integer(static_cast<unsigned long>(q)));
          c.canonicalize();
          CHECK(abs(c - target) >= best_err);
        }
      }
    }
  }
}

TEST_CASE("binomial and decimal rendering") {
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(3, 5) == 0);
  CHECK(to_decimal(Rational(6, 13), 6) == "0.461538");
  CHECK(to_decimal(Rational(-1, 8), 3) == "-0.125");
  CHECK(to_decimal(Rational(5), 2) == "5.00");
}
