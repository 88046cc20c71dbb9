#include "flagforge/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "flagforge/errors.hpp"

namespace flagforge {

Rational make_rational(long num, long den) {
  if (den == 0) throw InputError("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Integer pow10(long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty rational");
  std::string s(text);

  bool negative = false;
  std::string_view body(s);
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }

  Rational result;
  auto slash = body.find('/');
  if (slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw ParseError("malformed rational '" + s + "'");
    Integer n(std::string(num), 10), d(std::string(den), 10);
    if (d == 0) throw ParseError("zero denominator in '" + s + "'");
    result = Rational(n, d);
    result.canonicalize();
  } else {
    long exponent = 0;
    auto epos = body.find_first_of("eE");
    std::string_view mantissa = body;
    if (epos != std::string_view::npos) {
      auto exp_text = std::string(body.substr(epos + 1));
      mantissa = body.substr(0, epos);
      std::size_t consumed = 0;
      try {
        exponent = std::stol(exp_text, &consumed);
      } catch (const std::exception&) {
        throw ParseError("malformed exponent in '" + s + "'");
      }
      if (consumed != exp_text.size()) throw ParseError("malformed exponent in '" + s + "'");
    }
    auto dot = mantissa.find('.');
    std::string digits;
    long frac_len = 0;
    if (dot == std::string_view::npos) {
      digits = std::string(mantissa);
    } else {
      auto ip = mantissa.substr(0, dot);
      auto fp = mantissa.substr(dot + 1);
      if (ip.empty() && fp.empty()) throw ParseError("malformed number '" + s + "'");
      if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
        throw ParseError("malformed number '" + s + "'");
      digits = std::string(ip) + std::string(fp);
      frac_len = static_cast<long>(fp.size());
    }
    if (!all_digits(digits)) throw ParseError("malformed number '" + s + "'");
    Integer n(digits, 10);
    long scale = exponent - frac_len;
    if (scale >= 0) {
      result = Rational(n * pow10(scale));
    } else {
      result = Rational(n, pow10(-scale));
    }
  }
  result.canonicalize();
  if (negative) result = -result;
  return result;
}

std::string to_string(const Rational& q) {
  Rational c(q);
  c.canonicalize();
  return c.get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

Rational best_approximation(double x, std::uint64_t max_denominator) {
  if (!std::isfinite(x)) throw InputError("cannot approximate a non-finite value");
  if (max_denominator < 1) throw InputError("denominator limit must be >= 1");
  // Exact value of the double, then continued fraction on exact rationals.
  Rational target(x);
  target.canonicalize();
  Integer limit(static_cast<unsigned long>(max_denominator));
  if (target.get_den() <= limit) return target;

  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Rational rest = target;
  while (true) {
    Integer a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    Integer q2 = q0 + a * q1;
    if (q2 > limit) {
      // Semiconvergent check: largest k with q0 + k q1 <= limit.
      Integer k = (limit - q0) / q1;
      Rational semi(p0 + k * p1, q0 + k * q1);
      Rational conv(p1, q1);
      semi.canonicalize();
      conv.canonicalize();
      Rational ds = abs(semi - target), dc = abs(conv - target);
      return ds < dc ? semi : conv;
    }
    Integer p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Rational frac = rest - Rational(a);
    if (frac == 0) break;
    rest = 1 / frac;
  }
  Rational r(p1, q1);
  r.canonicalize();
  return r;
}

Integer binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

std::string to_decimal(const Rational& q, int digits) {
  Rational a = abs(q);
  Integer scaled = a.get_num() * [&] {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    return p;
  }() / a.get_den();
  std::string s = scaled.get_str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits + 1) - s.size(), '0');
  std::string out = s.substr(0, s.size() - static_cast<std::size_t>(digits));
  if (digits > 0) out += "." + s.substr(s.size() - static_cast<std::size_t>(digits));
  if (q < 0 && scaled != 0) out.insert(0, "-");
  return out;
}

}  // namespace flagforge
