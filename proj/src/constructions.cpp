#include "flagforge/constructions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "flagforge/errors.hpp"

namespace flagforge {

namespace {

struct Table {
  std::vector<std::int64_t> value{0, 0, 0};
  std::vector<Split> split{Split{}, Split{}, Split{}};
};

// Both recurrences share this shape: value(n) = max gain(split) + sum value(ni).
template <typename Gain>
class Recurrence {
 public:
  explicit Recurrence(Gain gain) : gain_(gain) {}

  std::pair<std::int64_t, Split> get(long n) {
    std::lock_guard<std::mutex> lock(mutex_);
    while (static_cast<long>(table_.value.size()) <= n) extend();
    auto i = static_cast<std::size_t>(n);
    return {table_.value[i], table_.split[i]};
  }

 private:
  void extend() {
    const long n = static_cast<long>(table_.value.size());
    std::int64_t best = -1;
    Split arg{};
    for (long a = 1; 3 * a <= n; ++a)
      for (long b = a; a + 2 * b <= n; ++b) {
        long c = n - a - b;
        std::int64_t v = gain_(a, b, c) + table_.value[static_cast<std::size_t>(a)] +
                         table_.value[static_cast<std::size_t>(b)] +
                         table_.value[static_cast<std::size_t>(c)];
        if (v > best) {
          best = v;
          arg = {static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)};
        }
      }
    table_.value.push_back(best);
    table_.split.push_back(arg);
  }

  Gain gain_;
  std::mutex mutex_;
  Table table_;
};

std::int64_t l2_gain(long a, long b, long c) { return a * b * c * (a + b + c); }

std::int64_t s2_gain(long a, long b, long c) {
  return a * b * (c * (c - 1) / 2) + a * (b * (b - 1) / 2) * c + (a * (a - 1) / 2) * b * c;
}

Recurrence<std::int64_t (*)(long, long, long)>& l2_table() {
  static Recurrence<std::int64_t (*)(long, long, long)> table(&l2_gain);
  return table;
}

Recurrence<std::int64_t (*)(long, long, long)>& s2_table() {
  static Recurrence<std::int64_t (*)(long, long, long)> table(&s2_gain);
  return table;
}

TrecValue lookup(Recurrence<std::int64_t (*)(long, long, long)>& table, long n) {
  if (n < 0) throw InputError("n must be nonnegative");
  if (n > kTrecExactLimit)
    throw InputError("exact recurrence limited to n <= " + std::to_string(kTrecExactLimit) +
                     "; use the balanced lower bound");
  if (n <= 2) return {Integer(0), std::nullopt};
  auto [v, s] = table.get(n);
  return {Integer(static_cast<long>(v)), s};
}

Split balanced_split(long n) {
  int q = static_cast<int>(n / 3), r = static_cast<int>(n % 3);
  Split s{q, q, q};
  if (r >= 1) s[2] += 1;
  if (r == 2) s[1] += 1;
  return s;
}

Integer balanced_rec(long n, std::map<long, Integer>& memo) {
  if (n <= 2) return 0;
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  Split s = balanced_split(n);
  Integer v = Integer(s[0]) * s[1] * s[2] * n;
  for (int x : s) v += balanced_rec(x, memo);
  memo.emplace(n, v);
  return v;
}

}  // namespace

TrecValue t_rec_2(long n) { return lookup(l2_table(), n); }

TrecValue t_rec_s2(long n) { return lookup(s2_table(), n); }

Integer t_rec_2_balanced(long n) {
  if (n < 0) throw InputError("n must be nonnegative");
  std::map<long, Integer> memo;
  return balanced_rec(n, memo);
}

Rational t_rec_limit_estimate(int k) {
  if (k < 1) throw InputError("k must be at least 1");
  long n = 1;
  for (int i = 0; i < k; ++i) {
    n *= 3;
    if (n > kTrecExactLimit) throw InputError("3^k exceeds the exact recurrence limit");
  }
  Rational q(t_rec_2(n).value, Integer(n) * n * n * n);
  q.canonicalize();
  return q;
}

PartTree PartTree::make_leaf(int size) {
  if (size < 0) throw InputError("part size must be nonnegative");
  PartTree t;
  t.size = size;
  return t;
}

PartTree PartTree::make_node(PartTree a, PartTree b, PartTree c) {
  PartTree t;
  t.size = a.size + b.size + c.size;
  t.children = {std::move(a), std::move(b), std::move(c)};
  validate(t);
  return t;
}

void validate(const PartTree& tree) {
  if (tree.size < 0) throw InputError("part size must be nonnegative");
  if (tree.leaf()) return;
  if (tree.children.size() != 3) throw InputError("internal node must have three parts");
  long sum = 0;
  for (const auto& c : tree.children) {
    if (c.size < 1) throw InputError("parts of an internal node must be nonempty");
    validate(c);
    sum += c.size;
  }
  if (sum != tree.size)
    throw InputError("parts of node of size " + std::to_string(tree.size) + " sum to " +
                     std::to_string(sum));
}

namespace {

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  PartTree parse() {
    PartTree t = tree();
    skip();
    if (pos_ != text_.size()) fail("trailing characters");
    validate(t);
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("tree: " + what + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  int number() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a size");
    if (pos_ - start > 6) fail("size too large");
    return std::stoi(std::string(text_.substr(start, pos_ - start)));
  }

  PartTree tree() {
    skip();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      int size = number();
      skip();
      if (pos_ >= text_.size() || text_[pos_] != ':') fail("expected ':'");
      ++pos_;
      PartTree t;
      t.size = size;
      for (int i = 0; i < 3; ++i) t.children.push_back(tree());
      skip();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return t;
    }
    return PartTree::make_leaf(number());
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_tree(std::ostream& out, const PartTree& t) {
  if (t.leaf()) {
    out << t.size;
    return;
  }
  out << '(' << t.size << ':';
  for (const auto& c : t.children) {
    out << ' ';
    print_tree(out, c);
  }
  out << ')';
}

void fill(const PartTree& t, int offset, Hypergraph& h) {
  if (t.leaf()) return;
  int a = t.children[0].size, b = t.children[1].size, c = t.children[2].size;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j)
      for (int k = 0; k < c; ++k) h.add_edge(Subset{offset + i, offset + a + j, offset + a + b + k});
  fill(t.children[0], offset, h);
  fill(t.children[1], offset + a, h);
  fill(t.children[2], offset + a + b, h);
}

}  // namespace

PartTree parse_part_tree(std::string_view text) { return TreeParser(text).parse(); }

std::string to_string(const PartTree& tree) {
  std::ostringstream out;
  print_tree(out, tree);
  return out.str();
}

PartTree optimal_trec_tree(long n) {
  auto v = t_rec_2(n);
  if (!v.split) return PartTree::make_leaf(static_cast<int>(n));
  const auto& s = *v.split;
  return PartTree::make_node(optimal_trec_tree(s[0]), optimal_trec_tree(s[1]), optimal_trec_tree(s[2]));
}

Hypergraph build_t_rec(const PartTree& tree) {
  validate(tree);
  Hypergraph h(3, tree.size);
  fill(tree, 0, h);
  return h;
}

std::vector<int> top_level_parts(const PartTree& tree) {
  std::vector<int> parts;
  if (tree.leaf()) return std::vector<int>(static_cast<std::size_t>(tree.size), 1);
  for (int i = 0; i < 3; ++i) parts.insert(parts.end(), static_cast<std::size_t>(tree.children[static_cast<std::size_t>(i)].size), i + 1);
  return parts;
}

Hypergraph build_complete_tripartite(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) throw InputError("part sizes must be nonnegative");
  Hypergraph h(3, a + b + c);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j)
      for (int k = 0; k < c; ++k) h.add_edge(Subset{i, a + j, a + b + k});
  return h;
}

Hypergraph build_bipartite_B(int n1, int n2) {
  if (n1 < 0 || n2 < 0) throw InputError("part sizes must be nonnegative");
  Hypergraph h(3, n1 + n2);
  for (int i = 0; i < n1; ++i)
    for (int j = i + 1; j < n1; ++j)
      for (int k = 0; k < n2; ++k) h.add_edge(Subset{i, j, n1 + k});
  return h;
}

Rational f32_profile(const Rational& a) {
  Rational b = 1 - a;
  Rational v = a * a * b * b / 2 + a * a * a * b;
  v.canonicalize();
  return v;
}

double f32_profile(double a) {
  double b = 1 - a;
  return a * a * b * b / 2 + a * a * a * b;
}

F32Optimum f32_profile_optimize(const Rational& grid_step) {
  if (grid_step <= 0 || grid_step >= 1) throw InputError("grid step must lie in (0,1)");
  Rational count_q = 1 / grid_step;
  Integer count = count_q.get_num() / count_q.get_den();
  if (count > 10000000) throw InputError("grid step too small");
  long points = count.get_si();
  double step = to_double(grid_step);
  double best_a = step, best_v = f32_profile(step);
  for (long i = 1; i < points + 1; ++i) {
    double a = static_cast<double>(i) * step;
    if (a >= 1) break;
    double v = f32_profile(a);
    if (v > best_v) {
      best_v = v;
      best_a = a;
    }
  }
  // f'(a) = a - 2a^3, f''(a) = 1 - 6a^2
  double a = best_a;
  for (int it = 0; it < 100; ++it) {
    double d2 = 1 - 6 * a * a;
    if (d2 == 0) break;
    double next = a - (a - 2 * a * a * a) / d2;
    if (!(next > 0 && next < 1)) break;
    bool done = std::fabs(next - a) < 1e-16;
    a = next;
    if (done) break;
  }
  F32Optimum out;
  if (f32_profile(a) >= best_v) {
    out.a = a;
    out.value = f32_profile(a);
  } else {
    out.a = best_a;
    out.value = best_v;
  }
  out.a_rational = best_approximation(out.a, 1000000000ULL);
  out.value_rational = f32_profile(out.a_rational);
  return out;
}

namespace {

template <typename T>
T from_frac(long p, long q) {
  if constexpr (std::is_same_v<T, double>)
    return static_cast<double>(p) / static_cast<double>(q);
  else
    return make_rational(p, q);
}

template <typename T>
bool leq(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, double>)
    return a <= b + 1e-12;
  else
    return a <= b;
}

template <typename T>
Fact22Result<T> check(const SimplexPoint<T>& p) {
  const auto& x = p.x;
  T sum = x[0] + x[1] + x[2];
  for (const auto& v : x)
    if (v < 0) throw InputError("simplex coordinates must be nonnegative");
  if constexpr (std::is_same_v<T, double>) {
    if (std::fabs(sum - 1) > 1e-9) throw InputError("simplex coordinates must sum to 1");
  } else {
    if (sum != 1) throw InputError("simplex coordinates must sum to 1");
  }
  T prod = x[0] * x[1] * x[2];
  T quart = 0;
  T spread = 0;
  T third = from_frac<T>(1, 3);
  for (const auto& v : x) {
    quart += v * v * v * v;
    spread += (v - third) * (v - third);
  }
  T min = std::min({x[0], x[1], x[2]});
  Fact22Result<T> r;
  T rhs = from_frac<T>(1, 26);
  if (min > 0 && 1 - quart != 0) {
    r.applicable1 = true;
    r.lhs1 = prod / (1 - quart);
    r.rhs1 = rhs;
    r.holds1 = leq<T>(r.lhs1, r.rhs1);
  }
  if (min >= from_frac<T>(1, 5)) {
    r.applicable3 = true;
    r.lhs3 = prod + quart / 26;
    r.rhs3 = rhs - spread / 15;
    r.holds3 = leq<T>(r.lhs3, r.rhs3);
  }
  if constexpr (!std::is_same_v<T, double>) {
    r.lhs1.canonicalize();
    r.lhs3.canonicalize();
    r.rhs3.canonicalize();
  }
  return r;
}

}  // namespace

Fact22Result<Rational> fact22_check(const SimplexPoint<Rational>& p) { return check(p); }
Fact22Result<double> fact22_check(const SimplexPoint<double>& p) { return check(p); }

Fact22GridSummary fact22_grid(const Rational& step, bool exact) {
  if (step <= 0 || step > 1) throw InputError("grid step must lie in (0,1]");
  Rational inv = 1 / step;
  if (inv.get_den() != 1) throw InputError("grid step must be 1/N");
  if (inv.get_num() > 5000) throw InputError("grid step too small");
  long n = inv.get_num().get_si();
  Fact22GridSummary s;
  for (long i = 0; i <= n; ++i)
    for (long j = 0; i + j <= n; ++j) {
      long k = n - i - j;
      ++s.points;
      bool ok1 = true, ok3 = true, app1 = false, app3 = false;
      if (exact) {
        auto r = fact22_check(SimplexPoint<Rational>{{make_rational(i, n), make_rational(j, n), make_rational(k, n)}});
        app1 = r.applicable1, app3 = r.applicable3, ok1 = r.holds1, ok3 = r.holds3;
      } else {
        double dn = static_cast<double>(n);
        double x = static_cast<double>(i) / dn, y = static_cast<double>(j) / dn, z = static_cast<double>(k) / dn;
        auto r = fact22_check(SimplexPoint<double>{{x, y, z}});
        app1 = r.applicable1, app3 = r.applicable3, ok1 = r.holds1, ok3 = r.holds3;
      }
      s.checked1 += app1;
      s.checked3 += app3;
      if (app1 && !ok1) ++s.violations1;
      if (app3 && !ok3) ++s.violations3;
      if (((app1 && !ok1) || (app3 && !ok3)) && s.failures.size() < 10)
        s.failures.push_back({make_rational(i, n), make_rational(j, n), make_rational(k, n)});
    }
  return s;
}

Integer s2_count_tripartite(long a, long b, long c) {
  if (a < 0 || b < 0 || c < 0) throw InputError("part sizes must be nonnegative");
  return Integer(a) * b * binomial(c, 2) + Integer(a) * binomial(b, 2) * c + binomial(a, 2) * b * c;
}

RecursiveBound recursive_bound_rhs(long n, const std::array<long, 3>& sizes,
                                   const std::array<Integer, 3>& s2_inside, const Rational& eps,
                                   const Integer& bs2, const Integer& ms2) {
  for (long s : sizes)
    if (s < 0) throw InputError("part sizes must be nonnegative");
  if (sizes[0] + sizes[1] + sizes[2] != n) throw InputError("part sizes must sum to n");
  RecursiveBound r;
  r.tripartite_upper = Rational(Integer(sizes[0]) * sizes[1] * sizes[2] * n, 2);
  r.tripartite_upper.canonicalize();
  r.s2_tripartite = s2_count_tripartite(sizes[0], sizes[1], sizes[2]);
  Rational penalty = std::max(Rational(bs2, 9), Rational(ms2, 10));
  penalty.canonicalize();
  Integer inside = s2_inside[0] + s2_inside[1] + s2_inside[2];
  Integer n4 = Integer(n) * n * n * n;
  r.rhs = r.tripartite_upper + Rational(inside) + eps * Rational(n4) - penalty;
  r.rhs.canonicalize();
  return r;
}

Rational StabilityBudget::removal_budget(long n, long m) const {
  Rational m3(Integer(m) * m * m), n2m(Integer(n) * n * m);
  Rational v = removal_ratio * m3 + eps * n2m / 6;
  v.canonicalize();
  return v;
}

bool StabilityBudget::base_case_holds(long n, long m) const {
  if (!(Rational(m) < eps * Rational(n))) return true;
  Rational lhs(binomial(m, 3));
  Rational rhs = eps * Rational(Integer(n) * n * m) / 6;
  return lhs <= rhs;
}

StabilityBudget stability_budget(const Rational& eps) {
  if (eps <= 0 || eps >= 1) throw InputError("eps must lie in (0,1)");
  StabilityBudget b;
  b.eps = eps;
  Rational e12 = 1;
  for (int i = 0; i < 12; ++i) e12 *= eps;
  b.delta = e12 * eps / 1200;
  b.delta.canonicalize();
  b.part_slack = 6 * std::sqrt(to_double(eps));
  b.edge_slack = 25 * eps;
  b.inner_slack = 2400 * eps;
  b.removal_ratio = 600 * b.delta / e12;
  b.removal_ratio.canonicalize();
  b.chain_holds = b.removal_ratio <= eps / 2;
  Rational unit = b.delta / e12;
  Rational lhs = 25 * unit + Rational(3, 8) * 600 * unit;
  b.induction_holds = lhs == 250 * unit && lhs <= 600 * unit;
  b.edge_slack.canonicalize();
  b.inner_slack.canonicalize();
  return b;
}

}  // namespace flagforge
