#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flagforge/hypergraph.hpp"
#include "flagforge/rational.hpp"

namespace flagforge {

using Split = std::array<int, 3>;

struct TrecValue {
  Integer value;
  std::optional<Split> split;  // none for n <= 2
};

// Largest l2-norm of a T_rec construction on n vertices:
// max over n1+n2+n3 = n of n1*n2*n3*n + sum t(ni). Exact dynamic program over
// every split for n <= kTrecExactLimit; the reported split is the
// lexicographically smallest n1 <= n2 <= n3 among optimal ones.
inline constexpr int kTrecExactLimit = 400;
TrecValue t_rec_2(long n);

// Same recurrence restricted to the most balanced split. A lower bound on
// t_rec_2 that is cheap for any n.
Integer t_rec_2_balanced(long n);

// Maximum number of S2 copies over T_rec constructions on n vertices.
TrecValue t_rec_s2(long n);

// t_rec_2(3^k) / 3^(4k).
Rational t_rec_limit_estimate(int k);

struct PartTree {
  int size = 0;
  std::vector<PartTree> children;  // empty for a leaf, otherwise three parts

  bool leaf() const { return children.empty(); }
  static PartTree make_leaf(int size);
  static PartTree make_node(PartTree a, PartTree b, PartTree c);
};

// Grammar: tree := size | "(" size ":" tree tree tree ")".
PartTree parse_part_tree(std::string_view text);
std::string to_string(const PartTree& tree);
void validate(const PartTree& tree);

// The tree that realizes t_rec_2(n) with the reported splits.
PartTree optimal_trec_tree(long n);

// Vertices are numbered left to right along the tree; each internal node
// receives all transversal triples of its three parts. Leaves are edgeless.
Hypergraph build_t_rec(const PartTree& tree);

// For every vertex, the index (1..3) of its top level part, or all 1 for a leaf.
std::vector<int> top_level_parts(const PartTree& tree);

Hypergraph build_complete_tripartite(int a, int b, int c);

// All triples with two vertices in V1 = {0..n1-1} and one in V2.
Hypergraph build_bipartite_B(int n1, int n2);

// f(a) = a^2 (1-a)^2 / 2 + a^3 (1-a), the normalized limit l2-norm of B when
// |V1| = a n.
Rational f32_profile(const Rational& a);
double f32_profile(double a);

struct F32Optimum {
  double a = 0;
  double value = 0;
  Rational a_rational;      // rational point near a
  Rational value_rational;  // f evaluated exactly there
};

// Grid search over (0,1) with the given step, then Newton refinement.
F32Optimum f32_profile_optimize(const Rational& grid_step);

template <typename T>
struct SimplexPoint {
  std::array<T, 3> x;
};

template <typename T>
struct Fact22Result {
  bool applicable1 = false;  // min > 0 and no coordinate equal to 1
  T lhs1{};
  T rhs1{};
  bool holds1 = false;
  bool applicable3 = false;  // min >= 1/5
  T lhs3{};
  T rhs3{};
  bool holds3 = false;
};

// (i)   x1 x2 x3 / (1 - sum xi^4) <= 1/26
// (iii) x1 x2 x3 + sum xi^4 / 26 <= 1/26 - sum (xi - 1/3)^2 / 15
// The floating version allows an absolute slack of 1e-12.
Fact22Result<Rational> fact22_check(const SimplexPoint<Rational>& p);
Fact22Result<double> fact22_check(const SimplexPoint<double>& p);

struct Fact22GridSummary {
  long points = 0;
  long checked1 = 0;
  long checked3 = 0;
  long violations1 = 0;
  long violations3 = 0;
  std::vector<std::array<Rational, 3>> failures;  // first few only
};

// All points (i, j, k) * step with i + j + k = 1/step.
Fact22GridSummary fact22_grid(const Rational& step, bool exact);

// N(S2, K[a,b,c]) = ab C(c,2) + a C(b,2) c + C(a,2) b c.
Integer s2_count_tripartite(long a, long b, long c);

struct RecursiveBound {
  Rational rhs;
  Integer s2_tripartite;
  Rational tripartite_upper;  // |V1||V2||V3| n / 2
};

RecursiveBound recursive_bound_rhs(long n, const std::array<long, 3>& sizes,
                                   const std::array<Integer, 3>& s2_inside, const Rational& eps,
                                   const Integer& bs2, const Integer& ms2);

struct StabilityBudget {
  Rational eps;
  Rational delta;         // eps^13 / 1200
  double part_slack = 0;  // 6 sqrt(eps)
  Rational edge_slack;    // 25 eps
  Rational inner_slack;   // 2400 eps
  Rational removal_ratio; // 600 delta / eps^12
  bool chain_holds = false;      // removal_ratio <= eps / 2
  bool induction_holds = false;  // 25 + (3/8) 600 = 250 <= 600

  // 600 delta m^3 / eps^12 + eps n^2 m / 6
  Rational removal_budget(long n, long m) const;
  // m < eps n implies C(m,3) <= eps n^2 m / 6
  bool base_case_holds(long n, long m) const;
};

StabilityBudget stability_budget(const Rational& eps);

}  // namespace flagforge
