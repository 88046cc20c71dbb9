#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "flagforge/families.hpp"
#include "flagforge/hypergraph.hpp"
#include "flagforge/rational.hpp"

namespace flagforge {

// The Prop 3.2 constant.
Rational alpha_32();

// parts[v] in {1, 2, 3}.
struct Partition3 {
  std::vector<int> parts;

  std::array<long, 3> sizes() const;
  bool has_empty_part() const;
};

void validate(const Partition3& p, int n);

// Part profile of an edge: {1,1,1} transversal, {0,1,2} bad, {0,0,3} inside.
enum class EdgeKind { transversal, bad, inside };
EdgeKind classify(const Subset& e, const Partition3& p);

struct PartitionMetrics {
  long n = 0;
  long transversal = 0;
  Rational mu;  // 6 transversal / n^3
  std::vector<Subset> bad_edges;
  std::vector<Subset> missing_triples;
  std::array<long, 3> inside{};  // |H[Vi]|
  Integer bad_s2;
  Integer missing_s2;
  Integer s2_transversal;  // N(S2, H intersect K)
  Integer s2_complete;     // N(S2, K[V1,V2,V3])
};

PartitionMetrics metrics(const Hypergraph& h, const Partition3& p);

long transversal_count(const Hypergraph& h, const Partition3& p);

// Change in the transversal count when v moves to part `to`.
long move_gain(const Hypergraph& h, const Partition3& p, Vertex v, int to);

bool is_locally_maximal(const Hypergraph& h, const Partition3& p);

// Strictly improving single-vertex moves, swept by vertex then part, until a
// sweep finds none. For n >= 3 an empty part is first filled by a move that
// cannot lose transversal edges, so the result has three nonempty parts.
Partition3 local_max_search(const Hypergraph& h, Partition3 start);

struct MaxCutResult {
  Partition3 partition;
  PartitionMetrics metrics;
  bool exhaustive = false;
};

inline constexpr int kMaxCutExhaustiveLimit = 12;

// Exhaustive for n <= 12 (lexicographically first optimal assignment);
// otherwise `restarts` seeded random starts followed by local search, ties
// broken by the lexicographically smallest assignment. The result does not
// depend on `threads`.
MaxCutResult max_cut(const Hypergraph& h, int restarts, std::uint64_t seed, int threads = 1);

struct Prop33Report {
  Rational value;  // |B| - 3/4 |M|
  bool satisfied = false;
  bool locally_maximal = false;
  Rational mu;
  bool mu_hypothesis = false;          // mu >= 0.198
  std::optional<bool> family_free;     // when a family is supplied
  bool hypotheses_hold = false;
  bool red_alert = false;              // hypotheses hold but value > 0
};

Prop33Report check_prop33(const Hypergraph& h, const Partition3& p, const Family* family = nullptr);

struct PartSizeWindow {
  double xmin = 0;
  double xmax = 0;
  // Exact check that g(1/5) < alpha/6 and g(1/2) < alpha/6, where
  // g(x) = x (1-x)^2 / 4; this places the window strictly inside (1/5, 1/2).
  bool inside_fifth_half = false;
};

// Feasible range of one coordinate on the simplex under x1 x2 x3 >= alpha/6.
PartSizeWindow part_size_window(const Rational& alpha);

}  // namespace flagforge
