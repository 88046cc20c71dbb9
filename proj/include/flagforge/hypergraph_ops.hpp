#pragma once

#include <vector>

#include "flagforge/hypergraph.hpp"
#include "flagforge/rational.hpp"

namespace flagforge {

// (r-1)-sets covered by at least one edge, colex ordered.
std::vector<Subset> shadow(const Hypergraph& h);

// Number of vertices v with t + v an edge. Throws InputError if t is not an
// (r-1)-set of vertices of h.
long codegree(const Hypergraph& h, const Subset& t);

// (r-1)-sets completing v to an edge; its size is the degree of v.
std::vector<Subset> link(const Hypergraph& h, Vertex v);

// Sum over the shadow of codegree^p. lp_norm(h, 1) == r * |h|.
Integer lp_norm(const Hypergraph& h, int p);

// Copies of S2 (two edges sharing exactly two vertices), counted as the sum
// of C(d, 2) over shadow pairs. Only defined for 3-graphs.
Integer count_s2(const Hypergraph& h);

// Fraction of v(f)-subsets of V(h) that induce a copy of f.
Rational induced_density(const Hypergraph& f, const Hypergraph& h);

// Each vertex x becomes the block {x*k, ..., x*k + k - 1}; every edge becomes
// the complete r-partite graph on its blocks.
Hypergraph blowup(const Hypergraph& h, int k);

bool homomorphism_exists(const Hypergraph& f, const Hypergraph& g);

// Visits all k-subsets of {0..n-1} in lexicographic order as sorted vectors.
template <typename Visit>
void for_each_combination(int n, int k, Visit&& visit) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    visit(static_cast<const std::vector<int>&>(idx));
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace flagforge
