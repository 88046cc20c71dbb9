#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flagforge/hypergraph.hpp"

namespace flagforge {

struct CanonicalForm {
  // relabeling[v] is the canonical label of source vertex v.
  std::vector<int> relabeling;
  Hypergraph canonical_edges;
  std::uint64_t automorphism_count = 1;
};

// Canonical labeling by color refinement on the vertex/edge incidence
// structure plus individualization backtracking. Among all leaves the one
// with the smallest sorted edge-rank sequence wins, so the result does not
// depend on the input labeling.
CanonicalForm canonical_form(const Hypergraph& h);

// Same, but only automorphisms/isomorphisms preserving `vertex_classes` are
// allowed. Canonical labels are non-decreasing in the class value, so e.g.
// giving root i the class i keeps the roots in front and in order.
CanonicalForm canonical_form(const Hypergraph& h, std::span<const int> vertex_classes);

// Compact byte string identifying the isomorphism class of (h, classes).
// Two inputs share a key iff they are isomorphic via a class-preserving map.
using CanonicalKey = std::string;
CanonicalKey canonical_key(const Hypergraph& h, std::span<const int> vertex_classes);
CanonicalKey canonical_key(const Hypergraph& h);
// Key of an already computed form; `vertex_classes` are the classes it was
// computed with.
CanonicalKey canonical_key(const CanonicalForm& form, std::span<const int> vertex_classes);

bool isomorphic(const Hypergraph& a, const Hypergraph& b);

}  // namespace flagforge
