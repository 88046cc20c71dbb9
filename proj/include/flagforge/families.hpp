#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flagforge/hypergraph.hpp"

namespace flagforge {

// Tight cycle on l >= 4 vertices: edges {i, i+1, i+2} mod l.
Hypergraph make_tight_cycle(int l);
// Tight cycle with the edge {l-1, 0, 1} removed.
Hypergraph make_tight_cycle_minus(int l);

Hypergraph make_k4_minus();  // {012, 013, 023}
Hypergraph make_k4();        // all four triples on four vertices
Hypergraph make_f32();       // {012, 013, 014, 234}
Hypergraph make_s2();        // {012, 013}
Hypergraph make_triangle();  // the 2-graph K3

// Named list of forbidden graphs, deduplicated up to isomorphism. All
// members share one uniformity. Only Family::none() may be empty.
class Family {
 public:
  Family(std::string name, std::vector<Hypergraph> members);
  static Family none(int r = 3);

  const std::string& name() const { return name_; }
  const std::vector<Hypergraph>& members() const { return members_; }
  int uniformity() const { return r_; }
  bool empty() const { return members_.empty(); }

 private:
  Family() = default;
  std::string name_;
  std::vector<Hypergraph> members_;
  int r_ = 3;
};

// Comma separated keywords: k4m, k4, f32, s2, k3 (2-graph triangle), cLm and
// cL for tight cycles (e.g. c5m, c7m, c6), and "none".
Family parse_family(std::string_view keywords);

// True iff no member is a (not necessarily induced) subgraph of h.
bool is_family_free(const Hypergraph& h, const Family& family);

// Certifies C_l^{3-} -> C_5^{3-} -> K_4^{3-} homomorphisms; l % 3 != 0, l >= 5.
bool reduction_hom_chain(int l);

}  // namespace flagforge
