#include "doctest.h"

#include <random>

#include "flagforge/canonical.hpp"
#include "flagforge/embedding.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/families.hpp"
#include "flagforge/hypergraph_ops.hpp"

using namespace flagforge;

TEST_CASE("tight cycles") {
  auto c4 = make_tight_cycle(4);
  CHECK(c4 == make_k4());
  CHECK(make_tight_cycle(5).size() == 5);
  auto c6 = make_tight_cycle(6);
  CHECK(c6.size() == 6);
  // oracle: every edge meets each of {0,3}, {1,4}, {2,5} once
  for (const auto& e : c6.edges()) {
    int seen[3] = {0, 0, 0};
    for (Vertex v : e) ++seen[v % 3];
    CHECK((seen[0] == 1 && seen[1] == 1 && seen[2] == 1));
  }
  for (int l = 5; l <= 12; ++l) {
    auto c = make_tight_cycle(l);
    CHECK(c.size() == static_cast<std::size_t>(l));
    for (Vertex v = 0; v < l; ++v) CHECK(link(c, v).size() == 3);
  }
  CHECK_THROWS_AS(make_tight_cycle(3), InputError);
  CHECK_THROWS_AS(make_tight_cycle_minus(3), InputError);
}

TEST_CASE("tight cycles minus an edge") {
  CHECK(isomorphic(make_tight_cycle_minus(4), make_k4_minus()));
  CHECK(make_tight_cycle_minus(5).size() == 4);
  CHECK(make_tight_cycle_minus(5).order() == 5);
  CHECK(make_tight_cycle_minus(7).size() == 6);
  CHECK_FALSE(make_tight_cycle_minus(7).has_edge(Subset{6, 0, 1}));
}

TEST_CASE("named graphs") {
  CHECK(make_k4_minus().size() == 3);
  CHECK(make_k4_minus().order() == 4);
  CHECK(make_f32().size() == 4);
  CHECK(make_f32().order() == 5);
  CHECK(make_s2().size() == 2);
  CHECK(make_s2().order() == 4);
}

TEST_CASE("family parsing and deduplication") {
  auto fam = parse_family("k4m,c5m");
  CHECK(fam.members().size() == 2);
  auto dup = parse_family("k4m, C4M");
  CHECK(dup.members().size() == 1);
  CHECK(parse_family("none").empty());
  CHECK_THROWS_AS(parse_family("k4m,,c5m"), InputError);
  CHECK_THROWS_AS(parse_family("q7"), InputError);
  CHECK_THROWS_AS(parse_family("k3,k4m"), InputError);
}

TEST_CASE("family freeness") {
  auto fam = parse_family("k4m,c5m");
  CHECK(is_family_free(blowup(Hypergraph(3, 3, std::vector<Subset>{{0, 1, 2}}), 2), fam));
  CHECK_FALSE(is_family_free(make_k4(), parse_family("k4m")));
  CHECK(is_family_free(Hypergraph(3, 10), fam));
}

TEST_CASE("freeness is monotone under edge deletion") {
  std::mt19937_64 rng(17);
  auto fam = parse_family("k4m,c5m");
  for (int trial = 0; trial < 60; ++trial) {
    Hypergraph h(3, 6);
    for (const auto& s : all_subsets(6, 3))
      if (rng() % 3 == 0) h.add_edge(s);
    bool free = is_family_free(h, fam);
    while (h.size() > 0) {
      h.remove_edge(h.edges()[rng() % h.size()]);
      bool now = is_family_free(h, fam);
      if (free) CHECK(now);
      free = now;
    }
  }
}

TEST_CASE("reduction homomorphism chain") {
  for (int l : {5, 7, 8, 10, 11}) CHECK(reduction_hom_chain(l));
  CHECK_THROWS_AS(reduction_hom_chain(6), InputError);
  CHECK_THROWS_AS(reduction_hom_chain(9), InputError);
}

TEST_CASE("embedding restricted to a vertex or edge") {
  auto k4m = make_k4_minus();
  Hypergraph h = make_k4_minus().with_extra_vertices(2);
  h.add_edge(Subset{3, 4, 5});
  CHECK(contains_subgraph_through_vertex(h, k4m, 0));
  CHECK_FALSE(contains_subgraph_through_vertex(h, k4m, 5));
  CHECK(contains_subgraph_through_edge(h, k4m, Subset{0, 1, 2}));
  CHECK_FALSE(contains_subgraph_through_edge(h, k4m, Subset{3, 4, 5}));
  CHECK(count_embeddings(make_s2(), make_s2()) == 4);
}
