#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "flagforge/canonical.hpp"
#include "flagforge/embedding.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/families.hpp"
#include "flagforge/hypergraph.hpp"
#include "flagforge/hypergraph_ops.hpp"

using namespace flagforge;

namespace {

Hypergraph single_edge() { return Hypergraph(3, 3, std::vector<Subset>{{0, 1, 2}}); }

Hypergraph random_graph(std::mt19937_64& rng, int r, int n, double p) {
  Hypergraph h(r, n);
  std::bernoulli_distribution coin(p);
  for (const auto& s : all_subsets(n, r))
    if (coin(rng)) h.add_edge(s);
  return h;
}

std::vector<int> random_perm(std::mt19937_64& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Oracle: pairs of edges sharing exactly two vertices.
long brute_s2(const Hypergraph& h) {
  long count = 0;
  const auto& e = h.edges();
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      int common = 0;
      for (Vertex v : e[i]) common += e[j].contains(v);
      if (common == 2) ++count;
    }
  return count;
}

// Oracle: automorphisms by trying every permutation.
std::uint64_t brute_automorphisms(const Hypergraph& h) {
  std::vector<int> p(static_cast<std::size_t>(h.order()));
  std::iota(p.begin(), p.end(), 0);
  std::uint64_t count = 0;
  do {
    if (h.relabeled(p) == h) ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

// Oracle: all maps V(f) -> V(g), n^k of them.
bool brute_homomorphism(const Hypergraph& f, const Hypergraph& g) {
  int k = f.order(), n = g.order();
  std::vector<int> map(static_cast<std::size_t>(k), 0);
  while (true) {
    bool ok = true;
    for (const auto& e : f.edges()) {
      std::vector<int> img;
      for (Vertex v : e) img.push_back(map[static_cast<std::size_t>(v)]);
      std::sort(img.begin(), img.end());
      if (std::adjacent_find(img.begin(), img.end()) != img.end() || !g.has_edge(Subset::of(img))) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
    int i = 0;
    while (i < k && ++map[static_cast<std::size_t>(i)] == n) map[static_cast<std::size_t>(i++)] = 0;
    if (i == k) return false;
  }
}

}  // namespace

TEST_CASE("subset ranks follow colex order") {
  auto subs = all_subsets(6, 3);
  REQUIRE(subs.size() == 20);
  for (std::uint32_t i = 0; i < subs.size(); ++i) {
    CHECK(subs[i].rank() == i);
    if (i) CHECK(subs[i - 1] < subs[i]);
  }
  CHECK(Subset{2, 0, 1} == Subset{0, 1, 2});
  CHECK_THROWS_AS(Subset({1, 1, 2}), InputError);
}

TEST_CASE("hypergraph invariants and text format") {
  Hypergraph h(3, 5);
  CHECK(h.add_edge(Subset{3, 1, 0}));
  CHECK_FALSE(h.add_edge(Subset{0, 1, 3}));
  CHECK_THROWS_AS(h.add_edge(Subset{0, 1, 5}), InputError);
  CHECK_THROWS_AS(h.add_edge(Subset{0, 1}), InputError);
  h.add_edge(Subset{0, 1, 2});
  CHECK(h.edges().front() == Subset{0, 1, 2});

  std::string text = "# comment\n3 4 2\n0 1 2\n 3 1 0  # trailing\n\ncolors: 1 2 3 1\nparts: 1 1 2 3\n";
  std::istringstream in(text);
  auto doc = read_hypergraph(in);
  CHECK(doc.graph.size() == 2);
  CHECK(doc.colors == std::vector<int>{1, 2, 3, 1});
  CHECK(doc.parts == std::vector<int>{1, 1, 2, 3});
  std::ostringstream out;
  write_document(out, doc);
  std::istringstream back(out.str());
  auto again = read_hypergraph(back);
  CHECK(again.graph == doc.graph);
  CHECK(again.colors == doc.colors);

  CHECK_THROWS_AS(parse_hypergraph("3 4 2\n0 1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("3 4 1\n0 1 7\n"), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("3 4 2\n0 1 2\n2 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("4 4 0\n"), ParseError);
}

TEST_CASE("shadow") {
  CHECK(shadow(single_edge()) == std::vector<Subset>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(shadow(make_k4()).size() == 6);
  CHECK(shadow(make_s2()) == std::vector<Subset>{{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}});
}

TEST_CASE("codegree and link") {
  CHECK(codegree(make_k4(), Subset{0, 1}) == 2);
  CHECK(codegree(single_edge(), Subset{0, 1}) == 1);
  Hypergraph e4(3, 4, std::vector<Subset>{{0, 1, 2}});
  CHECK(codegree(e4, Subset{0, 3}) == 0);
  CHECK_THROWS_AS(codegree(e4, Subset{0, 1, 2}), InputError);
  CHECK_THROWS_AS(codegree(e4, Subset{0, 9}), InputError);

  CHECK(link(single_edge(), 0) == std::vector<Subset>{{1, 2}});
  CHECK(link(make_k4(), 0) == std::vector<Subset>{{1, 2}, {1, 3}, {2, 3}});
  CHECK(link(Hypergraph(3, 6), 4).empty());
}

TEST_CASE("lp norms and S2 counts") {
  CHECK(lp_norm(single_edge(), 2) == 3);
  CHECK(lp_norm(make_k4(), 2) == 24);
  CHECK(lp_norm(make_s2(), 2) == 8);
  CHECK(count_s2(single_edge()) == 0);
  CHECK(count_s2(make_k4()) == 6);
  CHECK(count_s2(make_s2()) == 1);
  CHECK_THROWS_AS(count_s2(make_triangle()), InputError);
}

TEST_CASE("S2 identity and l1 norm on random 3-graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 3 + static_cast<int>(rng() % 8);
    auto h = random_graph(rng, 3, n, 0.1 + 0.8 * (trial % 10) / 10.0);
    Integer s2 = count_s2(h);
    CHECK(s2 == brute_s2(h));
    CHECK(2 * s2 == lp_norm(h, 2) - 3 * static_cast<long>(h.size()));
    CHECK(lp_norm(h, 1) == 3 * static_cast<long>(h.size()));
  }
}

TEST_CASE("induced density") {
  auto k4 = make_k4();
  CHECK(induced_density(single_edge(), k4) == 1);
  CHECK(induced_density(make_s2(), k4) == 0);
  // K[{0},{1},{2,3}] is an S2
  Hypergraph k112(3, 4, std::vector<Subset>{{0, 1, 2}, {0, 1, 3}});
  CHECK(induced_density(make_s2(), k112) == 1);
  CHECK_THROWS_AS(induced_density(make_k4(), single_edge()), InputError);
}

TEST_CASE("induced densities over all classes sum to one and are isomorphism invariant") {
  // oracle for the class list: dedupe every labeled 3-graph on 4 vertices
  std::vector<Hypergraph> classes;
  std::set<std::string> seen;
  auto triples = all_subsets(4, 3);
  for (int mask = 0; mask < 16; ++mask) {
    Hypergraph g(3, 4);
    for (int i = 0; i < 4; ++i)
      if (mask >> i & 1) g.add_edge(triples[static_cast<std::size_t>(i)]);
    if (seen.insert(canonical_key(g)).second) classes.push_back(g);
  }
  CHECK(classes.size() == 5);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto h = random_graph(rng, 3, 4 + trial % 4, 0.5);
    Rational sum = 0;
    for (const auto& f : classes) sum += induced_density(f, h);
    CHECK(sum == 1);
    auto perm = random_perm(rng, h.order());
    auto h2 = h.relabeled(perm);
    auto f = classes[static_cast<std::size_t>(trial) % classes.size()];
    auto f2 = f.relabeled(random_perm(rng, 4));
    CHECK(induced_density(f, h) == induced_density(f2, h2));
  }
}

TEST_CASE("blowup") {
  auto b = blowup(single_edge(), 2);
  CHECK(b.order() == 6);
  CHECK(b.size() == 8);
  CHECK(blowup(make_s2(), 1) == make_s2());
  auto s = blowup(make_s2(), 2);
  CHECK(s.order() == 8);
  CHECK(s.size() == 16);
  CHECK_THROWS_AS(blowup(make_s2(), 0), InputError);
}

TEST_CASE("homomorphisms") {
  CHECK(homomorphism_exists(make_tight_cycle_minus(5), make_k4_minus()));
  CHECK(homomorphism_exists(make_tight_cycle_minus(7), make_tight_cycle_minus(5)));
  CHECK_FALSE(homomorphism_exists(make_k4(), make_tight_cycle_minus(5)));
  CHECK_FALSE(brute_homomorphism(make_k4(), make_tight_cycle_minus(5)));
}

TEST_CASE("homomorphism search agrees with subgraph search in a blowup and with brute force") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 120; ++trial) {
    int nf = 3 + static_cast<int>(rng() % 3), ng = 3 + static_cast<int>(rng() % 3);
    auto f = random_graph(rng, 3, nf, 0.45);
    auto g = random_graph(rng, 3, ng, 0.45);
    bool hom = homomorphism_exists(f, g);
    CHECK(hom == brute_homomorphism(f, g));
    CHECK(hom == contains_subgraph(blowup(g, nf), f));
  }
}

TEST_CASE("canonical form automorphism counts") {
  CHECK(canonical_form(single_edge()).automorphism_count == 6);
  CHECK(canonical_form(make_k4_minus()).automorphism_count == 6);
  CHECK(canonical_form(make_s2()).automorphism_count == 4);
  CHECK(canonical_form(Hypergraph(3, 7)).automorphism_count == 5040);
  CHECK(canonical_form(blowup(single_edge(), 2)).automorphism_count == 48);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 3 + static_cast<int>(rng() % 4);
    int r = trial % 2 ? 2 : 3;
    auto h = random_graph(rng, r, n, trial % 3 == 0 ? 0.2 : 0.5);
    CHECK(canonical_form(h).automorphism_count == brute_automorphisms(h));
  }
}

TEST_CASE("canonical form is labeling independent") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + static_cast<int>(rng() % 8);
    auto h = random_graph(rng, 3, n, 0.15 + 0.7 * (trial % 7) / 7.0);
    auto form = canonical_form(h);
    CHECK(h.relabeled(form.relabeling) == form.canonical_edges);
    auto perm = random_perm(rng, n);
    auto other = canonical_form(h.relabeled(perm));
    CHECK(other.canonical_edges == form.canonical_edges);
    CHECK(other.automorphism_count == form.automorphism_count);
  }
  // non-isomorphic inputs get different forms
  CHECK_FALSE(isomorphic(make_s2(), make_k4_minus().with_extra_vertices(0)));
  CHECK(isomorphic(make_tight_cycle_minus(4), make_k4_minus()));
}

TEST_CASE("vertex classes constrain the canonical labeling") {
  auto s2 = make_s2();
  std::vector<int> classes{0, 1, 1, 1};
  auto form = canonical_form(s2, classes);
  CHECK(form.relabeling[0] == 0);
  CHECK(form.automorphism_count == 2);
  // s2 with a pinned degree-1 vertex differs from pinned degree-2 vertex
  std::vector<int> other{1, 1, 0, 1};
  CHECK(canonical_key(s2, classes) != canonical_key(s2, other));
}
