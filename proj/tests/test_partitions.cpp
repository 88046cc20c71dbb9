#include "doctest.h"

#include <cmath>
#include <random>

#include "flagforge/constructions.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/hypergraph_ops.hpp"
#include "flagforge/partitions.hpp"

using namespace flagforge;

namespace {

Hypergraph random_graph(std::mt19937_64& rng, int n, double p) {
  Hypergraph h(3, n);
  std::bernoulli_distribution coin(p);
  for (const auto& s : all_subsets(n, 3))
    if (coin(rng)) h.add_edge(s);
  return h;
}

Partition3 random_partition(std::mt19937_64& rng, int n) {
  Partition3 p{std::vector<int>(static_cast<std::size_t>(n))};
  for (auto& x : p.parts) x = 1 + static_cast<int>(rng() % 3);
  return p;
}

bool is_transversal(const Subset& e, const Partition3& p) {
  int a = p.parts[static_cast<std::size_t>(e[0])], b = p.parts[static_cast<std::size_t>(e[1])],
      c = p.parts[static_cast<std::size_t>(e[2])];
  return a != b && a != c && b != c;
}

bool is_bad(const Subset& e, const Partition3& p) {
  int a = p.parts[static_cast<std::size_t>(e[0])], b = p.parts[static_cast<std::size_t>(e[1])],
      c = p.parts[static_cast<std::size_t>(e[2])];
  return !(a == b && b == c) && !is_transversal(e, p);
}

int common(const Subset& a, const Subset& b) {
  int c = 0;
  for (Vertex v : a) c += b.contains(v);
  return c;
}

long brute_cut(const Hypergraph& h) {
  int n = h.order();
  long best = 0;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  Partition3 p{std::vector<int>(static_cast<std::size_t>(n))};
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (auto& x : p.parts) {
      x = 1 + static_cast<int>(c % 3);
      c /= 3;
    }
    long t = 0;
    for (const auto& e : h.edges()) t += is_transversal(e, p);
    best = std::max(best, t);
  }
  return best;
}

}  // namespace

TEST_CASE("metrics examples") {
  auto k = build_complete_tripartite(2, 2, 2);
  Partition3 nat{{1, 1, 2, 2, 3, 3}};
  auto m = metrics(k, nat);
  CHECK(m.transversal == 8);
  CHECK(m.bad_edges.empty());
  CHECK(m.missing_triples.empty());
  CHECK(m.bad_s2 == 0);
  CHECK(m.missing_s2 == 0);
  CHECK(m.mu == Rational(2, 9));

  auto e = metrics(Hypergraph(3, 3), Partition3{{1, 2, 3}});
  CHECK(e.missing_triples.size() == 1);
  CHECK(e.mu == 0);

  Hypergraph h(3, 4, std::vector<Subset>{{1, 2, 3}});
  auto m4 = metrics(h, Partition3{{1, 1, 2, 3}});
  CHECK(m4.missing_triples == std::vector<Subset>{{0, 2, 3}});
  CHECK(m4.missing_s2 == 1);
  CHECK(m4.bad_s2 == 0);

  CHECK_THROWS_AS(metrics(h, Partition3{{1, 1, 2}}), InputError);
  CHECK_THROWS_AS(metrics(h, Partition3{{1, 1, 2, 4}}), InputError);
  CHECK_THROWS_AS(metrics(make_triangle(), Partition3{{1, 2, 3}}), InputError);
}

TEST_CASE("metrics ledger identities on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    int n = 3 + static_cast<int>(rng() % 8);
    auto h = random_graph(rng, n, 0.2 + 0.6 * (trial % 5) / 5.0);
    auto p = random_partition(rng, n);
    auto m = metrics(h, p);
    long inside = m.inside[0] + m.inside[1] + m.inside[2];
    CHECK(static_cast<long>(h.size()) == m.transversal + static_cast<long>(m.bad_edges.size()) + inside);
    CHECK(m.missing_s2 + m.s2_transversal == m.s2_complete);

    // oracles by direct pair enumeration
    std::vector<Subset> kedges;
    for (const auto& t : all_subsets(n, 3))
      if (is_transversal(t, p)) kedges.push_back(t);
    long bad_s2 = 0;
    const auto& he = h.edges();
    for (std::size_t i = 0; i < he.size(); ++i)
      for (std::size_t j = i + 1; j < he.size(); ++j)
        if (common(he[i], he[j]) == 2 && (is_bad(he[i], p) || is_bad(he[j], p))) ++bad_s2;
    CHECK(m.bad_s2 == bad_s2);
    long missing_s2 = 0;
    std::vector<long> per_missing(kedges.size(), 0);
    for (std::size_t i = 0; i < kedges.size(); ++i)
      for (std::size_t j = i + 1; j < kedges.size(); ++j) {
        if (common(kedges[i], kedges[j]) != 2) continue;
        bool mi = !h.has_edge(kedges[i]), mj = !h.has_edge(kedges[j]);
        if (mi || mj) ++missing_s2;
        if (mi) ++per_missing[i];
        if (mj) ++per_missing[j];
      }
    CHECK(m.missing_s2 == missing_s2);
    long missing = 0;
    for (std::size_t i = 0; i < kedges.size(); ++i)
      if (!h.has_edge(kedges[i])) {
        ++missing;
        CHECK(per_missing[i] == n - 3);
      }
    CHECK(static_cast<long>(m.missing_triples.size()) == missing);
  }
}

TEST_CASE("local search reaches a local maximum") {
  Hypergraph edge(3, 3, std::vector<Subset>{{0, 1, 2}});
  auto p = local_max_search(edge, Partition3{{1, 1, 1}});
  CHECK(transversal_count(edge, p) == 1);
  auto k = build_complete_tripartite(2, 2, 2);
  Partition3 nat{{1, 1, 2, 2, 3, 3}};
  CHECK(local_max_search(k, nat).parts == nat.parts);
  std::mt19937_64 rng(0);
  long best = 0;
  for (int i = 0; i < 20; ++i) {
    auto q = local_max_search(k, random_partition(rng, 6));
    CHECK_FALSE(q.has_empty_part());
    best = std::max(best, transversal_count(k, q));
  }
  CHECK(best == 8);

  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + static_cast<int>(rng() % 10);
    auto h = random_graph(rng, n, 0.5);
    auto start = random_partition(rng, n);
    auto out = local_max_search(h, start);
    CHECK(transversal_count(h, out) >= transversal_count(h, start));
    long base = transversal_count(h, out);
    for (Vertex v = 0; v < n; ++v)
      for (int to = 1; to <= 3; ++to) {
        auto q = out;
        q.parts[static_cast<std::size_t>(v)] = to;
        CHECK(transversal_count(h, q) <= base);
        CHECK(move_gain(h, out, v, to) == transversal_count(h, q) - base);
      }
    CHECK(is_locally_maximal(h, out));
    CHECK_FALSE(out.has_empty_part());
  }
}

TEST_CASE("max cut") {
  Hypergraph edge(3, 3, std::vector<Subset>{{0, 1, 2}});
  CHECK(max_cut(edge, 1, 0).metrics.mu == Rational(2, 9));
  auto k = max_cut(build_complete_tripartite(2, 2, 2), 1, 0);
  CHECK(k.metrics.transversal == 8);
  CHECK(k.metrics.mu == Rational(2, 9));
  CHECK(max_cut(Hypergraph(3, 7), 1, 0).metrics.mu == 0);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 3 + static_cast<int>(rng() % 8);
    auto h = random_graph(rng, n, 0.5);
    auto r = max_cut(h, 1, 0);
    CHECK(r.exhaustive);
    CHECK(r.metrics.transversal == brute_cut(h));
  }
}

TEST_CASE("heuristic max cut is thread independent") {
  std::mt19937_64 rng(8);
  auto h = random_graph(rng, 18, 0.4);
  auto a = max_cut(h, 16, 5, 1);
  auto b = max_cut(h, 16, 5, 8);
  CHECK_FALSE(a.exhaustive);
  CHECK(a.partition.parts == b.partition.parts);
  CHECK(is_locally_maximal(h, a.partition));
  auto t = build_t_rec(optimal_trec_tree(27));
  CHECK(max_cut(t, 8, 0, 4).metrics.transversal >= 729);
}

TEST_CASE("bad versus missing edge diagnostic") {
  auto k = build_complete_tripartite(2, 2, 2);
  auto r = check_prop33(k, Partition3{{1, 1, 2, 2, 3, 3}});
  CHECK(r.value == 0);
  CHECK(r.satisfied);
  CHECK(r.locally_maximal);

  Hypergraph bad(3, 3, std::vector<Subset>{{0, 1, 2}});
  auto rb = check_prop33(bad, Partition3{{1, 1, 2}});
  CHECK(rb.value == 1);
  CHECK_FALSE(rb.satisfied);
  CHECK_FALSE(rb.hypotheses_hold);
  CHECK_FALSE(rb.red_alert);

  auto tree = parse_part_tree("(9:(3:1 1 1)(3:1 1 1)(3:1 1 1))");
  auto t = build_t_rec(tree);
  auto fam = parse_family("k4m,c5m");
  auto rt = check_prop33(t, Partition3{top_level_parts(tree)}, &fam);
  CHECK(rt.value == 0);
  CHECK(rt.satisfied);
  CHECK(rt.family_free == true);
  CHECK(metrics(t, Partition3{top_level_parts(tree)}).bad_edges.empty());
}

TEST_CASE("part size window") {
  auto w = part_size_window(alpha_32());
  CHECK(w.inside_fifth_half);
  CHECK(w.xmin > 0.2);
  CHECK(w.xmax < 0.5);
  double t = to_double(alpha_32()) / 6;
  CHECK(std::fabs(w.xmin * (1 - w.xmin) * (1 - w.xmin) / 4 - t) < 1e-12);
  CHECK(std::fabs(w.xmax * (1 - w.xmax) * (1 - w.xmax) / 4 - t) < 1e-12);
  auto d = part_size_window(Rational(6, 27));
  CHECK(d.xmin == doctest::Approx(1.0 / 3));
  CHECK(d.xmax == doctest::Approx(1.0 / 3));
  auto wider = part_size_window(alpha_32() * Rational(9, 10));
  CHECK(wider.xmin < w.xmin);
  CHECK(wider.xmax > w.xmax);
  CHECK_THROWS_AS(part_size_window(Rational(1, 4)), InputError);
  CHECK_THROWS_AS(part_size_window(Rational(0)), InputError);
}
