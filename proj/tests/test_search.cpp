#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "flagforge/constructions.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/hypergraph_ops.hpp"
#include "flagforge/search.hpp"

using namespace flagforge;

namespace {

// Labeled enumeration: orbit count by minimal edge mask over all
// permutations, and the objective maximum over free graphs.
struct BruteSummary {
  long classes = 0;
  Integer best = -1;
};

BruteSummary brute(int n, const Family& fam, SearchObjective o) {
  auto triples = all_subsets(n, 3);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<std::vector<int>> image(perms.size(), std::vector<int>(triples.size()));
  for (std::size_t p = 0; p < perms.size(); ++p)
    for (std::size_t t = 0; t < triples.size(); ++t) {
      std::vector<Vertex> v;
      for (Vertex x : triples[t]) v.push_back(perms[p][static_cast<std::size_t>(x)]);
      image[p][t] = static_cast<int>(Subset::of(v).rank());
    }
  BruteSummary s;
  for (long mask = 0; mask < (1L << triples.size()); ++mask) {
    long minimal = mask;
    for (std::size_t p = 0; p < perms.size() && minimal == mask; ++p) {
      long m2 = 0;
      for (std::size_t t = 0; t < triples.size(); ++t)
        if (mask >> t & 1) m2 |= 1L << image[p][t];
      minimal = std::min(minimal, m2);
    }
    if (minimal != mask) continue;
    Hypergraph h(3, n);
    for (std::size_t t = 0; t < triples.size(); ++t)
      if (mask >> t & 1) h.add_edge(triples[t]);
    if (!is_family_free(h, fam)) continue;
    ++s.classes;
    s.best = std::max(s.best, objective_value(h, o));
  }
  return s;
}

SearchTask task(int n, const std::string& fam, SearchObjective o) {
  SearchTask t;
  t.n = n;
  t.family = parse_family(fam);
  t.objective = o;
  return t;
}

}  // namespace

TEST_CASE("class enumeration matches the labeled orbit oracle") {
  for (int n = 0; n <= 5; ++n)
    for (std::string fam : {"none", "k4m", "k4m,c5m"}) {
      std::vector<CanonicalKey> keys;
      for_each_class(n, parse_family(fam), [&](const Hypergraph& h) { keys.push_back(canonical_key(h)); });
      std::set<CanonicalKey> distinct(keys.begin(), keys.end());
      CHECK(distinct.size() == keys.size());
      if (n >= 3) CHECK(static_cast<long>(keys.size()) == brute(n, parse_family(fam), SearchObjective::edges).classes);
    }
  long count = 0;
  for_each_class(4, Family::none(3), [&](const Hypergraph&) { ++count; });
  CHECK(count == 5);
}

TEST_CASE("small extremal values") {
  auto a = search_max(task(4, "k4m,c5m", SearchObjective::s2count));
  CHECK(a.value == 1);
  CHECK(a.exact);
  CHECK(count_s2(a.witness) == 1);
  CHECK(search_max(task(4, "k4m", SearchObjective::edges)).value == 2);
  for (auto o : {SearchObjective::edges, SearchObjective::l2norm, SearchObjective::s2count})
    for (std::string fam : {"k4m", "k4m,c5m"}) {
      auto r = search_max(task(5, fam, o));
      CHECK(r.value == brute(5, parse_family(fam), o).best);
      CHECK(objective_value(r.witness, o) == r.value);
      CHECK(is_family_free(r.witness, parse_family(fam)));
    }
}

TEST_CASE("n = 6 regression and the K[2,2,2] witness") {
  auto k222 = build_complete_tripartite(2, 2, 2);
  auto fam = parse_family("k4m,c5m");
  CHECK(is_family_free(k222, fam));
  CHECK(count_s2(k222) == 12);
  auto r = search_max(task(6, "k4m,c5m", SearchObjective::s2count));
  CHECK(r.value >= 12);
  // first verified run
  CHECK(r.value == 12);
  CHECK(count_s2(r.witness) == r.value);
  CHECK(is_family_free(r.witness, fam));
  CHECK(r.classes_visited == 55);
  CHECK(search_max(task(5, "k4m,c5m", SearchObjective::s2count)).value == 4);
  std::set<CanonicalKey> best;
  for_each_class(6, fam, [&](const Hypergraph& h) {
    if (count_s2(h) == 12) best.insert(canonical_key(h));
  });
  CHECK(best.count(canonical_key(k222)) == 1);
}

TEST_CASE("exhaustive values dominate constructions") {
  auto fam = parse_family("k4m,c5m");
  for (int n = 3; n <= 7; ++n) {
    auto tree = build_t_rec(optimal_trec_tree(n));
    auto e = search_max(task(n, "k4m,c5m", SearchObjective::edges));
    CHECK(e.value >= static_cast<long>(tree.size()));
    auto s = search_max(task(n, "k4m,c5m", SearchObjective::s2count));
    CHECK(s.value >= t_rec_s2(n).value);
    CHECK(is_family_free(tree, fam));
  }
}

TEST_CASE("thread count does not change results") {
  for (auto o : {SearchObjective::edges, SearchObjective::s2count}) {
    auto t = task(7, "k4m,c5m", o);
    auto one = search_max(t);
    t.threads = 4;
    auto four = search_max(t);
    CHECK(one.value == four.value);
    CHECK(one.witness == four.witness);
    CHECK(one.classes_visited == four.classes_visited);
  }
  auto t = task(8, "k4m,c5m", SearchObjective::s2count);
  t.mode = SearchMode::augmenting;
  t.restarts = 64;
  t.seed = 3;
  auto one = search_max(t);
  t.threads = 4;
  auto four = search_max(t);
  CHECK_FALSE(one.exact);
  CHECK(one.value == four.value);
  CHECK(one.witness == four.witness);
}

TEST_CASE("augmenting mode gives lower bounds") {
  auto exact = search_max(task(6, "k4m,c5m", SearchObjective::s2count));
  auto t = task(6, "k4m,c5m", SearchObjective::s2count);
  t.mode = SearchMode::augmenting;
  t.restarts = 50;
  auto lb = search_max(t);
  CHECK(lb.value <= exact.value);
  CHECK(is_family_free(lb.witness, t.family));
  auto big = task(12, "k4m,c5m", SearchObjective::edges);
  CHECK_THROWS_AS(search_max(big), InputError);
  big.mode = SearchMode::augmenting;
  big.restarts = 5;
  CHECK(search_max(big).value > 0);
}

TEST_CASE("checkpoint and resume") {
  const std::string path = "search_checkpoint_test.txt";
  std::remove(path.c_str());
  auto t = task(7, "k4m,c5m", SearchObjective::s2count);
  t.checkpoint = path;
  t.checkpoint_interval = 0;
  auto first = search_max(t);
  CHECK_FALSE(first.resumed);
  {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "flagforge-search-checkpoint 1");
  }
  // forget half of the finished subtrees, then resume
  {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    std::ofstream out(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i >= 2 && i % 2 == 0 && lines[i].rfind("done", 0) == 0) {
        std::istringstream s(lines[i]);
        std::string kind, idx, code;
        s >> kind >> idx >> code;
        out << "todo " << idx << " " << code << "\n";
      } else {
        out << lines[i] << "\n";
      }
    }
  }
  auto second = search_max(t);
  CHECK(second.resumed);
  CHECK(second.value == first.value);
  CHECK(second.witness == first.witness);
  CHECK(second.classes_visited == first.classes_visited);
  auto other = task(6, "k4m,c5m", SearchObjective::s2count);
  other.checkpoint = path;
  CHECK_THROWS_AS(search_max(other), InputError);
  std::remove(path.c_str());
}

TEST_CASE("density report") {
  auto r4 = density_row(search_max(task(4, "k4m,c5m", SearchObjective::s2count)), 4);
  CHECK(r4.ratio == 1);
  auto r6 = density_row(search_max(task(6, "k4m,c5m", SearchObjective::s2count)), 6);
  CHECK(r6.quadruples == 15);
  CHECK(r6.ratio == Rational(4, 5));
  CHECK(s2_reference_density() == Rational(6, 13));
  std::ostringstream text, csv;
  write_density_report(text, {r4, r6}, "text");
  write_density_report(csv, {r4, r6}, "csv");
  CHECK(text.str().find("6/13 = 0.461538") != std::string::npos);
  CHECK(csv.str().find("6,12,true,15,4/5,0.800000") != std::string::npos);
  CHECK_THROWS_AS(write_density_report(text, {r4}, "xml"), InputError);
}
