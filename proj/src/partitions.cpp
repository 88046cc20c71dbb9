#include "flagforge/partitions.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <thread>

#include "flagforge/constructions.hpp"
#include "flagforge/embedding.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/hypergraph_ops.hpp"

namespace flagforge {

Rational alpha_32() { return make_rational(675468913113L, 3407872000000L); }

std::array<long, 3> Partition3::sizes() const {
  std::array<long, 3> s{};
  for (int x : parts) ++s[static_cast<std::size_t>(x - 1)];
  return s;
}

bool Partition3::has_empty_part() const {
  auto s = sizes();
  return s[0] == 0 || s[1] == 0 || s[2] == 0;
}

void validate(const Partition3& p, int n) {
  if (static_cast<int>(p.parts.size()) != n)
    throw InputError("partition has " + std::to_string(p.parts.size()) + " entries for " +
                     std::to_string(n) + " vertices");
  for (int x : p.parts)
    if (x < 1 || x > 3) throw InputError("part index must be 1, 2 or 3");
}

namespace {

void require_3graph(const Hypergraph& h) {
  if (h.uniformity() != 3) throw InputError("partition statistics need a 3-graph");
}

int part_of(const Partition3& p, Vertex v) { return p.parts[static_cast<std::size_t>(v)]; }

bool transversal(const Subset& e, const Partition3& p) {
  int a = part_of(p, e[0]), b = part_of(p, e[1]), c = part_of(p, e[2]);
  return a != b && b != c && a != c;
}

}  // namespace

EdgeKind classify(const Subset& e, const Partition3& p) {
  int a = part_of(p, e[0]), b = part_of(p, e[1]), c = part_of(p, e[2]);
  if (a == b && b == c) return EdgeKind::inside;
  if (a != b && b != c && a != c) return EdgeKind::transversal;
  return EdgeKind::bad;
}

long transversal_count(const Hypergraph& h, const Partition3& p) {
  require_3graph(h);
  validate(p, h.order());
  long t = 0;
  for (const auto& e : h.edges()) t += transversal(e, p);
  return t;
}

PartitionMetrics metrics(const Hypergraph& h, const Partition3& p) {
  require_3graph(h);
  validate(p, h.order());
  PartitionMetrics m;
  m.n = h.order();
  Hypergraph cross(3, h.order());
  Hypergraph good(3, h.order());
  for (const auto& e : h.edges()) {
    switch (classify(e, p)) {
      case EdgeKind::transversal:
        ++m.transversal;
        cross.add_edge(e);
        good.add_edge(e);
        break;
      case EdgeKind::bad:
        m.bad_edges.push_back(e);
        break;
      case EdgeKind::inside:
        ++m.inside[static_cast<std::size_t>(part_of(p, e[0]) - 1)];
        good.add_edge(e);
        break;
    }
  }
  if (m.n > 0) {
    m.mu = Rational(Integer(6) * m.transversal, Integer(m.n) * m.n * m.n);
    m.mu.canonicalize();
  }
  std::array<std::vector<Vertex>, 3> members;
  for (Vertex v = 0; v < m.n; ++v) members[static_cast<std::size_t>(part_of(p, v) - 1)].push_back(v);
  for (Vertex a : members[0])
    for (Vertex b : members[1])
      for (Vertex c : members[2]) {
        Subset t{a, b, c};
        if (!h.has_edge(t)) m.missing_triples.push_back(t);
      }
  std::sort(m.missing_triples.begin(), m.missing_triples.end());
  // S2 copies with at least one bad edge = all copies minus copies made of
  // non-bad edges only.
  m.bad_s2 = count_s2(h) - count_s2(good);
  m.s2_transversal = count_s2(cross);
  auto s = p.sizes();
  m.s2_complete = s2_count_tripartite(s[0], s[1], s[2]);
  m.missing_s2 = m.s2_complete - m.s2_transversal;
  return m;
}

long move_gain(const Hypergraph& h, const Partition3& p, Vertex v, int to) {
  int from = part_of(p, v);
  if (from == to) return 0;
  long gain = 0;
  for (const auto& pair : link(h, v)) {
    int a = part_of(p, pair[0]), b = part_of(p, pair[1]);
    if (a == b) continue;
    // the edge is transversal iff v sits in the third part
    int third = 6 - a - b;
    gain += (to == third) - (from == third);
  }
  return gain;
}

bool is_locally_maximal(const Hypergraph& h, const Partition3& p) {
  require_3graph(h);
  validate(p, h.order());
  for (Vertex v = 0; v < h.order(); ++v)
    for (int to = 1; to <= 3; ++to)
      if (move_gain(h, p, v, to) > 0) return false;
  return true;
}

namespace {

// Link of every vertex, precomputed for repeated sweeps.
std::vector<std::vector<Subset>> all_links(const Hypergraph& h) {
  std::vector<std::vector<Subset>> links(static_cast<std::size_t>(h.order()));
  for (const auto& e : h.edges())
    for (int i = 0; i < 3; ++i) links[static_cast<std::size_t>(e[i])].push_back(e.without(e[i]));
  return links;
}

long gain_of(const std::vector<std::vector<Subset>>& links, const Partition3& p, Vertex v, int to) {
  int from = part_of(p, v);
  long gain = 0;
  for (const auto& pair : links[static_cast<std::size_t>(v)]) {
    int a = part_of(p, pair[0]), b = part_of(p, pair[1]);
    if (a == b) continue;
    int third = 6 - a - b;
    gain += (to == third) - (from == third);
  }
  return gain;
}

// While a part is empty there are no transversal edges, so moving a vertex
// into it never loses anything. Picks the best such move, lowest vertex on ties.
bool fill_empty_part(const std::vector<std::vector<Subset>>& links, Partition3& p) {
  auto sizes = p.sizes();
  int target = 0;
  for (int i = 0; i < 3 && !target; ++i)
    if (sizes[static_cast<std::size_t>(i)] == 0) target = i + 1;
  if (!target) return false;
  Vertex best = -1;
  long best_gain = -1;
  for (Vertex v = 0; v < static_cast<Vertex>(p.parts.size()); ++v) {
    if (sizes[static_cast<std::size_t>(part_of(p, v) - 1)] < 2) continue;
    long g = gain_of(links, p, v, target);
    if (g > best_gain) {
      best_gain = g;
      best = v;
    }
  }
  p.parts[static_cast<std::size_t>(best)] = target;
  return true;
}

Partition3 sweep(const std::vector<std::vector<Subset>>& links, Partition3 p) {
  const int n = static_cast<int>(p.parts.size());
  while (true) {
    bool moved = false;
    for (Vertex v = 0; v < n; ++v) {
      int from = part_of(p, v);
      for (int to = 1; to <= 3; ++to) {
        if (to == from) continue;
        if (gain_of(links, p, v, to) > 0) {
          p.parts[static_cast<std::size_t>(v)] = to;
          from = to;
          moved = true;
        }
      }
    }
    if (moved) continue;
    if (n >= 3 && fill_empty_part(links, p)) continue;
    return p;
  }
}

}  // namespace

Partition3 local_max_search(const Hypergraph& h, Partition3 start) {
  require_3graph(h);
  validate(start, h.order());
  return sweep(all_links(h), std::move(start));
}

namespace {

Partition3 exhaustive_cut(const Hypergraph& h) {
  const int n = h.order();
  Partition3 best{std::vector<int>(static_cast<std::size_t>(n), 1)};
  if (n == 0) return best;
  long best_value = -1;
  std::vector<int> assign(static_cast<std::size_t>(n), 1);
  // odometer over vertices 1..n-1, vertex 0 fixed in part 1, lex order
  while (true) {
    long t = 0;
    for (const auto& e : h.edges()) {
      int a = assign[static_cast<std::size_t>(e[0])], b = assign[static_cast<std::size_t>(e[1])],
          c = assign[static_cast<std::size_t>(e[2])];
      t += a != b && b != c && a != c;
    }
    if (t > best_value) {
      best_value = t;
      best.parts = assign;
    }
    int i = n - 1;
    while (i >= 1 && assign[static_cast<std::size_t>(i)] == 3) assign[static_cast<std::size_t>(i--)] = 1;
    if (i < 1) break;
    ++assign[static_cast<std::size_t>(i)];
  }
  return best;
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

MaxCutResult max_cut(const Hypergraph& h, int restarts, std::uint64_t seed, int threads) {
  require_3graph(h);
  MaxCutResult result;
  const int n = h.order();
  if (n <= kMaxCutExhaustiveLimit) {
    result.partition = exhaustive_cut(h);
    result.exhaustive = true;
  } else {
    if (restarts < 1) throw InputError("max_cut needs at least one restart");
    auto links = all_links(h);
    std::vector<Partition3> found(static_cast<std::size_t>(restarts));
    auto work = [&](int r) {
      std::mt19937_64 rng(restart_seed(seed, r));
      Partition3 p{std::vector<int>(static_cast<std::size_t>(n))};
      for (auto& x : p.parts) x = 1 + static_cast<int>(rng() % 3);
      found[static_cast<std::size_t>(r)] = sweep(links, std::move(p));
    };
    threads = std::max(1, std::min(threads, restarts));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int r = t; r < restarts; r += threads) work(r);
      });
    for (auto& th : pool) th.join();
    long best = -1;
    for (const auto& p : found) {
      long v = transversal_count(h, p);
      if (v > best || (v == best && p.parts < result.partition.parts)) {
        best = v;
        result.partition = p;
      }
    }
  }
  result.metrics = metrics(h, result.partition);
  return result;
}

Prop33Report check_prop33(const Hypergraph& h, const Partition3& p, const Family* family) {
  auto m = metrics(h, p);
  Prop33Report r;
  r.value = Rational(static_cast<long>(m.bad_edges.size())) -
            Rational(3, 4) * Rational(static_cast<long>(m.missing_triples.size()));
  r.value.canonicalize();
  r.satisfied = r.value <= 0;
  r.locally_maximal = is_locally_maximal(h, p);
  r.mu = m.mu;
  r.mu_hypothesis = m.mu >= make_rational(198, 1000);
  if (family) r.family_free = is_family_free(h, *family);
  r.hypotheses_hold = r.locally_maximal && r.mu_hypothesis && r.family_free.value_or(true);
  r.red_alert = r.hypotheses_hold && !r.satisfied;
  return r;
}

namespace {

Rational window_g(const Rational& x) {
  Rational v = x * (1 - x) * (1 - x) / 4;
  v.canonicalize();
  return v;
}

double window_g(double x) { return x * (1 - x) * (1 - x) / 4; }

// g is increasing on [lo, hi] when up is true, decreasing otherwise.
double bisect(double lo, double hi, double target, bool up) {
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = (lo + hi) / 2;
    bool below = window_g(mid) < target;
    if (below == up)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

PartSizeWindow part_size_window(const Rational& alpha) {
  if (alpha <= 0 || alpha > Rational(6, 27)) throw InputError("alpha must lie in (0, 6/27]");
  Rational target = alpha / 6;
  target.canonicalize();
  PartSizeWindow w;
  if (target == Rational(1, 27)) {
    w.xmin = w.xmax = 1.0 / 3;
  } else {
    double t = to_double(target);
    w.xmin = bisect(0, 1.0 / 3, t, true);
    w.xmax = bisect(1.0 / 3, 1, t, false);
  }
  w.inside_fifth_half = window_g(Rational(1, 5)) < target && window_g(Rational(1, 2)) < target;
  return w;
}

}  // namespace flagforge
