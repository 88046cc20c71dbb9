#include "flagforge/embedding.hpp"

#include <algorithm>
#include <array>

#include "flagforge/errors.hpp"

namespace flagforge {

namespace {

class Matcher {
 public:
  Matcher(const Hypergraph& pattern, const Hypergraph& host, bool injective)
      : pattern_(pattern), host_(host), injective_(injective) {
    if (pattern.uniformity() != host.uniformity()) throw InputError("uniformity mismatch between pattern and host");
    int p = pattern.order();
    map_.assign(static_cast<std::size_t>(p), -1);
    used_.assign(static_cast<std::size_t>(host.order()), 0);
  }

  void pin(Vertex pattern_vertex, Vertex host_vertex) {
    map_[static_cast<std::size_t>(pattern_vertex)] = host_vertex;
    ++used_[static_cast<std::size_t>(host_vertex)];
  }

  // Plans the order for the unpinned vertices: greedily the vertex sharing
  // the most edges with already placed ones.
  void plan() {
    int p = pattern_.order();
    std::vector<char> placed(static_cast<std::size_t>(p), 0);
    std::vector<int> rank(static_cast<std::size_t>(p), -1);
    int next_rank = 0;
    for (int v = 0; v < p; ++v)
      if (map_[static_cast<std::size_t>(v)] >= 0) {
        placed[static_cast<std::size_t>(v)] = 1;
        rank[static_cast<std::size_t>(v)] = next_rank++;
      }
    order_.clear();
    const int pinned = next_rank;
    while (static_cast<int>(order_.size()) < p - pinned) {
      int best = -1, best_score = -1;
      for (int v = 0; v < p; ++v) {
        if (placed[static_cast<std::size_t>(v)]) continue;
        int score = 0;
        for (const auto& e : pattern_.edges()) {
          if (!e.contains(v)) continue;
          for (Vertex u : e)
            if (u != v && placed[static_cast<std::size_t>(u)]) ++score;
        }
        if (score > best_score) {
          best_score = score;
          best = v;
        }
      }
      placed[static_cast<std::size_t>(best)] = 1;
      rank[static_cast<std::size_t>(best)] = next_rank++;
      order_.push_back(best);
    }
    // Edges checked at the step where their last vertex gets placed.
    checks_.assign(order_.size() + 1, {});
    for (const auto& e : pattern_.edges()) {
      int last = -1;
      for (Vertex u : e) last = std::max(last, rank[static_cast<std::size_t>(u)]);
      int step = last < pinned ? 0 : last - pinned + 1;
      checks_[static_cast<std::size_t>(step)].push_back(e);
    }
  }

  bool edges_ok(std::size_t step) const {
    for (const auto& e : checks_[step]) {
      std::array<Vertex, 3> img{};
      int r = e.size();
      for (int i = 0; i < r; ++i) img[static_cast<std::size_t>(i)] = map_[static_cast<std::size_t>(e[i])];
      std::sort(img.begin(), img.begin() + r);
      for (int i = 1; i < r; ++i)
        if (img[static_cast<std::size_t>(i)] == img[static_cast<std::size_t>(i - 1)]) return false;
      Subset s;
      if (r == 2) s = Subset{img[0], img[1]};
      else s = Subset{img[0], img[1], img[2]};
      if (!host_.has_edge(s)) return false;
    }
    return true;
  }

  template <typename Visit>
  bool run(Visit&& visit) {
    if (!edges_ok(0)) return false;
    return extend(0, visit);
  }

  const std::vector<Vertex>& mapping() const { return map_; }

 private:
  template <typename Visit>
  bool extend(std::size_t depth, Visit& visit) {
    if (depth == order_.size()) return visit(map_);
    Vertex pv = order_[depth];
    for (Vertex hv = 0; hv < host_.order(); ++hv) {
      if (injective_ && used_[static_cast<std::size_t>(hv)]) continue;
      map_[static_cast<std::size_t>(pv)] = hv;
      ++used_[static_cast<std::size_t>(hv)];
      bool stop = edges_ok(depth + 1) && extend(depth + 1, visit);
      --used_[static_cast<std::size_t>(hv)];
      map_[static_cast<std::size_t>(pv)] = -1;
      if (stop) return true;
    }
    return false;
  }

  const Hypergraph& pattern_;
  const Hypergraph& host_;
  bool injective_;
  std::vector<Vertex> map_;
  std::vector<int> used_;
  std::vector<Vertex> order_;
  std::vector<std::vector<Subset>> checks_;
};

}  // namespace

std::optional<std::vector<Vertex>> find_embedding(const Hypergraph& pattern, const Hypergraph& host, bool injective) {
  if (injective && pattern.order() > host.order()) return std::nullopt;
  if (pattern.uniformity() != host.uniformity()) throw InputError("uniformity mismatch between pattern and host");
  if (pattern.size() > 0 && host.size() == 0) return std::nullopt;
  Matcher m(pattern, host, injective);
  m.plan();
  std::optional<std::vector<Vertex>> found;
  m.run([&](const std::vector<Vertex>& map) {
    found = map;
    return true;
  });
  return found;
}

bool contains_subgraph(const Hypergraph& host, const Hypergraph& pattern) {
  return find_embedding(pattern, host, true).has_value();
}

bool contains_subgraph_through_vertex(const Hypergraph& host, const Hypergraph& pattern, Vertex x) {
  if (pattern.order() > host.order()) return false;
  if (pattern.size() > host.size()) return false;
  for (Vertex u = 0; u < pattern.order(); ++u) {
    Matcher m(pattern, host, true);
    m.pin(u, x);
    m.plan();
    if (m.run([](const std::vector<Vertex>&) { return true; })) return true;
  }
  return false;
}

bool contains_subgraph_through_edge(const Hypergraph& host, const Hypergraph& pattern, const Subset& e) {
  if (pattern.order() > host.order()) return false;
  if (pattern.size() > host.size()) return false;
  int r = e.size();
  std::array<int, 3> perm{0, 1, 2};
  for (const auto& f : pattern.edges()) {
    std::sort(perm.begin(), perm.begin() + r);
    do {
      Matcher m(pattern, host, true);
      for (int i = 0; i < r; ++i) m.pin(f[i], e[perm[static_cast<std::size_t>(i)]]);
      m.plan();
      if (m.run([](const std::vector<Vertex>&) { return true; })) return true;
    } while (std::next_permutation(perm.begin(), perm.begin() + r));
  }
  return false;
}

std::uint64_t count_embeddings(const Hypergraph& pattern, const Hypergraph& host) {
  if (pattern.order() > host.order()) return 0;
  Matcher m(pattern, host, true);
  m.plan();
  std::uint64_t count = 0;
  m.run([&](const std::vector<Vertex>&) {
    ++count;
    return false;
  });
  return count;
}

}  // namespace flagforge
