#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flagforge {

using Vertex = int;

// Sorted set of at most three distinct vertices: an edge of a 2- or 3-graph,
// or a shadow element.
class Subset {
 public:
  static constexpr int kCapacity = 3;

  Subset() = default;
  Subset(std::initializer_list<Vertex> vertices);

  // Vertices need not be sorted; duplicates are rejected.
  static Subset of(std::span<const Vertex> vertices);

  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  Vertex operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  const Vertex* begin() const { return v_.data(); }
  const Vertex* end() const { return v_.data() + size_; }

  bool contains(Vertex x) const;
  Subset without(Vertex x) const;
  Subset with(Vertex x) const;

  // Position of the subset in the colexicographic order of all subsets of
  // the same size. Independent of the ambient vertex count.
  std::uint32_t rank() const;
  static Subset unrank(std::uint32_t rank, int size);

  friend bool operator==(const Subset&, const Subset&) = default;
  friend std::strong_ordering operator<=>(const Subset& a, const Subset& b);

 private:
  std::array<Vertex, kCapacity> v_{};
  int size_ = 0;
};

std::string to_string(const Subset& s);

// All k-subsets of {0..n-1} in colex order.
std::vector<Subset> all_subsets(int n, int k);

// r-uniform hypergraph on vertices 0..n-1. Edges are kept sorted by colex
// rank and mirrored in a dense bitset for O(1) membership.
class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(int r, int n);
  Hypergraph(int r, int n, std::span<const Subset> edges);

  int uniformity() const { return r_; }
  int order() const { return n_; }
  std::size_t size() const { return edges_.size(); }
  const std::vector<Subset>& edges() const { return edges_; }

  bool has_edge(const Subset& e) const;
  bool has_rank(std::uint32_t rank) const {
    return rank < capacity_ && ((bits_[rank >> 6] >> (rank & 63)) & 1U);
  }

  // Returns false if the edge was already present.
  bool add_edge(const Subset& e);
  bool remove_edge(const Subset& e);

  // perm[old] = new label; perm must be a permutation of 0..n-1.
  Hypergraph relabeled(std::span<const int> perm) const;

  // Subgraph induced on `vertices`, relabeled 0..k-1 in the given order.
  Hypergraph induced(std::span<const Vertex> vertices) const;

  // Adds `count` isolated vertices.
  Hypergraph with_extra_vertices(int count) const;

  std::vector<std::uint32_t> edge_ranks() const;

  friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
    return a.r_ == b.r_ && a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  void check_edge(const Subset& e) const;

  int r_ = 3;
  int n_ = 0;
  std::uint32_t capacity_ = 0;
  std::vector<Subset> edges_;
  std::vector<std::uint64_t> bits_;
};

// Hypergraph with one color per vertex (colors are 1-based). An empty color
// vector means "uncolored" and behaves like every vertex having color 1.
struct ColoredHypergraph {
  Hypergraph graph;
  std::vector<int> colors;

  int color(Vertex v) const { return colors.empty() ? 1 : colors[static_cast<std::size_t>(v)]; }
  ColoredHypergraph induced(std::span<const Vertex> vertices) const;
};

// Text format:
//   r n m
//   m lines with r vertex indices
//   optional "colors: c0 ... c(n-1)"
//   optional "parts: p0 ... p(n-1)"
//   optional "root: k"
// '#' starts a comment; blank lines are ignored.
struct HypergraphDocument {
  Hypergraph graph;
  std::vector<int> colors;
  std::vector<int> parts;
  std::optional<int> roots;
};

HypergraphDocument read_hypergraph(std::istream& in);
HypergraphDocument read_hypergraph_file(const std::string& path);
Hypergraph parse_hypergraph(const std::string& text);

void write_hypergraph(std::ostream& out, const Hypergraph& h);
void write_document(std::ostream& out, const HypergraphDocument& doc);
std::string to_text(const Hypergraph& h);

}  // namespace flagforge
