#include "flagforge/canonical.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "flagforge/errors.hpp"

namespace flagforge {

namespace {

using Code = std::vector<std::uint32_t>;

struct Leaf {
  Code code;
  std::vector<int> labeling;
  unsigned __int128 count = 0;
  bool found = false;
};

class Canonizer {
 public:
  Canonizer(const Hypergraph& h, std::span<const int> classes) : h_(h), n_(h.order()), r_(h.uniformity()) {
    incidence_.resize(static_cast<std::size_t>(n_));
    for (const auto& e : h.edges()) {
      for (int i = 0; i < r_; ++i) {
        std::array<int, 2> others{-1, -1};
        int k = 0;
        for (int j = 0; j < r_; ++j)
          if (j != i) others[static_cast<std::size_t>(k++)] = e[j];
        incidence_[static_cast<std::size_t>(e[i])].push_back(others);
      }
    }
    initial_.assign(classes.begin(), classes.end());
  }

  CanonicalForm run() {
    std::vector<int> colors = normalize(initial_);
    Leaf best = search(colors);
    CanonicalForm out;
    out.relabeling = best.labeling;
    out.canonical_edges = h_.relabeled(best.labeling);
    if (best.count > std::numeric_limits<std::uint64_t>::max())
      throw InputError("automorphism group order exceeds 64 bits");
    out.automorphism_count = static_cast<std::uint64_t>(best.count);
    return out;
  }

 private:
  // Maps arbitrary integer colors onto 0..c-1 preserving order.
  std::vector<int> normalize(const std::vector<int>& raw) const {
    std::vector<int> vals(raw);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
      out[i] = static_cast<int>(std::lower_bound(vals.begin(), vals.end(), raw[i]) - vals.begin());
    return out;
  }

  static int count_colors(const std::vector<int>& colors) {
    int mx = -1;
    for (int c : colors) mx = std::max(mx, c);
    return mx + 1;
  }

  // Splits color classes by the multiset of colors seen through incident
  // edges until stable. New colors refine the old order.
  void refine(std::vector<int>& colors) const {
    int num = count_colors(colors);
    std::vector<std::vector<int>> sig(static_cast<std::size_t>(n_));
    std::vector<int> order(static_cast<std::size_t>(n_));
    while (num < n_) {
      for (int v = 0; v < n_; ++v) {
        auto& s = sig[static_cast<std::size_t>(v)];
        s.clear();
        s.push_back(colors[static_cast<std::size_t>(v)]);
        for (const auto& o : incidence_[static_cast<std::size_t>(v)]) {
          if (r_ == 2) {
            s.push_back(colors[static_cast<std::size_t>(o[0])]);
          } else {
            int a = colors[static_cast<std::size_t>(o[0])], b = colors[static_cast<std::size_t>(o[1])];
            if (a > b) std::swap(a, b);
            s.push_back(a * n_ + b);
          }
        }
        std::sort(s.begin() + 1, s.end());
      }
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return sig[static_cast<std::size_t>(a)] < sig[static_cast<std::size_t>(b)]; });
      int next = 0;
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0 && sig[static_cast<std::size_t>(order[i])] != sig[static_cast<std::size_t>(order[i - 1])]) ++next;
        colors[static_cast<std::size_t>(order[i])] = next;
      }
      int updated = next + 1;
      if (updated == num) break;
      num = updated;
    }
  }

  bool twins(int v, int w) const {
    for (const auto& e : h_.edges()) {
      bool hv = e.contains(v), hw = e.contains(w);
      if (hv == hw) continue;
      Subset moved = hv ? e.without(v).with(w) : e.without(w).with(v);
      if (!h_.has_edge(moved)) return false;
    }
    return true;
  }

  Code leaf_code(const std::vector<int>& labels) const {
    Code code;
    code.reserve(h_.size());
    for (const auto& e : h_.edges()) {
      std::array<int, 3> buf{};
      for (int i = 0; i < r_; ++i) buf[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(e[i])];
      code.push_back(Subset::of(std::span<const int>(buf.data(), static_cast<std::size_t>(r_))).rank());
    }
    std::sort(code.begin(), code.end());
    return code;
  }

  Leaf search(std::vector<int> colors) const {
    refine(colors);
    int num = count_colors(colors);
    if (num == n_) {
      Leaf leaf;
      leaf.code = leaf_code(colors);
      leaf.labeling = std::move(colors);
      leaf.count = 1;
      leaf.found = true;
      return leaf;
    }
    // Target cell: the smallest color with at least two members.
    std::vector<int> sizes(static_cast<std::size_t>(num), 0);
    for (int c : colors) ++sizes[static_cast<std::size_t>(c)];
    int target = 0;
    while (sizes[static_cast<std::size_t>(target)] < 2) ++target;
    std::vector<int> cell;
    for (int v = 0; v < n_; ++v)
      if (colors[static_cast<std::size_t>(v)] == target) cell.push_back(v);

    // Twin classes: swapping two twins is an automorphism of the current
    // colored structure, so their subtrees are isomorphic.
    std::vector<int> reps;
    std::vector<unsigned __int128> mult;
    for (int v : cell) {
      bool merged = false;
      for (std::size_t i = 0; i < reps.size(); ++i) {
        if (twins(reps[i], v)) {
          ++mult[i];
          merged = true;
          break;
        }
      }
      if (!merged) {
        reps.push_back(v);
        mult.push_back(1);
      }
    }

    Leaf best;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      std::vector<int> child(colors.size());
      for (int v = 0; v < n_; ++v) {
        int c = colors[static_cast<std::size_t>(v)];
        child[static_cast<std::size_t>(v)] = 2 * c + ((c == target && v != reps[i]) ? 1 : 0);
      }
      Leaf sub = search(normalize(child));
      if (!best.found || sub.code < best.code) {
        best = std::move(sub);
        best.count *= mult[i];
      } else if (sub.code == best.code) {
        best.count += sub.count * mult[i];
      }
    }
    return best;
  }

  const Hypergraph& h_;
  int n_;
  int r_;
  std::vector<std::vector<std::array<int, 2>>> incidence_;
  std::vector<int> initial_;
};

}  // namespace

CanonicalForm canonical_form(const Hypergraph& h) {
  std::vector<int> classes(static_cast<std::size_t>(h.order()), 0);
  return canonical_form(h, classes);
}

CanonicalForm canonical_form(const Hypergraph& h, std::span<const int> vertex_classes) {
  if (vertex_classes.size() != static_cast<std::size_t>(h.order()))
    throw InputError("vertex class list has wrong length");
  if (h.order() == 0) return CanonicalForm{{}, h, 1};
  return Canonizer(h, vertex_classes).run();
}

CanonicalKey canonical_key(const Hypergraph& h, std::span<const int> vertex_classes) {
  return canonical_key(canonical_form(h, vertex_classes), vertex_classes);
}

CanonicalKey canonical_key(const CanonicalForm& form, std::span<const int> vertex_classes) {
  const Hypergraph& h = form.canonical_edges;
  std::vector<int> sorted(vertex_classes.begin(), vertex_classes.end());
  std::sort(sorted.begin(), sorted.end());
  CanonicalKey key;
  key.reserve(4 + 2 * sorted.size() + 4 * h.size());
  auto put16 = [&](std::uint32_t v) {
    key.push_back(static_cast<char>((v >> 8) & 0xFF));
    key.push_back(static_cast<char>(v & 0xFF));
  };
  auto put32 = [&](std::uint32_t v) {
    put16(v >> 16);
    put16(v & 0xFFFF);
  };
  put16(static_cast<std::uint32_t>(h.uniformity()));
  put16(static_cast<std::uint32_t>(h.order()));
  for (int c : sorted) put16(static_cast<std::uint32_t>(c));
  put32(static_cast<std::uint32_t>(h.size()));
  for (const auto& e : form.canonical_edges.edges()) put32(e.rank());
  return key;
}

CanonicalKey canonical_key(const Hypergraph& h) {
  std::vector<int> classes(static_cast<std::size_t>(h.order()), 0);
  return canonical_key(h, classes);
}

bool isomorphic(const Hypergraph& a, const Hypergraph& b) {
  if (a.uniformity() != b.uniformity() || a.order() != b.order() || a.size() != b.size()) return false;
  return canonical_key(a) == canonical_key(b);
}

}  // namespace flagforge
