#include "flagforge/hypergraph_ops.hpp"

#include <algorithm>

#include "flagforge/canonical.hpp"
#include "flagforge/embedding.hpp"
#include "flagforge/errors.hpp"

namespace flagforge {

namespace {

// Sorted colex ranks of all (r-1)-faces of all edges, with multiplicity.
std::vector<std::uint32_t> face_ranks(const Hypergraph& h) {
  std::vector<std::uint32_t> faces;
  faces.reserve(h.size() * static_cast<std::size_t>(h.uniformity()));
  for (const auto& e : h.edges())
    for (Vertex v : e) faces.push_back(e.without(v).rank());
  std::sort(faces.begin(), faces.end());
  return faces;
}

template <typename Visit>
void for_each_codegree(const Hypergraph& h, Visit&& visit) {
  auto faces = face_ranks(h);
  for (std::size_t i = 0; i < faces.size();) {
    std::size_t j = i;
    while (j < faces.size() && faces[j] == faces[i]) ++j;
    visit(faces[i], static_cast<long>(j - i));
    i = j;
  }
}

}  // namespace

std::vector<Subset> shadow(const Hypergraph& h) {
  std::vector<Subset> out;
  int k = h.uniformity() - 1;
  for_each_codegree(h, [&](std::uint32_t rank, long) { out.push_back(Subset::unrank(rank, k)); });
  return out;
}

long codegree(const Hypergraph& h, const Subset& t) {
  if (t.size() != h.uniformity() - 1) throw InputError("codegree needs an (r-1)-set, got " + to_string(t));
  for (Vertex v : t)
    if (v < 0 || v >= h.order()) throw InputError("vertex " + std::to_string(v) + " outside the hypergraph");
  long d = 0;
  for (Vertex v = 0; v < h.order(); ++v)
    if (!t.contains(v) && h.has_edge(t.with(v))) ++d;
  return d;
}

std::vector<Subset> link(const Hypergraph& h, Vertex v) {
  if (v < 0 || v >= h.order()) throw InputError("vertex " + std::to_string(v) + " outside the hypergraph");
  std::vector<Subset> out;
  for (const auto& e : h.edges())
    if (e.contains(v)) out.push_back(e.without(v));
  std::sort(out.begin(), out.end());
  return out;
}

Integer lp_norm(const Hypergraph& h, int p) {
  if (p < 1) throw InputError("lp_norm needs p >= 1");
  Integer total = 0;
  for_each_codegree(h, [&](std::uint32_t, long d) {
    Integer term;
    mpz_ui_pow_ui(term.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(p));
    total += term;
  });
  return total;
}

Integer count_s2(const Hypergraph& h) {
  if (h.uniformity() != 3) throw InputError("S2 counting is only defined for 3-graphs");
  Integer total = 0;
  for_each_codegree(h, [&](std::uint32_t, long d) { total += Integer(d) * (d - 1) / 2; });
  return total;
}

Rational induced_density(const Hypergraph& f, const Hypergraph& h) {
  if (f.uniformity() != h.uniformity()) throw InputError("uniformity mismatch in induced_density");
  int k = f.order(), n = h.order();
  if (k > n) throw InputError("pattern has more vertices than host");
  auto target = canonical_key(f);
  Integer hits = 0;
  for_each_combination(n, k, [&](const std::vector<int>& s) {
    auto sub = h.induced(s);
    if (sub.size() == f.size() && canonical_key(sub) == target) ++hits;
  });
  Rational q(hits, binomial(n, k));
  q.canonicalize();
  return q;
}

Hypergraph blowup(const Hypergraph& h, int k) {
  if (k < 1) throw InputError("blowup factor must be >= 1");
  int r = h.uniformity();
  Hypergraph out(r, h.order() * k);
  for (const auto& e : h.edges()) {
    if (r == 2) {
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) out.add_edge(Subset{e[0] * k + a, e[1] * k + b});
    } else {
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          for (int c = 0; c < k; ++c) out.add_edge(Subset{e[0] * k + a, e[1] * k + b, e[2] * k + c});
    }
  }
  return out;
}

bool homomorphism_exists(const Hypergraph& f, const Hypergraph& g) {
  if (f.uniformity() != g.uniformity()) throw InputError("uniformity mismatch in homomorphism_exists");
  if (f.size() == 0) return g.order() > 0 || f.order() == 0;
  return find_embedding(f, g, false).has_value();
}

}  // namespace flagforge
