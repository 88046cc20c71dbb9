#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "flagforge/canonical.hpp"
#include "flagforge/families.hpp"
#include "flagforge/hypergraph.hpp"
#include "flagforge/rational.hpp"

namespace flagforge {

// Uniformity, number of vertex colors (1 = uncolored) and forbidden family.
// Freeness ignores colors.
struct Theory {
  int r = 3;
  int colors = 1;
  Family family = Family::none(3);

  Theory() = default;
  Theory(int r, int colors, Family family);
  // Stable identifier used for caching and digests.
  std::string id() const;
};

// Fully labeled colored hypergraph; labels 0..k-1.
struct TypeSigma {
  Hypergraph graph{3, 0};
  std::vector<int> colors;

  int size() const { return graph.order(); }
  static TypeSigma empty(int r);
  // One vertex of the given color.
  static TypeSigma vertex(int r, int color);
};

// The first `roots` vertices realize the type, in order.
struct Flag {
  Hypergraph graph{3, 0};
  std::vector<int> colors;
  int roots = 0;

  int order() const { return graph.order(); }
  TypeSigma type() const;
};

Flag make_flag(Hypergraph graph, std::vector<int> colors, int roots);
Flag type_as_flag(const TypeSigma& sigma);

// Canonical labeling classes: root i gets class i, a non-root of color c
// gets roots + c.
std::vector<int> flag_classes(const Flag& f);

// Identifies a flag up to root fixing, color preserving isomorphism.
CanonicalKey flag_key(const Flag& f);
CanonicalKey type_key(const TypeSigma& sigma);

// The isomorphic copy with canonical vertex order (roots stay in place).
Flag canonical_flag(const Flag& f);

bool same_type(const TypeSigma& a, const TypeSigma& b);

struct FlagBasis {
  Theory theory;
  TypeSigma sigma;
  int m = 0;
  std::vector<Flag> flags;
  std::vector<CanonicalKey> keys;

  std::size_t size() const { return flags.size(); }
  // Index of the flag with this key, or -1.
  long index_of(const CanonicalKey& key) const;
  long index_of(const Flag& f) const { return index_of(flag_key(f)); }
  // 16 hex digits of FNV-1a over m, the type and the ordered keys.
  std::string digest() const;

  void build_index();

 private:
  std::unordered_map<CanonicalKey, long> index_;
};

using BasisPtr = std::shared_ptr<const FlagBasis>;

// Canonical augmentation by one vertex at a time from the type; output is
// sorted by key and does not depend on `threads`.
BasisPtr enumerate_flags(const Theory& theory, int m, const TypeSigma& sigma, int threads = 1);

// Process wide memo of enumerated bases keyed by (theory, type, m).
BasisPtr cached_basis(const Theory& theory, int m, const TypeSigma& sigma, int threads = 1);

// Text dump: one block per flag in the hypergraph format with colors and
// "root: k", separated by blank lines, preceded by a "# count=... digest=..."
// comment line.
void write_basis(std::ostream& out, const FlagBasis& basis);

struct DensityVector {
  BasisPtr basis;
  std::vector<Rational> coeffs;

  DensityVector() = default;
  explicit DensityVector(BasisPtr b);
  DensityVector& operator+=(const DensityVector& other);
  DensityVector& operator-=(const DensityVector& other);
  DensityVector& operator*=(const Rational& s);
  bool is_zero() const;
};

DensityVector operator+(DensityVector a, const DensityVector& b);
DensityVector operator-(DensityVector a, const DensityVector& b);
DensityVector operator*(const Rational& s, DensityVector v);

DensityVector indicator(const BasisPtr& basis, long index);

// Probability that the roots plus a uniform random set of v(F) - k non-roots
// of G induce F.
Rational flag_density(const Flag& f, const Flag& g);

// c_G = probability over uniform disjoint non-root sets A, B of G with
// |A| = v(F1) - k, |B| = v(F2) - k that roots + A induces F1 and roots + B
// induces F2.
DensityVector product_expand(const Flag& f1, const Flag& f2, const BasisPtr& basis);

// Expresses a vector over F_s^sigma in F_m^sigma (m >= s) via densities.
DensityVector lift(const DensityVector& v, const BasisPtr& target);
DensityVector lift(const Flag& f, const BasisPtr& target);

// Averages a typed vector over F_m^sigma into F_m^0 (`untyped` must have the
// same theory and m): each untyped G gets the mean over all injective maps of
// the type labels into V(G); maps that do not realize sigma count as 0.
DensityVector downward(const DensityVector& f, const BasisPtr& untyped);

// Number of injective placements m! / (m - k)!.
Integer placement_count(int m, int k);

// Sparse symmetric matrix per untyped flag: P_G[a][b] is the coefficient of
// G in the averaged product of typed flags a, b of size s (stored for a <= b).
struct AveragedProducts {
  BasisPtr typed;    // F_s^sigma
  BasisPtr untyped;  // F_m^0
  std::vector<std::map<std::pair<int, int>, Rational>> per_flag;
};

// Fused computation of downward(product_expand(a, b)) for all pairs.
AveragedProducts averaged_products(const BasisPtr& typed, const BasisPtr& untyped, int threads = 1);

// Vectors of the 3-colored theory catalog.
struct NamedFlags {
  std::map<std::string, DensityVector> untyped;  // V1..V3, Eabc, Ebarabc, S, Sb, Sm
  std::map<std::string, DensityVector> typed;    // K1_23 meaning K^1_{2,3}, ...
};

// Names use sorted color digits: E112, Ebar123. 𝕊-vectors need m >= 4.
NamedFlags named_flags(const Theory& theory, int m, int threads = 1);

// Maps the ordered vertex list of a host flag (roots first) to an index in a
// basis, caching on the raw induced structure. Not thread safe.
class SubflagIndexer {
 public:
  explicit SubflagIndexer(BasisPtr basis);
  // -1 if the induced flag is not in the basis.
  long index(const Hypergraph& g, const std::vector<int>& colors, const std::vector<Vertex>& vertices);

 private:
  BasisPtr basis_;
  std::unordered_map<std::uint64_t, long> small_;
  std::unordered_map<std::string, long> large_;
};

}  // namespace flagforge
