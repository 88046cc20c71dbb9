#include "flagforge/flags.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "flagforge/embedding.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/hypergraph_ops.hpp"

namespace flagforge {

namespace {

std::string hex_bytes(const std::string& s) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * s.size());
  for (unsigned char c : s) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void check_colors(const std::vector<int>& colors, int n, int max_color) {
  if (static_cast<int>(colors.size()) != n) throw InputError("color list has wrong length");
  for (int c : colors)
    if (c < 1 || c > max_color) throw InputError("color out of range");
}

bool is_free(const Hypergraph& h, const Family& family) { return family.empty() || is_family_free(h, family); }

template <typename Work>
void run_parallel(std::size_t count, int threads, Work&& work) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) work(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

Theory::Theory(int r_, int colors_, Family family_) : r(r_), colors(colors_), family(std::move(family_)) {
  if (r != 2 && r != 3) throw InputError("uniformity must be 2 or 3");
  if (colors < 1 || colors > 9) throw InputError("number of colors must be between 1 and 9");
  if (!family.empty() && family.uniformity() != r) throw InputError("family uniformity differs from theory");
}

std::string Theory::id() const {
  std::vector<std::string> keys;
  for (const auto& f : family.members()) keys.push_back(hex_bytes(canonical_key(f)));
  std::sort(keys.begin(), keys.end());
  std::ostringstream out;
  out << "r" << r << "c" << colors;
  for (const auto& k : keys) out << ":" << k;
  return out.str();
}

TypeSigma TypeSigma::empty(int r) {
  TypeSigma t;
  t.graph = Hypergraph(r, 0);
  return t;
}

TypeSigma TypeSigma::vertex(int r, int color) {
  TypeSigma t;
  t.graph = Hypergraph(r, 1);
  t.colors = {color};
  return t;
}

TypeSigma Flag::type() const {
  std::vector<Vertex> rs(static_cast<std::size_t>(roots));
  std::iota(rs.begin(), rs.end(), 0);
  TypeSigma t;
  t.graph = graph.induced(rs);
  t.colors.assign(colors.begin(), colors.begin() + roots);
  return t;
}

Flag make_flag(Hypergraph graph, std::vector<int> colors, int roots) {
  if (colors.empty()) colors.assign(static_cast<std::size_t>(graph.order()), 1);
  if (static_cast<int>(colors.size()) != graph.order()) throw InputError("color list has wrong length");
  for (int c : colors)
    if (c < 1) throw InputError("colors are 1-based");
  if (roots < 0 || roots > graph.order()) throw InputError("root count out of range");
  return Flag{std::move(graph), std::move(colors), roots};
}

Flag type_as_flag(const TypeSigma& sigma) { return Flag{sigma.graph, sigma.colors, sigma.size()}; }

std::vector<int> flag_classes(const Flag& f) {
  std::vector<int> classes(static_cast<std::size_t>(f.order()));
  for (int v = 0; v < f.order(); ++v)
    classes[static_cast<std::size_t>(v)] = v < f.roots ? v : f.roots + f.colors[static_cast<std::size_t>(v)];
  return classes;
}

namespace {

CanonicalKey key_with_roots(const Flag& f, const CanonicalForm& form, const std::vector<int>& classes) {
  CanonicalKey key;
  key.push_back(static_cast<char>(f.roots));
  for (int i = 0; i < f.roots; ++i) key.push_back(static_cast<char>(f.colors[static_cast<std::size_t>(i)]));
  key += canonical_key(form, classes);
  return key;
}

}  // namespace

CanonicalKey flag_key(const Flag& f) {
  auto classes = flag_classes(f);
  return key_with_roots(f, canonical_form(f.graph, classes), classes);
}

CanonicalKey type_key(const TypeSigma& sigma) { return flag_key(type_as_flag(sigma)); }

Flag canonical_flag(const Flag& f) {
  auto classes = flag_classes(f);
  auto form = canonical_form(f.graph, classes);
  Flag out;
  out.graph = form.canonical_edges;
  out.roots = f.roots;
  out.colors.assign(f.colors.size(), 0);
  for (std::size_t v = 0; v < f.colors.size(); ++v)
    out.colors[static_cast<std::size_t>(form.relabeling[v])] = f.colors[v];
  return out;
}

bool same_type(const TypeSigma& a, const TypeSigma& b) {
  return a.graph == b.graph && a.colors == b.colors;
}

long FlagBasis::index_of(const CanonicalKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

void FlagBasis::build_index() {
  index_.clear();
  for (std::size_t i = 0; i < keys.size(); ++i) index_.emplace(keys[i], static_cast<long>(i));
}

std::string FlagBasis::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a(h, std::to_string(m) + "|" + type_key(sigma) + "|");
  for (const auto& k : keys) {
    h = fnv1a(h, k);
    h = fnv1a(h, "|");
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace {

struct Child {
  CanonicalKey key;
  Flag flag;
};

// All children of one parent that pass the canonical deletion test,
// deduplicated by key.
std::vector<Child> augment(const Theory& theory, const Flag& parent) {
  const int j = parent.order();
  const int k = parent.roots;
  const int r = theory.r;
  int max_color = 1;
  for (int v = k; v < j; ++v) max_color = std::max(max_color, parent.colors[static_cast<std::size_t>(v)]);
  std::vector<Subset> candidates = all_subsets(j, r - 1);
  std::vector<Child> out;
  std::unordered_map<CanonicalKey, bool> seen;

  Hypergraph base = parent.graph.with_extra_vertices(1);
  for (int c = max_color; c <= theory.colors; ++c) {
    Flag child{base, parent.colors, k};
    child.colors.push_back(c);
    std::vector<int> classes = flag_classes(child);
    const int special = k + theory.colors + 1;

    auto accept = [&]() {
      auto form = canonical_form(child.graph, classes);
      Vertex d = k;
      for (Vertex v = k; v <= j; ++v)
        if (form.relabeling[static_cast<std::size_t>(v)] > form.relabeling[static_cast<std::size_t>(d)]) d = v;
      if (d != j) {
        auto cj = classes, cd = classes;
        cj[static_cast<std::size_t>(j)] = special;
        cd[static_cast<std::size_t>(d)] = special;
        if (canonical_key(child.graph, cj) != canonical_key(child.graph, cd)) return;
      }
      auto key = key_with_roots(child, form, classes);
      if (seen.emplace(key, true).second) out.push_back({std::move(key), child});
    };

    // include/exclude each candidate link set; a copy of a forbidden graph
    // through the new edge rules out every superset
    auto dfs = [&](auto&& self, std::size_t i) -> void {
      if (i == candidates.size()) {
        accept();
        return;
      }
      self(self, i + 1);
      Subset e = candidates[i].with(j);
      child.graph.add_edge(e);
      bool ok = true;
      for (const auto& f : theory.family.members())
        if (contains_subgraph_through_edge(child.graph, f, e)) {
          ok = false;
          break;
        }
      if (ok) self(self, i + 1);
      child.graph.remove_edge(e);
    };
    dfs(dfs, 0);
  }
  return out;
}

}  // namespace

BasisPtr enumerate_flags(const Theory& theory, int m, const TypeSigma& sigma, int threads) {
  const int k = sigma.size();
  if (sigma.graph.uniformity() != theory.r && k > 0) throw InputError("type uniformity differs from theory");
  check_colors(sigma.colors, k, theory.colors);
  if (m < k) throw InputError("m must be at least the type size");
  if (m > 8) throw InputError("flag enumeration is limited to m <= 8");
  Hypergraph sg = k > 0 ? sigma.graph : Hypergraph(theory.r, 0);
  if (!is_free(sg, theory.family)) throw InputError("type is not family-free");

  std::vector<Flag> level{Flag{sg, sigma.colors, k}};
  for (int j = k; j < m; ++j) {
    std::vector<std::vector<Child>> found(level.size());
    run_parallel(level.size(), threads, [&](std::size_t i) { found[i] = augment(theory, level[i]); });
    std::vector<Flag> next;
    for (auto& f : found)
      for (auto& c : f) next.push_back(std::move(c.flag));
    level = std::move(next);
  }

  auto basis = std::make_shared<FlagBasis>();
  basis->theory = theory;
  basis->sigma = TypeSigma{sg, sigma.colors};
  basis->m = m;
  std::vector<std::pair<CanonicalKey, Flag>> items;
  items.reserve(level.size());
  for (auto& f : level) {
    Flag c = canonical_flag(f);
    items.emplace_back(flag_key(c), std::move(c));
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [key, f] : items) {
    basis->keys.push_back(key);
    basis->flags.push_back(std::move(f));
  }
  basis->build_index();
  return basis;
}

BasisPtr cached_basis(const Theory& theory, int m, const TypeSigma& sigma, int threads) {
  static std::mutex mutex;
  static std::map<std::string, BasisPtr> cache;
  std::string key = theory.id() + "|" + std::to_string(m) + "|" + hex_bytes(type_key(sigma));
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto basis = enumerate_flags(theory, m, sigma, threads);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, basis).first->second;
}

void write_basis(std::ostream& out, const FlagBasis& basis) {
  out << "# count=" << basis.size() << " digest=" << basis.digest() << "\n";
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Flag& f = basis.flags[i];
    HypergraphDocument doc{f.graph, f.colors, {}, f.roots};
    out << "# flag " << i << "\n";
    write_document(out, doc);
    out << "\n";
  }
}

DensityVector::DensityVector(BasisPtr b) : basis(std::move(b)), coeffs(basis->size(), Rational(0)) {}

DensityVector& DensityVector::operator+=(const DensityVector& other) {
  if (basis != other.basis) throw DimensionError("density vectors live over different bases");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += other.coeffs[i];
  return *this;
}

DensityVector& DensityVector::operator-=(const DensityVector& other) {
  if (basis != other.basis) throw DimensionError("density vectors live over different bases");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= other.coeffs[i];
  return *this;
}

DensityVector& DensityVector::operator*=(const Rational& s) {
  for (auto& c : coeffs) c *= s;
  return *this;
}

bool DensityVector::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& q) { return q == 0; });
}

DensityVector operator+(DensityVector a, const DensityVector& b) { return a += b; }
DensityVector operator-(DensityVector a, const DensityVector& b) { return a -= b; }
DensityVector operator*(const Rational& s, DensityVector v) { return v *= s; }

DensityVector indicator(const BasisPtr& basis, long index) {
  DensityVector v(basis);
  if (index < 0 || index >= static_cast<long>(basis->size())) throw InputError("flag index out of range");
  v.coeffs[static_cast<std::size_t>(index)] = 1;
  return v;
}

SubflagIndexer::SubflagIndexer(BasisPtr basis) : basis_(std::move(basis)) {}

long SubflagIndexer::index(const Hypergraph& g, const std::vector<int>& colors, const std::vector<Vertex>& vertices) {
  const int s = static_cast<int>(vertices.size());
  const int r = g.uniformity();
  // raw code: colors (4 bits each), one bit per r-subset of positions, and
  // the size in the top four bits
  const long bits = 4L * s + (r == 2 ? s * (s - 1) / 2 : s * (s - 1) * (s - 2) / 6);
  const bool small = bits <= 60;
  std::uint64_t code = small ? static_cast<std::uint64_t>(s) << 60 : 0;
  std::string raw(1, static_cast<char>(s));
  int bit = 0;
  auto push = [&](std::uint64_t value, int width) {
    if (small) {
      code |= value << bit;
      bit += width;
    } else {
      raw.push_back(static_cast<char>(value));
    }
  };
  for (Vertex v : vertices) push(static_cast<std::uint64_t>(colors.empty() ? 1 : colors[static_cast<std::size_t>(v)]), 4);
  std::array<Vertex, 3> buf{};
  for_each_combination(s, r, [&](const std::vector<int>& pos) {
    for (int i = 0; i < r; ++i) buf[static_cast<std::size_t>(i)] = vertices[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
    push(g.has_edge(Subset::of(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(r)))) ? 1 : 0, 1);
  });
  if (small) {
    auto it = small_.find(code);
    if (it != small_.end()) return it->second;
  } else {
    auto it = large_.find(raw);
    if (it != large_.end()) return it->second;
  }
  Flag f;
  f.graph = g.induced(vertices);
  f.roots = basis_->sigma.size();
  for (Vertex v : vertices) f.colors.push_back(colors.empty() ? 1 : colors[static_cast<std::size_t>(v)]);
  long idx = -1;
  if (f.order() == basis_->m) idx = basis_->index_of(f);
  if (small)
    small_.emplace(code, idx);
  else
    large_.emplace(raw, idx);
  return idx;
}

namespace {

void require_same_type(const Flag& a, const Flag& b) {
  if (a.roots != b.roots || !same_type(a.type(), b.type())) throw InputError("flags have different types");
  if (a.graph.uniformity() != b.graph.uniformity()) throw InputError("flags have different uniformity");
}

std::vector<Vertex> range(int from, int to) {
  std::vector<Vertex> v;
  for (int i = from; i < to; ++i) v.push_back(i);
  return v;
}

}  // namespace

Rational flag_density(const Flag& f, const Flag& g) {
  require_same_type(f, g);
  if (f.order() > g.order()) throw InputError("flag is larger than host");
  const int k = f.roots;
  const int free = g.order() - k, need = f.order() - k;
  CanonicalKey target = flag_key(f);
  long hits = 0;
  std::vector<Vertex> verts = range(0, k);
  for_each_combination(free, need, [&](const std::vector<int>& pick) {
    verts.resize(static_cast<std::size_t>(k));
    for (int p : pick) verts.push_back(k + p);
    Flag sub{g.graph.induced(verts), {}, k};
    for (Vertex v : verts) sub.colors.push_back(g.colors[static_cast<std::size_t>(v)]);
    if (flag_key(sub) == target) ++hits;
  });
  Rational q(Integer(hits), binomial(free, need));
  q.canonicalize();
  return q;
}

DensityVector product_expand(const Flag& f1, const Flag& f2, const BasisPtr& basis) {
  require_same_type(f1, f2);
  const int k = f1.roots;
  if (k != basis->sigma.size() || !same_type(f1.type(), basis->sigma)) throw InputError("flags do not match the basis type");
  const int a = f1.order() - k, b = f2.order() - k;
  const int free = basis->m - k;
  if (a + b > free) throw InputError("product does not fit into the basis size");
  CanonicalKey k1 = flag_key(f1), k2 = flag_key(f2);
  Integer splits = binomial(free, a) * binomial(free - a, b);
  DensityVector out(basis);
  for (std::size_t gi = 0; gi < basis->size(); ++gi) {
    const Flag& g = basis->flags[gi];
    long hits = 0;
    std::vector<Vertex> va = range(0, k);
    for_each_combination(free, a, [&](const std::vector<int>& pa) {
      va.resize(static_cast<std::size_t>(k));
      std::vector<bool> used(static_cast<std::size_t>(free), false);
      for (int p : pa) {
        va.push_back(k + p);
        used[static_cast<std::size_t>(p)] = true;
      }
      Flag sa{g.graph.induced(va), {}, k};
      for (Vertex v : va) sa.colors.push_back(g.colors[static_cast<std::size_t>(v)]);
      if (flag_key(sa) != k1) return;
      std::vector<int> rest;
      for (int p = 0; p < free; ++p)
        if (!used[static_cast<std::size_t>(p)]) rest.push_back(p);
      std::vector<Vertex> vb = range(0, k);
      for_each_combination(static_cast<int>(rest.size()), b, [&](const std::vector<int>& pb) {
        vb.resize(static_cast<std::size_t>(k));
        for (int p : pb) vb.push_back(k + rest[static_cast<std::size_t>(p)]);
        Flag sb{g.graph.induced(vb), {}, k};
        for (Vertex v : vb) sb.colors.push_back(g.colors[static_cast<std::size_t>(v)]);
        if (flag_key(sb) == k2) ++hits;
      });
    });
    Rational q(Integer(hits), splits);
    q.canonicalize();
    out.coeffs[gi] = q;
  }
  return out;
}

DensityVector lift(const DensityVector& v, const BasisPtr& target) {
  const auto& src = *v.basis;
  if (target->theory.id() != src.theory.id()) throw InputError("bases belong to different theories");
  if (!same_type(src.sigma, target->sigma)) throw InputError("bases have different types");
  if (target->m < src.m) throw InputError("cannot lift to a smaller basis");
  const int k = src.sigma.size();
  const int free = target->m - k, need = src.m - k;
  Integer total = binomial(free, need);
  SubflagIndexer indexer(v.basis);
  DensityVector out(target);
  for (std::size_t gi = 0; gi < target->size(); ++gi) {
    const Flag& g = target->flags[gi];
    Rational sum = 0;
    std::vector<Vertex> verts = range(0, k);
    for_each_combination(free, need, [&](const std::vector<int>& pick) {
      verts.resize(static_cast<std::size_t>(k));
      for (int p : pick) verts.push_back(k + p);
      long idx = indexer.index(g.graph, g.colors, verts);
      if (idx < 0) throw InputError("induced subflag missing from basis");
      sum += v.coeffs[static_cast<std::size_t>(idx)];
    });
    sum /= Rational(total);
    sum.canonicalize();
    out.coeffs[gi] = sum;
  }
  return out;
}

DensityVector lift(const Flag& f, const BasisPtr& target) {
  auto small = cached_basis(target->theory, f.order(), f.type());
  long idx = small->index_of(f);
  if (idx < 0) throw InputError("flag is not in its theory (not family-free or bad colors)");
  return lift(indicator(small, idx), target);
}

Integer placement_count(int m, int k) {
  Integer p = 1;
  for (int i = 0; i < k; ++i) p *= m - i;
  return p;
}

namespace {

bool realizes(const Flag& g, const std::vector<Vertex>& placed, const TypeSigma& sigma) {
  const int k = sigma.size();
  for (int i = 0; i < k; ++i)
    if (g.colors[static_cast<std::size_t>(placed[static_cast<std::size_t>(i)])] != sigma.colors[static_cast<std::size_t>(i)])
      return false;
  const int r = g.graph.uniformity();
  bool ok = true;
  std::array<Vertex, 3> buf{};
  for_each_combination(k, r, [&](const std::vector<int>& pos) {
    if (!ok) return;
    for (int i = 0; i < r; ++i) buf[static_cast<std::size_t>(i)] = placed[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
    bool in_g = g.graph.has_edge(Subset::of(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(r))));
    std::array<Vertex, 3> lab{};
    for (int i = 0; i < r; ++i) lab[static_cast<std::size_t>(i)] = pos[static_cast<std::size_t>(i)];
    bool in_s = sigma.graph.has_edge(Subset::of(std::span<const Vertex>(lab.data(), static_cast<std::size_t>(r))));
    if (in_g != in_s) ok = false;
  });
  return ok;
}

// Visits every injective k-tuple of vertices of an m-vertex flag that realizes
// sigma, passing the tuple followed by the remaining vertices in increasing order.
template <typename Visit>
void for_each_placement(const Flag& g, const TypeSigma& sigma, Visit&& visit) {
  const int m = g.order(), k = sigma.size();
  std::vector<Vertex> placed;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(placed.size()) == k) {
      if (!realizes(g, placed, sigma)) return;
      std::vector<Vertex> order = placed;
      for (Vertex v = 0; v < m; ++v)
        if (!used[static_cast<std::size_t>(v)]) order.push_back(v);
      visit(order);
      return;
    }
    for (Vertex v = 0; v < m; ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = true;
      placed.push_back(v);
      self(self);
      placed.pop_back();
      used[static_cast<std::size_t>(v)] = false;
    }
  };
  rec(rec);
}

void require_untyped_partner(const FlagBasis& typed, const FlagBasis& untyped) {
  if (untyped.sigma.size() != 0) throw InputError("target basis must be untyped");
  if (typed.theory.id() != untyped.theory.id()) throw InputError("bases belong to different theories");
}

}  // namespace

DensityVector downward(const DensityVector& f, const BasisPtr& untyped) {
  const auto& typed = *f.basis;
  require_untyped_partner(typed, *untyped);
  if (typed.m != untyped->m) throw InputError("typed and untyped bases differ in m");
  const int m = typed.m, k = typed.sigma.size();
  Integer total = placement_count(m, k);
  SubflagIndexer indexer(f.basis);
  DensityVector out(untyped);
  for (std::size_t gi = 0; gi < untyped->size(); ++gi) {
    const Flag& g = untyped->flags[gi];
    Rational sum = 0;
    for_each_placement(g, typed.sigma, [&](const std::vector<Vertex>& order) {
      long idx = indexer.index(g.graph, g.colors, order);
      if (idx < 0) throw InputError("typed flag missing from basis");
      sum += f.coeffs[static_cast<std::size_t>(idx)];
    });
    sum /= Rational(total);
    sum.canonicalize();
    out.coeffs[gi] = sum;
  }
  return out;
}

AveragedProducts averaged_products(const BasisPtr& typed, const BasisPtr& untyped, int threads) {
  require_untyped_partner(*typed, *untyped);
  const int m = untyped->m, k = typed->sigma.size(), s = typed->m;
  const int a = s - k;
  if (2 * a > m - k) throw InputError("typed flags too large for the untyped basis");
  Integer denom = placement_count(m, k) * binomial(m - k, a) * binomial(m - k - a, a);
  AveragedProducts out;
  out.typed = typed;
  out.untyped = untyped;
  out.per_flag.resize(untyped->size());
  const std::size_t count = untyped->size();
  const int workers = std::max(1, threads);
  std::vector<std::unique_ptr<SubflagIndexer>> indexers;
  for (int t = 0; t < workers; ++t) indexers.push_back(std::make_unique<SubflagIndexer>(typed));
  std::atomic<std::size_t> next{0};
  auto work = [&](int t) {
    SubflagIndexer& indexer = *indexers[static_cast<std::size_t>(t)];
    for (std::size_t gi = next++; gi < count; gi = next++) {
      const Flag& g = untyped->flags[gi];
      std::map<std::pair<int, int>, long> counts;
      for_each_placement(g, typed->sigma, [&](const std::vector<Vertex>& order) {
        const int free = m - k;
        std::vector<Vertex> va(order.begin(), order.begin() + k), vb = va;
        for_each_combination(free, a, [&](const std::vector<int>& pa) {
          va.resize(static_cast<std::size_t>(k));
          std::vector<bool> used(static_cast<std::size_t>(free), false);
          for (int p : pa) {
            va.push_back(order[static_cast<std::size_t>(k + p)]);
            used[static_cast<std::size_t>(p)] = true;
          }
          long ia = indexer.index(g.graph, g.colors, va);
          std::vector<int> rest;
          for (int p = 0; p < free; ++p)
            if (!used[static_cast<std::size_t>(p)]) rest.push_back(p);
          for_each_combination(static_cast<int>(rest.size()), a, [&](const std::vector<int>& pb) {
            vb.resize(static_cast<std::size_t>(k));
            for (int p : pb) vb.push_back(order[static_cast<std::size_t>(k + rest[static_cast<std::size_t>(p)])]);
            long ib = indexer.index(g.graph, g.colors, vb);
            if (ia < 0 || ib < 0) throw InputError("typed flag missing from basis");
            if (ia <= ib) ++counts[{static_cast<int>(ia), static_cast<int>(ib)}];
          });
        });
      });
      auto& dst = out.per_flag[gi];
      for (const auto& [ab, c] : counts) {
        Rational q(Integer(c), denom);
        q.canonicalize();
        dst.emplace(ab, q);
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  return out;
}

namespace {

std::string color_name(std::vector<int> colors) {
  std::sort(colors.begin(), colors.end());
  std::string s;
  for (int c : colors) s += static_cast<char>('0' + c);
  return s;
}

// A two-edge flag contains a bad edge: an edge whose colors are {i, i, j}, i != j.
bool has_bad_edge(const Flag& f) {
  for (const auto& e : f.graph.edges()) {
    int a = f.colors[static_cast<std::size_t>(e[0])], b = f.colors[static_cast<std::size_t>(e[1])],
        c = f.colors[static_cast<std::size_t>(e[2])];
    bool all_same = a == b && b == c, all_diff = a != b && b != c && a != c;
    if (!all_same && !all_diff) return true;
  }
  return false;
}

bool uses_all_three(const Flag& f) {
  bool seen[4] = {false, false, false, false};
  for (int c : f.colors) seen[c] = true;
  return seen[1] && seen[2] && seen[3];
}

bool transversal_edge(const Flag& f, const Subset& e) {
  int a = f.colors[static_cast<std::size_t>(e[0])], b = f.colors[static_cast<std::size_t>(e[1])],
      c = f.colors[static_cast<std::size_t>(e[2])];
  return a != b && b != c && a != c;
}

}  // namespace

NamedFlags named_flags(const Theory& theory, int m, int threads) {
  if (theory.r != 3 || theory.colors != 3) throw InputError("named flags need the 3-colored 3-graph theory");
  if (m < 3) throw InputError("named flags need m >= 3");
  NamedFlags out;
  auto target = cached_basis(theory, m, TypeSigma::empty(3), threads);

  auto b1 = cached_basis(theory, 1, TypeSigma::empty(3), threads);
  for (std::size_t i = 0; i < b1->size(); ++i)
    out.untyped["V" + std::to_string(b1->flags[i].colors[0])] = lift(indicator(b1, static_cast<long>(i)), target);

  auto b3 = cached_basis(theory, 3, TypeSigma::empty(3), threads);
  for (std::size_t i = 0; i < b3->size(); ++i) {
    const Flag& f = b3->flags[i];
    std::string name = (f.graph.size() ? "E" : "Ebar") + color_name(f.colors);
    out.untyped[name] = lift(indicator(b3, static_cast<long>(i)), target);
  }

  if (m >= 4) {
    auto b4 = cached_basis(theory, 4, TypeSigma::empty(3), threads);
    DensityVector s(b4), sb(b4), sm(b4);
    for (std::size_t i = 0; i < b4->size(); ++i) {
      const Flag& f = b4->flags[i];
      if (f.graph.size() == 2) {
        s.coeffs[i] = 1;
        if (has_bad_edge(f)) sb.coeffs[i] = 1;
      }
      if (uses_all_three(f) && f.graph.size() <= 1 &&
          (f.graph.size() == 0 || transversal_edge(f, f.graph.edges()[0])))
        sm.coeffs[i] = 1;
    }
    out.untyped["S"] = lift(s, target);
    out.untyped["Sb"] = lift(sb, target);
    out.untyped["Sm"] = lift(sm, target);
  }

  for (int i = 1; i <= 3; ++i) {
    TypeSigma root = TypeSigma::vertex(3, i);
    auto typed_m = cached_basis(theory, m, root, threads);
    for (int a = 1; a <= 3; ++a)
      for (int b = a; b <= 3; ++b) {
        Flag k{Hypergraph(3, 3, std::vector<Subset>{{0, 1, 2}}), {i, a, b}, 1};
        out.typed["K" + std::to_string(i) + "_" + std::to_string(a) + std::to_string(b)] = lift(k, typed_m);
      }
  }
  return out;
}

}  // namespace flagforge
