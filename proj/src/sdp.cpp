#include "flagforge/sdp.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flagforge/errors.hpp"
#include "flagforge/hypergraph_ops.hpp"

namespace flagforge {

namespace {

const std::vector<std::string> kGroups{"localmax", "b-vs-m", "turan", "maxcut", "partsize", "s2"};

bool colored_theory(const Theory& t) { return t.r == 3 && t.colors == 3; }

DensityVector ones(const BasisPtr& b) {
  DensityVector v(b);
  for (auto& c : v.coeffs) c = 1;
  return v;
}

}  // namespace

std::vector<std::string> constraint_groups() { return kGroups; }

AssemblyConfig parse_assembly_config(const std::string& text) {
  AssemblyConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    const auto& v = it.value();
    if (key == "types") {
      if (!v.is_array()) throw ParseError("config: types must be an array of sizes");
      c.default_types = false;
      for (const auto& x : v) {
        if (!x.is_number_integer()) throw ParseError("config: type sizes must be integers");
        c.type_sizes.push_back(x.get<int>());
      }
    } else if (key == "constraints") {
      if (!v.is_array()) throw ParseError("config: constraints must be an array of group names");
      c.default_constraints = false;
      for (const auto& x : v) {
        if (!x.is_string()) throw ParseError("config: constraint groups must be strings");
        auto g = x.get<std::string>();
        if (std::find(kGroups.begin(), kGroups.end(), g) == kGroups.end())
          throw ParseError("config: unknown constraint group '" + g + "'");
        c.constraint_groups.push_back(g);
      }
    } else if (key == "multiplier_size") {
      if (!v.is_object()) throw ParseError("config: multiplier_size must be an object");
      for (auto m = v.begin(); m != v.end(); ++m) {
        if (std::find(kGroups.begin(), kGroups.end(), m.key()) == kGroups.end())
          throw ParseError("config: unknown constraint group '" + m.key() + "'");
        if (!m.value().is_number_integer()) throw ParseError("config: multiplier sizes must be integers");
        c.multiplier_size[m.key()] = m.value().get<int>();
      }
    } else if (key == "threads") {
      if (!v.is_number_integer()) throw ParseError("config: threads must be an integer");
      c.threads = v.get<int>();
    } else {
      throw ParseError("config: unknown key '" + key + "'");
    }
  }
  return c;
}

std::string type_name(const TypeSigma& sigma) {
  std::ostringstream out;
  out << "t" << sigma.size();
  if (sigma.size() > 0) {
    out << "c";
    for (int c : sigma.colors) out << c;
    if (sigma.graph.size() > 0) {
      out << "e";
      bool first = true;
      for (const auto& e : sigma.graph.edges()) {
        if (!first) out << ".";
        out << e.rank();
        first = false;
      }
    }
  }
  return out.str();
}

std::vector<std::vector<int>> type_automorphisms(const TypeSigma& sigma) {
  const int k = sigma.size();
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      ok = sigma.colors[static_cast<std::size_t>(i)] == sigma.colors[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    if (ok && k > 0) ok = sigma.graph.relabeled(perm) == sigma.graph;
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

SymmetrySplit symmetry_split(const FlagBasis& typed) {
  const int k = typed.sigma.size();
  const std::size_t n = typed.size();
  auto autos = type_automorphisms(typed.sigma);
  // orbit representative per flag via union over generators (the full group)
  std::vector<int> orbit(n, -1);
  std::vector<std::vector<int>> orbits;
  for (std::size_t a = 0; a < n; ++a) {
    if (orbit[a] >= 0) continue;
    std::set<int> members;
    for (const auto& p : autos) {
      const Flag& f = typed.flags[a];
      std::vector<int> full(static_cast<std::size_t>(f.order()));
      std::iota(full.begin(), full.end(), 0);
      for (int i = 0; i < k; ++i) full[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)];
      Flag g{f.graph.relabeled(full), f.colors, k};
      for (int v = 0; v < f.order(); ++v) g.colors[static_cast<std::size_t>(full[static_cast<std::size_t>(v)])] = f.colors[static_cast<std::size_t>(v)];
      long idx = typed.index_of(g);
      if (idx < 0) throw InputError("type automorphism leaves the basis");
      members.insert(static_cast<int>(idx));
    }
    int id = static_cast<int>(orbits.size());
    orbits.emplace_back(members.begin(), members.end());
    for (int x : members) orbit[static_cast<std::size_t>(x)] = id;
  }
  SymmetrySplit s;
  std::size_t anti_dim = n - orbits.size();
  s.invariant.assign(n, std::vector<Rational>(orbits.size(), Rational(0)));
  s.anti.assign(n, std::vector<Rational>(anti_dim, Rational(0)));
  std::size_t col = 0;
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    for (int x : orbits[o]) s.invariant[static_cast<std::size_t>(x)][o] = 1;
    for (std::size_t j = 1; j < orbits[o].size(); ++j) {
      s.anti[static_cast<std::size_t>(orbits[o][0])][col] = 1;
      s.anti[static_cast<std::size_t>(orbits[o][j])][col] = -1;
      ++col;
    }
  }
  return s;
}

namespace {

std::vector<std::vector<SparseEntry>> transform(const AveragedProducts& ap, const RationalMatrix& w) {
  const std::size_t n = w.size();
  std::vector<std::vector<std::pair<int, Rational>>> nz(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < w[a].size(); ++i)
      if (w[a][i] != 0) nz[a].emplace_back(static_cast<int>(i), w[a][i]);
  std::vector<std::vector<SparseEntry>> out(ap.per_flag.size());
  for (std::size_t g = 0; g < ap.per_flag.size(); ++g) {
    std::map<std::pair<int, int>, Rational> t;
    auto add = [&](int a, int b, const Rational& val) {
      for (const auto& [i, wi] : nz[static_cast<std::size_t>(a)])
        for (const auto& [j, wj] : nz[static_cast<std::size_t>(b)]) {
          if (i > j) continue;
          t[{i, j}] += wi * val * wj;
        }
    };
    for (const auto& [ab, val] : ap.per_flag[g]) {
      add(ab.first, ab.second, val);
      if (ab.first != ab.second) add(ab.second, ab.first, val);
    }
    for (auto& [ij, v] : t) {
      v.canonicalize();
      if (v != 0) out[g].push_back({ij.first, ij.second, v});
    }
  }
  return out;
}

std::vector<TypeSigma> types_of_size(const Theory& theory, int k, int threads) {
  auto b = cached_basis(theory, k, TypeSigma::empty(theory.r), threads);
  std::vector<TypeSigma> out;
  for (const auto& f : b->flags) out.push_back(TypeSigma{f.graph, f.colors});
  return out;
}

// Columns a_M (over F_m^sigma) of g * M for every flag M of size h.
std::vector<std::vector<std::pair<int, Rational>>> typed_products(const DensityVector& g, const BasisPtr& mult,
                                                                   const BasisPtr& target) {
  const int k = target->sigma.size(), m = target->m;
  const int a = g.basis->m - k, b = mult->m - k;
  if (a + b > m - k) throw InputError("constraint product does not fit into m vertices");
  Integer splits = binomial(m - k, a) * binomial(m - k - a, b);
  SubflagIndexer ia(g.basis), ib(mult);
  std::vector<std::map<int, Rational>> acc(mult->size());
  for (std::size_t gi = 0; gi < target->size(); ++gi) {
    const Flag& host = target->flags[gi];
    std::vector<Vertex> va(static_cast<std::size_t>(k)), vb;
    std::iota(va.begin(), va.end(), 0);
    for_each_combination(m - k, a, [&](const std::vector<int>& pa) {
      va.resize(static_cast<std::size_t>(k));
      std::vector<bool> used(static_cast<std::size_t>(m - k), false);
      for (int p : pa) {
        va.push_back(k + p);
        used[static_cast<std::size_t>(p)] = true;
      }
      long x = ia.index(host.graph, host.colors, va);
      if (x < 0) throw InputError("constraint flag missing from basis");
      const Rational& gx = g.coeffs[static_cast<std::size_t>(x)];
      if (gx == 0) return;
      std::vector<int> rest;
      for (int p = 0; p < m - k; ++p)
        if (!used[static_cast<std::size_t>(p)]) rest.push_back(p);
      for_each_combination(static_cast<int>(rest.size()), b, [&](const std::vector<int>& pb) {
        vb.assign(va.begin(), va.begin() + k);
        for (int p : pb) vb.push_back(k + rest[static_cast<std::size_t>(p)]);
        long y = ib.index(host.graph, host.colors, vb);
        if (y < 0) throw InputError("multiplier flag missing from basis");
        acc[static_cast<std::size_t>(y)][static_cast<int>(gi)] += gx;
      });
    });
  }
  std::vector<std::vector<std::pair<int, Rational>>> out(mult->size());
  for (std::size_t y = 0; y < mult->size(); ++y)
    for (auto& [gi, v] : acc[y]) {
      Rational q = v / Rational(splits);
      q.canonicalize();
      if (q != 0) out[y].emplace_back(gi, q);
    }
  return out;
}

// Averages several typed sparse columns down to F_m^0 in one pass.
std::vector<SparseVector> downward_columns(const std::vector<std::vector<std::pair<int, Rational>>>& cols,
                                           const BasisPtr& typed, const BasisPtr& untyped) {
  if (typed->sigma.size() == 0) return cols;
  // typed flag -> list of (column, value)
  std::vector<std::vector<std::pair<int, Rational>>> by_flag(typed->size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (const auto& [f, v] : cols[c]) by_flag[static_cast<std::size_t>(f)].emplace_back(static_cast<int>(c), v);
  std::vector<std::map<int, Rational>> acc(cols.size());
  for (std::size_t t = 0; t < typed->size(); ++t) {
    if (by_flag[t].empty()) continue;
    DensityVector ind = indicator(typed, static_cast<long>(t));
    DensityVector down = downward(ind, untyped);
    for (std::size_t gi = 0; gi < down.coeffs.size(); ++gi) {
      if (down.coeffs[gi] == 0) continue;
      for (const auto& [c, v] : by_flag[t]) acc[static_cast<std::size_t>(c)][static_cast<int>(gi)] += v * down.coeffs[gi];
    }
  }
  std::vector<SparseVector> out(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (auto& [gi, v] : acc[c]) {
      v.canonicalize();
      if (v != 0) out[c].emplace_back(gi, v);
    }
  return out;
}

struct Catalog {
  std::vector<ConstraintSpec> items;
};

std::string three(int a, int b, int c) {
  std::vector<int> v{a, b, c};
  std::sort(v.begin(), v.end());
  return std::to_string(v[0]) + std::to_string(v[1]) + std::to_string(v[2]);
}

int wrap(int i) { return (i - 1) % 3 + 1; }

Catalog build_catalog(const Theory& theory, int threads) {
  Catalog cat;
  auto nf3 = named_flags(theory, 3, threads);
  auto b1 = cached_basis(theory, 1, TypeSigma::empty(3), threads);
  auto v1 = named_flags(theory, 3, threads);
  const auto& u = nf3.untyped;
  auto b3 = u.at("E123").basis;

  // V_i over F_1^0
  auto vi = [&](int i) {
    DensityVector v(b1);
    for (std::size_t x = 0; x < b1->size(); ++x) v.coeffs[x] = b1->flags[x].colors[0] == i ? 1 : 0;
    return v;
  };
  for (int i = 1; i <= 3; ++i) {
    int a = wrap(i + 1), b = wrap(i + 2);
    auto big = nf3.typed.at("K" + std::to_string(i) + "_" + std::to_string(std::min(a, b)) + std::to_string(std::max(a, b)));
    auto k_ii1 = nf3.typed.at("K" + std::to_string(i) + "_" + std::to_string(std::min(i, a)) + std::to_string(std::max(i, a)));
    auto k_ii2 = nf3.typed.at("K" + std::to_string(i) + "_" + std::to_string(std::min(i, b)) + std::to_string(std::max(i, b)));
    cat.items.push_back({"localmax." + std::to_string(i) + ".a", "localmax",
                         "K^" + std::to_string(i) + "_{" + std::to_string(a) + std::to_string(b) + "} - K^" +
                             std::to_string(i) + "_{" + std::to_string(i) + std::to_string(a) + "} >= 0",
                         big - k_ii1, 0});
    cat.items.push_back({"localmax." + std::to_string(i) + ".b", "localmax",
                         "K^" + std::to_string(i) + "_{" + std::to_string(a) + std::to_string(b) + "} - K^" +
                             std::to_string(i) + "_{" + std::to_string(i) + std::to_string(b) + "} >= 0",
                         big - k_ii2, 0});
  }
  {
    DensityVector bad(b3);
    for (int i = 1; i <= 3; ++i) {
      bad += u.at("E" + three(i, i, wrap(i + 1)));
      bad += u.at("E" + three(i, i, wrap(i + 2)));
    }
    DensityVector g = Rational(3, 4) * u.at("Ebar123") - bad;
    cat.items.push_back({"b-vs-m", "b-vs-m", "sum_i (E_{i,i,i+1} + E_{i,i,i+2}) - 3/4 Ebar_{123} <= 0", g, 0});
  }
  {
    DensityVector all_e(b3);
    for (const auto& [name, v] : u)
      if (name.size() == 4 && name[0] == 'E') all_e += v;
    cat.items.push_back({"turan.all", "turan", "sum E_{ijk} <= 1/4", Rational(1, 4) * ones(b3) - all_e, 0});
    for (int i = 1; i <= 3; ++i) {
      auto s = std::to_string(i);
      cat.items.push_back({"turan." + s, "turan", "3 E_{iii} - Ebar_{iii} <= 0 for i = " + s,
                           u.at("Ebar" + s + s + s) - Rational(3) * u.at("E" + s + s + s), 0});
    }
  }
  cat.items.push_back({"maxcut", "maxcut", "E_{123} >= 0.198", u.at("E123") - make_rational(198, 1000) * ones(b3), 0});
  for (int i = 1; i <= 3; ++i) {
    auto s = std::to_string(i);
    cat.items.push_back({"partsize.lo." + s, "partsize", "V_" + s + " >= 1/5", vi(i) - Rational(1, 5) * ones(b1), 0});
    cat.items.push_back({"partsize.hi." + s, "partsize", "V_" + s + " <= 1/2", Rational(1, 2) * ones(b1) - vi(i), 0});
  }
  {
    auto nf4 = named_flags(theory, 4, threads);
    const auto& s = nf4.untyped.at("S");
    cat.items.push_back({"s2", "s2", "S >= 6/13 - 10^-6", s - (Rational(6, 13) - make_rational(1, 1000000)) * ones(s.basis), 0});
  }
  (void)v1;
  return cat;
}

DensityVector objective_vector(const Theory& theory, int m, const std::string& name, const BasisPtr& basis,
                               const DensityVector* custom, int threads) {
  if (name == "prop34") {
    if (!colored_theory(theory)) throw InputError("prop34 objective needs the 3-colored 3-graph theory");
    if (m < 4) throw InputError("prop34 objective needs m >= 4");
    auto nf = named_flags(theory, m, threads);
    return nf.untyped.at("Sb") - Rational(9, 10) * nf.untyped.at("Sm");
  }
  if (name == "edge-density") {
    if (m < theory.r) throw InputError("edge density needs m >= r");
    auto small = cached_basis(theory, theory.r, TypeSigma::empty(theory.r), threads);
    DensityVector v(small);
    for (std::size_t i = 0; i < small->size(); ++i) v.coeffs[i] = small->flags[i].graph.size() ? 1 : 0;
    return lift(v, basis);
  }
  if (name == "s2-density") {
    if (theory.r != 3 || m < 4) throw InputError("S2 density needs a 3-graph theory and m >= 4");
    auto small = cached_basis(theory, 4, TypeSigma::empty(3), threads);
    DensityVector v(small);
    for (std::size_t i = 0; i < small->size(); ++i) v.coeffs[i] = binomial(static_cast<long>(small->flags[i].graph.size()), 2);
    return lift(v, basis);
  }
  if (name == "constant") return ones(basis);
  if (name == "custom") {
    if (!custom) throw InputError("custom objective needs a vector");
    if (custom->basis->digest() != basis->digest()) throw InputError("custom objective is over a different basis");
    DensityVector v(basis);
    v.coeffs = custom->coeffs;
    return v;
  }
  throw InputError("unknown objective '" + name + "' (prop34, edge-density, s2-density, constant, custom)");
}

}  // namespace

SdpProblem assemble_program(const Theory& theory, int m, const std::string& objective, const AssemblyConfig& config,
                            const DensityVector* custom) {
  if (m < 1 || m > 6) throw InputError("assembly supports 1 <= m <= 6");
  const int threads = std::max(1, config.threads);
  SdpProblem p;
  p.theory = theory;
  p.m = m;
  p.basis = cached_basis(theory, m, TypeSigma::empty(theory.r), threads);
  p.objective_name = objective;
  p.objective = objective_vector(theory, m, objective, p.basis, custom, threads);

  std::vector<int> sizes = config.type_sizes;
  if (config.default_types) {
    sizes.clear();
    for (int k = m % 2; k <= m - 2; k += 2) sizes.push_back(k);
  }
  p.type_sizes = sizes;
  for (int k : sizes) {
    if (k < 0 || k > m - 2 || (m - k) % 2 != 0)
      throw InputError("type size " + std::to_string(k) + " must satisfy 0 <= k <= m-2 and k = m mod 2");
    const int s = (m + k) / 2;
    for (const auto& sigma : types_of_size(theory, k, threads)) {
      auto typed = cached_basis(theory, s, sigma, threads);
      if (typed->size() == 0) continue;
      auto ap = averaged_products(typed, p.basis, threads);
      auto split = symmetry_split(*typed);
      for (int parity = 0; parity < 2; ++parity) {
        const RationalMatrix& w = parity == 0 ? split.invariant : split.anti;
        if (w.empty() || w[0].empty()) continue;
        PsdBlock b;
        b.name = type_name(sigma) + (parity == 0 ? ".inv" : ".anti");
        b.sigma = sigma;
        b.flag_size = s;
        b.invariant = parity == 0;
        b.dim = static_cast<int>(w[0].size());
        b.basis_change = w;
        b.per_flag = transform(ap, w);
        p.blocks.push_back(std::move(b));
      }
    }
  }

  std::vector<std::string> groups = config.constraint_groups;
  if (config.default_constraints) {
    groups.clear();
    if (objective == "prop34" && colored_theory(theory)) groups = kGroups;
  }
  if (!groups.empty()) {
    if (!colored_theory(theory)) throw InputError("the constraint catalog needs the 3-colored 3-graph theory");
    auto cat = build_catalog(theory, threads);
    for (auto& c : cat.items) {
      if (std::find(groups.begin(), groups.end(), c.group) == groups.end()) continue;
      const int k = c.g.basis->sigma.size(), s = c.g.basis->m;
      if (s > m) {
        if (config.default_constraints) continue;
        throw InputError("constraint " + c.name + " needs m >= " + std::to_string(s));
      }
      int h = m - s + k;
      if (auto it = config.multiplier_size.find(c.group); it != config.multiplier_size.end()) {
        h = it->second;
        if (h < k || h > m - s + k)
          throw InputError("multiplier size for " + c.group + " must lie in [" + std::to_string(k) + ", " +
                           std::to_string(m - s + k) + "]");
      }
      c.multiplier_size = h;
      if (std::find(p.constraint_groups.begin(), p.constraint_groups.end(), c.group) == p.constraint_groups.end())
        p.constraint_groups.push_back(c.group);
      p.multiplier_size[c.group] = h;
      auto mult = cached_basis(theory, h, c.g.basis->sigma, threads);
      auto typed_m = cached_basis(theory, m, c.g.basis->sigma, threads);
      auto cols = downward_columns(typed_products(c.g, mult, typed_m), typed_m, p.basis);
      for (std::size_t j = 0; j < cols.size(); ++j)
        p.multipliers.push_back({c.name + "#" + std::to_string(j), c.name, std::move(cols[j])});
      p.constraints.push_back(std::move(c));
    }
  }
  return p;
}

Rational sos_value(const PsdBlock& block, const RationalMatrix& q, std::size_t flag) {
  Rational sum = 0;
  for (const auto& e : block.per_flag[flag]) {
    const Rational& x = q[static_cast<std::size_t>(e.i)][static_cast<std::size_t>(e.j)];
    if (e.i == e.j)
      sum += x * e.value;
    else
      sum += 2 * x * e.value;
  }
  return sum;
}

}  // namespace flagforge
