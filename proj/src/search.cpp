#include "flagforge/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "flagforge/constructions.hpp"
#include "flagforge/embedding.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/hypergraph_ops.hpp"

namespace flagforge {

SearchObjective parse_search_objective(const std::string& name) {
  if (name == "edges") return SearchObjective::edges;
  if (name == "l2norm") return SearchObjective::l2norm;
  if (name == "s2count") return SearchObjective::s2count;
  throw InputError("unknown search objective '" + name + "' (edges, l2norm, s2count)");
}

std::string to_string(SearchObjective o) {
  switch (o) {
    case SearchObjective::edges: return "edges";
    case SearchObjective::l2norm: return "l2norm";
    case SearchObjective::s2count: return "s2count";
  }
  return "?";
}

SearchMode parse_search_mode(const std::string& name) {
  if (name == "exhaustive") return SearchMode::exhaustive;
  if (name == "augmenting") return SearchMode::augmenting;
  throw InputError("unknown search mode '" + name + "' (exhaustive, augmenting)");
}

std::string to_string(SearchMode m) { return m == SearchMode::exhaustive ? "exhaustive" : "augmenting"; }

Integer objective_value(const Hypergraph& h, SearchObjective o) {
  switch (o) {
    case SearchObjective::edges: return Integer(static_cast<unsigned long>(h.size()));
    case SearchObjective::l2norm: return lp_norm(h, 2);
    case SearchObjective::s2count: return h.uniformity() == 3 ? count_s2(h) : Integer(0);
  }
  return 0;
}

namespace {

std::vector<int> mark(int n, const Subset& e) {
  std::vector<int> c(static_cast<std::size_t>(n), 0);
  for (Vertex v : e) c[static_cast<std::size_t>(v)] = 1;
  return c;
}

bool stays_free(const Hypergraph& child, const Family& fam, const Subset& e) {
  for (const auto& f : fam.members())
    if (contains_subgraph_through_edge(child, f, e)) return false;
  return true;
}

struct Best {
  Integer value = -1;
  CanonicalKey key;
  Hypergraph witness;
  std::uint64_t visited = 0;

  void offer(const Hypergraph& g, SearchObjective o) {
    ++visited;
    Integer v = objective_value(g, o);
    if (v < value) return;
    CanonicalForm form = canonical_form(g);
    CanonicalKey k = canonical_key(form, std::vector<int>(static_cast<std::size_t>(g.order()), 0));
    if (v > value || k < key) {
      value = v;
      key = std::move(k);
      witness = form.canonical_edges;
    }
  }

  void merge(const Best& o) {
    visited += o.visited;
    if (o.value > value || (o.value == value && o.value >= 0 && o.key < key)) {
      value = o.value;
      key = o.key;
      witness = o.witness;
    }
  }
};

class Augmenter {
 public:
  Augmenter(int n, const Family& fam) : n_(n), r_(fam.uniformity()), fam_(fam), all_(all_subsets(n, r_)) {}

  std::vector<Hypergraph> children(const Hypergraph& g) const {
    std::vector<Hypergraph> out;
    std::set<CanonicalKey> orbits;
    for (const auto& e : all_) {
      if (g.has_edge(e)) continue;
      if (!orbits.insert(canonical_key(g, mark(n_, e))).second) continue;
      Hypergraph child = g;
      child.add_edge(e);
      if (!stays_free(child, fam_, e)) continue;
      if (accepts(child, e)) out.push_back(std::move(child));
    }
    return out;
  }

  Hypergraph root() const { return Hypergraph(r_, n_); }

 private:
  // e must lie in the orbit of the canonical deletion edge: the preimage of
  // the last edge of the canonical form.
  bool accepts(const Hypergraph& child, const Subset& e) const {
    CanonicalForm form = canonical_form(child);
    std::vector<int> inv(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) inv[static_cast<std::size_t>(form.relabeling[static_cast<std::size_t>(v)])] = v;
    const Subset& last = form.canonical_edges.edges().back();
    std::vector<Vertex> pre;
    for (Vertex v : last) pre.push_back(inv[static_cast<std::size_t>(v)]);
    Subset d = Subset::of(pre);
    if (d == e) return true;
    return canonical_key(child, mark(n_, e)) == canonical_key(child, mark(n_, d));
  }

  int n_, r_;
  const Family& fam_;
  std::vector<Subset> all_;
};

void walk(const Augmenter& aug, const Hypergraph& g, SearchObjective o, Best& best) {
  best.offer(g, o);
  for (const auto& c : aug.children(g)) walk(aug, c, o, best);
}

std::string code_of(const Hypergraph& g) {
  std::string s;
  const CanonicalForm form = canonical_form(g);
  for (const auto& e : form.canonical_edges.edges()) {
    if (!s.empty()) s += ".";
    s += std::to_string(e.rank());
  }
  return s.empty() ? "-" : s;
}

std::string ranks_of(const Hypergraph& g) {
  std::string s;
  for (const auto& e : g.edges()) {
    if (!s.empty()) s += ".";
    s += std::to_string(e.rank());
  }
  return s.empty() ? "-" : s;
}

Hypergraph from_ranks(int r, int n, const std::string& s) {
  Hypergraph g(r, n);
  if (s == "-") return g;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, '.')) {
    unsigned long rank = 0;
    try {
      rank = std::stoul(tok);
    } catch (const std::logic_error&) {
      throw ParseError("checkpoint: bad edge rank '" + tok + "'");
    }
    Subset e = Subset::unrank(static_cast<std::uint32_t>(rank), r);
    for (Vertex v : e)
      if (v >= n) throw ParseError("checkpoint: edge outside the vertex range");
    g.add_edge(e);
  }
  return g;
}

struct Checkpoint {
  std::string descriptor;
  std::map<std::size_t, Best> done;
};

std::string descriptor(const SearchTask& t, int depth, std::size_t roots) {
  std::ostringstream d;
  d << "n=" << t.n << " r=" << t.family.uniformity() << " family=" << t.family.name()
    << " objective=" << to_string(t.objective) << " depth=" << depth << " roots=" << roots;
  return d.str();
}

void write_checkpoint(const std::string& path, const std::string& desc, const std::vector<Hypergraph>& roots,
                      const std::vector<std::optional<Best>>& results) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw InputError("cannot write checkpoint " + tmp);
    out << "flagforge-search-checkpoint 1\n" << desc << "\n";
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const auto& r = results[i];
      if (r)
        out << "done " << i << " " << code_of(roots[i]) << " " << r->visited << " " << r->value.get_str(10) << " "
            << ranks_of(r->witness) << "\n";
      else
        out << "todo " << i << " " << code_of(roots[i]) << "\n";
    }
    if (!out) throw InputError("write failed for checkpoint " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw InputError("cannot replace checkpoint " + path);
}

std::optional<Checkpoint> read_checkpoint(const std::string& path, const SearchTask& t,
                                          const std::vector<Hypergraph>& roots) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  Checkpoint cp;
  std::string line;
  if (!std::getline(in, line) || line != "flagforge-search-checkpoint 1") throw ParseError("checkpoint: bad header in " + path);
  if (!std::getline(in, cp.descriptor)) throw ParseError("checkpoint: missing task line");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream s(line);
    std::string kind, code;
    std::size_t idx = 0;
    if (!(s >> kind >> idx >> code)) throw ParseError("checkpoint: bad line '" + line + "'");
    if (idx >= roots.size() || code != code_of(roots[idx]))
      throw InputError("checkpoint " + path + " does not match this task (frontier differs)");
    if (kind == "todo") continue;
    if (kind != "done") throw ParseError("checkpoint: bad line '" + line + "'");
    Best b;
    std::string value, witness;
    if (!(s >> b.visited >> value >> witness)) throw ParseError("checkpoint: bad line '" + line + "'");
    b.value = Integer(value, 10);
    b.witness = from_ranks(t.family.uniformity(), t.n, witness);
    b.key = canonical_key(b.witness);
    cp.done[idx] = std::move(b);
  }
  return cp;
}

SearchResult exhaustive(const SearchTask& t) {
  if (t.n > kExhaustiveSearchLimit)
    throw InputError("exhaustive search is limited to n <= " + std::to_string(kExhaustiveSearchLimit) +
                     "; use --mode augmenting for a lower bound");
  if (t.n < 0) throw InputError("n must be nonnegative");
  Augmenter aug(t.n, t.family);
  // Sequential prefix down to `depth` edges; the subtrees below are the units
  // of parallel work and of checkpointing.
  const int depth = 4;
  Best prefix;
  std::vector<Hypergraph> roots;
  std::function<void(const Hypergraph&, int)> down = [&](const Hypergraph& g, int d) {
    if (d == depth) {
      roots.push_back(g);
      return;
    }
    prefix.offer(g, t.objective);
    for (const auto& c : aug.children(g)) down(c, d + 1);
  };
  down(aug.root(), 0);

  const std::string desc = descriptor(t, depth, roots.size());
  std::vector<std::optional<Best>> results(roots.size());
  SearchResult out;
  if (!t.checkpoint.empty()) {
    if (auto cp = read_checkpoint(t.checkpoint, t, roots)) {
      if (cp->descriptor != desc) throw InputError("checkpoint " + t.checkpoint + " belongs to a different task: " + cp->descriptor);
      for (auto& [i, b] : cp->done) results[i] = std::move(b);
      out.resumed = true;
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto last_write = std::chrono::steady_clock::now();
  std::exception_ptr failure;
  auto worker = [&]() {
    try {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= roots.size()) return;
        if (results[i]) continue;
        Best b;
        walk(aug, roots[i], t.objective, b);
        std::lock_guard<std::mutex> lock(mu);
        results[i] = std::move(b);
        auto now = std::chrono::steady_clock::now();
        if (!t.checkpoint.empty() && std::chrono::duration<double>(now - last_write).count() >= t.checkpoint_interval) {
          write_checkpoint(t.checkpoint, desc, roots, results);
          last_write = now;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
    }
  };
  const int threads = std::max(1, t.threads);
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  if (!t.checkpoint.empty()) write_checkpoint(t.checkpoint, desc, roots, results);

  Best total = prefix;
  for (const auto& r : results) total.merge(*r);
  out.value = total.value;
  out.witness = total.witness;
  out.classes_visited = total.visited;
  out.exact = true;
  return out;
}

SearchResult augmenting(const SearchTask& t) {
  if (t.restarts < 1) throw InputError("restarts must be positive");
  const int r = t.family.uniformity();
  auto all = all_subsets(t.n, r);
  std::vector<Best> per(static_cast<std::size_t>(t.restarts));
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= t.restarts) return;
      std::seed_seq seq{static_cast<std::uint32_t>(t.seed), static_cast<std::uint32_t>(t.seed >> 32),
                        static_cast<std::uint32_t>(i)};
      std::mt19937_64 rng(seq);
      auto order = all;
      std::shuffle(order.begin(), order.end(), rng);
      Hypergraph g(r, t.n);
      for (const auto& e : order) {
        g.add_edge(e);
        if (!stays_free(g, t.family, e)) g.remove_edge(e);
      }
      per[static_cast<std::size_t>(i)].offer(g, t.objective);
    }
  };
  const int threads = std::max(1, t.threads);
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  Best total;
  for (const auto& b : per) total.merge(b);
  SearchResult out;
  out.value = total.value;
  out.witness = total.witness;
  out.classes_visited = total.visited;
  out.exact = false;
  return out;
}

}  // namespace

SearchResult search_max(const SearchTask& task) {
  return task.mode == SearchMode::exhaustive ? exhaustive(task) : augmenting(task);
}

void for_each_class(int n, const Family& family, const std::function<void(const Hypergraph&)>& visit) {
  if (n > kExhaustiveSearchLimit) throw InputError("class enumeration is limited to n <= 8");
  Augmenter aug(n, family);
  std::function<void(const Hypergraph&)> go = [&](const Hypergraph& g) {
    visit(g);
    for (const auto& c : aug.children(g)) go(c);
  };
  go(aug.root());
}

Rational s2_reference_density() { return Rational(6, 13); }

DensityRow density_row(const SearchResult& r, int n) {
  DensityRow row;
  row.n = n;
  row.value = r.value;
  row.exact = r.exact;
  row.quadruples = binomial(n, 4);
  row.trec_s2 = t_rec_s2(n).value;
  if (row.quadruples > 0) {
    row.ratio = Rational(row.value) / Rational(row.quadruples);
    row.trec_ratio = Rational(row.trec_s2) / Rational(row.quadruples);
    row.ratio.canonicalize();
    row.trec_ratio.canonicalize();
  }
  return row;
}

void write_density_report(std::ostream& out, const std::vector<DensityRow>& rows, const std::string& format) {
  const Rational ref = s2_reference_density();
  if (format == "csv") {
    out << "n,ex,exact,C(n;4),ratio,ratio_decimal,trec_s2,trec_ratio,reference\n";
    for (const auto& r : rows)
      out << r.n << "," << r.value.get_str(10) << "," << (r.exact ? "true" : "false") << "," << r.quadruples.get_str(10)
          << "," << to_string(r.ratio) << "," << to_decimal(r.ratio, 6) << "," << r.trec_s2.get_str(10) << ","
          << to_decimal(r.trec_ratio, 6) << "," << to_decimal(ref, 6) << "\n";
    return;
  }
  if (format == "json-lines") {
    for (const auto& r : rows) {
      nlohmann::ordered_json j;
      j["n"] = r.n;
      j["ex"] = r.value.get_str(10);
      j["exact"] = r.exact;
      j["quadruples"] = r.quadruples.get_str(10);
      j["ratio"] = to_string(r.ratio);
      j["ratio_decimal"] = to_decimal(r.ratio, 6);
      j["trec_s2"] = r.trec_s2.get_str(10);
      j["trec_ratio"] = to_decimal(r.trec_ratio, 6);
      j["reference"] = to_decimal(ref, 6);
      out << j.dump() << "\n";
    }
    return;
  }
  if (format != "text") throw InputError("unknown format '" + format + "' (text, csv, json-lines)");
  out << std::left << std::setw(4) << "n" << std::setw(10) << "ex" << std::setw(10) << "C(n,4)" << std::setw(12)
      << "ratio" << std::setw(10) << "trec_s2" << std::setw(12) << "trec_ratio" << "\n";
  for (const auto& r : rows)
    out << std::setw(4) << r.n << std::setw(10) << (r.value.get_str(10) + (r.exact ? "" : "+")) << std::setw(10)
        << r.quadruples.get_str(10) << std::setw(12) << to_decimal(r.ratio, 6) << std::setw(10) << r.trec_s2.get_str(10)
        << std::setw(12) << to_decimal(r.trec_ratio, 6) << "\n";
  out << "reference 6/13 = " << to_decimal(ref, 6) << "\n";
  out << "note: small n values sit well above the limit density\n";
  bool lower = false;
  for (const auto& r : rows) lower = lower || !r.exact;
  if (lower) out << "note: '+' marks lower bounds from augmenting mode\n";
}

}  // namespace flagforge
