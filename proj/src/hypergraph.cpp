#include "flagforge/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "flagforge/errors.hpp"

namespace flagforge {

namespace {

constexpr std::uint32_t small_binomial(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint32_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::uint32_t>(r);
}

}  // namespace

Subset::Subset(std::initializer_list<Vertex> vertices) {
  *this = of(std::span<const Vertex>(vertices.begin(), vertices.size()));
}

Subset Subset::of(std::span<const Vertex> vertices) {
  if (vertices.size() > static_cast<std::size_t>(kCapacity)) throw InputError("subset larger than 3 vertices");
  Subset s;
  s.size_ = static_cast<int>(vertices.size());
  std::copy(vertices.begin(), vertices.end(), s.v_.begin());
  std::sort(s.v_.begin(), s.v_.begin() + s.size_);
  for (int i = 0; i < s.size_; ++i) {
    if (s.v_[static_cast<std::size_t>(i)] < 0) throw InputError("negative vertex index");
    if (i > 0 && s.v_[static_cast<std::size_t>(i)] == s.v_[static_cast<std::size_t>(i - 1)])
      throw InputError("repeated vertex in subset " + to_string(s));
  }
  return s;
}

bool Subset::contains(Vertex x) const { return std::find(begin(), end(), x) != end(); }

Subset Subset::without(Vertex x) const {
  Subset s;
  for (Vertex v : *this)
    if (v != x) s.v_[static_cast<std::size_t>(s.size_++)] = v;
  return s;
}

Subset Subset::with(Vertex x) const {
  std::array<Vertex, kCapacity> buf{};
  int k = 0;
  for (Vertex v : *this) buf[static_cast<std::size_t>(k++)] = v;
  buf[static_cast<std::size_t>(k++)] = x;
  return of(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(k)));
}

std::uint32_t Subset::rank() const {
  std::uint32_t r = 0;
  for (int i = 0; i < size_; ++i)
    r += small_binomial(static_cast<std::uint32_t>(v_[static_cast<std::size_t>(i)]), static_cast<std::uint32_t>(i + 1));
  return r;
}

Subset Subset::unrank(std::uint32_t rank, int size) {
  Subset s;
  s.size_ = size;
  for (int i = size; i >= 1; --i) {
    std::uint32_t c = static_cast<std::uint32_t>(i - 1);
    while (small_binomial(c + 1, static_cast<std::uint32_t>(i)) <= rank) ++c;
    s.v_[static_cast<std::size_t>(i - 1)] = static_cast<Vertex>(c);
    rank -= small_binomial(c, static_cast<std::uint32_t>(i));
  }
  return s;
}

std::strong_ordering operator<=>(const Subset& a, const Subset& b) {
  if (auto c = a.size_ <=> b.size_; c != 0) return c;
  for (int i = a.size_ - 1; i >= 0; --i) {
    if (auto c = a.v_[static_cast<std::size_t>(i)] <=> b.v_[static_cast<std::size_t>(i)]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string to_string(const Subset& s) {
  std::string out = "{";
  for (int i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

std::vector<Subset> all_subsets(int n, int k) {
  std::vector<Subset> out;
  std::uint32_t total = small_binomial(static_cast<std::uint32_t>(std::max(n, 0)), static_cast<std::uint32_t>(k));
  out.reserve(total);
  for (std::uint32_t r = 0; r < total; ++r) out.push_back(Subset::unrank(r, k));
  return out;
}

Hypergraph::Hypergraph(int r, int n) : r_(r), n_(n) {
  if (r < 2 || r > Subset::kCapacity) throw InputError("unsupported uniformity " + std::to_string(r));
  if (n < 0) throw InputError("negative vertex count");
  if (n > 1000) throw InputError("vertex count too large for dense storage");
  capacity_ = small_binomial(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(r));
  bits_.assign((capacity_ + 63) / 64, 0);
}

Hypergraph::Hypergraph(int r, int n, std::span<const Subset> edges) : Hypergraph(r, n) {
  for (const auto& e : edges) {
    if (!add_edge(e)) throw InputError("duplicate edge " + to_string(e));
  }
}

void Hypergraph::check_edge(const Subset& e) const {
  if (e.size() != r_) throw InputError("edge " + to_string(e) + " does not have " + std::to_string(r_) + " vertices");
  for (Vertex v : e)
    if (v >= n_) throw InputError("edge " + to_string(e) + " uses vertex outside 0.." + std::to_string(n_ - 1));
}

bool Hypergraph::has_edge(const Subset& e) const {
  if (e.size() != r_) return false;
  for (Vertex v : e)
    if (v < 0 || v >= n_) return false;
  return has_rank(e.rank());
}

bool Hypergraph::add_edge(const Subset& e) {
  check_edge(e);
  std::uint32_t rk = e.rank();
  if (has_rank(rk)) return false;
  bits_[rk >> 6] |= (std::uint64_t{1} << (rk & 63));
  auto pos = std::lower_bound(edges_.begin(), edges_.end(), e);
  edges_.insert(pos, e);
  return true;
}

bool Hypergraph::remove_edge(const Subset& e) {
  if (!has_edge(e)) return false;
  std::uint32_t rk = e.rank();
  bits_[rk >> 6] &= ~(std::uint64_t{1} << (rk & 63));
  edges_.erase(std::lower_bound(edges_.begin(), edges_.end(), e));
  return true;
}

Hypergraph Hypergraph::relabeled(std::span<const int> perm) const {
  if (perm.size() != static_cast<std::size_t>(n_)) throw InputError("relabeling has wrong length");
  Hypergraph out(r_, n_);
  std::vector<Subset> mapped;
  mapped.reserve(edges_.size());
  for (const auto& e : edges_) {
    std::array<Vertex, Subset::kCapacity> buf{};
    for (int i = 0; i < r_; ++i) buf[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(e[i])];
    mapped.push_back(Subset::of(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(r_))));
  }
  std::sort(mapped.begin(), mapped.end());
  for (const auto& e : mapped) {
    std::uint32_t rk = e.rank();
    out.bits_[rk >> 6] |= (std::uint64_t{1} << (rk & 63));
  }
  out.edges_ = std::move(mapped);
  if (std::adjacent_find(out.edges_.begin(), out.edges_.end()) != out.edges_.end())
    throw InputError("relabeling is not a permutation");
  return out;
}

Hypergraph Hypergraph::induced(std::span<const Vertex> vertices) const {
  int k = static_cast<int>(vertices.size());
  Hypergraph out(r_, k);
  std::vector<int> pos(static_cast<std::size_t>(n_), -1);
  for (int i = 0; i < k; ++i) pos[static_cast<std::size_t>(vertices[static_cast<std::size_t>(i)])] = i;
  for (const auto& e : edges_) {
    std::array<Vertex, Subset::kCapacity> buf{};
    bool inside = true;
    for (int i = 0; i < r_ && inside; ++i) {
      int p = pos[static_cast<std::size_t>(e[i])];
      if (p < 0) inside = false;
      buf[static_cast<std::size_t>(i)] = p;
    }
    if (inside) out.add_edge(Subset::of(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(r_))));
  }
  return out;
}

Hypergraph Hypergraph::with_extra_vertices(int count) const {
  Hypergraph out(r_, n_ + count);
  for (const auto& e : edges_) out.add_edge(e);
  return out;
}

std::vector<std::uint32_t> Hypergraph::edge_ranks() const {
  std::vector<std::uint32_t> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back(e.rank());
  return out;
}

ColoredHypergraph ColoredHypergraph::induced(std::span<const Vertex> vertices) const {
  ColoredHypergraph out{graph.induced(vertices), {}};
  if (!colors.empty()) {
    out.colors.reserve(vertices.size());
    for (Vertex v : vertices) out.colors.push_back(colors[static_cast<std::size_t>(v)]);
  }
  return out;
}

namespace {

std::vector<long> parse_ints(const std::string& line, const std::string& what) {
  std::istringstream ss(line);
  std::vector<long> out;
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      throw ParseError("expected integer in " + what + ", got '" + tok + "'");
    }
    if (used != tok.size()) throw ParseError("expected integer in " + what + ", got '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::string strip_comment(std::string line) {
  auto hash = line.find('#');
  if (hash != std::string::npos) line.erase(hash);
  auto first = line.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  auto last = line.find_last_not_of(" \t\r\n");
  return line.substr(first, last - first + 1);
}

}  // namespace

HypergraphDocument read_hypergraph(std::istream& in) {
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    auto line = strip_comment(raw);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw ParseError("empty hypergraph input");
  auto header = parse_ints(lines[0], "header");
  if (header.size() != 3) throw ParseError("header must be 'r n m'");
  long r = header[0], n = header[1], m = header[2];
  if (r < 2 || r > 3) throw ParseError("unsupported uniformity " + std::to_string(r));
  if (n < 0 || m < 0) throw ParseError("negative size in header");
  if (static_cast<long>(lines.size()) < 1 + m) throw ParseError("expected " + std::to_string(m) + " edge lines");

  HypergraphDocument doc;
  doc.graph = Hypergraph(static_cast<int>(r), static_cast<int>(n));
  for (long i = 0; i < m; ++i) {
    auto vals = parse_ints(lines[static_cast<std::size_t>(1 + i)], "edge line " + std::to_string(i + 1));
    if (static_cast<long>(vals.size()) != r)
      throw ParseError("edge line " + std::to_string(i + 1) + " must have " + std::to_string(r) + " vertices");
    std::vector<Vertex> vs(vals.begin(), vals.end());
    Subset e;
    try {
      e = Subset::of(vs);
    } catch (const InputError& err) {
      throw ParseError(std::string("edge line ") + std::to_string(i + 1) + ": " + err.what());
    }
    try {
      if (!doc.graph.add_edge(e)) throw ParseError("duplicate edge " + to_string(e));
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& err) {
      throw ParseError(err.what());
    }
  }
  for (std::size_t i = static_cast<std::size_t>(1 + m); i < lines.size(); ++i) {
    const auto& line = lines[i];
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("unexpected trailing line '" + line + "'");
    std::string key = line.substr(0, colon);
    auto vals = parse_ints(line.substr(colon + 1), key);
    auto per_vertex = [&](std::vector<int>& dst, int lo, int hi) {
      if (static_cast<long>(vals.size()) != n) throw ParseError(key + " must list one value per vertex");
      for (long v : vals) {
        if (v < lo || v > hi) throw ParseError(key + " value " + std::to_string(v) + " out of range");
        dst.push_back(static_cast<int>(v));
      }
    };
    if (key == "colors") {
      per_vertex(doc.colors, 1, 64);
    } else if (key == "parts") {
      per_vertex(doc.parts, 1, 3);
    } else if (key == "root") {
      if (vals.size() != 1 || vals[0] < 0 || vals[0] > n) throw ParseError("root must be a single count in 0..n");
      doc.roots = static_cast<int>(vals[0]);
    } else {
      throw ParseError("unknown section '" + key + "'");
    }
  }
  return doc;
}

HypergraphDocument read_hypergraph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_hypergraph(in);
}

Hypergraph parse_hypergraph(const std::string& text) {
  std::istringstream in(text);
  return read_hypergraph(in).graph;
}

void write_hypergraph(std::ostream& out, const Hypergraph& h) {
  out << h.uniformity() << ' ' << h.order() << ' ' << h.size() << '\n';
  for (const auto& e : h.edges()) {
    for (int i = 0; i < e.size(); ++i) out << (i ? " " : "") << e[i];
    out << '\n';
  }
}

void write_document(std::ostream& out, const HypergraphDocument& doc) {
  write_hypergraph(out, doc.graph);
  auto list = [&](const char* key, const std::vector<int>& vals) {
    out << key << ':';
    for (int v : vals) out << ' ' << v;
    out << '\n';
  };
  if (!doc.colors.empty()) list("colors", doc.colors);
  if (!doc.parts.empty()) list("parts", doc.parts);
  if (doc.roots) out << "root: " << *doc.roots << '\n';
}

std::string to_text(const Hypergraph& h) {
  std::ostringstream ss;
  write_hypergraph(ss, h);
  return ss.str();
}

}  // namespace flagforge
