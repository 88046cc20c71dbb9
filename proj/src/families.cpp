#include "flagforge/families.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "flagforge/canonical.hpp"
#include "flagforge/embedding.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/hypergraph_ops.hpp"

namespace flagforge {

Hypergraph make_tight_cycle(int l) {
  if (l < 4) throw InputError("tight cycles need at least 4 vertices");
  Hypergraph h(3, l);
  for (int i = 0; i < l; ++i) h.add_edge(Subset{i, (i + 1) % l, (i + 2) % l});
  return h;
}

Hypergraph make_tight_cycle_minus(int l) {
  Hypergraph h = make_tight_cycle(l);
  h.remove_edge(Subset{l - 1, 0, 1});
  return h;
}

Hypergraph make_k4_minus() {
  std::vector<Subset> e{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}};
  return Hypergraph(3, 4, e);
}

Hypergraph make_k4() {
  std::vector<Subset> e{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  return Hypergraph(3, 4, e);
}

Hypergraph make_f32() {
  std::vector<Subset> e{{0, 1, 2}, {0, 1, 3}, {0, 1, 4}, {2, 3, 4}};
  return Hypergraph(3, 5, e);
}

Hypergraph make_s2() {
  std::vector<Subset> e{{0, 1, 2}, {0, 1, 3}};
  return Hypergraph(3, 4, e);
}

Hypergraph make_triangle() {
  std::vector<Subset> e{{0, 1}, {0, 2}, {1, 2}};
  return Hypergraph(2, 3, e);
}

Family::Family(std::string name, std::vector<Hypergraph> members) : name_(std::move(name)) {
  if (members.empty()) throw InputError("a family needs at least one member");
  r_ = members.front().uniformity();
  std::set<CanonicalKey> seen;
  for (auto& m : members) {
    if (m.uniformity() != r_) throw InputError("family members must share one uniformity");
    if (seen.insert(canonical_key(m)).second) members_.push_back(std::move(m));
  }
}

Family Family::none(int r) {
  Family f;
  f.name_ = "none";
  f.r_ = r;
  return f;
}

namespace {

Hypergraph keyword_graph(const std::string& kw) {
  if (kw == "k4m") return make_k4_minus();
  if (kw == "k4") return make_k4();
  if (kw == "f32") return make_f32();
  if (kw == "s2") return make_s2();
  if (kw == "k3") return make_triangle();
  if (kw.size() >= 2 && kw[0] == 'c' && std::isdigit(static_cast<unsigned char>(kw[1]))) {
    std::size_t pos = 1;
    while (pos < kw.size() && std::isdigit(static_cast<unsigned char>(kw[pos]))) ++pos;
    int l = std::stoi(kw.substr(1, pos - 1));
    std::string rest = kw.substr(pos);
    if (rest.empty()) return make_tight_cycle(l);
    if (rest == "m") return make_tight_cycle_minus(l);
  }
  throw InputError("unknown family keyword '" + kw + "'");
}

}  // namespace

Family parse_family(std::string_view keywords) {
  std::string text(keywords);
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }), text.end());
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  if (text.empty()) throw InputError("empty family specification");
  if (text == "none") return Family::none();
  std::vector<Hypergraph> members;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    std::string kw = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (kw.empty()) throw InputError("empty keyword in family '" + text + "'");
    members.push_back(keyword_graph(kw));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return Family(text, std::move(members));
}

bool is_family_free(const Hypergraph& h, const Family& family) {
  for (const auto& m : family.members()) {
    if (m.uniformity() != h.uniformity()) throw InputError("family and host uniformity differ");
    if (contains_subgraph(h, m)) return false;
  }
  return true;
}

bool reduction_hom_chain(int l) {
  if (l < 5) throw InputError("the reduction needs l >= 5");
  if (l % 3 == 0) throw InputError("the reduction does not apply when l is divisible by 3");
  return homomorphism_exists(make_tight_cycle_minus(l), make_tight_cycle_minus(5)) &&
         homomorphism_exists(make_tight_cycle_minus(5), make_k4_minus());
}

}  // namespace flagforge
