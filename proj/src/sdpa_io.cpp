#include "flagforge/sdpa_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <tuple>
#include <sstream>

#include "flagforge/errors.hpp"

namespace flagforge {

SdpaLayout sdpa_layout(const SdpProblem& p) {
  SdpaLayout l;
  for (const auto& b : p.blocks) {
    l.names.push_back(b.name);
    l.sizes.push_back(b.dim);
  }
  l.names.push_back("diag");
  l.sizes.push_back(-p.diagonal_size());
  l.variables = static_cast<int>(p.rows());
  l.multipliers = static_cast<int>(p.multipliers.size());
  l.basis_digest = p.basis->digest();
  l.scale = export_scale(p);
  return l;
}

SdpaData to_sdpa_data(const SdpProblem& p) {
  SdpaData d;
  const int n = static_cast<int>(p.rows());
  const int nb = static_cast<int>(p.blocks.size());
  const int diag = nb + 1;
  const int mults = static_cast<int>(p.multipliers.size());
  d.variables = n;
  for (const auto& b : p.blocks) d.sizes.push_back(b.dim);
  d.sizes.push_back(-p.diagonal_size());
  d.c.resize(static_cast<std::size_t>(n));
  for (int f = 0; f < n; ++f) d.c[static_cast<std::size_t>(f)] = -p.objective.coeffs[static_cast<std::size_t>(f)];

  d.entries.push_back({0, diag, 1, 1, Rational(1)});
  d.entries.push_back({0, diag, 2, 2, Rational(-1)});
  std::vector<std::vector<std::pair<int, Rational>>> mult_by_flag(static_cast<std::size_t>(n));
  for (int j = 0; j < mults; ++j)
    for (const auto& [f, v] : p.multipliers[static_cast<std::size_t>(j)].column)
      mult_by_flag[static_cast<std::size_t>(f)].emplace_back(j, v);
  for (int f = 0; f < n; ++f) {
    for (int b = 0; b < nb; ++b)
      for (const auto& e : p.blocks[static_cast<std::size_t>(b)].per_flag[static_cast<std::size_t>(f)])
        d.entries.push_back({f + 1, b + 1, e.i + 1, e.j + 1, e.value});
    d.entries.push_back({f + 1, diag, 1, 1, Rational(1)});
    d.entries.push_back({f + 1, diag, 2, 2, Rational(-1)});
    for (const auto& [j, v] : mult_by_flag[static_cast<std::size_t>(f)]) d.entries.push_back({f + 1, diag, 3 + j, 3 + j, v});
    d.entries.push_back({f + 1, diag, 3 + mults + f, 3 + mults + f, Rational(1)});
  }
  return d;
}

Integer export_scale(const SdpProblem& p) {
  Integer l = 1;
  auto take = [&](const Rational& q) {
    if (q.get_den() != 1) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  };
  for (const auto& c : p.objective.coeffs) take(c);
  for (const auto& b : p.blocks)
    for (const auto& row : b.per_flag)
      for (const auto& e : row) take(e.value);
  for (const auto& m : p.multipliers)
    for (const auto& [f, v] : m.column) take(v);
  return l;
}

namespace {

std::string scaled(const Rational& q, const Integer& scale) {
  Rational s = q * Rational(scale);
  s.canonicalize();
  if (s.get_den() != 1) throw InputError("export scale does not clear a denominator");
  return s.get_num().get_str(10);
}

}  // namespace

void export_sdpa(const SdpProblem& p, std::ostream& dat, std::ostream& meta) {
  auto data = to_sdpa_data(p);
  auto layout = sdpa_layout(p);
  const Integer& scale = layout.scale;
  dat << data.variables << "\n" << data.sizes.size() << "\n";
  for (std::size_t i = 0; i < data.sizes.size(); ++i) dat << (i ? " " : "") << data.sizes[i];
  dat << "\n";
  for (std::size_t i = 0; i < data.c.size(); ++i) dat << (i ? " " : "") << scaled(data.c[i], scale);
  dat << "\n";
  for (const auto& e : data.entries)
    dat << e.matno << " " << e.block << " " << e.i << " " << e.j << " " << scaled(e.value, scale) << "\n";

  meta << "format=flagforge-sdpa-1\n";
  meta << "theory=" << p.theory.id() << "\n";
  meta << "family=" << p.theory.family.name() << "\n";
  meta << "m=" << p.m << "\n";
  meta << "objective=" << p.objective_name << "\n";
  meta << "basis_digest=" << layout.basis_digest << "\n";
  meta << "scale=" << scale.get_str(10) << "\n";
  meta << "variables=" << layout.variables << "\n";
  meta << "multipliers=" << layout.multipliers << "\n";
  meta << "blocks=" << layout.names.size() << "\n";
  for (std::size_t i = 0; i < layout.names.size(); ++i)
    meta << "block." << (i + 1) << "=" << layout.names[i] << ":" << layout.sizes[i] << "\n";
}

void export_sdpa_files(const SdpProblem& p, const std::string& path) {
  std::ofstream dat(path), meta(path + ".meta");
  if (!dat || !meta) throw InputError("cannot write " + path);
  export_sdpa(p, dat, meta);
  dat.flush();
  meta.flush();
  if (!dat || !meta) throw InputError("write failed for " + path);
}

namespace {

std::string strip_separators(std::string line) {
  for (auto& ch : line)
    if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',') ch = ' ';
  return line;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '"' || line[pos] == '*') continue;
    return true;
  }
  return false;
}

}  // namespace

SdpaData read_sdpa(std::istream& in, const Integer& scale) {
  SdpaData d;
  std::string line;
  Rational inv = Rational(1) / Rational(scale);
  auto fail = [](const std::string& what) { throw ParseError("sdpa: " + what); };
  if (!next_data_line(in, line)) fail("missing variable count");
  {
    std::istringstream s(strip_separators(line));
    if (!(s >> d.variables) || d.variables < 0) fail("bad variable count");
  }
  int nb = 0;
  if (!next_data_line(in, line)) fail("missing block count");
  {
    std::istringstream s(strip_separators(line));
    if (!(s >> nb) || nb <= 0) fail("bad block count");
  }
  if (!next_data_line(in, line)) fail("missing block sizes");
  {
    std::istringstream s(strip_separators(line));
    int x;
    while (s >> x) d.sizes.push_back(x);
    if (static_cast<int>(d.sizes.size()) != nb) fail("block size list has the wrong length");
  }
  if (!next_data_line(in, line)) fail("missing objective row");
  {
    std::istringstream s(strip_separators(line));
    std::string tok;
    while (s >> tok) d.c.push_back(parse_rational(tok) * inv);
    if (static_cast<int>(d.c.size()) != d.variables) fail("objective row has the wrong length");
    for (auto& c : d.c) c.canonicalize();
  }
  while (next_data_line(in, line)) {
    std::istringstream s(strip_separators(line));
    SdpaEntry e;
    std::string tok;
    if (!(s >> e.matno >> e.block >> e.i >> e.j >> tok)) fail("bad entry line '" + line + "'");
    if (e.matno < 0 || e.matno > d.variables || e.block < 1 || e.block > nb) fail("entry out of range '" + line + "'");
    int size = std::abs(d.sizes[static_cast<std::size_t>(e.block - 1)]);
    if (e.i < 1 || e.j < 1 || e.i > size || e.j > size) fail("entry index out of range '" + line + "'");
    if (e.i > e.j) std::swap(e.i, e.j);
    e.value = parse_rational(tok) * inv;
    e.value.canonicalize();
    d.entries.push_back(std::move(e));
  }
  std::stable_sort(d.entries.begin(), d.entries.end(), [](const SdpaEntry& a, const SdpaEntry& b) {
    return std::tie(a.matno, a.block, a.i, a.j) < std::tie(b.matno, b.block, b.i, b.j);
  });
  return d;
}

SdpaLayout read_meta(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("meta: expected key=value, got '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw ParseError("meta: missing key '" + k + "'");
    return it->second;
  };
  auto get_int = [&](const std::string& k) {
    try {
      return std::stoi(get(k));
    } catch (const std::logic_error&) {
      throw ParseError("meta: bad integer for '" + k + "'");
    }
  };
  SdpaLayout l;
  l.variables = get_int("variables");
  l.multipliers = get_int("multipliers");
  l.basis_digest = get("basis_digest");
  try {
    l.scale = Integer(get("scale"), 10);
  } catch (const std::invalid_argument&) {
    throw ParseError("meta: bad scale");
  }
  int nb = get_int("blocks");
  for (int i = 1; i <= nb; ++i) {
    auto v = get("block." + std::to_string(i));
    auto colon = v.rfind(':');
    if (colon == std::string::npos) throw ParseError("meta: bad block entry '" + v + "'");
    l.names.push_back(v.substr(0, colon));
    try {
      l.sizes.push_back(std::stoi(v.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw ParseError("meta: bad block size '" + v + "'");
    }
  }
  return l;
}

SdpaLayout read_meta_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  return read_meta(in);
}

namespace {

struct Node {
  bool is_list = false;
  bool closed = true;
  double number = 0;
  std::vector<Node> items;
};

class OutputParser {
 public:
  explicit OutputParser(std::string text) : text_(std::move(text)) {}

  // Value following "key =" (a number or a brace group). Missing keys give
  // nullopt.
  std::optional<Node> value_of(const std::string& key) {
    std::size_t pos = 0;
    while (true) {
      pos = text_.find(key, pos);
      if (pos == std::string::npos) return std::nullopt;
      std::size_t after = pos + key.size();
      bool word_start = pos == 0 || !std::isalnum(static_cast<unsigned char>(text_[pos - 1]));
      std::size_t q = after;
      while (q < text_.size() && std::isspace(static_cast<unsigned char>(text_[q]))) ++q;
      if (word_start && q < text_.size() && text_[q] == '=') {
        at_ = q + 1;
        return parse();
      }
      pos = after;
    }
  }

 private:
  void skip() {
    while (at_ < text_.size() && (std::isspace(static_cast<unsigned char>(text_[at_])) || text_[at_] == ',')) ++at_;
  }

  Node parse() {
    skip();
    Node n;
    if (at_ >= text_.size()) {
      n.is_list = true;
      n.closed = false;
      return n;
    }
    if (text_[at_] == '{') {
      ++at_;
      n.is_list = true;
      n.closed = false;
      while (true) {
        skip();
        if (at_ >= text_.size()) return n;
        if (text_[at_] == '}') {
          ++at_;
          n.closed = true;
          return n;
        }
        Node child = parse();
        bool ok = child.closed;
        n.items.push_back(std::move(child));
        if (!ok) return n;
      }
    }
    const char* start = text_.c_str() + at_;
    char* end = nullptr;
    n.number = std::strtod(start, &end);
    if (end == start) throw ParseError("solver output: unexpected '" + std::string(1, text_[at_]) + "'");
    at_ += static_cast<std::size_t>(end - start);
    return n;
  }

  std::string text_;
  std::size_t at_ = 0;
};

std::vector<std::vector<double>> read_block(const Node& n, const std::string& name, int size) {
  const std::size_t dim = static_cast<std::size_t>(std::abs(size));
  auto mismatch = [&](const std::string& why) -> DimensionError {
    return DimensionError("block " + name + ": " + why);
  };
  if (!n.closed) throw mismatch("incomplete data");
  if (!n.is_list) throw mismatch("expected a matrix");
  std::vector<std::vector<double>> out(dim, std::vector<double>(dim, 0.0));
  if (size < 0) {
    if (n.items.size() != dim) throw mismatch("expected " + std::to_string(dim) + " diagonal entries, got " + std::to_string(n.items.size()));
    for (std::size_t i = 0; i < dim; ++i) {
      if (n.items[i].is_list) throw mismatch("diagonal entry is a list");
      out[i][i] = n.items[i].number;
    }
    return out;
  }
  if (n.items.size() != dim) throw mismatch("expected " + std::to_string(dim) + " rows, got " + std::to_string(n.items.size()));
  for (std::size_t i = 0; i < dim; ++i) {
    const Node& row = n.items[i];
    if (!row.is_list || row.items.size() != dim) throw mismatch("row " + std::to_string(i + 1) + " has the wrong length");
    for (std::size_t j = 0; j < dim; ++j) {
      if (row.items[j].is_list) throw mismatch("nested entry");
      out[i][j] = row.items[j].number;
    }
  }
  return out;
}

std::vector<FloatBlock> read_blocks(const Node& mat, const SdpaLayout& layout, const std::string& what) {
  if (!mat.is_list) throw ParseError("solver output: " + what + " is not a block list");
  std::vector<FloatBlock> out;
  for (std::size_t b = 0; b < layout.names.size(); ++b) {
    if (b >= mat.items.size()) throw DimensionError("block " + layout.names[b] + ": missing from " + what);
    out.push_back({layout.names[b], read_block(mat.items[b], layout.names[b], layout.sizes[b])});
  }
  if (mat.items.size() > layout.names.size()) throw DimensionError(what + ": more blocks than the layout");
  if (!mat.closed) throw DimensionError(what + ": unterminated block list");
  return out;
}

}  // namespace

FloatSolution import_solution(std::istream& in, const SdpaLayout& layout) {
  std::stringstream buf;
  buf << in.rdbuf();
  OutputParser parser(buf.str());
  FloatSolution s;
  auto number = [&](const std::string& key) {
    auto n = parser.value_of(key);
    if (!n) throw ParseError("solver output: missing " + key);
    if (n->is_list) throw ParseError("solver output: " + key + " is not a number");
    return n->number;
  };
  s.primal_objective = number("objValPrimal");
  s.dual_objective = number("objValDual");
  auto xv = parser.value_of("xVec");
  if (!xv || !xv->is_list) throw ParseError("solver output: missing xVec");
  if (!xv->closed || static_cast<int>(xv->items.size()) != layout.variables)
    throw DimensionError("xVec: expected " + std::to_string(layout.variables) + " entries");
  for (const auto& n : xv->items) s.x.push_back(n.number);
  auto xm = parser.value_of("xMat");
  if (!xm) throw ParseError("solver output: missing xMat");
  read_blocks(*xm, layout, "xMat");
  auto ym = parser.value_of("yMat");
  if (!ym) throw ParseError("solver output: missing yMat");
  auto blocks = read_blocks(*ym, layout, "yMat");
  const auto& diag = blocks.back().matrix;
  const std::size_t expect = 2 + static_cast<std::size_t>(layout.multipliers + layout.variables);
  if (diag.size() != expect) throw DimensionError("block " + blocks.back().name + ": diagonal has the wrong size");
  s.bound = diag[1][1] - diag[0][0];
  for (int j = 0; j < layout.multipliers; ++j) s.multipliers.push_back(diag[2 + static_cast<std::size_t>(j)][2 + static_cast<std::size_t>(j)]);
  for (int f = 0; f < layout.variables; ++f) {
    std::size_t k = 2 + static_cast<std::size_t>(layout.multipliers + f);
    s.slacks.push_back(diag[k][k]);
  }
  blocks.pop_back();
  s.blocks = std::move(blocks);
  return s;
}

FloatSolution import_solution_file(const std::string& path, const SdpaLayout& layout) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  return import_solution(in, layout);
}

}  // namespace flagforge
