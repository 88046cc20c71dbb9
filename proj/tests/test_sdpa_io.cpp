#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "flagforge/errors.hpp"
#include "flagforge/families.hpp"
#include "flagforge/sdpa_io.hpp"

using namespace flagforge;

namespace {

std::string data_path(const std::string& name) {
  const char* dir = std::getenv("FLAGFORGE_TEST_DATA");
  return std::string(dir ? dir : "tests/data") + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

SdpProblem mantel() { return assemble_program(Theory(2, 1, parse_family("k3")), 3, "edge-density", AssemblyConfig{}); }

std::pair<std::string, std::string> exported(const SdpProblem& p) {
  std::ostringstream dat, meta;
  export_sdpa(p, dat, meta);
  return {dat.str(), meta.str()};
}

}  // namespace

TEST_CASE("normalization-only program") {
  auto p = assemble_program(Theory(3, 1, Family::none(3)), 1, "constant", AssemblyConfig{});
  CHECK(p.blocks.empty());
  auto [dat, meta] = exported(p);
  std::istringstream in(dat);
  std::string first;
  std::getline(in, first);
  CHECK(first == "1");
  std::istringstream again(dat);
  auto d = read_sdpa(again);
  CHECK(d.variables == 1);
  CHECK(d.sizes == std::vector<int>{-3});
  CHECK(d.c == std::vector<Rational>{Rational(-1)});
}

TEST_CASE("Mantel export round trip reproduces the program") {
  auto p = mantel();
  auto [dat, meta] = exported(p);
  std::istringstream mi(meta);
  auto layout = read_meta(mi);
  CHECK(layout.names == std::vector<std::string>{"t1c1.inv", "diag"});
  CHECK(layout.sizes == std::vector<int>{2, -5});
  CHECK(layout.scale == 3);
  CHECK(layout.basis_digest == p.basis->digest());
  std::istringstream di(dat);
  auto d = read_sdpa(di, layout.scale);
  REQUIRE(d.variables == 3);
  std::map<std::tuple<int, int, int, int>, Rational> got;
  for (const auto& e : d.entries) got[{e.matno, e.block, e.i, e.j}] = e.value;
  std::map<std::tuple<int, int, int, int>, Rational> want;
  want[{0, 2, 1, 1}] = 1;
  want[{0, 2, 2, 2}] = -1;
  for (int f = 0; f < 3; ++f) {
    CHECK(d.c[static_cast<std::size_t>(f)] == -p.objective.coeffs[static_cast<std::size_t>(f)]);
    for (const auto& e : p.blocks[0].per_flag[static_cast<std::size_t>(f)]) want[{f + 1, 1, e.i + 1, e.j + 1}] = e.value;
    want[{f + 1, 2, 1, 1}] = 1;
    want[{f + 1, 2, 2, 2}] = -1;
    want[{f + 1, 2, 3 + f, 3 + f}] = 1;
  }
  CHECK(got == want);
}

TEST_CASE("export is deterministic and matches the bundled file") {
  auto a = exported(mantel());
  auto b = exported(mantel());
  CHECK(a == b);
  CHECK(a.first == slurp(data_path("mantel.dat-s")));
  CHECK(a.second == slurp(data_path("mantel.dat-s.meta")));
}

TEST_CASE("prop34 export at m = 4") {
  auto p = assemble_program(Theory(3, 3, parse_family("k4m,c5m")), 4, "prop34", AssemblyConfig{});
  auto layout = sdpa_layout(p);
  std::set<std::string> types;
  for (const auto& b : p.blocks) types.insert(type_name(b.sigma));
  CHECK(layout.sizes.size() == p.blocks.size() + 1);
  CHECK(p.blocks.size() <= 2 * types.size());
  CHECK(layout.sizes.back() == -p.diagonal_size());
  auto [dat, meta] = exported(p);
  std::istringstream di(dat);
  auto d = read_sdpa(di, layout.scale);
  CHECK(d.variables == 81);
  // multiplier columns survive the round trip
  std::map<std::pair<int, int>, Rational> diag;
  for (const auto& e : d.entries)
    if (e.block == static_cast<int>(layout.sizes.size()) && e.matno > 0) diag[{e.matno - 1, e.i}] = e.value;
  for (std::size_t j = 0; j < p.multipliers.size(); ++j)
    for (const auto& [f, v] : p.multipliers[j].column) CHECK(diag[{f, 3 + static_cast<int>(j)}] == v);
}

TEST_CASE("import of the bundled solver output") {
  auto layout = read_meta_file(data_path("mantel.dat-s.meta"));
  auto s = import_solution_file(data_path("mantel.out"), layout);
  CHECK(s.x.size() == 3);
  CHECK(std::abs(s.dual_objective / to_double(Rational(layout.scale)) + 0.5) < 1e-6);
  CHECK(std::abs(s.bound - 0.5) < 1e-6);
  REQUIRE(s.blocks.size() == 1);
  CHECK(s.blocks[0].name == "t1c1.inv");
  CHECK(std::abs(s.blocks[0].matrix[0][1] + 0.5) < 1e-6);
  CHECK(s.slacks.size() == 3);
  CHECK(s.multipliers.empty());
}

TEST_CASE("import errors name the block") {
  auto layout = read_meta_file(data_path("mantel.dat-s.meta"));
  auto text = slurp(data_path("mantel.out"));
  auto cut = text.find("yMat");
  REQUIRE(cut != std::string::npos);
  {
    std::istringstream in(text.substr(0, cut + 20));
    try {
      import_solution(in, layout);
      FAIL("truncated output accepted");
    } catch (const DimensionError& e) {
      CHECK(std::string(e.what()).find("t1c1.inv") != std::string::npos);
    }
  }
  {
    // drop the diagonal block
    auto last = text.rfind("{0");
    REQUIRE(last != std::string::npos);
    std::istringstream in(text.substr(0, last) + "}\n");
    try {
      import_solution(in, layout);
      FAIL("missing block accepted");
    } catch (const DimensionError& e) {
      CHECK(std::string(e.what()).find("diag") != std::string::npos);
    }
  }
  std::istringstream none("objValPrimal = 1\n");
  CHECK_THROWS_AS(import_solution(none, layout), ParseError);
}

TEST_CASE("malformed SDPA input") {
  std::istringstream a("2\n1\n2\n1\n");
  CHECK_THROWS_AS(read_sdpa(a), ParseError);
  std::istringstream b("1\n1\n2\n1\n1 1 3 1 1\n");
  CHECK_THROWS_AS(read_sdpa(b), ParseError);
  std::istringstream c("1\n1\n{2}\n1\n1 1 1 2 0.5\n");
  auto d = read_sdpa(c);
  CHECK(d.entries.at(0).value == Rational(1, 2));
}
