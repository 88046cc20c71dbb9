#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cstdlib>
#include <random>

#include "flagforge/certify.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/families.hpp"

using namespace flagforge;

namespace {

std::string data_path(const std::string& name) {
  const char* dir = std::getenv("FLAGFORGE_TEST_DATA");
  return std::string(dir ? dir : "tests/data") + "/" + name;
}

RationalMatrix rm(std::initializer_list<std::initializer_list<long>> rows) {
  RationalMatrix m;
  for (auto r : rows) {
    std::vector<Rational> v;
    for (long x : r) v.emplace_back(x);
    m.push_back(v);
  }
  return m;
}

SdpProblem mantel() { return assemble_program(Theory(2, 1, parse_family("k3")), 3, "edge-density", AssemblyConfig{}); }

}  // namespace

TEST_CASE("exact PSD examples") {
  CHECK(verify_psd_exact(rm({{2, 1}, {1, 1}})));
  CHECK_FALSE(verify_psd_exact(rm({{1, 2}, {2, 1}})));
  CHECK(verify_psd_exact(rm({{0, 0}, {0, 0}})));
  CHECK(verify_psd_exact({}));
  CHECK_FALSE(verify_psd_exact(rm({{0, 1}, {1, 0}})));
  CHECK_FALSE(verify_psd_exact(rm({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}})));
  CHECK(verify_psd_exact(rm({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}})));
  CHECK_THROWS_AS(verify_psd_exact(rm({{1, 2}, {3, 1}})), InputError);
  CHECK_THROWS_AS(verify_psd_exact(rm({{1, 2}})), InputError);
}

TEST_CASE("exact PSD agrees with floating eigenvalues") {
  std::mt19937_64 rng(11);
  int tested = 0, psd = 0;
  while (tested < 500) {
    int n = 1 + static_cast<int>(rng() % 8);
    int rank = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    std::vector<std::vector<Rational>> b(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(rank)));
    for (auto& row : b)
      for (auto& x : row) {
        x = Rational(num(rng), den(rng));
        x.canonicalize();
      }
    Rational shift(static_cast<long>(rng() % 7), 3);
    shift.canonicalize();
    RationalMatrix q(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    Eigen::MatrixXd e(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rational s = 0;
        for (int k = 0; k < rank; ++k) s += b[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        if (i == j) s -= shift;
        s.canonicalize();
        q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
        e(i, j) = to_double(s);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e);
    auto ev = es.eigenvalues();
    bool away = true;
    for (int i = 0; i < n; ++i) away = away && std::abs(ev(i)) >= 1e-3;
    if (!away) continue;
    ++tested;
    bool expected = ev.minCoeff() > 0;
    psd += expected;
    CHECK(verify_psd_exact(q) == expected);
  }
  CHECK(psd > 50);
  CHECK(psd < 450);
}

TEST_CASE("rounding examples") {
  CHECK(best_approximation(0.4999999913, 100) == Rational(1, 2));
  CHECK(best_approximation(0.3333334, 10) == Rational(1, 3));
  auto p = mantel();
  FloatSolution s;
  s.blocks = {{"t1c1.inv", {{0.5000000001, -0.4999999}, {-0.5000001, 0.49999999}}}};
  s.bound = 0.50000000002;
  s.slacks = {-1e-9, 0.33333333, 2e-12};
  RoundReport rep;
  auto c = round_solution(p, s, 1000000, rep);
  CHECK(rep.clamped == 1);
  REQUIRE(rep.notes.size() == 1);
  CHECK(rep.notes[0].find("slack 0") != std::string::npos);
  CHECK(c.slacks[0] == 0);
  CHECK(c.blocks[0].second[0][1] == Rational(-1, 2));
  CHECK(c.blocks[0].second[1][0] == Rational(-1, 2));
  CHECK(c.bound == Rational(1, 2));
  CHECK(verify_certificate(p, c).valid);
}

TEST_CASE("bundled Mantel certificate") {
  auto cert = read_certificate_file(data_path("mantel_cert.json"));
  auto p = program_for(cert);
  auto r = verify_certificate(p, cert);
  CHECK(r.valid);
  CHECK(cert.bound == Rational(1, 2));
  CHECK(certificate_from_json(certificate_to_json(cert)).slacks == cert.slacks);
  CHECK(certificate_to_json(certificate_from_json(certificate_to_json(cert))) == certificate_to_json(cert));

  SUBCASE("perturbed Q entry") {
    auto bad = cert;
    bad.blocks[0].second[0][0] += Rational(1, 1000);
    auto v = verify_certificate(p, bad);
    CHECK_FALSE(v.valid);
    CHECK_FALSE(v.identity_ok);
    CHECK(!v.failed_rows.empty());
  }
  SUBCASE("perturbed off-diagonal entry breaks symmetry") {
    auto bad = cert;
    bad.blocks[0].second[0][1] += Rational(1, 1000);
    CHECK_FALSE(verify_certificate(p, bad).valid);
  }
  SUBCASE("negative slack") {
    auto bad = cert;
    bad.slacks[1] = Rational(-1, 3);
    bad.bound -= Rational(2, 3);
    for (std::size_t f = 0; f < bad.slacks.size(); ++f)
      if (f != 1) bad.slacks[f] -= Rational(2, 3);
    auto v = verify_certificate(p, bad);
    CHECK_FALSE(v.valid);
    CHECK_FALSE(v.nonnegative_ok);
    CHECK(v.identity_ok);
  }
  SUBCASE("raising the bound keeps validity") {
    auto up = cert;
    up.bound += Rational(1, 7);
    for (auto& s : up.slacks) s += Rational(1, 7);
    CHECK(verify_certificate(p, up).valid);
  }
  SUBCASE("wrong basis") {
    auto bad = cert;
    bad.basis_digest = "0000000000000000";
    CHECK_THROWS_AS(verify_certificate(p, bad), DimensionError);
    bad = cert;
    bad.slacks.pop_back();
    CHECK_THROWS_AS(verify_certificate(p, bad), DimensionError);
  }
}

TEST_CASE("solver output rounds to a valid certificate") {
  auto p = mantel();
  auto layout = read_meta_file(data_path("mantel.dat-s.meta"));
  auto s = import_solution_file(data_path("mantel.out"), layout);
  RoundReport rep;
  auto c = round_solution(p, s, 1000000, rep);
  CHECK(verify_certificate(p, c).valid);
  CHECK(c.bound == Rational(1, 2));
}

TEST_CASE("recomputed slacks and bound adjustment") {
  auto p = mantel();
  auto c = certificate_skeleton(p);
  RoundReport rep;
  recompute_slacks(p, c, false, rep);
  CHECK_FALSE(verify_certificate(p, c).valid);
  recompute_slacks(p, c, true, rep);
  // zero matrices: the bound is the largest objective coefficient
  CHECK(c.bound == Rational(2, 3));
  CHECK(verify_certificate(p, c).valid);
}

TEST_CASE("zero matrices verify only when the objective already meets the bound") {
  auto p = assemble_program(Theory(3, 1, Family::none(3)), 4, "constant", AssemblyConfig{});
  auto c = certificate_skeleton(p);
  c.bound = 1;
  CHECK(verify_certificate(p, c).valid);
  c.bound = Rational(1, 2);
  CHECK_FALSE(verify_certificate(p, c).valid);
}

TEST_CASE("certificate parse errors") {
  CHECK_THROWS_AS(certificate_from_json("[]"), ParseError);
  CHECK_THROWS_AS(certificate_from_json("{"), ParseError);
}
