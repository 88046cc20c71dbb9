#include "flagforge/certify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flagforge/errors.hpp"

namespace flagforge {

bool verify_psd_exact(const RationalMatrix& q) {
  const std::size_t n = q.size();
  for (const auto& row : q)
    if (row.size() != n) throw InputError("matrix is not square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (q[i][j] != q[j][i]) throw InputError("matrix is not symmetric");
  RationalMatrix a = q;
  std::vector<std::size_t> left(n);
  for (std::size_t i = 0; i < n; ++i) left[i] = i;
  while (!left.empty()) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < left.size(); ++t)
      if (a[left[t]][left[t]] > a[left[best]][left[best]]) best = t;
    const std::size_t p = left[best];
    const Rational d = a[p][p];
    if (d < 0) return false;
    if (d == 0) {
      // every remaining diagonal entry is 0, so the rest must vanish
      for (std::size_t x : left)
        for (std::size_t y : left)
          if (a[x][y] != 0) return false;
      return true;
    }
    left.erase(left.begin() + static_cast<long>(best));
    for (std::size_t x : left) {
      if (a[x][p] == 0) continue;
      Rational f = a[x][p] / d;
      for (std::size_t y : left) a[x][y] -= f * a[p][y];
    }
  }
  return true;
}

Certificate certificate_skeleton(const SdpProblem& p) {
  Certificate c;
  c.r = p.theory.r;
  c.colors = p.theory.colors;
  c.family = p.theory.family.name();
  c.m = p.m;
  c.objective = p.objective_name;
  c.types = p.type_sizes;
  c.constraints = p.constraint_groups;
  c.multiplier_size = p.multiplier_size;
  c.basis_digest = p.basis->digest();
  c.bound = 0;
  for (const auto& b : p.blocks)
    c.blocks.emplace_back(b.name, RationalMatrix(static_cast<std::size_t>(b.dim),
                                                 std::vector<Rational>(static_cast<std::size_t>(b.dim), Rational(0))));
  for (const auto& m : p.multipliers) c.multipliers.emplace_back(m.name, Rational(0));
  c.slacks.assign(p.rows(), Rational(0));
  return c;
}

SdpProblem program_for(const Certificate& cert, int threads) {
  Family fam = cert.family == "none" ? Family::none(cert.r) : parse_family(cert.family);
  Theory t(cert.r, cert.colors, fam);
  AssemblyConfig cfg;
  cfg.default_types = false;
  cfg.type_sizes = cert.types;
  cfg.default_constraints = false;
  cfg.constraint_groups = cert.constraints;
  cfg.multiplier_size = cert.multiplier_size;
  cfg.threads = threads;
  if (cert.objective == "custom") throw InputError("certificates with a custom objective need the program supplied");
  return assemble_program(t, cert.m, cert.objective, cfg);
}

namespace {

void check_shape(const SdpProblem& p, const Certificate& c) {
  if (c.basis_digest != p.basis->digest())
    throw DimensionError("basis digest " + c.basis_digest + " does not match the program's " + p.basis->digest());
  if (c.blocks.size() != p.blocks.size())
    throw DimensionError("certificate has " + std::to_string(c.blocks.size()) + " blocks, program has " +
                         std::to_string(p.blocks.size()));
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& [name, q] = c.blocks[b];
    if (name != p.blocks[b].name) throw DimensionError("block " + name + ": expected " + p.blocks[b].name);
    const std::size_t dim = static_cast<std::size_t>(p.blocks[b].dim);
    if (q.size() != dim) throw DimensionError("block " + name + ": dimension " + std::to_string(q.size()) + ", expected " + std::to_string(dim));
    for (const auto& row : q)
      if (row.size() != dim) throw DimensionError("block " + name + ": row length mismatch");
  }
  if (c.multipliers.size() != p.multipliers.size())
    throw DimensionError("certificate has " + std::to_string(c.multipliers.size()) + " multipliers, program has " +
                         std::to_string(p.multipliers.size()));
  for (std::size_t j = 0; j < p.multipliers.size(); ++j)
    if (c.multipliers[j].first != p.multipliers[j].name)
      throw DimensionError("multiplier " + c.multipliers[j].first + ": expected " + p.multipliers[j].name);
  if (c.slacks.size() != p.rows())
    throw DimensionError("certificate has " + std::to_string(c.slacks.size()) + " slacks, program has " +
                         std::to_string(p.rows()));
}

// u - obj_F - SOS_F - multipliers, without the slack.
std::vector<Rational> slack_targets(const SdpProblem& p, const Certificate& c) {
  std::vector<Rational> r(p.rows());
  for (std::size_t f = 0; f < p.rows(); ++f) {
    r[f] = c.bound - p.objective.coeffs[f];
    for (std::size_t b = 0; b < p.blocks.size(); ++b) r[f] -= sos_value(p.blocks[b], c.blocks[b].second, f);
  }
  for (std::size_t j = 0; j < p.multipliers.size(); ++j) {
    const Rational& lambda = c.multipliers[j].second;
    if (lambda == 0) continue;
    for (const auto& [f, v] : p.multipliers[j].column) r[static_cast<std::size_t>(f)] -= lambda * v;
  }
  for (auto& x : r) x.canonicalize();
  return r;
}

Rational round_entry(double x, std::uint64_t limit) {
  if (!std::isfinite(x)) throw InputError("solver output has a non-finite entry");
  return best_approximation(x, limit);
}

}  // namespace

std::vector<Rational> identity_residuals(const SdpProblem& p, const Certificate& cert) {
  check_shape(p, cert);
  auto r = slack_targets(p, cert);
  for (std::size_t f = 0; f < r.size(); ++f) {
    r[f] -= cert.slacks[f];
    r[f].canonicalize();
  }
  return r;
}

Certificate round_solution(const SdpProblem& p, const FloatSolution& s, std::uint64_t limit, RoundReport& report,
                           double tolerance) {
  if (limit < 1) throw InputError("denominator limit must be at least 1");
  Certificate c = certificate_skeleton(p);
  if (s.blocks.size() != p.blocks.size()) throw DimensionError("solution block count does not match the program");
  if (s.multipliers.size() != p.multipliers.size()) throw DimensionError("solution multiplier count does not match the program");
  if (s.slacks.size() != p.rows()) throw DimensionError("solution slack count does not match the program");
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& m = s.blocks[b].matrix;
    auto& q = c.blocks[b].second;
    if (s.blocks[b].name != c.blocks[b].first) throw DimensionError("block " + s.blocks[b].name + ": expected " + c.blocks[b].first);
    if (m.size() != q.size()) throw DimensionError("block " + s.blocks[b].name + ": dimension mismatch");
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = i; j < q.size(); ++j) {
        q[i][j] = round_entry((m[i][j] + m[j][i]) / 2, limit);
        q[j][i] = q[i][j];
      }
  }
  auto clamp = [&](double x, const std::string& what) {
    if (x < 0 && x > -tolerance) {
      ++report.clamped;
      std::ostringstream note;
      note << "clamped " << what << " = " << x << " to 0";
      report.notes.push_back(note.str());
      return Rational(0);
    }
    Rational q = round_entry(x, limit);
    if (q < 0) report.notes.push_back(what + " is negative (" + to_string(q) + ")");
    return q;
  };
  for (std::size_t j = 0; j < p.multipliers.size(); ++j) c.multipliers[j].second = clamp(s.multipliers[j], "multiplier " + p.multipliers[j].name);
  for (std::size_t f = 0; f < p.rows(); ++f) c.slacks[f] = clamp(s.slacks[f], "slack " + std::to_string(f));
  c.bound = round_entry(s.bound, limit);
  return c;
}

void recompute_slacks(const SdpProblem& p, Certificate& cert, bool adjust_bound, RoundReport& report) {
  check_shape(p, cert);
  auto t = slack_targets(p, cert);
  Rational deficit = 0;
  for (const auto& x : t)
    if (-x > deficit) deficit = -x;
  if (deficit > 0) {
    if (adjust_bound) {
      cert.bound += deficit;
      cert.bound.canonicalize();
      report.notes.push_back("raised bound by " + to_string(deficit) + " to " + to_string(cert.bound));
      for (auto& x : t) {
        x += deficit;
        x.canonicalize();
      }
    } else {
      report.notes.push_back("negative slack of " + to_string(-deficit) + " left in place");
    }
  }
  cert.slacks = std::move(t);
}

VerifyReport verify_certificate(const SdpProblem& p, const Certificate& cert) {
  check_shape(p, cert);
  VerifyReport r;
  for (const auto& [name, q] : cert.blocks) {
    bool psd = false;
    try {
      psd = verify_psd_exact(q);
    } catch (const InputError& e) {
      r.failures.push_back("block " + name + ": " + e.what());
    }
    if (!psd) {
      r.psd_ok = false;
      r.failures.push_back("block " + name + ": not positive semidefinite");
    }
  }
  for (const auto& [name, v] : cert.multipliers)
    if (v < 0) {
      r.nonnegative_ok = false;
      r.failures.push_back("multiplier " + name + ": negative value " + to_string(v));
    }
  for (std::size_t f = 0; f < cert.slacks.size(); ++f)
    if (cert.slacks[f] < 0) {
      r.nonnegative_ok = false;
      r.failures.push_back("slack " + std::to_string(f) + ": negative value " + to_string(cert.slacks[f]));
    }
  auto res = identity_residuals(p, cert);
  for (std::size_t f = 0; f < res.size(); ++f)
    if (res[f] != 0) {
      r.identity_ok = false;
      r.failed_rows.push_back(static_cast<int>(f));
      r.failures.push_back("flag row " + std::to_string(f) + ": identity off by " + to_string(res[f]));
    }
  r.valid = r.psd_ok && r.nonnegative_ok && r.identity_ok;
  return r;
}

namespace {

using nlohmann::ordered_json;

Rational rational_field(const ordered_json& j, const std::string& what) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ParseError("certificate: " + what + " must be a \"p/q\" string");
}

}  // namespace

std::string certificate_to_json(const Certificate& c) {
  ordered_json j;
  j["theory"] = {{"r", c.r}, {"colors", c.colors}, {"family", c.family}};
  j["m"] = c.m;
  j["objective"] = c.objective;
  j["types"] = c.types;
  j["constraints"] = c.constraints;
  ordered_json ms = ordered_json::object();
  for (const auto& [g, h] : c.multiplier_size) ms[g] = h;
  j["multiplier_size"] = ms;
  j["basis_digest"] = c.basis_digest;
  j["bound"] = to_string(c.bound);
  ordered_json blocks = ordered_json::object();
  for (const auto& [name, q] : c.blocks) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : q) {
      ordered_json rj = ordered_json::array();
      for (const auto& x : row) rj.push_back(to_string(x));
      rows.push_back(rj);
    }
    blocks[name] = {{"dim", q.size()}, {"entries", rows}};
  }
  j["blocks"] = blocks;
  ordered_json mult = ordered_json::object();
  for (const auto& [name, v] : c.multipliers) mult[name] = to_string(v);
  j["multipliers"] = mult;
  ordered_json sl = ordered_json::array();
  for (const auto& x : c.slacks) sl.push_back(to_string(x));
  j["slacks"] = sl;
  return j.dump(1) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("certificate: ") + e.what());
  }
  Certificate c;
  try {
    const auto& th = j.at("theory");
    c.r = th.at("r").get<int>();
    c.colors = th.at("colors").get<int>();
    c.family = th.at("family").get<std::string>();
    c.m = j.at("m").get<int>();
    c.objective = j.at("objective").get<std::string>();
    c.types = j.at("types").get<std::vector<int>>();
    c.constraints = j.at("constraints").get<std::vector<std::string>>();
    if (j.contains("multiplier_size"))
      for (auto it = j["multiplier_size"].begin(); it != j["multiplier_size"].end(); ++it)
        c.multiplier_size[it.key()] = it.value().get<int>();
    c.basis_digest = j.at("basis_digest").get<std::string>();
    c.bound = rational_field(j.at("bound"), "bound");
    for (auto it = j.at("blocks").begin(); it != j.at("blocks").end(); ++it) {
      std::size_t dim = it.value().at("dim").get<std::size_t>();
      const auto& rows = it.value().at("entries");
      if (rows.size() != dim) throw DimensionError("block " + it.key() + ": expected " + std::to_string(dim) + " rows");
      RationalMatrix q;
      for (const auto& row : rows) {
        if (row.size() != dim) throw DimensionError("block " + it.key() + ": row length mismatch");
        std::vector<Rational> r;
        for (const auto& x : row) r.push_back(rational_field(x, "block entry"));
        q.push_back(std::move(r));
      }
      c.blocks.emplace_back(it.key(), std::move(q));
    }
    for (auto it = j.at("multipliers").begin(); it != j.at("multipliers").end(); ++it)
      c.multipliers.emplace_back(it.key(), rational_field(it.value(), "multiplier"));
    for (const auto& x : j.at("slacks")) c.slacks.push_back(rational_field(x, "slack"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("certificate: ") + e.what());
  }
  return c;
}

Certificate read_certificate_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return certificate_from_json(buf.str());
}

void write_certificate_file(const Certificate& cert, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << certificate_to_json(cert);
  if (!out) throw InputError("write failed for " + path);
}

}  // namespace flagforge
