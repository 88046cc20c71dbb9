#include "cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli/output.hpp"
#include "flagforge/certify.hpp"
#include "flagforge/constructions.hpp"
#include "flagforge/errors.hpp"
#include "flagforge/families.hpp"
#include "flagforge/flags.hpp"
#include "flagforge/hypergraph_ops.hpp"
#include "flagforge/partitions.hpp"
#include "flagforge/sdp.hpp"
#include "flagforge/sdpa_io.hpp"
#include "flagforge/search.hpp"

namespace flagforge::cli {

namespace {

// Raised when a verification step fails; maps to exit code 3.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string format = "text";
  int threads = 1;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "csv", "json-lines"}));
  app->add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1, 1024));
  app->add_option("--seed", c.seed, "Random seed");
}

struct TheoryOpts {
  int r = 3;
  int colors = 3;
  std::string family = "k4m,c5m";
};

void add_theory(CLI::App* app, TheoryOpts& t) {
  app->add_option("--r", t.r, "Uniformity (2 or 3)")->check(CLI::Range(2, 3));
  app->add_option("--colors", t.colors, "Number of vertex colors")->check(CLI::Range(1, 9));
  app->add_option("--family", t.family, "Forbidden family keywords, or none");
}

Family make_family(const std::string& text, int r) {
  if (text == "none") return Family::none(r);
  Family f = parse_family(text);
  if (f.uniformity() != r)
    throw InputError("family '" + text + "' has uniformity " + std::to_string(f.uniformity()) + ", expected " +
                     std::to_string(r));
  return f;
}

Theory make_theory(const TheoryOpts& t) { return Theory(t.r, t.colors, make_family(t.family, t.r)); }

std::string edge_list(const Hypergraph& h) {
  std::string s;
  for (const auto& e : h.edges()) {
    if (!s.empty()) s += " ";
    for (int i = 0; i < e.size(); ++i) s += (i ? "-" : "") + std::to_string(e[i]);
  }
  return s;
}

std::string parts_string(const Partition3& p) {
  std::string s;
  for (std::size_t i = 0; i < p.parts.size(); ++i) s += (i ? " " : "") + std::to_string(p.parts[i]);
  return s;
}

Partition3 parse_parts(const std::string& text) {
  Partition3 p;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok.size() != 1 || tok[0] < '1' || tok[0] > '3') throw InputError("part indices must be 1, 2 or 3, got '" + tok + "'");
    p.parts.push_back(tok[0] - '0');
  }
  return p;
}

Rational parse_rational_arg(const std::string& what, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception&) {
    throw InputError("bad rational for " + what + ": '" + text + "'");
  }
}

std::string cache_path(const std::string& name) {
  const char* dir = std::getenv("FLAGFORGE_CACHE_DIR");
  if (!dir || !*dir) return {};
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

std::string file_safe(std::string s) {
  for (auto& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return s;
}

// norms ----------------------------------------------------------------------

struct NormsOpts {
  Common common;
  std::string input;
  std::vector<int> extra;
};

void cmd_norms(const NormsOpts& o, std::ostream& out) {
  auto doc = read_hypergraph_file(o.input);
  const auto& h = doc.graph;
  Emitter em(out, o.common.format);
  Record r{num("l1", lp_norm(h, 1)), num("l2", lp_norm(h, 2))};
  if (h.uniformity() == 3) r.push_back(num("s2", count_s2(h)));
  for (int p : o.extra) {
    if (p < 1) throw InputError("--p must be positive");
    r.push_back(num("l" + std::to_string(p), lp_norm(h, p)));
  }
  em.emit(r);
}

// construct ------------------------------------------------------------------

struct ConstructOpts {
  Common common;
  long n = 0;
  std::string tree;
  int n1 = 0, n2 = 0;
  std::string output;
  std::string check_family;
  bool emit_graph = false;
};

void finish_construction(const ConstructOpts& o, const std::string& kind, const HypergraphDocument& doc, Record head,
                         std::ostream& out) {
  const auto& h = doc.graph;
  if (!o.output.empty()) {
    std::ofstream f(o.output);
    if (!f) throw InputError("cannot write " + o.output);
    write_document(f, doc);
  }
  if (o.emit_graph) {
    if (o.common.format != "text") throw InputError("--emit needs --format text; use --output for other formats");
    write_document(out, doc);
  }
  Record r{text("kind", kind)};
  r.insert(r.end(), head.begin(), head.end());
  r.push_back(num("n", h.order()));
  r.push_back(num("edges", static_cast<long long>(h.size())));
  r.push_back(num("l2", lp_norm(h, 2)));
  r.push_back(num("s2", count_s2(h)));
  if (!o.check_family.empty()) r.push_back(flag("free", is_family_free(h, make_family(o.check_family, 3))));
  Emitter(out, o.common.format).emit(r);
}

void cmd_construct_trec(const ConstructOpts& o, std::ostream& out) {
  PartTree tree;
  if (!o.tree.empty()) {
    tree = parse_part_tree(o.tree);
  } else {
    if (o.n < 1) throw InputError("give --n or --tree");
    if (o.n > kTrecExactLimit) throw InputError("--n is limited to " + std::to_string(kTrecExactLimit));
    tree = optimal_trec_tree(o.n);
  }
  validate(tree);
  HypergraphDocument doc{build_t_rec(tree), {}, top_level_parts(tree), std::nullopt};
  finish_construction(o, "trec", doc, {text("tree", to_string(tree))}, out);
}

void cmd_construct_bip(const ConstructOpts& o, std::ostream& out) {
  if (o.n1 < 0 || o.n2 < 0) throw InputError("part sizes must be nonnegative");
  HypergraphDocument doc{build_bipartite_B(o.n1, o.n2), {}, {}, std::nullopt};
  std::vector<int> parts(static_cast<std::size_t>(o.n1 + o.n2), 2);
  std::fill(parts.begin(), parts.begin() + o.n1, 1);
  doc.parts = parts;
  finish_construction(o, "bip", doc, {num("n1", o.n1), num("n2", o.n2)}, out);
}

// trec-table -----------------------------------------------------------------

struct TrecTableOpts {
  Common common;
  long min_n = 1;
  long max_n = 30;
};

void cmd_trec_table(const TrecTableOpts& o, std::ostream& out) {
  if (o.min_n < 1 || o.max_n < o.min_n) throw InputError("need 1 <= --min-n <= --max-n");
  if (o.max_n > kTrecExactLimit) throw InputError("--max-n is limited to " + std::to_string(kTrecExactLimit));
  Emitter em(out, o.common.format);
  for (long n = o.min_n; n <= o.max_n; ++n) {
    auto t = t_rec_2(n);
    auto s = t_rec_s2(n);
    Integer n4 = Integer(n) * n * n * n;
    Rational ratio(t.value, n4);
    ratio.canonicalize();
    std::string split = t.split ? std::to_string((*t.split)[0]) + " " + std::to_string((*t.split)[1]) + " " +
                                      std::to_string((*t.split)[2])
                                : "-";
    em.emit({num("n", n), num("t2", t.value), decimal("t2_over_n4", to_decimal(ratio, 10)), text("split", split),
             num("s2", s.value)});
  }
}

// partition ------------------------------------------------------------------

struct PartitionOpts {
  Common common;
  std::string input;
  std::string parts;
  std::string family;
  int restarts = 20;
  std::string alpha;
};

Partition3 partition_of(const PartitionOpts& o, const HypergraphDocument& doc) {
  Partition3 p = o.parts.empty() ? Partition3{doc.parts} : parse_parts(o.parts);
  if (p.parts.empty()) throw InputError("no partition: add a 'parts:' line to the file or pass --parts");
  validate(p, doc.graph.order());
  return p;
}

Record metrics_record(const Hypergraph& h, const Partition3& p) {
  auto m = metrics(h, p);
  return {num("n", m.n),
          num("edges", static_cast<long long>(h.size())),
          num("transversal", m.transversal),
          rational("mu", m.mu),
          decimal("mu_decimal", to_decimal(m.mu, 6)),
          num("bad", static_cast<long long>(m.bad_edges.size())),
          num("missing", static_cast<long long>(m.missing_triples.size())),
          num("inside1", m.inside[0]),
          num("inside2", m.inside[1]),
          num("inside3", m.inside[2]),
          num("bad_s2", m.bad_s2),
          num("missing_s2", m.missing_s2),
          num("s2_transversal", m.s2_transversal),
          num("s2_complete", m.s2_complete)};
}

void cmd_partition_analyze(const PartitionOpts& o, std::ostream& out) {
  auto doc = read_hypergraph_file(o.input);
  if (doc.graph.uniformity() != 3) throw InputError("partition analysis needs a 3-graph");
  auto p = partition_of(o, doc);
  Record r{text("parts", parts_string(p))};
  auto m = metrics_record(doc.graph, p);
  r.insert(r.end(), m.begin(), m.end());
  std::optional<Family> fam;
  if (!o.family.empty()) fam = make_family(o.family, 3);
  auto rep = check_prop33(doc.graph, p, fam ? &*fam : nullptr);
  r.push_back(rational("prop33_value", rep.value));
  r.push_back(flag("prop33_satisfied", rep.satisfied));
  r.push_back(flag("locally_maximal", rep.locally_maximal));
  r.push_back(flag("mu_hypothesis", rep.mu_hypothesis));
  if (rep.family_free) r.push_back(flag("family_free", *rep.family_free));
  r.push_back(flag("hypotheses_hold", rep.hypotheses_hold));
  r.push_back(flag("red_alert", rep.red_alert));
  Emitter(out, o.common.format).emit(r);
}

void cmd_partition_localmax(const PartitionOpts& o, std::ostream& out) {
  auto doc = read_hypergraph_file(o.input);
  if (doc.graph.uniformity() != 3) throw InputError("partition search needs a 3-graph");
  const int n = doc.graph.order();
  Partition3 start;
  bool given = !o.parts.empty() || !doc.parts.empty();
  if (given) {
    start = partition_of(o, doc);
  } else {
    std::mt19937_64 rng(o.common.seed);
    std::uniform_int_distribution<int> pick(1, 3);
    for (int v = 0; v < n; ++v) start.parts.push_back(pick(rng));
  }
  auto p = local_max_search(doc.graph, start);
  Record r{text("start", parts_string(start)), text("parts", parts_string(p))};
  auto m = metrics_record(doc.graph, p);
  r.insert(r.end(), m.begin(), m.end());
  r.push_back(flag("locally_maximal", is_locally_maximal(doc.graph, p)));
  Emitter(out, o.common.format).emit(r);
}

void cmd_partition_maxcut(const PartitionOpts& o, std::ostream& out) {
  auto doc = read_hypergraph_file(o.input);
  if (doc.graph.uniformity() != 3) throw InputError("max cut needs a 3-graph");
  if (o.restarts < 1) throw InputError("--restarts must be positive");
  auto res = max_cut(doc.graph, o.restarts, o.common.seed, o.common.threads);
  Record r{text("parts", parts_string(res.partition))};
  auto m = metrics_record(doc.graph, res.partition);
  r.insert(r.end(), m.begin(), m.end());
  r.push_back(flag("exhaustive", res.exhaustive));
  Emitter(out, o.common.format).emit(r);
}

void cmd_partition_window(const PartitionOpts& o, std::ostream& out) {
  Rational alpha = o.alpha.empty() ? alpha_32() : parse_rational_arg("--alpha", o.alpha);
  auto w = part_size_window(alpha);
  std::ostringstream lo, hi;
  lo.precision(12);
  hi.precision(12);
  lo << std::fixed << w.xmin;
  hi << std::fixed << w.xmax;
  Emitter(out, o.common.format)
      .emit({rational("alpha", alpha), decimal("xmin", lo.str()), decimal("xmax", hi.str()),
             flag("inside_fifth_half", w.inside_fifth_half)});
}

// flags ----------------------------------------------------------------------

struct FlagsOpts {
  Common common;
  TheoryOpts theory;
  int m = 3;
  int type_size = 0;
  int type_index = 0;
  std::string dump;
};

void cmd_flags_enumerate(const FlagsOpts& o, std::ostream& out) {
  Theory t = make_theory(o.theory);
  if (o.m < 0 || o.m > 8) throw InputError("--m must lie in 0..8");
  TypeSigma sigma = TypeSigma::empty(t.r);
  if (o.type_size > 0) {
    auto types = cached_basis(t, o.type_size, TypeSigma::empty(t.r), o.common.threads);
    if (o.type_index < 0 || static_cast<std::size_t>(o.type_index) >= types->size())
      throw InputError("--type-index out of range (there are " + std::to_string(types->size()) + " types)");
    const auto& f = types->flags[static_cast<std::size_t>(o.type_index)];
    sigma = TypeSigma{f.graph, f.colors};
  }
  auto basis = cached_basis(t, o.m, sigma, o.common.threads);
  std::string dump = o.dump;
  if (dump.empty()) {
    auto cached = cache_path("basis-" + file_safe(t.id()) + "-" + type_name(sigma) + "-m" + std::to_string(o.m) + ".txt");
    if (!cached.empty() && !std::filesystem::exists(cached)) dump = cached;
  }
  if (!dump.empty()) {
    std::ofstream f(dump);
    if (!f) throw InputError("cannot write " + dump);
    write_basis(f, *basis);
  }
  Emitter(out, o.common.format)
      .emit({num("count", static_cast<long long>(basis->size())), text("digest", basis->digest()), num("m", o.m),
             text("type", type_name(sigma))});
}

// sdp / cert -----------------------------------------------------------------

struct ProgramOpts {
  Common common;
  TheoryOpts theory;
  int m = 4;
  std::string objective = "prop34";
  std::string config;
  std::string custom;
  std::string output;
};

void add_program(CLI::App* app, ProgramOpts& o) {
  add_common(app, o.common);
  add_theory(app, o.theory);
  app->add_option("--m", o.m, "Flag size")->check(CLI::Range(1, 6));
  app->add_option("--objective", o.objective, "prop34, edge-density, s2-density, constant or custom");
  app->add_option("--config", o.config, "JSON assembly config file");
  app->add_option("--custom", o.custom, "Objective vector file (one rational per basis flag)");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

SdpProblem build_program(const ProgramOpts& o) {
  Theory t = make_theory(o.theory);
  AssemblyConfig cfg = o.config.empty() ? AssemblyConfig{} : parse_assembly_config(slurp(o.config));
  cfg.threads = o.common.threads;
  if (o.objective == "custom") {
    if (o.custom.empty()) throw InputError("--objective custom needs --custom FILE");
    auto basis = cached_basis(t, o.m, TypeSigma::empty(t.r), o.common.threads);
    DensityVector v(basis);
    std::istringstream in(slurp(o.custom));
    std::string tok;
    std::size_t i = 0;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::getline(in, tok);
        continue;
      }
      if (i >= v.coeffs.size()) throw InputError("custom vector is longer than the basis (" + std::to_string(v.coeffs.size()) + ")");
      v.coeffs[i++] = parse_rational_arg("custom vector", tok);
    }
    if (i != v.coeffs.size()) throw InputError("custom vector has " + std::to_string(i) + " entries, basis has " + std::to_string(v.coeffs.size()));
    return assemble_program(t, o.m, "custom", cfg, &v);
  }
  return assemble_program(t, o.m, o.objective, cfg);
}

Record program_record(const SdpProblem& p) {
  std::string dims;
  for (const auto& b : p.blocks) dims += (dims.empty() ? "" : " ") + b.name + ":" + std::to_string(b.dim);
  return {num("rows", static_cast<long long>(p.rows())),
          num("blocks", static_cast<long long>(p.blocks.size())),
          text("block_dims", dims.empty() ? "-" : dims),
          num("constraints", static_cast<long long>(p.constraints.size())),
          num("multipliers", static_cast<long long>(p.multipliers.size())),
          num("diagonal", p.diagonal_size()),
          text("digest", p.basis->digest())};
}

void cmd_sdp_assemble(const ProgramOpts& o, std::ostream& out) {
  auto p = build_program(o);
  Emitter(out, o.common.format).emit(program_record(p));
}

void cmd_sdp_export(const ProgramOpts& o, std::ostream& out) {
  if (o.output.empty()) throw InputError("--output is required");
  auto p = build_program(o);
  export_sdpa_files(p, o.output);
  Record r{text("file", o.output), text("meta", o.output + ".meta"), num("scale", export_scale(p))};
  auto pr = program_record(p);
  r.insert(r.end(), pr.begin(), pr.end());
  Emitter(out, o.common.format).emit(r);
}

struct CertOpts {
  ProgramOpts program;
  std::string cert;
  std::string solution;
  std::string meta;
  std::uint64_t limit = 1000000;
  bool adjust_bound = false;
  bool recompute = false;
  double tolerance = 1e-6;
};

void report_failures(const VerifyReport& v, std::ostream& err) {
  std::size_t shown = 0;
  for (const auto& f : v.failures) {
    if (++shown > 20) {
      err << "warn: " << (v.failures.size() - 20) << " more failures not shown\n";
      break;
    }
    err << "warn: " << f << "\n";
  }
}

void cmd_cert_verify(const CertOpts& o, std::ostream& out, std::ostream& err) {
  if (o.cert.empty()) throw InputError("--cert is required");
  auto cert = read_certificate_file(o.cert);
  auto p = program_for(cert, o.program.common.threads);
  auto v = verify_certificate(p, cert);
  Emitter(out, o.program.common.format)
      .emit({rational("bound", cert.bound), flag("valid", v.valid), flag("psd", v.psd_ok),
             flag("nonnegative", v.nonnegative_ok), flag("identity", v.identity_ok),
             num("failed_rows", static_cast<long long>(v.failed_rows.size()))});
  if (!v.valid) {
    report_failures(v, err);
    throw VerificationFailure("certificate " + o.cert + " does not verify");
  }
}

void cmd_cert_round(const CertOpts& o, std::ostream& out, std::ostream& err) {
  if (o.solution.empty()) throw InputError("--solution is required");
  if (o.program.output.empty()) throw InputError("--output is required");
  auto p = build_program(o.program);
  std::string meta = o.meta;
  if (meta.empty()) throw InputError("--meta is required (the .meta file written by sdp export)");
  auto layout = read_meta_file(meta);
  if (layout.basis_digest != p.basis->digest()) throw DimensionError("meta file " + meta + " belongs to a different basis");
  auto expect = sdpa_layout(p);
  if (layout.names != expect.names || layout.sizes != expect.sizes)
    throw DimensionError("meta file " + meta + " describes different blocks than the assembled program");
  auto sol = import_solution_file(o.solution, layout);
  RoundReport rep;
  auto cert = round_solution(p, sol, o.limit, rep, o.tolerance);
  if (o.recompute || o.adjust_bound) recompute_slacks(p, cert, o.adjust_bound, rep);
  for (const auto& n : rep.notes) err << "warn: " << n << "\n";
  write_certificate_file(cert, o.program.output);
  auto v = verify_certificate(p, cert);
  Emitter(out, o.program.common.format)
      .emit({rational("bound", cert.bound), flag("valid", v.valid), num("clamped", rep.clamped),
             text("file", o.program.output)});
  if (!v.valid) {
    report_failures(v, err);
    throw VerificationFailure("rounded certificate does not verify");
  }
}

// search ---------------------------------------------------------------------

struct SearchOpts {
  Common common;
  int n = 5;
  int n_min = 4;
  int n_max = 6;
  std::string family = "k4m,c5m";
  std::string objective = "s2count";
  std::string mode = "exhaustive";
  int restarts = 200;
  std::string checkpoint;
};

SearchTask make_task(const SearchOpts& o, int n) {
  SearchTask t;
  t.n = n;
  t.family = make_family(o.family, 3);
  t.objective = parse_search_objective(o.objective);
  t.mode = parse_search_mode(o.mode);
  t.threads = o.common.threads;
  t.seed = o.common.seed;
  t.restarts = o.restarts;
  if (o.checkpoint == "auto") {
    t.checkpoint = cache_path("search-n" + std::to_string(n) + "-" + file_safe(t.family.name()) + "-" + o.objective + ".ckpt");
    if (t.checkpoint.empty()) throw InputError("--checkpoint auto needs FLAGFORGE_CACHE_DIR");
  } else {
    t.checkpoint = o.checkpoint;
  }
  return t;
}

void cmd_search_max(const SearchOpts& o, std::ostream& out, std::ostream& err) {
  auto t = make_task(o, o.n);
  if (t.mode == SearchMode::exhaustive && o.n >= 7) err << "warn: exhaustive search at n = " << o.n << " may take a while\n";
  auto r = search_max(t);
  if (r.resumed) err << "warn: resumed from checkpoint " << t.checkpoint << "\n";
  Emitter(out, o.common.format)
      .emit({num("n", o.n), text("family", t.family.name()), text("objective", o.objective), text("mode", o.mode),
             num("value", r.value), flag("exact", r.exact), num("classes", static_cast<long long>(r.classes_visited)),
             num("witness_edges", static_cast<long long>(r.witness.size())), text("witness", edge_list(r.witness))});
}

void cmd_search_report(const SearchOpts& o, std::ostream& out) {
  if (o.n_min < 4 || o.n_max < o.n_min) throw InputError("need 4 <= --n-min <= --n-max");
  if (o.objective != "s2count") throw InputError("the density report uses the s2count objective");
  std::vector<DensityRow> rows;
  for (int n = o.n_min; n <= o.n_max; ++n) rows.push_back(density_row(search_max(make_task(o, n)), n));
  write_density_report(out, rows, o.common.format);
}

// fact22 / budget ------------------------------------------------------------

struct Fact22Opts {
  Common common;
  std::string step = "1/200";
  bool exact = false;
};

void cmd_fact22(const Fact22Opts& o, std::ostream& out) {
  Rational step = parse_rational_arg("--step", o.step);
  if (step <= 0 || step > 1) throw InputError("--step must lie in (0, 1]");
  Rational inv = 1 / step;
  inv.canonicalize();
  if (inv.get_den() != 1) throw InputError("--step must be 1/N");
  auto s = fact22_grid(step, o.exact);
  Rational third(1, 3);
  auto c = fact22_check(SimplexPoint<Rational>{{third, third, third}});
  Rational gap1 = c.rhs1 - c.lhs1, gap3 = c.rhs3 - c.lhs3;
  gap1.canonicalize();
  gap3.canonicalize();
  Emitter(out, o.common.format)
      .emit({rational("step", step), flag("exact", o.exact), num("points", s.points), num("checked1", s.checked1),
             num("checked3", s.checked3), num("violations1", s.violations1), num("violations3", s.violations3),
             rational("center_gap1", gap1), rational("center_gap3", gap3)});
  if (s.violations1 || s.violations3) throw VerificationFailure("simplex inequality grid has violations");
}

struct BudgetOpts {
  Common common;
  std::string eps;
  long n = 0;
  long m = 0;
};

void cmd_budget(const BudgetOpts& o, std::ostream& out) {
  Rational eps = parse_rational_arg("--eps", o.eps);
  auto b = stability_budget(eps);
  std::ostringstream ps;
  ps.precision(12);
  ps << std::fixed << b.part_slack;
  Record r{rational("eps", b.eps),
           rational("delta", b.delta),
           decimal("part_slack", ps.str()),
           rational("edge_slack", b.edge_slack),
           rational("inner_slack", b.inner_slack),
           rational("removal_ratio", b.removal_ratio),
           flag("chain_holds", b.chain_holds),
           flag("induction_holds", b.induction_holds)};
  if (o.n > 0) {
    r.push_back(num("n", o.n));
    r.push_back(num("m", o.m));
    r.push_back(rational("removal_budget", b.removal_budget(o.n, o.m)));
    r.push_back(flag("base_case_holds", b.base_case_holds(o.n, o.m)));
  }
  Emitter(out, o.common.format).emit(r);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"flagforge: hypergraph densities, flag algebra programs and exact certificates", "flagforge"};
  app.require_subcommand(1);

  NormsOpts norms;
  auto* c_norms = app.add_subcommand("norms", "l_p norms and the S2 count of a hypergraph file");
  add_common(c_norms, norms.common);
  c_norms->add_option("file", norms.input, "Hypergraph file")->required();
  c_norms->add_option("--p", norms.extra, "Extra exponents");

  ConstructOpts construct;
  auto* c_construct = app.add_subcommand("construct", "Build a construction");
  c_construct->require_subcommand(1);
  auto* c_trec = c_construct->add_subcommand("trec", "Recursive tripartite construction");
  auto* c_bip = c_construct->add_subcommand("bip", "The bipartite construction B(V1, V2)");
  for (auto* c : {c_trec, c_bip}) {
    add_common(c, construct.common);
    c->add_option("--output", construct.output, "Write the hypergraph file here");
    c->add_option("--check-family", construct.check_family, "Report freeness from this family");
    c->add_flag("--emit", construct.emit_graph, "Print the hypergraph before the stats (text format)");
  }
  c_trec->add_option("--n", construct.n, "Vertices (optimal tree)");
  c_trec->add_option("--tree", construct.tree, "Part tree, e.g. \"(9: (3: 1 1 1) 3 3)\"");
  c_bip->add_option("--n1", construct.n1, "|V1|")->required();
  c_bip->add_option("--n2", construct.n2, "|V2|")->required();

  TrecTableOpts table;
  auto* c_table = app.add_subcommand("trec-table", "Table of the T_rec recurrences");
  add_common(c_table, table.common);
  c_table->add_option("--max-n", table.max_n, "Largest n")->required();
  c_table->add_option("--min-n", table.min_n, "Smallest n");

  PartitionOpts part;
  auto* c_part = app.add_subcommand("partition", "Partition statistics and searches");
  c_part->require_subcommand(1);
  auto* c_analyze = c_part->add_subcommand("analyze", "Metrics of a given partition");
  auto* c_localmax = c_part->add_subcommand("localmax", "Local search from a given or random partition");
  auto* c_maxcut = c_part->add_subcommand("maxcut", "Maximum transversal partition");
  auto* c_window = c_part->add_subcommand("window", "Feasible part-size window");
  for (auto* c : {c_analyze, c_localmax, c_maxcut}) {
    add_common(c, part.common);
    c->add_option("file", part.input, "Hypergraph file")->required();
  }
  add_common(c_window, part.common);
  for (auto* c : {c_analyze, c_localmax}) c->add_option("--parts", part.parts, "Part index per vertex, e.g. \"1 2 3 1\"");
  c_analyze->add_option("--family", part.family, "Also check freeness from this family");
  c_maxcut->add_option("--restarts", part.restarts, "Random starts for n > 12");
  c_window->add_option("--alpha", part.alpha, "Lower bound on the max-cut ratio (default: 675468913113/3407872000000)");

  FlagsOpts flags;
  auto* c_flags = app.add_subcommand("flags", "Flag bases");
  c_flags->require_subcommand(1);
  auto* c_enum = c_flags->add_subcommand("enumerate", "Enumerate F_m^sigma");
  add_common(c_enum, flags.common);
  add_theory(c_enum, flags.theory);
  c_enum->add_option("--m", flags.m, "Flag size")->required();
  c_enum->add_option("--type-size", flags.type_size, "Type size (0 = untyped)");
  c_enum->add_option("--type-index", flags.type_index, "Which type of that size, in basis order");
  c_enum->add_option("--dump", flags.dump, "Write the basis here");

  ProgramOpts sdp;
  auto* c_sdp = app.add_subcommand("sdp", "Semidefinite programs");
  c_sdp->require_subcommand(1);
  auto* c_assemble = c_sdp->add_subcommand("assemble", "Assemble and summarize a program");
  auto* c_export = c_sdp->add_subcommand("export", "Write a .dat-s file and its .meta sidecar");
  add_program(c_assemble, sdp);
  add_program(c_export, sdp);
  c_export->add_option("--output", sdp.output, "Output .dat-s path")->required();

  CertOpts cert;
  auto* c_cert = app.add_subcommand("cert", "Certificates");
  c_cert->require_subcommand(1);
  auto* c_verify = c_cert->add_subcommand("verify", "Verify a certificate exactly");
  auto* c_round = c_cert->add_subcommand("round", "Round solver output to a certificate");
  add_common(c_verify, cert.program.common);
  c_verify->add_option("--cert", cert.cert, "Certificate file")->required();
  add_program(c_round, cert.program);
  c_round->add_option("--solution", cert.solution, "Solver output")->required();
  c_round->add_option("--meta", cert.meta, "Sidecar written by sdp export")->required();
  c_round->add_option("--limit", cert.limit, "Denominator limit")->check(CLI::PositiveNumber);
  c_round->add_option("--tolerance", cert.tolerance, "Clamp negative values above -tolerance");
  c_round->add_option("--output", cert.program.output, "Certificate path")->required();
  c_round->add_flag("--recompute-slacks", cert.recompute, "Set slacks from the exact identity");
  c_round->add_flag("--adjust-bound", cert.adjust_bound, "Raise the bound to absorb negative slacks");

  SearchOpts search;
  auto* c_search = app.add_subcommand("search", "Extremal search");
  c_search->require_subcommand(1);
  auto* c_max = c_search->add_subcommand("max", "Maximize an objective over family-free 3-graphs");
  auto* c_report = c_search->add_subcommand("report", "Density table of ex(n, S2, F)");
  for (auto* c : {c_max, c_report}) {
    add_common(c, search.common);
    c->add_option("--family", search.family, "Forbidden family");
    c->add_option("--mode", search.mode, "exhaustive or augmenting");
    c->add_option("--restarts", search.restarts, "Random completions in augmenting mode");
    c->add_option("--checkpoint", search.checkpoint, "Checkpoint file, or 'auto' for FLAGFORGE_CACHE_DIR");
    c->add_option("--objective", search.objective, "edges, l2norm or s2count");
  }
  c_max->add_option("--n", search.n, "Vertices")->required();
  c_report->add_option("--n-min", search.n_min, "Smallest n");
  c_report->add_option("--n-max", search.n_max, "Largest n");

  Fact22Opts fact;
  auto* c_fact = app.add_subcommand("fact22", "The two simplex inequalities");
  c_fact->require_subcommand(1);
  auto* c_grid = c_fact->add_subcommand("grid", "Check every grid point");
  add_common(c_grid, fact.common);
  c_grid->add_option("--step", fact.step, "Grid step 1/N");
  c_grid->add_flag("--exact", fact.exact, "Rational arithmetic");

  BudgetOpts budget;
  auto* c_budget = app.add_subcommand("budget", "Stability induction constants");
  add_common(c_budget, budget.common);
  c_budget->add_option("--eps", budget.eps, "epsilon")->required();
  c_budget->add_option("--n", budget.n, "Also evaluate the removal budget at n");
  c_budget->add_option("--m", budget.m, "... and m");

  std::vector<std::string> argv_store{"flagforge"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (c_norms->parsed()) cmd_norms(norms, out);
    else if (c_trec->parsed()) cmd_construct_trec(construct, out);
    else if (c_bip->parsed()) cmd_construct_bip(construct, out);
    else if (c_table->parsed()) cmd_trec_table(table, out);
    else if (c_analyze->parsed()) cmd_partition_analyze(part, out);
    else if (c_localmax->parsed()) cmd_partition_localmax(part, out);
    else if (c_maxcut->parsed()) cmd_partition_maxcut(part, out);
    else if (c_window->parsed()) cmd_partition_window(part, out);
    else if (c_enum->parsed()) cmd_flags_enumerate(flags, out);
    else if (c_assemble->parsed()) cmd_sdp_assemble(sdp, out);
    else if (c_export->parsed()) cmd_sdp_export(sdp, out);
    else if (c_verify->parsed()) cmd_cert_verify(cert, out, err);
    else if (c_round->parsed()) cmd_cert_round(cert, out, err);
    else if (c_max->parsed()) cmd_search_max(search, out, err);
    else if (c_report->parsed()) cmd_search_report(search, out);
    else if (c_grid->parsed()) cmd_fact22(fact, out);
    else if (c_budget->parsed()) cmd_budget(budget, out);
  } catch (const VerificationFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

}  // namespace flagforge::cli
