#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/cli.hpp"
#include "flagforge/certify.hpp"

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = flagforge::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data_path(const std::string& name) {
  const char* dir = std::getenv("FLAGFORGE_TEST_DATA");
  return std::string(dir ? dir : "tests/data") + "/" + name;
}

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "flagforge_cli_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

// key -> value text of the first record, whatever the format
std::map<std::string, std::string> first_record(const std::string& output, const std::string& format) {
  std::map<std::string, std::string> kv;
  std::istringstream in(output);
  std::string line;
  if (format == "text") {
    std::getline(in, line);
    std::size_t i = 0;
    while (i < line.size()) {
      auto eq = line.find('=', i);
      if (eq == std::string::npos) break;
      std::string key = line.substr(i, eq - i);
      std::size_t end;
      if (eq + 1 < line.size() && line[eq + 1] == '"') {
        end = line.find('"', eq + 2);
        kv[key] = line.substr(eq + 2, end - eq - 2);
        ++end;
      } else {
        end = std::min(line.find(' ', eq), line.size());
        kv[key] = line.substr(eq + 1, end - eq - 1);
      }
      i = end + 1;
    }
  } else if (format == "csv") {
    std::string header, values;
    std::getline(in, header);
    std::getline(in, values);
    auto keys = csv_split(header), cells = csv_split(values);
    for (std::size_t i = 0; i < keys.size() && i < cells.size(); ++i) kv[keys[i]] = cells[i];
  } else {
    std::getline(in, line);
    auto j = nlohmann::json::parse(line);
    for (auto it = j.begin(); it != j.end(); ++it)
      kv[it.key()] = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
  }
  return kv;
}

}  // namespace

TEST_CASE("documented examples") {
  auto edge = temp_path("edge.txt");
  write(edge, "3 3 1\n0 1 2\n");
  auto a = run({"norms", edge});
  CHECK(a.code == 0);
  CHECK(a.out == "l1=3 l2=3 s2=0\n");
  auto b = run({"flags", "enumerate", "--m", "3", "--colors", "3", "--family", "k4m,c5m"});
  CHECK(b.code == 0);
  CHECK(b.out.rfind("count=20", 0) == 0);
  auto c = run({"cert", "verify", "--cert", data_path("mantel_cert.json")});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("bound=1/2 valid=true", 0) == 0);
}

TEST_CASE("exit codes and prefixes") {
  auto a = run({"norms", "/nonexistent/file"});
  CHECK(a.code == 2);
  CHECK(a.err.rfind("error:", 0) == 0);
  CHECK(run({"flags", "enumerate", "--m", "3", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"norms", "a", "--format", "xml"}).code == 2);
  CHECK(run({"search", "max", "--n", "12"}).code == 2);
  CHECK(run({"--help"}).code == 0);

  auto cert = flagforge::read_certificate_file(data_path("mantel_cert.json"));
  cert.blocks[0].second[0][0] += flagforge::Rational(1, 1000);
  auto bad = temp_path("bad_cert.json");
  flagforge::write_certificate_file(cert, bad);
  auto v = run({"cert", "verify", "--cert", bad});
  CHECK(v.code == 3);
  CHECK(v.out.find("valid=false") != std::string::npos);
  CHECK(v.err.find("warn: flag row") != std::string::npos);
  CHECK(v.err.find("error:") != std::string::npos);
}

TEST_CASE("formats carry the same numbers") {
  auto k = temp_path("k222.txt");
  REQUIRE(run({"construct", "trec", "--tree", "(6: 2 2 2)", "--output", k}).code == 0);
  std::vector<std::vector<std::string>> commands{
      {"norms", k, "--p", "3"},
      {"construct", "bip", "--n1", "4", "--n2", "3"},
      {"trec-table", "--max-n", "7", "--min-n", "7"},
      {"partition", "analyze", k, "--family", "k4m,c5m"},
      {"partition", "maxcut", k},
      {"partition", "window"},
      {"flags", "enumerate", "--m", "2"},
      {"sdp", "assemble", "--r", "2", "--colors", "1", "--family", "k3", "--m", "3", "--objective", "edge-density"},
      {"search", "max", "--n", "5"},
      {"fact22", "grid", "--step", "1/20", "--exact"},
      {"budget", "--eps", "1/50"},
  };
  for (const auto& cmd : commands) {
    std::map<std::string, std::string> reference;
    for (std::string fmt : {"text", "csv", "json-lines"}) {
      auto args = cmd;
      args.push_back("--format");
      args.push_back(fmt);
      auto r = run(args);
      INFO(cmd[0], " ", fmt, " ", r.err);
      REQUIRE(r.code == 0);
      auto kv = first_record(r.out, fmt);
      CHECK(!kv.empty());
      if (fmt == "text") {
        reference = kv;
      } else {
        for (auto& [key, value] : reference) {
          if (value.find('.') != std::string::npos && value.find_first_not_of("-0123456789.") == std::string::npos)
            CHECK(std::stod(kv[key]) == doctest::Approx(std::stod(value)).epsilon(1e-12));
          else
            CHECK(kv[key] == value);
        }
      }
    }
  }
}

TEST_CASE("thread count does not change output") {
  auto big = temp_path("trec14.txt");
  REQUIRE(run({"construct", "trec", "--n", "14", "--output", big}).code == 0);
  std::vector<std::vector<std::string>> commands{
      {"partition", "maxcut", big, "--seed", "5", "--restarts", "8"},
      {"partition", "localmax", big, "--seed", "3"},
      {"flags", "enumerate", "--m", "4"},
      {"sdp", "assemble", "--m", "4"},
      {"search", "max", "--n", "7"},
      {"search", "max", "--n", "9", "--mode", "augmenting", "--restarts", "20", "--seed", "4"},
  };
  for (const auto& cmd : commands) {
    auto one = cmd, eight = cmd;
    one.insert(one.end(), {"--threads", "1"});
    eight.insert(eight.end(), {"--threads", "8"});
    auto a = run(one), b = run(eight);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("construction files round trip through norms and partitions") {
  auto f = temp_path("t9.txt");
  auto c = run({"construct", "trec", "--tree", "(9: (3: 1 1 1) 3 3)", "--output", f});
  REQUIRE(c.code == 0);
  CHECK(c.out.find("edges=28") != std::string::npos);
  auto n = run({"norms", f});
  auto kv = first_record(c.out, "text");
  CHECK(first_record(n.out, "text")["l2"] == kv["l2"]);
  auto p = run({"partition", "analyze", f});
  CHECK(p.code == 0);
  CHECK(p.out.find("transversal=27") != std::string::npos);
  CHECK(run({"construct", "trec", "--tree", "(9: 3 3"}).code == 2);
}

TEST_CASE("search checkpoints in the cache directory") {
  auto dir = temp_path("cache");
  std::filesystem::remove_all(dir);
  setenv("FLAGFORGE_CACHE_DIR", dir.c_str(), 1);
  auto a = run({"search", "max", "--n", "6", "--checkpoint", "auto"});
  CHECK(a.code == 0);
  bool found = false;
  for (const auto& e : std::filesystem::directory_iterator(dir)) found = found || e.path().extension() == ".ckpt";
  CHECK(found);
  auto b = run({"search", "max", "--n", "6", "--checkpoint", "auto"});
  CHECK(b.out == a.out);
  CHECK(b.err.find("resumed") != std::string::npos);
  unsetenv("FLAGFORGE_CACHE_DIR");
  CHECK(run({"search", "max", "--n", "6", "--checkpoint", "auto"}).code == 2);
}

TEST_CASE("sdp export and certificate rounding") {
  auto dat = temp_path("mantel.dat-s");
  std::vector<std::string> program{"--r", "2", "--colors", "1", "--family", "k3", "--m", "3", "--objective", "edge-density"};
  auto args = std::vector<std::string>{"sdp", "export", "--output", dat};
  args.insert(args.end(), program.begin(), program.end());
  REQUIRE(run(args).code == 0);
  std::ifstream a(dat), b(data_path("mantel.dat-s"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  auto out = temp_path("cert.json");
  args = {"cert", "round", "--solution", data_path("mantel.out"), "--meta", dat + ".meta", "--output", out};
  args.insert(args.end(), program.begin(), program.end());
  auto r = run(args);
  CHECK(r.code == 0);
  CHECK(r.out.rfind("bound=1/2 valid=true", 0) == 0);
  // a coarse limit breaks the identity; adjusting the bound repairs it
  args.push_back("--limit");
  args.push_back("1");
  CHECK(run(args).code == 3);
  args.push_back("--adjust-bound");
  auto fixed = run(args);
  CHECK(fixed.err.find("warn:") != std::string::npos);
}
