#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flagforge/canonical.hpp"
#include "flagforge/families.hpp"
#include "flagforge/rational.hpp"

namespace flagforge {

enum class SearchObjective { edges, l2norm, s2count };
enum class SearchMode { exhaustive, augmenting };

SearchObjective parse_search_objective(const std::string& name);
std::string to_string(SearchObjective o);
SearchMode parse_search_mode(const std::string& name);
std::string to_string(SearchMode m);

Integer objective_value(const Hypergraph& h, SearchObjective o);

constexpr int kExhaustiveSearchLimit = 8;

struct SearchTask {
  int n = 0;
  Family family = Family::none(3);
  SearchObjective objective = SearchObjective::edges;
  SearchMode mode = SearchMode::exhaustive;
  int threads = 1;
  // augmenting mode
  std::uint64_t seed = 0;
  int restarts = 200;
  // exhaustive mode: optional checkpoint file, rewritten as subtrees finish
  std::string checkpoint;
  double checkpoint_interval = 5.0;  // seconds
};

struct SearchResult {
  Integer value;
  Hypergraph witness;
  std::uint64_t classes_visited = 0;
  bool exact = false;  // false for augmenting mode: value is a lower bound
  bool resumed = false;
};

// Exhaustive mode enumerates family-free r-graphs on n vertices up to
// isomorphism by canonical augmentation over edge additions; the witness is
// the maximizer with the smallest canonical key. Augmenting mode runs seeded
// random greedy completions.
SearchResult search_max(const SearchTask& task);

// Calls visit once per isomorphism class (single threaded, exhaustive).
void for_each_class(int n, const Family& family, const std::function<void(const Hypergraph&)>& visit);

struct DensityRow {
  int n = 0;
  Integer value;
  bool exact = true;
  Integer quadruples;  // C(n, 4)
  Rational ratio;
  Integer trec_s2;     // T_rec lower bound on the S2 count
  Rational trec_ratio;
};

DensityRow density_row(const SearchResult& r, int n);
Rational s2_reference_density();  // 6/13

// Aligned text, csv or json-lines table with the 6/13 reference line.
void write_density_report(std::ostream& out, const std::vector<DensityRow>& rows, const std::string& format);

}  // namespace flagforge
