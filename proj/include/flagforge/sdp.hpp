#pragma once

#include <map>
#include <string>
#include <vector>

#include "flagforge/flags.hpp"

namespace flagforge {

using SparseVector = std::vector<std::pair<int, Rational>>;
using RationalMatrix = std::vector<std::vector<Rational>>;

struct SparseEntry {
  int i = 0;  // i <= j
  int j = 0;
  Rational value;
};

// One PSD block: flags of size s over type sigma, restricted to the
// invariant or anti-invariant subspace under Aut(sigma).
struct PsdBlock {
  std::string name;
  TypeSigma sigma;
  int flag_size = 0;
  bool invariant = true;
  int dim = 0;
  RationalMatrix basis_change;  // n_sigma x dim, columns span the subspace
  // per_flag[F] lists the upper triangle of W^T P_F W.
  std::vector<std::vector<SparseEntry>> per_flag;
};

// A homogeneous inequality g >= 0 with g over F_s^sigma; constants are
// written as multiples of the all-ones vector.
struct ConstraintSpec {
  std::string name;
  std::string group;
  std::string description;
  DensityVector g;
  int multiplier_size = 0;  // vertices of each multiplier flag
};

// lambda_j >= 0 times the averaged product of a constraint with one flag.
struct Multiplier {
  std::string name;
  std::string constraint;
  SparseVector column;  // over F_m^0
};

struct SdpProblem {
  Theory theory;
  int m = 0;
  BasisPtr basis;
  std::string objective_name;
  DensityVector objective;
  std::vector<PsdBlock> blocks;
  std::vector<ConstraintSpec> constraints;
  std::vector<Multiplier> multipliers;
  // Resolved configuration, enough to assemble the same program again.
  std::vector<int> type_sizes;
  std::vector<std::string> constraint_groups;
  std::map<std::string, int> multiplier_size;

  std::size_t rows() const { return basis->size(); }
  // Diagonal block layout: 2 normalization entries, then multipliers, then
  // one slack per flag.
  int diagonal_size() const { return 2 + static_cast<int>(multipliers.size() + rows()); }
};

struct AssemblyConfig {
  // Type sizes k for PSD blocks; empty means every k <= m-2 with k = m mod 2.
  std::vector<int> type_sizes;
  bool default_types = true;
  // Constraint groups; default: all of them for prop34 in the 3-colored
  // theory, none otherwise.
  std::vector<std::string> constraint_groups;
  bool default_constraints = true;
  std::map<std::string, int> multiplier_size;  // per group override
  int threads = 1;
};

// Reads {"types": [...], "constraints": [...], "multiplier_size": {...}}.
AssemblyConfig parse_assembly_config(const std::string& json_text);

// Objectives: prop34, edge-density, s2-density, constant, or custom (with
// `custom` supplying a vector over F_m^0).
SdpProblem assemble_program(const Theory& theory, int m, const std::string& objective, const AssemblyConfig& config,
                            const DensityVector* custom = nullptr);

std::vector<std::string> constraint_groups();

// Name of a type as used in block names: "t0", "t1c2", "t3c112e0".
std::string type_name(const TypeSigma& sigma);

// Label permutations of sigma preserving colors and edges.
std::vector<std::vector<int>> type_automorphisms(const TypeSigma& sigma);

// Orbit sums and differences spanning the invariant and anti-invariant parts.
struct SymmetrySplit {
  RationalMatrix invariant;
  RationalMatrix anti;
};
SymmetrySplit symmetry_split(const FlagBasis& typed);

// Evaluates sum_b <Q_b, T_b(F)> for one flag row.
Rational sos_value(const PsdBlock& block, const RationalMatrix& q, std::size_t flag);

}  // namespace flagforge
