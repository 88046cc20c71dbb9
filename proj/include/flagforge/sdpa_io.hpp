#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "flagforge/sdp.hpp"

namespace flagforge {

// Block order used in exported files: the PSD blocks of the program in order,
// then one diagonal block (normalization pair, multipliers, slacks).
struct SdpaLayout {
  std::vector<std::string> names;
  std::vector<int> sizes;  // negative for the diagonal block
  int variables = 0;
  int multipliers = 0;
  Integer scale = 1;
  std::string basis_digest;
};

SdpaLayout sdpa_layout(const SdpProblem& p);

// Least common multiple of every denominator in the exported data.
Integer export_scale(const SdpProblem& p);

struct SdpaEntry {
  int matno = 0;
  int block = 0;  // 1-based
  int i = 0;      // 1-based, i <= j
  int j = 0;
  Rational value;
};

// Unscaled coefficients of a .dat-s file.
struct SdpaData {
  int variables = 0;
  std::vector<int> sizes;
  std::vector<Rational> c;
  std::vector<SdpaEntry> entries;  // sorted by (matno, block, i, j)
};

// The program in SDPA primal form: minimize c.x subject to
// sum_F x_F F_F - F_0 psd, with x_F the density of F and c_F = -obj_F.
SdpaData to_sdpa_data(const SdpProblem& p);

void export_sdpa(const SdpProblem& p, std::ostream& dat, std::ostream& meta);
// Writes `path` and `path + ".meta"`.
void export_sdpa_files(const SdpProblem& p, const std::string& path);

// Reads a .dat-s file; entries are divided by `scale`.
SdpaData read_sdpa(std::istream& in, const Integer& scale = 1);

// Sidecar key=value file.
SdpaLayout read_meta(std::istream& in);
SdpaLayout read_meta_file(const std::string& path);

struct FloatBlock {
  std::string name;
  std::vector<std::vector<double>> matrix;
};

// Solver output mapped back onto the layout. The diagonal block is split into
// its parts.
struct FloatSolution {
  double primal_objective = 0;
  double dual_objective = 0;
  std::vector<double> x;
  std::vector<FloatBlock> blocks;  // dual PSD blocks Y_b
  double bound = 0;                // u recovered from the normalization pair
  std::vector<double> multipliers;
  std::vector<double> slacks;
};

// Parses objValPrimal, objValDual, xVec, xMat and yMat in SDPA output
// conventions.
FloatSolution import_solution(std::istream& in, const SdpaLayout& layout);
FloatSolution import_solution_file(const std::string& path, const SdpaLayout& layout);

}  // namespace flagforge
