#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flagforge/sdp.hpp"
#include "flagforge/sdpa_io.hpp"

namespace flagforge {

// Exact PSD test by LDL^T with diagonal pivoting. Throws InputError for a
// non-square or asymmetric matrix.
bool verify_psd_exact(const RationalMatrix& q);

struct Certificate {
  int r = 3;
  int colors = 1;
  std::string family = "none";
  int m = 0;
  std::string objective;
  std::vector<int> types;
  std::vector<std::string> constraints;
  std::map<std::string, int> multiplier_size;
  std::string basis_digest;
  Rational bound;
  std::vector<std::pair<std::string, RationalMatrix>> blocks;
  std::vector<std::pair<std::string, Rational>> multipliers;
  std::vector<Rational> slacks;  // basis order
};

// Descriptor fields and zero blocks, multipliers and slacks for p.
Certificate certificate_skeleton(const SdpProblem& p);

// Assembles the program a certificate refers to (named objectives only).
SdpProblem program_for(const Certificate& cert, int threads = 1);

struct RoundReport {
  std::vector<std::string> notes;
  int clamped = 0;
};

// Best rational approximation of every entry (denominator <= limit),
// symmetrized blocks; slacks and multipliers in (-tolerance, 0) are clamped
// to 0 and reported. The result still has to pass verify_certificate.
Certificate round_solution(const SdpProblem& p, const FloatSolution& s, std::uint64_t limit, RoundReport& report,
                           double tolerance = 1e-6);

// Sets every slack from the per-flag identity. With adjust_bound the bound
// is raised by the largest deficit so that no slack is negative.
void recompute_slacks(const SdpProblem& p, Certificate& cert, bool adjust_bound, RoundReport& report);

struct VerifyReport {
  bool valid = false;
  bool psd_ok = true;
  bool nonnegative_ok = true;
  bool identity_ok = true;
  std::vector<std::string> failures;
  std::vector<int> failed_rows;
};

// Throws DimensionError when the certificate does not fit the program.
VerifyReport verify_certificate(const SdpProblem& p, const Certificate& cert);

// u - obj_F - SOS_F - sum_j lambda_j a_{jF} - c_F for every flag F.
std::vector<Rational> identity_residuals(const SdpProblem& p, const Certificate& cert);

std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);
Certificate read_certificate_file(const std::string& path);
void write_certificate_file(const Certificate& cert, const std::string& path);

}  // namespace flagforge
