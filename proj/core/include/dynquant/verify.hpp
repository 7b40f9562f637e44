#pragma once

#include "dynquant/hilbert.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dynquant {

struct VerificationEntry {
  std::string name;
  double residual;
  double tolerance;
  bool pass;
};

struct VerificationReport {
  std::vector<VerificationEntry> entries;
  std::uint64_t seed = 0;
  bool all_passed() const;
};

struct VerifyOptions {
  std::uint64_t seed = 0xD15517A7ULL;
  /// Self-test fault injection: scales the Q1 superoperator so that exactly
  /// the identities sensitive to it fail.
  bool corrupt_q = false;
};

/// Runs every operator/superoperator identity suite at the given context:
/// basis-superoperator conditions, the Jordan associator, the nested-Jordan
/// closing identities, reduction of the generalized quantization to ordinary
/// Weyl quantization and to the Hamiltonian commutator form, and (n = 1) the
/// three-route equivalence for second-order generators.
VerificationReport verify_all(const QuantizationContext& ctx, const VerifyOptions& opt = {});

std::string verification_report_json(const VerificationReport& report);

}  // namespace dynquant
