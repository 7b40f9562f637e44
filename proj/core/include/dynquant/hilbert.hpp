#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "dynquant/symbol.hpp"

namespace dynquant {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Truncation and scale parameters of the operator representation: hbar, the
/// per-mode Fock truncation N, the mode count, and the auxiliary oscillator
/// (mass, frequency) that fixes the q/p quadrature scale.
struct QuantizationContext {
  double hbar = 1.0;
  int dim = 16;  // per-mode truncation N
  int n = 1;     // mode count
  double scale_mass = 1.0;
  double scale_omega = 1.0;

  QuantizationContext() = default;
  QuantizationContext(double hbar_, int dim_, int n_ = 1, double scale_mass_ = 1.0,
                      double scale_omega_ = 1.0);

  long total_dim() const;  // N^n
  /// Fock levels excluded at the truncation edge when asserting CCR-dependent
  /// identities: ceil(N/8).
  int guard_band() const { return (dim + 7) / 8; }

  bool operator==(const QuantizationContext&) const = default;
};

/// Dense complex operator on the truncated space, tagged with its context.
struct MatrixOperator {
  QuantizationContext ctx;
  CMatrix m;

  MatrixOperator() = default;
  MatrixOperator(QuantizationContext c, CMatrix mat);

  long dim() const { return m.rows(); }
  bool is_hermitian(double tol = 1e-12) const;
};

void check_same_context(const MatrixOperator& a, const MatrixOperator& b);

MatrixOperator identity_operator(const QuantizationContext& ctx);
MatrixOperator zero_operator(const QuantizationContext& ctx);

/// Annihilation operator of mode k (1-based) on the full tensor space,
/// mode-major ordering (mode 1 is the slowest index).
MatrixOperator build_annihilation(const QuantizationContext& ctx, int k);
/// q_k = sqrt(hbar / 2 m w) (a + a+), p_k = i sqrt(hbar m w / 2) (a+ - a).
MatrixOperator build_q(const QuantizationContext& ctx, int k);
MatrixOperator build_p(const QuantizationContext& ctx, int k);

/// Weyl quantization of a polynomial symbol: each monomial maps to the
/// average of the operator products over all orderings of its q/p factors.
/// Per-mode factor words are capped at length 8.
MatrixOperator weyl_quantize(const PolySymbol& sym, const QuantizationContext& ctx);

struct WeylBasisParams {
  std::vector<double> a;
  std::vector<double> b;
};

/// W(a,b) = exp((i/hbar)(a.q + b.p)).
MatrixOperator build_weyl_operator(const WeylBasisParams& params, const QuantizationContext& ctx);

MatrixOperator commutator(const MatrixOperator& a, const MatrixOperator& b);
MatrixOperator jordan(const MatrixOperator& a, const MatrixOperator& b);

/// Liouville-space (Hilbert-Schmidt) inner product Tr(A+ B).
Complex hs_inner(const MatrixOperator& a, const MatrixOperator& b);

/// Normalized coherent-state density operator centered at (q0, p0).
/// Throws std::invalid_argument("increase dim") when the truncation loses
/// more than `loss_tol` of the state norm.
MatrixOperator coherent_state(const QuantizationContext& ctx, const std::vector<double>& q0,
                              const std::vector<double>& p0, double loss_tol = 1e-6);
MatrixOperator coherent_state(const QuantizationContext& ctx, double q0, double p0,
                              double loss_tol = 1e-6);

/// Re Tr(rho A) for Hermitian A; throws on a non-Hermitian observable.
double expectation(const MatrixOperator& rho, const MatrixOperator& a);

/// Projector onto Fock levels 0 .. N-1-guard per mode.
MatrixOperator interior_projector(const QuantizationContext& ctx, int guard = -1);
/// max-norm of Pi A Pi.
double interior_max_abs(const MatrixOperator& a, int guard = -1);
double max_abs(const MatrixOperator& a);

/// Operator dump: CSV rows i,j,re,im (0-based).
void write_operator_csv(const std::string& path, const MatrixOperator& a);

}  // namespace dynquant
