#pragma once

#include "dynquant/hilbert.hpp"
#include "dynquant/symbol.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dynquant {

// One term of a structured superoperator: X -> coeff * left * X * right.
struct SuperOpTerm {
  Complex coeff;
  CMatrix left;
  CMatrix right;
};

// Linear map on operators. Structured form (sum of left/right sandwich terms)
// is the working representation; a dense matrix over column-stacked vec(X),
// with vec(AXB) = (B^T kron A) vec(X), is materialized on demand or carried
// alone for maps (e.g. exponentials) that have no short structured form.
class SuperOperator {
 public:
  explicit SuperOperator(QuantizationContext ctx);  // zero map
  SuperOperator(QuantizationContext ctx, std::vector<SuperOpTerm> terms);
  static SuperOperator identity(const QuantizationContext& ctx);
  static SuperOperator from_dense(QuantizationContext ctx, CMatrix dense);

  const QuantizationContext& context() const { return ctx_; }
  bool has_structured() const { return structured_; }
  const std::vector<SuperOpTerm>& terms() const;
  size_t term_count() const { return terms_.size(); }

  MatrixOperator apply(const MatrixOperator& x) const;

  SuperOperator& operator+=(const SuperOperator& o);
  SuperOperator operator+(const SuperOperator& o) const;
  SuperOperator operator-(const SuperOperator& o) const;
  SuperOperator operator*(const SuperOperator& o) const;  // composition: this after o
  SuperOperator operator*(Complex s) const;
  SuperOperator operator-() const { return *this * Complex(-1, 0); }

  // Adjoint w.r.t. the Hilbert-Schmidt inner product.
  SuperOperator adjoint() const;

  // Dense matrix of side total_dim^2. Refuses above the cap: the side grows
  // as N^(2n) and desk-scale memory runs out fast.
  CMatrix dense(long total_dim_cap = kDenseCap) const;

  static constexpr long kDenseCap = 64;

 private:
  QuantizationContext ctx_;
  std::vector<SuperOpTerm> terms_;
  std::optional<CMatrix> dense_;
  bool structured_ = true;
};

inline SuperOperator operator*(Complex s, const SuperOperator& a) { return a * s; }
inline SuperOperator operator*(double s, const SuperOperator& a) { return a * Complex(s, 0); }

SuperOperator left_mult(const MatrixOperator& a);
SuperOperator right_mult(const MatrixOperator& a);

// Basis superoperators for mode k:
//   P1 = (1/hbar)[p, .]    P2 = -(1/hbar)[q, .]
//   Q1 = (q^l + q^r)/2     Q2 = (p^l + p^r)/2
SuperOperator build_P1(const QuantizationContext& ctx, int k);
SuperOperator build_P2(const QuantizationContext& ctx, int k);
SuperOperator build_Q1(const QuantizationContext& ctx, int k);
SuperOperator build_Q2(const QuantizationContext& ctx, int k);

// (i/hbar)(h^l - h^r); h must be Hermitian.
SuperOperator hamiltonian_superop(const MatrixOperator& h);

// Generalized Weyl quantization of a polynomial dynamical operator.
// Substitution q_k -> Q1(k), p_k -> Q2(k), d/dq_k -> i P1(k), d/dp_k -> i P2(k);
// each coefficient monomial is permutation-symmetrized and multiplies from the
// left of the derivative factors (P1 factors left of P2 factors).
SuperOperator quantize_dynop(const DynOpSymbol& l, const QuantizationContext& ctx);

// exp(i(a1.Q1 + a2.Q2 + b1.P1 + b2.P2)); dense-only result.
SuperOperator build_weyl_superop_basis(const std::vector<double>& a1,
                                       const std::vector<double>& a2,
                                       const std::vector<double>& b1,
                                       const std::vector<double>& b2,
                                       const QuantizationContext& ctx);

MatrixOperator apply(const SuperOperator& s, const MatrixOperator& x);
SuperOperator superop_adjoint(const SuperOperator& s);

// Max-abs entry of the dense matrix of (a - b), computed blockwise from the
// structured forms so the full dense matrix is never held in memory.
double superop_max_abs_diff(const SuperOperator& a, const SuperOperator& b);

void write_superop_csv(const std::string& path, const SuperOperator& s);
void write_superop_structured_json(const std::string& path, const SuperOperator& s);

}  // namespace dynquant
