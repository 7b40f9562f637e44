#pragma once

#include <map>
#include <vector>

namespace dynquant {

/// Exponent (or derivative-order) multi-index over n canonical pairs (q_k, p_k).
struct MultiIndex {
  std::vector<int> q;
  std::vector<int> p;

  explicit MultiIndex(int n) : q(n, 0), p(n, 0) {}
  MultiIndex(std::vector<int> q_, std::vector<int> p_);

  int modes() const { return static_cast<int>(q.size()); }
  int total() const;
  bool is_zero() const { return total() == 0; }

  auto operator<=>(const MultiIndex&) const = default;
};

/// Real-coefficient polynomial in (q_1..q_n, p_1..p_n): the Weyl symbol of an
/// observable. Sparse exponent-map storage; zero coefficients are never kept.
class PolySymbol {
 public:
  explicit PolySymbol(int n);

  static PolySymbol constant(int n, double c);
  static PolySymbol q(int n, int k);  // coordinate q_k, 1-based k
  static PolySymbol p(int n, int k);  // momentum  p_k, 1-based k
  static PolySymbol monomial(const MultiIndex& idx, double c);

  int modes() const { return n_; }
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  double coefficient(const MultiIndex& idx) const;
  void add_term(const MultiIndex& idx, double c);

  PolySymbol& operator+=(const PolySymbol& o);
  PolySymbol& operator-=(const PolySymbol& o);
  PolySymbol& operator*=(double s);
  friend PolySymbol operator+(PolySymbol a, const PolySymbol& b) { return a += b; }
  friend PolySymbol operator-(PolySymbol a, const PolySymbol& b) { return a -= b; }
  friend PolySymbol operator*(PolySymbol a, double s) { return a *= s; }
  friend PolySymbol operator*(double s, PolySymbol a) { return a *= s; }
  friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b);

  bool operator==(const PolySymbol& o) const = default;

  /// Partial derivatives with respect to q_k / p_k (1-based k).
  PolySymbol d_dq(int k) const;
  PolySymbol d_dp(int k) const;

  double evaluate(const std::vector<double>& qv, const std::vector<double>& pv) const;

  double max_abs_coefficient() const;

 private:
  int n_;
  std::map<MultiIndex, double> terms_;
};

/// Poisson bracket {a, b} = sum_k (da/dq_k db/dp_k - da/dp_k db/dq_k).
PolySymbol poisson_bracket(const PolySymbol& a, const PolySymbol& b);

/// Classical dynamical operator L(q, p, d/dq, d/dp): a finite sum of
/// (polynomial coefficient) x (derivative multi-index) terms, the derivative
/// acting first: (f * d^alpha) A = f * (d^alpha A).
class DynOpSymbol {
 public:
  struct Term {
    PolySymbol coeff;
    MultiIndex deriv;
  };

  explicit DynOpSymbol(int n) : n_(n) {}

  int modes() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(PolySymbol coeff, MultiIndex deriv);

  DynOpSymbol& operator+=(const DynOpSymbol& o);
  friend DynOpSymbol operator+(DynOpSymbol a, const DynOpSymbol& b) { return a += b; }
  DynOpSymbol& operator*=(double s);

  /// Exact symbolic application to a polynomial.
  PolySymbol apply(const PolySymbol& a) const;

  /// True when every term is first order in the derivatives with no
  /// multiplication (order-0) terms: the operator is a vector field.
  bool is_derivation() const;

 private:
  int n_;
  std::vector<Term> terms_;
};

/// L with L A = {A, H}: the Hamiltonian dynamical operator of H.
DynOpSymbol dynop_from_hamiltonian(const PolySymbol& h);

/// Exact symbolic application of a dynamical operator.
PolySymbol dynop_apply(const DynOpSymbol& l, const PolySymbol& a);

}  // namespace dynquant
