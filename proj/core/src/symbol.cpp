#include "dynquant/symbol.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dynquant {

namespace {
constexpr double kDropTol = 0.0;  // exact-zero drop only; inputs are exact

void check_modes(int a, int b) {
  if (a != b) throw std::invalid_argument("mode count mismatch");
}
}  // namespace

MultiIndex::MultiIndex(std::vector<int> q_, std::vector<int> p_)
    : q(std::move(q_)), p(std::move(p_)) {
  if (q.size() != p.size() || q.empty())
    throw std::invalid_argument("MultiIndex: q/p exponent lists must have equal nonzero length");
  for (int e : q)
    if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
  for (int e : p)
    if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
}

int MultiIndex::total() const {
  return std::accumulate(q.begin(), q.end(), 0) + std::accumulate(p.begin(), p.end(), 0);
}

PolySymbol::PolySymbol(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("PolySymbol: mode count must be >= 1");
}

PolySymbol PolySymbol::constant(int n, double c) {
  PolySymbol s(n);
  s.add_term(MultiIndex(n), c);
  return s;
}

PolySymbol PolySymbol::q(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("PolySymbol::q: mode index out of range");
  MultiIndex idx(n);
  idx.q[k - 1] = 1;
  return monomial(idx, 1.0);
}

PolySymbol PolySymbol::p(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("PolySymbol::p: mode index out of range");
  MultiIndex idx(n);
  idx.p[k - 1] = 1;
  return monomial(idx, 1.0);
}

PolySymbol PolySymbol::monomial(const MultiIndex& idx, double c) {
  PolySymbol s(idx.modes());
  s.add_term(idx, c);
  return s;
}

int PolySymbol::degree() const {
  int d = 0;
  for (const auto& [idx, c] : terms_) d = std::max(d, idx.total());
  return d;
}

double PolySymbol::coefficient(const MultiIndex& idx) const {
  auto it = terms_.find(idx);
  return it == terms_.end() ? 0.0 : it->second;
}

void PolySymbol::add_term(const MultiIndex& idx, double c) {
  if (idx.modes() != n_) throw std::invalid_argument("PolySymbol::add_term: mode count mismatch");
  auto [it, inserted] = terms_.try_emplace(idx, 0.0);
  it->second += c;
  if (std::abs(it->second) <= kDropTol) terms_.erase(it);
}

PolySymbol& PolySymbol::operator+=(const PolySymbol& o) {
  check_modes(n_, o.n_);
  for (const auto& [idx, c] : o.terms_) add_term(idx, c);
  return *this;
}

PolySymbol& PolySymbol::operator-=(const PolySymbol& o) {
  check_modes(n_, o.n_);
  for (const auto& [idx, c] : o.terms_) add_term(idx, -c);
  return *this;
}

PolySymbol& PolySymbol::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [idx, c] : terms_) c *= s;
  return *this;
}

PolySymbol operator*(const PolySymbol& a, const PolySymbol& b) {
  check_modes(a.n_, b.n_);
  PolySymbol r(a.n_);
  for (const auto& [ia, ca] : a.terms_) {
    for (const auto& [ib, cb] : b.terms_) {
      MultiIndex idx(a.n_);
      for (int k = 0; k < a.n_; ++k) {
        idx.q[k] = ia.q[k] + ib.q[k];
        idx.p[k] = ia.p[k] + ib.p[k];
      }
      r.add_term(idx, ca * cb);
    }
  }
  return r;
}

PolySymbol PolySymbol::d_dq(int k) const {
  if (k < 1 || k > n_) throw std::invalid_argument("PolySymbol::d_dq: mode index out of range");
  PolySymbol r(n_);
  for (const auto& [idx, c] : terms_) {
    if (idx.q[k - 1] == 0) continue;
    MultiIndex d = idx;
    d.q[k - 1] -= 1;
    r.add_term(d, c * idx.q[k - 1]);
  }
  return r;
}

PolySymbol PolySymbol::d_dp(int k) const {
  if (k < 1 || k > n_) throw std::invalid_argument("PolySymbol::d_dp: mode index out of range");
  PolySymbol r(n_);
  for (const auto& [idx, c] : terms_) {
    if (idx.p[k - 1] == 0) continue;
    MultiIndex d = idx;
    d.p[k - 1] -= 1;
    r.add_term(d, c * idx.p[k - 1]);
  }
  return r;
}

double PolySymbol::evaluate(const std::vector<double>& qv, const std::vector<double>& pv) const {
  if (static_cast<int>(qv.size()) != n_ || static_cast<int>(pv.size()) != n_)
    throw std::invalid_argument("PolySymbol::evaluate: point dimension mismatch");
  double acc = 0.0;
  for (const auto& [idx, c] : terms_) {
    double t = c;
    for (int k = 0; k < n_; ++k) {
      for (int e = 0; e < idx.q[k]; ++e) t *= qv[k];
      for (int e = 0; e < idx.p[k]; ++e) t *= pv[k];
    }
    acc += t;
  }
  return acc;
}

double PolySymbol::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [idx, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

PolySymbol poisson_bracket(const PolySymbol& a, const PolySymbol& b) {
  check_modes(a.modes(), b.modes());
  PolySymbol r(a.modes());
  for (int k = 1; k <= a.modes(); ++k) {
    r += a.d_dq(k) * b.d_dp(k);
    r -= a.d_dp(k) * b.d_dq(k);
  }
  return r;
}

void DynOpSymbol::add_term(PolySymbol coeff, MultiIndex deriv) {
  if (coeff.modes() != n_ || deriv.modes() != n_)
    throw std::invalid_argument("DynOpSymbol::add_term: mode count mismatch");
  if (coeff.is_zero()) return;
  for (auto& t : terms_) {
    if (t.deriv == deriv) {
      t.coeff += coeff;
      return;
    }
  }
  terms_.push_back({std::move(coeff), std::move(deriv)});
}

DynOpSymbol& DynOpSymbol::operator+=(const DynOpSymbol& o) {
  check_modes(n_, o.n_);
  for (const auto& t : o.terms_) add_term(t.coeff, t.deriv);
  return *this;
}

DynOpSymbol& DynOpSymbol::operator*=(double s) {
  for (auto& t : terms_) t.coeff *= s;
  if (s == 0.0) terms_.clear();
  return *this;
}

PolySymbol DynOpSymbol::apply(const PolySymbol& a) const {
  check_modes(n_, a.modes());
  PolySymbol r(n_);
  for (const auto& t : terms_) {
    PolySymbol d = a;
    for (int k = 1; k <= n_; ++k) {
      for (int e = 0; e < t.deriv.q[k - 1]; ++e) d = d.d_dq(k);
      for (int e = 0; e < t.deriv.p[k - 1]; ++e) d = d.d_dp(k);
    }
    r += t.coeff * d;
  }
  return r;
}

bool DynOpSymbol::is_derivation() const {
  for (const auto& t : terms_)
    if (t.deriv.total() != 1) return false;
  return true;
}

DynOpSymbol dynop_from_hamiltonian(const PolySymbol& h) {
  // L A = {A, H} = sum_k (dH/dp_k) dA/dq_k - (dH/dq_k) dA/dp_k
  const int n = h.modes();
  DynOpSymbol l(n);
  for (int k = 1; k <= n; ++k) {
    MultiIndex dq(n), dp(n);
    dq.q[k - 1] = 1;
    dp.p[k - 1] = 1;
    l.add_term(h.d_dp(k), dq);
    l.add_term(-1.0 * h.d_dq(k), dp);
  }
  return l;
}

PolySymbol dynop_apply(const DynOpSymbol& l, const PolySymbol& a) { return l.apply(a); }

}  // namespace dynquant
