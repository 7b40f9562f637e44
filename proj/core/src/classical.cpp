#include "dynquant/classical.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dynquant/errors.hpp"

namespace dynquant {

FrictionCoefficients::FrictionCoefficients(int n_, double m_, double omega_)
    : n(n_), m(m_), omega(omega_), alpha(n_ * n_, 0.0), beta(n_ * n_ * n_, 0.0) {
  if (n < 1) throw std::invalid_argument("FrictionCoefficients: n >= 1 required");
  if (m <= 0.0) throw std::invalid_argument("FrictionCoefficients: mass must be positive");
  if (omega < 0.0) throw std::invalid_argument("FrictionCoefficients: omega must be >= 0");
}

void FrictionCoefficients::symmetrize_beta() {
  for (int k = 1; k <= n; ++k)
    for (int mm = 1; mm <= n; ++mm)
      for (int s = mm; s <= n; ++s) {
        double v = 0.5 * (b(k, mm, s) + b(k, s, mm));
        b(k, mm, s) = v;
        b(k, s, mm) = v;
      }
}

DynOpSymbol dynop_friction_oscillator(const FrictionCoefficients& c) {
  if (c.m <= 0.0) throw std::invalid_argument("dynop_friction_oscillator: mass must be positive");
  const int n = c.n;
  DynOpSymbol l(n);
  for (int k = 1; k <= n; ++k) {
    MultiIndex dq(n), dp(n);
    dq.q[k - 1] = 1;
    dp.p[k - 1] = 1;
    l.add_term((1.0 / c.m) * PolySymbol::p(n, k), dq);
    PolySymbol fk = (-c.m * c.omega * c.omega) * PolySymbol::q(n, k);
    for (int mm = 1; mm <= n; ++mm) {
      fk += (-c.a(k, mm)) * PolySymbol::p(n, mm);
      for (int s = 1; s <= n; ++s)
        fk += (-c.b(k, mm, s)) * (PolySymbol::p(n, mm) * PolySymbol::p(n, s));
    }
    l.add_term(fk, dp);
  }
  return l;
}

FrictionCoefficients lorenz_coefficients() {
  FrictionCoefficients c(3, 1.0, 0.0);
  c.a(1, 1) = 10.0;
  c.a(1, 2) = -10.0;
  c.a(2, 1) = -28.0;
  c.a(2, 2) = 1.0;
  c.a(3, 3) = 8.0 / 3.0;
  c.b(2, 1, 3) = 0.5;
  c.b(2, 3, 1) = 0.5;
  c.b(3, 1, 2) = -0.5;
  c.b(3, 2, 1) = -0.5;
  return c;
}

FrictionCoefficients rossler_coefficients() {
  FrictionCoefficients c(3, 1.0, 0.0);
  c.a(1, 2) = 1.0;
  c.a(1, 3) = 1.0;
  c.a(2, 1) = -1.0;
  c.a(2, 2) = -0.2;
  c.a(3, 1) = -0.2;
  c.a(3, 3) = 5.7;
  c.b(3, 1, 3) = -0.5;
  c.b(3, 3, 1) = -0.5;
  return c;
}

FrictionCoefficients leipnik_newton_coefficients() {
  FrictionCoefficients c(3, 1.0, 0.0);
  c.a(1, 1) = 0.4;
  c.a(1, 2) = -1.0;
  c.a(2, 1) = 1.0;
  c.a(2, 2) = 0.4;
  c.a(3, 3) = -0.175;
  c.b(1, 2, 3) = -5.0;
  c.b(1, 3, 2) = -5.0;
  c.b(2, 1, 3) = -2.5;
  c.b(2, 3, 1) = -2.5;
  c.b(3, 1, 2) = 2.5;
  c.b(3, 2, 1) = 2.5;
  return c;
}

FrictionCoefficients restrict_modes(const FrictionCoefficients& c, int modes) {
  if (modes < 1 || modes > c.n)
    throw std::invalid_argument("restrict_modes: mode count out of range");
  FrictionCoefficients r(modes, c.m, c.omega);
  for (int k = 1; k <= modes; ++k)
    for (int mm = 1; mm <= modes; ++mm) {
      r.a(k, mm) = c.a(k, mm);
      for (int s = 1; s <= modes; ++s) r.b(k, mm, s) = c.b(k, mm, s);
    }
  return r;
}

DynOpSymbol lorenz_type_dynop(double sigma, double r, double b) {
  const int n = 2;
  DynOpSymbol l(n);
  const PolySymbol q1 = PolySymbol::q(n, 1), q2 = PolySymbol::q(n, 2);
  const PolySymbol p1 = PolySymbol::p(n, 1), p2 = PolySymbol::p(n, 2);
  MultiIndex dq1(n), dq2(n), dp1(n), dp2(n);
  dq1.q[0] = 1;
  dq2.q[1] = 1;
  dp1.p[0] = 1;
  dp2.p[1] = 1;
  l.add_term((-sigma) * (q1 - p1), dq1);
  l.add_term(sigma * p2, dq2);
  l.add_term(r * q1 - p1 - q1 * p2, dp1);
  l.add_term(-1.0 * (b * p2 - q1 * p1), dp2);
  return l;
}

ClassicalRhs vector_field(const DynOpSymbol& l) {
  if (!l.is_derivation()) throw std::invalid_argument("not a derivation");
  const int n = l.modes();
  std::vector<PolySymbol> dq, dp;
  for (int k = 1; k <= n; ++k) {
    dq.push_back(l.apply(PolySymbol::q(n, k)));
    dp.push_back(l.apply(PolySymbol::p(n, k)));
  }
  return [n, dq, dp](const ClassicalState& x) {
    std::vector<double> rq(n), rp(n);
    for (int k = 0; k < n; ++k) {
      rq[k] = dq[k].evaluate(x.q, x.p);
      rp[k] = dp[k].evaluate(x.q, x.p);
    }
    return std::make_pair(rq, rp);
  };
}

namespace {
bool finite(const ClassicalState& x) {
  for (double v : x.q)
    if (!std::isfinite(v)) return false;
  for (double v : x.p)
    if (!std::isfinite(v)) return false;
  return true;
}

ClassicalState axpy(const ClassicalState& x, double a, const std::vector<double>& kq,
                    const std::vector<double>& kp) {
  ClassicalState y = x;
  for (size_t i = 0; i < y.q.size(); ++i) {
    y.q[i] += a * kq[i];
    y.p[i] += a * kp[i];
  }
  return y;
}
}  // namespace

std::vector<ClassicalState> integrate_classical(const ClassicalRhs& rhs, ClassicalState x0,
                                                double dt, long steps, long record_every) {
  if (dt <= 0.0) throw std::invalid_argument("integrate_classical: dt must be positive");
  if (steps < 1) throw std::invalid_argument("integrate_classical: steps must be >= 1");
  if (record_every < 1) throw std::invalid_argument("integrate_classical: record_every >= 1");

  std::vector<ClassicalState> out;
  out.reserve(static_cast<size_t>(steps / record_every) + 2);
  out.push_back(x0);
  ClassicalState x = std::move(x0);
  const size_t n = x.q.size();
  for (long s = 1; s <= steps; ++s) {
    auto [k1q, k1p] = rhs(x);
    auto x2 = axpy(x, 0.5 * dt, k1q, k1p);
    x2.t = x.t + 0.5 * dt;
    auto [k2q, k2p] = rhs(x2);
    auto x3 = axpy(x, 0.5 * dt, k2q, k2p);
    x3.t = x.t + 0.5 * dt;
    auto [k3q, k3p] = rhs(x3);
    auto x4 = axpy(x, dt, k3q, k3p);
    x4.t = x.t + dt;
    auto [k4q, k4p] = rhs(x4);
    for (size_t i = 0; i < n; ++i) {
      x.q[i] += dt / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
      x.p[i] += dt / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
    }
    x.t += dt;
    if (!finite(x)) throw DivergenceError("integrate_classical: non-finite state", s);
    if (s % record_every == 0) out.push_back(x);
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const std::vector<ClassicalState>& traj) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  if (traj.empty()) return;
  const size_t n = traj.front().q.size();
  f << "t";
  for (size_t k = 1; k <= n; ++k) f << ",q" << k;
  for (size_t k = 1; k <= n; ++k) f << ",p" << k;
  f << "\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    f << buf;
  };
  for (const auto& x : traj) {
    put(x.t);
    for (double v : x.q) {
      f << ',';
      put(v);
    }
    for (double v : x.p) {
      f << ',';
      put(v);
    }
    f << "\n";
  }
}

}  // namespace dynquant
