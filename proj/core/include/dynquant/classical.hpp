#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dynquant/symbol.hpp"

namespace dynquant {

/// Coefficients of the n-mode oscillator with friction
///   dq_k/dt = p_k / m
///   dp_k/dt = -(m w^2 q_k + alpha_km p_m + beta_kms p_m p_s)
/// beta is stored symmetrized in its last two indices.
struct FrictionCoefficients {
  int n = 1;
  double m = 1.0;
  double omega = 0.0;
  std::vector<double> alpha;  // n*n, row-major [k][m]
  std::vector<double> beta;   // n*n*n, [k][m][s]

  FrictionCoefficients(int n_, double m_, double omega_);

  double& a(int k, int mm) { return alpha[(k - 1) * n + (mm - 1)]; }
  double a(int k, int mm) const { return alpha[(k - 1) * n + (mm - 1)]; }
  double& b(int k, int mm, int s) { return beta[((k - 1) * n + (mm - 1)) * n + (s - 1)]; }
  double b(int k, int mm, int s) const { return beta[((k - 1) * n + (mm - 1)) * n + (s - 1)]; }

  /// Replace beta by its symmetric part in (m, s).
  void symmetrize_beta();
};

/// Dynamical operator of the friction oscillator, Jordan-ready form
///   (1/m) p_k d/dq_k - m w^2 q_k d/dp_k - (alpha_km p_m + beta_kms p_m p_s) d/dp_k.
DynOpSymbol dynop_friction_oscillator(const FrictionCoefficients& c);

/// The three named n=3, omega=0 coefficient sets.
FrictionCoefficients lorenz_coefficients();
FrictionCoefficients rossler_coefficients();
FrictionCoefficients leipnik_newton_coefficients();

/// Restriction to the first `modes` canonical pairs; coefficients touching a
/// dropped mode are removed.
FrictionCoefficients restrict_modes(const FrictionCoefficients& c, int modes);

/// Two-mode Lorenz-type dynamical operator (x = q_1, y = p_1, z = p_2):
///   L = -sigma (q1 - p1) d/dq1 + sigma p2 d/dq2
///       + (r q1 - p1 - q1 p2) d/dp1 - (b p2 - q1 p1) d/dp2.
DynOpSymbol lorenz_type_dynop(double sigma, double r, double b);

struct ClassicalState {
  std::vector<double> q;
  std::vector<double> p;
  double t = 0.0;
};

using ClassicalRhs =
    std::function<std::pair<std::vector<double>, std::vector<double>>(const ClassicalState&)>;

/// ODE right-hand side (dq/dt, dp/dt) of a first-order derivation.
/// Throws std::invalid_argument("not a derivation") otherwise.
ClassicalRhs vector_field(const DynOpSymbol& l);

/// Fixed-step RK4. Throws DivergenceError on the first non-finite state.
std::vector<ClassicalState> integrate_classical(const ClassicalRhs& rhs, ClassicalState x0,
                                                double dt, long steps, long record_every = 1);

/// CSV with header t,q1..qn,p1..pn, 17 significant digits.
void write_trajectory_csv(const std::string& path, const std::vector<ClassicalState>& traj);

}  // namespace dynquant
