#pragma once

#include "dynquant/classical.hpp"
#include "dynquant/superop.hpp"

#include <string>
#include <vector>

namespace dynquant {

struct EvolutionSpec {
  enum class Picture { heisenberg, schroedinger };
  enum class Method { rk4, exponential };

  double dt = 1e-3;
  long steps = 1;
  Picture picture = Picture::schroedinger;
  Method method = Method::rk4;
  long record_every = 1;
};

/// Time series of expectations plus conservation monitors. For Heisenberg
/// runs the trace column holds Re Tr(A_t) and min_eigenvalue the smallest
/// eigenvalue of the Hermitian part.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<std::string> observable_names;
  Eigen::MatrixXd expectations;  // row = recorded time, col = observable
  std::vector<double> trace;
  std::vector<double> min_eigenvalue;
  std::vector<double> hermiticity_residual;
  bool trace_drift_flagged = false;  // |Tr - Tr_0| exceeded 1e-6 at some step
  MatrixOperator final_value;
};

/// Integrates d(rho)/dt = L rho. rk4 applies L four times per step; the
/// exponential method materializes exp(dt L) once (dense cap applies).
/// Throws DivergenceError on the first non-finite state.
TrajectoryRecord evolve_state(const SuperOperator& l, const MatrixOperator& rho0,
                              const std::vector<MatrixOperator>& observables,
                              const EvolutionSpec& spec);

/// Heisenberg picture: integrates dA/dt = L A.
TrajectoryRecord evolve_observable(const SuperOperator& l, const MatrixOperator& a0,
                                   const EvolutionSpec& spec);

struct EhrenfestResult {
  TrajectoryRecord quantum;            // expectations of q_1..q_n, p_1..p_n
  std::vector<ClassicalState> classical;
  std::vector<double> deviation;       // sup over the 2n coordinates per time
  double max_deviation = 0.0;
};

/// Quantizes l, evolves rho0 under the state-picture (adjoint) generator, and
/// integrates the classical vector field of l from the matched start
/// (q0, p0) = (<q>, <p>) of rho0. l must be a derivation.
EhrenfestResult ehrenfest_compare(const DynOpSymbol& l, const QuantizationContext& ctx,
                                  const MatrixOperator& rho0, const EvolutionSpec& spec);

/// CSV: t,<obs...>,trace,min_eig,herm_res with 17 significant digits.
void write_record_csv(const std::string& path, const TrajectoryRecord& rec);

}  // namespace dynquant
