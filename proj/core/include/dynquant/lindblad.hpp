#pragma once

#include "dynquant/superop.hpp"
#include "dynquant/symbol.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace dynquant {

/// Coefficients of the single-mode second-order (Fokker-Planck-type) generator
///   L = d_qq d2/dq2 + 2 d_qp d2/dqdp + d_pp d2/dp2
///       + c_qq q d/dq + c_qp q d/dp + c_pq p d/dq + c_pp p d/dp + h.
struct FokkerPlanckCoeffs {
  double d_qq = 0, d_qp = 0, d_pp = 0;
  double c_qq = 0, c_qp = 0, c_pq = 0, c_pp = 0;
  std::optional<double> h;
};

/// Physical parameters read off the drift block.
struct DerivedParams {
  double m;         // mass = -1/c_pq
  double omega_sq;  // -c_qp * c_pq
  double lambda;    // friction (c_pp + c_qq)/2
  double mu;        // (c_pp - c_qq)/2
};

/// Hamiltonian plus Lindblad operators V_j = a_j p + b_j q.
struct LindbladModel {
  MatrixOperator H;
  std::vector<MatrixOperator> V;
  std::vector<Complex> a;
  std::vector<Complex> b;
};

DynOpSymbol fokker_planck_dynop(const FokkerPlanckCoeffs& c);

/// Throws std::invalid_argument("no kinetic term") when c_pq = 0.
DerivedParams derive_params(const FokkerPlanckCoeffs& c);

/// Rebuild the four drift coefficients from DerivedParams (inverse map).
FokkerPlanckCoeffs drift_from_params(const DerivedParams& dp);

/// Factorizes the diffusion-friction matrix
///   G = [[d_qq, -d_qp - i hbar lambda/2], [-d_qp + i hbar lambda/2, d_pp]]
/// into (a_j, b_j) rows with d_qq = (hbar/2) sum |a_j|^2, d_pp likewise,
/// d_qp = -(hbar/2) Re sum a_j* b_j, lambda = -Im sum a_j* b_j.
/// Throws InfeasibleError when G is not positive semidefinite.
LindbladModel solve_lindblad_ops(const FokkerPlanckCoeffs& c, const QuantizationContext& ctx);

/// GKSL form: rho -> -(i/hbar)[H,rho] + (1/2 hbar) sum_j ([V_j rho, V_j+] + [V_j, rho V_j+]).
SuperOperator build_lindblad_superop(const LindbladModel& model);

/// Term-by-term assembly from left/right superoperators:
///   -(i/hbar)[H1, rho] + i(lambda-mu)/hbar [p, q o rho] - i(lambda+mu)/hbar [q, p o rho]
///   - (d_pp/hbar^2)[q,[q,rho]] - (d_qq/hbar^2)[p,[p,rho]] + (2 d_qp/hbar^2)[p,[q,rho]]
/// with H1 = p^2/2m + m omega^2 q^2 / 2.
SuperOperator build_explicit_superop(const FokkerPlanckCoeffs& c, const QuantizationContext& ctx);

/// Value of the constant term h that makes the quantized generator annihilate
/// the trace functional on the interior subspace (solved from the adjoint
/// applied to the identity). Equals c_qq + c_pp up to truncation noise.
double calibrate_h(const FokkerPlanckCoeffs& c, const QuantizationContext& ctx);

/// Generic route: quantize_dynop(fokker_planck_dynop(c)) with h taken from c
/// when present, otherwise trace-calibrated. Reports the h actually used.
SuperOperator build_generic_superop(const FokkerPlanckCoeffs& c, const QuantizationContext& ctx,
                                    double* h_used = nullptr);

/// Parse {"d_qq":..,"d_qp":..,"d_pp":..,"c_qq":..,"c_qp":..,"c_pq":..,"c_pp":..,"h":..}
/// (h optional). Unknown or missing keys are errors naming the key.
FokkerPlanckCoeffs fokker_planck_from_json_text(const std::string& text);

}  // namespace dynquant
