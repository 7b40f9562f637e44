#include "dynquant/lindblad.hpp"

#include "dynquant/errors.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace dynquant {

DynOpSymbol fokker_planck_dynop(const FokkerPlanckCoeffs& c) {
  DynOpSymbol l(1);
  auto deriv = [](int dq, int dp) {
    MultiIndex d(1);
    d.q[0] = dq;
    d.p[0] = dp;
    return d;
  };
  if (c.d_qq != 0) l.add_term(PolySymbol::constant(1, c.d_qq), deriv(2, 0));
  if (c.d_qp != 0) l.add_term(PolySymbol::constant(1, 2 * c.d_qp), deriv(1, 1));
  if (c.d_pp != 0) l.add_term(PolySymbol::constant(1, c.d_pp), deriv(0, 2));
  if (c.c_qq != 0) l.add_term(c.c_qq * PolySymbol::q(1, 1), deriv(1, 0));
  if (c.c_qp != 0) l.add_term(c.c_qp * PolySymbol::q(1, 1), deriv(0, 1));
  if (c.c_pq != 0) l.add_term(c.c_pq * PolySymbol::p(1, 1), deriv(1, 0));
  if (c.c_pp != 0) l.add_term(c.c_pp * PolySymbol::p(1, 1), deriv(0, 1));
  if (c.h && *c.h != 0) l.add_term(PolySymbol::constant(1, *c.h), deriv(0, 0));
  return l;
}

DerivedParams derive_params(const FokkerPlanckCoeffs& c) {
  if (c.c_pq == 0) throw std::invalid_argument("derive_params: no kinetic term (c_pq = 0)");
  DerivedParams d;
  d.m = -1.0 / c.c_pq;
  d.omega_sq = -c.c_qp * c.c_pq;
  d.lambda = (c.c_pp + c.c_qq) / 2.0;
  d.mu = (c.c_pp - c.c_qq) / 2.0;
  return d;
}

FokkerPlanckCoeffs drift_from_params(const DerivedParams& dp) {
  FokkerPlanckCoeffs c;
  c.c_pq = -1.0 / dp.m;
  c.c_qp = -dp.omega_sq / c.c_pq;
  c.c_pp = dp.lambda + dp.mu;
  c.c_qq = dp.lambda - dp.mu;
  return c;
}

namespace {
MatrixOperator oscillator_hamiltonian(const QuantizationContext& ctx, double m, double omega_sq,
                                      double mu) {
  const MatrixOperator q = build_q(ctx, 1), p = build_p(ctx, 1);
  CMatrix h = p.m * p.m / (2.0 * m) + 0.5 * m * omega_sq * q.m * q.m;
  if (mu != 0) h += 0.5 * mu * (p.m * q.m + q.m * p.m);
  return {ctx, std::move(h)};
}
}  // namespace

LindbladModel solve_lindblad_ops(const FokkerPlanckCoeffs& c, const QuantizationContext& ctx) {
  if (ctx.n != 1) throw std::invalid_argument("solve_lindblad_ops: single mode only");
  const DerivedParams dp = derive_params(c);
  const double hbar = ctx.hbar;

  Eigen::Matrix2cd g;
  g << Complex(c.d_qq, 0), Complex(-c.d_qp, -hbar * dp.lambda / 2.0),
      Complex(-c.d_qp, hbar * dp.lambda / 2.0), Complex(c.d_pp, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(g);
  const double tol = 1e-12 * std::max(1.0, std::abs(g.trace().real()));
  if (es.eigenvalues().minCoeff() < -tol)
    throw InfeasibleError("unphysical diffusion: complete positivity unattainable",
                          es.eigenvalues().minCoeff());

  LindbladModel model{oscillator_hamiltonian(ctx, dp.m, dp.omega_sq, dp.mu), {}, {}, {}};
  const MatrixOperator q = build_q(ctx, 1), p = build_p(ctx, 1);
  for (int j = 0; j < 2; ++j) {
    const double lam = std::max(0.0, es.eigenvalues()(j));
    const double s = std::sqrt(2.0 * lam / hbar);
    const Complex aj = s * std::conj(es.eigenvectors()(0, j));
    const Complex bj = s * std::conj(es.eigenvectors()(1, j));
    model.a.push_back(aj);
    model.b.push_back(bj);
    model.V.emplace_back(ctx, CMatrix(aj * p.m + bj * q.m));
  }
  return model;
}

SuperOperator build_lindblad_superop(const LindbladModel& model) {
  const QuantizationContext& ctx = model.H.ctx;
  const double hbar = ctx.hbar;
  const CMatrix id = CMatrix::Identity(ctx.total_dim(), ctx.total_dim());
  std::vector<SuperOpTerm> terms;
  terms.push_back({Complex(0, -1.0 / hbar), model.H.m, id});
  terms.push_back({Complex(0, 1.0 / hbar), id, model.H.m});
  for (const auto& v : model.V) {
    const CMatrix vd = v.m.adjoint();
    const CMatrix vdv = vd * v.m;
    terms.push_back({Complex(1.0 / hbar, 0), v.m, vd});
    terms.push_back({Complex(-0.5 / hbar, 0), vdv, id});
    terms.push_back({Complex(-0.5 / hbar, 0), id, vdv});
  }
  return SuperOperator(ctx, std::move(terms));
}

SuperOperator build_explicit_superop(const FokkerPlanckCoeffs& c, const QuantizationContext& ctx) {
  if (ctx.n != 1) throw std::invalid_argument("build_explicit_superop: single mode only");
  const DerivedParams dp = derive_params(c);
  const double hbar = ctx.hbar;
  const MatrixOperator q = build_q(ctx, 1), p = build_p(ctx, 1);
  const MatrixOperator h1 = oscillator_hamiltonian(ctx, dp.m, dp.omega_sq, 0.0);

  auto comm = [](const MatrixOperator& a) { return left_mult(a) - right_mult(a); };
  auto jord = [](const MatrixOperator& a) {
    return 0.5 * (left_mult(a) + right_mult(a));
  };

  SuperOperator s = Complex(0, -1.0 / hbar) * comm(h1);
  s += Complex(0, (dp.lambda - dp.mu) / hbar) * (comm(p) * jord(q));
  s += Complex(0, -(dp.lambda + dp.mu) / hbar) * (comm(q) * jord(p));
  const double h2 = hbar * hbar;
  if (c.d_pp != 0) s += (-c.d_pp / h2) * (comm(q) * comm(q));
  if (c.d_qq != 0) s += (-c.d_qq / h2) * (comm(p) * comm(p));
  if (c.d_qp != 0) s += (2.0 * c.d_qp / h2) * (comm(p) * comm(q));
  return s;
}

double calibrate_h(const FokkerPlanckCoeffs& c, const QuantizationContext& ctx) {
  FokkerPlanckCoeffs c0 = c;
  c0.h.reset();
  const SuperOperator l0 = quantize_dynop(fokker_planck_dynop(c0), ctx);
  const MatrixOperator g = l0.adjoint().apply(identity_operator(ctx));
  const MatrixOperator pi = interior_projector(ctx);
  double sum = 0;
  long count = 0;
  for (long i = 0; i < g.dim(); ++i) {
    if (pi.m(i, i).real() < 0.5) continue;
    sum += g.m(i, i).real();
    ++count;
  }
  return -sum / static_cast<double>(count);
}

SuperOperator build_generic_superop(const FokkerPlanckCoeffs& c, const QuantizationContext& ctx,
                                    double* h_used) {
  const double h = c.h ? *c.h : calibrate_h(c, ctx);
  if (h_used) *h_used = h;
  FokkerPlanckCoeffs cc = c;
  cc.h = h;
  return quantize_dynop(fokker_planck_dynop(cc), ctx);
}

FokkerPlanckCoeffs fokker_planck_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("coefficient input: expected a JSON object");
  static const char* required[] = {"d_qq", "d_qp", "d_pp", "c_qq", "c_qp", "c_pq", "c_pp"};
  for (const auto& [key, val] : j.items()) {
    bool known = key == "h";
    for (const char* r : required) known = known || key == r;
    if (!known) throw std::invalid_argument("coefficient input: unknown key '" + key + "'");
    if (!val.is_number())
      throw std::invalid_argument("coefficient input: key '" + key + "' must be a number");
  }
  for (const char* r : required)
    if (!j.contains(r))
      throw std::invalid_argument(std::string("coefficient input: missing key '") + r + "'");
  FokkerPlanckCoeffs c;
  c.d_qq = j["d_qq"];
  c.d_qp = j["d_qp"];
  c.d_pp = j["d_pp"];
  c.c_qq = j["c_qq"];
  c.c_qp = j["c_qp"];
  c.c_pq = j["c_pq"];
  c.c_pp = j["c_pp"];
  if (j.contains("h")) c.h = j["h"].get<double>();
  return c;
}

}  // namespace dynquant
