#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynquant/errors.hpp"
#include "dynquant/lindblad.hpp"

#include <cmath>
#include <random>

using namespace dynquant;

namespace {

FokkerPlanckCoeffs damped_oscillator(double lambda, double d) {
  // Liouville form of dq/dt = p, dp/dt = -q - 2 lambda p with isotropic
  // diffusion d; the friction drift enters the generator as +2 lambda p d/dp.
  FokkerPlanckCoeffs c;
  c.c_pq = -1.0;
  c.c_qp = 1.0;
  c.c_pp = 2.0 * lambda;
  c.d_qq = d;
  c.d_pp = d;
  return c;
}

MatrixOperator random_density(const QuantizationContext& ctx, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  long d = ctx.total_dim();
  CMatrix m(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) m(i, j) = Complex(nd(gen), nd(gen));
  CMatrix rho = m * m.adjoint();
  rho /= rho.trace();
  return MatrixOperator(ctx, rho);
}

}  // namespace

TEST_CASE("second-order generator acts correctly on polynomial symbols") {
  FokkerPlanckCoeffs c;
  c.d_qq = 0.1;
  c.d_qp = 0.05;
  c.d_pp = 0.2;
  c.c_qq = -0.3;
  c.c_qp = 0.7;
  c.c_pq = -1.1;
  c.c_pp = -0.5;
  c.h = 0.0;
  auto l = fokker_planck_dynop(c);

  // On a constant: only h contributes.
  auto img = dynop_apply(l, PolySymbol::constant(1, 2.0));
  CHECK(img.max_abs_coefficient() < 1e-15);

  // On q: c_qq q + c_pq p (+ h q term is zero since h = 0)
  auto on_q = dynop_apply(l, PolySymbol::q(1, 1));
  MultiIndex iq(1), ip(1);
  iq.q[0] = 1;
  ip.p[0] = 1;
  CHECK(on_q.coefficient(iq) == doctest::Approx(c.c_qq));
  CHECK(on_q.coefficient(ip) == doctest::Approx(c.c_pq));

  // On q^2: 2 d_qq + 2 c_qq q^2 + 2 c_pq q p
  auto on_q2 = dynop_apply(l, PolySymbol::q(1, 1) * PolySymbol::q(1, 1));
  MultiIndex i0(1), iq2(1), iqp(1);
  iq2.q[0] = 2;
  iqp.q[0] = 1;
  iqp.p[0] = 1;
  CHECK(on_q2.coefficient(i0) == doctest::Approx(2.0 * c.d_qq));
  CHECK(on_q2.coefficient(iq2) == doctest::Approx(2.0 * c.c_qq));
  CHECK(on_q2.coefficient(iqp) == doctest::Approx(2.0 * c.c_pq));

  // On q p the mixed diffusion contributes 2 d_qp.
  auto on_qp = dynop_apply(l, PolySymbol::q(1, 1) * PolySymbol::p(1, 1));
  CHECK(on_qp.coefficient(i0) == doctest::Approx(2.0 * c.d_qp));
}

TEST_CASE("drift parameters and their inverse") {
  FokkerPlanckCoeffs c;
  c.c_pq = -1.0;
  c.c_qp = 1.0;
  c.c_qq = 0.0;
  c.c_pp = -0.2;
  auto dp = derive_params(c);
  CHECK(dp.m == doctest::Approx(1.0));
  CHECK(dp.omega_sq == doctest::Approx(1.0));
  CHECK(dp.lambda == doctest::Approx(-0.1));
  CHECK(dp.mu == doctest::Approx(-0.1));

  auto back = drift_from_params(dp);
  CHECK(back.c_pq == doctest::Approx(c.c_pq));
  CHECK(back.c_qp == doctest::Approx(c.c_qp));
  CHECK(back.c_qq == doctest::Approx(c.c_qq));
  CHECK(back.c_pp == doctest::Approx(c.c_pp));

  FokkerPlanckCoeffs bad;
  bad.c_pq = 0.0;
  CHECK_THROWS_WITH_AS(derive_params(bad), doctest::Contains("no kinetic term"), std::invalid_argument);
}

TEST_CASE("diffusion matrix factorization") {
  QuantizationContext ctx(0.5, 10);
  FokkerPlanckCoeffs c = damped_oscillator(0.3, 0.4);
  c.d_qp = -0.05;
  auto model = solve_lindblad_ops(c, ctx);
  auto dp = derive_params(c);

  Complex sum_aa = 0, sum_bb = 0, sum_ab = 0;
  for (size_t j = 0; j < model.a.size(); ++j) {
    sum_aa += std::conj(model.a[j]) * model.a[j];
    sum_bb += std::conj(model.b[j]) * model.b[j];
    sum_ab += std::conj(model.a[j]) * model.b[j];
  }
  CHECK((ctx.hbar / 2.0) * sum_aa.real() == doctest::Approx(c.d_qq).epsilon(1e-12));
  CHECK((ctx.hbar / 2.0) * sum_bb.real() == doctest::Approx(c.d_pp).epsilon(1e-12));
  CHECK(-(ctx.hbar / 2.0) * sum_ab.real() == doctest::Approx(c.d_qp).epsilon(1e-12));
  CHECK(-sum_ab.imag() == doctest::Approx(dp.lambda).epsilon(1e-12));

  // V_j = a_j p + b_j q as matrices
  auto q = build_q(ctx, 1), p = build_p(ctx, 1);
  for (size_t j = 0; j < model.V.size(); ++j) {
    CMatrix expect = model.a[j] * p.m + model.b[j] * q.m;
    CHECK((model.V[j].m - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("feasibility boundary of the diffusion matrix") {
  QuantizationContext ctx(1.0, 8);
  // G is PSD iff d_qq d_pp - d_qp^2 >= (hbar lambda / 2)^2.
  FokkerPlanckCoeffs c = damped_oscillator(0.5, 0.0);
  auto dp = derive_params(c);
  double bound = std::abs(ctx.hbar * dp.lambda / 2.0);

  c.d_qq = c.d_pp = bound * 1.01;  // just feasible
  CHECK_NOTHROW(solve_lindblad_ops(c, ctx));

  c.d_qq = c.d_pp = bound * 0.9;  // violates the uncertainty bound
  CHECK_THROWS_AS(solve_lindblad_ops(c, ctx), InfeasibleError);
  try {
    solve_lindblad_ops(c, ctx);
  } catch (const InfeasibleError& e) {
    CHECK(e.negative_eigenvalue() < 0.0);
    CHECK(e.negative_eigenvalue() > -bound);
  }
}

TEST_CASE("GKSL generator preserves trace and hermiticity") {
  QuantizationContext ctx(1.0, 12);
  FokkerPlanckCoeffs c = damped_oscillator(0.25, 0.3);
  auto s = build_lindblad_superop(solve_lindblad_ops(c, ctx));
  for (unsigned seed = 0; seed < 4; ++seed) {
    auto rho = random_density(ctx, seed);
    auto img = s.apply(rho);
    CHECK(std::abs(img.m.trace()) < 1e-11);
    CHECK((img.m - img.m.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-11);
  }

  // With V = 0 (no diffusion, no friction) the generator is pure Hamiltonian.
  FokkerPlanckCoeffs c0;
  c0.c_pq = -1.0;
  c0.c_qp = 1.0;
  auto model0 = solve_lindblad_ops(c0, ctx);
  double vnorm = 0;
  for (const auto& v : model0.V) vnorm = std::max(vnorm, max_abs(v));
  CHECK(vnorm < 1e-12);
  auto s0 = build_lindblad_superop(model0);
  auto h0 = hamiltonian_superop(model0.H);  // -(i/hbar)[H, .] acting on states
  auto rho = random_density(ctx, 9);
  CHECK(max_abs(MatrixOperator(ctx, s0.apply(rho).m + h0.apply(rho).m)) < 1e-12);
}

TEST_CASE("three construction routes agree on the interior") {
  QuantizationContext ctx(0.8, 16);
  FokkerPlanckCoeffs c = damped_oscillator(0.2, 0.35);
  c.d_qp = 0.02;
  c.c_qq = -0.1;  // mu != 0

  auto s_lindblad = build_lindblad_superop(solve_lindblad_ops(c, ctx));
  auto s_explicit = build_explicit_superop(c, ctx);
  // the generic route quantizes the distribution-function generator, which is
  // already the state-picture map
  double h_used = 0;
  auto s_generic = build_generic_superop(c, ctx, &h_used);

  auto proj = interior_projector(ctx);
  for (unsigned seed = 0; seed < 3; ++seed) {
    auto rho = random_density(ctx, 50 + seed);
    MatrixOperator rho_int(ctx, proj.m * rho.m * proj.m);  // interior-supported state
    rho_int.m /= rho_int.m.trace();
    auto d1 = s_lindblad.apply(rho_int), d2 = s_explicit.apply(rho_int),
         d3 = s_generic.apply(rho_int);
    double scale = std::max(1.0, max_abs(d1));
    CHECK(interior_max_abs(MatrixOperator(ctx, d1.m - d2.m)) / scale < 1e-10);
    CHECK(interior_max_abs(MatrixOperator(ctx, d1.m - d3.m)) / scale < 1e-10);
    // trace preservation on interior-supported states
    CHECK(std::abs(d1.m.trace()) < 1e-11);
  }
}

TEST_CASE("trace calibration of the constant term") {
  QuantizationContext ctx(1.0, 16);
  FokkerPlanckCoeffs c = damped_oscillator(0.1, 0.2);
  c.c_qq = -0.05;
  c.c_pp = -0.15;
  CHECK(calibrate_h(c, ctx) == doctest::Approx(c.c_qq + c.c_pp).epsilon(1e-8));

  double h_used = 0;
  build_generic_superop(c, ctx, &h_used);
  CHECK(h_used == doctest::Approx(-0.2).epsilon(1e-8));

  // explicit h wins over calibration
  c.h = 1.25;
  build_generic_superop(c, ctx, &h_used);
  CHECK(h_used == doctest::Approx(1.25));
}

TEST_CASE("purity is non-increasing under isotropic damping") {
  QuantizationContext ctx(1.0, 14);
  FokkerPlanckCoeffs c = damped_oscillator(0.3, 0.3);
  auto s = build_lindblad_superop(solve_lindblad_ops(c, ctx));
  auto rho = coherent_state(ctx, 0.5, -0.3);
  // d/dt Tr(rho^2) = 2 Tr(rho L(rho)) <= 0 for this channel
  auto drho = s.apply(rho);
  CHECK((rho.m * drho.m).trace().real() < 1e-12);
}

TEST_CASE("coefficient JSON parsing") {
  auto c = fokker_planck_from_json_text(
      R"({"d_qq":0.1,"d_qp":0.0,"d_pp":0.2,"c_qq":0.0,"c_qp":1.0,"c_pq":-1.0,"c_pp":-0.2})");
  CHECK(c.d_pp == doctest::Approx(0.2));
  CHECK(!c.h.has_value());

  auto c2 = fokker_planck_from_json_text(
      R"({"d_qq":0,"d_qp":0,"d_pp":0,"c_qq":0,"c_qp":1,"c_pq":-1,"c_pp":0,"h":0.5})");
  CHECK(c2.h.has_value());
  CHECK(*c2.h == doctest::Approx(0.5));

  CHECK_THROWS_WITH_AS(
      fokker_planck_from_json_text(
          R"({"d_qq":0,"d_qp":0,"d_pp":0,"c_qq":0,"c_qp":1,"c_pq":-1,"c_pp":0,"bogus":1})"),
      doctest::Contains("bogus"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      fokker_planck_from_json_text(R"({"d_qq":0,"d_qp":0,"d_pp":0,"c_qq":0,"c_qp":1,"c_pq":-1})"),
      doctest::Contains("c_pp"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      fokker_planck_from_json_text(
          R"({"d_qq":"x","d_qp":0,"d_pp":0,"c_qq":0,"c_qp":1,"c_pq":-1,"c_pp":0})"),
      doctest::Contains("d_qq"), std::invalid_argument);
}
