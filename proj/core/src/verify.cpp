#include "dynquant/verify.hpp"

#include "dynquant/errors.hpp"
#include "dynquant/lindblad.hpp"
#include "dynquant/superop.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace dynquant {

bool VerificationReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const VerificationEntry& e) { return e.pass; });
}

namespace {

MatrixOperator random_hermitian(const QuantizationContext& ctx, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const long d = ctx.total_dim();
  CMatrix m(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) m(i, j) = Complex(u(rng), u(rng));
  m = 0.5 * (m + m.adjoint()).eval();
  m /= std::max(1.0, m.cwiseAbs().maxCoeff());
  return {ctx, std::move(m)};
}

MatrixOperator random_interior(const QuantizationContext& ctx, std::mt19937_64& rng) {
  const MatrixOperator pi = interior_projector(ctx);
  MatrixOperator x = random_hermitian(ctx, rng);
  CMatrix m = pi.m * x.m * pi.m;
  m /= std::max(1e-12, m.cwiseAbs().maxCoeff());
  return {ctx, std::move(m)};
}

PolySymbol random_symbol(int n, int max_degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(0, max_degree);
  PolySymbol s(n);
  for (int t = 0; t < 4; ++t) {
    MultiIndex idx(n);
    int budget = deg(rng);
    std::uniform_int_distribution<int> slot(0, 2 * n - 1);
    for (int d = 0; d < budget; ++d) {
      int k = slot(rng);
      if (k < n)
        ++idx.q[k];
      else
        ++idx.p[k - n];
    }
    s.add_term(idx, u(rng));
  }
  return s;
}

FokkerPlanckCoeffs random_feasible_coeffs(double hbar, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FokkerPlanckCoeffs c;
  c.c_pq = -(0.5 + 1.5 * u(rng));
  c.c_qp = 0.2 + 1.8 * u(rng);
  c.c_qq = 0.4 * (u(rng) - 0.5);
  c.c_pp = 0.4 * (u(rng) - 0.5);
  const double lambda = (c.c_pp + c.c_qq) / 2.0;
  c.d_qq = hbar * (0.6 * std::abs(lambda) + 0.3 + 0.5 * u(rng));
  c.d_pp = hbar * (0.6 * std::abs(lambda) + 0.3 + 0.5 * u(rng));
  const double room = std::sqrt(
      std::max(0.0, c.d_qq * c.d_pp - hbar * hbar * lambda * lambda / 4.0));
  c.d_qp = 0.5 * room * (2.0 * u(rng) - 1.0);
  return c;
}

class Suite {
 public:
  Suite(const QuantizationContext& ctx, const VerifyOptions& opt) : ctx_(ctx), rng_(opt.seed) {
    report_.seed = opt.seed;
    q_scale_ = opt.corrupt_q ? 1.01 : 1.0;
  }

  VerificationReport run() {
    basis_conditions();
    jordan_identities();
    reductions();
    if (ctx_.n == 1) second_order_routes();
    return report_;
  }

 private:
  void add(const std::string& name, double residual, double tol) {
    report_.entries.push_back({name, residual, tol, residual <= tol});
  }

  SuperOperator q1(int k) { return q_scale_ * build_Q1(ctx_, k); }

  double applied_diff(const SuperOperator& a, const SuperOperator& b, int samples = 4,
                      bool interior = true) {
    double mx = 0;
    for (int s = 0; s < samples; ++s) {
      MatrixOperator x = interior ? random_interior(ctx_, rng_) : random_hermitian(ctx_, rng_);
      MatrixOperator d = a.apply(x);
      d.m -= b.apply(x).m;
      mx = std::max(mx, interior ? interior_max_abs(d) : max_abs(d));
    }
    return mx;
  }

  void basis_conditions() {
    const MatrixOperator id = identity_operator(ctx_);
    double r_q1 = 0, r_q2 = 0, r_p = 0;
    for (int k = 1; k <= ctx_.n; ++k) {
      MatrixOperator e1 = q1(k).apply(id);
      e1.m -= build_q(ctx_, k).m;
      r_q1 = std::max(r_q1, max_abs(e1));
      MatrixOperator e2 = build_Q2(ctx_, k).apply(id);
      e2.m -= build_p(ctx_, k).m;
      r_q2 = std::max(r_q2, max_abs(e2));
      r_p = std::max(r_p, max_abs(build_P1(ctx_, k).apply(id)));
      r_p = std::max(r_p, max_abs(build_P2(ctx_, k).apply(id)));
    }
    add("coordinate_superop_on_identity", r_q1, 1e-12);
    add("momentum_superop_on_identity", r_q2, 1e-12);
    add("derivative_superops_annihilate_identity", r_p, 1e-14);

    double r_sa = 0;
    for (int rep = 0; rep < 4; ++rep) {
      MatrixOperator a = random_hermitian(ctx_, rng_), b = random_hermitian(ctx_, rng_);
      for (int k = 1; k <= ctx_.n; ++k)
        for (const SuperOperator& s : {q1(k), build_Q2(ctx_, k)}) {
          Complex lhs = hs_inner(s.apply(a), b);
          Complex rhs = hs_inner(a, s.apply(b));
          r_sa = std::max(r_sa, std::abs(lhs - rhs) / static_cast<double>(ctx_.total_dim()));
        }
    }
    add("multiplication_superops_self_adjoint", r_sa, 1e-10);

    double r_leib = 0;
    for (int rep = 0; rep < 4; ++rep) {
      MatrixOperator a = random_hermitian(ctx_, rng_), b = random_hermitian(ctx_, rng_);
      for (int k = 1; k <= ctx_.n; ++k)
        for (const SuperOperator& s : {build_P1(ctx_, k), build_P2(ctx_, k)}) {
          MatrixOperator lhs = s.apply(jordan(a, b));
          lhs.m -= jordan(s.apply(a), b).m + jordan(a, s.apply(b)).m;
          r_leib = std::max(r_leib, max_abs(lhs));
        }
    }
    add("derivative_superops_leibniz_over_jordan", r_leib, 1e-12);

    // canonical commutation of the superoperator basis, interior projected
    double r_ccr = 0, r_exact = 0, r_mut = 0;
    for (int k = 1; k <= ctx_.n; ++k)
      for (int m = 1; m <= ctx_.n; ++m) {
        const double delta = (k == m) ? 1.0 : 0.0;
        SuperOperator c11 = q1(k) * build_P1(ctx_, m) - build_P1(ctx_, m) * q1(k) -
                            Complex(0, delta) * SuperOperator::identity(ctx_);
        SuperOperator c22 = build_Q2(ctx_, k) * build_P2(ctx_, m) -
                            build_P2(ctx_, m) * build_Q2(ctx_, k) -
                            Complex(0, delta) * SuperOperator::identity(ctx_);
        r_ccr = std::max(r_ccr, applied_diff(c11, SuperOperator(ctx_)));
        r_ccr = std::max(r_ccr, applied_diff(c22, SuperOperator(ctx_)));
        SuperOperator x12 = q1(k) * build_P2(ctx_, m) - build_P2(ctx_, m) * q1(k);
        r_exact = std::max(r_exact, applied_diff(x12, SuperOperator(ctx_), 2, false));
        SuperOperator p12 = build_P1(ctx_, k) * build_P2(ctx_, m) -
                            build_P2(ctx_, m) * build_P1(ctx_, k);
        SuperOperator q12 = q1(k) * build_Q2(ctx_, m) - build_Q2(ctx_, m) * q1(k);
        r_mut = std::max(r_mut, applied_diff(p12, SuperOperator(ctx_)));
        r_mut = std::max(r_mut, applied_diff(q12, SuperOperator(ctx_)));
      }
    add("superop_basis_canonical_commutation_interior", r_ccr, 1e-10);
    add("cross_pair_superops_commute_exactly", r_exact, 1e-12);
    add("superop_basis_mutual_commutativity_interior", r_mut, 1e-10);
  }

  void jordan_identities() {
    double r_assoc = 0;
    for (int rep = 0; rep < 20; ++rep) {
      MatrixOperator a = random_hermitian(ctx_, rng_), b = random_hermitian(ctx_, rng_),
                     c = random_hermitian(ctx_, rng_);
      MatrixOperator lhs = jordan(jordan(a, b), c);
      lhs.m -= jordan(a, jordan(b, c)).m;
      lhs.m -= 0.25 * commutator(b, commutator(a, c)).m;
      r_assoc = std::max(r_assoc, max_abs(lhs));
    }
    add("jordan_associator_double_commutator", r_assoc, 1e-12);

    const MatrixOperator q = build_q(ctx_, 1), p = build_p(ctx_, 1);
    double r_sec = 0, r_mix = 0, r_mix_int = 0;
    for (int rep = 0; rep < 20; ++rep) {
      MatrixOperator a = random_hermitian(ctx_, rng_);
      MatrixOperator ca = commutator(q, a);
      // p o (p o [q,A]) - (p o p) o [q,A] = -(1/4)[p,[p,[q,A]]]
      MatrixOperator lhs = jordan(p, jordan(p, ca));
      lhs.m -= jordan(jordan(p, p), ca).m;
      lhs.m += 0.25 * commutator(p, commutator(p, ca)).m;
      r_sec = std::max(r_sec, max_abs(lhs));
      // q o (p o M) - (q o p) o M = -(1/4)[p,[q,M]]
      MatrixOperator mix = jordan(q, jordan(p, ca));
      mix.m -= jordan(jordan(q, p), ca).m;
      mix.m += 0.25 * commutator(p, commutator(q, ca)).m;
      r_mix = std::max(r_mix, max_abs(mix));
      // q o (p o M) = p o (q o M) on the interior (Jacobi + truncated CCR)
      MatrixOperator sw = jordan(q, jordan(p, ca));
      sw.m -= jordan(p, jordan(q, ca)).m;
      r_mix_int = std::max(r_mix_int, interior_max_abs({ctx_, sw.m}));
    }
    add("nested_jordan_second_order_closing", r_sec, 1e-12);
    add("nested_jordan_mixed_order_closing", r_mix, 1e-12);
    add("nested_jordan_order_swap_interior", r_mix_int, 1e-10);
  }

  void reductions() {
    const MatrixOperator id = identity_operator(ctx_);
    double r_red = 0;
    for (int rep = 0; rep < 10; ++rep) {
      PolySymbol s = random_symbol(ctx_.n, 4, rng_);
      DynOpSymbol mult(ctx_.n);
      mult.add_term(s, MultiIndex(ctx_.n));
      MatrixOperator got = quantize_dynop(mult, ctx_).apply(id);
      got.m -= weyl_quantize(s, ctx_).m;
      r_red = std::max(r_red, max_abs(got) / std::max(1.0, s.max_abs_coefficient()));
    }
    add("quantization_reduces_to_weyl_on_multiplication", r_red, 1e-12);

    std::uniform_real_distribution<double> u(0.2, 1.5);
    double r_ham = 0;
    for (int rep = 0; rep < 3; ++rep) {
      PolySymbol h(ctx_.n);
      for (int k = 1; k <= ctx_.n; ++k) {
        h += u(rng_) * PolySymbol::p(ctx_.n, k) * PolySymbol::p(ctx_.n, k);
        h += u(rng_) * PolySymbol::q(ctx_.n, k) * PolySymbol::q(ctx_.n, k);
      }
      SuperOperator lhs = quantize_dynop(dynop_from_hamiltonian(h), ctx_);
      SuperOperator rhs = hamiltonian_superop(weyl_quantize(h, ctx_));
      if (ctx_.total_dim() <= SuperOperator::kDenseCap)
        r_ham = std::max(r_ham, superop_max_abs_diff(lhs, rhs));
      else
        r_ham = std::max(r_ham, applied_diff(lhs, rhs, 4, false));
    }
    add("quadratic_hamiltonian_generator_reduction", r_ham, 1e-10);
  }

  void second_order_routes() {
    double r_eq = 0, r_tr = 0;
    for (int rep = 0; rep < 3; ++rep) {
      FokkerPlanckCoeffs c = random_feasible_coeffs(ctx_.hbar, rng_);
      SuperOperator s1 = build_lindblad_superop(solve_lindblad_ops(c, ctx_));
      SuperOperator s2 = build_explicit_superop(c, ctx_);
      SuperOperator s3 = build_generic_superop(c, ctx_);
      r_eq = std::max(r_eq, applied_diff(s1, s2));
      r_eq = std::max(r_eq, applied_diff(s1, s3));
      r_eq = std::max(r_eq, applied_diff(s2, s3));
      for (int s = 0; s < 3; ++s) {
        MatrixOperator rho = random_interior(ctx_, rng_);
        double tr = rho.m.trace().real();
        if (std::abs(tr) < 0.1) continue;
        rho.m /= tr;
        r_tr = std::max(r_tr, std::abs(s1.apply(rho).m.trace()));
      }
    }
    add("second_order_route_equivalence_interior", r_eq, 1e-10);
    add("second_order_trace_preservation", r_tr, 1e-11);

    FokkerPlanckCoeffs bad = random_feasible_coeffs(ctx_.hbar, rng_);
    bad.c_qq = 2.0;
    bad.c_pp = 2.0;  // lambda = 2
    bad.d_qq = bad.d_pp = 1e-3 * ctx_.hbar;
    bad.d_qp = 0;
    double rejected = 1.0;
    try {
      solve_lindblad_ops(bad, ctx_);
    } catch (const InfeasibleError&) {
      rejected = 0.0;
    }
    add("infeasible_diffusion_rejected", rejected, 0.5);
  }

  const QuantizationContext& ctx_;
  std::mt19937_64 rng_;
  double q_scale_ = 1.0;
  VerificationReport report_;
};

}  // namespace

VerificationReport verify_all(const QuantizationContext& ctx, const VerifyOptions& opt) {
  return Suite(ctx, opt).run();
}

std::string verification_report_json(const VerificationReport& report) {
  nlohmann::json out;
  out["seed"] = report.seed;
  out["all_passed"] = report.all_passed();
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"name", e.name},
                       {"residual", e.residual},
                       {"tolerance", e.tolerance},
                       {"pass", e.pass}});
  out["checks"] = std::move(entries);
  return out.dump(1) + "\n";
}

}  // namespace dynquant
