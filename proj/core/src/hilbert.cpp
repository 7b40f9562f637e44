#include "dynquant/hilbert.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace dynquant {

namespace {
constexpr int kWordCap = 8;  // per-mode factor word length cap

CMatrix single_mode_annihilation(int N) {
  CMatrix a = CMatrix::Zero(N, N);
  for (int n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// kron over modes, mode-major: mode 1 slowest index.
CMatrix kron_modes(const std::vector<CMatrix>& per_mode) {
  CMatrix acc = per_mode.front();
  for (size_t k = 1; k < per_mode.size(); ++k)
    acc = Eigen::kroneckerProduct(acc, per_mode[k]).eval();
  return acc;
}

// Average of products over all distinct orderings of the factor multiset.
// `ids` selects factors (sorted); identical ids must map to identical matrices.
CMatrix symmetrized_product(const std::vector<CMatrix>& factors, std::vector<int> ids, int N) {
  if (ids.empty()) return CMatrix::Identity(N, N);
  std::sort(ids.begin(), ids.end());
  CMatrix acc = CMatrix::Zero(N, N);
  long count = 0;
  do {
    CMatrix prod = CMatrix::Identity(N, N);
    for (int id : ids) prod = prod * factors[id];
    acc += prod;
    ++count;
  } while (std::next_permutation(ids.begin(), ids.end()));
  return acc / static_cast<double>(count);
}
}  // namespace

QuantizationContext::QuantizationContext(double hbar_, int dim_, int n_, double scale_mass_,
                                         double scale_omega_)
    : hbar(hbar_), dim(dim_), n(n_), scale_mass(scale_mass_), scale_omega(scale_omega_) {
  if (hbar <= 0.0) throw std::invalid_argument("QuantizationContext: hbar must be positive");
  if (dim < 2) throw std::invalid_argument("QuantizationContext: dim must be >= 2");
  if (n < 1) throw std::invalid_argument("QuantizationContext: mode count must be >= 1");
  if (scale_mass <= 0.0 || scale_omega <= 0.0)
    throw std::invalid_argument("QuantizationContext: scales must be positive");
}

long QuantizationContext::total_dim() const {
  long d = 1;
  for (int k = 0; k < n; ++k) d *= dim;
  return d;
}

MatrixOperator::MatrixOperator(QuantizationContext c, CMatrix mat)
    : ctx(std::move(c)), m(std::move(mat)) {
  if (m.rows() != m.cols() || m.rows() != ctx.total_dim())
    throw std::invalid_argument("MatrixOperator: matrix side must equal N^n");
}

bool MatrixOperator::is_hermitian(double tol) const {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

void check_same_context(const MatrixOperator& a, const MatrixOperator& b) {
  if (!(a.ctx == b.ctx)) throw std::invalid_argument("context mismatch");
}

MatrixOperator identity_operator(const QuantizationContext& ctx) {
  return {ctx, CMatrix::Identity(ctx.total_dim(), ctx.total_dim())};
}

MatrixOperator zero_operator(const QuantizationContext& ctx) {
  return {ctx, CMatrix::Zero(ctx.total_dim(), ctx.total_dim())};
}

MatrixOperator build_annihilation(const QuantizationContext& ctx, int k) {
  if (k < 1 || k > ctx.n) throw std::invalid_argument("build_annihilation: mode out of range");
  std::vector<CMatrix> per_mode(ctx.n, CMatrix::Identity(ctx.dim, ctx.dim));
  per_mode[k - 1] = single_mode_annihilation(ctx.dim);
  return {ctx, kron_modes(per_mode)};
}

MatrixOperator build_q(const QuantizationContext& ctx, int k) {
  MatrixOperator a = build_annihilation(ctx, k);
  double c = std::sqrt(ctx.hbar / (2.0 * ctx.scale_mass * ctx.scale_omega));
  return {ctx, c * (a.m + a.m.adjoint())};
}

MatrixOperator build_p(const QuantizationContext& ctx, int k) {
  MatrixOperator a = build_annihilation(ctx, k);
  double c = std::sqrt(ctx.hbar * ctx.scale_mass * ctx.scale_omega / 2.0);
  return {ctx, Complex(0, 1) * c * (a.m.adjoint() - a.m)};
}

MatrixOperator weyl_quantize(const PolySymbol& sym, const QuantizationContext& ctx) {
  if (sym.modes() != ctx.n) throw std::invalid_argument("weyl_quantize: mode count mismatch");
  const int N = ctx.dim;
  const CMatrix a1 = single_mode_annihilation(N);
  const CMatrix qs = std::sqrt(ctx.hbar / (2.0 * ctx.scale_mass * ctx.scale_omega)) *
                     (a1 + a1.adjoint());
  const CMatrix ps = Complex(0, 1) *
                     std::sqrt(ctx.hbar * ctx.scale_mass * ctx.scale_omega / 2.0) *
                     (a1.adjoint() - a1);
  const std::vector<CMatrix> factors = {qs, ps};

  CMatrix acc = CMatrix::Zero(ctx.total_dim(), ctx.total_dim());
  for (const auto& [idx, coeff] : sym.terms()) {
    std::vector<CMatrix> per_mode;
    per_mode.reserve(ctx.n);
    for (int k = 0; k < ctx.n; ++k) {
      if (idx.q[k] + idx.p[k] > kWordCap)
        throw std::invalid_argument("weyl_quantize: per-mode monomial degree exceeds cap 8");
      std::vector<int> ids(idx.q[k], 0);
      ids.insert(ids.end(), idx.p[k], 1);
      per_mode.push_back(symmetrized_product(factors, ids, N));
    }
    acc += coeff * kron_modes(per_mode);
  }
  return {ctx, std::move(acc)};
}

MatrixOperator build_weyl_operator(const WeylBasisParams& params, const QuantizationContext& ctx) {
  if (static_cast<int>(params.a.size()) != ctx.n || static_cast<int>(params.b.size()) != ctx.n)
    throw std::invalid_argument("build_weyl_operator: parameter length mismatch");
  CMatrix gen = CMatrix::Zero(ctx.total_dim(), ctx.total_dim());
  for (int k = 1; k <= ctx.n; ++k)
    gen += params.a[k - 1] * build_q(ctx, k).m + params.b[k - 1] * build_p(ctx, k).m;
  gen *= Complex(0, 1) / ctx.hbar;
  return {ctx, gen.exp()};
}

MatrixOperator commutator(const MatrixOperator& a, const MatrixOperator& b) {
  check_same_context(a, b);
  return {a.ctx, a.m * b.m - b.m * a.m};
}

MatrixOperator jordan(const MatrixOperator& a, const MatrixOperator& b) {
  check_same_context(a, b);
  return {a.ctx, 0.5 * (a.m * b.m + b.m * a.m)};
}

Complex hs_inner(const MatrixOperator& a, const MatrixOperator& b) {
  check_same_context(a, b);
  return (a.m.adjoint() * b.m).trace();
}

MatrixOperator coherent_state(const QuantizationContext& ctx, const std::vector<double>& q0,
                              const std::vector<double>& p0, double loss_tol) {
  if (static_cast<int>(q0.size()) != ctx.n || static_cast<int>(p0.size()) != ctx.n)
    throw std::invalid_argument("coherent_state: displacement length mismatch");
  const int N = ctx.dim;
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  double kept = 1.0;
  for (int k = 0; k < ctx.n; ++k) {
    const Complex alpha(std::sqrt(ctx.scale_mass * ctx.scale_omega / (2.0 * ctx.hbar)) * q0[k],
                        p0[k] / std::sqrt(2.0 * ctx.hbar * ctx.scale_mass * ctx.scale_omega));
    Eigen::VectorXcd c(N);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int m = 1; m < N; ++m) c(m) = c(m - 1) * alpha / std::sqrt(static_cast<double>(m));
    kept *= c.squaredNorm();
    Eigen::VectorXcd w(v.size() * N);
    for (long i = 0; i < v.size(); ++i) w.segment(i * N, N) = v(i) * c;
    v = std::move(w);
  }
  if (1.0 - kept > loss_tol)
    throw std::invalid_argument("coherent_state: truncation loss above threshold; increase dim");
  v.normalize();
  return {ctx, v * v.adjoint()};
}

MatrixOperator coherent_state(const QuantizationContext& ctx, double q0, double p0,
                              double loss_tol) {
  return coherent_state(ctx, std::vector<double>(ctx.n, q0), std::vector<double>(ctx.n, p0),
                        loss_tol);
}

double expectation(const MatrixOperator& rho, const MatrixOperator& a) {
  check_same_context(rho, a);
  if (!a.is_hermitian(1e-10)) throw std::invalid_argument("expectation: non-Hermitian observable");
  Complex v = (rho.m * a.m).trace();
  double scale = std::max(1.0, std::abs(v));
  if (std::abs(v.imag()) > 1e-10 * scale)
    throw std::runtime_error("expectation: imaginary part above tolerance");
  return v.real();
}

MatrixOperator interior_projector(const QuantizationContext& ctx, int guard) {
  if (guard < 0) guard = ctx.guard_band();
  const int N = ctx.dim;
  CMatrix pi1 = CMatrix::Zero(N, N);
  for (int i = 0; i < N - guard; ++i) pi1(i, i) = 1.0;
  std::vector<CMatrix> per_mode(ctx.n, pi1);
  return {ctx, kron_modes(per_mode)};
}

double interior_max_abs(const MatrixOperator& a, int guard) {
  MatrixOperator pi = interior_projector(a.ctx, guard);
  return (pi.m * a.m * pi.m).cwiseAbs().maxCoeff();
}

double max_abs(const MatrixOperator& a) { return a.m.cwiseAbs().maxCoeff(); }

void write_operator_csv(const std::string& path, const MatrixOperator& a) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_operator_csv: cannot open " + path);
  f << "i,j,re,im\n";
  char buf[128];
  for (long i = 0; i < a.m.rows(); ++i)
    for (long j = 0; j < a.m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", i, j, a.m(i, j).real(),
                    a.m(i, j).imag());
      f << buf;
    }
}

}  // namespace dynquant
