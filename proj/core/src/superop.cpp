#include "dynquant/superop.hpp"

#include <json.hpp>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dynquant {

namespace {
double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}
}  // namespace

SuperOperator::SuperOperator(QuantizationContext ctx) : ctx_(std::move(ctx)) {}

SuperOperator::SuperOperator(QuantizationContext ctx, std::vector<SuperOpTerm> terms)
    : ctx_(std::move(ctx)), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (t.left.rows() != ctx_.total_dim() || t.right.rows() != ctx_.total_dim() ||
        t.left.rows() != t.left.cols() || t.right.rows() != t.right.cols())
      throw std::invalid_argument("SuperOperator: factor side must equal N^n");
}

SuperOperator SuperOperator::identity(const QuantizationContext& ctx) {
  const CMatrix id = CMatrix::Identity(ctx.total_dim(), ctx.total_dim());
  return SuperOperator(ctx, {{Complex(1, 0), id, id}});
}

SuperOperator SuperOperator::from_dense(QuantizationContext ctx, CMatrix dense) {
  const long side = ctx.total_dim() * ctx.total_dim();
  if (dense.rows() != side || dense.cols() != side)
    throw std::invalid_argument("SuperOperator: dense side must equal (N^n)^2");
  SuperOperator s(std::move(ctx));
  s.dense_ = std::move(dense);
  s.structured_ = false;
  return s;
}

const std::vector<SuperOpTerm>& SuperOperator::terms() const {
  if (!structured_) throw std::logic_error("SuperOperator: no structured form");
  return terms_;
}

MatrixOperator SuperOperator::apply(const MatrixOperator& x) const {
  if (!(x.ctx == ctx_)) throw std::invalid_argument("context mismatch");
  const long d = ctx_.total_dim();
  if (structured_) {
    CMatrix acc = CMatrix::Zero(d, d);
    for (const auto& t : terms_) acc.noalias() += t.coeff * (t.left * x.m * t.right);
    return {ctx_, std::move(acc)};
  }
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(x.m.data(), d * d);
  Eigen::VectorXcd w = *dense_ * v;
  return {ctx_, Eigen::Map<const CMatrix>(w.data(), d, d)};
}

SuperOperator& SuperOperator::operator+=(const SuperOperator& o) {
  if (!(o.ctx_ == ctx_)) throw std::invalid_argument("context mismatch");
  if (structured_ && o.structured_) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    dense_.reset();
    return *this;
  }
  dense_ = dense() + o.dense();
  structured_ = false;
  terms_.clear();
  return *this;
}

SuperOperator SuperOperator::operator+(const SuperOperator& o) const {
  SuperOperator r = *this;
  r += o;
  return r;
}

SuperOperator SuperOperator::operator-(const SuperOperator& o) const {
  return *this + o * Complex(-1, 0);
}

SuperOperator SuperOperator::operator*(const SuperOperator& o) const {
  if (!(o.ctx_ == ctx_)) throw std::invalid_argument("context mismatch");
  if (structured_ && o.structured_) {
    std::vector<SuperOpTerm> out;
    out.reserve(terms_.size() * o.terms_.size());
    for (const auto& t1 : terms_)
      for (const auto& t2 : o.terms_)
        out.push_back({t1.coeff * t2.coeff, t1.left * t2.left, t2.right * t1.right});
    return SuperOperator(ctx_, std::move(out));
  }
  return from_dense(ctx_, dense() * o.dense());
}

SuperOperator SuperOperator::operator*(Complex s) const {
  if (structured_) {
    SuperOperator r = *this;
    for (auto& t : r.terms_) t.coeff *= s;
    if (r.dense_) *r.dense_ *= s;
    return r;
  }
  return from_dense(ctx_, *dense_ * s);
}

SuperOperator SuperOperator::adjoint() const {
  if (structured_) {
    std::vector<SuperOpTerm> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_)
      out.push_back({std::conj(t.coeff), t.left.adjoint(), t.right.adjoint()});
    return SuperOperator(ctx_, std::move(out));
  }
  return from_dense(ctx_, dense_->adjoint());
}

CMatrix SuperOperator::dense(long total_dim_cap) const {
  if (dense_) return *dense_;
  const long d = ctx_.total_dim();
  if (d > total_dim_cap)
    throw std::invalid_argument("SuperOperator::dense: N^n above dense cap");
  const long side = d * d;
  CMatrix acc = CMatrix::Zero(side, side);
  for (const auto& t : terms_)
    acc += t.coeff * Eigen::kroneckerProduct(t.right.transpose(), t.left).eval();
  return acc;
}

SuperOperator left_mult(const MatrixOperator& a) {
  const CMatrix id = CMatrix::Identity(a.dim(), a.dim());
  return SuperOperator(a.ctx, {{Complex(1, 0), a.m, id}});
}

SuperOperator right_mult(const MatrixOperator& a) {
  const CMatrix id = CMatrix::Identity(a.dim(), a.dim());
  return SuperOperator(a.ctx, {{Complex(1, 0), id, a.m}});
}

SuperOperator build_P1(const QuantizationContext& ctx, int k) {
  const MatrixOperator p = build_p(ctx, k);
  const CMatrix id = CMatrix::Identity(ctx.total_dim(), ctx.total_dim());
  return SuperOperator(ctx, {{Complex(1.0 / ctx.hbar, 0), p.m, id},
                             {Complex(-1.0 / ctx.hbar, 0), id, p.m}});
}

SuperOperator build_P2(const QuantizationContext& ctx, int k) {
  const MatrixOperator q = build_q(ctx, k);
  const CMatrix id = CMatrix::Identity(ctx.total_dim(), ctx.total_dim());
  return SuperOperator(ctx, {{Complex(-1.0 / ctx.hbar, 0), q.m, id},
                             {Complex(1.0 / ctx.hbar, 0), id, q.m}});
}

SuperOperator build_Q1(const QuantizationContext& ctx, int k) {
  const MatrixOperator q = build_q(ctx, k);
  const CMatrix id = CMatrix::Identity(ctx.total_dim(), ctx.total_dim());
  return SuperOperator(ctx, {{Complex(0.5, 0), q.m, id}, {Complex(0.5, 0), id, q.m}});
}

SuperOperator build_Q2(const QuantizationContext& ctx, int k) {
  const MatrixOperator p = build_p(ctx, k);
  const CMatrix id = CMatrix::Identity(ctx.total_dim(), ctx.total_dim());
  return SuperOperator(ctx, {{Complex(0.5, 0), p.m, id}, {Complex(0.5, 0), id, p.m}});
}

SuperOperator hamiltonian_superop(const MatrixOperator& h) {
  if (!h.is_hermitian(1e-10))
    throw std::invalid_argument("hamiltonian_superop: non-Hermitian generator");
  const Complex c(0, 1.0 / h.ctx.hbar);
  const CMatrix id = CMatrix::Identity(h.dim(), h.dim());
  return SuperOperator(h.ctx, {{c, h.m, id}, {-c, id, h.m}});
}

// Symmetrized multiplication superoperator of one monomial, in closed form.
// Averaging products of the atoms (q^l+q^r)/2, (p^l+p^r)/2 over all factor
// orderings collapses, because left and right factors commute, to
//   2^{-d} sum over sub-multi-indices beta <= gamma of
//     prod binom(gamma, beta) * W(beta)^l * W(gamma-beta)^r
// where W is the ordinary Weyl quantization of the sub-monomial.
namespace {
class MonomialQuantizer {
 public:
  explicit MonomialQuantizer(const QuantizationContext& ctx) : ctx_(ctx) {}

  const CMatrix& weyl(const MultiIndex& g) {
    auto it = cache_.find(g);
    if (it != cache_.end()) return it->second;
    CMatrix m = weyl_quantize(PolySymbol::monomial(g, 1.0), ctx_).m;
    return cache_.emplace(g, std::move(m)).first->second;
  }

  void append_symmetrized(std::vector<SuperOpTerm>& out, const MultiIndex& gamma, double c) {
    const int n = gamma.modes();
    std::vector<int> g(2 * n);
    for (int k = 0; k < n; ++k) {
      g[k] = gamma.q[k];
      g[n + k] = gamma.p[k];
    }
    const double norm = std::pow(0.5, gamma.total());
    std::vector<int> beta(2 * n, 0);
    while (true) {
      double w = c * norm;
      MultiIndex bi(n), ci(n);
      for (int k = 0; k < n; ++k) {
        w *= binom(g[k], beta[k]) * binom(g[n + k], beta[n + k]);
        bi.q[k] = beta[k];
        bi.p[k] = beta[n + k];
        ci.q[k] = g[k] - beta[k];
        ci.p[k] = g[n + k] - beta[n + k];
      }
      out.push_back({Complex(w, 0), weyl(bi), weyl(ci)});
      int pos = 0;
      while (pos < 2 * n && beta[pos] == g[pos]) beta[pos++] = 0;
      if (pos == 2 * n) break;
      ++beta[pos];
    }
  }

 private:
  const QuantizationContext& ctx_;
  std::map<MultiIndex, CMatrix> cache_;
};
}  // namespace

SuperOperator quantize_dynop(const DynOpSymbol& l, const QuantizationContext& ctx) {
  if (l.modes() != ctx.n) throw std::invalid_argument("quantize_dynop: mode count mismatch");
  MonomialQuantizer mq(ctx);
  const Complex i1(0, 1);
  std::vector<SuperOpTerm> acc;
  for (const auto& term : l.terms()) {
    // derivative word: i*P1 factors to the left of i*P2 factors
    SuperOperator deriv = SuperOperator::identity(ctx);
    for (int k = 1; k <= ctx.n; ++k)
      for (int r = 0; r < term.deriv.p[k - 1]; ++r) deriv = (i1 * build_P2(ctx, k)) * deriv;
    for (int k = 1; k <= ctx.n; ++k)
      for (int r = 0; r < term.deriv.q[k - 1]; ++r) deriv = (i1 * build_P1(ctx, k)) * deriv;

    std::vector<SuperOpTerm> mult;
    for (const auto& [gamma, c] : term.coeff.terms()) mq.append_symmetrized(mult, gamma, c);

    SuperOperator word = SuperOperator(ctx, std::move(mult)) * deriv;
    acc.insert(acc.end(), word.terms().begin(), word.terms().end());
  }
  return SuperOperator(ctx, std::move(acc));
}

SuperOperator build_weyl_superop_basis(const std::vector<double>& a1,
                                       const std::vector<double>& a2,
                                       const std::vector<double>& b1,
                                       const std::vector<double>& b2,
                                       const QuantizationContext& ctx) {
  if (static_cast<int>(a1.size()) != ctx.n || static_cast<int>(a2.size()) != ctx.n ||
      static_cast<int>(b1.size()) != ctx.n || static_cast<int>(b2.size()) != ctx.n)
    throw std::invalid_argument("build_weyl_superop_basis: parameter length mismatch");
  SuperOperator gen(ctx);
  for (int k = 1; k <= ctx.n; ++k) {
    gen += a1[k - 1] * build_Q1(ctx, k);
    gen += a2[k - 1] * build_Q2(ctx, k);
    gen += b1[k - 1] * build_P1(ctx, k);
    gen += b2[k - 1] * build_P2(ctx, k);
  }
  CMatrix g = Complex(0, 1) * gen.dense();
  return SuperOperator::from_dense(ctx, g.exp());
}

MatrixOperator apply(const SuperOperator& s, const MatrixOperator& x) { return s.apply(x); }

SuperOperator superop_adjoint(const SuperOperator& s) { return s.adjoint(); }

double superop_max_abs_diff(const SuperOperator& a, const SuperOperator& b) {
  if (!(a.context() == b.context())) throw std::invalid_argument("context mismatch");
  if (!a.has_structured() || !b.has_structured())
    return (a.dense() - b.dense()).cwiseAbs().maxCoeff();
  const long d = a.context().total_dim();
  if (d <= SuperOperator::kDenseCap) return (a.dense() - b.dense()).cwiseAbs().maxCoeff();

  std::vector<SuperOpTerm> diff = a.terms();
  for (const auto& t : b.terms()) diff.push_back({-t.coeff, t.left, t.right});
  const long T = static_cast<long>(diff.size());
  if (T == 0) return 0.0;

  // Dense entries are S[(i1 d + i2),(j1 d + j2)] = sum_t c_t B_t(j1,i1) A_t(i2,j2):
  // one GEMM of [vec(A_t)] against weight columns indexed by (i1,j1), blocked
  // over columns so only a slab of the d^2 x d^2 matrix lives at once.
  CMatrix amat(d * d, T);
  for (long t = 0; t < T; ++t)
    amat.col(t) = Eigen::Map<const Eigen::VectorXcd>(diff[t].left.data(), d * d);

  const long cols = d * d;
  const long blk = std::max<long>(64, std::min(cols, (1L << 24) / (d * d) + 1));
  CMatrix w(T, blk);
  double mx = 0.0;
  for (long c0 = 0; c0 < cols; c0 += blk) {
    const long nb = std::min(blk, cols - c0);
    for (long c = 0; c < nb; ++c) {
      const long i1 = (c0 + c) / d, j1 = (c0 + c) % d;
      for (long t = 0; t < T; ++t) w(t, c) = diff[t].coeff * diff[t].right(j1, i1);
    }
    CMatrix slab = amat * w.leftCols(nb);
    mx = std::max(mx, slab.cwiseAbs().maxCoeff());
  }
  return mx;
}

void write_superop_csv(const std::string& path, const SuperOperator& s) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_superop_csv: cannot open " + path);
  const CMatrix m = s.dense();
  f << "i,j,re,im\n";
  char buf[128];
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", i, j, m(i, j).real(),
                    m(i, j).imag());
      f << buf;
    }
}

void write_superop_structured_json(const std::string& path, const SuperOperator& s) {
  nlohmann::json out;
  out["convention"] = "X -> coeff * left * X * right; vec(AXB) = (B^T kron A) vec(X)";
  out["dim"] = s.context().total_dim();
  std::vector<CMatrix> ops;
  auto ref = [&ops](const CMatrix& m) -> size_t {
    for (size_t i = 0; i < ops.size(); ++i)
      if (ops[i].rows() == m.rows() && ops[i] == m) return i;
    ops.push_back(m);
    return ops.size() - 1;
  };
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : s.terms()) {
    terms.push_back({{"coeff_re", t.coeff.real()},
                     {"coeff_im", t.coeff.imag()},
                     {"left_ref", ref(t.left)},
                     {"right_ref", ref(t.right)}});
  }
  out["terms"] = std::move(terms);
  nlohmann::json jops = nlohmann::json::array();
  for (const auto& m : ops) {
    nlohmann::json entries = nlohmann::json::array();
    for (long i = 0; i < m.rows(); ++i)
      for (long j = 0; j < m.cols(); ++j)
        if (m(i, j) != Complex(0, 0))
          entries.push_back({i, j, m(i, j).real(), m(i, j).imag()});
    jops.push_back(std::move(entries));
  }
  out["operators"] = std::move(jops);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_superop_structured_json: cannot open " + path);
  f << out.dump(1) << "\n";
}

}  // namespace dynquant
