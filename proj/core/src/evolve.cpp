#include "dynquant/evolve.hpp"

#include "dynquant/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dynquant {

namespace {

double lenient_expectation(const CMatrix& rho, const CMatrix& obs) {
  return (rho * obs).trace().real();
}

struct Monitors {
  double trace, min_eig, herm_res;
};

Monitors monitors_of(const CMatrix& x) {
  Monitors m;
  m.trace = x.trace().real();
  m.herm_res = (x - x.adjoint()).cwiseAbs().maxCoeff();
  CMatrix h = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  m.min_eig = es.eigenvalues().minCoeff();
  return m;
}

TrajectoryRecord run(const SuperOperator& l, const MatrixOperator& x0,
                     const std::vector<MatrixOperator>& observables, const EvolutionSpec& spec) {
  if (spec.dt <= 0 || spec.steps < 1 || spec.record_every < 1)
    throw std::invalid_argument("EvolutionSpec: dt > 0, steps >= 1, record_every >= 1 required");
  for (const auto& obs : observables) check_same_context(x0, obs);

  const long n_rec = spec.steps / spec.record_every + 1;
  TrajectoryRecord rec;
  rec.expectations.resize(n_rec, static_cast<long>(observables.size()));
  rec.times.reserve(n_rec);

  CMatrix prop;
  if (spec.method == EvolutionSpec::Method::exponential) {
    prop = (spec.dt * l.dense()).exp();
  }

  const double trace0 = x0.m.trace().real();
  CMatrix x = x0.m;
  long rec_row = 0;
  auto record = [&](double t) {
    rec.times.push_back(t);
    for (size_t c = 0; c < observables.size(); ++c)
      rec.expectations(rec_row, static_cast<long>(c)) = lenient_expectation(x, observables[c].m);
    Monitors m = monitors_of(x);
    rec.trace.push_back(m.trace);
    rec.min_eigenvalue.push_back(m.min_eig);
    rec.hermiticity_residual.push_back(m.herm_res);
    if (std::abs(m.trace - trace0) > 1e-6) rec.trace_drift_flagged = true;
    ++rec_row;
  };
  record(0.0);

  const long d = x0.dim();
  for (long step = 1; step <= spec.steps; ++step) {
    if (spec.method == EvolutionSpec::Method::exponential) {
      Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(x.data(), d * d);
      Eigen::VectorXcd w = prop * v;
      x = Eigen::Map<const CMatrix>(w.data(), d, d);
    } else {
      auto ap = [&](const CMatrix& y) { return l.apply({x0.ctx, y}).m; };
      CMatrix k1 = ap(x);
      CMatrix k2 = ap(x + 0.5 * spec.dt * k1);
      CMatrix k3 = ap(x + 0.5 * spec.dt * k2);
      CMatrix k4 = ap(x + spec.dt * k3);
      x += (spec.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!x.allFinite()) throw DivergenceError("evolution produced a non-finite value", step);
    if (step % spec.record_every == 0) record(step * spec.dt);
  }
  rec.expectations.conservativeResize(rec_row, Eigen::NoChange);
  rec.final_value = MatrixOperator(x0.ctx, std::move(x));
  return rec;
}

}  // namespace

TrajectoryRecord evolve_state(const SuperOperator& l, const MatrixOperator& rho0,
                              const std::vector<MatrixOperator>& observables,
                              const EvolutionSpec& spec) {
  if (std::abs(rho0.m.trace().real() - 1.0) > 1e-10 || std::abs(rho0.m.trace().imag()) > 1e-10)
    throw std::invalid_argument("evolve_state: initial state must have unit trace");
  if (!rho0.is_hermitian(1e-10))
    throw std::invalid_argument("evolve_state: initial state must be Hermitian");
  return run(l, rho0, observables, spec);
}

TrajectoryRecord evolve_observable(const SuperOperator& l, const MatrixOperator& a0,
                                   const EvolutionSpec& spec) {
  if (!a0.is_hermitian(1e-10))
    throw std::invalid_argument("evolve_observable: initial observable must be Hermitian");
  return run(l, a0, {}, spec);
}

EhrenfestResult ehrenfest_compare(const DynOpSymbol& l, const QuantizationContext& ctx,
                                  const MatrixOperator& rho0, const EvolutionSpec& spec) {
  ClassicalRhs rhs = vector_field(l);  // throws when l is not a derivation

  std::vector<MatrixOperator> observables;
  std::vector<std::string> names;
  for (int k = 1; k <= ctx.n; ++k) {
    observables.push_back(build_q(ctx, k));
    names.push_back("q" + std::to_string(k));
  }
  for (int k = 1; k <= ctx.n; ++k) {
    observables.push_back(build_p(ctx, k));
    names.push_back("p" + std::to_string(k));
  }

  ClassicalState x0;
  x0.q.resize(ctx.n);
  x0.p.resize(ctx.n);
  for (int k = 0; k < ctx.n; ++k) {
    x0.q[k] = expectation(rho0, observables[k]);
    x0.p[k] = expectation(rho0, observables[ctx.n + k]);
  }

  EhrenfestResult res;
  SuperOperator lambda = superop_adjoint(quantize_dynop(l, ctx));
  res.quantum = evolve_state(lambda, rho0, observables, spec);
  res.quantum.observable_names = names;
  res.classical = integrate_classical(rhs, x0, spec.dt, spec.steps, spec.record_every);

  const size_t m = std::min(res.quantum.times.size(), res.classical.size());
  res.deviation.resize(m);
  for (size_t i = 0; i < m; ++i) {
    double dev = 0;
    for (int k = 0; k < ctx.n; ++k) {
      dev = std::max(dev, std::abs(res.quantum.expectations(i, k) - res.classical[i].q[k]));
      dev = std::max(dev,
                     std::abs(res.quantum.expectations(i, ctx.n + k) - res.classical[i].p[k]));
    }
    res.deviation[i] = dev;
    res.max_deviation = std::max(res.max_deviation, dev);
  }
  return res;
}

void write_record_csv(const std::string& path, const TrajectoryRecord& rec) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_record_csv: cannot open " + path);
  f << "t";
  for (size_t c = 0; c < static_cast<size_t>(rec.expectations.cols()); ++c) {
    if (c < rec.observable_names.size())
      f << "," << rec.observable_names[c];
    else
      f << ",obs" << c + 1;
  }
  f << ",trace,min_eig,herm_res\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    f << buf;
  };
  for (size_t i = 0; i < rec.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", rec.times[i]);
    f << buf;
    for (long c = 0; c < rec.expectations.cols(); ++c) put(rec.expectations(i, c));
    put(rec.trace[i]);
    put(rec.min_eigenvalue[i]);
    put(rec.hermiticity_residual[i]);
    f << "\n";
  }
}

}  // namespace dynquant
