#pragma once

// Zero-temperature GKSL dynamics of one-particle states through the
// dissipative propagator dV/dt = -A(t) V, V(0) = I, plus a direct
// integration of the full (n+1)-dimensional master equation.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "opsq/integrator.hpp"
#include "opsq/model.hpp"
#include "opsq/one_particle.hpp"

namespace opsq {

struct Propagator {
  double t = 0.0;
  ComplexMatrix v;
};

enum class PropagationMethod { automatic, ode, exponential };

namespace detail {

inline void check_contraction(const ComplexMatrix& v, double t) {
  const double nrm = operator_norm(v);
  if (nrm > 1.0 + 1e-9) {
    std::ostringstream os;
    os << "propagator lost contractivity at t = " << t << ": |V| = " << nrm;
    throw NumericalError(os.str());
  }
}

}  // namespace detail

/// Advances a propagator V(t0) to V(t1).
inline Propagator propagate_from(const GKSLModel& model, const Propagator& start, double t1,
                                 const StepPolicy& policy = {},
                                 PropagationMethod method = PropagationMethod::automatic) {
  if (!(t1 >= start.t)) throw ValidationError("time_order", "propagation end precedes start");
  if (start.v.rows() != model.n || start.v.cols() != model.n)
    throw DimensionError("propagator shape does not match the model");
  const bool use_exp = method == PropagationMethod::exponential ||
                       (method == PropagationMethod::automatic && model.time_independent);
  Propagator out{t1, ComplexMatrix()};
  if (use_exp) {
    if (!model.time_independent)
      throw ValidationError("time_independent",
                            "matrix-exponential propagation needs a time-independent model");
    const ComplexMatrix a = accretive_matrix(model, 0.0);
    out.v = matrix_exponential(-(t1 - start.t) * a) * start.v;
  } else {
    auto rhs = [&model](double t, const ComplexMatrix& v) -> ComplexMatrix {
      return -accretive_matrix(model, t) * v;
    };
    out.v = integrate_rk4(rhs, start.v, start.t, t1, policy, model.breakpoints);
  }
  detail::check_contraction(out.v, t1);
  return out;
}

inline Propagator propagate(const GKSLModel& model, double t_final, const StepPolicy& policy = {},
                            PropagationMethod method = PropagationMethod::automatic) {
  if (!(t_final >= 0.0)) throw ValidationError("time", "t_final must be nonnegative");
  const Propagator id{0.0, ComplexMatrix::Identity(model.n, model.n)};
  return propagate_from(model, id, t_final, policy, method);
}

/// V(t_k) on an increasing grid starting at t >= 0.
inline std::vector<Propagator> propagate_grid(const GKSLModel& model,
                                              const std::vector<double>& times,
                                              const StepPolicy& policy = {},
                                              PropagationMethod method = PropagationMethod::automatic) {
  std::vector<Propagator> out;
  out.reserve(times.size());
  Propagator cur{0.0, ComplexMatrix::Identity(model.n, model.n)};
  for (double t : times) {
    if (model.time_independent && method != PropagationMethod::ode) {
      cur = propagate(model, t, policy, method);
    } else {
      cur = propagate_from(model, cur, t, policy, method);
    }
    out.push_back(cur);
  }
  return out;
}

/// psi -> V psi, R -> V R V^dagger, rho00 = 1 - Tr R.
inline OneParticleState apply_propagator(const OneParticleState& s0, const Propagator& p) {
  if (p.v.rows() != s0.n()) throw DimensionError("propagator shape does not match the state");
  ComplexVector psi = p.v * s0.psi();
  ComplexMatrix r = p.v * s0.r() * p.v.adjoint();
  const double rho00 = 1.0 - r.trace().real();
  return make_state(rho00, std::move(psi), std::move(r));
}

inline OneParticleState evolve_state(const OneParticleState& s0, const GKSLModel& model, double t,
                                     const StepPolicy& policy = {},
                                     PropagationMethod method = PropagationMethod::automatic) {
  if (s0.n() != model.n) throw DimensionError("state and model mode counts differ");
  return apply_propagator(s0, propagate(model, t, policy, method));
}

/// Right-hand side of the (n+1)x(n+1) master equation with 0 + H(t) and
/// L_l = |0><f_l(t)|. The jump sum is written through Gamma = sum |f_l><f_l|:
/// sum L rho L^dagger = Tr(Gamma R) |0><0| and sum L^dagger L = 0 + Gamma.
inline ComplexMatrix gksl_rhs(const GKSLModel& model, double t, const ComplexMatrix& rho) {
  const Eigen::Index n = model.n;
  ComplexMatrix g = kI * model.checked_hamiltonian(t);
  ComplexMatrix gamma = ComplexMatrix::Zero(n, n);
  for (const auto& f : model.checked_decay_vectors(t)) gamma.noalias() += f * f.adjoint();
  g += 0.5 * gamma;
  // -i[0 + H, rho] - 1/2 {0 + Gamma, rho} = -(0 + G) rho - rho (0 + G)^dagger
  ComplexMatrix out(n + 1, n + 1);
  out.bottomRows(n).noalias() = -g * rho.bottomRows(n);
  out.row(0).setZero();
  out.rightCols(n) -= rho.rightCols(n) * g.adjoint();
  out(0, 0) += (gamma * rho.bottomRightCorner(n, n)).trace();
  return out;
}

inline OneParticleState integrate_direct(const OneParticleState& s0, const GKSLModel& model,
                                         double t, const StepPolicy& policy = {}) {
  if (s0.n() != model.n) throw DimensionError("state and model mode counts differ");
  if (!(t >= 0.0)) throw ValidationError("time", "t must be nonnegative");
  auto rhs = [&model](double tt, const ComplexMatrix& rho) { return gksl_rhs(model, tt, rho); };
  const ComplexMatrix rho =
      integrate_rk4(rhs, ComplexMatrix(s0.assemble()), 0.0, t, policy, model.breakpoints);
  const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (tr_err > 1e-10) {
    std::ostringstream os;
    os << "direct integration lost trace: |Tr rho - 1| = " << tr_err;
    throw NumericalError(os.str());
  }
  const double lo = min_eigenvalue(rho);
  if (lo < -1e-8) {
    std::ostringstream os;
    os << "direct integration lost positivity: min eigenvalue " << lo;
    throw NumericalError(os.str());
  }
  return OneParticleState::disassemble(hermitian_part(rho));
}

/// Solution of d psi/dt = -A(t) psi.
inline ComplexVector pure_state_evolution(const ComplexVector& psi0, const GKSLModel& model,
                                          double t, const StepPolicy& policy = {},
                                          PropagationMethod method = PropagationMethod::automatic) {
  if (psi0.size() != model.n) throw DimensionError("vector length must equal n");
  return propagate(model, t, policy, method).v * psi0;
}

/// rho00(t) = 1 - exp(-int_0^t gamma) (1 - rho00(0)) for f_l = sqrt(gamma)|l>.
inline double homogeneous_ground_population(const std::function<double(double)>& gamma,
                                            double rho00_0, double t) {
  if (!(rho00_0 >= 0.0 && rho00_0 <= 1.0))
    throw ValidationError("probability_range", "rho00(0) must lie in [0, 1]");
  if (!(t >= 0.0)) throw ValidationError("time", "t must be nonnegative");
  if (t == 0.0) return rho00_0;
  auto checked = [&gamma](double s) {
    const double g = gamma(s);
    if (g < 0.0 || std::isnan(g)) {
      std::ostringstream os;
      os << "decay rate gamma(" << s << ") = " << g << " is negative";
      throw ValidationError("negative_rate", os.str());
    }
    return g;
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(checked, 0.0, t, 20, 1e-12);
  return 1.0 - std::exp(-integral) * (1.0 - rho00_0);
}

}  // namespace opsq
