#pragma once

// First and second moments (m, Y, Z) of bosonic or fermionic modes under a
// quadratic zero-temperature GKSL generator:
//
//   m' = -A m,   Y' = -conj(A) Y - Y A^T,   Z' = -A Z - Z A^T.

#include <sstream>
#include <vector>

#include "opsq/dynamics.hpp"

namespace opsq {

enum class Statistics { boson, fermion };

inline const char* to_string(Statistics s) {
  return s == Statistics::boson ? "boson" : "fermion";
}

class MomentState {
 public:
  /// m: means <a_j> (must be exactly zero for fermions); Y_ij = <a_i^dagger a_j>
  /// (centered for bosons); Z_ij = <a_i a_j> (centered for bosons).
  static MomentState make(Statistics stats, ComplexVector m, ComplexMatrix y, ComplexMatrix z,
                          double tol = 1e-10) {
    const auto n = y.rows();
    if (y.cols() != n || z.rows() != n || z.cols() != n || m.size() != n)
      throw DimensionError("moment blocks must be n, n x n, n x n");
    if (!m.allFinite() || !y.allFinite() || !z.allFinite())
      throw ValidationError("finite", "moments contain non-finite entries");
    if (stats == Statistics::fermion && !m.isZero(0.0))
      throw ValidationError("superselection", "fermionic means must vanish");
    const double herm = max_abs(y - y.adjoint());
    if (herm > tol) {
      std::ostringstream os;
      os << "Y is not Hermitian (" << herm << ")";
      throw ValidationError("hermiticity", os.str());
    }
    y = hermitian_part(y);
    const double sign = stats == Statistics::boson ? 1.0 : -1.0;
    const double sym = max_abs(z - sign * z.transpose());
    if (sym > tol) {
      std::ostringstream os;
      os << "Z is not " << (stats == Statistics::boson ? "symmetric" : "antisymmetric") << " ("
         << sym << ")";
      throw ValidationError("z_symmetry", os.str());
    }
    z = 0.5 * (z + sign * z.transpose());
    if (n > 0) {
      const RealVector ev = hermitian_eigenvalues(y);
      if (ev.minCoeff() < -tol) {
        std::ostringstream os;
        os << "Y has eigenvalue " << ev.minCoeff();
        throw ValidationError("positivity", os.str());
      }
      if (stats == Statistics::fermion && ev.maxCoeff() > 1.0 + tol) {
        std::ostringstream os;
        os << "fermionic Y has eigenvalue " << ev.maxCoeff() << " > 1";
        throw ValidationError("pauli_bound", os.str());
      }
    }
    return MomentState(stats, std::move(m), std::move(y), std::move(z));
  }

  static MomentState vacuum(Statistics stats, Eigen::Index n) {
    return make(stats, ComplexVector::Zero(n), ComplexMatrix::Zero(n, n),
                ComplexMatrix::Zero(n, n));
  }

  Statistics statistics() const { return stats_; }
  Eigen::Index n() const { return y_.rows(); }
  const ComplexVector& m() const { return m_; }
  const ComplexMatrix& y() const { return y_; }
  const ComplexMatrix& z() const { return z_; }

 private:
  MomentState(Statistics s, ComplexVector m, ComplexMatrix y, ComplexMatrix z)
      : stats_(s), m_(std::move(m)), y_(std::move(y)), z_(std::move(z)) {}

  Statistics stats_;
  ComplexVector m_;
  ComplexMatrix y_;
  ComplexMatrix z_;
};

enum class MomentMethod { ode, propagator };

/// m -> V m, Y -> conj(V) Y V^T, Z -> V Z V^T.
inline MomentState propagator_closed_form(const MomentState& ms0, const Propagator& p) {
  if (p.v.rows() != ms0.n() || p.v.cols() != ms0.n())
    throw DimensionError("propagator shape does not match the moments");
  const ComplexMatrix& v = p.v;
  ComplexVector m = ms0.statistics() == Statistics::fermion ? ComplexVector::Zero(ms0.n())
                                                            : ComplexVector(v * ms0.m());
  ComplexMatrix y = v.conjugate() * ms0.y() * v.transpose();
  ComplexMatrix z = v * ms0.z() * v.transpose();
  return MomentState::make(ms0.statistics(), std::move(m), std::move(y), std::move(z));
}

namespace detail {

inline MomentState integrate_moments(const MomentState& ms0, const GKSLModel& model, double t0,
                                     double t1, const StepPolicy& policy) {
  const auto n = ms0.n();
  // Columns: [ m | Y | Z ].
  ComplexMatrix x(n, 2 * n + 1);
  x.col(0) = ms0.m();
  x.middleCols(1, n) = ms0.y();
  x.middleCols(n + 1, n) = ms0.z();
  auto rhs = [&model, n](double tt, const ComplexMatrix& s) -> ComplexMatrix {
    const ComplexMatrix a = accretive_matrix(model, tt);
    ComplexMatrix d(n, 2 * n + 1);
    d.col(0) = -a * s.col(0);
    d.middleCols(1, n) = -a.conjugate() * s.middleCols(1, n) - s.middleCols(1, n) * a.transpose();
    d.middleCols(n + 1, n) = -a * s.middleCols(n + 1, n) - s.middleCols(n + 1, n) * a.transpose();
    return d;
  };
  const ComplexMatrix xt = integrate_rk4(rhs, x, t0, t1, policy, model.breakpoints);
  return MomentState::make(ms0.statistics(), xt.col(0), xt.middleCols(1, n),
                           xt.middleCols(n + 1, n));
}

}  // namespace detail

/// Moments at time t, either by integrating the three moment equations or
/// through the one-particle propagator.
inline MomentState evolve_moments(const MomentState& ms0, const GKSLModel& model, double t,
                                  MomentMethod method, const StepPolicy& policy = {}) {
  if (ms0.n() != model.n) throw DimensionError("moment and model mode counts differ");
  if (method == MomentMethod::propagator)
    return propagator_closed_form(ms0, propagate(model, t, policy));
  if (!(t >= 0.0)) throw ValidationError("time", "t must be nonnegative");
  return detail::integrate_moments(ms0, model, 0.0, t, policy);
}

/// Moments on an increasing time grid, integrated incrementally.
inline std::vector<MomentState> evolve_moments_grid(const MomentState& ms0, const GKSLModel& model,
                                                    const std::vector<double>& times,
                                                    MomentMethod method,
                                                    const StepPolicy& policy = {}) {
  if (ms0.n() != model.n) throw DimensionError("moment and model mode counts differ");
  std::vector<MomentState> out;
  if (method == MomentMethod::propagator) {
    for (const auto& p : propagate_grid(model, times, policy)) out.push_back(propagator_closed_form(ms0, p));
    return out;
  }
  MomentState cur = ms0;
  double t = 0.0;
  for (double tk : times) {
    if (!(tk >= t)) throw ValidationError("time_order", "time grid must be increasing from 0");
    cur = detail::integrate_moments(cur, model, t, tk, policy);
    t = tk;
    out.push_back(cur);
  }
  return out;
}

}  // namespace opsq
