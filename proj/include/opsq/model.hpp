#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "opsq/linalg.hpp"

namespace opsq {

/// Zero-temperature GKSL generator on C + C^n: Hamiltonian H(t) acting on
/// the excited block and jump operators L_l(t) = |0><f_l(t)|.
///
/// Coefficients are evaluation contracts queried at arbitrary t. They must
/// be continuous between consecutive `breakpoints`; integrators restart at
/// every breakpoint.
struct GKSLModel {
  Eigen::Index n = 0;
  std::function<ComplexMatrix(double)> hamiltonian;
  std::function<std::vector<ComplexVector>(double)> decay_vectors;
  bool time_independent = false;
  std::vector<double> breakpoints;

  static GKSLModel constant(ComplexMatrix h, std::vector<ComplexVector> f) {
    require_square(h, "GKSLModel::constant");
    for (const auto& v : f)
      if (v.size() != h.rows()) throw DimensionError("decay vector length must equal n");
    GKSLModel m;
    m.n = h.rows();
    m.hamiltonian = [h](double) { return h; };
    m.decay_vectors = [f](double) { return f; };
    m.time_independent = true;
    return m;
  }

  /// f_l(t) = sqrt(gamma(t)) |l>, l = 1..n.
  static GKSLModel homogeneous(Eigen::Index n, std::function<double(double)> gamma,
                               ComplexMatrix h = ComplexMatrix()) {
    if (h.size() == 0) h = ComplexMatrix::Zero(n, n);
    require_square(h, "GKSLModel::homogeneous");
    if (h.rows() != n) throw DimensionError("Hamiltonian must be n x n");
    GKSLModel m;
    m.n = n;
    m.hamiltonian = [h](double) { return h; };
    m.decay_vectors = [n, gamma](double t) {
      const double g = gamma(t);
      if (g < 0.0) {
        std::ostringstream os;
        os << "decay rate gamma(" << t << ") = " << g << " is negative";
        throw ValidationError("negative_rate", os.str());
      }
      std::vector<ComplexVector> f;
      for (Eigen::Index l = 0; l < n; ++l) {
        ComplexVector v = ComplexVector::Zero(n);
        v[l] = std::sqrt(g);
        f.push_back(std::move(v));
      }
      return f;
    };
    return m;
  }

  /// H(t), checked for shape and Hermiticity (1e-10).
  ComplexMatrix checked_hamiltonian(double t) const {
    ComplexMatrix h = hamiltonian(t);
    if (h.rows() != n || h.cols() != n) {
      std::ostringstream os;
      os << "H(" << t << ") is " << h.rows() << "x" << h.cols() << ", expected " << n << "x" << n;
      throw DimensionError(os.str());
    }
    if (!h.allFinite()) throw ValidationError("finite", "H(t) has non-finite entries");
    const double defect = hermiticity_defect(h);
    if (defect > 1e-10) {
      std::ostringstream os;
      os << "H(" << t << ") is not Hermitian (max|H - H^dagger| = " << defect << ")";
      throw ValidationError("hermiticity", os.str());
    }
    return h;
  }

  std::vector<ComplexVector> checked_decay_vectors(double t) const {
    std::vector<ComplexVector> f = decay_vectors(t);
    for (const auto& v : f) {
      if (v.size() != n) throw DimensionError("decay vector length must equal n");
      if (!v.allFinite()) throw ValidationError("finite", "decay vector has non-finite entries");
    }
    return f;
  }

  /// Gamma(t) = sum_l |f_l><f_l|
  ComplexMatrix gamma_matrix(double t) const {
    ComplexMatrix g = ComplexMatrix::Zero(n, n);
    for (const auto& v : checked_decay_vectors(t)) g += v * v.adjoint();
    return g;
  }
};

/// A(t) = Gamma(t)/2 + i H(t). Its Hermitian part is spectrally checked.
inline ComplexMatrix accretive_matrix(const GKSLModel& model, double t) {
  const ComplexMatrix h = model.checked_hamiltonian(t);
  const ComplexMatrix a = 0.5 * model.gamma_matrix(t) + kI * h;
  const double lo = min_eigenvalue(a + a.adjoint());
  if (lo < -1e-10) {
    std::ostringstream os;
    os << "A(" << t << ") + A^dagger has eigenvalue " << lo;
    throw ValidationError("accretivity", os.str());
  }
  return a;
}

}  // namespace opsq
