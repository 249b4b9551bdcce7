#pragma once

// Dense complex kernel shared by every other header: Hermitian spectra,
// spectral matrix functions, the matrix exponential and the operator norm.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "opsq/errors.hpp"

namespace opsq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest entry modulus; zero for empty matrices.
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

/// max |M - M^dagger|
inline double hermiticity_defect(const ComplexMatrix& m) {
  require_square(m, "hermiticity_defect");
  return max_abs(m - m.adjoint());
}

inline bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

struct HermitianEigenSystem {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // unitary, columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// (M + M^dagger)/2 before decomposition; inputs further than `tol` from
/// Hermitian are rejected.
inline HermitianEigenSystem hermitian_eigs(const ComplexMatrix& m, double tol = 1e-8) {
  require_square(m, "hermitian_eigs");
  const double defect = hermiticity_defect(m);
  if (defect > tol) {
    std::ostringstream os;
    os << "matrix is not Hermitian (max|M - M^dagger| = " << defect << ")";
    throw ValidationError("hermiticity", os.str());
  }
  if (m.size() == 0) return {RealVector(0), ComplexMatrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "hermitian_eigs: QR iteration did not converge within "
       << Eigen::SelfAdjointEigenSolver<ComplexMatrix>::m_maxIterations * m.rows()
       << " iterations";
    throw NumericalError(os.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& m, double tol = 1e-8) {
  require_square(m, "hermitian_eigenvalues");
  if (m.size() == 0) return RealVector(0);
  const double defect = hermiticity_defect(m);
  if (defect > tol) {
    std::ostringstream os;
    os << "matrix is not Hermitian (max|M - M^dagger| = " << defect << ")";
    throw ValidationError("hermiticity", os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("hermitian_eigenvalues: QR iteration did not converge");
  return solver.eigenvalues();
}

inline double min_eigenvalue(const ComplexMatrix& m, double tol = 1e-8) {
  const RealVector ev = hermitian_eigenvalues(m, tol);
  return ev.size() ? ev.minCoeff() : 0.0;
}

/// A real scalar function together with the closed interval it is defined on.
struct ScalarFunction {
  std::function<double(double)> f;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static ScalarFunction unbounded(std::function<double(double)> fn) {
    return {std::move(fn)};
  }
  static ScalarFunction on_interval(std::function<double(double)> fn, double lo, double hi) {
    return {std::move(fn), lo, hi};
  }

  /// Clips values within `clip_tol` of the domain onto it; throws otherwise.
  double clipped(double x, double clip_tol) const {
    if (x < lo) {
      if (x < lo - clip_tol) {
        std::ostringstream os;
        os << "eigenvalue " << x << " below domain [" << lo << ", " << hi << "]";
        throw DomainError(os.str(), x);
      }
      return lo;
    }
    if (x > hi) {
      if (x > hi + clip_tol) {
        std::ostringstream os;
        os << "eigenvalue " << x << " above domain [" << lo << ", " << hi << "]";
        throw DomainError(os.str(), x);
      }
      return hi;
    }
    return x;
  }
};

/// f(M) = U diag(f(lambda_i)) U^dagger for Hermitian M.
inline ComplexMatrix matrix_function(const ComplexMatrix& m, const ScalarFunction& fn,
                                     double clip_tol = 1e-10) {
  const HermitianEigenSystem es = hermitian_eigs(m);
  RealVector fv(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i)
    fv[i] = fn.f(fn.clipped(es.eigenvalues[i], clip_tol));
  ComplexMatrix out = es.eigenvectors * fv.cast<Complex>().asDiagonal() *
                      es.eigenvectors.adjoint();
  return hermitian_part(out);
}

/// Sum of f over the spectrum, i.e. Tr f(M), without forming f(M).
inline double trace_function(const ComplexMatrix& m, const ScalarFunction& fn,
                             double clip_tol = 1e-10) {
  const RealVector ev = hermitian_eigenvalues(m);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) acc += fn.f(fn.clipped(ev[i], clip_tol));
  return acc;
}

/// exp(M) by Pade scaling and squaring.
inline ComplexMatrix matrix_exponential(const ComplexMatrix& m) {
  require_square(m, "matrix_exponential");
  if (m.size() == 0) return m;
  return m.exp();
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

inline Complex trace(const ComplexMatrix& m) { return m.trace(); }

}  // namespace opsq
