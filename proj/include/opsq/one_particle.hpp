#pragma once

// Density matrices on C + C^n written in block form
//
//     rho = [ rho00   <psi| ]
//           [ |psi>     R   ]
//
// Index 0 is the distinguished vacuum direction; excited modes are 1..n.

#include <cmath>
#include <sstream>

#include "opsq/linalg.hpp"

namespace opsq {

/// Tolerances applied to user-supplied blocks.
inline constexpr double kInputTol = 1e-8;
/// Threshold used by every strictness/zero-block predicate.
inline constexpr double kZeroBlockTol = 1e-10;

class OneParticleState {
 public:
  /// Validates and builds a state. R is symmetrized and rho00 is stored as
  /// 1 - Tr R once the supplied value has been checked against it.
  static OneParticleState make(double rho00, ComplexVector psi, ComplexMatrix r) {
    const auto n = r.rows();
    if (r.cols() != n) throw DimensionError("make_state: R must be square");
    if (psi.size() != n) {
      std::ostringstream os;
      os << "make_state: psi has " << psi.size() << " entries, R is " << n << "x" << n;
      throw DimensionError(os.str());
    }
    if (!std::isfinite(rho00) || !psi.allFinite() || !r.allFinite())
      throw ValidationError("finite", "state blocks contain non-finite entries");
    const double herm = max_abs(r - r.adjoint());
    if (herm > kInputTol) {
      std::ostringstream os;
      os << "R is not Hermitian (max|R - R^dagger| = " << herm << ")";
      throw ValidationError("hermiticity", os.str());
    }
    r = hermitian_part(r);
    const double tr = r.trace().real();
    if (std::abs(rho00 - (1.0 - tr)) > kInputTol) {
      std::ostringstream os;
      os << "rho00 = " << rho00 << " but 1 - Tr R = " << 1.0 - tr;
      throw ValidationError("unit_trace", os.str());
    }
    OneParticleState s(1.0 - tr, std::move(psi), std::move(r));
    const double lo = min_eigenvalue(s.assemble());
    if (lo < -kInputTol) {
      std::ostringstream os;
      os << "assembled matrix has eigenvalue " << lo;
      throw ValidationError("positivity", os.str());
    }
    return s;
  }

  /// |0><0|
  static OneParticleState vacuum(Eigen::Index n) {
    return make(1.0, ComplexVector::Zero(n), ComplexMatrix::Zero(n, n));
  }

  /// 0 + R for a density matrix R on C^n.
  static OneParticleState strict(ComplexMatrix r) {
    const auto n = r.rows();
    const double tr = r.trace().real();
    return make(1.0 - tr, ComplexVector::Zero(n), std::move(r));
  }

  /// Inverse of assemble(); the matrix must be (n+1)x(n+1).
  static OneParticleState disassemble(const ComplexMatrix& rho) {
    require_square(rho, "disassemble");
    if (rho.rows() < 1) throw DimensionError("disassemble: empty matrix");
    const auto n = rho.rows() - 1;
    return make(rho(0, 0).real(), rho.col(0).tail(n), rho.bottomRightCorner(n, n));
  }

  Eigen::Index n() const { return r_.rows(); }
  double rho00() const { return rho00_; }
  const ComplexVector& psi() const { return psi_; }
  const ComplexMatrix& r() const { return r_; }

  ComplexMatrix assemble() const {
    const auto n = this->n();
    ComplexMatrix rho(n + 1, n + 1);
    rho(0, 0) = Complex(rho00_, 0.0);
    rho.col(0).tail(n) = psi_;
    rho.row(0).tail(n) = psi_.adjoint();
    rho.bottomRightCorner(n, n) = r_;
    return rho;
  }

  /// rho00 == 0 and psi == 0 up to 1e-12.
  bool is_strictly_one_particle() const {
    return psi_.norm() <= 1e-12 && rho00_ <= 1e-12;
  }

 private:
  OneParticleState(double rho00, ComplexVector psi, ComplexMatrix r)
      : rho00_(rho00), psi_(std::move(psi)), r_(std::move(r)) {}

  double rho00_;
  ComplexVector psi_;
  ComplexMatrix r_;
};

inline OneParticleState make_state(double rho00, ComplexVector psi, ComplexMatrix r) {
  return OneParticleState::make(rho00, std::move(psi), std::move(r));
}
inline ComplexMatrix assemble(const OneParticleState& s) { return s.assemble(); }
inline bool is_strictly_one_particle(const OneParticleState& s) {
  return s.is_strictly_one_particle();
}

/// Pure state phi0 |0> + |varphi> with |phi0|^2 + |varphi|^2 = 1.
class OneParticlePureState {
 public:
  static OneParticlePureState make(Complex phi0, ComplexVector varphi) {
    const double norm2 = std::norm(phi0) + varphi.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "pure state has squared norm " << norm2;
      throw ValidationError("normalization", os.str());
    }
    return OneParticlePureState(phi0, std::move(varphi));
  }

  /// Normalizes an arbitrary nonzero amplitude vector over 0..n.
  static OneParticlePureState from_amplitudes(const ComplexVector& amplitudes) {
    if (amplitudes.size() < 1) throw DimensionError("pure state needs at least |0>");
    const double nrm = amplitudes.norm();
    if (nrm == 0.0) throw ValidationError("normalization", "zero amplitude vector");
    const ComplexVector u = amplitudes / nrm;
    return OneParticlePureState(u[0], u.tail(u.size() - 1));
  }

  Eigen::Index n() const { return varphi_.size(); }
  Complex phi0() const { return phi0_; }
  const ComplexVector& varphi() const { return varphi_; }

  ComplexVector amplitudes() const {
    ComplexVector v(n() + 1);
    v[0] = phi0_;
    v.tail(n()) = varphi_;
    return v;
  }

  OneParticleState density() const {
    const ComplexVector v = amplitudes();
    return OneParticleState::disassemble(v * v.adjoint());
  }

 private:
  OneParticlePureState(Complex phi0, ComplexVector varphi)
      : phi0_(phi0), varphi_(std::move(varphi)) {}

  Complex phi0_;
  ComplexVector varphi_;
};

}  // namespace opsq
