#pragma once

// Traces over mode-index sets, generalized reductions through quantum
// operations, and bipartite entanglement predicates for one-particle states.

#include <algorithm>
#include <initializer_list>
#include <sstream>
#include <vector>

#include "opsq/one_particle.hpp"

namespace opsq {

/// Sorted set of excited-mode labels (1-based).
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<int> members) : IndexSet(make(std::vector<int>(members))) {}

  static IndexSet make(std::vector<int> members) {
    std::sort(members.begin(), members.end());
    if (std::adjacent_find(members.begin(), members.end()) != members.end())
      throw ValidationError("index_set", "duplicate mode index");
    if (!members.empty() && members.front() < 1) {
      std::ostringstream os;
      os << "mode index " << members.front() << " is not in 1..n";
      throw IndexError(os.str());
    }
    IndexSet s;
    s.members_ = std::move(members);
    return s;
  }

  /// {1..n}
  static IndexSet all(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i + 1;
    return make(std::move(v));
  }

  const std::vector<int>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(int l) const { return std::binary_search(members_.begin(), members_.end(), l); }

  void check_within(Eigen::Index n) const {
    if (!members_.empty() && members_.back() > n) {
      std::ostringstream os;
      os << "mode index " << members_.back() << " exceeds n = " << n;
      throw IndexError(os.str());
    }
  }

  /// {1..n} minus this set.
  IndexSet complement(Eigen::Index n) const {
    check_within(n);
    std::vector<int> out;
    for (int l = 1; l <= n; ++l)
      if (!contains(l)) out.push_back(l);
    IndexSet s;
    s.members_ = std::move(out);
    return s;
  }

  /// Zero-based positions into an n-vector of excited amplitudes.
  std::vector<Eigen::Index> positions() const {
    std::vector<Eigen::Index> p;
    p.reserve(members_.size());
    for (int l : members_) p.push_back(l - 1);
    return p;
  }

  bool operator==(const IndexSet&) const = default;

 private:
  std::vector<int> members_;
};

/// P_I R P_J as a |I| x |J| block.
inline ComplexMatrix block(const ComplexMatrix& r, const IndexSet& rows, const IndexSet& cols) {
  return r(rows.positions(), cols.positions());
}

inline ComplexVector project(const ComplexVector& v, const IndexSet& idx) {
  return v(idx.positions());
}

/// Completely positive trace non-increasing map given by Kraus operators.
class QuantumOperation {
 public:
  static QuantumOperation make(std::vector<ComplexMatrix> kraus) {
    if (kraus.empty()) throw ValidationError("kraus", "quantum operation needs a Kraus operator");
    const auto d_out = kraus.front().rows();
    const auto d_in = kraus.front().cols();
    for (const auto& k : kraus)
      if (k.rows() != d_out || k.cols() != d_in)
        throw DimensionError("Kraus operators of one operation must share their shape");
    QuantumOperation op(std::move(kraus));
    const double top = hermitian_eigenvalues(op.effect()).maxCoeff();
    if (top > 1.0 + 1e-10) {
      std::ostringstream os;
      os << "sum K^dagger K has eigenvalue " << top << " > 1";
      throw ValidationError("trace_non_increasing", os.str());
    }
    return op;
  }

  /// Compression onto the modes in `idx` of C^n.
  static QuantumOperation projection(const IndexSet& idx, Eigen::Index n) {
    idx.check_within(n);
    ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(idx.size()), n);
    const auto pos = idx.positions();
    for (std::size_t i = 0; i < pos.size(); ++i) p(static_cast<Eigen::Index>(i), pos[i]) = 1.0;
    return make({p});
  }

  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  Eigen::Index input_dim() const { return kraus_.front().cols(); }
  Eigen::Index output_dim() const { return kraus_.front().rows(); }

  /// sum_k K^dagger K
  ComplexMatrix effect() const {
    ComplexMatrix e = ComplexMatrix::Zero(input_dim(), input_dim());
    for (const auto& k : kraus_) e += k.adjoint() * k;
    return e;
  }

  ComplexMatrix apply(const ComplexMatrix& x) const {
    if (x.rows() != input_dim() || x.cols() != input_dim()) {
      std::ostringstream os;
      os << "operation acts on " << input_dim() << "x" << input_dim() << " matrices, got "
         << x.rows() << "x" << x.cols();
      throw DimensionError(os.str());
    }
    ComplexMatrix out = ComplexMatrix::Zero(output_dim(), output_dim());
    for (const auto& k : kraus_) out += k * x * k.adjoint();
    return out;
  }

 private:
  explicit QuantumOperation(std::vector<ComplexMatrix> kraus) : kraus_(std::move(kraus)) {}
  std::vector<ComplexMatrix> kraus_;
};

/// A state on the retained modes together with their original labels.
struct ReducedState {
  OneParticleState state;
  IndexSet retained;

  /// Re-expands to (n+1)x(n+1) in original labels; traced rows/cols are zero.
  ComplexMatrix expanded(Eigen::Index n) const {
    ComplexMatrix out = ComplexMatrix::Zero(n + 1, n + 1);
    const ComplexMatrix rho = state.assemble();
    std::vector<Eigen::Index> idx{0};
    for (int l : retained.members()) idx.push_back(l);
    out(idx, idx) = rho;
    return out;
  }
};

/// Tr_I: drops the modes in I and moves their population onto |0>.
inline ReducedState trace_out(const OneParticleState& s, const IndexSet& traced) {
  traced.check_within(s.n());
  IndexSet kept = traced.complement(s.n());
  ComplexMatrix r = block(s.r(), kept, kept);
  ComplexVector psi = project(s.psi(), kept);
  const double rho00 = 1.0 - r.trace().real();
  return {make_state(rho00, std::move(psi), std::move(r)), std::move(kept)};
}

/// Tr_I on an already reduced state; I is given in original labels.
inline ReducedState trace_out(const ReducedState& s, const IndexSet& traced) {
  std::vector<int> local;
  for (int l : traced.members()) {
    const auto& m = s.retained.members();
    auto it = std::lower_bound(m.begin(), m.end(), l);
    if (it == m.end() || *it != l) {
      std::ostringstream os;
      os << "mode " << l << " is not among the retained modes";
      throw IndexError(os.str());
    }
    local.push_back(static_cast<int>(it - m.begin()) + 1);
  }
  ReducedState inner = trace_out(s.state, IndexSet::make(local));
  std::vector<int> labels;
  for (int p : inner.retained.members()) labels.push_back(s.retained.members()[p - 1]);
  return {std::move(inner.state), IndexSet::make(labels)};
}

/// (1 - Tr Phi(R)) + Phi(R) for a strictly one-particle 0 + R.
inline OneParticleState generalized_reduce(const ComplexMatrix& r, const QuantumOperation& phi) {
  require_square(r, "generalized_reduce");
  if (r.rows() != phi.input_dim()) {
    std::ostringstream os;
    os << "Kraus input dimension " << phi.input_dim() << " does not match R (" << r.rows() << ")";
    throw DimensionError(os.str());
  }
  const double tr = r.trace().real();
  if (std::abs(1.0 - tr) > kInputTol) {
    std::ostringstream os;
    os << "0 + R is not a state: Tr R = " << tr;
    throw ValidationError("strictly_one_particle", os.str());
  }
  (void)OneParticleState::strict(r);
  ComplexMatrix out = phi.apply(hermitian_part(r));
  const double rho00 = 1.0 - out.trace().real();
  const Eigen::Index m = out.rows();
  return make_state(rho00, ComplexVector::Zero(m), std::move(out));
}

/// Schmidt coefficients of the embedded pure state across I | complement,
/// descending. At most two coefficients exist: the reduced state lives on
/// span{|0>, P_J varphi} with determinant |P_I varphi|^2 |P_J varphi|^2.
inline std::vector<double> schmidt_coefficients(const OneParticlePureState& phi,
                                                const IndexSet& part) {
  part.check_within(phi.n());
  const double u2 = project(phi.varphi(), part).squaredNorm();
  const double w2 = project(phi.varphi(), part.complement(phi.n())).squaredNorm();
  if (u2 == 0.0 || w2 == 0.0) return {1.0};
  const double p0 = std::norm(phi.phi0());
  const double s = p0 + u2 + w2;
  const double det = u2 * w2;
  // s^2 - 4 det written without cancellation
  const double disc = std::sqrt((u2 - w2) * (u2 - w2) + p0 * (2.0 * (u2 + w2) + p0));
  const double small = 2.0 * det / (s + disc) / s;
  return {std::sqrt(1.0 - small), std::sqrt(small)};
}

/// Entangled iff the excited amplitudes have support on both sides.
inline bool pure_state_entangled(const OneParticlePureState& phi, const IndexSet& part) {
  part.check_within(phi.n());
  return project(phi.varphi(), part).norm() > 1e-12 &&
         project(phi.varphi(), part.complement(phi.n())).norm() > 1e-12;
}

enum class SeparabilityVerdict { violates_necessary, separable_strict, inconclusive };

inline const char* to_string(SeparabilityVerdict v) {
  switch (v) {
    case SeparabilityVerdict::violates_necessary: return "violates_necessary";
    case SeparabilityVerdict::separable_strict: return "separable_strict";
    case SeparabilityVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// max |P_I R P_J|, J the complement of I.
inline double off_diagonal_block(const OneParticleState& s, const IndexSet& part) {
  return max_abs(block(s.r(), part, part.complement(s.n())));
}

inline SeparabilityVerdict separability_check(const OneParticleState& s, const IndexSet& part) {
  part.check_within(s.n());
  if (off_diagonal_block(s, part) > kZeroBlockTol) return SeparabilityVerdict::violates_necessary;
  if (s.is_strictly_one_particle()) return SeparabilityVerdict::separable_strict;
  return SeparabilityVerdict::inconclusive;
}

/// R = p1 R1 (+) p2 R2 with R1, R2 density matrices on the two blocks.
struct SeparableDecomposition {
  double p1 = 0.0;
  ComplexMatrix r1;
  double p2 = 0.0;
  ComplexMatrix r2;
  /// One weight vanished: the embedded state is a product state and only
  /// the surviving factor is meaningful (the other block is zero).
  bool product_state = false;
};

inline SeparableDecomposition separable_decomposition(const OneParticleState& s,
                                                      const IndexSet& part) {
  part.check_within(s.n());
  if (!s.is_strictly_one_particle())
    throw ValidationError("strictly_one_particle",
                          "separable decomposition needs rho00 = 0 and psi = 0");
  const double off = off_diagonal_block(s, part);
  if (off > kZeroBlockTol) {
    std::ostringstream os;
    os << "off-diagonal block P_I R P_J has max entry " << off;
    throw ValidationError("separability", os.str());
  }
  const IndexSet rest = part.complement(s.n());
  const ComplexMatrix b1 = block(s.r(), part, part);
  const ComplexMatrix b2 = block(s.r(), rest, rest);
  SeparableDecomposition d;
  d.p1 = b1.trace().real();
  d.p2 = b2.trace().real();
  d.product_state = d.p1 <= kZeroBlockTol || d.p2 <= kZeroBlockTol;
  d.r1 = d.p1 > kZeroBlockTol ? ComplexMatrix(b1 / d.p1) : ComplexMatrix::Zero(b1.rows(), b1.cols());
  d.r2 = d.p2 > kZeroBlockTol ? ComplexMatrix(b2 / d.p2) : ComplexMatrix::Zero(b2.rows(), b2.cols());
  return d;
}

}  // namespace opsq
