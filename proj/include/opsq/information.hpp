#pragma once

// Entropies (nats) and the mutual-information decomposition for one-particle
// states with vanishing coherence block.

#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "opsq/reduction.hpp"

namespace opsq {

/// f(x) = -x ln x on [0, 1], f(0) = 0. Values within 1e-12 of the interval
/// are clipped onto it.
inline double entropy_scalar(double x) {
  if (x < -1e-12 || x > 1.0 + 1e-12 || std::isnan(x)) {
    std::ostringstream os;
    os << "entropy argument " << x << " outside [0, 1]";
    throw DomainError(os.str(), x);
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 0.0;
  return -x * std::log(x);
}

inline ScalarFunction entropy_function() {
  return ScalarFunction::on_interval(
      [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }, 0.0, 1.0);
}

/// Tr f(M) for a Hermitian matrix with spectrum in [0, 1] (trace need not be 1).
inline double von_neumann_entropy(const ComplexMatrix& m) {
  return trace_function(m, entropy_function());
}

class ClassicalDistribution {
 public:
  static ClassicalDistribution make(std::vector<double> p) {
    double sum = 0.0;
    for (double& x : p) {
      if (x < -1e-12 || x > 1.0 + 1e-12 || std::isnan(x)) {
        std::ostringstream os;
        os << "probability " << x << " outside [0, 1]";
        throw ValidationError("probability_range", os.str());
      }
      x = std::clamp(x, 0.0, 1.0);
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "probabilities sum to " << sum;
      throw ValidationError("normalization", os.str());
    }
    ClassicalDistribution d;
    d.p_ = std::move(p);
    return d;
  }
  const std::vector<double>& probabilities() const { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }

 private:
  std::vector<double> p_;
};

inline double shannon_entropy(const ClassicalDistribution& pi) {
  double s = 0.0;
  for (double p : pi.probabilities()) s += entropy_scalar(p);
  return s;
}

struct MutualInfoReport {
  double total = 0.0;           // nats
  double quantum_term = 0.0;    // S(Phi(R)) - S(R)
  double classical_term = 0.0;  // S(pi1) + S(pi2) - S(pi)
  ClassicalDistribution pi;     // (p0, p1, p2)
};

namespace detail {

inline void require_no_coherence(const OneParticleState& s) {
  const double c = s.psi().norm();
  if (c > 1e-12) {
    std::ostringstream os;
    os << "mutual information needs psi = 0, got |psi| = " << c;
    throw ValidationError("zero_coherence", os.str());
  }
}

inline double classical_mutual_information(const ClassicalDistribution& pi) {
  const double p0 = pi[0], p1 = pi[1], p2 = pi[2];
  const auto pi1 = ClassicalDistribution::make({p0 + p2, p1});
  const auto pi2 = ClassicalDistribution::make({p0 + p1, p2});
  return shannon_entropy(pi1) + shannon_entropy(pi2) - shannon_entropy(pi);
}

}  // namespace detail

/// Mutual information between the mode groups I1 and I2 (a partition of
/// 1..n) of the embedded state, computed from the projected blocks of R and
/// three scalar terms, together with its decoherence/classical split.
inline MutualInfoReport mutual_information(const OneParticleState& s, const IndexSet& i1,
                                           const IndexSet& i2) {
  i1.check_within(s.n());
  i2.check_within(s.n());
  if (i1.size() + i2.size() != static_cast<std::size_t>(s.n()))
    throw ValidationError("partition", "I1 and I2 must partition 1..n");
  for (int l : i1.members())
    if (i2.contains(l)) throw ValidationError("partition", "I1 and I2 overlap");
  detail::require_no_coherence(s);

  const ComplexMatrix b1 = block(s.r(), i1, i1);
  const ComplexMatrix b2 = block(s.r(), i2, i2);
  const double rho00 = s.rho00();
  const double t1 = b1.trace().real();
  const double t2 = b2.trace().real();
  const double s_b1 = von_neumann_entropy(b1);
  const double s_b2 = von_neumann_entropy(b2);
  const double s_r = von_neumann_entropy(s.r());

  MutualInfoReport rep;
  rep.total = s_b1 + s_b2 - s_r + entropy_scalar(rho00 + t1) + entropy_scalar(rho00 + t2) -
              entropy_scalar(rho00);
  rep.quantum_term = s_b1 + s_b2 - s_r;
  rep.pi = ClassicalDistribution::make({rho00, t1, t2});
  rep.classical_term = detail::classical_mutual_information(rep.pi);
  return rep;
}

/// Mutual information generalized to a binary instrument {Phi1, Phi2}. The
/// post-measurement block is Phi1(R) (+) Phi2(R), so its entropy is the sum
/// of the two block entropies.
inline MutualInfoReport mutual_information_instrument(const OneParticleState& s,
                                                      const QuantumOperation& phi1,
                                                      const QuantumOperation& phi2) {
  detail::require_no_coherence(s);
  if (phi1.input_dim() != s.n() || phi2.input_dim() != s.n())
    throw DimensionError("instrument input dimension must equal n");
  const ComplexMatrix e = phi1.effect() + phi2.effect();
  const double defect = max_abs(e - ComplexMatrix::Identity(s.n(), s.n()));
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "Phi1 + Phi2 is not trace preserving (max|sum K^dagger K - I| = " << defect << ")";
    throw ValidationError("trace_preserving", os.str());
  }
  const ComplexMatrix o1 = phi1.apply(s.r());
  const ComplexMatrix o2 = phi2.apply(s.r());
  MutualInfoReport rep;
  rep.quantum_term = von_neumann_entropy(o1) + von_neumann_entropy(o2) - von_neumann_entropy(s.r());
  rep.pi = ClassicalDistribution::make({s.rho00(), o1.trace().real(), o2.trace().real()});
  rep.classical_term = detail::classical_mutual_information(rep.pi);
  rep.total = rep.quantum_term + rep.classical_term;
  return rep;
}

/// I(t) = f(e^{-gamma t}) + f(1 - e^{-gamma t}) for a particle decaying from
/// one subsystem into the other.
inline std::vector<std::pair<double, double>> markov_decay_curve(double gamma,
                                                                 const std::vector<double>& times) {
  if (!(gamma > 0.0)) {
    std::ostringstream os;
    os << "decay rate must be positive, got " << gamma;
    throw ValidationError("decay_rate", os.str());
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0)) throw ValidationError("time", "times must be nonnegative");
    const double p1 = std::exp(-gamma * t);
    const double p2 = -std::expm1(-gamma * t);
    out.emplace_back(t, entropy_scalar(p1) + entropy_scalar(p2));
  }
  return out;
}

}  // namespace opsq
