#pragma once

// Seeded generators for random states, operations and models. All draws go
// through std::mt19937_64 so runs are reproducible for a given seed.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "opsq/model.hpp"
#include "opsq/reduction.hpp"

namespace opsq::rnd {

using Engine = std::mt19937_64;

/// Engine seeded from a base seed and a list of stream labels.
inline Engine engine(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32)};
  for (auto s : stream) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

inline double uniform(Engine& g, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline int uniform_int(Engine& g, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(g);
}

inline Complex complex_gaussian(Engine& g) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const double re = nd(g);
  const double im = nd(g);
  return {re, im};
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
inline ComplexMatrix ginibre(Engine& g, Eigen::Index rows, Eigen::Index cols) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_gaussian(g);
  return m;
}

inline ComplexVector gaussian_vector(Engine& g, Eigen::Index n) { return ginibre(g, n, 1).col(0); }

/// (G + G^dagger)/2 scaled by `scale`.
inline ComplexMatrix hermitian(Engine& g, Eigen::Index n, double scale = 1.0) {
  const ComplexMatrix gm = ginibre(g, n, n);
  return scale * hermitian_part(gm);
}

/// G G^dagger / Tr with G of shape d x rank.
inline ComplexMatrix density(Engine& g, Eigen::Index d, Eigen::Index rank = -1) {
  if (rank < 0) rank = d;
  const ComplexMatrix gm = ginibre(g, d, rank);
  ComplexMatrix rho = gm * gm.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

/// Unit vector on C^n.
inline ComplexVector unit_vector(Engine& g, Eigen::Index n) {
  const ComplexVector v = gaussian_vector(g, n);
  return v / v.norm();
}

/// Generic one-particle state (random density matrix on C + C^n).
inline OneParticleState state(Engine& g, Eigen::Index n) {
  return OneParticleState::disassemble(density(g, n + 1));
}

/// One-particle state with psi = 0; rho00 is zero with probability 1/4.
inline OneParticleState zero_coherence_state(Engine& g, Eigen::Index n) {
  const double rho00 = uniform(g) < 0.25 ? 0.0 : uniform(g, 0.0, 0.9);
  const ComplexMatrix r = (1.0 - rho00) * density(g, n, uniform_int(g, 1, static_cast<int>(n)));
  return make_state(rho00, ComplexVector::Zero(n), r);
}

/// Pure state whose amplitudes vanish on a random subset of 0..n
/// (each index kept with probability `keep`, at least one kept).
inline OneParticlePureState pure_state(Engine& g, Eigen::Index n, double keep = 0.7) {
  ComplexVector amp = gaussian_vector(g, n + 1);
  bool any = false;
  for (Eigen::Index i = 0; i <= n; ++i) {
    if (uniform(g) > keep) amp[i] = 0.0;
    any = any || amp[i] != Complex(0.0);
  }
  if (!any) amp[uniform_int(g, 0, static_cast<int>(n))] = 1.0;
  return OneParticlePureState::from_amplitudes(amp);
}

/// Uniformly random subset of 1..n (possibly empty or full).
inline IndexSet index_set(Engine& g, Eigen::Index n) {
  std::vector<int> v;
  for (int l = 1; l <= n; ++l)
    if (uniform(g) < 0.5) v.push_back(l);
  return IndexSet::make(std::move(v));
}

/// Decay vectors with norms in [0.2, 1] * max_norm.
inline std::vector<ComplexVector> decay_vectors(Engine& g, Eigen::Index n, int count,
                                                double max_norm = 1.0) {
  std::vector<ComplexVector> f;
  for (int l = 0; l < count; ++l) f.push_back(unit_vector(g, n) * (max_norm * uniform(g, 0.2, 1.0)));
  return f;
}

struct ModelOptions {
  int decay_count = 3;
  double h_scale = 1.0;
  double decay_norm = 1.0;
  bool time_dependent = false;
};

/// Random GKSL model. Time-dependent models use
/// H(t) = H0 + sin(w t) H1 and f_l(t) = f_l + cos(w t) g_l.
inline GKSLModel model(Engine& g, Eigen::Index n, const ModelOptions& opt = {}) {
  const ComplexMatrix h0 = hermitian(g, n, opt.h_scale);
  const auto f0 = decay_vectors(g, n, opt.decay_count, opt.decay_norm);
  if (!opt.time_dependent) return GKSLModel::constant(h0, f0);
  const ComplexMatrix h1 = hermitian(g, n, 0.5 * opt.h_scale);
  const auto f1 = decay_vectors(g, n, opt.decay_count, 0.5 * opt.decay_norm);
  const double w = uniform(g, 0.5, 2.0);
  GKSLModel m;
  m.n = n;
  m.hamiltonian = [h0, h1, w](double t) -> ComplexMatrix { return h0 + std::sin(w * t) * h1; };
  m.decay_vectors = [f0, f1, w](double t) {
    std::vector<ComplexVector> out;
    for (std::size_t l = 0; l < f0.size(); ++l) out.push_back(f0[l] + std::cos(w * t) * f1[l]);
    return out;
  };
  return m;
}

}  // namespace opsq::rnd
