#pragma once

// Brute-force ground truth in the full tensor-product space.
//
// Tensor layout: modes 1..n from left to right, the digit of mode 1 is the
// most significant one (row-major over the mode tuple). Fermion operators
// carry Jordan-Wigner sign strings over modes of lower index.

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "opsq/integrator.hpp"
#include "opsq/model.hpp"
#include "opsq/moments.hpp"
#include "opsq/reduction.hpp"

namespace opsq::oracle {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Full-space dimensions above this are refused.
inline constexpr std::int64_t kMaxFullDim = std::int64_t{1} << 14;
inline constexpr int kDefaultBosonCutoff = 6;
inline constexpr double kLeakageWarn = 1e-8;
inline constexpr double kLeakageError = 1e-4;

enum class ModeKind { qubit, boson, fermion };

inline const char* to_string(ModeKind k) {
  switch (k) {
    case ModeKind::qubit: return "qubit";
    case ModeKind::boson: return "boson";
    case ModeKind::fermion: return "fermion";
  }
  return "?";
}

/// Product of the mode dimensions; throws GuardError above kMaxFullDim.
inline std::int64_t full_dimension(const std::vector<int>& dims) {
  std::int64_t d = 1;
  for (int x : dims) {
    if (x < 2) throw ValidationError("mode_dimension", "every mode needs dimension >= 2");
    d *= x;
    if (d > kMaxFullDim) {
      std::ostringstream os;
      os << "full space dimension exceeds guard " << kMaxFullDim << " (" << dims.size()
         << " modes of dimension " << x << ")";
      throw GuardError(os.str());
    }
  }
  return d;
}

inline std::vector<int> qubit_dims(Eigen::Index n) { return std::vector<int>(n, 2); }

/// Stride of mode position p (0-based) in the flattened basis index.
inline std::int64_t stride(const std::vector<int>& dims, std::size_t p) {
  std::int64_t s = 1;
  for (std::size_t q = p + 1; q < dims.size(); ++q) s *= dims[q];
  return s;
}

inline std::vector<int> digits(std::int64_t index, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (std::size_t p = dims.size(); p-- > 0;) {
    d[p] = static_cast<int>(index % dims[p]);
    index /= dims[p];
  }
  return d;
}

struct FullState {
  std::vector<int> mode_dims;
  ComplexMatrix rho_hat;

  Eigen::Index dim() const { return rho_hat.rows(); }
};

/// Basis index of |l^> (l = 0 is the vacuum).
inline std::int64_t embedded_index(const std::vector<int>& dims, int l) {
  return l == 0 ? 0 : stride(dims, static_cast<std::size_t>(l - 1));
}

/// |phi^> = sum_l <l|phi> |l^>
inline ComplexVector embed_pure(const OneParticlePureState& phi,
                                const std::vector<int>& dims = {}) {
  const std::vector<int> d = dims.empty() ? qubit_dims(phi.n()) : dims;
  if (static_cast<Eigen::Index>(d.size()) != phi.n())
    throw DimensionError("embed_pure: one mode dimension per excited index required");
  ComplexVector out = ComplexVector::Zero(full_dimension(d));
  const ComplexVector amp = phi.amplitudes();
  for (int l = 0; l <= phi.n(); ++l) out[embedded_index(d, l)] = amp[l];
  return out;
}

/// rho^ = sum_{l,k} <l|rho|k> |l^><k^|
inline FullState embed_density(const OneParticleState& s, const std::vector<int>& dims = {}) {
  const std::vector<int> d = dims.empty() ? qubit_dims(s.n()) : dims;
  if (static_cast<Eigen::Index>(d.size()) != s.n())
    throw DimensionError("embed_density: one mode dimension per excited index required");
  const auto big = full_dimension(d);
  const ComplexMatrix rho = s.assemble();
  FullState out{d, ComplexMatrix::Zero(big, big)};
  for (int l = 0; l <= s.n(); ++l)
    for (int k = 0; k <= s.n(); ++k)
      out.rho_hat(embedded_index(d, l), embedded_index(d, k)) = rho(l, k);
  return out;
}

/// The (n+1)x(n+1) block on the vacuum and single-excitation basis strings.
inline OneParticleState extract_one_particle(const FullState& full) {
  const auto n = static_cast<int>(full.mode_dims.size());
  std::vector<Eigen::Index> idx;
  for (int l = 0; l <= n; ++l) idx.push_back(embedded_index(full.mode_dims, l));
  const ComplexMatrix block = full.rho_hat(idx, idx);
  return OneParticleState::disassemble(hermitian_part(block));
}

struct ModeOperatorSet {
  ModeKind kind = ModeKind::qubit;
  std::vector<int> dims;
  std::vector<SparseMatrix> lowering;  // a_1 .. a_n on the full space

  Eigen::Index n() const { return static_cast<Eigen::Index>(lowering.size()); }
};

inline ModeOperatorSet build_operators(ModeKind kind, Eigen::Index n,
                                       int boson_cutoff = kDefaultBosonCutoff) {
  if (n < 1) throw ValidationError("mode_count", "need at least one mode");
  if (kind == ModeKind::boson && boson_cutoff < 2) {
    std::ostringstream os;
    os << "boson cutoff must be >= 2, got " << boson_cutoff;
    throw ValidationError("boson_cutoff", os.str());
  }
  ModeOperatorSet ops;
  ops.kind = kind;
  ops.dims.assign(n, kind == ModeKind::boson ? boson_cutoff : 2);
  const auto big = full_dimension(ops.dims);
  for (Eigen::Index p = 0; p < n; ++p) {
    const auto st = stride(ops.dims, static_cast<std::size_t>(p));
    std::vector<Eigen::Triplet<Complex>> trip;
    for (std::int64_t i = 0; i < big; ++i) {
      const auto dg = digits(i, ops.dims);
      const int occ = dg[p];
      if (occ == 0) continue;
      double coef = kind == ModeKind::boson ? std::sqrt(static_cast<double>(occ)) : 1.0;
      if (kind == ModeKind::fermion) {
        int parity = 0;
        for (Eigen::Index q = 0; q < p; ++q) parity += dg[q];
        if (parity % 2) coef = -coef;
      }
      trip.emplace_back(i - st, i, Complex(coef, 0.0));
    }
    SparseMatrix a(big, big);
    a.setFromTriplets(trip.begin(), trip.end());
    ops.lowering.push_back(std::move(a));
  }
  return ops;
}

/// Population of basis strings with some boson mode in its top level.
inline double top_level_population(const ComplexMatrix& rho, const std::vector<int>& dims,
                                   const std::vector<std::int64_t>& basis) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    const auto dg = digits(basis[i], dims);
    for (std::size_t p = 0; p < dims.size(); ++p)
      if (dg[p] == dims[p] - 1) {
        acc += rho(i, i).real();
        break;
      }
  }
  return acc;
}

struct SecondQuantizedOptions {
  StepPolicy policy{};
  /// Integrate only on the basis strings with at most N_max excitations,
  /// N_max read off the initial support. That subspace is invariant under
  /// the number-conserving Hamiltonian and the lowering jumps, so the
  /// result is identical to the unrestricted run.
  bool restrict_to_sector = false;
};

/// A full-space state stored only on a subset of basis strings; rho is
/// zero outside `basis`.
struct SectorState {
  std::vector<int> mode_dims;
  std::vector<std::int64_t> basis;
  ComplexMatrix rho;
};

inline int excitations(std::int64_t index, const std::vector<int>& dims) {
  const auto dg = digits(index, dims);
  return std::accumulate(dg.begin(), dg.end(), 0);
}

/// Basis strings with at most n_max excitations, increasing.
inline std::vector<std::int64_t> sector_basis(const std::vector<int>& dims, int n_max) {
  const auto big = full_dimension(dims);
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < big; ++i)
    if (excitations(i, dims) <= n_max) out.push_back(i);
  return out;
}

/// Operators compressed to `basis` (rows and columns).
inline std::vector<SparseMatrix> restrict_operators(const std::vector<SparseMatrix>& full,
                                                    const std::vector<std::int64_t>& basis,
                                                    std::int64_t big) {
  std::vector<Eigen::Index> pos(big, -1);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  for (Eigen::Index i = 0; i < dim; ++i) pos[basis[i]] = i;
  std::vector<SparseMatrix> out;
  for (const auto& a : full) {
    std::vector<Eigen::Triplet<Complex>> trip;
    for (int k = 0; k < a.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(a, k); it; ++it)
        if (pos[it.row()] >= 0 && pos[it.col()] >= 0)
          trip.emplace_back(pos[it.row()], pos[it.col()], it.value());
    SparseMatrix r(dim, dim);
    r.setFromTriplets(trip.begin(), trip.end());
    out.push_back(std::move(r));
  }
  return out;
}

inline SectorState to_sector(const FullState& full, bool restrict) {
  const auto big = full.dim();
  std::vector<std::int64_t> basis;
  if (restrict) {
    int n_max = 0;
    for (std::int64_t i = 0; i < big; ++i)
      if (full.rho_hat.row(i).cwiseAbs().maxCoeff() > 0.0)
        n_max = std::max(n_max, excitations(i, full.mode_dims));
    basis = sector_basis(full.mode_dims, n_max);
  } else {
    basis.resize(big);
    std::iota(basis.begin(), basis.end(), std::int64_t{0});
  }
  return {full.mode_dims, basis, full.rho_hat(basis, basis)};
}

inline FullState to_full(const SectorState& s) {
  const auto big = full_dimension(s.mode_dims);
  FullState out{s.mode_dims, ComplexMatrix::Zero(big, big)};
  out.rho_hat(s.basis, s.basis) = s.rho;
  return out;
}

struct SectorResult {
  SectorState state;
  double leakage = 0.0;             // max top-level boson population seen
  bool truncation_warning = false;  // leakage above kLeakageWarn
};

namespace detail {

/// sum_t c_t S_t on the union pattern of fixed sparse matrices S_t; filling
/// only rewrites the value array.
class SparseCombination {
 public:
  explicit SparseCombination(const std::vector<SparseMatrix>& terms) {
    if (terms.empty()) return;
    pattern_ = SparseMatrix(terms.front().rows(), terms.front().cols());
    for (const auto& s : terms) pattern_ += SparseMatrix(s.cwiseAbs().cast<Complex>());
    pattern_.makeCompressed();
    for (const auto& s : terms) {
      std::vector<std::pair<Eigen::Index, Complex>> slots;
      for (int col = 0; col < s.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(s, col); it; ++it) {
          const auto* first = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[col];
          const auto* last = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[col + 1];
          const auto* pos = std::lower_bound(first, last, it.row());
          slots.emplace_back(pos - pattern_.innerIndexPtr(), it.value());
        }
      slots_.push_back(std::move(slots));
    }
  }

  const SparseMatrix& pattern() const { return pattern_; }

  /// `out` must share the pattern (a copy of pattern()).
  void fill(const ComplexVector& coef, SparseMatrix& out) const {
    Complex* v = out.valuePtr();
    std::fill(v, v + out.nonZeros(), Complex(0.0));
    for (std::size_t t = 0; t < slots_.size(); ++t) {
      const Complex c = coef[static_cast<Eigen::Index>(t)];
      if (c == Complex(0.0)) continue;
      for (const auto& [i, val] : slots_[t]) v[i] += c * val;
    }
  }

 private:
  SparseMatrix pattern_;
  std::vector<std::vector<std::pair<Eigen::Index, Complex>>> slots_;
};

/// out = m S^dagger, column by column (contiguous axpys on column-major m).
inline void times_adjoint(const ComplexMatrix& m, const SparseMatrix& s, ComplexMatrix& out) {
  out.setZero(m.rows(), s.rows());
  const Eigen::Index rows = m.rows();
  // plain real arithmetic; std::complex products go through the checked
  // library routine and are several times slower here
  for (int c = 0; c < s.outerSize(); ++c) {
    const double* src = reinterpret_cast<const double*>(m.col(c).data());
    for (SparseMatrix::InnerIterator it(s, c); it; ++it) {
      const double vr = it.value().real(), vi = -it.value().imag();
      double* dst = reinterpret_cast<double*>(out.col(it.row()).data());
      for (Eigen::Index i = 0; i < 2 * rows; i += 2) {
        dst[i] += vr * src[i] - vi * src[i + 1];
        dst[i + 1] += vr * src[i + 1] + vi * src[i];
      }
    }
  }
}

}  // namespace detail

/// d rho^/dt = -i[H^, rho^] + sum_{k,l} Gamma_kl a_l rho^ a_k^dagger
///             - 1/2 sum_{l,k} Gamma_lk {a_l^dagger a_k, rho^}
/// with H^ = sum H_lk a_l^dagger a_k and Gamma = sum_l |f_l><f_l|, on the
/// basis strings of `rho0` (which must be closed under lowering).
inline SectorResult integrate_sector(const SectorState& rho0, const GKSLModel& model,
                                     const ModeOperatorSet& ops, double t,
                                     const StepPolicy& policy = {}) {
  if (rho0.mode_dims != ops.dims) throw DimensionError("state and operator layouts differ");
  if (model.n != ops.n()) throw DimensionError("model and operator mode counts differ");
  if (!(t >= 0.0)) throw ValidationError("time", "t must be nonnegative");
  const auto n = ops.n();
  const auto dim = static_cast<Eigen::Index>(rho0.basis.size());
  if (rho0.rho.rows() != dim || rho0.rho.cols() != dim)
    throw DimensionError("sector state matrix does not match its basis");

  const auto big = full_dimension(ops.dims);
  const bool whole = dim == big;
  const std::vector<SparseMatrix> a =
      whole ? ops.lowering : restrict_operators(ops.lowering, rho0.basis, big);
  std::vector<SparseMatrix> hops;
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index k = 0; k < n; ++k) hops.push_back(SparseMatrix(a[l].adjoint()) * a[k]);
  const detail::SparseCombination k_terms(hops), j_terms(a);

  // K^ = sum_{l,k} c_lk a_l^dagger a_k with c = iH + Gamma/2, and one jump
  // J_f = sum_l conj(f_l) a_l per decay vector, so that
  // sum_{k,l} Gamma_kl a_l rho a_k^dagger = sum_f J_f rho J_f^dagger.
  struct Generators {
    SparseMatrix k;
    std::vector<SparseMatrix> j;
  };
  Generators gen;
  gen.k = k_terms.pattern();
  auto build = [&](double tt) {
    const ComplexMatrix h = model.checked_hamiltonian(tt);
    const auto fs = model.checked_decay_vectors(tt);
    ComplexMatrix gamma = ComplexMatrix::Zero(n, n);
    for (const auto& f : fs) gamma += f * f.adjoint();
    const ComplexMatrix c = kI * h + 0.5 * gamma;
    ComplexVector ck(n * n);
    for (Eigen::Index l = 0; l < n; ++l)
      for (Eigen::Index k = 0; k < n; ++k) ck[l * n + k] = c(l, k);
    k_terms.fill(ck, gen.k);
    gen.j.resize(fs.size(), j_terms.pattern());
    for (std::size_t f = 0; f < fs.size(); ++f) j_terms.fill(fs[f].conjugate(), gen.j[f]);
  };
  build(0.0);

  // rho is Hermitian: K rho = (rho K^dagger)^dagger and J rho = (rho J^dagger)^dagger
  ComplexMatrix x(dim, dim), xa(dim, dim);
  auto rhs = [&](double tt, const ComplexMatrix& rho) -> ComplexMatrix {
    if (!model.time_independent) build(tt);
    detail::times_adjoint(rho, gen.k, x);
    ComplexMatrix out = -x;
    out -= x.adjoint();
    for (const auto& jf : gen.j) {
      detail::times_adjoint(rho, jf, x);
      xa = x.adjoint();
      detail::times_adjoint(xa, jf, x);
      out += x;
    }
    return out;
  };

  SectorResult res;
  const bool boson = ops.kind == ModeKind::boson;
  auto observe = [&](double tt, const ComplexMatrix& rho) {
    if (!boson) return;
    const double leak = top_level_population(rho, ops.dims, rho0.basis);
    res.leakage = std::max(res.leakage, leak);
    if (leak > kLeakageError) {
      std::ostringstream os;
      os << "boson truncation leaked " << leak << " into the top Fock level at t = " << tt;
      throw TruncationError(os.str(), leak);
    }
  };
  observe(0.0, rho0.rho);
  ComplexMatrix work = integrate_rk4(rhs, rho0.rho, 0.0, t, policy, model.breakpoints, observe);
  res.truncation_warning = res.leakage > kLeakageWarn;

  const double tr_err = std::abs(work.trace() - rho0.rho.trace());
  if (tr_err > 1e-9) {
    std::ostringstream os;
    os << "second-quantized integration lost trace: " << tr_err;
    throw NumericalError(os.str());
  }
  const double lo = min_eigenvalue(work);
  if (lo < -1e-8) {
    std::ostringstream os;
    os << "second-quantized integration lost positivity: min eigenvalue " << lo;
    throw NumericalError(os.str());
  }
  res.state = {rho0.mode_dims, rho0.basis, hermitian_part(work)};
  return res;
}

struct SecondQuantizedResult {
  FullState state;
  double leakage = 0.0;
  bool truncation_warning = false;
  Eigen::Index working_dim = 0;
};

inline SecondQuantizedResult integrate_second_quantized(const FullState& rho0,
                                                        const GKSLModel& model,
                                                        const ModeOperatorSet& ops, double t,
                                                        const SecondQuantizedOptions& opt = {}) {
  if (rho0.mode_dims != ops.dims) throw DimensionError("state and operator layouts differ");
  const auto sec = integrate_sector(to_sector(rho0, opt.restrict_to_sector), model, ops, t, opt.policy);
  return {to_full(sec.state), sec.leakage, sec.truncation_warning,
          static_cast<Eigen::Index>(sec.state.basis.size())};
}

/// Partial trace over the modes in `traced` (1-based labels); the result
/// lives on the remaining modes in their original order.
inline FullState full_partial_trace(const FullState& full, const IndexSet& traced) {
  const auto n = static_cast<Eigen::Index>(full.mode_dims.size());
  traced.check_within(n);
  std::vector<int> kept_dims, traced_dims;
  std::vector<std::size_t> kept_pos, traced_pos;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (traced.contains(static_cast<int>(p + 1))) {
      traced_pos.push_back(p);
      traced_dims.push_back(full.mode_dims[p]);
    } else {
      kept_pos.push_back(p);
      kept_dims.push_back(full.mode_dims[p]);
    }
  }
  auto flatten = [](const std::vector<int>& dg, const std::vector<std::size_t>& pos,
                    const std::vector<int>& dims) {
    std::int64_t idx = 0;
    for (std::size_t q = 0; q < pos.size(); ++q) idx = idx * dims[q] + dg[pos[q]];
    return idx;
  };
  const auto big = full.dim();
  std::vector<std::int64_t> ki(big), ti(big);
  for (std::int64_t i = 0; i < big; ++i) {
    const auto dg = digits(i, full.mode_dims);
    ki[i] = flatten(dg, kept_pos, kept_dims);
    ti[i] = flatten(dg, traced_pos, traced_dims);
  }
  std::int64_t dk = 1;
  for (int x : kept_dims) dk *= x;
  FullState out{kept_dims, ComplexMatrix::Zero(dk, dk)};
  for (std::int64_t i = 0; i < big; ++i)
    for (std::int64_t j = 0; j < big; ++j)
      if (ti[i] == ti[j]) out.rho_hat(ki[i], ki[j]) += full.rho_hat(i, j);
  return out;
}

/// Singular values of the state reshaped across `part` | rest, descending.
inline std::vector<double> schmidt(const ComplexVector& phi_hat, const std::vector<int>& dims,
                                   const IndexSet& part) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  part.check_within(n);
  if (phi_hat.size() != full_dimension(dims)) throw DimensionError("schmidt: vector size");
  std::vector<int> d1, d2;
  std::vector<std::size_t> p1, p2;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (part.contains(static_cast<int>(p + 1))) {
      p1.push_back(p);
      d1.push_back(dims[p]);
    } else {
      p2.push_back(p);
      d2.push_back(dims[p]);
    }
  }
  auto prod = [](const std::vector<int>& d) {
    return std::accumulate(d.begin(), d.end(), std::int64_t{1}, std::multiplies<>());
  };
  ComplexMatrix m = ComplexMatrix::Zero(prod(d1), prod(d2));
  for (std::int64_t i = 0; i < phi_hat.size(); ++i) {
    const auto dg = digits(i, dims);
    std::int64_t r = 0, c = 0;
    for (std::size_t q = 0; q < p1.size(); ++q) r = r * d1[q] + dg[p1[q]];
    for (std::size_t q = 0; q < p2.size(); ++q) c = c * d2[q] + dg[p2[q]];
    m(r, c) = phi_hat[i];
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const RealVector sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

inline Complex expectation(const SparseMatrix& op, const ComplexMatrix& rho) {
  return (op * rho).trace();
}

namespace detail {

inline MomentState moments_from(const std::vector<SparseMatrix>& a, const ComplexMatrix& rho,
                                ModeKind kind) {
  if (kind == ModeKind::qubit)
    throw ValidationError("statistics", "moments need boson or fermion operators");
  const auto n = static_cast<Eigen::Index>(a.size());
  const bool boson = kind == ModeKind::boson;
  ComplexVector m(n);
  std::vector<ComplexMatrix> a_rho(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a_rho[j] = a[j] * rho;
    m[j] = a_rho[j].trace();
  }
  if (!boson) {
    if (m.norm() > 1e-12) {
      std::ostringstream os;
      os << "fermionic state has nonzero means (|m| = " << m.norm() << ")";
      throw ValidationError("superselection", os.str());
    }
    m.setZero();
  }
  ComplexMatrix y(n, n), z(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const SparseMatrix adi = a[i].adjoint();
    for (Eigen::Index j = 0; j < n; ++j) {
      y(i, j) = (adi * a_rho[j]).trace() - std::conj(m[i]) * m[j];
      z(i, j) = (a[i] * a_rho[j]).trace() - m[i] * m[j];
    }
  }
  return MomentState::make(boson ? Statistics::boson : Statistics::fermion, std::move(m),
                           std::move(y), std::move(z), 1e-9);
}

}  // namespace detail

/// m_j = Tr a_j rho^, Y_ij = Tr a_i^dagger a_j rho^ - conj(m_i) m_j,
/// Z_ij = Tr a_i a_j rho^ - m_i m_j; fermions use raw moments with m = 0.
inline MomentState moments_from_full(const FullState& full, const ModeOperatorSet& ops) {
  if (full.mode_dims != ops.dims) throw DimensionError("state and operator layouts differ");
  return detail::moments_from(ops.lowering, full.rho_hat, ops.kind);
}

/// Same moments for a sector state; exact because lowering maps a
/// low-excitation sector into itself.
inline MomentState moments_from_sector(const SectorState& s, const ModeOperatorSet& ops) {
  if (s.mode_dims != ops.dims) throw DimensionError("state and operator layouts differ");
  return detail::moments_from(restrict_operators(ops.lowering, s.basis, full_dimension(ops.dims)),
                              s.rho, ops.kind);
}

}  // namespace opsq::oracle
