#pragma once

// Oracle cross-check suite behind `opsq verify`.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "opsq/cli/config.hpp"
#include "opsq/cli/output.hpp"
#include "opsq/dynamics.hpp"
#include "opsq/information.hpp"
#include "opsq/moments.hpp"
#include "opsq/oracle.hpp"
#include "opsq/random.hpp"

namespace opsq::cli {

struct VerifyOptions {
  std::vector<int> sizes{2, 3};
  int models = 3;
  double t = 1.0;
  /// Optional user model, checked alongside the random ones at its n.
  std::optional<GKSLModel> extra_model;
};

class VerifyReport {
 public:
  void add(const std::string& check, int n, int samples, double residual, double tolerance) {
    const bool pass = std::isfinite(residual) && residual <= tolerance;
    all_pass_ = all_pass_ && pass;
    rows_.push_back({check, std::to_string(n), std::to_string(samples), format_number(residual),
                     format_number(tolerance), pass ? "PASS" : "FAIL"});
  }
  bool all_pass() const { return all_pass_; }
  Table table() const {
    Table t({"check", "n", "samples", "max_residual", "tolerance", "status"});
    for (const auto& r : rows_) t.add_row(r);
    return t;
  }

 private:
  bool all_pass_ = true;
  std::vector<std::vector<std::string>> rows_;
};

namespace verify_detail {

inline constexpr int kBosonCutoff = oracle::kDefaultBosonCutoff;

/// Running maximum of a residual over samples.
struct Acc {
  double value = 0.0;
  int samples = 0;
  void operator()(double r) {
    value = std::isnan(r) || std::isnan(value) ? std::nan("") : std::max(value, r);
    ++samples;
  }
};

inline double embedded_mutual_information(const OneParticleState& s, const IndexSet& i1,
                                           const IndexSet& i2) {
  const auto full = oracle::embed_density(s);
  return von_neumann_entropy(oracle::full_partial_trace(full, i2).rho_hat) +
         von_neumann_entropy(oracle::full_partial_trace(full, i1).rho_hat) -
         von_neumann_entropy(full.rho_hat);
}

inline std::vector<IndexSet> bipartitions(rnd::Engine& g, int n) {
  std::vector<IndexSet> out;
  if (n <= 7) {
    for (int mask = 1; mask + 1 < (1 << n); ++mask) {
      std::vector<int> v;
      for (int l = 1; l <= n; ++l)
        if (mask & (1 << (l - 1))) v.push_back(l);
      out.push_back(IndexSet::make(v));
    }
  } else {
    for (int k = 0; k < 32; ++k) out.push_back(rnd::index_set(g, n));
  }
  return out;
}

inline void state_checks(VerifyReport& rep, std::uint64_t seed, int n, int samples) {
  Acc trace_out_acc, mi_acc, identity_acc, additivity_acc, schmidt_acc, rank_acc, predicate_acc;
  for (int k = 0; k < samples; ++k) {
    auto g = rnd::engine(seed, {static_cast<std::uint64_t>(n), 1, static_cast<std::uint64_t>(k)});

    const auto s = rnd::state(g, n);
    std::vector<IndexSet> sets;
    for (int l = 1; l <= n; ++l) sets.push_back(IndexSet{l});
    sets.push_back(rnd::index_set(g, n));
    const auto full = oracle::embed_density(s);
    for (const auto& traced : sets) {
      const auto closed = oracle::embed_density(trace_out(s, traced).state);
      const auto brute = oracle::full_partial_trace(full, traced);
      trace_out_acc(max_abs(closed.rho_hat - brute.rho_hat));
    }

    const auto z = rnd::zero_coherence_state(g, n);
    const IndexSet i1 = rnd::index_set(g, n), i2 = i1.complement(n);
    const auto mi = mutual_information(z, i1, i2);
    mi_acc(std::abs(mi.total - embedded_mutual_information(z, i1, i2)));
    additivity_acc(std::abs(mi.total - (mi.quantum_term + mi.classical_term)));
    // S(rho00 + R) = S(R) + f(rho00) for psi = 0, on the state and its reduction
    identity_acc(std::abs(von_neumann_entropy(z.assemble()) -
                       (von_neumann_entropy(z.r()) + entropy_scalar(z.rho00()))));
    const auto red = trace_out(z, i2).state;
    identity_acc(std::abs(von_neumann_entropy(red.assemble()) -
                       (von_neumann_entropy(red.r()) + entropy_scalar(red.rho00()))));

    const auto phi = rnd::pure_state(g, n);
    const auto embedded = oracle::embed_pure(phi);
    for (const auto& part : bipartitions(g, n)) {
      const auto closed = schmidt_coefficients(phi, part);
      const auto sv = oracle::schmidt(embedded, oracle::qubit_dims(n), part);
      double diff = 0.0;
      for (std::size_t i = 0; i < sv.size(); ++i)
        diff = std::max(diff, std::abs(sv[i] - (i < closed.size() ? closed[i] : 0.0)));
      schmidt_acc(diff);
      rank_acc(sv.size() > 2 ? sv[2] : 0.0);
      int rank = 0;
      for (double x : sv) rank += x > 1e-10;
      predicate_acc(pure_state_entangled(phi, part) == (rank == 2) ? 0.0 : 1.0);
    }
  }
  rep.add("trace_out_vs_partial_trace", n, trace_out_acc.samples, trace_out_acc.value, 1e-12);
  rep.add("mutual_information_vs_oracle", n, mi_acc.samples, mi_acc.value, 1e-9);
  rep.add("entropy_block_identity", n, identity_acc.samples, identity_acc.value, 1e-10);
  rep.add("mutual_information_split", n, additivity_acc.samples, additivity_acc.value, 1e-10);
  rep.add("schmidt_vs_svd", n, schmidt_acc.samples, schmidt_acc.value, 1e-10);
  rep.add("schmidt_rank_at_most_2", n, rank_acc.samples, rank_acc.value, 1e-10);
  rep.add("entanglement_predicate", n, predicate_acc.samples, predicate_acc.value, 0.0);
}

inline std::vector<GKSLModel> models_for(std::uint64_t seed, int n, int count,
                                         const std::optional<GKSLModel>& extra) {
  std::vector<GKSLModel> out;
  for (int k = 0; k < count; ++k) {
    auto g = rnd::engine(seed, {static_cast<std::uint64_t>(n), 2, static_cast<std::uint64_t>(k)});
    rnd::ModelOptions opt;
    opt.time_dependent = k % 2 == 1;
    out.push_back(rnd::model(g, n, opt));
  }
  if (extra && extra->n == n) out.push_back(*extra);
  return out;
}

inline void dynamics_checks(VerifyReport& rep, std::uint64_t seed, int n,
                            const std::vector<GKSLModel>& models, double t) {
  Acc direct, ode_exp, semigroup, contraction, trace_err, positivity, fd;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& m = models[k];
    auto g = rnd::engine(seed, {static_cast<std::uint64_t>(n), 3, k});
    const auto s0 = rnd::state(g, n);
    for (double tk : {0.5 * t, t}) {
      const auto p = propagate(m, tk);
      const auto a = apply_propagator(s0, p);
      const auto b = integrate_direct(s0, m, tk);
      direct(max_abs(a.assemble() - b.assemble()));
      contraction(std::max(0.0, operator_norm(p.v) - 1.0));
      trace_err(std::abs(a.assemble().trace().real() - 1.0));
      positivity(std::max(0.0, -min_eigenvalue(a.assemble())));
    }
    if (m.time_independent) {
      const auto e = propagate(m, t, {}, PropagationMethod::exponential);
      const auto o = propagate(m, t, {}, PropagationMethod::ode);
      ode_exp(max_abs(e.v - o.v));
      const auto v1 = propagate(m, t / 3), v2 = propagate(m, 2 * t / 3);
      semigroup(max_abs(v1.v * v2.v - e.v));
    }
    // d/dt(psi psi^dagger) = -A psi psi^dagger - psi psi^dagger A^dagger, five-point stencil
    const double h = 1e-3, tc = 0.5 * t;
    const ComplexVector psi0 = rnd::unit_vector(g, n);
    std::vector<Propagator> v{propagate(m, tc - 2 * h, {}, PropagationMethod::ode)};
    for (int j = -1; j <= 2; ++j) v.push_back(propagate_from(m, v.back(), tc + j * h));
    auto outer = [&psi0](const Propagator& p) -> ComplexMatrix {
      const ComplexVector x = p.v * psi0;
      return x * x.adjoint();
    };
    const ComplexMatrix d =
        (8.0 * (outer(v[3]) - outer(v[1])) - (outer(v[4]) - outer(v[0]))) / (12 * h);
    const ComplexMatrix pm = outer(v[2]);
    const ComplexMatrix a = accretive_matrix(m, tc);
    fd(max_abs(d + a * pm + pm * a.adjoint()));
  }
  rep.add("propagator_vs_direct", n, direct.samples, direct.value, 1e-8);
  rep.add("ode_vs_exponential", n, ode_exp.samples, ode_exp.value, 1e-9);
  rep.add("semigroup", n, semigroup.samples, semigroup.value, 1e-8);
  rep.add("contraction", n, contraction.samples, contraction.value, 1e-9);
  rep.add("trace_preservation", n, trace_err.samples, trace_err.value, 1e-9);
  rep.add("positivity", n, positivity.samples, positivity.value, 1e-8);
  rep.add("pure_state_finite_difference", n, fd.samples, fd.value, 1e-7);

  // homogeneous reservoir with gamma(t) = 1 + sin t
  auto gamma = [](double s) { return 1.0 + std::sin(s); };
  auto g = rnd::engine(seed, {static_cast<std::uint64_t>(n), 4});
  const auto hm = GKSLModel::homogeneous(n, gamma, rnd::hermitian(g, n));
  const auto s0 = OneParticleState::strict(rnd::density(g, n));
  Acc closed;
  const std::vector<double> grid{0.25 * t, 0.5 * t, 0.75 * t, t};
  const auto props = propagate_grid(hm, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    closed(std::abs(apply_propagator(s0, props[k]).rho00() -
                    homogeneous_ground_population(gamma, 0.0, grid[k])));
  rep.add("homogeneous_closed_form", n, closed.samples, closed.value, 1e-7);
}

inline void qubit_checks(VerifyReport& rep, std::uint64_t seed, int n,
                         const std::vector<GKSLModel>& models, double t) {
  const auto ops = oracle::build_operators(oracle::ModeKind::qubit, n);
  oracle::SecondQuantizedOptions opt;
  opt.restrict_to_sector = oracle::full_dimension(ops.dims) > 64;
  Acc round_trip;
  for (std::size_t k = 0; k < models.size(); ++k) {
    auto g = rnd::engine(seed, {static_cast<std::uint64_t>(n), 5, k});
    const auto s0 = rnd::state(g, n);
    const auto res = oracle::integrate_second_quantized(oracle::embed_density(s0), models[k], ops, t, opt);
    round_trip(max_abs(oracle::extract_one_particle(res.state).assemble() -
                       evolve_state(s0, models[k], t).assemble()));
  }
  rep.add("second_quantized_round_trip", n, round_trip.samples, round_trip.value, 1e-8);
}

inline ComplexVector random_vector_on(rnd::Engine& g, const std::vector<std::int64_t>& basis,
                                      const std::vector<int>& dims, int parity) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (parity < 0 || oracle::excitations(basis[i], dims) % 2 == parity)
      v[static_cast<Eigen::Index>(i)] = rnd::complex_gaussian(g);
  return v / v.norm();
}

inline void moment_checks(VerifyReport& rep, std::uint64_t seed, int n,
                          const std::vector<GKSLModel>& models, double t) {
  Acc fermion, boson, leakage, methods;
  const auto fops = oracle::build_operators(oracle::ModeKind::fermion, n);
  const auto bops = oracle::build_operators(oracle::ModeKind::boson, n, kBosonCutoff);
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& m = models[k];
    auto g = rnd::engine(seed, {static_cast<std::uint64_t>(n), 6, k});

    // fermions: parity-definite mixture on the exact space
    const auto fbasis = oracle::sector_basis(fops.dims, n);
    const ComplexVector even = random_vector_on(g, fbasis, fops.dims, 0);
    const ComplexVector odd = random_vector_on(g, fbasis, fops.dims, 1);
    const oracle::SectorState f0{fops.dims, fbasis,
                                 0.5 * even * even.adjoint() + 0.5 * odd * odd.adjoint()};
    const auto fm0 = oracle::moments_from_sector(f0, fops);
    const auto fref = oracle::moments_from_sector(oracle::integrate_sector(f0, m, fops, t).state, fops);
    for (auto method : {MomentMethod::ode, MomentMethod::propagator}) {
      const auto out = evolve_moments(fm0, m, t, method);
      fermion(std::max(max_abs(out.y() - fref.y()), max_abs(out.z() - fref.z())));
    }

    // bosons: Fock start and a superposition over 0..2 excitations
    const auto b1 = oracle::sector_basis(bops.dims, 1);
    ComplexMatrix fock = ComplexMatrix::Zero(static_cast<Eigen::Index>(b1.size()),
                                             static_cast<Eigen::Index>(b1.size()));
    fock(1, 1) = 1.0;  // one excitation in the last mode
    const ComplexVector sup = random_vector_on(g, oracle::sector_basis(bops.dims, 2), bops.dims, -1);
    const std::vector<oracle::SectorState> starts{
        {bops.dims, b1, fock}, {bops.dims, oracle::sector_basis(bops.dims, 2), sup * sup.adjoint()}};
    for (const auto& b0 : starts) {
      const auto bm0 = oracle::moments_from_sector(b0, bops);
      const auto res = oracle::integrate_sector(b0, m, bops, t);
      leakage(res.leakage);
      const auto ref = oracle::moments_from_sector(res.state, bops);
      const auto ode = evolve_moments(bm0, m, t, MomentMethod::ode);
      const auto prop = evolve_moments(bm0, m, t, MomentMethod::propagator);
      boson(std::max({max_abs(ode.y() - ref.y()), max_abs(ode.z() - ref.z()),
                      (ode.m() - ref.m()).cwiseAbs().maxCoeff()}));
      methods(std::max({max_abs(ode.y() - prop.y()), max_abs(ode.z() - prop.z()),
                        (ode.m() - prop.m()).cwiseAbs().maxCoeff()}));
    }
  }
  rep.add("fermion_moments_vs_oracle", n, fermion.samples, fermion.value, 1e-8);
  rep.add("boson_moments_vs_oracle", n, boson.samples, boson.value, 1e-6);
  rep.add("boson_truncation_leakage", n, leakage.samples, leakage.value, 1e-8);
  rep.add("moments_ode_vs_propagator", n, methods.samples, methods.value, 1e-8);
}

}  // namespace verify_detail

/// Refuses sizes whose oracle spaces exceed the guard, naming the stage.
inline void verify_preflight(const VerifyOptions& opt) {
  for (int n : opt.sizes) {
    if (n < 1) throw ValidationError("mode_count", "verify sizes must be at least 1");
    try {
      oracle::full_dimension(oracle::qubit_dims(n));
    } catch (const GuardError& e) {
      throw GuardError("qubit stage, n = " + std::to_string(n) + ": " + e.what());
    }
    try {
      oracle::full_dimension(std::vector<int>(n, verify_detail::kBosonCutoff));
    } catch (const GuardError& e) {
      throw GuardError("boson stage (cutoff " + std::to_string(verify_detail::kBosonCutoff) +
                       "), n = " + std::to_string(n) + ": " + e.what());
    }
  }
}

inline VerifyReport run_verify(std::uint64_t seed, const VerifyOptions& opt) {
  verify_preflight(opt);
  if (opt.models < 1) throw ValidationError("models", "need at least one model");
  if (!(opt.t > 0.0)) throw ValidationError("time", "verify time must be positive");
  VerifyReport rep;
  for (int n : opt.sizes) {
    verify_detail::state_checks(rep, seed, n, 5 * opt.models);
    const auto models = verify_detail::models_for(seed, n, opt.models, opt.extra_model);
    verify_detail::dynamics_checks(rep, seed, n, models, opt.t);
    verify_detail::qubit_checks(rep, seed, n, models, opt.t);
    verify_detail::moment_checks(rep, seed, n, models, opt.t);
  }
  return rep;
}

/// Config keys: "sizes", "models", "t", and optionally "n" + "model".
inline VerifyOptions parse_verify(const Json& config, const SeedSource& seeds) {
  detail::allow_keys(config, "", {"scenario", "seed", "sizes", "models", "t", "n", "model"});
  VerifyOptions opt;
  if (config.contains("sizes")) {
    opt.sizes.clear();
    const Json& s = config["sizes"];
    if (!s.is_array() || s.empty()) throw ConfigError("sizes: expected a non-empty list");
    for (std::size_t i = 0; i < s.size(); ++i)
      opt.sizes.push_back(static_cast<int>(detail::integer(s[i], "sizes[" + std::to_string(i) + "]")));
  }
  if (config.contains("models"))
    opt.models = static_cast<int>(detail::integer(config["models"], "models"));
  if (config.contains("t")) opt.t = detail::number(config["t"], "t");
  if (config.contains("model")) {
    const auto n = detail::integer(detail::need(config, "n", ""), "n");
    if (n < 1) throw ValidationError("mode_count", "n must be at least 1");
    opt.extra_model = parse_model(config["model"], static_cast<Eigen::Index>(n), seeds);
    if (std::find(opt.sizes.begin(), opt.sizes.end(), n) == opt.sizes.end())
      opt.sizes.push_back(static_cast<int>(n));
  }
  return opt;
}

}  // namespace opsq::cli
