// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--criterion N] [--opsq <path to the opsq binary>]

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "opsq/cli/output.hpp"
#include "opsq/opsq.hpp"

using namespace opsq;
namespace fs = std::filesystem;

namespace {

std::string g_opsq = OPSQ_BINARY;

struct Check {
  std::string what;
  double value;
  double limit;
  bool pass;
};

/// Sub-check "value <= limit".
Check at_most(std::string what, double value, double limit) {
  return {std::move(what), value, limit, std::isfinite(value) && value <= limit};
}

Check below(std::string what, double value, double limit) {
  return {std::move(what), value, limit, std::isfinite(value) && value < limit};
}

struct Outcome {
  std::vector<Check> checks;
  std::string note;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
};

/// Dynamics invariants collected along the dynamical criteria.
struct Invariants {
  double trace_error = 0.0;
  double negativity = 0.0;
  double norm_excess = 0.0;
  double semigroup = 0.0;
  int states = 0;
  int propagators = 0;
  int semigroup_samples = 0;

  void state(const ComplexMatrix& rho) {
    trace_error = std::max(trace_error, std::abs(rho.trace().real() - 1.0));
    negativity = std::max(negativity, -min_eigenvalue(rho));
    ++states;
  }
  void propagator(const ComplexMatrix& v) {
    norm_excess = std::max(norm_excess, operator_norm(v) - 1.0);
    ++propagators;
  }
};

Invariants g_inv;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("opsq_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int shell(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Numeric columns of an opsq CSV (comment line and header skipped).
std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::vector<std::vector<double>> rows;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::istringstream cells(line);
    std::string c;
    while (std::getline(cells, c, ',')) r.push_back(std::stod(c));
    rows.push_back(std::move(r));
  }
  return rows;
}

double diff(const MomentState& a, const MomentState& b) {
  double m = a.n() > 0 ? (a.m() - b.m()).cwiseAbs().maxCoeff() : 0.0;
  return std::max({m, max_abs(a.y() - b.y()), max_abs(a.z() - b.z())});
}

Outcome criterion1() {
  const auto dir = scratch("c1");
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = shell(g_opsq + " bell-curve --out " + dir.string());
  const double wall = seconds_since(t0);
  Outcome o;
  if (rc != 0) {
    o.checks.push_back({"bell-curve exit status", double(rc), 0.0, false});
    return o;
  }
  const auto rows = read_csv(dir / "bell_curve.csv");
  std::size_t peak = 0;
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (rows[k][1] > rows[peak][1]) peak = k;
  const double step = rows[1][0] - rows[0][0];
  o.checks.push_back(below("I(t_start)", rows.front()[1], 1e-2));
  o.checks.push_back(below("I(t_end)", rows.back()[1], 1e-2));
  o.checks.push_back(at_most("|t_peak - ln 2| / grid step", std::abs(rows[peak][0] - std::log(2.0)) / step, 1.0));
  o.checks.push_back(at_most("|I_peak - ln 2|", std::abs(rows[peak][1] - std::log(2.0)), 1e-6));
  o.checks.push_back(below("runtime [s]", wall, 1.0));
  return o;
}

Outcome criterion2() {
  const auto dir = scratch("c2");
  const fs::path cfg = dir / "homogeneous.json";
  std::ofstream(cfg) << R"({
    "scenario": "simulate", "n": 3,
    "time": {"t_start": 0.0, "t_end": 5.0, "samples": 100},
    "model": {
      "hamiltonian": {"matrix": [[0.3, [0.2, 0.4], 0.0], [[0.2, -0.4], -0.1, 0.7], [0.0, 0.7, 0.5]]},
      "decay": {"preset": "homogeneous",
                "gamma": {"preset": "sinusoidal", "gamma0": 1.0, "amplitude": 1.0, "omega": 1.0}}},
    "initial_state": {"R": [[0.5, [0.1, 0.1], 0.0], [[0.1, -0.1], 0.3, 0.05], [0.0, 0.05, 0.2]],
                      "rho00": 0.0}})";
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = shell(g_opsq + " --config " + cfg.string() + " --out " + dir.string() + " simulate");
  const double wall = seconds_since(t0);
  Outcome o;
  if (rc != 0) {
    o.checks.push_back({"simulate exit status", double(rc), 0.0, false});
    return o;
  }
  const auto rows = read_csv(dir / "simulate.csv");
  double worst = 0.0;
  for (const auto& r : rows) {
    const double t = r[0];
    // integral of 1 + sin s over [0, t]
    worst = std::max(worst, std::abs(r[1] - (1.0 - std::exp(-(t + 1.0 - std::cos(t))))));
    g_inv.trace_error = std::max(g_inv.trace_error, std::abs(r[1] + r[2] - 1.0));
    g_inv.negativity = std::max(g_inv.negativity, -r[4]);
    g_inv.norm_excess = std::max(g_inv.norm_excess, r[5] - 1.0);
    ++g_inv.states;
    ++g_inv.propagators;
  }
  o.checks.push_back({"grid points", double(rows.size()), 100.0, rows.size() == 100});
  o.checks.push_back(at_most("max |rho00 - (1 - exp(-int gamma))|", worst, 1e-7));
  o.checks.push_back(below("runtime [s]", wall, 5.0));
  return o;
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int samples = 0;
  const std::vector<double> times{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  for (int k = 0; k < 20; ++k) {
    auto g = rnd::engine(3, {static_cast<std::uint64_t>(k)});
    rnd::ModelOptions opt;
    opt.decay_count = 3;
    opt.time_dependent = k % 2 == 1;
    const auto m = rnd::model(g, 4, opt);
    const auto s0 = rnd::state(g, 4);
    const auto props = propagate_grid(m, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const ComplexMatrix a = apply_propagator(s0, props[i]).assemble();
      const ComplexMatrix b = integrate_direct(s0, m, times[i]).assemble();
      worst = std::max(worst, max_abs(a - b));
      ++samples;
      g_inv.state(a);
      g_inv.state(b);
      g_inv.propagator(props[i].v);
    }
    if (m.time_independent) {
      for (auto [t, s] : {std::pair{1.0, 2.0}, std::pair{0.4, 1.3}}) {
        const auto vt = propagate(m, t), vs = propagate(m, s), vts = propagate(m, t + s);
        g_inv.semigroup = std::max(g_inv.semigroup, max_abs(vts.v - vt.v * vs.v));
        ++g_inv.semigroup_samples;
      }
    }
  }
  const double wall = seconds_since(t0);
  Outcome o;
  o.note = std::to_string(samples) + " samples";
  o.checks.push_back(at_most("max |evolve_state - integrate_direct|", worst, 1e-8));
  o.checks.push_back(below("runtime [s]", wall, 30.0));
  return o;
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 5;
  const auto ops = oracle::build_operators(oracle::ModeKind::qubit, n);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    auto g = rnd::engine(4, {static_cast<std::uint64_t>(k)});
    rnd::ModelOptions opt;
    opt.time_dependent = k % 2 == 1;
    const auto m = rnd::model(g, n, opt);
    const auto s0 = rnd::state(g, n);
    const double t = 1.5;
    const auto res = oracle::integrate_second_quantized(oracle::embed_density(s0), m, ops, t);
    const ComplexMatrix a = oracle::extract_one_particle(res.state).assemble();
    const ComplexMatrix b = evolve_state(s0, m, t).assemble();
    worst = std::max(worst, max_abs(a - b));
    g_inv.state(res.state.rho_hat);
    g_inv.state(b);
  }
  const double wall = seconds_since(t0);
  Outcome o;
  o.note = "D = 32";
  o.checks.push_back(at_most("max |one-particle block of oracle - evolve_state|", worst, 1e-8));
  o.checks.push_back(below("runtime [s]", wall, 120.0));
  return o;
}

Outcome criterion5() {
  double worst = 0.0;
  int samples = 0;
  for (int k = 0; k < 50; ++k) {
    auto g = rnd::engine(5, {static_cast<std::uint64_t>(k)});
    const int n = 1 + k % 7;
    const auto s = rnd::state(g, n);
    std::vector<IndexSet> sets;
    for (int l = 1; l <= n; ++l) sets.push_back(IndexSet{l});
    sets.push_back(rnd::index_set(g, n));
    const auto full = oracle::embed_density(s);
    for (const auto& traced : sets) {
      const auto closed = oracle::embed_density(trace_out(s, traced).state);
      worst = std::max(worst, max_abs(closed.rho_hat - oracle::full_partial_trace(full, traced).rho_hat));
      ++samples;
    }
  }
  Outcome o;
  o.note = std::to_string(samples) + " reductions";
  o.checks.push_back(at_most("max |trace_out - partial trace|", worst, 1e-12));
  return o;
}

Outcome criterion6() {
  double identity = 0.0, split = 0.0, oracle_gap = 0.0;
  for (int k = 0; k < 50; ++k) {
    auto g = rnd::engine(6, {static_cast<std::uint64_t>(k)});
    const int n = 1 + k % 6;
    const auto s = rnd::zero_coherence_state(g, n);
    const IndexSet i1 = rnd::index_set(g, n), i2 = i1.complement(n);
    const auto rep = mutual_information(s, i1, i2);
    const double lhs = von_neumann_entropy(trace_out(s, i1).state.assemble()) +
                       von_neumann_entropy(trace_out(s, i2).state.assemble()) -
                       von_neumann_entropy(s.assemble());
    identity = std::max(identity, std::abs(lhs - rep.total));
    split = std::max(split, std::abs(rep.total - (rep.quantum_term + rep.classical_term)));
    const auto full = oracle::embed_density(s);
    const double brute = von_neumann_entropy(oracle::full_partial_trace(full, i1).rho_hat) +
                         von_neumann_entropy(oracle::full_partial_trace(full, i2).rho_hat) -
                         von_neumann_entropy(full.rho_hat);
    oracle_gap = std::max(oracle_gap, std::abs(brute - rep.total));
  }
  Outcome o;
  o.note = "50 states";
  o.checks.push_back(at_most("max |LHS - RHS| (reduced entropies vs blocks)", identity, 1e-10));
  o.checks.push_back(at_most("max |total - (dS + I_cl)|", split, 1e-10));
  o.checks.push_back(at_most("max |total - oracle mutual information|", oracle_gap, 1e-9));
  return o;
}

Outcome criterion7() {
  int cases = 0, too_many = 0, disagree = 0;
  for (int k = 0; k < 100; ++k) {
    auto g = rnd::engine(7, {static_cast<std::uint64_t>(k)});
    const int n = 1 + k % 7;
    const auto phi = rnd::pure_state(g, n);
    const auto embedded = oracle::embed_pure(phi);
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> v;
      for (int l = 1; l <= n; ++l)
        if (mask & (1 << (l - 1))) v.push_back(l);
      const auto part = IndexSet::make(v);
      int rank = 0;
      for (double x : oracle::schmidt(embedded, oracle::qubit_dims(n), part)) rank += x > 1e-10;
      too_many += rank > 2;
      disagree += pure_state_entangled(phi, part) != (rank == 2);
      ++cases;
    }
  }
  Outcome o;
  o.note = std::to_string(cases) + " bipartitions";
  o.checks.push_back(at_most("cases with more than 2 coefficients", too_many, 0));
  o.checks.push_back(at_most("predicate vs rank disagreements", disagree, 0));
  return o;
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  double fermion = 0.0, boson = 0.0, leakage = 0.0, methods = 0.0;
  const std::vector<double> times{0.5, 1.0, 2.0};

  const auto fops = oracle::build_operators(oracle::ModeKind::fermion, 3);
  const auto fbasis = oracle::sector_basis(fops.dims, 3);
  for (int k = 0; k < 10; ++k) {
    auto g = rnd::engine(8, {1, static_cast<std::uint64_t>(k)});
    rnd::ModelOptions opt;
    opt.time_dependent = k % 2 == 1;
    const auto m = rnd::model(g, 3, opt);
    // even/odd mixture: no coherence between parities
    ComplexVector even = ComplexVector::Zero(8), odd = ComplexVector::Zero(8);
    for (Eigen::Index i = 0; i < 8; ++i)
      (oracle::excitations(fbasis[i], fops.dims) % 2 ? odd : even)[i] = rnd::complex_gaussian(g);
    even.normalize();
    odd.normalize();
    const double w = rnd::uniform(g);
    const oracle::SectorState f0{fops.dims, fbasis, w * even * even.adjoint() + (1 - w) * odd * odd.adjoint()};
    const auto ms0 = oracle::moments_from_sector(f0, fops);
    const auto ode = evolve_moments_grid(ms0, m, times, MomentMethod::ode);
    const auto prop = evolve_moments_grid(ms0, m, times, MomentMethod::propagator);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto res = oracle::integrate_sector(f0, m, fops, times[i]);
      g_inv.state(res.state.rho);
      const auto ref = oracle::moments_from_sector(res.state, fops);
      fermion = std::max({fermion, diff(ode[i], ref), diff(prop[i], ref)});
      methods = std::max(methods, diff(ode[i], prop[i]));
    }
  }

  const int cutoff = 6;
  const auto bops = oracle::build_operators(oracle::ModeKind::boson, 2, cutoff);
  const auto bbasis = oracle::sector_basis(bops.dims, 2 * (cutoff - 1));
  for (int k = 0; k < 5; ++k) {
    auto g = rnd::engine(8, {2, static_cast<std::uint64_t>(k)});
    rnd::ModelOptions opt;
    opt.time_dependent = k % 2 == 1;
    const auto m = rnd::model(g, 2, opt);
    // Fock |1,1> and a product coherent state with |alpha_i| <= 0.2
    ComplexVector fock = ComplexVector::Zero(cutoff * cutoff);
    fock[1 * cutoff + 1] = 1.0;
    ComplexVector coh(cutoff * cutoff);
    std::vector<ComplexVector> factors;
    for (int mode = 0; mode < 2; ++mode) {
      const Complex alpha = std::polar(rnd::uniform(g, 0.05, 0.2), rnd::uniform(g, 0.0, 6.283185307179586));
      ComplexVector f(cutoff);
      Complex term = 1.0;
      for (int q = 0; q < cutoff; ++q) {
        f[q] = term;
        term *= alpha / std::sqrt(double(q + 1));
      }
      factors.push_back(f / f.norm());
    }
    for (int a = 0; a < cutoff; ++a)
      for (int b = 0; b < cutoff; ++b) coh[a * cutoff + b] = factors[0][a] * factors[1][b];
    for (const ComplexVector& v : {fock, coh}) {
      const oracle::SectorState b0{bops.dims, bbasis, v * v.adjoint()};
      const auto ms0 = oracle::moments_from_sector(b0, bops);
      const auto ode = evolve_moments_grid(ms0, m, times, MomentMethod::ode);
      const auto prop = evolve_moments_grid(ms0, m, times, MomentMethod::propagator);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const auto res = oracle::integrate_sector(b0, m, bops, times[i]);
        g_inv.state(res.state.rho);
        leakage = std::max(leakage, res.leakage);
        const auto ref = oracle::moments_from_sector(res.state, bops);
        boson = std::max({boson, diff(ode[i], ref), diff(prop[i], ref)});
        methods = std::max(methods, diff(ode[i], prop[i]));
      }
    }
  }
  const double wall = seconds_since(t0);
  Outcome o;
  o.checks.push_back(at_most("fermion n=3 max |moments - exact space|", fermion, 1e-8));
  o.checks.push_back(at_most("boson n=2 cutoff 6 max |moments - oracle|", boson, 1e-6));
  o.checks.push_back(below("boson leakage", leakage, 1e-8));
  o.checks.push_back(at_most("max |ode - propagator|", methods, 1e-8));
  o.checks.push_back(below("runtime [s]", wall, 120.0));
  return o;
}

Outcome criterion9(bool collected) {
  if (!collected) {
    (void)criterion2();
    (void)criterion3();
    (void)criterion4();
    (void)criterion8();
  }
  Outcome o;
  o.note = std::to_string(g_inv.states) + " states, " + std::to_string(g_inv.propagators) +
           " propagators, " + std::to_string(g_inv.semigroup_samples) + " semigroup pairs";
  o.checks.push_back(at_most("max trace error", g_inv.trace_error, 1e-9));
  o.checks.push_back(at_most("max -min eigenvalue", g_inv.negativity, 1e-8));
  o.checks.push_back(at_most("max ||V|| - 1", g_inv.norm_excess, 1e-9));
  o.checks.push_back(at_most("max |V(t+s) - V(t)V(s)|", g_inv.semigroup, 1e-8));
  return o;
}

Outcome criterion10() {
  const auto dir = scratch("c10");
  std::vector<std::string> reports;
  Outcome o;
  for (int run = 0; run < 3; ++run) {
    const auto out = dir / ("run" + std::to_string(run));
    const int rc = shell(g_opsq + " verify --seed 42 --out " + out.string());
    if (rc != 0) {
      o.checks.push_back({"verify exit status", double(rc), 0.0, false});
      return o;
    }
    reports.push_back(slurp(out / "verify_report.csv"));
  }
  int mismatches = 0;
  for (const auto& r : reports) mismatches += r != reports.front();
  o.note = "3 runs, " + std::to_string(reports.front().size()) + " bytes";
  o.checks.push_back({"non-empty report", double(reports.front().size()), 1.0, !reports.front().empty()});
  o.checks.push_back(at_most("reports differing from the first", mismatches, 0));
  return o;
}

Outcome run(int id, bool collected) {
  switch (id) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    case 8: return criterion8();
    case 9: return criterion9(collected);
    case 10: return criterion10();
  }
  throw Error("no criterion " + std::to_string(id));
}

void print(int id, const Outcome& o, double wall) {
  char head[160];
  std::snprintf(head, sizeof head, "criterion %2d: %s  (%.2f s%s%s)", id, o.pass() ? "PASS" : "FAIL",
                wall, o.note.empty() ? "" : ", ", o.note.c_str());
  std::cout << head << "\n";
  for (const auto& c : o.checks) {
    char line[200];
    std::snprintf(line, sizeof line, "    %-4s %-50s %.6g (limit %.3g)", c.pass ? "ok" : "FAIL",
                  c.what.c_str(), c.value, c.limit);
    std::cout << line << "\n";
  }
  std::cout.flush();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--opsq", g_opsq, "path to the opsq binary");
  CLI11_PARSE(app, argc, argv);

  std::vector<int> ids;
  if (only) ids.push_back(only);
  else for (int i = 1; i <= 10; ++i) ids.push_back(i);

  int failed = 0;
  for (int id : ids) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run(id, !only);
    } catch (const std::exception& e) {
      o.checks.push_back({std::string("exception: ") + e.what(), 0.0, 0.0, false});
    }
    print(id, o, seconds_since(t0));
    failed += !o.pass();
  }
  std::cout << "acceptance: " << ids.size() - failed << "/" << ids.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
