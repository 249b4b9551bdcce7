#pragma once

// simulate / moments / info / bell-curve scenario runners.

#include <cmath>
#include <string>
#include <vector>

#include "opsq/cli/config.hpp"
#include "opsq/cli/output.hpp"
#include "opsq/dynamics.hpp"
#include "opsq/information.hpp"
#include "opsq/moments.hpp"

namespace opsq::cli {

/// One CSV produced by a scenario, plus the columns used for --svg.
struct ScenarioOutput {
  std::string file;
  Table table;
  std::string plot_x;
  std::string plot_y;
};

namespace detail {

inline Eigen::Index mode_count(const Json& config) {
  const auto n = integer(need(config, "n", ""), "n");
  if (n < 1) throw ValidationError("mode_count", "n must be at least 1");
  if (n > 64) throw ValidationError("mode_count", "n above 64 is not supported");
  return static_cast<Eigen::Index>(n);
}

inline Json section(const Json& config, const std::string& key) {
  return config.contains(key) ? config[key] : Json::object();
}

inline double max_or_zero(double x) { return std::max(x, 0.0); }

}  // namespace detail

inline ScenarioOutput run_simulate(const Json& config, const SeedSource& seeds) {
  detail::allow_keys(config, "", {"scenario", "seed", "n", "time", "model", "initial_state"});
  const auto n = detail::mode_count(config);
  const TimeGrid grid = parse_grid(detail::need(config, "time", ""), "time");
  const GKSLModel model = parse_model(detail::section(config, "model"), n, seeds);
  const OneParticleState s0 =
      parse_state(detail::need(config, "initial_state", ""), n, seeds);

  Table table({"t", "rho00", "trR", "psi_norm", "min_eig", "V_norm"});
  const auto times = grid.points();
  const auto props = propagate_grid(model, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    OneParticleState s = s0;
    try {
      s = apply_propagator(s0, props[k]);
    } catch (const ValidationError& e) {
      throw NumericalError("evolved state left the state space at t = " +
                           format_number(times[k]) + " (" + e.what() + ")");
    }
    const ComplexMatrix rho = s.assemble();
    const double tr_err = std::abs(rho.trace().real() - 1.0);
    if (tr_err > 1e-9)
      throw NumericalError("trace error " + format_number(tr_err) + " at t = " + format_number(times[k]));
    table.add_numbers({times[k], s.rho00(), s.r().trace().real(), s.psi().norm(),
                       min_eigenvalue(rho), operator_norm(props[k].v)});
  }
  return {"simulate.csv", std::move(table), "t", "rho00"};
}

inline ScenarioOutput run_moments(const Json& config, const SeedSource& seeds) {
  detail::allow_keys(config, "", {"scenario", "seed", "n", "time", "model", "statistics",
                                  "initial_moments", "method"});
  const auto n = detail::mode_count(config);
  const TimeGrid grid = parse_grid(detail::need(config, "time", ""), "time");
  const GKSLModel model = parse_model(detail::section(config, "model"), n, seeds);
  const Statistics stats = parse_statistics(detail::need(config, "statistics", ""), "statistics");
  const MomentState ms0 =
      parse_moments(detail::need(config, "initial_moments", ""), stats, n);
  MomentMethod method = MomentMethod::propagator;
  if (config.contains("method")) {
    const std::string m = detail::text(config["method"], "method");
    if (m == "ode") method = MomentMethod::ode;
    else if (m != "propagator") throw ConfigError("method: expected 'ode' or 'propagator'");
  }

  std::vector<std::string> header{"t", "occupation"};
  const bool boson = stats == Statistics::boson;
  auto name = [](const std::string& base, Eigen::Index i, Eigen::Index j = -1) {
    return base + std::to_string(i + 1) + (j >= 0 ? "_" + std::to_string(j + 1) : "");
  };
  if (boson)
    for (Eigen::Index i = 0; i < n; ++i)
      for (const char* part : {"_re", "_im"}) header.push_back(name("m", i) + part);
  for (const char* block : {"Y", "Z"})
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (const char* part : {"_re", "_im"}) header.push_back(name(block, i, j) + part);

  Table table(header);
  const auto times = grid.points();
  const auto states = evolve_moments_grid(ms0, model, times, method);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const MomentState& ms = states[k];
    std::vector<double> row{times[k], ms.y().trace().real()};
    if (boson)
      for (Eigen::Index i = 0; i < n; ++i) row.insert(row.end(), {ms.m()[i].real(), ms.m()[i].imag()});
    for (const ComplexMatrix* b : {&ms.y(), &ms.z()})
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) row.insert(row.end(), {(*b)(i, j).real(), (*b)(i, j).imag()});
    table.add_numbers(row);
  }
  return {"moments.csv", std::move(table), "t", "occupation"};
}

inline ScenarioOutput run_info(const Json& config, const SeedSource& seeds) {
  detail::allow_keys(config, "", {"scenario", "seed", "n", "time", "model", "initial_state",
                                  "partition"});
  const auto n = detail::mode_count(config);
  const TimeGrid grid = parse_grid(detail::need(config, "time", ""), "time");
  const GKSLModel model = parse_model(detail::section(config, "model"), n, seeds);
  const OneParticleState s0 = parse_state(detail::need(config, "initial_state", ""), n, seeds);
  const Json& part = detail::need(config, "partition", "");
  detail::allow_keys(part, "partition", {"I1", "I2"});
  const IndexSet i1 = parse_index_set(detail::need(part, "I1", "partition"), n, "partition.I1");
  const IndexSet i2 = part.contains("I2") ? parse_index_set(part["I2"], n, "partition.I2")
                                          : i1.complement(n);

  Table table({"t", "total", "quantum", "classical", "p0", "p1", "p2"});
  const auto times = grid.points();
  const auto props = propagate_grid(model, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto rep = mutual_information(apply_propagator(s0, props[k]), i1, i2);
    table.add_numbers({times[k], rep.total, rep.quantum_term, rep.classical_term, rep.pi[0],
                       rep.pi[1], rep.pi[2]});
  }
  return {"info.csv", std::move(table), "t", "total"};
}

/// Defaults: gamma = 1, 200 samples on [0, 6].
inline ScenarioOutput run_bell_curve(const Json& config) {
  detail::allow_keys(config, "", {"scenario", "seed", "gamma", "time"});
  const double gamma = config.contains("gamma") ? detail::number(config["gamma"], "gamma") : 1.0;
  TimeGrid grid{0.0, 6.0, 200};
  if (config.contains("time")) grid = parse_grid(config["time"], "time");
  Table table({"t", "mutual_information"});
  for (const auto& [t, value] : markov_decay_curve(gamma, grid.points())) table.add_numbers({t, value});
  return {"bell_curve.csv", std::move(table), "t", "mutual_information"};
}

}  // namespace opsq::cli
