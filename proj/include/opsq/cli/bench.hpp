#pragma once

// Wall-clock comparison of the propagator path against full integrations.

#include <chrono>
#include <string>
#include <vector>

#include "opsq/cli/config.hpp"
#include "opsq/cli/output.hpp"
#include "opsq/dynamics.hpp"
#include "opsq/oracle.hpp"
#include "opsq/random.hpp"

namespace opsq::cli {

struct BenchOptions {
  std::vector<int> sizes{2, 4, 6};
  double t = 1.0;
  /// Largest full space for which the second-quantized path is timed.
  std::int64_t max_full_dim = 64;
};

inline BenchOptions parse_bench(const Json& config) {
  detail::allow_keys(config, "", {"scenario", "seed", "sizes", "t", "max_full_dim"});
  BenchOptions opt;
  if (config.contains("sizes")) {
    opt.sizes.clear();
    const Json& s = config["sizes"];
    if (!s.is_array() || s.empty()) throw ConfigError("sizes: expected a non-empty list");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto n = detail::integer(s[i], "sizes[" + std::to_string(i) + "]");
      if (n < 1 || n > 64) throw ValidationError("mode_count", "bench sizes must lie in 1..64");
      opt.sizes.push_back(static_cast<int>(n));
    }
  }
  if (config.contains("t")) opt.t = detail::number(config["t"], "t");
  if (!(opt.t > 0.0)) throw ValidationError("time", "bench time must be positive");
  if (config.contains("max_full_dim"))
    opt.max_full_dim = detail::integer(config["max_full_dim"], "max_full_dim");
  return opt;
}

inline Table run_bench(std::uint64_t seed, const BenchOptions& opt) {
  Table table({"n", "method", "wall_time"});
  auto timed = [](auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  for (int n : opt.sizes) {
    auto g = rnd::engine(seed, {static_cast<std::uint64_t>(n), 7});
    const auto model = rnd::model(g, n);
    const auto s0 = rnd::state(g, n);
    auto row = [&](const char* method, double secs) {
      table.add_row({std::to_string(n), method, format_number(secs)});
    };
    row("propagator_exponential",
        timed([&] { (void)evolve_state(s0, model, opt.t, {}, PropagationMethod::exponential); }));
    row("propagator_ode", timed([&] { (void)evolve_state(s0, model, opt.t, {}, PropagationMethod::ode); }));
    row("full_liouvillian", timed([&] { (void)integrate_direct(s0, model, opt.t); }));
    if (n <= 20 && (std::int64_t{1} << n) <= opt.max_full_dim) {
      const auto ops = oracle::build_operators(oracle::ModeKind::qubit, n);
      const auto full = oracle::embed_density(s0);
      row("second_quantized",
          timed([&] { (void)oracle::integrate_second_quantized(full, model, ops, opt.t); }));
    }
  }
  return table;
}

}  // namespace opsq::cli
