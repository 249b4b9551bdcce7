#pragma once

// Command-line front end: subcommands, flags and exit statuses.
//   0 success, 1 verify found failing checks, 2 parse, 3 validation, 4 numerical.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "opsq/cli/bench.hpp"
#include "opsq/cli/config.hpp"
#include "opsq/cli/output.hpp"
#include "opsq/cli/scenarios.hpp"
#include "opsq/cli/verify.hpp"

namespace opsq::cli {

enum ExitStatus { kOk = 0, kChecksFailed = 1, kParseError = 2, kValidationError = 3, kNumericalError = 4 };

namespace detail {

inline std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

inline void report_error(std::ostream& err, const std::string& kind, const std::string& reason,
                         const std::string& invariant = "") {
  err << "opsq: error kind=" << kind;
  if (!invariant.empty()) err << " invariant=" << invariant;
  err << " reason=\"" << one_line(reason) << "\"\n";
}

}  // namespace detail

struct Invocation {
  std::string command;
  std::string info_mode;
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool svg = false;
};

inline int execute(const Invocation& inv, std::ostream& out) {
  Json config = inv.config_path.empty() ? Json::object() : load_config(inv.config_path);
  if (!config.is_object()) throw ConfigError("config root must be an object");
  std::optional<std::uint64_t> seed = inv.seed;
  if (!seed && config.contains("seed")) {
    const auto s = detail::integer(config["seed"], "seed");
    if (s < 0) throw ValidationError("seed", "seed must be nonnegative");
    seed = static_cast<std::uint64_t>(s);
  }
  std::string command = inv.command;
  if (command == "info" && inv.info_mode == "bell-curve") command = "bell-curve";
  if (config.contains("scenario")) {
    const std::string declared = detail::text(config["scenario"], "scenario");
    if (declared != command)
      throw ConfigError("config declares scenario '" + declared + "' but subcommand is '" + command + "'");
  }
  const SeedSource seeds(seed);
  const Provenance prov{config_hash(config), seed};
  const std::filesystem::path dir(inv.out_dir);

  auto emit = [&](const std::string& file, const Table& table, const std::string& x,
                  const std::string& y) {
    write_text(dir / file, table.render(prov.comment()));
    out << "wrote " << (dir / file).string() << " (" << table.rows().size() << " rows)\n";
    if (inv.svg && !x.empty()) {
      const auto svg_file = std::filesystem::path(file).replace_extension(".svg");
      write_text(dir / svg_file, render_svg(table, x, y, y + " vs " + x));
      out << "wrote " << (dir / svg_file).string() << "\n";
    }
  };

  if (command == "verify") {
    const auto opt = parse_verify(config, seeds);
    if (!seed) throw ValidationError("seed", "verify needs --seed or a config seed");
    const auto rep = run_verify(*seed, opt);
    const Table table = rep.table();
    emit("verify_report.csv", table, "", "");
    std::size_t passed = 0;
    for (const auto& r : table.rows()) passed += r.back() == "PASS";
    out << "verify: " << passed << "/" << table.rows().size() << " checks passed\n";
    return rep.all_pass() ? kOk : kChecksFailed;
  }
  if (command == "bench") {
    const auto opt = parse_bench(config);
    if (!seed) throw ValidationError("seed", "bench draws random models and needs a seed");
    emit("bench.csv", run_bench(*seed, opt), "", "");
    return kOk;
  }
  ScenarioOutput res = [&]() -> ScenarioOutput {
    if (command == "bell-curve") return run_bell_curve(config);
    if (inv.config_path.empty()) throw ConfigError(command + " needs --config");
    if (command == "simulate") return run_simulate(config, seeds);
    if (command == "moments") return run_moments(config, seeds);
    if (command == "info") return run_info(config, seeds);
    throw ConfigError("unknown command " + command);
  }();
  emit(res.file, res.table, res.plot_x, res.plot_y);
  return kOk;
}

/// Parses argv, runs, and maps every failure to an exit status and a
/// single stderr line.
inline int main_entry(int argc, char** argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  CLI::App app{"one-particle open-system toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  app.fallthrough();
  Invocation inv;
  std::uint64_t seed_value = 0;
  app.add_option("--config", inv.config_path, "JSON scenario config")->check(CLI::ExistingFile);
  app.add_option("--out", inv.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed_value, "random seed");
  app.add_flag("--svg", inv.svg, "also write an SVG line chart");

  app.add_subcommand("simulate", "one-particle dynamics time series");
  app.add_subcommand("moments", "first and second moment dynamics");
  auto* info = app.add_subcommand("info", "mutual information time series ('info bell-curve' for the decay curve)");
  info->add_option("mode", inv.info_mode, "optional: bell-curve")->check(CLI::IsMember({"bell-curve"}));
  app.add_subcommand("bell-curve", "mutual information of a particle decaying between two sites");
  app.add_subcommand("verify", "oracle cross-check report");
  app.add_subcommand("bench", "propagator vs full-integration timings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    detail::report_error(err, "parse", e.what());
    return kParseError;
  }
  inv.command = app.get_subcommands().front()->get_name();
  if (*seed_opt) inv.seed = seed_value;

  try {
    return execute(inv, out);
  } catch (const ConfigError& e) {
    detail::report_error(err, e.kind(), e.what());
    return kParseError;
  } catch (const Json::exception& e) {
    detail::report_error(err, "parse", e.what());
    return kParseError;
  } catch (const ValidationError& e) {
    detail::report_error(err, e.kind(), e.what(), e.invariant());
    return kValidationError;
  } catch (const DimensionError& e) {
    detail::report_error(err, e.kind(), e.what());
    return kValidationError;
  } catch (const TruncationError& e) {
    detail::report_error(err, "truncation", e.what());
    return kNumericalError;
  } catch (const NumericalError& e) {
    detail::report_error(err, e.kind(), e.what());
    return kNumericalError;
  } catch (const DomainError& e) {
    detail::report_error(err, e.kind(), e.what());
    return kNumericalError;
  } catch (const std::exception& e) {
    detail::report_error(err, "io", e.what());
    return kNumericalError;
  }
}

}  // namespace opsq::cli
