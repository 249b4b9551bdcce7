#pragma once

// JSON scenario configs. Matrices are row-major lists of [re, im] pairs
// (a bare number is read as a real entry); vectors are lists of entries.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "opsq/errors.hpp"
#include "opsq/model.hpp"
#include "opsq/moments.hpp"
#include "opsq/one_particle.hpp"
#include "opsq/random.hpp"
#include "opsq/reduction.hpp"

namespace opsq::cli {

using Json = nlohmann::json;

/// Malformed config text or structure (exit status 2).
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse"; }
};

namespace detail {

inline std::string where(const std::string& path) { return path.empty() ? "<root>" : path; }

inline void allow_keys(const Json& obj, const std::string& path, std::set<std::string> keys) {
  if (!obj.is_object()) throw ConfigError(where(path) + ": expected an object");
  for (const auto& [k, v] : obj.items())
    if (!keys.count(k)) throw ConfigError(where(path) + ": unknown key '" + k + "'");
}

inline const Json& need(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(where(path) + ": missing key '" + key + "'");
  return obj.at(key);
}

inline double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + ": non-finite number");
  return x;
}

inline std::int64_t integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<std::int64_t>();
}

inline std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

inline Complex complex_entry(const Json& v, const std::string& path) {
  if (v.is_number()) return {number(v, path), 0.0};
  if (v.is_array() && v.size() == 2) return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  throw ConfigError(path + ": expected [re, im] or a number");
}

inline ComplexVector complex_vector(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected a list");
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = complex_entry(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

inline ComplexMatrix complex_matrix(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path + ": expected a list of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = -1;
  ComplexMatrix out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = complex_vector(v[i], path + "[" + std::to_string(i) + "]");
    if (cols < 0) {
      cols = row.size();
      out.resize(rows, cols);
    } else if (row.size() != cols) {
      throw DimensionError(path + ": ragged matrix rows");
    }
    out.row(i) = row.transpose();
  }
  return out;
}

inline std::vector<int> index_list(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected a list of mode indices");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(static_cast<int>(integer(v[i], path + "[" + std::to_string(i) + "]")));
  return out;
}

}  // namespace detail

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int samples = 101;

  std::vector<double> points() const {
    std::vector<double> t(samples);
    for (int k = 0; k < samples; ++k)
      t[k] = k + 1 == samples ? t_end : t_start + (t_end - t_start) * k / (samples - 1);
    return t;
  }
};

inline TimeGrid parse_grid(const Json& j, const std::string& path) {
  detail::allow_keys(j, path, {"t_start", "t_end", "samples"});
  TimeGrid g;
  if (j.contains("t_start")) g.t_start = detail::number(j["t_start"], path + ".t_start");
  g.t_end = detail::number(detail::need(j, "t_end", path), path + ".t_end");
  g.samples = static_cast<int>(detail::integer(detail::need(j, "samples", path), path + ".samples"));
  if (g.samples < 2) throw ValidationError("time_grid", "need at least two samples");
  if (!(g.t_start >= 0.0)) throw ValidationError("time_grid", "t_start must be nonnegative");
  if (!(g.t_end > g.t_start)) throw ValidationError("time_grid", "grid must be strictly increasing");
  return g;
}

/// Supplies the seeded generator for randomized presets and insists on a seed.
class SeedSource {
 public:
  explicit SeedSource(std::optional<std::uint64_t> seed) : seed_(seed) {}
  rnd::Engine stream(std::uint64_t id, const std::string& what) const {
    if (!seed_) throw ValidationError("seed", what + " is randomized but no seed was given");
    return rnd::engine(*seed_, {id});
  }
  std::optional<std::uint64_t> seed() const { return seed_; }

 private:
  std::optional<std::uint64_t> seed_;
};

/// gamma(t) presets: a number, {"preset": "constant", "value"} or
/// {"preset": "sinusoidal", "gamma0", "amplitude", "omega"} = gamma0 + amplitude sin(omega t).
struct RateProfile {
  bool constant = true;
  double gamma0 = 1.0;
  double amplitude = 0.0;
  double omega = 0.0;

  double operator()(double t) const { return gamma0 + amplitude * std::sin(omega * t); }
};

inline RateProfile parse_rate(const Json& j, const std::string& path) {
  RateProfile r;
  if (j.is_number()) {
    r.gamma0 = detail::number(j, path);
  } else {
    const std::string preset = detail::text(detail::need(j, "preset", path), path + ".preset");
    if (preset == "constant") {
      detail::allow_keys(j, path, {"preset", "value"});
      r.gamma0 = detail::number(detail::need(j, "value", path), path + ".value");
    } else if (preset == "sinusoidal") {
      detail::allow_keys(j, path, {"preset", "gamma0", "amplitude", "omega"});
      r.constant = false;
      r.gamma0 = detail::number(detail::need(j, "gamma0", path), path + ".gamma0");
      r.amplitude = detail::number(detail::need(j, "amplitude", path), path + ".amplitude");
      r.omega = detail::number(detail::need(j, "omega", path), path + ".omega");
    } else {
      throw ConfigError(path + ".preset: unknown rate preset '" + preset + "'");
    }
  }
  if (r.gamma0 - std::abs(r.amplitude) < 0.0) {
    std::ostringstream os;
    os << path << ": decay rate can become negative (gamma0 = " << r.gamma0
       << ", amplitude = " << r.amplitude << ")";
    throw ValidationError("negative_rate", os.str());
  }
  return r;
}

namespace detail {

template <class T>
struct Table {
  std::vector<double> t;
  std::vector<T> value;

  const T& at(double s) const {
    std::size_t k = 0;
    while (k + 1 < t.size() && s >= t[k + 1]) ++k;
    return value[k];
  }
};

template <class T, class Read>
Table<T> parse_table(const Json& j, const std::string& path, const std::string& key, Read read) {
  if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected a non-empty list");
  Table<T> tab;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    allow_keys(j[i], p, {"t", key});
    const double t = number(need(j[i], "t", p), p + ".t");
    if (i == 0 && t != 0.0) throw ValidationError("table", p + ": first entry must start at t = 0");
    if (i > 0 && !(t > tab.t.back()))
      throw ValidationError("table", p + ": switch times must be strictly increasing");
    tab.t.push_back(t);
    tab.value.push_back(read(need(j[i], key, p), p + "." + key));
  }
  return tab;
}

inline std::vector<ComplexVector> vector_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected a list of vectors");
  std::vector<ComplexVector> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(complex_vector(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline void require_size(const ComplexMatrix& m, Eigen::Index n, const std::string& path) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << path << ": expected " << n << "x" << n << ", got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

inline void require_size(const std::vector<ComplexVector>& f, Eigen::Index n,
                         const std::string& path) {
  for (const auto& v : f)
    if (v.size() != n) throw DimensionError(path + ": decay vector length must equal n");
}

}  // namespace detail

/// Model section:
///   "hamiltonian": {"matrix": M} | {"preset": "zero"} | {"preset": "random", "scale"}
///                  | {"table": [{"t", "matrix"}, ...]}
///   "decay": {"vectors": [...]} | {"preset": "homogeneous", "gamma": rate}
///            | {"preset": "random", "count", "max_norm"} | {"table": [{"t", "vectors"}, ...]}
inline GKSLModel parse_model(const Json& j, Eigen::Index n, const SeedSource& seeds,
                             const std::string& path = "model") {
  detail::allow_keys(j, path, {"hamiltonian", "decay"});
  GKSLModel m;
  m.n = n;
  bool constant = true;
  std::set<double> breaks;

  const Json h = j.contains("hamiltonian") ? j["hamiltonian"] : Json::object();
  const std::string hp = path + ".hamiltonian";
  if (h.contains("table")) {
    detail::allow_keys(h, hp, {"table"});
    auto tab = detail::parse_table<ComplexMatrix>(h["table"], hp + ".table", "matrix",
                                                  detail::complex_matrix);
    for (std::size_t i = 0; i < tab.value.size(); ++i) detail::require_size(tab.value[i], n, hp);
    for (std::size_t i = 1; i < tab.t.size(); ++i) breaks.insert(tab.t[i]);
    constant = constant && tab.t.size() == 1;
    m.hamiltonian = [tab](double t) { return tab.at(t); };
  } else {
    ComplexMatrix hm = ComplexMatrix::Zero(n, n);
    if (h.contains("matrix")) {
      detail::allow_keys(h, hp, {"matrix"});
      hm = detail::complex_matrix(h["matrix"], hp + ".matrix");
      detail::require_size(hm, n, hp + ".matrix");
    } else if (h.contains("preset")) {
      const std::string preset = detail::text(h["preset"], hp + ".preset");
      if (preset == "random") {
        detail::allow_keys(h, hp, {"preset", "scale"});
        const double scale = h.contains("scale") ? detail::number(h["scale"], hp + ".scale") : 1.0;
        auto g = seeds.stream(1, hp);
        hm = rnd::hermitian(g, n, scale);
      } else if (preset == "zero") {
        detail::allow_keys(h, hp, {"preset"});
      } else {
        throw ConfigError(hp + ".preset: unknown preset '" + preset + "'");
      }
    } else {
      detail::allow_keys(h, hp, {});
    }
    m.hamiltonian = [hm](double) { return hm; };
  }

  const Json d = j.contains("decay") ? j["decay"] : Json::object();
  const std::string dp = path + ".decay";
  if (d.contains("table")) {
    detail::allow_keys(d, dp, {"table"});
    auto tab = detail::parse_table<std::vector<ComplexVector>>(d["table"], dp + ".table", "vectors",
                                                               detail::vector_list);
    for (const auto& f : tab.value) detail::require_size(f, n, dp);
    for (std::size_t i = 1; i < tab.t.size(); ++i) breaks.insert(tab.t[i]);
    constant = constant && tab.t.size() == 1;
    m.decay_vectors = [tab](double t) { return tab.at(t); };
  } else if (d.contains("vectors")) {
    detail::allow_keys(d, dp, {"vectors"});
    auto f = detail::vector_list(d["vectors"], dp + ".vectors");
    detail::require_size(f, n, dp);
    m.decay_vectors = [f](double) { return f; };
  } else if (d.contains("preset")) {
    const std::string preset = detail::text(d["preset"], dp + ".preset");
    if (preset == "homogeneous") {
      detail::allow_keys(d, dp, {"preset", "gamma"});
      const RateProfile rate = parse_rate(detail::need(d, "gamma", dp), dp + ".gamma");
      constant = constant && rate.constant;
      const auto hom = GKSLModel::homogeneous(n, rate);
      m.decay_vectors = hom.decay_vectors;
    } else if (preset == "random") {
      detail::allow_keys(d, dp, {"preset", "count", "max_norm"});
      const int count =
          d.contains("count") ? static_cast<int>(detail::integer(d["count"], dp + ".count")) : 3;
      if (count < 0) throw ValidationError("decay_count", "count must be nonnegative");
      const double norm = d.contains("max_norm") ? detail::number(d["max_norm"], dp + ".max_norm") : 1.0;
      auto g = seeds.stream(2, dp);
      auto f = rnd::decay_vectors(g, n, count, norm);
      m.decay_vectors = [f](double) { return f; };
    } else {
      throw ConfigError(dp + ".preset: unknown preset '" + preset + "'");
    }
  } else {
    detail::allow_keys(d, dp, {});
    m.decay_vectors = [](double) { return std::vector<ComplexVector>{}; };
  }

  m.time_independent = constant;
  m.breakpoints.assign(breaks.begin(), breaks.end());
  // Assert Hermiticity and accretivity up front, before any integration.
  (void)accretive_matrix(m, 0.0);
  for (double b : m.breakpoints) (void)accretive_matrix(m, b);
  return m;
}

/// Initial one-particle state:
///   {"preset": "vacuum" | "uniform" | "random"} | {"preset": "excited", "mode": l}
///   | {"amplitudes": [...]} (pure, over 0..n) | {"rho00", "psi", "R"}
inline OneParticleState parse_state(const Json& j, Eigen::Index n, const SeedSource& seeds,
                                    const std::string& path = "initial_state") {
  if (j.contains("preset")) {
    const std::string preset = detail::text(j["preset"], path + ".preset");
    if (preset == "excited") {
      detail::allow_keys(j, path, {"preset", "mode"});
      const auto l = detail::integer(detail::need(j, "mode", path), path + ".mode");
      if (l < 1 || l > n) throw IndexError(path + ".mode: mode index outside 1..n");
      ComplexMatrix r = ComplexMatrix::Zero(n, n);
      r(l - 1, l - 1) = 1.0;
      return OneParticleState::strict(r);
    }
    detail::allow_keys(j, path, {"preset"});
    if (preset == "vacuum") return OneParticleState::vacuum(n);
    if (preset == "uniform")
      return OneParticleState::strict(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
    if (preset == "random") {
      auto g = seeds.stream(3, path);
      return rnd::state(g, n);
    }
    throw ConfigError(path + ".preset: unknown preset '" + preset + "'");
  }
  if (j.contains("amplitudes")) {
    detail::allow_keys(j, path, {"amplitudes"});
    const ComplexVector amp = detail::complex_vector(j["amplitudes"], path + ".amplitudes");
    if (amp.size() != n + 1) throw DimensionError(path + ".amplitudes: expected n + 1 entries");
    return OneParticlePureState::from_amplitudes(amp).density();
  }
  detail::allow_keys(j, path, {"rho00", "psi", "R"});
  const double rho00 = detail::number(detail::need(j, "rho00", path), path + ".rho00");
  const ComplexVector psi = j.contains("psi") ? detail::complex_vector(j["psi"], path + ".psi")
                                              : ComplexVector(ComplexVector::Zero(n));
  const ComplexMatrix r = detail::complex_matrix(detail::need(j, "R", path), path + ".R");
  detail::require_size(r, n, path + ".R");
  if (psi.size() != n) throw DimensionError(path + ".psi: expected n entries");
  return make_state(rho00, psi, r);
}

inline Statistics parse_statistics(const Json& j, const std::string& path) {
  const std::string s = detail::text(j, path);
  if (s == "boson") return Statistics::boson;
  if (s == "fermion") return Statistics::fermion;
  throw ConfigError(path + ": statistics must be 'boson' or 'fermion'");
}

/// Initial moments: {"preset": "vacuum"} | {"preset": "fock", "mode": l}
///   | {"preset": "coherent", "alpha": [...]} (bosons) | {"m", "Y", "Z"}
inline MomentState parse_moments(const Json& j, Statistics stats, Eigen::Index n,
                                 const std::string& path = "initial_moments") {
  const ComplexMatrix zero = ComplexMatrix::Zero(n, n);
  if (j.contains("preset")) {
    const std::string preset = detail::text(j["preset"], path + ".preset");
    if (preset == "vacuum") {
      detail::allow_keys(j, path, {"preset"});
      return MomentState::vacuum(stats, n);
    }
    if (preset == "fock") {
      detail::allow_keys(j, path, {"preset", "mode"});
      const auto l = detail::integer(detail::need(j, "mode", path), path + ".mode");
      if (l < 1 || l > n) throw IndexError(path + ".mode: mode index outside 1..n");
      ComplexMatrix y = zero;
      y(l - 1, l - 1) = 1.0;
      return MomentState::make(stats, ComplexVector::Zero(n), y, zero);
    }
    if (preset == "coherent") {
      detail::allow_keys(j, path, {"preset", "alpha"});
      if (stats != Statistics::boson)
        throw ValidationError("superselection", "coherent states need boson statistics");
      const ComplexVector alpha = detail::complex_vector(detail::need(j, "alpha", path), path + ".alpha");
      if (alpha.size() != n) throw DimensionError(path + ".alpha: expected n entries");
      return MomentState::make(stats, alpha, zero, zero);
    }
    throw ConfigError(path + ".preset: unknown preset '" + preset + "'");
  }
  detail::allow_keys(j, path, {"m", "Y", "Z"});
  const ComplexVector m = j.contains("m") ? detail::complex_vector(j["m"], path + ".m")
                                          : ComplexVector(ComplexVector::Zero(n));
  const ComplexMatrix y = detail::complex_matrix(detail::need(j, "Y", path), path + ".Y");
  const ComplexMatrix z = j.contains("Z") ? detail::complex_matrix(j["Z"], path + ".Z") : zero;
  return MomentState::make(stats, m, y, z);
}

inline IndexSet parse_index_set(const Json& j, Eigen::Index n, const std::string& path) {
  const IndexSet s = IndexSet::make(detail::index_list(j, path));
  s.check_within(n);
  return s;
}

/// Reads and parses a config file; JSON syntax errors become ConfigError.
inline Json load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace opsq::cli
