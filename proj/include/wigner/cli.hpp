#pragma once

// Run configuration and the command implementations behind the wigner CLI.
// Argument parsing lives in tools/wigner_cli.cpp; everything here takes an
// already-loaded RunConfig and an output directory.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wigner/dynamics.hpp"
#include "wigner/error.hpp"
#include "wigner/grid.hpp"
#include "wigner/husimi.hpp"
#include "wigner/io.hpp"
#include "wigner/moyal.hpp"
#include "wigner/negativity.hpp"
#include "wigner/transforms.hpp"

namespace wigner::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericAbort = 3 };

/// Parsed key = value configuration. Values are type-checked on load; the
/// commands check the combinations they need before computing anything.
class RunConfig {
 public:
  static RunConfig load(std::istream& in, const std::filesystem::path& base_dir = ".") {
    RunConfig rc;
    rc.base_dir_ = base_dir;
    rc.kv_ = io::parse_key_values(in);
    for (const auto& [key, entry] : rc.kv_.entries) {
      const auto it = known_keys().find(key);
      if (it == known_keys().end()) throw ConfigError(entry.line, "unknown key '" + key + "'");
      rc.check_type(key, it->second);
    }
    return rc;
  }

  static RunConfig load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config '" + path.string() + "'");
    return load(in, path.parent_path());
  }

  static RunConfig empty() { return RunConfig{}; }

  bool has(const std::string& key) const { return kv_.has(key); }
  std::size_t line(const std::string& key) const { return has(key) ? kv_.entries.at(key).line : 0; }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) return require(fallback, key);
    return io::parse_double(kv_.entries.at(key).value, key);
  }

  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) const {
    if (!has(key)) return require(fallback, key);
    return std::stol(kv_.entries.at(key).value);
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) return require(fallback, key);
    return kv_.entries.at(key).value;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    return kv_.entries.at(key).value == "true";
  }

  std::filesystem::path path(const std::string& key) const {
    const std::filesystem::path p = text(key);
    return p.is_absolute() ? p : base_dir_ / p;
  }

  /// Runs `f`, re-raising library errors as config errors pinned to `key`.
  template <class F>
  auto checked(const std::string& key, F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const IoError& e) {
      throw ConfigError(line(key), key + ": " + e.what());
    } catch (const ParseError& e) {
      throw ConfigError(line(key), key + ": " + e.what());
    } catch (const NumericAbort&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(line(key), key + ": " + e.what());
    }
  }

 private:
  enum class Kind { number, integer, text, boolean, poly };

  static const std::map<std::string, Kind>& known_keys() {
    static const std::map<std::string, Kind> keys{
        {"hbar", Kind::number},
        {"grid.q_min", Kind::number},
        {"grid.q_step", Kind::number},
        {"grid.count", Kind::integer},
        {"state.kind", Kind::text},
        {"state.n", Kind::integer},
        {"state.center_q", Kind::number},
        {"state.center_p", Kind::number},
        {"state.width_b", Kind::number},
        {"state.a_re", Kind::number},
        {"state.a_im", Kind::number},
        {"state.b_re", Kind::number},
        {"state.b_im", Kind::number},
        {"state.gap", Kind::number},
        {"state.width", Kind::number},
        {"state.file", Kind::text},
        {"hamiltonian.mass", Kind::number},
        {"hamiltonian.potential", Kind::poly},
        {"hamiltonian.potential_file", Kind::text},
        {"evolve.dt", Kind::number},
        {"evolve.steps", Kind::integer},
        {"evolve.method", Kind::text},
        {"evolve.lambda_max", Kind::integer},
        {"evolve.stride", Kind::integer},
        {"evolve.compare", Kind::boolean},
        {"husimi.width_b", Kind::number},
        {"expect.observable", Kind::poly},
        {"demo.gap", Kind::number},
        {"demo.width", Kind::number},
        {"star.a", Kind::poly},
        {"star.b", Kind::poly},
    };
    return keys;
  }

  void check_type(const std::string& key, Kind kind) const {
    const auto& e = kv_.entries.at(key);
    switch (kind) {
      case Kind::number: {
        double v = 0.0;
        try {
          v = io::parse_double(e.value, key);
        } catch (const IoError&) {
          throw ConfigError(e.line, key + ": expected a number, got '" + e.value + "'");
        }
        if (!std::isfinite(v)) throw ConfigError(e.line, key + ": must be finite");
        break;
      }
      case Kind::integer: {
        long v = 0;
        const auto r = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
        if (r.ec != std::errc() || r.ptr != e.value.data() + e.value.size())
          throw ConfigError(e.line, key + ": expected an integer, got '" + e.value + "'");
        break;
      }
      case Kind::boolean:
        if (e.value != "true" && e.value != "false")
          throw ConfigError(e.line, key + ": expected true or false, got '" + e.value + "'");
        break;
      case Kind::poly:
        try {
          (void)io::parse_poly(e.value);
        } catch (const ParseError& err) {
          throw ConfigError(e.line, key + ": " + err.what());
        }
        break;
      case Kind::text:
        break;
    }
  }

  template <class T>
  static T require(const std::optional<T>& fallback, const std::string& key) {
    if (!fallback) throw ConfigError(0, "missing required key '" + key + "'");
    return *fallback;
  }

  io::KeyValues kv_;
  std::filesystem::path base_dir_ = ".";
};

// ---------------------------------------------------------------------------
// Building library objects from a RunConfig.

inline Config make_config(const RunConfig& rc) {
  return rc.checked("hbar", [&] {
    Config c;
    c.hbar = rc.number("hbar", 1.0);
    c.validate();
    return c;
  });
}

/// Defaults to 256 points on [-8, 8).
inline AxisGrid make_grid(const RunConfig& rc) {
  const long count = rc.integer("grid.count", 256);
  if (count < 0) throw ConfigError(rc.line("grid.count"), "grid.count must be positive");
  return rc.checked("grid.count", [&] {
    return AxisGrid(rc.number("grid.q_min", -8.0), rc.number("grid.q_step", 1.0 / 16.0),
                    static_cast<std::size_t>(count));
  });
}

inline GaussianPacketSpec packet_spec(const RunConfig& rc, const std::string& width_key) {
  GaussianPacketSpec s;
  s.center_q = rc.number("state.center_q", 0.0);
  s.center_p = rc.number("state.center_p", 0.0);
  s.width_b = rc.number(width_key, std::sqrt(0.5));
  rc.checked(width_key, [&] {
    s.validate();
    return 0;
  });
  return s;
}

inline WaveFunction make_state(const RunConfig& rc, const AxisGrid& grid, const Config& config) {
  const std::string kind = rc.text("state.kind", std::string("ho"));
  if (kind == "ho") {
    const long n = rc.integer("state.n", 0);
    if (n < 0) throw ConfigError(rc.line("state.n"), "state.n must be non-negative");
    return rc.checked("state.n", [&] { return ho_eigenstate(static_cast<unsigned>(n), grid, config); });
  }
  if (kind == "gaussian") {
    const GaussianPacketSpec spec = packet_spec(rc, "state.width_b");
    return rc.checked("state.kind", [&] { return minimum_uncertainty_packet(spec, grid, config); });
  }
  if (kind == "two_interval") {
    const Complex a(rc.number("state.a_re", std::sqrt(0.5)), rc.number("state.a_im", 0.0));
    const Complex b(rc.number("state.b_re", std::sqrt(0.5)), rc.number("state.b_im", 0.0));
    const double gap = rc.number("state.gap", 2.0);
    const double width = rc.number("state.width", 1.0);
    return rc.checked("state.kind", [&] { return two_interval_state(a, b, gap, width, grid, config); });
  }
  if (kind == "file") {
    const auto path = rc.path("state.file");
    return rc.checked("state.file", [&] {
      std::ifstream in(path);
      if (!in) throw IoError("cannot open '" + path.string() + "'");
      io::WaveFunctionFile f = io::read_wavefunction(in);
      if (f.hbar != config.hbar) throw Error("file hbar differs from config hbar");
      if (!(f.psi.grid() == grid)) throw Error("file grid differs from the configured grid");
      return normalize(f.psi);
    });
  }
  throw ConfigError(rc.line("state.kind"),
                    "state.kind must be one of ho, gaussian, two_interval, file; got '" + kind + "'");
}

inline Hamiltonian make_hamiltonian(const RunConfig& rc, const AxisGrid& grid) {
  const double mass = rc.number("hamiltonian.mass", 1.0);
  if (rc.has("hamiltonian.potential") && rc.has("hamiltonian.potential_file"))
    throw ConfigError(rc.line("hamiltonian.potential_file"),
                      "set only one of hamiltonian.potential and hamiltonian.potential_file");
  Potential v = Potential::zero();
  if (rc.has("hamiltonian.potential")) {
    v = rc.checked("hamiltonian.potential", [&] {
      const PolySymbol poly = io::parse_poly(rc.text("hamiltonian.potential"));
      std::vector<double> coefficients;
      for (const auto& [m, c] : poly.terms()) {
        if (m.second != 0) throw Error("potential must not depend on p");
        if (c.imag() != 0.0) throw Error("potential coefficients must be real");
        if (coefficients.size() <= static_cast<std::size_t>(m.first)) coefficients.resize(m.first + 1, 0.0);
        coefficients[m.first] = c.real();
      }
      return Potential::polynomial(std::move(coefficients));
    });
  } else if (rc.has("hamiltonian.potential_file")) {
    const auto path = rc.path("hamiltonian.potential_file");
    v = rc.checked("hamiltonian.potential_file", [&] {
      std::ifstream in(path);
      if (!in) throw IoError("cannot open '" + path.string() + "'");
      io::PotentialFile f = io::read_potential(in);
      if (!(f.grid == grid)) throw Error("table grid differs from the configured grid");
      return Potential::tabulated(f.grid, std::move(f.values));
    });
  }
  return rc.checked("hamiltonian.mass", [&] { return Hamiltonian(mass, v); });
}

// ---------------------------------------------------------------------------
// Output helpers.

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    body(out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
  }

 private:
  std::filesystem::path dir_;
};

/// Ordered `key = value` lines with fixed number formatting.
class Summary {
 public:
  void add(const std::string& key, double v) { lines_.push_back(key + " = " + io::format_fixed(v)); }
  void add(const std::string& key, const std::string& v) { lines_.push_back(key + " = " + v); }
  void add_count(const std::string& key, std::size_t v) { lines_.push_back(key + " = " + std::to_string(v)); }
  void add_flag(const std::string& key, bool v) { lines_.push_back(key + " = " + (v ? "true" : "false")); }

  void write(std::ostream& out) const {
    for (const auto& l : lines_) out << l << '\n';
  }

 private:
  std::vector<std::string> lines_;
};

inline double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::string frame_name(std::size_t step) {
  std::string digits = std::to_string(step);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return "frame_" + digits + ".dat";
}

// ---------------------------------------------------------------------------
// Commands. Each validates everything it needs before computing.

inline int cmd_wigner(const RunConfig& rc, const std::filesystem::path& out_dir, std::ostream& out) {
  const Config config = make_config(rc);
  const AxisGrid grid = make_grid(rc);
  const WaveFunction psi = make_state(rc, grid, config);

  const WignerFunction w = wigner_from_wavefunction(psi, config);
  const auto report = positivity_report(w.values());
  const std::size_t n = grid.count();
  Summary s;
  s.add("min_value", report.min_value);
  s.add("min_q", w.grid().q_axis().point(report.min_location / n));
  s.add("min_p", w.grid().p_axis().point(report.min_location % n));
  s.add("integral", w.integral());
  s.add("negativity_volume", negativity_volume(w));
  s.add_flag("all_positive", report.negative_fraction == 0.0);

  const OutputDir dir(out_dir);
  dir.write("wigner.dat", [&](std::ostream& o) { io::write_grid(o, w.grid(), w.values()); });
  dir.write("marginal_q.dat", [&](std::ostream& o) { io::write_table(o, w.grid().q_axis(), marginal_position(w)); });
  dir.write("marginal_p.dat", [&](std::ostream& o) { io::write_table(o, w.grid().p_axis(), marginal_momentum(w)); });
  dir.write("summary.txt", [&](std::ostream& o) { s.write(o); });
  s.write(out);
  return kOk;
}

inline EvolveMethod parse_method(const RunConfig& rc) {
  const std::string m = rc.text("evolve.method", std::string("split_exact"));
  if (m == "split_exact") return EvolveMethod::split_exact;
  if (m == "series_euler") return EvolveMethod::series_euler;
  if (m == "classical") return EvolveMethod::classical;
  throw ConfigError(rc.line("evolve.method"),
                    "evolve.method must be split_exact, series_euler or classical; got '" + m + "'");
}

inline const char* method_name(EvolveMethod m) {
  switch (m) {
    case EvolveMethod::split_exact: return "split_exact";
    case EvolveMethod::series_euler: return "series_euler";
    case EvolveMethod::classical: return "classical";
  }
  return "?";
}

inline int cmd_evolve(const RunConfig& rc, const std::filesystem::path& out_dir, std::ostream& out) {
  const Config config = make_config(rc);
  const AxisGrid grid = make_grid(rc);
  const WaveFunction psi = make_state(rc, grid, config);
  const Hamiltonian h = make_hamiltonian(rc, grid);

  const double dt = rc.number("evolve.dt");
  if (!(dt > 0.0)) throw ConfigError(rc.line("evolve.dt"), "evolve.dt must be positive");
  const long steps = rc.integer("evolve.steps");
  if (steps < 1) throw ConfigError(rc.line("evolve.steps"), "evolve.steps must be >= 1");
  const long stride = rc.integer("evolve.stride", steps);
  if (stride < 1) throw ConfigError(rc.line("evolve.stride"), "evolve.stride must be >= 1");
  const EvolveMethod method = parse_method(rc);
  EvolveOptions options;
  options.stride = static_cast<std::size_t>(stride);
  options.lambda_max = static_cast<int>(rc.integer("evolve.lambda_max", 0));
  if (options.lambda_max != 0 && (options.lambda_max < 1 || options.lambda_max % 2 == 0))
    throw ConfigError(rc.line("evolve.lambda_max"), "evolve.lambda_max must be odd and >= 1");
  const bool compare = rc.flag("evolve.compare", false);
  if (compare && !h.potential.is_polynomial() && options.lambda_max == 0)
    throw ConfigError(rc.line("evolve.compare"), "method comparison with a tabulated potential needs evolve.lambda_max");

  const WignerFunction w0 = wigner_from_wavefunction(psi, config);
  const Trajectory traj = evolve(w0, h, dt, static_cast<std::size_t>(steps), method, options);
  const PhaseSymbol energy = hamiltonian_symbol(h, w0.grid());
  const OutputDir dir(out_dir);
  const double e0 = expectation(w0, energy);
  double norm_drift = 0.0;
  double energy_drift = 0.0;
  for (std::size_t f = 0; f < traj.frames.size(); ++f) {
    norm_drift = std::max(norm_drift, std::abs(traj.frames[f].integral() - 1.0));
    energy_drift = std::max(energy_drift, std::abs(expectation(traj.frames[f], energy) - e0));
    const std::size_t step = static_cast<std::size_t>(std::llround(traj.times[f] / dt));
    dir.write(frame_name(step), [&](std::ostream& o) { io::write_grid(o, w0.grid(), traj.frames[f].values()); });
  }

  Summary s;
  s.add("method", method_name(method));
  s.add_count("steps", static_cast<std::size_t>(steps));
  s.add("dt", dt);
  s.add("final_time", traj.times.back());
  s.add_count("frames", traj.frames.size());
  s.add("norm_drift", norm_drift);
  s.add("energy_initial", e0);
  s.add("energy_drift", energy_drift);
  s.add("return_linf", max_abs_difference(traj.final_frame().values(), w0.values()));

  if (compare) {
    const EvolveMethod all[3] = {EvolveMethod::split_exact, EvolveMethod::series_euler, EvolveMethod::classical};
    std::vector<Trajectory> runs;
    for (EvolveMethod m : all)
      runs.push_back(m == method ? traj : evolve(w0, h, dt, static_cast<std::size_t>(steps), m, options));
    dir.write("compare.txt", [&](std::ostream& o) {
      o << "# time split_exact-series_euler split_exact-classical series_euler-classical\n";
      for (std::size_t f = 0; f < traj.times.size(); ++f) {
        o << io::format_fixed(traj.times[f]);
        for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
          o << ' ' << io::format_fixed(max_abs_difference(runs[a].frames[f].values(), runs[b].frames[f].values()));
        o << '\n';
      }
    });
    const std::size_t last = traj.times.size() - 1;
    s.add("compare_split_series_linf", max_abs_difference(runs[0].frames[last].values(), runs[1].frames[last].values()));
    s.add("compare_split_classical_linf", max_abs_difference(runs[0].frames[last].values(), runs[2].frames[last].values()));
    s.add("compare_series_classical_linf", max_abs_difference(runs[1].frames[last].values(), runs[2].frames[last].values()));
  }

  dir.write("summary.txt", [&](std::ostream& o) { s.write(o); });
  s.write(out);
  return kOk;
}

inline int cmd_husimi(const RunConfig& rc, const std::filesystem::path& out_dir, std::ostream& out) {
  const Config config = make_config(rc);
  const AxisGrid grid = make_grid(rc);
  const WaveFunction psi = make_state(rc, grid, config);
  GaussianPacketSpec smoothing;
  smoothing.width_b = rc.number("husimi.width_b", std::sqrt(0.5));
  rc.checked("husimi.width_b", [&] {
    smoothing.validate();
    return 0;
  });

  const WignerFunction w = wigner_from_wavefunction(psi, config);
  const PhaseArray hus = husimi_smooth(w, smoothing, config);
  const auto report = positivity_report(hus.values());
  const std::size_t n = grid.count();
  Summary s;
  s.add("min_value", report.min_value);
  s.add("min_q", hus.grid().q_axis().point(report.min_location / n));
  s.add("min_p", hus.grid().p_axis().point(report.min_location % n));
  s.add("negative_fraction", report.negative_fraction);
  s.add("integral", hus.integral());
  s.add("wigner_min_value", positivity_report(w.values()).min_value);

  const OutputDir dir(out_dir);
  dir.write("husimi.dat", [&](std::ostream& o) { io::write_grid(o, hus.grid(), hus.values()); });
  dir.write("summary.txt", [&](std::ostream& o) { s.write(o); });
  s.write(out);
  return kOk;
}

/// Operands default to star.a / star.b from the config; `hbar` switches the
/// output from symbolic hbar to numeric coefficients.
inline int cmd_star(const RunConfig& rc, const std::optional<std::string>& a_text,
                    const std::optional<std::string>& b_text, std::optional<double> hbar,
                    const std::optional<std::filesystem::path>& out_dir, std::ostream& out) {
  const auto operand = [&](const std::optional<std::string>& arg, const std::string& key) {
    if (arg) {
      try {
        return io::parse_poly(*arg);
      } catch (const ParseError& e) {
        throw ConfigError(0, key.substr(5) + " operand '" + *arg + "': " + e.what());
      }
    }
    return rc.checked(key, [&] { return io::parse_poly(rc.text(key)); });
  };
  const PolySymbol a = operand(a_text, "star.a");
  const PolySymbol b = operand(b_text, "star.b");
  if (a.total_degree() + b.total_degree() > PolySymbol::kDefaultDegreeCap)
    throw ConfigError(0, "product degree exceeds " + std::to_string(PolySymbol::kDefaultDegreeCap));

  std::string result;
  if (hbar) {
    Config config;
    config.hbar = *hbar;
    if (!(config.hbar > 0.0) || !std::isfinite(config.hbar)) throw ConfigError(0, "--hbar must be positive");
    result = io::format_poly(star_product(a, b, config));
  } else {
    result = io::format_poly_orders(star_product_orders(a, b));
  }
  if (out_dir) {
    const OutputDir dir(*out_dir);
    dir.write("star.txt", [&](std::ostream& o) { o << result << '\n'; });
  }
  out << result << '\n';
  return kOk;
}

inline int cmd_expect(const RunConfig& rc, const std::filesystem::path& out_dir, std::ostream& out) {
  const Config config = make_config(rc);
  const AxisGrid grid = make_grid(rc);
  const WaveFunction psi = make_state(rc, grid, config);
  const PolySymbol observable = rc.checked("expect.observable", [&] { return io::parse_poly(rc.text("expect.observable")); });

  const WignerFunction w = wigner_from_wavefunction(psi, config);
  const double value = rc.checked("expect.observable", [&] { return expectation(w, sample_poly(observable, w.grid())); });

  Summary s;
  s.add("observable", io::format_poly(observable));
  s.add("value", value);
  const OutputDir dir(out_dir);
  dir.write("expect.txt", [&](std::ostream& o) { s.write(o); });
  out << io::format_significant(value, 12) << '\n';
  return kOk;
}

inline int cmd_demo_negativity(const RunConfig& rc, const std::filesystem::path& out_dir, std::ostream& out) {
  const Config config = make_config(rc);
  const AxisGrid grid = make_grid(rc);
  const double gap = rc.number("demo.gap", 2.0);
  const double width = rc.number("demo.width", 1.0);
  rc.checked("demo.gap", [&] { return interval_bumps(gap, width, grid); });

  const ImpossibilityReport r = impossibility_demo(gap, width, grid, config);
  Summary s;
  s.add("max_cross_term_in_gap", r.max_cross_in_gap);
  s.add("min_over_phase_sweep", r.min_over_sweep);
  s.add("max_momentum_product", r.max_momentum_product);
  for (std::size_t k = 0; k < r.phases.size(); ++k)
    s.add("min_at_phase_" + std::to_string(k), r.min_by_phase[k]);
  s.add("max_phase_spread", r.max_phase_spread);
  s.add("result", r.pass ? "PASS" : "FAIL");

  const OutputDir dir(out_dir);
  dir.write("demo.txt", [&](std::ostream& o) { s.write(o); });
  out << "max |P12| in gap      " << io::format_significant(r.max_cross_in_gap, 12) << '\n';
  out << "min W over phase sweep " << io::format_significant(r.min_over_sweep, 12) << '\n';
  out << "max |phi1 phi2*|      " << io::format_significant(r.max_momentum_product, 12) << '\n';
  out << (r.pass ? "PASS" : "FAIL") << '\n';
  return r.pass ? kOk : kFailure;
}

}  // namespace wigner::cli
