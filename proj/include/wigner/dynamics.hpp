#pragma once

// Quantum Liouville evolution for H = p^2/2m + V(q).
//
// Everything acts on the (q, p) lattice of a WignerFunction. Transforming a row
// over p (forward FFT, divided by N) gives the y-representation f~(q_i, m), in
// which the potential part of the generator is the multiplication
//
//   d f~/dt = (i/hbar) [V(q_i + m dq) - V(q_i - m dq)] f~,
//
// and d/dp becomes i nu_m with nu_m = 2 m dq / hbar. The kinetic part is an
// exact spectral advection along q.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wigner/detail/fft.hpp"
#include "wigner/error.hpp"
#include "wigner/grid.hpp"
#include "wigner/transforms.hpp"

namespace wigner {

/// V(q): a polynomial sum c_k q^k, or values tabulated on an axis (periodic).
class Potential {
 public:
  static constexpr std::size_t kMaxDegree = 12;

  struct Polynomial {
    std::vector<double> coefficients;
  };
  struct Tabulated {
    AxisGrid grid;
    std::vector<double> values;
  };

  static Potential polynomial(std::vector<double> coefficients) {
    while (!coefficients.empty() && coefficients.back() == 0.0) coefficients.pop_back();
    if (coefficients.size() > kMaxDegree + 1)
      throw Error("Potential: polynomial degree " + std::to_string(coefficients.size() - 1) +
                  " exceeds " + std::to_string(kMaxDegree));
    for (double c : coefficients)
      if (!std::isfinite(c)) throw Error("Potential: non-finite coefficient");
    return Potential(Polynomial{std::move(coefficients)});
  }

  static Potential tabulated(const AxisGrid& grid, std::vector<double> values) {
    if (values.size() != grid.count()) throw Error("Potential: table size does not match its grid");
    for (double v : values)
      if (!std::isfinite(v)) throw Error("Potential: non-finite table value");
    return Potential(Tabulated{grid, std::move(values)});
  }

  static Potential zero() { return polynomial({}); }

  bool is_polynomial() const noexcept { return std::holds_alternative<Polynomial>(data_); }
  const Polynomial* as_polynomial() const { return std::get_if<Polynomial>(&data_); }
  const Tabulated* as_tabulated() const { return std::get_if<Tabulated>(&data_); }

  /// Polynomial degree; -1 for V = 0. Tabulated potentials have no degree.
  std::optional<int> degree() const {
    if (const auto* p = as_polynomial()) return static_cast<int>(p->coefficients.size()) - 1;
    return std::nullopt;
  }

  /// V at lattice index `index` of `grid`, which may lie outside [0, N). Tables
  /// are read periodically and must be sampled on `grid`.
  double at_index(const AxisGrid& grid, long index) const {
    if (const auto* p = as_polynomial()) return evaluate(p->coefficients, 0, grid.min() + grid.step() * index);
    const auto& t = std::get<Tabulated>(data_);
    require_table_grid(t, grid);
    const long n = static_cast<long>(grid.count());
    return t.values[static_cast<std::size_t>(((index % n) + n) % n)];
  }

  /// d^order V / dq^order at every point of `grid`: exact for polynomials,
  /// spectral (periodic, Nyquist bin dropped) for tables.
  std::vector<double> derivative_on(const AxisGrid& grid, int order) const {
    const std::size_t n = grid.count();
    std::vector<double> out(n);
    if (const auto* p = as_polynomial()) {
      for (std::size_t i = 0; i < n; ++i) out[i] = evaluate(p->coefficients, order, grid.point(i));
      return out;
    }
    const auto& t = std::get<Tabulated>(data_);
    require_table_grid(t, grid);
    if (order == 0) return t.values;
    detail::ComplexBuffer buf(t.values.begin(), t.values.end());
    detail::fft(buf, detail::FftSign::forward);
    for (std::size_t j = 0; j < n; ++j) {
      const long s = detail::signed_index(j, n);
      if (s == -static_cast<long>(n / 2)) {
        buf[j] = 0.0;
        continue;
      }
      const double kappa = 2.0 * std::numbers::pi * static_cast<double>(s) / grid.length();
      buf[j] *= std::pow(Complex(0.0, kappa), order);
    }
    detail::fft(buf, detail::FftSign::backward);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real() / static_cast<double>(n);
    return out;
  }

 private:
  explicit Potential(std::variant<Polynomial, Tabulated> data) : data_(std::move(data)) {}

  static double evaluate(const std::vector<double>& c, int order, double q) {
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(order);) {
      double f = 1.0;
      for (int j = 0; j < order; ++j) f *= static_cast<double>(k - j);
      s = s * q + c[k] * f;
    }
    return s;
  }

  static void require_table_grid(const Tabulated& t, const AxisGrid& grid) {
    if (!(t.grid == grid))
      throw Error("Potential: table is not sampled on the Wigner q lattice (q +- y/2 undefined)");
  }

  std::variant<Polynomial, Tabulated> data_;
};

struct Hamiltonian {
  double mass = 1.0;
  Potential potential = Potential::zero();

  Hamiltonian(double m, Potential v) : mass(m), potential(std::move(v)) {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw Error("Hamiltonian: mass must be positive");
  }
};

/// Symbol p^2/2m + V(q) sampled on the phase grid.
inline PhaseSymbol hamiltonian_symbol(const Hamiltonian& h, const PhaseGrid& grid) {
  const std::size_t n = grid.count();
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double v = h.potential.at_index(grid.q_axis(), static_cast<long>(i));
    for (std::size_t k = 0; k < n; ++k) {
      const double p = grid.p_axis().point(k);
      values[i * n + k] = p * p / (2.0 * h.mass) + v;
    }
  }
  return PhaseSymbol(grid, std::move(values));
}

/// J(q_i, j_l) on the (q, j) lattice, with j sharing the momentum axis.
struct JumpKernel {
  PhaseGrid grid;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t l) const { return values[i * grid.count() + l]; }
};

namespace detail {

inline double kappa(std::size_t bin, const AxisGrid& q) {
  return 2.0 * std::numbers::pi * static_cast<double>(signed_index(bin, q.count())) / q.length();
}

inline bool is_nyquist(std::size_t bin, std::size_t n) {
  return signed_index(bin, n) == -static_cast<long>(n / 2);
}

inline void check_finite(const std::vector<double>& v, std::size_t step) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericAbort(step, "non-finite value in Wigner function");
}

// Row-wise transform to the y-representation (divided by N).
inline ComplexBuffer to_y(const std::vector<double>& values, std::size_t n) {
  ComplexBuffer buf(values.begin(), values.end());
  fft_rows(buf, n, n, FftSign::forward);
  for (auto& v : buf) v /= static_cast<double>(n);
  return buf;
}

inline std::vector<double> from_y(ComplexBuffer& buf, std::size_t n) {
  fft_rows(buf, n, n, FftSign::backward);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return out;
}

// [V(q_i + m dq) - V(q_i - m dq)] for every (i, bin of m); zero at Nyquist.
inline std::vector<double> potential_difference(const Potential& v, const AxisGrid& q) {
  const std::size_t n = q.count();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (is_nyquist(j, n)) continue;
      const long m = signed_index(j, n);
      const long ii = static_cast<long>(i);
      out[i * n + j] = v.at_index(q, ii + m) - v.at_index(q, ii - m);
    }
  return out;
}

// Imaginary part g of the series generator G = i g for every (i, bin of m):
//   G = sum_{lambda odd} (1/lambda!) (hbar/2i)^(lambda-1) V^(lambda)(q_i) (i nu_m)^lambda.
inline std::vector<double> series_generator(const Potential& v, const AxisGrid& q, int lambda_max,
                                            double hbar) {
  const std::size_t n = q.count();
  std::vector<double> out(n * n, 0.0);
  for (int lambda = 1; lambda <= lambda_max; lambda += 2) {
    const std::vector<double> dv = v.derivative_on(q, lambda);
    // (hbar/2i)^(lambda-1) i^lambda = i (hbar/2)^(lambda-1)
    double factorial = 1.0;
    for (int j = 2; j <= lambda; ++j) factorial *= j;
    const double c = std::pow(hbar / 2.0, lambda - 1) / factorial;
    for (std::size_t j = 0; j < n; ++j) {
      if (is_nyquist(j, n)) continue;
      const double nu = 2.0 * static_cast<double>(signed_index(j, n)) * q.step() / hbar;
      const double nu_power = std::pow(nu, lambda);
      for (std::size_t i = 0; i < n; ++i) out[i * n + j] += c * dv[i] * nu_power;
    }
  }
  return out;
}

inline void check_lambda(int lambda_max) {
  if (lambda_max < 1 || lambda_max % 2 == 0)
    throw Error("lambda_max must be an odd integer >= 1, got " + std::to_string(lambda_max));
}

// Generator of the Liouville equation in mixed representations:
//   kinetic:   in (kappa, p), dW^/dt = -i kappa p/m W^
//   potential: in (q, y),     df~/dt = i g(q, m) f~
struct LiouvilleGenerator {
  PhaseGrid grid;
  double mass;
  std::vector<double> potential_rate;  // g(i, bin), empty when V contributes nothing

  std::vector<double> kinetic(const std::vector<double>& w) const {
    const std::size_t n = grid.count();
    ComplexBuffer buf(w.begin(), w.end());
    fft_cols(buf, n, n, FftSign::forward);
    for (std::size_t s = 0; s < n; ++s) {
      const double kap = is_nyquist(s, n) ? 0.0 : kappa(s, grid.q_axis());
      for (std::size_t k = 0; k < n; ++k)
        buf[s * n + k] *= Complex(0.0, -kap * grid.p_axis().point(k) / mass);
    }
    fft_cols(buf, n, n, FftSign::backward);
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = buf[i].real() / static_cast<double>(n);
    return out;
  }

  std::vector<double> potential(const std::vector<double>& w) const {
    const std::size_t n = grid.count();
    if (potential_rate.empty()) return std::vector<double>(w.size(), 0.0);
    ComplexBuffer buf = to_y(w, n);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= Complex(0.0, potential_rate[i]);
    return from_y(buf, n);
  }

  std::vector<double> operator()(const std::vector<double>& w) const {
    std::vector<double> out = kinetic(w);
    const std::vector<double> v = potential(w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    return out;
  }

  // Bound on the spectral radius of the (skew-adjoint) generator.
  double spectral_radius() const {
    const std::size_t n = grid.count();
    const double p_max = std::max(std::abs(grid.p_axis().point(0)), std::abs(grid.p_axis().point(n - 1)));
    const double kap_max = std::numbers::pi / grid.q_axis().step();
    double g_max = 0.0;
    for (double g : potential_rate) g_max = std::max(g_max, std::abs(g));
    return p_max / mass * kap_max + g_max;
  }
};

}  // namespace detail

namespace detail {

inline std::vector<double> advect(const std::vector<double>& w, const PhaseGrid& grid, double mass,
                                  double dt) {
  const std::size_t n = grid.count();
  ComplexBuffer buf(w.begin(), w.end());
  fft_cols(buf, n, n, FftSign::forward);
  for (std::size_t s = 0; s < n; ++s) {
    const double kap = kappa(s, grid.q_axis());
    const bool nyquist = is_nyquist(s, n);
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = kap * grid.p_axis().point(k) * dt / mass;
      // The Nyquist mode has no sign; averaging +-kappa keeps the result real.
      buf[s * n + k] *= nyquist ? Complex(std::cos(phase), 0.0) : std::polar(1.0, -phase);
    }
  }
  fft_cols(buf, n, n, FftSign::backward);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real() / static_cast<double>(n);
  return out;
}

inline std::vector<double> potential_phase(const std::vector<double>& w, std::size_t n,
                                           const std::vector<double>& dv, double dt, double hbar) {
  ComplexBuffer buf = to_y(w, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto& v = buf[i * n + j];
      v = is_nyquist(j, n) ? Complex(0.0) : v * std::polar(1.0, dt / hbar * dv[i * n + j]);
    }
  return from_y(buf, n);
}

}  // namespace detail

/// Exact free advection W(q, p) -> W(q - p dt/m, p), spectral in q.
inline WignerFunction kinetic_step(const WignerFunction& w, const Hamiltonian& h, double dt) {
  return WignerFunction(w.grid(), detail::advect(w.values(), w.grid(), h.mass, dt));
}

/// Exact potential propagation: phase exp(i dt/hbar [V(q+y/2) - V(q-y/2)]) in
/// the y-representation.
inline WignerFunction potential_step_exact(const WignerFunction& w, const Hamiltonian& h, double dt,
                                           const Config& config) {
  detail::check_hbar(w.grid(), config, "potential_step_exact");
  const std::size_t n = w.grid().count();
  const std::vector<double> dv = detail::potential_difference(h.potential, w.grid().q_axis());
  return WignerFunction(w.grid(), detail::potential_phase(w.values(), n, dv, dt, config.hbar));
}

/// Generator of potential_step_exact: (i/hbar) [V(q+y/2) - V(q-y/2)] in the
/// y-representation.
inline PhaseArray potential_step_exact_rhs(const WignerFunction& w, const Hamiltonian& h,
                                           const Config& config) {
  detail::check_hbar(w.grid(), config, "potential_step_exact_rhs");
  const std::size_t n = w.grid().count();
  const std::vector<double> dv = detail::potential_difference(h.potential, w.grid().q_axis());
  detail::ComplexBuffer buf = detail::to_y(w.values(), n);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= Complex(0.0, dv[i] / config.hbar);
  return PhaseArray(w.grid(), detail::from_y(buf, n));
}

/// sum over odd lambda <= lambda_max of (1/lambda!) (hbar/2i)^(lambda-1) V^(lambda) d^lambda P/dp^lambda,
/// with the p derivatives taken spectrally.
inline PhaseArray potential_step_series_rhs(const WignerFunction& w, const Hamiltonian& h,
                                            int lambda_max, const Config& config) {
  detail::check_lambda(lambda_max);
  detail::check_hbar(w.grid(), config, "potential_step_series_rhs");
  const detail::LiouvilleGenerator gen{
      w.grid(), h.mass,
      detail::series_generator(h.potential, w.grid().q_axis(), lambda_max, config.hbar)};
  return PhaseArray(w.grid(), gen.potential(w.values()));
}

/// -(p/m) dW/dq, spectral in q.
inline PhaseArray kinetic_rhs(const WignerFunction& w, const Hamiltonian& h) {
  const detail::LiouvilleGenerator gen{w.grid(), h.mass, {}};
  return PhaseArray(w.grid(), gen.kinetic(w.values()));
}

/// J(q, j) = (1/(pi hbar^2)) sum_y [V(q+y) - V(q-y)] sin(2 j y / hbar) dy on the
/// lattice y = m dq, j = p-lattice.
inline JumpKernel jump_kernel(const Hamiltonian& h, const PhaseGrid& grid, const Config& config) {
  config.validate();
  detail::check_hbar(grid, config, "jump_kernel");
  const std::size_t n = grid.count();
  const AxisGrid& q = grid.q_axis();
  const std::vector<double> dv = detail::potential_difference(h.potential, q);
  // sum_m dV_m sin(2 pi m (l - N/2) / N) = Im sum_m dV_m (-1)^m exp(2 pi i m l / N)
  detail::ComplexBuffer buf(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const long m = detail::signed_index(j, n);
      buf[i * n + j] = (m % 2 == 0 ? 1.0 : -1.0) * dv[i * n + j];
    }
  detail::fft_rows(buf, n, n, detail::FftSign::backward);
  const double scale = q.step() / (std::numbers::pi * config.hbar * config.hbar);
  std::vector<double> values(n * n);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = scale * buf[i].imag();
  return JumpKernel{grid, std::move(values)};
}

/// dP/dt(q, p) = sum_l P(q, p + j_l) J(q, j_l) dj, with p + j_l read periodically.
inline PhaseArray apply_jump_rhs(const WignerFunction& w, const JumpKernel& kernel) {
  detail::require_same_grid(w.grid(), kernel.grid, "apply_jump_rhs");
  const std::size_t n = w.grid().count();
  const double dj = w.grid().p_axis().step();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        const double jv = kernel(i, l);
        if (jv == 0.0) continue;
        s += w(i, (k + l + n - n / 2) % n) * jv;
      }
      out[i * n + k] = s * dj;
    }
  return PhaseArray(w.grid(), std::move(out));
}

enum class EvolveMethod { split_exact, series_euler, classical };

struct EvolveOptions {
  /// Odd truncation order for series_euler; 0 picks the exact order for
  /// polynomial potentials and 5 for tables.
  int lambda_max = 0;
  /// Keep every stride-th frame (the initial and final frames are always kept).
  std::size_t stride = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<WignerFunction> frames;

  const WignerFunction& final_frame() const { return frames.back(); }
};

namespace detail {

inline int resolve_lambda(const Potential& v, EvolveMethod method, int requested) {
  if (method == EvolveMethod::classical) return 1;
  if (requested != 0) {
    check_lambda(requested);
    return requested;
  }
  if (auto d = v.degree()) return std::max(1, *d % 2 == 0 ? *d - 1 : *d);
  return 5;
}

inline constexpr double kMaxSubsteps = 1e6;

inline std::size_t substeps_for(double spectral_radius, double dt) {
  const double needed = spectral_radius * dt / 2.5;
  if (!std::isfinite(needed)) throw NumericAbort(1, "generator is not finite");
  if (needed > kMaxSubsteps)
    throw Error("evolve: dt needs " + sci(needed) + " RK4 substeps, reduce dt or refine the grid");
  return static_cast<std::size_t>(std::max(1.0, std::ceil(needed)));
}

inline void rk4_step(const LiouvilleGenerator& gen, std::vector<double>& w, double dt,
                     std::size_t substeps) {
  const double h = dt / static_cast<double>(substeps);
  const std::size_t size = w.size();
  std::vector<double> tmp(size);
  for (std::size_t s = 0; s < substeps; ++s) {
    const auto k1 = gen(w);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = w[i] + 0.5 * h * k1[i];
    const auto k2 = gen(tmp);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = w[i] + 0.5 * h * k2[i];
    const auto k3 = gen(tmp);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = w[i] + h * k3[i];
    const auto k4 = gen(tmp);
    for (std::size_t i = 0; i < size; ++i)
      w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

}  // namespace detail

/// Number of RK4 substeps used per step of `dt`: explicit RK4 is only stable
/// for |lambda dt| below about 2.8, and the lattice generator is stiff.
inline std::size_t rk4_substeps(const WignerFunction& w, const Hamiltonian& h, double dt,
                                EvolveMethod method, const EvolveOptions& options = {}) {
  const int lambda = detail::resolve_lambda(h.potential, method, options.lambda_max);
  const detail::LiouvilleGenerator gen{
      w.grid(), h.mass, detail::series_generator(h.potential, w.grid().q_axis(), lambda, w.hbar())};
  return detail::substeps_for(gen.spectral_radius(), dt);
}

inline Trajectory evolve(const WignerFunction& w, const Hamiltonian& h, double dt, std::size_t steps,
                         EvolveMethod method, const EvolveOptions& options = {}) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("evolve: dt must be positive");
  if (steps < 1) throw Error("evolve: steps must be >= 1");
  if (options.stride < 1) throw Error("evolve: stride must be >= 1");

  const PhaseGrid& grid = w.grid();
  Trajectory out;
  out.times.push_back(0.0);
  out.frames.push_back(w);

  std::vector<double> state = w.values();
  std::optional<detail::LiouvilleGenerator> gen;
  std::size_t substeps = 1;
  std::vector<double> potential_phase_dv;
  if (method == EvolveMethod::split_exact) {
    potential_phase_dv = detail::potential_difference(h.potential, grid.q_axis());
  } else {
    const int lambda = detail::resolve_lambda(h.potential, method, options.lambda_max);
    gen.emplace(detail::LiouvilleGenerator{
        grid, h.mass, detail::series_generator(h.potential, grid.q_axis(), lambda, grid.hbar())});
    substeps = detail::substeps_for(gen->spectral_radius(), dt);
  }

  for (std::size_t step = 1; step <= steps; ++step) {
    if (method == EvolveMethod::split_exact) {
      // Both sub-steps are exact, so the Strang splitting error is the only error.
      state = detail::advect(state, grid, h.mass, 0.5 * dt);
      state = detail::potential_phase(state, grid.count(), potential_phase_dv, dt, grid.hbar());
      state = detail::advect(state, grid, h.mass, 0.5 * dt);
    } else {
      detail::rk4_step(*gen, state, dt, substeps);
    }
    detail::check_finite(state, step);
    if (step % options.stride == 0 || step == steps) {
      out.times.push_back(dt * static_cast<double>(step));
      try {
        out.frames.emplace_back(grid, state);
      } catch (const NumericAbort&) {
        throw;
      } catch (const Error& e) {
        throw NumericAbort(step, e.what());
      }
    }
  }
  return out;
}

}  // namespace wigner
