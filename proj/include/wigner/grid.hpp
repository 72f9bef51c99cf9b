#pragma once

// Grids, states and the numerical conventions shared by every module:
//
//  * hbar is a runtime value carried by Config.
//  * Positions are q_i = min + i*step, i in [0, N), N even.
//  * The momentum axis is derived from the position axis so that the relative
//    coordinate y = 2*m*dq of the Wigner transform lands on lattice points:
//    dp = pi*hbar/(N*dq), p_k = (k - N/2)*dp.
//  * States are assumed to decay below 1e-10 at the box edges. Integrals are
//    plain step-weighted Riemann sums.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wigner/error.hpp"

namespace wigner {

using Complex = std::complex<double>;

struct Config {
  double hbar = 1.0;
  double norm_tolerance = 1e-10;

  void validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw Error("Config: hbar must be positive");
    if (!(norm_tolerance > 0.0)) throw Error("Config: norm_tolerance must be positive");
  }
};

/// Uniform one-dimensional lattice.
class AxisGrid {
 public:
  AxisGrid(double min, double step, std::size_t count) : min_(min), step_(step), count_(count) {
    if (!std::isfinite(min)) throw Error("AxisGrid: min must be finite");
    if (!(step > 0.0) || !std::isfinite(step)) throw Error("AxisGrid: step must be positive");
    if (count < 4 || count % 2 != 0)
      throw Error("AxisGrid: count must be even and >= 4, got " + std::to_string(count));
  }

  double min() const noexcept { return min_; }
  double step() const noexcept { return step_; }
  std::size_t count() const noexcept { return count_; }
  double point(std::size_t i) const noexcept { return min_ + step_ * static_cast<double>(i); }
  double length() const noexcept { return step_ * static_cast<double>(count_); }
  /// Midpoint of the periodic box, q_{N/2}.
  double center() const noexcept { return point(count_ / 2); }

  std::vector<double> points() const {
    std::vector<double> out(count_);
    for (std::size_t i = 0; i < count_; ++i) out[i] = point(i);
    return out;
  }

  bool operator==(const AxisGrid&) const = default;

 private:
  double min_;
  double step_;
  std::size_t count_;
};

/// Position axis plus its derived momentum axis.
class PhaseGrid {
 public:
  PhaseGrid(const AxisGrid& q_axis, double hbar)
      : q_(q_axis), p_(conjugate_axis(q_axis, hbar)), hbar_(hbar) {}

  const AxisGrid& q_axis() const noexcept { return q_; }
  const AxisGrid& p_axis() const noexcept { return p_; }
  double hbar() const noexcept { return hbar_; }
  std::size_t count() const noexcept { return q_.count(); }
  std::size_t size() const noexcept { return q_.count() * q_.count(); }
  double cell() const noexcept { return q_.step() * p_.step(); }

  bool operator==(const PhaseGrid&) const = default;

 private:
  static AxisGrid conjugate_axis(const AxisGrid& q, double hbar) {
    if (!(hbar > 0.0)) throw Error("PhaseGrid: hbar must be positive");
    const double n = static_cast<double>(q.count());
    const double dp = std::numbers::pi * hbar / (n * q.step());
    return AxisGrid(-(n / 2.0) * dp, dp, q.count());
  }

  AxisGrid q_;
  AxisGrid p_;
  double hbar_;
};

inline PhaseGrid make_phase_grid(const AxisGrid& q_axis, const Config& config) {
  config.validate();
  return PhaseGrid(q_axis, config.hbar);
}

/// Sampled wavefunction. Amplitudes need not be normalised; operations that
/// require a normalised state check it against Config::norm_tolerance.
class WaveFunction {
 public:
  WaveFunction(const AxisGrid& grid, std::vector<Complex> amplitudes)
      : grid_(grid), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != grid_.count())
      throw Error("WaveFunction: expected " + std::to_string(grid_.count()) + " amplitudes, got " +
                  std::to_string(amplitudes_.size()));
    for (const auto& a : amplitudes_)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw Error("WaveFunction: non-finite amplitude");
  }

  const AxisGrid& grid() const noexcept { return grid_; }
  const std::vector<Complex>& amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  std::size_t size() const noexcept { return amplitudes_.size(); }

  /// Discrete norm sum |psi_i|^2 * step.
  double norm() const {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return sum * grid_.step();
  }

  bool is_normalized(const Config& config) const {
    return std::abs(norm() - 1.0) <= config.norm_tolerance;
  }

 private:
  AxisGrid grid_;
  std::vector<Complex> amplitudes_;
};

inline WaveFunction normalize(const WaveFunction& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw Error("normalize: zero wavefunction");
  const double scale = 1.0 / std::sqrt(n);
  std::vector<Complex> out(psi.amplitudes());
  for (auto& a : out) a *= scale;
  return WaveFunction(psi.grid(), std::move(out));
}

/// Inner product <a|b> = sum conj(a_i) b_i * step.
inline Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid())) throw Error("inner_product: grid mismatch");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum * a.grid().step();
}

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n, Complex fill = 0.0) : n_(n), data_(n * n, fill) {}

  static ComplexMatrix identity(std::size_t n, Complex diagonal = 1.0) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = diagonal;
    return m;
  }

  std::size_t rows() const noexcept { return n_; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  const std::vector<Complex>& data() const noexcept { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

inline double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw Error("max_abs_difference: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

/// Density matrix stored as kernel samples <q_a|rho|q_b>, so that
/// trace * step = 1. Optionally records the convex mixture it came from.
class DensityMatrix {
 public:
  struct Component {
    double weight;
    WaveFunction state;
  };

  DensityMatrix(const AxisGrid& grid, ComplexMatrix elements, const Config& config = {})
      : grid_(grid), elements_(std::move(elements)) {
    validate(config);
  }

  static DensityMatrix pure(const WaveFunction& psi, const Config& config = {}) {
    return mixture({Component{1.0, psi}}, config);
  }

  static DensityMatrix mixture(std::vector<Component> components, const Config& config = {}) {
    if (components.empty()) throw Error("DensityMatrix: empty mixture");
    const AxisGrid grid = components.front().state.grid();
    const std::size_t n = grid.count();
    double total = 0.0;
    ComplexMatrix rho(n);
    for (const auto& c : components) {
      if (!(c.state.grid() == grid)) throw Error("DensityMatrix: mixture grid mismatch");
      if (c.weight < 0.0 || c.weight > 1.0) throw Error("DensityMatrix: weight outside [0,1]");
      total += c.weight;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          rho(a, b) += c.weight * c.state[a] * std::conj(c.state[b]);
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error("DensityMatrix: weights must sum to 1");
    DensityMatrix out(grid, std::move(rho), config);
    out.components_ = std::move(components);
    return out;
  }

  const AxisGrid& grid() const noexcept { return grid_; }
  const ComplexMatrix& elements() const noexcept { return elements_; }
  const Complex& operator()(std::size_t a, std::size_t b) const { return elements_(a, b); }
  const std::optional<std::vector<Component>>& components() const noexcept { return components_; }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < grid_.count(); ++i) t += elements_(i, i);
    return t * grid_.step();
  }

 private:
  void validate(const Config& config) const {
    const std::size_t n = grid_.count();
    if (elements_.rows() != n) throw Error("DensityMatrix: shape does not match grid");
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b)
        if (std::abs(elements_(a, b) - std::conj(elements_(b, a))) > 1e-12)
          throw Error("DensityMatrix: not Hermitian at (" + std::to_string(a) + "," +
                      std::to_string(b) + ")");
    if (std::abs(trace() - 1.0) > config.norm_tolerance)
      throw Error("DensityMatrix: trace*step must be 1");
  }

  AxisGrid grid_;
  ComplexMatrix elements_;
  std::optional<std::vector<Component>> components_;
};

/// Real array on a phase grid, row-major with q as the row index. Used for
/// Wigner-shaped quantities that are not Wigner functions (time derivatives,
/// Husimi distributions).
class PhaseArray {
 public:
  PhaseArray(const PhaseGrid& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw Error("PhaseArray: size does not match grid");
  }
  explicit PhaseArray(const PhaseGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

  const PhaseGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t k) const { return values_[i * grid_.count() + k]; }

  double integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.cell();
  }

 private:
  PhaseGrid grid_;
  std::vector<double> values_;
};

/// Wigner function P(q_i, p_k). Values are finite and integrate to 1.
class WignerFunction {
 public:
  static constexpr double kNormTolerance = 1e-8;

  WignerFunction(const PhaseGrid& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw Error("WignerFunction: size does not match grid");
    double sum = 0.0;
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error("WignerFunction: non-finite value");
      sum += v;
    }
    if (std::abs(sum * grid_.cell() - 1.0) > kNormTolerance)
      throw Error("WignerFunction: integral " + std::to_string(sum * grid_.cell()) + " != 1");
  }

  const PhaseGrid& grid() const noexcept { return grid_; }
  double hbar() const noexcept { return grid_.hbar(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t k) const { return values_[i * grid_.count() + k]; }

  double integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.cell();
  }

  PhaseArray as_array() const { return PhaseArray(grid_, values_); }

 private:
  PhaseGrid grid_;
  std::vector<double> values_;
};

/// Complex phase-space function: Weyl symbols A(q,p).
class PhaseSymbol {
 public:
  PhaseSymbol(const PhaseGrid& grid, std::vector<Complex> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw Error("PhaseSymbol: size does not match grid");
    for (const auto& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw Error("PhaseSymbol: non-finite value");
  }

  const PhaseGrid& grid() const noexcept { return grid_; }
  const std::vector<Complex>& values() const noexcept { return values_; }
  const Complex& operator()(std::size_t i, std::size_t k) const {
    return values_[i * grid_.count() + k];
  }

 private:
  PhaseGrid grid_;
  std::vector<Complex> values_;
};

/// Samples f(q, p) on every lattice point.
template <class F>
PhaseSymbol sample_symbol(const PhaseGrid& grid, F&& f) {
  const std::size_t n = grid.count();
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      values[i * n + k] = Complex(f(grid.q_axis().point(i), grid.p_axis().point(k)));
  return PhaseSymbol(grid, std::move(values));
}

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

inline void check_edges(const WaveFunction& psi, const char* what) {
  const double left = std::abs(psi[0]);
  const double right = std::abs(psi[psi.size() - 1]);
  const double edge = std::max(left, right);
  if (edge >= 1e-10)
    throw Error(std::string(what) + ": grid too narrow, edge magnitude " + sci(edge) +
                " >= 1e-10");
}

}  // namespace detail

/// Harmonic-oscillator eigenstate (m = omega = 1) sampled on the grid and
/// normalised. The Hermite functions are generated by the stable three-term
/// recurrence of the normalised functions.
inline WaveFunction ho_eigenstate(unsigned n, const AxisGrid& grid, const Config& config) {
  config.validate();
  const double hbar = config.hbar;
  const double root_hbar = std::sqrt(hbar);
  std::vector<Complex> amplitudes(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const double xi = grid.point(i) / root_hbar;
    double previous = 0.0;
    double current = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
    for (unsigned k = 0; k < n; ++k) {
      const double next = std::sqrt(2.0 / (k + 1.0)) * xi * current -
                          std::sqrt(static_cast<double>(k) / (k + 1.0)) * previous;
      previous = current;
      current = next;
    }
    amplitudes[i] = current / std::sqrt(root_hbar);
  }
  WaveFunction psi = normalize(WaveFunction(grid, std::move(amplitudes)));
  detail::check_edges(psi, "ho_eigenstate");
  return psi;
}

}  // namespace wigner
