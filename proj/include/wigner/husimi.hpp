#pragma once

// Minimum-uncertainty packets and Gaussian smoothing of Wigner functions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "wigner/detail/fft.hpp"
#include "wigner/error.hpp"
#include "wigner/grid.hpp"

namespace wigner {

/// Gaussian packet with position spread b and momentum spread hbar/(2b).
struct GaussianPacketSpec {
  double center_q = 0.0;
  double center_p = 0.0;
  double width_b = std::sqrt(0.5);

  void validate() const {
    if (!(width_b > 0.0) || !std::isfinite(width_b))
      throw Error("GaussianPacketSpec: width_b must be positive");
    if (!std::isfinite(center_q) || !std::isfinite(center_p))
      throw Error("GaussianPacketSpec: centers must be finite");
  }
};

inline WaveFunction minimum_uncertainty_packet(const GaussianPacketSpec& spec, const AxisGrid& grid,
                                               const Config& config) {
  spec.validate();
  config.validate();
  const double b2 = spec.width_b * spec.width_b;
  std::vector<Complex> amplitudes(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const double x = grid.point(i);
    const double d = x - spec.center_q;
    amplitudes[i] = std::exp(-d * d / (4.0 * b2)) * std::polar(1.0, spec.center_p * x / config.hbar);
  }
  WaveFunction psi = normalize(WaveFunction(grid, std::move(amplitudes)));
  detail::check_edges(psi, "minimum_uncertainty_packet");
  return psi;
}

/// Closed form (1/(pi hbar)) exp(-(q - q0)^2 / 2b^2 - 2 b^2 (p - p0)^2 / hbar^2).
inline WignerFunction gaussian_wigner(const GaussianPacketSpec& spec, const PhaseGrid& grid,
                                      const Config& config) {
  spec.validate();
  config.validate();
  if (grid.hbar() != config.hbar) throw Error("gaussian_wigner: grid hbar differs from config");
  // Support in q is the packet's own requirement; in p the momentum amplitude
  // exp(-b^2 (p - p0)^2 / hbar^2) must have decayed at the edges.
  (void)minimum_uncertainty_packet(spec, grid.q_axis(), config);
  const double b2 = spec.width_b * spec.width_b;
  const double hbar = config.hbar;
  for (double p : {grid.p_axis().point(0), grid.p_axis().point(grid.count() - 1)}) {
    const double edge = std::exp(-b2 * (p - spec.center_p) * (p - spec.center_p) / (hbar * hbar));
    if (edge >= 1e-10)
      throw Error("gaussian_wigner: momentum grid too narrow, edge magnitude " + std::to_string(edge));
  }
  const std::size_t n = grid.count();
  std::vector<double> values(grid.size());
  const double amplitude = 1.0 / (std::numbers::pi * hbar);
  for (std::size_t i = 0; i < n; ++i) {
    const double dq = grid.q_axis().point(i) - spec.center_q;
    for (std::size_t k = 0; k < n; ++k) {
      const double dp = grid.p_axis().point(k) - spec.center_p;
      values[i * n + k] = amplitude * std::exp(-dq * dq / (2.0 * b2) - 2.0 * b2 * dp * dp / (hbar * hbar));
    }
  }
  return WignerFunction(grid, std::move(values));
}

/// Convolution with exp(-dq^2/2b^2 - 2 b^2 dp^2/hbar^2), normalised on the
/// lattice so the total integral is preserved. Offsets wrap periodically.
inline PhaseArray husimi_smooth(const PhaseArray& w, const GaussianPacketSpec& spec,
                                const Config& config) {
  spec.validate();
  config.validate();
  const PhaseGrid& grid = w.grid();
  if (grid.hbar() != config.hbar) throw Error("husimi_smooth: grid hbar differs from config");
  const std::size_t n = grid.count();
  const double b2 = spec.width_b * spec.width_b;
  const double dq = grid.q_axis().step();
  const double dp = grid.p_axis().step();

  detail::ComplexBuffer kernel(n * n);
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double oq = static_cast<double>(detail::signed_index(s, n)) * dq;
    for (std::size_t t = 0; t < n; ++t) {
      const double op = static_cast<double>(detail::signed_index(t, n)) * dp;
      const double v = std::exp(-oq * oq / (2.0 * b2) - 2.0 * b2 * op * op / (config.hbar * config.hbar));
      kernel[s * n + t] = v;
      total += v;
    }
  }

  detail::ComplexBuffer data(w.values().begin(), w.values().end());
  detail::fft_rows(kernel, n, n, detail::FftSign::forward);
  detail::fft_cols(kernel, n, n, detail::FftSign::forward);
  detail::fft_rows(data, n, n, detail::FftSign::forward);
  detail::fft_cols(data, n, n, detail::FftSign::forward);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= kernel[i];
  detail::fft_cols(data, n, n, detail::FftSign::backward);
  detail::fft_rows(data, n, n, detail::FftSign::backward);

  // Discrete kernel normalised to unit mass: sum K dq dp = 1.
  const double scale = 1.0 / (total * static_cast<double>(n * n));
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real() * scale;
  return PhaseArray(grid, std::move(out));
}

inline PhaseArray husimi_smooth(const WignerFunction& w, const GaussianPacketSpec& spec,
                                const Config& config) {
  return husimi_smooth(w.as_array(), spec, config);
}

struct PositivityReport {
  double min_value = 0.0;
  /// Flat index of the minimum (row-major, q as row for phase arrays).
  std::size_t min_location = 0;
  double negative_fraction = 0.0;
};

inline PositivityReport positivity_report(const std::vector<double>& values) {
  PositivityReport r;
  if (values.empty()) return r;
  const auto it = std::min_element(values.begin(), values.end());
  r.min_value = *it;
  r.min_location = static_cast<std::size_t>(it - values.begin());
  const auto negative = std::count_if(values.begin(), values.end(), [](double v) { return v < -1e-12; });
  r.negative_fraction = static_cast<double>(negative) / static_cast<double>(values.size());
  return r;
}

}  // namespace wigner
