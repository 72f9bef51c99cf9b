#pragma once

// Negativity of Wigner functions and the two-interval construction showing
// that no superposition-compatible distribution can stay non-negative.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "wigner/error.hpp"
#include "wigner/grid.hpp"
#include "wigner/transforms.hpp"

namespace wigner {

inline double negativity_volume(const std::vector<double>& values, double cell) {
  double s = 0.0;
  for (double v : values) s += 0.5 * (std::abs(v) - v);
  return s * cell;
}

inline double negativity_volume(const WignerFunction& w) {
  return negativity_volume(w.values(), w.grid().cell());
}

inline double negativity_volume(const PhaseArray& w) { return negativity_volume(w.values(), w.grid().cell()); }

/// Raised-cosine bumps cos^2(pi (x - c)/width) on two intervals of the given
/// width, placed symmetrically about the box midpoint q_{N/2} with `gap`
/// between them. Each bump is normalised on its own.
inline std::pair<WaveFunction, WaveFunction> interval_bumps(double gap, double width,
                                                            const AxisGrid& grid) {
  if (!(gap > 0.0)) throw Error("two_interval_state: gap must be positive (intervals would overlap)");
  if (!(width > 0.0)) throw Error("two_interval_state: width must be positive");
  const double mid = grid.center();
  const double offset = 0.5 * (gap + width);
  const double left = mid - offset - 0.5 * width;
  const double right = mid + offset + 0.5 * width;
  if (left <= grid.point(0) || right >= grid.point(grid.count() - 1))
    throw Error("two_interval_state: intervals [" + std::to_string(left) + ", " +
                std::to_string(right) + "] do not fit inside the grid");

  const auto bump = [&](double centre) {
    std::vector<Complex> amplitudes(grid.count(), 0.0);
    for (std::size_t i = 0; i < grid.count(); ++i) {
      const double d = grid.point(i) - centre;
      if (std::abs(d) < 0.5 * width) {
        const double c = std::cos(std::numbers::pi * d / width);
        amplitudes[i] = c * c;
      }
    }
    WaveFunction psi(grid, std::move(amplitudes));
    if (!(psi.norm() > 0.0)) throw Error("two_interval_state: width is below the grid resolution");
    return normalize(psi);
  };
  return {bump(mid - offset), bump(mid + offset)};
}

inline WaveFunction two_interval_state(Complex a, Complex b, double gap, double width,
                                       const AxisGrid& grid, const Config& config) {
  config.validate();
  const double weight = std::norm(a) + std::norm(b);
  if (std::abs(weight - 1.0) > 1e-10)
    throw Error("two_interval_state: |a|^2 + |b|^2 = " + std::to_string(weight) + ", expected 1");
  const auto [psi1, psi2] = interval_bumps(gap, width, grid);
  std::vector<Complex> amplitudes(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) amplitudes[i] = a * psi1[i] + b * psi2[i];
  return WaveFunction(grid, std::move(amplitudes));
}

struct ImpossibilityReport {
  /// max |P12| over lattice points whose q lies strictly inside the gap.
  double max_cross_in_gap = 0.0;
  std::array<double, 4> phases{};
  /// min over (q, p) of P_ab for a = cos(pi/4), b = exp(i phi) sin(pi/4).
  std::array<double, 4> min_by_phase{};
  double min_over_sweep = 0.0;
  /// max over (q, p) of the spread of P_ab across the four phases.
  double max_phase_spread = 0.0;
  /// max over p of |phi1(p) phi2*(p)|.
  double max_momentum_product = 0.0;
  bool pass = false;
};

inline ImpossibilityReport impossibility_demo(double gap, double width, const AxisGrid& grid,
                                              const Config& config) {
  config.validate();
  const auto [psi1, psi2] = interval_bumps(gap, width, grid);
  ImpossibilityReport r;

  const PhaseSymbol cross = cross_wigner(psi1, psi2, config);
  const std::size_t n = grid.count();
  const double mid = grid.center();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(grid.point(i) - mid) >= 0.5 * gap) continue;
    for (std::size_t k = 0; k < n; ++k) r.max_cross_in_gap = std::max(r.max_cross_in_gap, std::abs(cross(i, k)));
  }

  const double theta = std::numbers::pi / 4.0;
  std::vector<double> lo(n * n, 0.0), hi(n * n, 0.0);
  for (std::size_t s = 0; s < 4; ++s) {
    const double phi = 0.5 * std::numbers::pi * static_cast<double>(s);
    r.phases[s] = phi;
    const Complex a = std::cos(theta);
    const Complex b = std::polar(std::sin(theta), phi);
    const WignerFunction w = wigner_from_wavefunction(two_interval_state(a, b, gap, width, grid, config), config);
    const auto& v = w.values();
    r.min_by_phase[s] = *std::min_element(v.begin(), v.end());
    for (std::size_t j = 0; j < v.size(); ++j) {
      lo[j] = s == 0 ? v[j] : std::min(lo[j], v[j]);
      hi[j] = s == 0 ? v[j] : std::max(hi[j], v[j]);
    }
  }
  r.min_over_sweep = *std::min_element(r.min_by_phase.begin(), r.min_by_phase.end());
  for (std::size_t j = 0; j < lo.size(); ++j) r.max_phase_spread = std::max(r.max_phase_spread, hi[j] - lo[j]);

  const auto phi1 = momentum_amplitudes(psi1, config);
  const auto phi2 = momentum_amplitudes(psi2, config);
  for (std::size_t k = 0; k < n; ++k)
    r.max_momentum_product = std::max(r.max_momentum_product, std::abs(phi1[k] * std::conj(phi2[k])));

  r.pass = r.min_over_sweep < 0.0 && r.max_cross_in_gap > 1e-3 && r.max_momentum_product > 1e-6;
  return r;
}

}  // namespace wigner
