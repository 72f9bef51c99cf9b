#pragma once

// Wigner and Weyl transforms on the y = 2*m*dq lattice.
//
// For a kernel K(a, b) = <q_a|K|q_b> the row q_i of the transform is
//
//   T(q_i, p_k) = c * sum_m K(i-m, i+m) exp(2i p_k m dq / hbar),  m in [-N/2, N/2)
//
// and since 2 p_k m dq / hbar = 2 pi (k - N/2) m / N it is one backward FFT per
// row of f(m) (-1)^m. Pairs (i-m, i+m) outside the box contribute zero: the
// states live in the box and decay at its edges, so the kernel is treated as
// zero-extended rather than wrapped (wrapping would alias (i, m) onto
// (i + N/2, m + N/2)).

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

namespace detail {

inline constexpr double kImagResidueTolerance = 1e-12;

// Lattice transform of a kernel accessor, without the overall constant.
template <class Kernel>
ComplexBuffer lattice_transform(std::size_t n, Kernel&& kernel) {
  ComplexBuffer data(n * n);
  const long nn = static_cast<long>(n);
  for (long i = 0; i < nn; ++i) {
    Complex* row = data.data() + i * nn;
    for (std::size_t j = 0; j < n; ++j) {
      const long m = signed_index(j, n);
      const long a = i - m;
      const long b = i + m;
      if (a < 0 || a >= nn || b < 0 || b >= nn) continue;
      const Complex value = kernel(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
      row[j] = (m % 2 == 0) ? value : -value;
    }
  }
  fft_rows(data, n, n, FftSign::backward);
  return data;
}

inline std::vector<double> checked_real(const ComplexBuffer& data, double scale, const char* what) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Complex v = data[i] * scale;
    if (std::abs(v.imag()) > kImagResidueTolerance)
      throw Error(std::string(what) + ": imaginary residue " + std::to_string(std::abs(v.imag())) +
                  " (input not Hermitian?)");
    out[i] = v.real();
  }
  return out;
}

inline void check_hbar(const PhaseGrid& grid, const Config& config, const char* what) {
  if (grid.hbar() != config.hbar) throw Error(std::string(what) + ": grid hbar differs from config");
}

inline void require_same_grid(const PhaseGrid& a, const PhaseGrid& b, const char* what) {
  if (!(a == b)) throw Error(std::string(what) + ": grid mismatch");
}

inline void require_normalized(const WaveFunction& psi, const Config& config, const char* what) {
  if (!psi.is_normalized(config))
    throw Error(std::string(what) + ": state is not normalised (norm " + std::to_string(psi.norm()) +
                ")");
}

}  // namespace detail

inline WignerFunction wigner_from_wavefunction(const WaveFunction& psi, const Config& config) {
  config.validate();
  detail::require_normalized(psi, config, "wigner_from_wavefunction");
  const AxisGrid& q = psi.grid();
  const auto& amp = psi.amplitudes();
  auto raw = detail::lattice_transform(
      q.count(), [&](std::size_t a, std::size_t b) { return amp[a] * std::conj(amp[b]); });
  const double scale = q.step() / (std::numbers::pi * config.hbar);
  return WignerFunction(make_phase_grid(q, config),
                        detail::checked_real(raw, scale, "wigner_from_wavefunction"));
}

inline WignerFunction wigner_from_density(const DensityMatrix& rho, const Config& config) {
  config.validate();
  const AxisGrid& q = rho.grid();
  const ComplexMatrix& k = rho.elements();
  auto raw = detail::lattice_transform(q.count(), [&](std::size_t a, std::size_t b) { return k(a, b); });
  const double scale = q.step() / (std::numbers::pi * config.hbar);
  return WignerFunction(make_phase_grid(q, config),
                        detail::checked_real(raw, scale, "wigner_from_density"));
}

/// Bilinear Wigner kernel of (psi1, psi2): complex in general, and equal to the
/// ordinary Wigner function when psi1 = psi2.
inline PhaseSymbol cross_wigner(const WaveFunction& psi1, const WaveFunction& psi2,
                                const Config& config) {
  config.validate();
  if (!(psi1.grid() == psi2.grid())) throw Error("cross_wigner: grid mismatch");
  const AxisGrid& q = psi1.grid();
  const auto& a1 = psi1.amplitudes();
  const auto& a2 = psi2.amplitudes();
  auto raw = detail::lattice_transform(
      q.count(), [&](std::size_t a, std::size_t b) { return a1[a] * std::conj(a2[b]); });
  const double scale = q.step() / (std::numbers::pi * config.hbar);
  std::vector<Complex> values(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) values[i] = raw[i] * scale;
  return PhaseSymbol(make_phase_grid(q, config), std::move(values));
}

/// Momentum amplitudes psi~(p_k) = dq/sqrt(2 pi hbar) sum_a psi_a exp(-i p_k q_a / hbar).
inline std::vector<Complex> momentum_amplitudes(const WaveFunction& psi, const Config& config) {
  config.validate();
  const AxisGrid& q = psi.grid();
  const std::size_t n = q.count();
  const PhaseGrid grid = make_phase_grid(q, config);
  // p_k q_a / hbar = p_k q_min / hbar + 2 pi (k - N/2) a / (2N): a zero-padded
  // length-2N transform evaluated at bin (k - N/2) mod 2N.
  detail::ComplexBuffer padded(2 * n);
  std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), padded.begin());
  detail::fft(padded, detail::FftSign::forward);
  const double scale = q.step() / std::sqrt(2.0 * std::numbers::pi * config.hbar);
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = grid.p_axis().point(k);
    const std::size_t bin = (k + 2 * n - n / 2) % (2 * n);
    out[k] = scale * std::polar(1.0, -p * q.min() / config.hbar) * padded[bin];
  }
  return out;
}

/// Wigner function through the momentum representation:
///   P(q, p) = 1/(pi hbar) int du phi(p + u) phi*(p - u) exp(2i q u / hbar).
/// Independent of the position route up to rounding.
inline WignerFunction wigner_momentum_form(const WaveFunction& psi, const Config& config) {
  config.validate();
  detail::require_normalized(psi, config, "wigner_momentum_form");
  const AxisGrid& q = psi.grid();
  const std::size_t n = q.count();
  const std::size_t n2 = 2 * n;

  // phi(l dp) up to a phase exp(-i l dp q_min / hbar) that cancels against the
  // q_min part of exp(2i q u / hbar).
  detail::ComplexBuffer phi(n2);
  std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), phi.begin());
  detail::fft(phi, detail::FftSign::forward);

  // Column k: sum over u = n dp, n in [0, 2N), folded to length N, then one
  // backward transform over the q index.
  detail::ComplexBuffer columns(n * n);
  detail::ComplexBuffer h(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(h.begin(), h.end(), Complex(0.0));
    const long centre = static_cast<long>(k) - static_cast<long>(n / 2);
    for (std::size_t s = 0; s < n2; ++s) {
      const long l_plus = centre + static_cast<long>(s);
      const long l_minus = centre - static_cast<long>(s);
      const auto wrap = [&](long l) {
        return static_cast<std::size_t>(((l % static_cast<long>(n2)) + static_cast<long>(n2)) %
                                        static_cast<long>(n2));
      };
      h[s % n] += phi[wrap(l_plus)] * std::conj(phi[wrap(l_minus)]);
    }
    detail::fft(h, detail::FftSign::backward);
    for (std::size_t i = 0; i < n; ++i) columns[i * n + k] = h[i];
  }
  const double scale = q.step() / (std::numbers::pi * config.hbar) / static_cast<double>(n2);
  return WignerFunction(make_phase_grid(q, config),
                        detail::checked_real(columns, scale, "wigner_momentum_form"));
}

/// Weyl symbol of a kernel matrix M(a, b) = <q_a|A|q_b>:
///   A(q_i, p_k) = 2 dq sum_m M(i-m, i+m) exp(2i p_k m dq / hbar).
/// Only pairs with a + b even are read. The band-limited delta has diagonal
/// 1/(2 dq), so identity/(2 dq) maps to the constant symbol 1.
inline PhaseSymbol weyl_symbol(const ComplexMatrix& op, const AxisGrid& q, const Config& config) {
  config.validate();
  if (op.rows() != q.count())
    throw Error("weyl_symbol: matrix is " + std::to_string(op.rows()) + "x" +
                std::to_string(op.rows()) + ", grid has " + std::to_string(q.count()) + " points");
  auto raw = detail::lattice_transform(q.count(), [&](std::size_t a, std::size_t b) { return op(a, b); });
  const double scale = 2.0 * q.step();
  std::vector<Complex> values(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) values[i] = raw[i] * scale;
  return PhaseSymbol(make_phase_grid(q, config), std::move(values));
}

namespace detail {

// Band-limited half-sample interpolation of one sublattice. `samples` holds
// values at positions 2j (+ offset); the result holds values at 2j + 1.
inline void half_shift(ComplexBuffer& samples) {
  const std::size_t m = samples.size();
  fft(samples, FftSign::forward);
  for (std::size_t l = 0; l < m; ++l) {
    const long s = signed_index(l, m);
    if (m % 2 == 0 && s == -static_cast<long>(m / 2)) {
      samples[l] = 0.0;
      continue;
    }
    samples[l] *= std::polar(1.0, std::numbers::pi * static_cast<double>(s) / static_cast<double>(m));
  }
  fft(samples, FftSign::backward);
  for (auto& v : samples) v /= static_cast<double>(m);
}

}  // namespace detail

/// Kernel matrix of the Weyl-quantised symbol. Even pairs (a + b even) invert
/// weyl_symbol exactly; odd pairs are filled by band-limited interpolation
/// along rows and along columns, averaged so that a real symbol gives a
/// Hermitian matrix.
inline ComplexMatrix weyl_quantize(const PhaseSymbol& symbol, const Config& config) {
  config.validate();
  detail::check_hbar(symbol.grid(), config, "weyl_quantize");
  const AxisGrid& q = symbol.grid().q_axis();
  const std::size_t n = q.count();
  const long nn = static_cast<long>(n);

  detail::ComplexBuffer data(symbol.values().begin(), symbol.values().end());
  detail::fft_rows(data, n, n, detail::FftSign::forward);
  const double scale = 1.0 / (static_cast<double>(n) * 2.0 * q.step());

  ComplexMatrix out(n);
  for (long i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const long m = detail::signed_index(j, n);
      const long a = i - m;
      const long b = i + m;
      if (a < 0 || a >= nn || b < 0 || b >= nn) continue;
      const Complex v = data[static_cast<std::size_t>(i) * n + j] * scale;
      out(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = (m % 2 == 0) ? v : -v;
    }
  }

  const std::size_t half = n / 2;
  ComplexMatrix rows(n), cols(n);
  detail::ComplexBuffer line(half);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t parity = a % 2;
    for (std::size_t j = 0; j < half; ++j) line[j] = out(a, parity + 2 * j);
    detail::half_shift(line);
    for (std::size_t j = 0; j < half; ++j) rows(a, (parity + 2 * j + 1) % n) = line[j];

    for (std::size_t j = 0; j < half; ++j) line[j] = out(parity + 2 * j, a);
    detail::half_shift(line);
    for (std::size_t j = 0; j < half; ++j) cols((parity + 2 * j + 1) % n, a) = line[j];
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if ((a + b) % 2 == 1) out(a, b) = 0.5 * (rows(a, b) + cols(a, b));
  return out;
}

/// (K psi)(q_a) = sum_b K(a, b) psi_b dq.
inline WaveFunction apply_kernel(const ComplexMatrix& k, const WaveFunction& psi) {
  const std::size_t n = psi.size();
  if (k.rows() != n) throw Error("apply_kernel: shape mismatch");
  std::vector<Complex> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    Complex s = 0.0;
    for (std::size_t b = 0; b < n; ++b) s += k(a, b) * psi[b];
    out[a] = s * psi.grid().step();
  }
  return WaveFunction(psi.grid(), std::move(out));
}

/// Tr(A B) for kernel matrices: dq^2 sum_ab K_A(a, b) K_B(b, a).
inline Complex kernel_trace_product(const ComplexMatrix& a, const ComplexMatrix& b, double step) {
  if (a.rows() != b.rows()) throw Error("kernel_trace_product: shape mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) s += a(i, j) * b(j, i);
  return s * step * step;
}

inline std::vector<double> marginal_position(const WignerFunction& w) {
  const std::size_t n = w.grid().count();
  const double dp = w.grid().p_axis().step();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w(i, k);
    out[i] = s * dp;
  }
  return out;
}

inline std::vector<double> marginal_momentum(const WignerFunction& w) {
  const std::size_t n = w.grid().count();
  const double dq = w.grid().q_axis().step();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) out[k] += w(i, k);
  for (auto& v : out) v *= dq;
  return out;
}

inline double overlap(const WignerFunction& w1, const WignerFunction& w2) {
  detail::require_same_grid(w1.grid(), w2.grid(), "overlap");
  double s = 0.0;
  for (std::size_t i = 0; i < w1.values().size(); ++i) s += w1.values()[i] * w2.values()[i];
  return 2.0 * std::numbers::pi * w1.hbar() * s * w1.grid().cell();
}

inline Complex trace_product(const PhaseSymbol& a, const PhaseSymbol& b, const Config& config) {
  detail::require_same_grid(a.grid(), b.grid(), "trace_product");
  detail::check_hbar(a.grid(), config, "trace_product");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) s += a.values()[i] * b.values()[i];
  return s * a.grid().cell();
}

inline double expectation(const WignerFunction& w, const PhaseSymbol& symbol) {
  detail::require_same_grid(w.grid(), symbol.grid(), "expectation");
  double s = 0.0;
  for (std::size_t i = 0; i < w.values().size(); ++i) {
    const Complex a = symbol.values()[i];
    if (std::abs(a.imag()) > 1e-10)
      throw Error("expectation: symbol is not real (imaginary part " + std::to_string(a.imag()) +
                  ")");
    s += w.values()[i] * a.real();
  }
  return s * w.grid().cell();
}

}  // namespace wigner
