#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wigner/husimi.hpp"
#include "wigner/transforms.hpp"

using namespace wigner;

namespace {

constexpr double kPi = std::numbers::pi;
const AxisGrid kReference(-8.0, 1.0 / 16.0, 256);
const AxisGrid kSmall(-8.0, 0.25, 64);
// dq = dp, q and p lattices coincide, so the q <-> p swap is a transpose.
const AxisGrid kSquare(-128.0 * std::sqrt(kPi / 256.0), std::sqrt(kPi / 256.0), 256);

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

WaveFunction packet(double q0, double p0, const AxisGrid& grid, double hbar = 1.0) {
  return minimum_uncertainty_packet({q0, p0, std::sqrt(0.5)}, grid, Config{hbar});
}

// Random smooth state: a few Gaussian packets with random centers and phases.
WaveFunction random_state(oracle::Rng& rng, const AxisGrid& grid) {
  std::vector<Complex> a(grid.count(), 0.0);
  const int terms = rng.integer(1, 3);
  for (int t = 0; t < terms; ++t) {
    const Complex c = rng.complex();
    const double q0 = rng.uniform(-2.0, 2.0), p0 = rng.uniform(-1.5, 1.5), w = rng.uniform(0.6, 1.2);
    for (std::size_t i = 0; i < grid.count(); ++i) {
      const double x = grid.point(i) - q0;
      a[i] += c * std::exp(-x * x / (2 * w * w)) * std::polar(1.0, p0 * grid.point(i));
    }
  }
  return normalize(WaveFunction(grid, a));
}

std::vector<WaveFunction> fixtures(const AxisGrid& grid) {
  std::vector<WaveFunction> out;
  for (unsigned n = 0; n <= 3; ++n) out.push_back(ho_eigenstate(n, grid, Config{}));
  out.push_back(packet(0.7, -0.4, grid));
  return out;
}

}  // namespace

TEST(WignerTransform, GaussianClosedForm) {
  const WignerFunction w = wigner_from_wavefunction(packet(0, 0, kReference), Config{});
  double worst = 0.0;
  for (std::size_t i = 0; i < 256; ++i)
    for (std::size_t k = 0; k < 256; ++k) {
      const double q = w.grid().q_axis().point(i), p = w.grid().p_axis().point(k);
      worst = std::max(worst, std::abs(w(i, k) - std::exp(-q * q - p * p) / kPi));
    }
  EXPECT_LE(worst, 1e-8);
  EXPECT_NEAR(w.integral(), 1.0, 1e-12);
}

TEST(WignerTransform, FirstExcitedStateAtOriginMatchesQuadrature) {
  const WignerFunction w = wigner_from_wavefunction(ho_eigenstate(1, kReference, Config{}), Config{});
  const double quad = oracle::wigner_point([](double x) { return Complex(oracle::hermite_function(1, x)); }, 0.0, 0.0, 1.0);
  EXPECT_NEAR(quad, -1.0 / kPi, 1e-9);
  EXPECT_NEAR(w(128, 128), quad, 1e-6);
}

TEST(WignerTransform, AgreesWithQuadratureAwayFromOrigin) {
  const WaveFunction psi = ho_eigenstate(2, kReference, Config{});
  const WignerFunction w = wigner_from_wavefunction(psi, Config{});
  for (auto [i, k] : {std::pair<std::size_t, std::size_t>{140, 120}, {100, 150}, {128, 133}}) {
    const double q = w.grid().q_axis().point(i), p = w.grid().p_axis().point(k);
    const double quad = oracle::wigner_point([](double x) { return Complex(oracle::hermite_function(2, x)); }, q, p, 1.0);
    EXPECT_NEAR(w(i, k), quad, 1e-8);
  }
}

TEST(WignerTransform, FftMatchesDirectLatticeSum) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const WaveFunction psi = random_state(rng, kSmall);
    const WignerFunction w = wigner_from_wavefunction(psi, Config{});
    EXPECT_LE(linf(w.values(), oracle::lattice_wigner(psi.amplitudes(), kSmall.step(), 1.0)), 1e-12);
  }
}

TEST(WignerTransform, MomentumTranslation) {
  const PhaseGrid grid = make_phase_grid(kReference, Config{});
  const double shift = grid.p_axis().step();
  const WignerFunction w0 = wigner_from_wavefunction(packet(0.3, 0.0, kReference), Config{});
  const WignerFunction w1 = wigner_from_wavefunction(packet(0.3, shift, kReference), Config{});
  double worst = 0.0;
  for (std::size_t i = 0; i < 256; ++i)
    for (std::size_t k = 1; k < 256; ++k) worst = std::max(worst, std::abs(w1(i, k) - w0(i, k - 1)));
  EXPECT_LE(worst, 1e-12);
}

TEST(WignerTransform, RejectsUnnormalisedState) {
  std::vector<Complex> a(64, 0.0);
  a[32] = 1.0;
  EXPECT_THROW(wigner_from_wavefunction(WaveFunction(kSmall, a), Config{}), Error);
}

TEST(WignerTransform, HbarScaling) {
  // Ground state for hbar: W = (1/(pi hbar)) exp(-(q^2 + p^2)/hbar).
  const double hbar = 0.25;
  const AxisGrid grid(-6.0, 12.0 / 256, 256);
  const WignerFunction w = wigner_from_wavefunction(ho_eigenstate(0, grid, Config{hbar}), Config{hbar});
  double worst = 0.0;
  for (std::size_t i = 0; i < 256; ++i)
    for (std::size_t k = 0; k < 256; ++k) {
      const double q = w.grid().q_axis().point(i), p = w.grid().p_axis().point(k);
      worst = std::max(worst, std::abs(w(i, k) - std::exp(-(q * q + p * p) / hbar) / (kPi * hbar)));
    }
  EXPECT_LE(worst, 1e-8);
}

TEST(WignerProperties, ReflectionCovariance) {
  oracle::Rng rng(3);
  for (int trial = 0; trial < 4; ++trial) {
    const WaveFunction psi = random_state(rng, kSmall);
    std::vector<Complex> reversed(psi.amplitudes().rbegin(), psi.amplitudes().rend());
    const WignerFunction w = wigner_from_wavefunction(psi, Config{});
    const WignerFunction r = wigner_from_wavefunction(WaveFunction(kSmall, reversed), Config{});
    const std::size_t n = 64;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(r(i, k), w(n - 1 - i, (n - k) % n), 1e-14);
  }
}

TEST(WignerProperties, ConjugationFlipsMomentum) {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const WaveFunction psi = random_state(rng, kSmall);
    std::vector<Complex> c(psi.amplitudes());
    for (auto& v : c) v = std::conj(v);
    const WignerFunction w = wigner_from_wavefunction(psi, Config{});
    const WignerFunction r = wigner_from_wavefunction(WaveFunction(kSmall, c), Config{});
    for (std::size_t i = 0; i < 64; ++i)
      for (std::size_t k = 0; k < 64; ++k) EXPECT_NEAR(r(i, k), w(i, (64 - k) % 64), 1e-14);
  }
}

TEST(WignerDensity, PureStateMatchesWavefunctionRoute) {
  for (const WaveFunction& psi : fixtures(kReference)) {
    const WignerFunction a = wigner_from_wavefunction(psi, Config{});
    const WignerFunction b = wigner_from_density(DensityMatrix::pure(psi), Config{});
    EXPECT_LE(linf(a.values(), b.values()), 1e-12);
  }
}

TEST(WignerDensity, MixtureIsConvexCombination) {
  const WaveFunction psi0 = ho_eigenstate(0, kReference, Config{});
  const WaveFunction psi1 = ho_eigenstate(1, kReference, Config{});
  const WignerFunction w0 = wigner_from_wavefunction(psi0, Config{});
  const WignerFunction w1 = wigner_from_wavefunction(psi1, Config{});
  const WignerFunction mix = wigner_from_density(DensityMatrix::mixture({{0.5, psi0}, {0.5, psi1}}), Config{});
  for (std::size_t j = 0; j < mix.values().size(); ++j) {
    EXPECT_NEAR(mix.values()[j], 0.5 * w0.values()[j] + 0.5 * w1.values()[j], 1e-12);
  }
}

TEST(WignerDensity, GaussianMixtureBoundedBelowByComponents) {
  const WaveFunction a = packet(-1.0, 0.0, kReference);
  const WaveFunction b = packet(1.0, 0.5, kReference);
  const WignerFunction wa = wigner_from_wavefunction(a, Config{});
  const WignerFunction wb = wigner_from_wavefunction(b, Config{});
  const WignerFunction mix = wigner_from_density(DensityMatrix::mixture({{0.5, a}, {0.5, b}}), Config{});
  for (std::size_t j = 0; j < mix.values().size(); ++j)
    EXPECT_GE(mix.values()[j], std::min(wa.values()[j], wb.values()[j]) - 1e-15);
}

TEST(WignerDensity, LinearityProperty) {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    const WaveFunction a = random_state(rng, kSmall), b = random_state(rng, kSmall);
    const double alpha = rng.uniform(0.0, 1.0);
    const WignerFunction wa = wigner_from_wavefunction(a, Config{});
    const WignerFunction wb = wigner_from_wavefunction(b, Config{});
    const WignerFunction mix = wigner_from_density(DensityMatrix::mixture({{alpha, a}, {1 - alpha, b}}), Config{});
    for (std::size_t j = 0; j < mix.values().size(); ++j)
      EXPECT_NEAR(mix.values()[j], alpha * wa.values()[j] + (1 - alpha) * wb.values()[j], 1e-13);
  }
}

TEST(WignerDensity, RandomHermitianKernelsGiveRealTransforms) {
  oracle::Rng rng(23);
  const std::size_t n = 64;
  ComplexMatrix m(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      const double envelope = std::exp(-0.05 * (std::pow(kSmall.point(a), 2) + std::pow(kSmall.point(b), 2)));
      const Complex v = a == b ? Complex(rng.uniform(0, 1)) * envelope : rng.complex() * envelope;
      m(a, b) = v;
      m(b, a) = std::conj(v);
    }
  Complex tr = 0.0;
  for (std::size_t a = 0; a < n; ++a) tr += m(a, a);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m(a, b) /= tr * kSmall.step();
  // No exception: the imaginary residue stays below 1e-12.
  EXPECT_NO_THROW(wigner_from_density(DensityMatrix(kSmall, m), Config{}));
}

TEST(MomentumForm, AgreesWithPositionForm) {
  for (const AxisGrid& grid : {kReference, kSmall}) {
    for (const WaveFunction& psi : fixtures(grid)) {
      const WignerFunction a = wigner_from_wavefunction(psi, Config{});
      const WignerFunction b = wigner_momentum_form(psi, Config{});
      EXPECT_LE(linf(a.values(), b.values()), 1e-12);
    }
  }
  oracle::Rng rng(29);
  for (int trial = 0; trial < 4; ++trial) {
    const WaveFunction psi = random_state(rng, kSmall);
    EXPECT_LE(linf(wigner_from_wavefunction(psi, Config{}).values(), wigner_momentum_form(psi, Config{}).values()), 1e-12);
  }
}

TEST(MomentumForm, SwapSymmetry) {
  for (unsigned n : {0u, 2u}) {
    const WignerFunction w = wigner_momentum_form(ho_eigenstate(n, kSquare, Config{}), Config{});
    ASSERT_DOUBLE_EQ(w.grid().p_axis().step(), w.grid().q_axis().step());
    double worst = 0.0;
    for (std::size_t i = 0; i < 256; ++i)
      for (std::size_t k = 0; k < 256; ++k) worst = std::max(worst, std::abs(w(i, k) - w(k, i)));
    EXPECT_LE(worst, 1e-8) << "n = " << n;
  }
}

TEST(WeylSymbol, IdentityAndDiagonalOperators) {
  const std::size_t n = 64;
  const double dq = kSmall.step();
  const PhaseSymbol one = weyl_symbol(ComplexMatrix::identity(n, 1.0 / (2.0 * dq)), kSmall, Config{});
  for (const auto& v : one.values()) EXPECT_LE(std::abs(v - 1.0), 1e-10);

  ComplexMatrix diag(n);
  for (std::size_t a = 0; a < n; ++a) diag(a, a) = std::cos(kSmall.point(a)) / (2.0 * dq);
  const PhaseSymbol v = weyl_symbol(diag, kSmall, Config{});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) EXPECT_LE(std::abs(v(i, k) - std::cos(kSmall.point(i))), 1e-10);
}

TEST(WeylSymbol, DensityMatrixGivesScaledWigner) {
  for (const WaveFunction& psi : fixtures(kReference)) {
    const DensityMatrix rho = DensityMatrix::pure(psi);
    const PhaseSymbol a = weyl_symbol(rho.elements(), kReference, Config{});
    const WignerFunction w = wigner_from_wavefunction(psi, Config{});
    double worst = 0.0;
    for (std::size_t j = 0; j < a.values().size(); ++j)
      worst = std::max(worst, std::abs(a.values()[j] - 2.0 * kPi * w.values()[j]));
    EXPECT_LE(worst, 1e-10);
  }
}

TEST(WeylSymbol, ShapeMismatch) {
  EXPECT_THROW(weyl_symbol(ComplexMatrix(10), kSmall, Config{}), Error);
}

TEST(WeylQuantize, PositionSymbol) {
  const PhaseGrid grid = make_phase_grid(kSmall, Config{});
  const ComplexMatrix m = weyl_quantize(sample_symbol(grid, [](double q, double) { return q * q; }), Config{});
  const double dq = kSmall.step();
  for (std::size_t a = 0; a < 64; ++a)
    for (std::size_t b = 0; b < 64; ++b) {
      if ((a + b) % 2 != 0) continue;
      const Complex expected = a == b ? Complex(kSmall.point(a) * kSmall.point(a) / (2.0 * dq)) : Complex(0.0);
      EXPECT_LE(std::abs(m(a, b) - expected), 1e-10);
    }
  const WaveFunction psi = ho_eigenstate(2, kReference, Config{});
  const ComplexMatrix big = weyl_quantize(sample_symbol(make_phase_grid(kReference, Config{}),
                                                        [](double q, double) { return q * q; }),
                                          Config{});
  const WaveFunction out = apply_kernel(big, psi);
  for (std::size_t a = 0; a < 256; ++a)
    EXPECT_LE(std::abs(out[a] - kReference.point(a) * kReference.point(a) * psi[a]), 1e-8);
}

TEST(WeylQuantize, MomentumPositionProductIsSymmetrised) {
  const PhaseGrid grid = make_phase_grid(kReference, Config{});
  const ComplexMatrix m = weyl_quantize(sample_symbol(grid, [](double q, double p) { return q * p; }), Config{});
  for (const WaveFunction& psi : fixtures(kReference)) {
    const WaveFunction out = apply_kernel(m, psi);
    // (q p + p q)/2 psi with p = -i hbar d/dx from naive DFTs.
    std::vector<Complex> qpsi(256);
    for (std::size_t a = 0; a < 256; ++a) qpsi[a] = kReference.point(a) * psi[a];
    const auto p_psi = oracle::momentum_operator(psi.amplitudes(), kReference.step(), 1.0);
    const auto p_qpsi = oracle::momentum_operator(qpsi, kReference.step(), 1.0);
    double worst = 0.0;
    for (std::size_t a = 0; a < 256; ++a)
      worst = std::max(worst, std::abs(out[a] - 0.5 * (kReference.point(a) * p_psi[a] + p_qpsi[a])));
    EXPECT_LE(worst, 1e-8);
  }
}

TEST(WeylQuantize, RealSymbolGivesHermitianMatrix) {
  oracle::Rng rng(31);
  const PhaseGrid grid = make_phase_grid(kSmall, Config{});
  std::vector<Complex> values(grid.size());
  for (auto& v : values) v = rng.uniform(-1, 1);
  const ComplexMatrix m = weyl_quantize(PhaseSymbol(grid, values), Config{});
  EXPECT_LE(max_abs_difference(m, m.adjoint()), 1e-14);
}

TEST(WeylRoundTrip, SymbolOperatorSymbolOnRandomHermitianSymbols) {
  oracle::Rng rng(37);
  for (int trial = 0; trial < 4; ++trial) {
    const std::size_t n = 64;
    ComplexMatrix h(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        const Complex v = a == b ? Complex(rng.uniform(-1, 1)) : rng.complex();
        h(a, b) = v;
        h(b, a) = std::conj(v);
      }
    const PhaseSymbol a = weyl_symbol(h, kSmall, Config{});
    const PhaseSymbol back = weyl_symbol(weyl_quantize(a, Config{}), kSmall, Config{});
    double worst = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < a.values().size(); ++j) {
      worst = std::max(worst, std::abs(a.values()[j] - back.values()[j]));
      scale = std::max(scale, std::abs(a.values()[j]));
    }
    EXPECT_LE(worst, 1e-9 * std::max(1.0, scale));
  }
}

TEST(WeylRoundTrip, OperatorSymbolOperatorOnDensityMatrices) {
  std::vector<DensityMatrix> states;
  for (const WaveFunction& psi : fixtures(kReference)) states.push_back(DensityMatrix::pure(psi));
  states.push_back(DensityMatrix::mixture(
      {{0.3, ho_eigenstate(0, kReference, Config{})}, {0.7, ho_eigenstate(3, kReference, Config{})}}));
  for (const DensityMatrix& rho : states) {
    const ComplexMatrix back = weyl_quantize(weyl_symbol(rho.elements(), kReference, Config{}), Config{});
    EXPECT_LE(max_abs_difference(back, rho.elements()), 1e-9);
  }
}

TEST(WeylQuantize, HbarMismatch) {
  const PhaseGrid grid = make_phase_grid(kSmall, Config{});
  const PhaseSymbol a = sample_symbol(grid, [](double, double) { return 1.0; });
  EXPECT_THROW(weyl_quantize(a, Config{2.0}), Error);
}

TEST(Marginals, PositionMarginal) {
  for (const WaveFunction& psi : fixtures(kReference)) {
    const WignerFunction w = wigner_from_wavefunction(psi, Config{});
    const auto m = marginal_position(w);
    double worst = 0.0, total = 0.0;
    for (std::size_t i = 0; i < 256; ++i) {
      worst = std::max(worst, std::abs(m[i] - std::norm(psi[i])));
      total += m[i] * kReference.step();
    }
    EXPECT_LE(worst, 1e-8);
    EXPECT_NEAR(total, 1.0, 1e-8);
  }
  const WignerFunction w0 = wigner_from_wavefunction(ho_eigenstate(0, kReference, Config{}), Config{});
  const auto m0 = marginal_position(w0);
  for (std::size_t i = 0; i < 256; ++i) {
    const double q = kReference.point(i);
    EXPECT_NEAR(m0[i], std::exp(-q * q) / std::sqrt(kPi), 1e-8);
  }
  const WignerFunction w1 = wigner_from_wavefunction(ho_eigenstate(1, kReference, Config{}), Config{});
  EXPECT_NEAR(marginal_position(w1)[128], 0.0, 1e-8);
}

TEST(Marginals, MomentumMarginal) {
  for (const WaveFunction& psi : fixtures(kReference)) {
    const WignerFunction w = wigner_from_wavefunction(psi, Config{});
    const auto m = marginal_momentum(w);
    const auto amp = momentum_amplitudes(psi, Config{});
    double worst = 0.0, worst_amp = 0.0, total = 0.0;
    for (std::size_t k = 0; k < 256; ++k) {
      const double p = w.grid().p_axis().point(k);
      const Complex direct = oracle::momentum_amplitude(psi.amplitudes(), kReference.min(), kReference.step(), p, 1.0);
      worst = std::max(worst, std::abs(m[k] - std::norm(direct)));
      worst_amp = std::max(worst_amp, std::abs(amp[k] - direct));
      total += m[k] * w.grid().p_axis().step();
    }
    EXPECT_LE(worst, 1e-8);
    EXPECT_LE(worst_amp, 1e-12);
    EXPECT_NEAR(total, 1.0, 1e-8);
  }
  const WignerFunction w0 = wigner_from_wavefunction(packet(0, 0, kReference), Config{});
  const auto m0 = marginal_momentum(w0);
  for (std::size_t k = 0; k < 256; ++k) {
    const double p = w0.grid().p_axis().point(k);
    EXPECT_NEAR(m0[k], std::exp(-p * p) / std::sqrt(kPi), 1e-8);
  }
}

TEST(Marginals, BoostShiftsMomentumMarginal) {
  const PhaseGrid grid = make_phase_grid(kReference, Config{});
  const double shift = 3.0 * grid.p_axis().step();
  const auto m0 = marginal_momentum(wigner_from_wavefunction(packet(0, 0, kReference), Config{}));
  const auto m1 = marginal_momentum(wigner_from_wavefunction(packet(0, shift, kReference), Config{}));
  for (std::size_t k = 3; k < 256; ++k) EXPECT_NEAR(m1[k], m0[k - 3], 1e-8);
}

TEST(Overlap, FixturePairs) {
  std::vector<WignerFunction> w;
  std::vector<WaveFunction> psi = fixtures(kReference);
  for (const auto& s : psi) w.push_back(wigner_from_wavefunction(s, Config{}));
  for (std::size_t a = 0; a < psi.size(); ++a)
    for (std::size_t b = 0; b < psi.size(); ++b)
      EXPECT_NEAR(overlap(w[a], w[b]), std::norm(inner_product(psi[a], psi[b])), 1e-6);
  EXPECT_NEAR(overlap(w[0], w[0]), 1.0, 1e-6);
  EXPECT_NEAR(overlap(w[0], w[1]), 0.0, 1e-6);
}

TEST(Overlap, SeparatedGaussians) {
  for (double d : {0.5, 1.0, 2.0}) {
    const WaveFunction a = packet(-0.5 * d, 0, kReference), b = packet(0.5 * d, 0, kReference);
    const double value = overlap(wigner_from_wavefunction(a, Config{}), wigner_from_wavefunction(b, Config{}));
    EXPECT_NEAR(value, std::exp(-0.5 * d * d), 1e-6);
    EXPECT_NEAR(value, std::norm(inner_product(a, b)), 1e-6);
  }
}

TEST(Overlap, GridMismatch) {
  const WignerFunction a = wigner_from_wavefunction(ho_eigenstate(0, kReference, Config{}), Config{});
  const WignerFunction b = wigner_from_wavefunction(ho_eigenstate(0, AxisGrid(-8.0, 0.125, 128), Config{}), Config{});
  EXPECT_THROW(overlap(a, b), Error);
}

TEST(TraceProduct, PureStateSymbol) {
  for (const WaveFunction& psi : {ho_eigenstate(0, kReference, Config{}), packet(0.5, 0.5, kReference)}) {
    const DensityMatrix rho = DensityMatrix::pure(psi);
    const PhaseSymbol a = weyl_symbol(rho.elements(), kReference, Config{});
    const Complex t = trace_product(a, a, Config{});
    EXPECT_NEAR(t.real(), 2.0 * kPi, 1e-6);
    EXPECT_NEAR(t.imag(), 0.0, 1e-6);
    const Complex matrix = kernel_trace_product(weyl_quantize(a, Config{}), weyl_quantize(a, Config{}), kReference.step());
    EXPECT_NEAR(std::abs(t - 2.0 * kPi * matrix), 0.0, 1e-6);
  }
}

TEST(TraceProduct, TwoDifferentOperators) {
  const DensityMatrix rho = DensityMatrix::pure(ho_eigenstate(1, kReference, Config{}));
  const PhaseGrid grid = make_phase_grid(kReference, Config{});
  const PhaseSymbol b = weyl_symbol(rho.elements(), kReference, Config{});
  const PhaseSymbol a = sample_symbol(grid, [](double q, double) { return std::exp(-q * q / 4); });
  const Complex t = trace_product(a, b, Config{});
  const Complex matrix = kernel_trace_product(weyl_quantize(a, Config{}), rho.elements(), kReference.step());
  EXPECT_NEAR(std::abs(t - 2.0 * kPi * matrix), 0.0, 1e-6);
}

TEST(TraceProduct, NormalisationAndOddMoment) {
  const PhaseGrid grid = make_phase_grid(kReference, Config{});
  const PhaseSymbol rho = weyl_symbol(DensityMatrix::pure(packet(0, 0, kReference)).elements(), kReference, Config{});
  const PhaseSymbol one = sample_symbol(grid, [](double, double) { return 1.0; });
  const PhaseSymbol q = sample_symbol(grid, [](double x, double) { return x; });
  EXPECT_NEAR(std::abs(trace_product(one, rho, Config{}) - 2.0 * kPi), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(trace_product(q, rho, Config{})), 0.0, 1e-8);
}

TEST(Expectation, OscillatorEnergies) {
  const PhaseGrid grid = make_phase_grid(kReference, Config{});
  const PhaseSymbol h = sample_symbol(grid, [](double q, double p) { return 0.5 * (q * q + p * p); });
  for (unsigned n = 0; n <= 3; ++n) {
    const WaveFunction psi = ho_eigenstate(n, kReference, Config{});
    const double e = expectation(wigner_from_wavefunction(psi, Config{}), h);
    EXPECT_NEAR(e, n + 0.5, n == 0 ? 1e-8 : 1e-6);
    // Matrix-element oracle: (<q^2> + <p psi|p psi>)/2.
    const auto ppsi = oracle::momentum_operator(psi.amplitudes(), kReference.step(), 1.0);
    double q2 = 0.0, p2 = 0.0;
    for (std::size_t a = 0; a < 256; ++a) {
      q2 += kReference.point(a) * kReference.point(a) * std::norm(psi[a]);
      p2 += std::norm(ppsi[a]);
    }
    EXPECT_NEAR(e, 0.5 * (q2 + p2) * kReference.step(), 1e-8);
  }
}

TEST(Expectation, SeparableObservableUsesMarginals) {
  const WaveFunction psi = packet(0.4, -0.3, kReference);
  const WignerFunction w = wigner_from_wavefunction(psi, Config{});
  const auto f = [](double q) { return std::sin(q) + q * q * q; };
  const auto g = [](double p) { return std::cos(2 * p); };
  const double value = expectation(w, sample_symbol(w.grid(), [&](double q, double p) { return f(q) + g(p); }));
  const auto mq = marginal_position(w);
  const auto mp = marginal_momentum(w);
  double reference = 0.0;
  for (std::size_t i = 0; i < 256; ++i) {
    reference += f(w.grid().q_axis().point(i)) * mq[i] * w.grid().q_axis().step();
    reference += g(w.grid().p_axis().point(i)) * mp[i] * w.grid().p_axis().step();
  }
  EXPECT_NEAR(value, reference, 1e-10);
}

TEST(Expectation, RejectsComplexSymbol) {
  const WignerFunction w = wigner_from_wavefunction(ho_eigenstate(0, kSmall, Config{}), Config{});
  const PhaseSymbol a = sample_symbol(w.grid(), [](double q, double) { return Complex(q, 1e-6); });
  EXPECT_THROW(expectation(w, a), Error);
  const PhaseSymbol tiny = sample_symbol(w.grid(), [](double q, double) { return Complex(q, 1e-12); });
  EXPECT_NO_THROW(expectation(w, tiny));
}

TEST(CrossWigner, ReducesToWignerOnDiagonal) {
  const WaveFunction psi = ho_eigenstate(2, kSmall, Config{});
  const PhaseSymbol c = cross_wigner(psi, psi, Config{});
  const WignerFunction w = wigner_from_wavefunction(psi, Config{});
  for (std::size_t j = 0; j < w.values().size(); ++j) EXPECT_LE(std::abs(c.values()[j] - w.values()[j]), 1e-14);
}
