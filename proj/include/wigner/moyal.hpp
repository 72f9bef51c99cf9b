#pragma once

// Exact star-product algebra on polynomial symbols in (q, p).
//
// Lambda acts as  a Lambda b = d_p a d_q b - d_q a d_p b  (the negative Poisson
// bracket), and a * b = sum_k (hbar/2i)^k / k! a Lambda^k b. For polynomials the
// series stops once k exceeds the smaller total degree.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wigner/error.hpp"
#include "wigner/grid.hpp"

namespace wigner {

class PolySymbol {
 public:
  /// (q degree, p degree)
  using Monomial = std::pair<int, int>;
  using Terms = std::map<Monomial, Complex>;

  static constexpr int kDefaultDegreeCap = 16;

  PolySymbol() = default;
  PolySymbol(Complex constant) { add_term(0, 0, constant); }  // NOLINT(google-explicit-constructor)

  static PolySymbol monomial(int q_degree, int p_degree, Complex coefficient = 1.0) {
    PolySymbol out;
    out.add_term(q_degree, p_degree, coefficient);
    return out;
  }
  static PolySymbol q() { return monomial(1, 0); }
  static PolySymbol p() { return monomial(0, 1); }

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  Complex coefficient(int q_degree, int p_degree) const {
    auto it = terms_.find({q_degree, p_degree});
    return it == terms_.end() ? Complex(0.0) : it->second;
  }

  int total_degree() const noexcept {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.first + m.second);
    return d;
  }

  void add_term(int q_degree, int p_degree, Complex coefficient) {
    if (q_degree < 0 || p_degree < 0) throw Error("PolySymbol: negative degree");
    if (q_degree + p_degree > kDefaultDegreeCap)
      throw Error("PolySymbol: total degree " + std::to_string(q_degree + p_degree) +
                  " exceeds cap " + std::to_string(kDefaultDegreeCap));
    if (coefficient == Complex(0.0)) return;
    auto [it, inserted] = terms_.try_emplace({q_degree, p_degree}, coefficient);
    if (!inserted) {
      it->second += coefficient;
      if (it->second == Complex(0.0)) terms_.erase(it);
    }
  }

  PolySymbol& operator+=(const PolySymbol& other) {
    for (const auto& [m, c] : other.terms_) add_term(m.first, m.second, c);
    return *this;
  }
  PolySymbol& operator-=(const PolySymbol& other) {
    for (const auto& [m, c] : other.terms_) add_term(m.first, m.second, -c);
    return *this;
  }
  PolySymbol& operator*=(Complex s) {
    if (s == Complex(0.0)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      it = (it->second == Complex(0.0)) ? terms_.erase(it) : std::next(it);
    }
    return *this;
  }

  friend PolySymbol operator+(PolySymbol a, const PolySymbol& b) { return a += b; }
  friend PolySymbol operator-(PolySymbol a, const PolySymbol& b) { return a -= b; }
  friend PolySymbol operator*(PolySymbol a, Complex s) { return a *= s; }
  friend PolySymbol operator*(Complex s, PolySymbol a) { return a *= s; }
  friend PolySymbol operator-(PolySymbol a) { return a *= -1.0; }

  /// Commutative pointwise product.
  friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b) {
    PolySymbol out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_)
        out.add_term(ma.first + mb.first, ma.second + mb.second, ca * cb);
    return out;
  }

  bool operator==(const PolySymbol&) const = default;

  /// d^nq/dq^nq d^np/dp^np
  PolySymbol derivative(int nq, int np) const {
    PolySymbol out;
    for (const auto& [m, c] : terms_) {
      if (m.first < nq || m.second < np) continue;
      double factor = 1.0;
      for (int j = 0; j < nq; ++j) factor *= m.first - j;
      for (int j = 0; j < np; ++j) factor *= m.second - j;
      out.add_term(m.first - nq, m.second - np, c * factor);
    }
    return out;
  }

  PolySymbol conj() const {
    PolySymbol out;
    for (const auto& [m, c] : terms_) out.add_term(m.first, m.second, std::conj(c));
    return out;
  }

  Complex evaluate(double qv, double pv) const {
    Complex s = 0.0;
    for (const auto& [m, c] : terms_) s += c * std::pow(qv, m.first) * std::pow(pv, m.second);
    return s;
  }

 private:
  Terms terms_;
};

/// Largest coefficient-wise difference, relative to the largest coefficient.
inline double relative_difference(const PolySymbol& a, const PolySymbol& b) {
  double scale = 0.0;
  for (const auto& [m, c] : a.terms()) scale = std::max(scale, std::abs(c));
  for (const auto& [m, c] : b.terms()) scale = std::max(scale, std::abs(c));
  const PolySymbol diff = a - b;
  double worst = 0.0;
  for (const auto& [m, c] : diff.terms()) worst = std::max(worst, std::abs(c));
  return scale == 0.0 ? worst : worst / scale;
}

inline PhaseSymbol sample_poly(const PolySymbol& a, const PhaseGrid& grid) {
  return sample_symbol(grid, [&](double qv, double pv) { return a.evaluate(qv, pv); });
}

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

}  // namespace detail

/// a Lambda^k b = sum_j (-1)^j C(k,j) d_p^{k-j} d_q^j a  d_q^{k-j} d_p^j b
inline PolySymbol lambda_power_apply(const PolySymbol& a, const PolySymbol& b, int k) {
  if (k < 0) throw Error("lambda_power_apply: k must be non-negative");
  PolySymbol out;
  for (int j = 0; j <= k; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const PolySymbol da = a.derivative(j, k - j);
    if (da.is_zero()) continue;
    const PolySymbol db = b.derivative(k - j, j);
    if (db.is_zero()) continue;
    out += (da * db) * (sign * detail::binomial(k, j));
  }
  return out;
}

namespace detail {

inline int series_length(const PolySymbol& a, const PolySymbol& b) {
  if (a.is_zero() || b.is_zero()) return -1;
  return std::min(a.total_degree(), b.total_degree());
}

}  // namespace detail

/// Coefficients T_k of a * b = sum_k hbar^k T_k, T_k = (1/2i)^k / k! a Lambda^k b.
inline std::vector<PolySymbol> star_product_orders(const PolySymbol& a, const PolySymbol& b) {
  const int kmax = detail::series_length(a, b);
  std::vector<PolySymbol> out;
  Complex factor = 1.0;
  const Complex step = 1.0 / Complex(0.0, 2.0);
  for (int k = 0; k <= kmax; ++k) {
    out.push_back(lambda_power_apply(a, b, k) * (factor / detail::factorial(k)));
    factor *= step;
  }
  return out;
}

inline PolySymbol star_product(const PolySymbol& a, const PolySymbol& b, const Config& config) {
  config.validate();
  const int kmax = detail::series_length(a, b);
  const Complex step = config.hbar / Complex(0.0, 2.0);
  PolySymbol out;
  Complex factor = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    out += lambda_power_apply(a, b, k) * (factor / detail::factorial(k));
    factor *= step;
  }
  return out;
}

/// The same product with the exponential acting from b onto a:
/// sum_k (-hbar/2i)^k / k! b Lambda^k a.
inline PolySymbol star_product_reversed(const PolySymbol& a, const PolySymbol& b,
                                        const Config& config) {
  config.validate();
  const int kmax = detail::series_length(a, b);
  const Complex step = -config.hbar / Complex(0.0, 2.0);
  PolySymbol out;
  Complex factor = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    out += lambda_power_apply(b, a, k) * (factor / detail::factorial(k));
    factor *= step;
  }
  return out;
}

namespace detail {

using PolyOperator = std::function<PolySymbol(const PolySymbol&)>;

// Applies the Weyl-ordered operator a(X, Y) to f, with X, Y satisfying a
// canonical commutation relation. Uses the ordering
//   q^m p^n -> 2^-m sum_k C(m, k) X^k Y^n X^(m-k).
inline PolySymbol apply_weyl_ordered(const PolySymbol& a, const PolyOperator& x,
                                     const PolyOperator& y, const PolySymbol& f) {
  PolySymbol out;
  for (const auto& [mono, c] : a.terms()) {
    const auto [m, n] = mono;
    PolySymbol sum;
    for (int k = 0; k <= m; ++k) {
      PolySymbol g = f;
      for (int j = 0; j < m - k; ++j) g = x(g);
      for (int j = 0; j < n; ++j) g = y(g);
      for (int j = 0; j < k; ++j) g = x(g);
      sum += g * binomial(m, k);
    }
    out += sum * (c / std::ldexp(1.0, m));
  }
  return out;
}

}  // namespace detail

/// a * b as the Bopp-operator image a(Q, P) b, Q = q - (hbar/2i) d_p,
/// P = p + (hbar/2i) d_q.
inline PolySymbol star_product_bopp(const PolySymbol& a, const PolySymbol& b, const Config& config) {
  config.validate();
  const Complex s = config.hbar / Complex(0.0, 2.0);
  const detail::PolyOperator big_q = [&](const PolySymbol& f) {
    return PolySymbol::q() * f - f.derivative(0, 1) * s;
  };
  const detail::PolyOperator big_p = [&](const PolySymbol& f) {
    return PolySymbol::p() * f + f.derivative(1, 0) * s;
  };
  return detail::apply_weyl_ordered(a, big_q, big_p, b);
}

/// a * b as b(Q*, P*) a, Q* = q + (hbar/2i) d_p, P* = p - (hbar/2i) d_q.
inline PolySymbol star_product_bopp_conjugate(const PolySymbol& a, const PolySymbol& b,
                                              const Config& config) {
  config.validate();
  const Complex s = config.hbar / Complex(0.0, 2.0);
  const detail::PolyOperator big_q = [&](const PolySymbol& f) {
    return PolySymbol::q() * f + f.derivative(0, 1) * s;
  };
  const detail::PolyOperator big_p = [&](const PolySymbol& f) {
    return PolySymbol::p() * f - f.derivative(1, 0) * s;
  };
  return detail::apply_weyl_ordered(b, big_q, big_p, a);
}

/// (1/(i hbar)) (h * w - w * h)
inline PolySymbol moyal_bracket_rhs(const PolySymbol& h, const PolySymbol& w, const Config& config) {
  const PolySymbol commutator = star_product(h, w, config) - star_product(w, h, config);
  return commutator * (1.0 / Complex(0.0, config.hbar));
}

/// -(2/hbar) h sin(hbar Lambda / 2) w, summed over odd Lambda powers.
inline PolySymbol moyal_bracket_sine(const PolySymbol& h, const PolySymbol& w, const Config& config) {
  config.validate();
  const int kmax = detail::series_length(h, w);
  PolySymbol out;
  for (int k = 1; k <= kmax; k += 2) {
    const double sign = ((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    const double c = -2.0 / config.hbar * sign * std::pow(config.hbar / 2.0, k) / detail::factorial(k);
    out += lambda_power_apply(h, w, k) * c;
  }
  return out;
}

/// Classical Poisson bracket {a, b} = d_q a d_p b - d_p a d_q b.
inline PolySymbol poisson_bracket(const PolySymbol& a, const PolySymbol& b) {
  return -lambda_power_apply(a, b, 1);
}

}  // namespace wigner
