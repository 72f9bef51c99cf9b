#pragma once

// Text formats: grid files, wavefunction files, potential tables, key = value
// run configs, and the polynomial symbol syntax used on the command line.
//
// All numbers are written with std::to_chars, so output does not depend on
// the C or C++ locale.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <utility>
#include <vector>

#include "wigner/error.hpp"
#include "wigner/grid.hpp"
#include "wigner/moyal.hpp"

namespace wigner::io {

/// Fixed scientific notation with 17 significant digits.
inline std::string format_fixed(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, r.ptr);
}

/// Shortest representation that round-trips.
inline std::string format_shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// %g-style with the given number of significant digits.
inline std::string format_significant(double v, int digits) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc() || r.ptr != last) throw IoError(what + ": not a number: '" + std::string(text) + "'");
  return v;
}

inline std::size_t parse_count(std::string_view text, const std::string& what) {
  std::size_t v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    throw IoError(what + ": not a count: '" + std::string(text) + "'");
  return v;
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::string trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  const auto b = std::find_if(s.begin(), s.end(), not_space);
  const auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string(b, e) : std::string();
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) throw IoError(what_ + ": unexpected end of file after line " + std::to_string(line_));
    ++line_;
    return line;
  }

  std::vector<std::string_view> header(std::string& storage, std::string_view tag, std::size_t fields) {
    storage = next();
    auto parts = split_ws(storage);
    if (parts.size() != fields + 2 || parts[0] != "#" || parts[1] != tag)
      throw IoError(where() + ": expected '# " + std::string(tag) + "' header with " + std::to_string(fields) +
                    " field(s)");
    return {parts.begin() + 2, parts.end()};
  }

  std::string where() const { return what_ + " line " + std::to_string(line_); }

 private:
  std::istream& in_;
  std::string what_;
  std::size_t line_ = 0;
};

inline void write_axis(std::ostream& out, char name, const AxisGrid& axis) {
  out << "# " << name << ' ' << format_fixed(axis.min()) << ' ' << format_fixed(axis.step()) << ' '
      << axis.count() << '\n';
}

inline AxisGrid read_axis(LineReader& reader, std::string_view name) {
  std::string storage;
  const auto f = reader.header(storage, name, 3);
  const std::string where = reader.where();
  try {
    return AxisGrid(parse_double(f[0], where), parse_double(f[1], where), parse_count(f[2], where));
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw IoError(where + ": " + e.what());
  }
}

inline double read_hbar(LineReader& reader) {
  std::string storage;
  const auto f = reader.header(storage, "hbar", 1);
  return parse_double(f[0], reader.where());
}

inline void expect_magic(LineReader& reader, std::string_view magic) {
  if (trim(reader.next()) != magic) throw IoError(reader.where() + ": expected '" + std::string(magic) + "'");
}

}  // namespace detail

/// Real values on a phase grid as written in a grid file.
struct GridTable {
  double hbar;
  AxisGrid q;
  AxisGrid p;
  std::vector<double> values;
};

inline void write_grid(std::ostream& out, const PhaseGrid& grid, const std::vector<double>& values) {
  const std::size_t n = grid.count();
  if (values.size() != n * n) throw IoError("write_grid: value count does not match grid");
  out << "# wigner-grid v1\n";
  out << "# hbar " << format_fixed(grid.hbar()) << '\n';
  detail::write_axis(out, 'q', grid.q_axis());
  detail::write_axis(out, 'p', grid.p_axis());
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    line.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) line += ' ';
      line += format_fixed(values[i * n + k]);
    }
    line += '\n';
    out << line;
  }
}

inline GridTable read_grid(std::istream& in) {
  detail::LineReader reader(in, "grid file");
  detail::expect_magic(reader, "# wigner-grid v1");
  const double hbar = detail::read_hbar(reader);
  const AxisGrid q = detail::read_axis(reader, "q");
  const AxisGrid p = detail::read_axis(reader, "p");
  std::vector<double> values;
  values.reserve(q.count() * p.count());
  for (std::size_t i = 0; i < q.count(); ++i) {
    const std::string line = reader.next();
    const auto parts = detail::split_ws(line);
    if (parts.size() != p.count())
      throw IoError(reader.where() + ": expected " + std::to_string(p.count()) + " values, found " +
                    std::to_string(parts.size()));
    for (auto part : parts) values.push_back(parse_double(part, reader.where()));
  }
  return GridTable{hbar, q, p, std::move(values)};
}

inline void write_wavefunction(std::ostream& out, const WaveFunction& psi, double hbar) {
  out << "# wavefunction v1\n";
  out << "# hbar " << format_fixed(hbar) << '\n';
  detail::write_axis(out, 'q', psi.grid());
  for (const auto& a : psi.amplitudes()) out << format_fixed(a.real()) << ' ' << format_fixed(a.imag()) << '\n';
}

struct WaveFunctionFile {
  double hbar;
  WaveFunction psi;
};

inline WaveFunctionFile read_wavefunction(std::istream& in) {
  detail::LineReader reader(in, "wavefunction file");
  detail::expect_magic(reader, "# wavefunction v1");
  const double hbar = detail::read_hbar(reader);
  const AxisGrid q = detail::read_axis(reader, "q");
  std::vector<Complex> amplitudes;
  amplitudes.reserve(q.count());
  for (std::size_t i = 0; i < q.count(); ++i) {
    const std::string line = reader.next();
    const auto parts = detail::split_ws(line);
    if (parts.size() != 2) throw IoError(reader.where() + ": expected 're im'");
    amplitudes.emplace_back(parse_double(parts[0], reader.where()), parse_double(parts[1], reader.where()));
  }
  return WaveFunctionFile{hbar, WaveFunction(q, std::move(amplitudes))};
}

inline void write_potential(std::ostream& out, const AxisGrid& grid, const std::vector<double>& values) {
  if (values.size() != grid.count()) throw IoError("write_potential: value count does not match grid");
  out << "# potential v1\n";
  detail::write_axis(out, 'q', grid);
  for (double v : values) out << format_fixed(v) << '\n';
}

struct PotentialFile {
  AxisGrid grid;
  std::vector<double> values;
};

inline PotentialFile read_potential(std::istream& in) {
  detail::LineReader reader(in, "potential file");
  detail::expect_magic(reader, "# potential v1");
  const AxisGrid q = detail::read_axis(reader, "q");
  std::vector<double> values;
  for (std::size_t i = 0; i < q.count(); ++i) values.push_back(parse_double(detail::trim(reader.next()), reader.where()));
  return PotentialFile{q, std::move(values)};
}

/// Two-column table "x value", one row per point.
inline void write_table(std::ostream& out, const AxisGrid& axis, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    out << format_fixed(axis.point(i)) << ' ' << format_fixed(values[i]) << '\n';
}

/// Flat `key = value` file. Blank lines and `#` comments are ignored.
struct KeyValues {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::map<std::string, Entry> entries;

  bool has(const std::string& key) const { return entries.count(key) != 0; }
};

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(text).substr(0, eq));
    const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
    if (out.has(key))
      throw ConfigError(line_no, "duplicate key '" + key + "' (first set on line " +
                                     std::to_string(out.entries.at(key).line) + ")");
    out.entries.emplace(key, KeyValues::Entry{value, line_no});
  }
  return out;
}

// Polynomial syntax:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := number | ('q' | 'p' | 'i') ['^' digits] | '(' expr ')'
// e.g. "q^2*p + 0.5*i*p" or "(1.5 - 2*i)*q".
namespace detail {

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : text_(text) {}

  PolySymbol parse() {
    PolySymbol out = expr();
    skip();
    if (pos_ != text_.size()) throw ParseError(pos_, std::string("unexpected '") + peek() + "'");
    return out;
  }

 private:
  char peek() const { return text_[pos_]; }
  bool at(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

  void skip() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  PolySymbol expr() {
    skip();
    if (pos_ == text_.size()) throw ParseError(pos_, "empty polynomial");
    bool negative = false;
    if (at('+') || at('-')) {
      negative = at('-');
      ++pos_;
    }
    PolySymbol out = term() * (negative ? -1.0 : 1.0);
    while (true) {
      skip();
      if (pos_ == text_.size() || at(')')) break;
      const char c = peek();
      if (c != '+' && c != '-') throw ParseError(pos_, std::string("expected '+', '-' or '*', found '") + c + "'");
      ++pos_;
      out += term() * (c == '-' ? -1.0 : 1.0);
    }
    return out;
  }

  PolySymbol term() {
    PolySymbol out = factor();
    while (true) {
      skip();
      if (!at('*')) break;
      ++pos_;
      const std::size_t start = pos_;
      PolySymbol f = factor();
      try {
        out = out * f;
      } catch (const Error&) {
        throw ParseError(start, "term degree exceeds " + std::to_string(PolySymbol::kDefaultDegreeCap));
      }
    }
    return out;
  }

  PolySymbol factor() {
    skip();
    if (pos_ == text_.size()) throw ParseError(pos_, "expected a number, 'q', 'p', 'i' or '('");
    const std::size_t start = pos_;
    const char c = peek();
    if ((c >= '0' && c <= '9') || c == '.') {
      double v = 0.0;
      const auto r = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
      if (r.ec != std::errc()) throw ParseError(pos_, "malformed number");
      pos_ = static_cast<std::size_t>(r.ptr - text_.data());
      return PolySymbol(v);
    }
    if (c == '(') {
      ++pos_;
      PolySymbol inner = expr();
      if (!at(')')) throw ParseError(pos_, "expected ')'");
      ++pos_;
      return inner;
    }
    if (c != 'q' && c != 'p' && c != 'i') throw ParseError(pos_, std::string("unexpected '") + c + "'");
    ++pos_;
    if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(peek())))
      throw ParseError(start, "unknown symbol");
    int power = 1;
    skip();
    if (at('^')) {
      ++pos_;
      skip();
      const std::size_t digits = pos_;
      while (pos_ < text_.size() && peek() >= '0' && peek() <= '9') ++pos_;
      if (pos_ == digits) throw ParseError(pos_, "expected an integer exponent");
      if (pos_ - digits > 3) throw ParseError(digits, "exponent too large");
      power = std::stoi(std::string(text_.substr(digits, pos_ - digits)));
    }
    if (c == 'i') return PolySymbol(std::pow(Complex(0.0, 1.0), power));
    if (power > PolySymbol::kDefaultDegreeCap)
      throw ParseError(start, "term degree exceeds " + std::to_string(PolySymbol::kDefaultDegreeCap));
    return c == 'q' ? PolySymbol::monomial(power, 0) : PolySymbol::monomial(0, power);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct TermKey {
  int hbar_order;
  int q;
  int p;
};

inline bool term_before(const TermKey& a, const TermKey& b) {
  if (a.hbar_order != b.hbar_order) return a.hbar_order < b.hbar_order;
  if (a.q + a.p != b.q + b.p) return a.q + a.p > b.q + b.p;
  return a.q > b.q;
}

inline void append_power(std::string& s, const char* name, int power) {
  if (power == 0) return;
  if (!s.empty()) s += '*';
  s += name;
  if (power > 1) s += '^' + std::to_string(power);
}

// Returns the term text without its leading sign and whether it is negative.
inline std::pair<std::string, bool> format_term(Complex c, const TermKey& key) {
  std::string factors;
  append_power(factors, "q", key.q);
  append_power(factors, "p", key.p);
  append_power(factors, "hbar", key.hbar_order);

  std::string coeff;
  bool negative = false;
  if (c.imag() == 0.0 || c.real() == 0.0) {
    const bool imaginary = c.real() == 0.0 && c.imag() != 0.0;
    const double v = imaginary ? c.imag() : c.real();
    negative = v < 0.0;
    const double mag = std::abs(v);
    if (imaginary)
      coeff = mag == 1.0 ? "i" : format_shortest(mag) + "*i";
    else if (mag != 1.0 || factors.empty())
      coeff = format_shortest(mag);
  } else {
    coeff = "(" + format_shortest(c.real()) + (c.imag() < 0.0 ? " - " : " + ") + format_shortest(std::abs(c.imag())) + "*i)";
  }
  if (coeff.empty()) return {factors, negative};
  if (factors.empty()) return {coeff, negative};
  return {coeff + "*" + factors, negative};
}

inline std::string join_terms(std::vector<std::pair<TermKey, Complex>> terms) {
  if (terms.empty()) return "0";
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return term_before(a.first, b.first); });
  std::string out;
  for (const auto& [key, c] : terms) {
    const auto [text, negative] = format_term(c, key);
    if (out.empty())
      out = negative ? "-" + text : text;
    else
      out += (negative ? " - " : " + ") + text;
  }
  return out;
}

}  // namespace detail

/// Parses the polynomial syntax; ParseError carries the 0-based offending offset.
inline PolySymbol parse_poly(std::string_view text) { return detail::PolyParser(text).parse(); }

inline std::string format_poly(const PolySymbol& a) {
  std::vector<std::pair<detail::TermKey, Complex>> terms;
  for (const auto& [m, c] : a.terms()) terms.push_back({{0, m.first, m.second}, c});
  return detail::join_terms(std::move(terms));
}

/// Formats sum_k hbar^k orders[k] with hbar kept symbolic.
inline std::string format_poly_orders(const std::vector<PolySymbol>& orders) {
  std::vector<std::pair<detail::TermKey, Complex>> terms;
  for (std::size_t k = 0; k < orders.size(); ++k)
    for (const auto& [m, c] : orders[k].terms()) terms.push_back({{static_cast<int>(k), m.first, m.second}, c});
  return detail::join_terms(std::move(terms));
}

}  // namespace wigner::io
