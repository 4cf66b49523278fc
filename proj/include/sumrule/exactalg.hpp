#pragma once

// Exact algebra over functions p(rho) e^(-a rho) with Laurent polynomial p and
// rational coefficients. Everything here is exact; no floating point.

#include "sumrule/errors.hpp"
#include "sumrule/potential.hpp"
#include "sumrule/rational.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sumrule {

/// Sparse Laurent polynomial: exponent -> coefficient, zero coefficients never stored.
using Laurent = std::map<int, Rational>;

inline void prune(Laurent &p) {
  for (auto it = p.begin(); it != p.end();) {
    if (it->second == 0)
      it = p.erase(it);
    else
      ++it;
  }
}

inline Laurent laurent_monomial(int n, const Rational &c) {
  Laurent p;
  if (c != 0)
    p[n] = c;
  return p;
}

inline Laurent derivative(const Laurent &p) {
  Laurent out;
  for (const auto &[n, c] : p)
    if (n != 0)
      out[n - 1] += c * n;
  prune(out);
  return out;
}

inline Laurent operator*(const Laurent &a, const Laurent &b) {
  Laurent out;
  for (const auto &[m, c] : a)
    for (const auto &[n, d] : b)
      out[m + n] += c * d;
  prune(out);
  return out;
}

inline Laurent operator+(Laurent a, const Laurent &b) {
  for (const auto &[n, c] : b)
    a[n] += c;
  prune(a);
  return a;
}

inline Laurent operator*(Laurent a, const Rational &s) {
  for (auto &[n, c] : a)
    c *= s;
  prune(a);
  return a;
}

/// p(rho) e^(-rate rho) with rate > 0.
class PolyExp {
public:
  /// Most singular exponent any stored function may carry.
  static constexpr int kMinExponent = -4;

  explicit PolyExp(Rational rate = 1) : rate_(std::move(rate)) { check_rate(); }

  PolyExp(Laurent terms, Rational rate)
      : terms_(std::move(terms)), rate_(std::move(rate)) {
    check_rate();
    prune(terms_);
    if (!terms_.empty() && terms_.begin()->first < kMinExponent)
      throw ExponentFloorExceeded("exponent " + std::to_string(terms_.begin()->first) +
                                  " below floor " + std::to_string(kMinExponent));
  }

  static PolyExp monomial(int n, const Rational &c, const Rational &rate) {
    return PolyExp(laurent_monomial(n, c), rate);
  }

  const Laurent &terms() const { return terms_; }
  const Rational &rate() const { return rate_; }
  bool is_zero() const { return terms_.empty(); }
  int min_exponent() const { return terms_.empty() ? 0 : terms_.begin()->first; }
  int max_exponent() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

  Rational coefficient(int n) const {
    auto it = terms_.find(n);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  friend bool operator==(const PolyExp &a, const PolyExp &b) {
    return a.rate_ == b.rate_ && a.terms_ == b.terms_;
  }

  std::string str() const {
    std::ostringstream os;
    os << "(";
    if (terms_.empty())
      os << "0";
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto &[n, c] = *it;
      Rational mag = c < 0 ? Rational(-c) : c;
      if (first)
        os << (c < 0 ? "-" : "");
      else
        os << (c < 0 ? " - " : " + ");
      first = false;
      if (mag != 1 || n == 0)
        os << to_string(mag);
      if (n != 0)
        os << (mag != 1 ? "*" : "") << "rho" << (n != 1 ? "^" + std::to_string(n) : "");
    }
    os << ")*exp(-" << to_string(rate_) << "*rho)";
    return os.str();
  }

private:
  void check_rate() const {
    if (rate_ <= 0)
      throw std::invalid_argument("PolyExp rate must be positive");
  }

  Laurent terms_;
  Rational rate_;
};

inline PolyExp scale(const PolyExp &f, const Rational &s) { return PolyExp(f.terms() * s, f.rate()); }

inline PolyExp add(const PolyExp &f, const PolyExp &g) {
  if (f.rate() != g.rate())
    throw RateMismatch(to_string(f.rate()) + " vs " + to_string(g.rate()));
  return PolyExp(f.terms() + g.terms(), f.rate());
}

inline PolyExp subtract(const PolyExp &f, const PolyExp &g) { return add(f, scale(g, -1)); }

/// d/drho [p e^(-a rho)] = (p' - a p) e^(-a rho)
inline PolyExp differentiate(const PolyExp &f) {
  return PolyExp(derivative(f.terms()) + f.terms() * Rational(-f.rate()), f.rate());
}

inline PolyExp multiply(const PolyExp &f, const PolyExp &g) {
  return PolyExp(f.terms() * g.terms(), f.rate() + g.rate());
}

inline PolyExp multiply(const PolyExp &f, const Laurent &w) { return PolyExp(f.terms() * w, f.rate()); }

/// Laurent form of 2 v0 for potentials that keep PolyExp closed.
inline Laurent twice_potential(const Potential &v0) {
  if (!v0.is_polynomial())
    throw NonPolynomialPotential(v0.name() + " has no exact Laurent form");
  if (v0.kind == Potential::Kind::Coulomb)
    return laurent_monomial(-1, -2);
  const int g = static_cast<int>(boost::multiprecision::numerator(v0.gamma));
  return laurent_monomial(g, Rational(2) / v0.gamma);
}

/// (-d^2/drho^2 + l(l+1)/rho^2 + 2 v0 + ksq) f
inline PolyExp apply_h(const PolyExp &f, int l, const Rational &ksq, const Potential &v0) {
  const Laurent two_v = twice_potential(v0);
  const Rational &a = f.rate();
  Laurent out;
  for (const auto &[n, c] : f.terms()) {
    // -(rho^n e)'' = -[n(n-1) rho^(n-2) - 2 a n rho^(n-1) + a^2 rho^n] e
    out[n - 2] += c * (Rational(l * (l + 1)) - Rational(n) * (n - 1));
    out[n - 1] += c * 2 * a * n;
    out[n] += c * (ksq - a * a);
    for (const auto &[m, w] : two_v)
      out[n + m] += c * w;
  }
  prune(out);
  return PolyExp(std::move(out), f.rate());
}

/// Integral of rho^n e^(-c rho) over (0, inf) = n!/c^(n+1), n >= 0.
inline Rational gamma_moment(int n, const Rational &c) {
  if (n < 0)
    throw DivergentAtOrigin("rho^" + std::to_string(n) + " is not integrable at the origin");
  return Rational(factorial(n)) / pow(c, n + 1);
}

/// Integral over (0, inf) of a single PolyExp.
inline Rational integrate(const PolyExp &f) {
  Rational sum = 0;
  for (const auto &[n, c] : f.terms())
    sum += c * gamma_moment(n, f.rate());
  return sum;
}

/// Integral over (0, inf) of f * g * w, computed termwise without forming the product.
inline Rational overlap(const PolyExp &f, const PolyExp &g, const Laurent &w = laurent_monomial(0, 1)) {
  const Rational c = f.rate() + g.rate();
  std::map<int, Rational> moments; // exponent -> accumulated coefficient
  for (const auto &[m, a] : f.terms())
    for (const auto &[n, b] : g.terms())
      for (const auto &[k, x] : w)
        moments[m + n + k] += a * b * x;
  Rational sum = 0;
  for (const auto &[n, coeff] : moments) {
    if (coeff == 0)
      continue;
    if (n < 0)
      throw DivergentAtOrigin("combined exponent " + std::to_string(n));
    sum += coeff * gamma_moment(n, c);
  }
  return sum;
}

/// Limit of p(rho) e^(-a rho) as rho -> 0; empty when it diverges. Takes raw Laurent data so
/// poles below the exponent floor can still be classified.
inline std::optional<Rational> origin_limit(const Laurent &p, const Rational &a) {
  if (p.empty())
    return Rational(0);
  const int lo = p.begin()->first;
  if (lo > 0)
    return Rational(0);
  // Laurent series coefficient of rho^t in p(rho) * sum_k (-a rho)^k / k!
  for (int t = lo; t <= 0; ++t) {
    Rational coeff = 0;
    for (const auto &[n, c] : p) {
      if (n > t)
        break;
      coeff += c * pow(Rational(-a), t - n) / Rational(factorial(t - n));
    }
    if (t < 0 && coeff != 0)
      return std::nullopt;
    if (t == 0)
      return coeff;
  }
  return Rational(0);
}

inline std::optional<Rational> origin_limit(const PolyExp &f) { return origin_limit(f.terms(), f.rate()); }

namespace detail {

/// Reduced row echelon form in place over the rationals; returns pivot columns.
inline std::vector<int> rref(std::vector<std::vector<Rational>> &m, int ncols) {
  std::vector<int> pivots;
  std::size_t row = 0;
  for (int col = 0; col < ncols && row < m.size(); ++col) {
    std::size_t p = row;
    while (p < m.size() && m[p][col] == 0)
      ++p;
    if (p == m.size())
      continue;
    std::swap(m[p], m[row]);
    Rational inv = Rational(1) / m[row][col];
    for (auto &x : m[row])
      x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0)
        continue;
      Rational factor = m[r][col];
      for (std::size_t c = 0; c < m[r].size(); ++c)
        m[r][c] -= factor * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

} // namespace detail

/// Regular, decaying G with (h_l + ksq) G = rhs, orthogonal to `homogeneous` when given.
///
/// Undetermined coefficients over rho^n e^(-a rho), n = l+1 .. deg(rhs)+2, with one
/// extra degree allowed when the first ansatz is inconsistent.
inline PolyExp solve_inhomogeneous(const PolyExp &rhs, int l, const Rational &ksq, const Potential &v0,
                                   const std::optional<PolyExp> &homogeneous = std::nullopt) {
  if (homogeneous) {
    if (homogeneous->rate() != rhs.rate())
      throw RateMismatch("homogeneous solution and rhs rates differ");
    if (overlap(*homogeneous, rhs) != 0)
      throw ResonanceUnprojected("rhs has a component along the normalizable homogeneous solution");
  }
  if (rhs.is_zero())
    return PolyExp(rhs.rate());

  const int lo = l + 1;
  for (int extra = 0; extra <= 1; ++extra) {
    const int hi = std::max(rhs.max_exponent() + 2 + extra, lo);
    const int nunk = hi - lo + 1;

    std::vector<PolyExp> columns;
    columns.reserve(static_cast<std::size_t>(nunk));
    int emin = rhs.min_exponent(), emax = rhs.max_exponent();
    for (int n = lo; n <= hi; ++n) {
      columns.push_back(apply_h(PolyExp::monomial(n, 1, rhs.rate()), l, ksq, v0));
      if (!columns.back().is_zero()) {
        emin = std::min(emin, columns.back().min_exponent());
        emax = std::max(emax, columns.back().max_exponent());
      }
    }

    std::vector<std::vector<Rational>> m;
    for (int e = emin; e <= emax; ++e) {
      std::vector<Rational> row(static_cast<std::size_t>(nunk + 1));
      for (int j = 0; j < nunk; ++j)
        row[static_cast<std::size_t>(j)] = columns[static_cast<std::size_t>(j)].coefficient(e);
      row.back() = rhs.coefficient(e);
      m.push_back(std::move(row));
    }
    if (homogeneous) {
      std::vector<Rational> row(static_cast<std::size_t>(nunk + 1));
      for (int j = 0; j < nunk; ++j)
        row[static_cast<std::size_t>(j)] = overlap(*homogeneous, PolyExp::monomial(lo + j, 1, rhs.rate()));
      m.push_back(std::move(row));
    }

    auto pivots = detail::rref(m, nunk + 1);
    if (!pivots.empty() && pivots.back() == nunk)
      continue; // inconsistent: rhs column became a pivot
    if (static_cast<int>(pivots.size()) < nunk)
      throw NoPolynomialSolution("solution is not unique; supply the normalizable homogeneous solution");

    Laurent g;
    for (std::size_t r = 0; r < pivots.size(); ++r)
      g[lo + pivots[r]] = m[r].back();
    return PolyExp(std::move(g), rhs.rate());
  }
  throw NoPolynomialSolution("no PolyExp solution with degree up to deg(rhs)+3");
}

/// sqrt(norm_sq) * poly: carries irrational normalizations such as 1/sqrt(8) exactly.
struct RadialFunction {
  PolyExp poly;
  Rational norm_sq = 1;

  const Rational &rate() const { return poly.rate(); }
  bool is_zero() const { return poly.is_zero(); }

  /// Leading origin coefficient squared: C^2 where f -> C rho^p.
  Rational leading_coefficient_sq() const {
    if (poly.is_zero())
      return 0;
    const Rational c = poly.terms().begin()->second;
    return c * c * norm_sq;
  }

  std::string str() const {
    if (norm_sq == 1)
      return poly.str();
    return "sqrt(" + to_string(norm_sq) + ")*" + poly.str();
  }
};

inline RadialFunction apply_h(const RadialFunction &f, int l, const Rational &ksq, const Potential &v0) {
  return {apply_h(f.poly, l, ksq, v0), f.norm_sq};
}

inline Rational overlap_squared(const RadialFunction &f, const RadialFunction &g) {
  Rational o = overlap(f.poly, g.poly);
  return o * o * f.norm_sq * g.norm_sq;
}

/// Exact overlap; requires sqrt(f.norm_sq * g.norm_sq) to be rational.
inline Rational overlap(const RadialFunction &f, const RadialFunction &g) {
  Rational o = overlap(f.poly, g.poly);
  if (o == 0)
    return 0;
  if (f.norm_sq == g.norm_sq)
    return o * f.norm_sq;
  auto root = exact_sqrt(f.norm_sq * g.norm_sq);
  if (!root)
    throw IrrationalOverlap("normalizations " + to_string(f.norm_sq) + " and " + to_string(g.norm_sq) +
                            " do not combine to a rational");
  return o * *root;
}

/// f - <r|f> r for a normalized r.
inline RadialFunction project_out(const RadialFunction &f, const RadialFunction &r) {
  const Rational c = overlap(r.poly, f.poly) * r.norm_sq;
  return {subtract(f.poly, scale(r.poly, c)), f.norm_sq};
}

/// Exact equality of the represented functions.
inline bool same_function(const RadialFunction &f, const RadialFunction &g) {
  if (f.rate() != g.rate())
    return false;
  if (f.is_zero() || g.is_zero())
    return f.is_zero() && g.is_zero();
  auto ratio = exact_sqrt(g.norm_sq / f.norm_sq);
  if (!ratio)
    return false;
  return f.poly == scale(g.poly, *ratio);
}

} // namespace sumrule
