#pragma once

// Floating-point helpers shared by the numeric modules: sampled functions,
// quadrature weights and evaluation of exact functions on a grid.

#include "sumrule/exactalg.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sumrule {

/// Samples u(rho_i) with quadrature weights w_i such that sum w_i f(rho_i) ~ integral f drho.
struct GridFunction {
  std::vector<double> rho;
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<double> slopes; // du/drho when the producer knows it, else empty
  int l = 0;
  double energy = 0.0; // scaled eigenvalue (bound) or q^2/2 (continuum)
  int nodes = 0;

  std::size_t size() const { return rho.size(); }

  double integrate(const std::function<double(double rho, double u)> &f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      sum += weights[i] * f(rho[i], values[i]);
    return sum;
  }
};

/// Composite Simpson weights for n uniformly spaced points; the last panel uses 3/8 when n-1 is odd.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 3)
    throw std::invalid_argument("simpson_weights needs at least 3 points");
  std::vector<double> w(n, 0.0);
  std::size_t intervals = n - 1;
  std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3;
    w[i + 1] += 4 * h / 3;
    w[i + 2] += h / 3;
  }
  if (simpson_end != intervals) {
    std::size_t i = simpson_end;
    w[i] += 3 * h / 8;
    w[i + 1] += 9 * h / 8;
    w[i + 2] += 9 * h / 8;
    w[i + 3] += 3 * h / 8;
  }
  return w;
}

/// p(rho) e^(-a rho) in double precision.
inline double evaluate(const PolyExp &f, double rho) {
  double p = 0.0;
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it)
    p += to_double(it->second) * std::pow(rho, it->first);
  return p * std::exp(-to_double(f.rate()) * rho);
}

inline double evaluate(const RadialFunction &f, double rho) {
  return std::sqrt(to_double(f.norm_sq)) * evaluate(f.poly, rho);
}

/// Dense double-precision form of a PolyExp with non-negative exponents, for tight loops.
struct DensePolyExp {
  std::vector<double> coeff; // coeff[k] multiplies rho^(offset + k)
  int offset = 0;
  double rate = 0.0;
  double scale = 1.0;

  explicit DensePolyExp(const RadialFunction &f)
      : offset(f.poly.min_exponent()), rate(to_double(f.rate())), scale(std::sqrt(to_double(f.norm_sq))) {
    coeff.assign(static_cast<std::size_t>(f.poly.max_exponent() - offset + 1), 0.0);
    for (const auto &[n, c] : f.poly.terms())
      coeff[static_cast<std::size_t>(n - offset)] = to_double(c);
  }

  /// Polynomial factor only (no exponential).
  double poly(double rho) const {
    double p = 0.0;
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it)
      p = p * rho + *it;
    return scale * p * std::pow(rho, offset);
  }
};

/// 5-point central first derivative on a uniform grid; one-sided 3-point at the ends.
inline std::vector<double> uniform_derivative(const std::vector<double> &f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 5)
    throw std::invalid_argument("uniform_derivative needs at least 5 points");
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
  d[1] = (f[2] - f[0]) / (2 * h);
  d[n - 2] = (f[n - 1] - f[n - 3]) / (2 * h);
  d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
  d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
  return d;
}

} // namespace sumrule
