#pragma once

// Coulomb bound and continuum states in units rho = r/a0, k_n^2 = 1/n^2, and
// the squared dipole matrix elements between them.

#include "sumrule/exactalg.hpp"
#include "sumrule/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace sumrule {

struct BoundState {
  int n = 1;
  int l = 0;
  Rational ksq = 1;
  RadialFunction radial; // reduced radial function, unit norm

  std::string label() const {
    static const char *letters = "SPDFGHIK";
    return std::to_string(n) + (l < 8 ? std::string(1, letters[l]) : "l" + std::to_string(l));
  }
};

enum class Direction { Plus, Minus };

inline std::string to_string(Direction d) { return d == Direction::Plus ? "plus" : "minus"; }

/// Dipole branch l -> l+1 (Plus) or l -> l-1 (Minus) with its angular weight.
struct Channel {
  Direction direction = Direction::Plus;
  int l = 0;
  Rational weight = 1;

  int target_l() const { return direction == Direction::Plus ? l + 1 : l - 1; }

  static Channel plus(int l) {
    if (l < 0)
      throw InvalidQuantumNumbers("l must be non-negative");
    return {Direction::Plus, l, Rational((l + 1) * (l + 1), (2 * l + 1) * (2 * l + 3))};
  }

  static Channel minus(int l) {
    if (l < 1)
      throw InvalidQuantumNumbers("minus channel needs l >= 1");
    return {Direction::Minus, l, Rational(l * l, (2 * l + 1) * (2 * l - 1))};
  }

  static Channel make(Direction d, int l) { return d == Direction::Plus ? plus(l) : minus(l); }
};

/// Normalized R_nl built from the associated Laguerre coefficient recurrence.
/// Sign convention: the highest power carries a positive coefficient.
inline BoundState bound_state(int n, int l) {
  if (n < 1 || l < 0 || l > n - 1)
    throw InvalidQuantumNumbers("n=" + std::to_string(n) + ", l=" + std::to_string(l));
  const int nr = n - l - 1;
  const int alpha = 2 * l + 1;
  const Rational x_scale(2, n); // argument of L is 2 rho / n

  // L_nr^alpha(x) = sum c_k x^k, c_{k+1} = -c_k (nr-k) / ((k+1)(k+alpha+1))
  Laurent p;
  Rational c = 1;
  for (int k = 0; k < nr; ++k)
    c = -c * (nr - k) / ((k + 1) * (k + alpha + 1));
  // c now holds the top coefficient up to the common factor; restart from it so the top is positive
  Rational top = c;
  c = 1;
  for (int k = 0; k <= nr; ++k) {
    p[l + 1 + k] = c / top * pow(x_scale, k - nr);
    c = -c * (nr - k) / ((k + 1) * (k + alpha + 1));
  }
  PolyExp poly(std::move(p), Rational(1, n));
  Rational norm_sq = Rational(1) / overlap(poly, poly);
  if (auto root = exact_sqrt(norm_sq)) {
    poly = scale(poly, *root);
    norm_sq = 1;
  }
  return {n, l, Rational(1, n * n), RadialFunction{std::move(poly), norm_sq}};
}

/// rho R_{from}, the dipole seed of every ladder.
inline RadialFunction dipole_seed(const BoundState &s) {
  return {multiply(s.radial.poly, laurent_monomial(1, 1)), s.radial.norm_sq};
}

namespace detail {

inline Integer binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

} // namespace detail

namespace detail {

/// factor * num / den, left unreduced so callers that only need a double skip the gcd.
struct UnreducedZ2 {
  Rational factor;
  Integer num, den;
};

inline UnreducedZ2 bound_bound_z2_parts(const BoundState &from, int to_n, const Channel &channel) {
  if (channel.l != from.l)
    throw ChannelMismatch("channel built for l=" + std::to_string(channel.l) + ", state has l=" +
                          std::to_string(from.l));
  const int L = channel.target_l();
  if (L < 0 || to_n < L + 1)
    throw InvalidQuantumNumbers("no state n=" + std::to_string(to_n) + ", l=" + std::to_string(L));
  const int N = to_n - L - 1;
  const int alpha = 2 * L + 1;
  const int M = N + alpha + 1;
  const int m = from.n;
  // With p = 1/m + 1/n and b = 2/n every power reduces to integers:
  //   (p-b)^(N-i) p^-(M+k-i) = (n-m)^(N-i) (mn)^(alpha+1+k) (n+m)^i / (n+m)^(M+k)
  const Integer diff = to_n - m, prod = Integer(m) * to_n, total = to_n + m;
  int k_max = 0;
  for (const auto &[e, d] : from.radial.poly.terms())
    k_max = std::max(k_max, e + 1 - L);

  // integer numerators over the common denominator of the source coefficients
  Integer d_lcm = 1;
  for (const auto &[e, d] : from.radial.poly.terms())
    d_lcm = boost::multiprecision::lcm(d_lcm, boost::multiprecision::denominator(d));

  Integer sum = 0;
  for (const auto &[e, d] : from.radial.poly.terms()) {
    const int k = e + 1 - L; // rho^(j+L+1) = rho^(alpha+k) with j = e+1
    if (k < 0)
      throw InvalidQuantumNumbers("source power below target regularity");
    Integer kk = 0;
    Integer falling = 1; // N!/(N-i)!
    for (int i = 0; i <= std::min(k, N); ++i) {
      if (i > 0)
        falling *= N - i + 1;
      Integer rising = 1;
      for (int r = 0; r < k - i; ++r)
        rising *= M + r;
      Integer term = detail::binomial(k, i) * falling * rising * boost::multiprecision::pow(diff, unsigned(N - i)) *
                     boost::multiprecision::pow(total, unsigned(i + k_max - k));
      kk += (i % 2 == 0) ? term : Integer(-term);
    }
    kk *= boost::multiprecision::pow(prod, unsigned(alpha + 1 + k));
    sum += kk * (boost::multiprecision::numerator(d) * (d_lcm / boost::multiprecision::denominator(d)));
  }
  // (N+alpha)!/N!
  Integer gamma_ratio = 1;
  for (int i = N + 1; i <= N + alpha; ++i)
    gamma_ratio *= i;
  // C^2 = (2/n)^(2L+3) N! / (2n (n+L)!)
  Integer c_den = boost::multiprecision::pow(Integer(to_n), unsigned(2 * L + 3)) * 2 * to_n;
  for (int i = N + 1; i <= to_n + L; ++i)
    c_den *= i;
  const Integer c_num = boost::multiprecision::pow(Integer(2), unsigned(2 * L + 3));
  const Integer t = sum * gamma_ratio;
  const Integer den_root = d_lcm * boost::multiprecision::pow(total, unsigned(M + k_max));
  return {channel.weight * from.radial.norm_sq, c_num * t * t, c_den * den_root * den_root};
}

inline double ratio_to_double(const Integer &num, const Integer &den) {
  if (num == 0)
    return 0.0;
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, num.backend().data());
  const double md = mpz_get_d_2exp(&ed, den.backend().data());
  return std::ldexp(mn / md, static_cast<int>(en - ed));
}

} // namespace detail

/// |<n_from l|z|to_n l'>|^2 with angular weight, exact.
///
/// Uses the Laplace transform of the target's Laguerre polynomial,
///   int rho^(alpha+k) e^(-p rho) L_N^alpha(b rho) = (-d/dp)^k [(N+alpha)!/N! (p-b)^N p^-(N+alpha+1)],
/// so no polynomial of degree to_n is ever formed.
inline Rational bound_bound_z2(const BoundState &from, int to_n, const Channel &channel) {
  auto parts = detail::bound_bound_z2_parts(from, to_n, channel);
  return parts.factor * Rational(parts.num, parts.den);
}

/// bound_bound_z2 rounded to double without reducing the exact fraction.
inline double bound_bound_z2_double(const BoundState &from, int to_n, const Channel &channel) {
  auto parts = detail::bound_bound_z2_parts(from, to_n, channel);
  return to_double(parts.factor) * detail::ratio_to_double(parts.num, parts.den);
}

/// Same quantity through an explicit PolyExp overlap; slower, used as a cross-check.
inline Rational bound_bound_z2_by_overlap(const BoundState &from, int to_n, const Channel &channel) {
  const int L = channel.target_l();
  if (L < 0 || to_n < L + 1)
    throw InvalidQuantumNumbers("no state n=" + std::to_string(to_n) + ", l=" + std::to_string(L));
  return channel.weight * overlap_squared(dipole_seed(from), bound_state(to_n, L).radial);
}

/// Closed form of |<1S|z|q P>|^2 for the energy-normalized continuum.
inline double continuum_z2_1s(double q) {
  if (!(q > 0))
    throw NonPositiveQ("q must be positive");
  const double x = 1.0 + q * q;
  const double x5 = x * x * x * x * x;
  // 1/(1 - e^(-2 pi/q)); e^(-2 pi/q) underflows harmlessly to 0 for small q
  const double bose = 1.0 / -std::expm1(-2.0 * std::numbers::pi / q);
  return (256.0 / 3.0) * q / x5 * std::exp(-4.0 * std::atan(q) / q) * bose;
}

struct ContinuumGridSpec {
  double rho_max = 0.0; // 0: max(40, 30/q) plus three wavelengths
  double step = 0.0;    // 0: min(1/100, 1/(40 q))
  bool fit_envelope = true;
  double fit_tolerance = 1e-3;
};

/// Energy-normalized regular Coulomb wave: u -> sqrt(2/pi) sin(q rho + ln(2 q rho)/q - l pi/2 + sigma_l).
struct ContinuumWave {
  int l = 0;
  double q = 0.0;
  GridFunction grid;
  double fitted_amplitude = 0.0; // NaN when the fit was not requested
};

namespace detail {

/// Origin coefficient A with u ~ A rho^(l+1): sqrt(2/pi) C_l(eta) q^(l+1), eta = -1/q.
inline double coulomb_origin_coefficient(int l, double q) {
  double log_c = 2.0 * l * std::log(2.0) - 2.0 * std::lgamma(2.0 * l + 2.0);
  log_c += std::log(2.0 * std::numbers::pi * q) - std::log(-std::expm1(-2.0 * std::numbers::pi / q));
  for (int s = 1; s <= l; ++s)
    log_c += std::log(s * s * q * q + 1.0);
  return std::sqrt(2.0 / std::numbers::pi) * std::exp(0.5 * log_c);
}

/// Regular series sum_k a_k rho^(l+1+k) with a_0 = 1.
inline double coulomb_series(int l, double q, double rho) {
  double a_prev2 = 0.0, a_prev = 1.0;
  double rk = std::pow(rho, l + 1);
  double sum = rk;
  for (int k = 1; k < 400; ++k) {
    double a = (-2.0 * a_prev - q * q * a_prev2) / (k * (k + 2.0 * l + 1.0));
    rk *= rho;
    double term = a * rk;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) && k > 4)
      break;
    a_prev2 = a_prev;
    a_prev = a;
  }
  return sum;
}

/// Integrates u'' = (l(l+1)/rho^2 - 2/rho - q^2) u on rho_i = i h, i = 0..n-1, calling
/// visit(i, rho_i, u_i). Series start up to rho ~ min(1/2, 1/(2q)), Numerov beyond.
template <class Visit>
void integrate_coulomb_wave(int l, double q, double h, std::size_t n, Visit &&visit) {
  const double amp = coulomb_origin_coefficient(l, q);
  const double lam = l * (l + 1.0);
  auto g = [&](double r) { return lam / (r * r) - 2.0 / r - q * q; };
  std::size_t start = static_cast<std::size_t>(std::min(0.5, 0.5 / q) / h);
  start = std::max<std::size_t>(start, 2);
  start = std::min(start, n - 1);
  visit(std::size_t{0}, 0.0, 0.0);
  double u_prev = 0.0, u = 0.0;
  for (std::size_t i = 1; i <= start; ++i) {
    u_prev = u;
    u = amp * coulomb_series(l, q, static_cast<double>(i) * h);
    visit(i, static_cast<double>(i) * h, u);
  }
  const double c = h * h / 12.0;
  double r_prev = static_cast<double>(start - 1) * h;
  double r = static_cast<double>(start) * h;
  double w_prev = (1.0 - c * g(r_prev)) * u_prev;
  double w = (1.0 - c * g(r)) * u;
  for (std::size_t i = start + 1; i < n; ++i) {
    // Numerov in the w = (1 - h^2 g/12) u form
    double w_next = 2.0 * w - w_prev + h * h * g(r) * u;
    double r_next = static_cast<double>(i) * h;
    double u_next = w_next / (1.0 - c * g(r_next));
    visit(i, r_next, u_next);
    w_prev = w;
    w = w_next;
    r = r_next;
    u = u_next;
  }
}

inline double default_step(double q) { return std::min(0.01, 1.0 / (40.0 * q)); }

} // namespace detail

/// Asymptotic amplitude estimated from u and u' over the last three local wavelengths.
inline double fit_envelope(const GridFunction &g, double q, int l) {
  const std::size_t n = g.size();
  const double h = g.rho[1] - g.rho[0];
  const double wavelength = 2.0 * std::numbers::pi / q;
  const std::size_t span = static_cast<std::size_t>(3.0 * wavelength / h);
  if (span + 8 > n || span < 8)
    throw GridTooShort("grid shorter than three asymptotic wavelengths");
  auto du = uniform_derivative(g.values, h);
  const std::size_t hi = n - 3;
  const std::size_t lo = hi - span;
  double acc = 0.0, len = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double r = g.rho[i];
    const double k = std::sqrt(q * q + 2.0 / r - l * (l + 1.0) / (r * r));
    const double a2 = g.values[i] * g.values[i] * k / q + du[i] * du[i] / (q * k);
    const double wt = (i == lo || i + 1 == hi) ? 0.5 : 1.0;
    acc += wt * a2;
    len += wt;
  }
  return std::sqrt(acc / len);
}

inline ContinuumWave continuum_wave(int l, double q, const ContinuumGridSpec &spec = {}) {
  if (!(q > 0))
    throw NonPositiveQ("q must be positive");
  if (l < 0)
    throw InvalidQuantumNumbers("l must be non-negative");
  const double h = spec.step > 0 ? spec.step : detail::default_step(q);
  const double rho_max =
      spec.rho_max > 0 ? spec.rho_max : std::max(40.0, 30.0 / q) + 3.0 * 2.0 * std::numbers::pi / q;
  const std::size_t n = static_cast<std::size_t>(rho_max / h) + 1;
  if (n < 16)
    throw GridTooShort("continuum grid has fewer than 16 points");

  ContinuumWave wave;
  wave.l = l;
  wave.q = q;
  wave.grid.l = l;
  wave.grid.energy = 0.5 * q * q;
  wave.grid.rho.resize(n);
  wave.grid.values.resize(n);
  detail::integrate_coulomb_wave(l, q, h, n, [&](std::size_t i, double r, double u) {
    wave.grid.rho[i] = r;
    wave.grid.values[i] = u;
  });
  wave.grid.weights = simpson_weights(n, h);
  wave.fitted_amplitude = std::nan("");
  if (spec.fit_envelope) {
    wave.fitted_amplitude = fit_envelope(wave.grid, q, l);
    const double target = std::sqrt(2.0 / std::numbers::pi);
    if (std::abs(wave.fitted_amplitude / target - 1.0) > spec.fit_tolerance)
      throw GridTooShort("envelope amplitude " + std::to_string(wave.fitted_amplitude) +
                         " has not settled to sqrt(2/pi)");
  }
  return wave;
}

inline Channel channel_to(const BoundState &from, int target_l) {
  if (target_l == from.l + 1)
    return Channel::plus(from.l);
  if (target_l == from.l - 1 && from.l >= 1)
    return Channel::minus(from.l);
  throw ChannelMismatch("wave l=" + std::to_string(target_l) + " is not dipole-coupled to l=" +
                        std::to_string(from.l));
}

/// |<from|z|q l'>|^2 with angular weight, by quadrature on the wave's grid.
inline double bound_free_z2(const BoundState &from, const ContinuumWave &wave) {
  const Channel ch = channel_to(from, wave.l);
  const DensePolyExp r(from.radial);
  double s = 0.0;
  for (std::size_t i = 0; i < wave.grid.size(); ++i) {
    const double rho = wave.grid.rho[i];
    if (rho == 0.0)
      continue;
    s += wave.grid.weights[i] * rho * r.poly(rho) * std::exp(-r.rate * rho) * wave.grid.values[i];
  }
  return to_double(ch.weight) * s * s;
}

/// Same integral as bound_free_z2 without storing the wave; the integration range is
/// cut where the bound state has decayed.
inline double bound_free_z2_direct(const BoundState &from, const Channel &channel, double q, double step = 0.0) {
  if (!(q > 0))
    throw NonPositiveQ("q must be positive");
  const double h = step > 0 ? step : detail::default_step(q);
  const double rate = to_double(from.radial.rate());
  // rho^(n+1) e^(-rho/n) below 1e-20 of its peak
  const double rho_max = (from.n + 1.0) / rate + 50.0 / rate;
  std::size_t n = static_cast<std::size_t>(rho_max / h) + 1;
  if (n % 2 == 0)
    ++n;
  const DensePolyExp r(from.radial);
  const double decay = std::exp(-rate * h);
  double expo = 1.0;
  double s = 0.0;
  detail::integrate_coulomb_wave(channel.target_l(), q, h, n, [&](std::size_t i, double rho, double u) {
    if (i > 0) {
      expo *= decay;
      const double w = (i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      s += w * rho * r.poly(rho) * expo * u;
    }
  });
  s *= h / 3.0;
  return to_double(channel.weight) * s * s;
}

inline Rational expectation_rho_power(const BoundState &s, int p) {
  if (2 * s.l + 2 + p < 0)
    throw DivergentAtOrigin("<rho^" + std::to_string(p) + "> diverges for l=" + std::to_string(s.l));
  return overlap(s.radial.poly, s.radial.poly, laurent_monomial(p, 1)) * s.radial.norm_sq;
}

} // namespace sumrule
