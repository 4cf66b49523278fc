#pragma once

// Constructive ladders: F_(J+1) = (h' + k^2) F_J from the dipole seed rho R, and the
// negative-order chain (h' + k^2) G_(J+1) = G_J solved exactly, projected off the
// normalizable homogeneous solution when the channel has one.

#include "sumrule/exactalg.hpp"
#include "sumrule/grid.hpp"
#include "sumrule/hydrogen.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace sumrule {

struct LadderFamily {
  BoundState state;
  Channel channel;
  RadialFunction raw_seed;                  // rho R, kept for J = 0
  std::vector<RadialFunction> positive;     // F_0, F_1, ... (F_0 projected when degenerate)
  std::vector<RadialFunction> negative;     // G_1, G_2, ... (G_0 is positive[0])
  std::optional<RadialFunction> homogeneous; // normalizable solution of (h' + k^2) R~ = 0

  /// F_J for J >= 0, G_|J| for J < 0.
  const RadialFunction &rung(int j) const {
    if (j >= 0) {
      if (j >= static_cast<int>(positive.size()))
        throw InvalidOrder("F_" + std::to_string(j) + " not built");
      return positive[static_cast<std::size_t>(j)];
    }
    if (-j > static_cast<int>(negative.size()))
      throw InvalidOrder("G_" + std::to_string(-j) + " not built");
    return negative[static_cast<std::size_t>(-j - 1)];
  }
};

/// The degenerate partner R_(m, l') when it exists.
inline std::optional<RadialFunction> degenerate_partner(const BoundState &s, const Channel &ch) {
  const int lp = ch.target_l();
  if (lp < 0 || lp > s.n - 1)
    return std::nullopt;
  return bound_state(s.n, lp).radial;
}

namespace detail {

inline LadderFamily seed_family(const BoundState &state, const Channel &channel) {
  if (channel.l != state.l)
    throw ChannelMismatch("channel l=" + std::to_string(channel.l) + " for state l=" + std::to_string(state.l));
  LadderFamily fam;
  fam.state = state;
  fam.channel = channel;
  fam.raw_seed = dipole_seed(state);
  fam.homogeneous = degenerate_partner(state, channel);
  RadialFunction f0 = fam.raw_seed;
  if (fam.homogeneous)
    f0 = project_out(f0, *fam.homogeneous);
  fam.positive.push_back(std::move(f0));
  return fam;
}

} // namespace detail

/// F_0 .. F_max_j. Beyond F_4 the l = 0 rungs fall below the exponent floor.
inline LadderFamily build_f_ladder(const BoundState &state, const Channel &channel, int max_j) {
  if (max_j < 0 || max_j > 4)
    throw InvalidOrder("positive ladders are built up to F_4");
  LadderFamily fam = detail::seed_family(state, channel);
  const Potential coulomb = Potential::coulomb();
  for (int j = 1; j <= max_j; ++j)
    fam.positive.push_back(apply_h(fam.positive.back(), channel.target_l(), state.ksq, coulomb));
  return fam;
}

/// Extends `fam` (or a fresh family) with G_1 .. G_max_j.
inline void extend_g_ladder(LadderFamily &fam, int max_j) {
  const Potential coulomb = Potential::coulomb();
  const std::optional<PolyExp> hom = fam.homogeneous ? std::optional<PolyExp>(fam.homogeneous->poly) : std::nullopt;
  while (static_cast<int>(fam.negative.size()) < max_j) {
    const RadialFunction &prev = fam.negative.empty() ? fam.positive.front() : fam.negative.back();
    PolyExp g = solve_inhomogeneous(prev.poly, fam.channel.target_l(), fam.state.ksq, coulomb, hom);
    fam.negative.push_back({std::move(g), prev.norm_sq});
  }
}

inline LadderFamily build_g_ladder(const BoundState &state, const Channel &channel, int max_j) {
  LadderFamily fam = detail::seed_family(state, channel);
  extend_g_ladder(fam, max_j);
  return fam;
}

/// Both ladders: F_0..F_max_pos and G_1..G_max_neg.
inline LadderFamily build_ladders(const BoundState &state, const Channel &channel, int max_pos, int max_neg) {
  LadderFamily fam = build_f_ladder(state, channel, max_pos);
  extend_g_ladder(fam, max_neg);
  return fam;
}

struct WronskianValue {
  int j = 0;
  int k = 0;
  Channel channel;
  Rational value;
};

/// lim rho->0 of a b' - b a' for two functions with a common rate; empty when a pole survives.
inline std::optional<Rational> wronskian_limit(const RadialFunction &a, const RadialFunction &b) {
  // the exponential factors cancel apart from e^(-2 c rho)
  const Laurent &p = a.poly.terms(), &q = b.poly.terms();
  const Laurent w = p * derivative(q) + q * derivative(p) * Rational(-1);
  auto lim = origin_limit(w, 2 * a.rate());
  if (!lim)
    return std::nullopt;
  if (a.norm_sq == b.norm_sq)
    return *lim * a.norm_sq;
  auto root = exact_sqrt(a.norm_sq * b.norm_sq);
  if (!root)
    throw IrrationalOverlap("normalizations do not combine to a rational");
  return *lim * *root;
}

/// lim rho->0 of F_j F_k' - F_k F_j'; empty (the Infinite case) when a pole survives.
inline std::optional<WronskianValue> wronskian_at_origin(const LadderFamily &fam, int j, int k) {
  auto lim = wronskian_limit(fam.rung(j), fam.rung(k));
  if (!lim)
    return std::nullopt;
  return WronskianValue{j, k, fam.channel, *lim};
}

// Green's function route for 1S, l' = 1, k^2 = 1, on the non-reduced g = G/rho.

namespace detail {

/// Decaying solution e^(-rho) (1 + 1/rho + 1/(2 rho^2)).
inline double greens_phi1(double r) { return std::exp(-r) * (1.0 + 1.0 / r + 0.5 / (r * r)); }

/// Power series of phi2 below rho = 2, where e^rho/(2 rho^2) and phi1 cancel; returns (value, derivative).
inline std::pair<double, double> greens_phi2_series(double r) {
  double sum = 0.0, dsum = 0.0, fact_j = 1.0; // j!
  double rj = 1.0, rjm1 = 0.0;                // r^j, r^(j-1)
  for (int j = 0; j < 60; ++j) {
    if (j > 0) {
      fact_j *= j;
      rjm1 = rj;
      rj *= r;
    }
    const double f1 = fact_j * (j + 1), f2 = f1 * (j + 2);
    const double sj = (j % 2 == 0) ? 1.0 : -1.0;
    const double c = (1.0 - sj) / (2.0 * f2) + sj / f1 - sj / fact_j;
    sum += c * rj;
    dsum += c * j * rjm1;
    if (j > 4 && std::abs(c * rj) < 1e-18 * std::abs(sum))
      break;
  }
  return {sum, dsum};
}

inline double greens_phi1_prime(double r) {
  return -greens_phi1(r) + std::exp(-r) * (-1.0 / (r * r) - 1.0 / (r * r * r));
}

/// Regular solution e^rho/(2 rho^2) - phi1.
inline double greens_phi2(double r) {
  if (r >= 2.0)
    return std::exp(r) / (2.0 * r * r) - greens_phi1(r);
  return greens_phi2_series(r).first;
}

inline double greens_phi2_prime(double r) {
  if (r >= 2.0)
    return std::exp(r) / (2.0 * r * r) - std::exp(r) / (r * r * r) - greens_phi1_prime(r);
  return greens_phi2_series(r).second;
}

/// Cumulative integral on a uniform grid in x, fourth order in the interior.
inline std::vector<double> cumulative(const std::vector<double> &f, double h) {
  const std::size_t n = f.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double step;
    if (i == 0)
      step = h / 12.0 * (5 * f[0] + 8 * f[1] - f[2]);
    else if (i + 2 == n)
      step = h / 12.0 * (5 * f[i + 1] + 8 * f[i] - f[i - 1]);
    else
      step = h / 24.0 * (-f[i - 1] + 13 * f[i] + 13 * f[i + 1] - f[i + 2]);
    c[i + 1] = c[i] + step;
  }
  return c;
}

} // namespace detail

struct GreensGridSpec {
  double rho_min = 1e-6;
  double rho_max = 60.0;
  std::size_t points = 6001;
};

/// Phi2 Phi1' - Phi1 Phi2', expected to equal -1/rho^2.
inline double greens_wronskian(double rho) {
  return detail::greens_phi2(rho) * detail::greens_phi1_prime(rho) -
         detail::greens_phi1(rho) * detail::greens_phi2_prime(rho);
}

/// S_(-j) for 1S by iterating the two-region Green's function integral j times from
/// g_0 = 2 rho e^(-rho); S_(-j) = (1/3) int rho^2 g_a g_b with a + b = j.
inline double greens_negative_order(int j, const GreensGridSpec &spec = {}) {
  if (j < 1)
    throw InvalidOrder("negative orders start at j = 1");
  const std::size_t n = spec.points;
  const double x0 = std::log(spec.rho_min), x1 = std::log(spec.rho_max);
  const double h = (x1 - x0) / static_cast<double>(n - 1);
  std::vector<double> rho(n), phi1(n), phi2(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = std::exp(x0 + h * static_cast<double>(i));
    phi1[i] = detail::greens_phi1(rho[i]);
    phi2[i] = detail::greens_phi2(rho[i]);
  }
  std::vector<std::vector<double>> g(1, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    g[0][i] = 2.0 * rho[i] * std::exp(-rho[i]);

  const int top = j - j / 2;
  std::vector<double> inner(n), outer(n);
  for (int step = 0; step < top; ++step) {
    const auto &src = g.back();
    // d rho = rho dx
    for (std::size_t i = 0; i < n; ++i) {
      const double r3 = rho[i] * rho[i] * rho[i];
      inner[i] = phi2[i] * r3 * src[i];
      outer[i] = phi1[i] * r3 * src[i];
    }
    auto lower = detail::cumulative(inner, h);
    auto upper = detail::cumulative(outer, h);
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i)
      next[i] = phi1[i] * lower[i] + phi2[i] * (upper.back() - upper[i]);
    for (double v : next)
      if (!std::isfinite(v))
        throw QuadratureNotConverged("Green's function iteration overflowed");
    g.push_back(std::move(next));
  }
  const int a = j / 2, b = j - j / 2;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i)
    f[i] = rho[i] * rho[i] * rho[i] * g[static_cast<std::size_t>(a)][i] * g[static_cast<std::size_t>(b)][i];
  return detail::cumulative(f, h).back() / 3.0;
}

} // namespace sumrule
