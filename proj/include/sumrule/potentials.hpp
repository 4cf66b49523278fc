#pragma once

// Bound states of power-law and log potentials on a log-linear grid, grid expectation
// values and the explicit low-order ladder rungs for smooth potentials.

#include "sumrule/errors.hpp"
#include "sumrule/grid.hpp"
#include "sumrule/hydrogen.hpp"
#include "sumrule/potential.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace sumrule {

struct SolverSpec {
  double rho_min = 1e-9;
  double step = 0.002;      // uniform step in x = ln(rho) + rho
  double decay = 36.0;      // WKB exponent beyond the outer turning point
  double rho_limit = 2000.0;
  double energy_tol = 1e-14; // relative bisection width
  double rho_max = 0.0;      // fixed grid end when positive, so several states share one grid
};

namespace detail {

inline double effective_potential(const Potential &v0, int l, double rho) {
  return 0.5 * l * (l + 1) / (rho * rho) + v0.value(rho);
}

/// Sample points uniform in x = ln rho + rho.
struct LogLinearGrid {
  double h = 0.0;
  std::vector<double> rho;
  std::vector<double> jac; // drho/dx = rho/(1+rho)
  std::vector<double> shift; // (1/4 + rho)/(1+rho)^4 from u = sqrt(jac) phi

  LogLinearGrid(double rho_min, double rho_max, double step) {
    const double x0 = std::log(rho_min) + rho_min, x1 = std::log(rho_max) + rho_max;
    const auto n = static_cast<std::size_t>(std::ceil((x1 - x0) / step)) + 1;
    h = (x1 - x0) / static_cast<double>(n - 1);
    rho.resize(n);
    jac.resize(n);
    shift.resize(n);
    double y = std::log(rho_min); // y = ln rho
    for (std::size_t i = 0; i < n; ++i) {
      const double x = x0 + h * static_cast<double>(i);
      // Newton on y + e^y = x, started from the previous point
      for (int it = 0; it < 4; ++it)
        y -= (y + std::exp(y) - x) / (1.0 + std::exp(y));
      const double r = std::exp(y);
      rho[i] = r;
      jac[i] = r / (1.0 + r);
      shift[i] = (0.25 + r) / std::pow(1.0 + r, 4);
    }
  }

  std::size_t size() const { return rho.size(); }
};

/// Energy-independent part of the Numerov coefficient, and jac^2 for the energy term.
struct NumerovBase {
  std::vector<double> fixed, jac2;
};

inline NumerovBase numerov_base(const LogLinearGrid &g, const Potential &v0, int l) {
  NumerovBase b;
  b.fixed.resize(g.size());
  b.jac2.resize(g.size());
  const double lam = l * (l + 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.rho[i];
    b.jac2[i] = g.jac[i] * g.jac[i];
    b.fixed[i] = b.jac2[i] * (lam / (r * r) + 2.0 * v0.value(r)) + g.shift[i];
  }
  return b;
}

/// Numerov coefficient w(x) in phi'' = w phi.
inline std::vector<double> numerov_w(const NumerovBase &b, double energy) {
  std::vector<double> w(b.fixed.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = b.fixed[i] - 2.0 * energy * b.jac2[i];
  return w;
}

/// u ~ rho^(l+1) (1 + a rho^(g+2)) near the origin for v0 = rho^g / g.
inline double origin_series(const Potential &v0, int l, double rho) {
  double u = std::pow(rho, l + 1);
  if (v0.kind == Potential::Kind::Log)
    return u;
  const double g = v0.kind == Potential::Kind::Coulomb ? -1.0 : v0.gamma_d();
  const double p = g + 2.0;
  return u * (1.0 + (2.0 / g) / (p * (2 * l + 1 + p)) * std::pow(rho, p));
}

inline double numerov_next(const std::vector<double> &w, double h2, std::size_t im1, std::size_t i, std::size_t ip1,
                           double phi_im1, double phi_i) {
  return (2.0 * (1.0 + 5.0 * h2 / 12.0 * w[i]) * phi_i - (1.0 - h2 / 12.0 * w[im1]) * phi_im1) /
         (1.0 - h2 / 12.0 * w[ip1]);
}

/// Sign changes of the outward solution over the whole grid.
inline int count_nodes(const LogLinearGrid &g, const NumerovBase &base, const Potential &v0, int l,
                       double energy) {
  const auto w = numerov_w(base, energy);
  const double h2 = g.h * g.h;
  double a = origin_series(v0, l, g.rho[0]) / std::sqrt(g.jac[0]);
  double b = origin_series(v0, l, g.rho[1]) / std::sqrt(g.jac[1]);
  int nodes = 0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    double c = numerov_next(w, h2, i - 1, i, i + 1, a, b);
    if (c != 0.0 && ((c > 0) != (b > 0)))
      ++nodes;
    a = b;
    b = c;
    if (std::abs(b) > 1e200) {
      a *= 1e-200;
      b *= 1e-200;
    }
  }
  return nodes;
}

/// Outermost classical turning point, or empty when the particle is not confined below rho_limit.
inline std::optional<double> outer_turning_point(const Potential &v0, int l, double energy, const SolverSpec &spec) {
  bool allowed = false;
  for (double r = spec.rho_min; r < spec.rho_limit; r *= 1.002) {
    const bool inside = effective_potential(v0, l, r) < energy;
    if (inside)
      allowed = true;
    else if (allowed)
      return r;
  }
  if (!allowed)
    return spec.rho_min; // forbidden everywhere
  return std::nullopt;
}

/// Grid end where the WKB decay exponent reaches spec.decay.
inline double decay_radius(const Potential &v0, int l, double energy, const SolverSpec &spec) {
  auto turn = outer_turning_point(v0, l, energy, spec);
  if (!turn)
    throw NoBoundState("energy " + std::to_string(energy) + " is not confined below rho=" +
                       std::to_string(spec.rho_limit));
  double r = *turn, action = 0.0;
  while (action < spec.decay) {
    const double dr = 0.005 * (1.0 + r);
    const double k = std::sqrt(std::max(0.0, 2.0 * (effective_potential(v0, l, r + 0.5 * dr) - energy)));
    action += k * dr;
    r += dr;
    if (r > spec.rho_limit)
      throw NoBoundState("decay region extends past rho=" + std::to_string(spec.rho_limit));
  }
  return std::max(r, 2.0);
}

inline double minimum_effective_potential(const Potential &v0, int l, const SolverSpec &spec) {
  double lo = std::numeric_limits<double>::infinity();
  for (double r = spec.rho_min; r < spec.rho_limit; r *= 1.002)
    lo = std::min(lo, effective_potential(v0, l, r));
  return lo;
}

inline bool confining(const Potential &v0) {
  return v0.kind == Potential::Kind::Log || (v0.kind == Potential::Kind::PowerLaw && v0.gamma > 0);
}

} // namespace detail

/// Eigenstate with the requested node count: node-count bisection, then log-derivative
/// matching at the outer turning point.
inline GridFunction solve_bound(const Potential &v0, int l, int nodes, const SolverSpec &spec = {}) {
  if (l < 0 || nodes < 0)
    throw InvalidQuantumNumbers("l and nodes must be non-negative");
  // attractive singular cores push the grid minimum far below any eigenvalue; Numerov is
  // unstable there, so the search starts no lower than -1e4
  const double vmin = std::max(detail::minimum_effective_potential(v0, l, spec), -1e4);

  // upper bracket: energy whose outward solution has more than `nodes` sign changes
  double hi = 0.0;
  std::optional<detail::LogLinearGrid> grid;
  detail::NumerovBase base;
  for (int k = 0;; ++k) {
    if (detail::confining(v0)) {
      hi = vmin + 0.25 * std::pow(1.25, k);
    } else {
      hi = vmin * std::ldexp(1.0, -k);
      if (hi > -1e-9)
        throw NoBoundState("no state with " + std::to_string(nodes) + " nodes below the continuum");
    }
    double rmax = spec.rho_max;
    try {
      if (rmax <= 0)
        rmax = detail::decay_radius(v0, l, hi, spec);
    } catch (const NoBoundState &) {
      if (detail::confining(v0))
        throw;
      throw NoBoundState("no state with " + std::to_string(nodes) + " nodes inside rho=" +
                         std::to_string(spec.rho_limit));
    }
    if (!grid || grid->rho.back() != rmax) {
      grid.emplace(spec.rho_min, rmax, spec.step);
      base = detail::numerov_base(*grid, v0, l);
    }
    if (detail::count_nodes(*grid, base, v0, l, hi) > nodes)
      break;
    if (k > 200)
      throw NotConverged("could not bracket the eigenvalue");
  }
  double lo = vmin;
  if (detail::count_nodes(*grid, base, v0, l, lo) > nodes)
    throw NotConverged("lower energy bound already has too many nodes");
  auto bisect = [&] {
    for (int it = 0; it < 400 && (hi - lo) > spec.energy_tol * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (detail::count_nodes(*grid, base, v0, l, mid) > nodes ? hi : lo) = mid;
    }
  };
  bisect();
  if (spec.rho_max <= 0) {
    // the bracket energy can overshoot badly; size the grid for the eigenvalue itself
    const double rmax = detail::decay_radius(v0, l, hi, spec);
    if (rmax < 0.9 * grid->rho.back()) {
      grid.emplace(spec.rho_min, rmax, spec.step);
      base = detail::numerov_base(*grid, v0, l);
      const double width = std::max(hi - lo, 1e-9 * std::max(1.0, std::abs(hi)));
      lo = std::max(vmin, lo - width);
      hi += width;
      if (detail::count_nodes(*grid, base, v0, l, lo) > nodes || detail::count_nodes(*grid, base, v0, l, hi) <= nodes)
        throw NotConverged("eigenvalue bracket lost after regridding");
      bisect();
    }
  }
  if (hi - lo > 1e-10 * std::max(1.0, std::abs(hi)))
    throw NotConverged("eigenvalue bracket did not shrink");
  const auto &g = *grid;

  const std::size_t n = g.size();
  const double h2 = g.h * g.h;
  auto turn = detail::outer_turning_point(v0, l, 0.5 * (lo + hi), spec);
  std::size_t c = n / 2;
  if (turn)
    for (std::size_t i = 0; i < n; ++i)
      if (g.rho[i] >= *turn) {
        c = i;
        break;
      }
  // the inward start stops where this state has decayed, else it overflows on long grids
  std::size_t end = n;
  try {
    const double r_end = detail::decay_radius(v0, l, 0.5 * (lo + hi), spec);
    for (std::size_t i = 0; i < n; ++i)
      if (g.rho[i] >= r_end) {
        end = std::min(n, i + 2);
        break;
      }
  } catch (const NoBoundState &) {
  }
  c = std::clamp<std::size_t>(c, 8, end - 8);

  auto shoot = [&](double energy, std::vector<double> &out, std::vector<double> &in) {
    const auto w = detail::numerov_w(base, energy);
    out.assign(c + 2, 0.0);
    out[0] = detail::origin_series(v0, l, g.rho[0]) / std::sqrt(g.jac[0]);
    out[1] = detail::origin_series(v0, l, g.rho[1]) / std::sqrt(g.jac[1]);
    for (std::size_t i = 1; i + 1 < out.size(); ++i)
      out[i + 1] = detail::numerov_next(w, h2, i - 1, i, i + 1, out[i - 1], out[i]);
    in.assign(n, 0.0);
    in[end - 1] = 1e-30;
    in[end - 2] = 1e-30 * std::exp(g.h * std::sqrt(std::max(w[end - 2], 0.0)));
    for (std::size_t i = end - 2; i + 2 > c; --i)
      in[i - 1] = detail::numerov_next(w, h2, i + 1, i, i - 1, in[i + 1], in[i]);
  };
  auto mismatch = [&](double energy) {
    std::vector<double> out, in;
    shoot(energy, out, in);
    const double d_out = (out[c + 1] - out[c - 1]) / out[c];
    const double d_in = (in[c + 1] - in[c - 1]) / in[c];
    return d_out - d_in;
  };

  double energy = 0.5 * (lo + hi);
  const double m_lo = mismatch(lo), m_hi = mismatch(hi);
  if (std::isfinite(m_lo) && std::isfinite(m_hi) && (m_lo > 0) != (m_hi > 0)) {
    std::uintmax_t iters = 100;
    auto r = boost::math::tools::toms748_solve(
        mismatch, lo, hi, m_lo, m_hi, boost::math::tools::eps_tolerance<double>(50), iters);
    energy = 0.5 * (r.first + r.second);
  }

  std::vector<double> out, in;
  shoot(energy, out, in);
  const double ratio = out[c] / in[c];
  GridFunction gf;
  gf.rho = g.rho;
  gf.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = i <= c ? out[i] : in[i] * ratio;
    gf.values[i] = std::sqrt(g.jac[i]) * phi;
  }
  auto sw = simpson_weights(n, g.h);
  gf.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    gf.weights[i] = sw[i] * g.jac[i];
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    norm += gf.weights[i] * gf.values[i] * gf.values[i];
  // positive just outside the origin
  const double sign = gf.values[1] < 0 ? -1.0 : 1.0;
  for (double &u : gf.values)
    u *= sign / std::sqrt(norm);
  auto dudx = uniform_derivative(gf.values, g.h);
  gf.slopes.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    gf.slopes[i] = dudx[i] / g.jac[i];
  gf.l = l;
  gf.energy = energy;
  gf.nodes = nodes;
  return gf;
}

/// Simpson quadrature of the integral of u^2 * weight.
inline double grid_expectation(const GridFunction &state, const std::function<double(double)> &weight) {
  return state.integrate([&](double rho, double u) { return u * u * weight(rho); });
}

/// C_l^2 from u ~ C_l rho^(l+1), extrapolated linearly from the first two grid points.
inline double origin_coefficient_sq(const GridFunction &state) {
  const double r0 = state.rho[0], r1 = state.rho[1];
  const double y0 = state.values[0] / std::pow(r0, state.l + 1);
  const double y1 = state.values[1] / std::pow(r1, state.l + 1);
  const double c = (r1 * y0 - r0 * y1) / (r1 - r0);
  return c * c;
}

/// Origin power of v0 used for regularity checks; Log behaves like g = 0 for derivatives.
inline double effective_gamma(const Potential &v0) {
  switch (v0.kind) {
  case Potential::Kind::Coulomb:
    return -1.0;
  case Potential::Kind::Log:
    return 0.0;
  case Potential::Kind::PowerLaw:
    return v0.gamma_d();
  }
  return 0.0;
}

/// Explicit F_j on the grid for j = 0..3; values hold F_j and weights are shared with `state`.
inline GridFunction grid_f_ladder(const GridFunction &state, const Potential &v0, const Channel &channel, int j) {
  if (j < 0 || j > 3)
    throw InvalidOrder("grid ladders are available for j = 0..3");
  if (channel.l != state.l)
    throw ChannelMismatch("channel l=" + std::to_string(channel.l) + " for state l=" + std::to_string(state.l));
  if (state.slopes.size() != state.size())
    throw std::invalid_argument("grid_f_ladder needs du/drho samples");
  const double g = effective_gamma(v0);
  const int l = state.l;
  // polynomial potentials have vanishing high derivatives, so the origin power only matters otherwise
  const bool polynomial = v0.kind == Potential::Kind::PowerLaw && v0.gamma > 0 && denominator(v0.gamma) == 1;
  if (!polynomial && ((j == 2 && g + l < 0) || (j == 3 && g + l - 2 < 0)))
    throw SingularDerivative("F_" + std::to_string(j) + " is singular at the origin for l=" + std::to_string(l) +
                             " in " + v0.name());
  const double c = channel.direction == Direction::Plus ? l + 1.0 : -static_cast<double>(l);
  GridFunction f = state;
  f.slopes.clear();
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double r = state.rho[i], u = state.values[i], du = state.slopes[i];
    double v = 0.0;
    switch (j) {
    case 0:
      v = r * u;
      break;
    case 1:
      v = 2.0 * (c / r * u - du);
      break;
    case 2:
      v = 4.0 * v0.derivative(1, r) * u;
      break;
    case 3:
      v = 8.0 * ((c / (r * r)) * v0.derivative(1, r) * u - 0.5 * v0.derivative(3, r) * u - v0.derivative(2, r) * du);
      break;
    }
    f.values[i] = v;
  }
  return f;
}

/// Integral of a * b over the shared grid.
inline double grid_overlap(const GridFunction &a, const GridFunction &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a.weights[i] * a.values[i] * b.values[i];
  return s;
}

} // namespace sumrule
