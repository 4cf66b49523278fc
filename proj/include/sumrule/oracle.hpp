#pragma once

// Brute-force sum rules: truncated discrete sums, continuum quadrature over q = k tan u,
// the contour-integral check for 1S and the comparison against exact values.

#include "sumrule/errors.hpp"
#include "sumrule/hydrogen.hpp"
#include "sumrule/ladder.hpp"
#include "sumrule/potentials.hpp"
#include "sumrule/sumrules.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

namespace sumrule {

struct QuadratureSpec {
  int n_max = 2000;
  int u_panels = 8;             // uniform panels on [0, pi/4]
  double abs_tol = 1e-8;
  bool tail_extrapolation = true;
  double tail_cap = 1.0 / 256;  // quadrature stops at pi/2 - u = tail_cap
  int tail_degree = 5;
  double tail_span = 8.0;       // fit nodes with pi/2 - u < tail_span * tail_cap
  int max_panels = 200;
  int potential_states = 30;    // spectrum size for solved potentials

  void validate() const {
    if (n_max < 2)
      throw std::invalid_argument("n_max must be at least 2");
    if (!(abs_tol > 0))
      throw std::invalid_argument("abs_tol must be positive");
  }
};

struct SplitResult {
  double discrete = 0.0;
  double continuum = 0.0;
  double total = 0.0;
  double estimated_error = 0.0;
};

namespace detail {

/// Sum in a fixed pairwise order, so results do not depend on how terms were produced.
inline double pairwise_sum(const double *x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

inline double pairwise_sum(const std::vector<double> &x) { return pairwise_sum(x.data(), x.size()); }

/// Remainder of a series whose terms fall like n^-p, with p fitted on the last half;
/// infinite when the fit gives p <= 1.
inline double power_tail(const std::vector<double> &terms, double scale) {
  const std::size_t n = terms.size();
  if (n < 4)
    return std::numeric_limits<double>::infinity();
  const double last = std::abs(terms[n - 1]), half = std::abs(terms[n / 2 - 1]);
  if (last <= 1e-15 * std::max(1.0, std::abs(scale)))
    return 0.0;
  const double p = std::log(half / last) / std::log(static_cast<double>(n) / static_cast<double>(n / 2));
  if (!(p > 1.0))
    return std::numeric_limits<double>::infinity();
  return last * static_cast<double>(n) / (p - 1.0);
}

/// |<m l|z|n l'>|^2 for n = 0..n_max (zero below the first allowed n), computed once per channel.
class DiscreteTable {
public:
  DiscreteTable(BoundState state, Channel channel) : state_(std::move(state)), channel_(channel) {}

  const std::vector<double> &z2(int n_max) {
    if (static_cast<int>(z2_.size()) <= n_max) {
      const int start = std::max<int>(static_cast<int>(z2_.size()), channel_.target_l() + 1);
      z2_.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
      for (int n = start; n <= n_max; ++n)
        z2_[static_cast<std::size_t>(n)] = bound_bound_z2_double(state_, n, channel_);
    }
    return z2_;
  }

private:
  BoundState state_;
  Channel channel_;
  std::vector<double> z2_;
};

/// z2(u) with q = k tan u, memoized on the exact abscissa.
class ContinuumTable {
public:
  ContinuumTable(BoundState state, Channel channel) : state_(std::move(state)), channel_(channel) {
    k_ = std::sqrt(to_double(state_.ksq));
    closed_form_ = state_.n == 1 && state_.l == 0;
  }

  double k() const { return k_; }

  double z2(double u) {
    auto it = cache_.find(u);
    if (it != cache_.end())
      return it->second;
    const double q = k_ * std::tan(u);
    const double v = closed_form_ ? continuum_z2_1s(q) : bound_free_z2_direct(state_, channel_, q);
    cache_.emplace(u, v);
    return v;
  }

private:
  BoundState state_;
  Channel channel_;
  double k_ = 1.0;
  bool closed_form_ = false;
  std::map<double, double> cache_;
};

struct Panel {
  double a = 0.0, b = 0.0;
  double kronrod = 0.0, gauss = 0.0;
  double error() const { return std::abs(kronrod - gauss); }
};

template <class F> Panel gauss_kronrod_panel(double a, double b, F &&f) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto &x = GK::abscissa();
  const auto &wk = GK::weights();
  const auto &wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Panel p{a, b, 0.0, 0.0};
  p.kronrod = wk[0] * f(c);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double s = f(c + h * x[i]) + f(c - h * x[i]);
    p.kronrod += wk[i] * s;
    if (i % 2 == 1)
      p.gauss += wg[i / 2] * s;
  }
  p.kronrod *= h;
  p.gauss *= h;
  return p;
}

/// Least-squares polynomial of `degree` in t/t_cap through (t, y), integrated over [0, t_cap].
inline double tail_fit_integral(const std::vector<std::pair<double, double>> &pts, double t_cap, int degree) {
  const int d = degree + 1;
  std::vector<std::vector<double>> a(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d + 1), 0.0));
  for (const auto &[t, y] : pts) {
    std::vector<double> p(static_cast<std::size_t>(d));
    double v = 1.0;
    for (int i = 0; i < d; ++i, v *= t / t_cap)
      p[static_cast<std::size_t>(i)] = v;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j)
        a[i][j] += p[i] * p[j];
      a[i][d] += p[i] * y;
    }
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double f = a[j][i] / a[i][i];
      for (int m = i; m <= d; ++m)
        a[j][m] -= f * a[i][m];
    }
  std::vector<double> c(static_cast<std::size_t>(d));
  for (int i = d - 1; i >= 0; --i) {
    double r = a[i][d];
    for (int j = i + 1; j < d; ++j)
      r -= a[i][j] * c[j];
    c[i] = r / a[i][i];
  }
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    s += c[i] * t_cap / (i + 1);
  return s;
}

} // namespace detail

/// Caches matrix elements per (state, channel) so a table reuses them across orders.
class Oracle {
public:
  explicit Oracle(QuadratureSpec spec = {}) : spec_(spec) { spec_.validate(); }

  const QuadratureSpec &spec() const { return spec_; }

  /// Truncated sum over n of weight (k_m^2 - k_n^2)^J |z|^2 with the degenerate-term policy;
  /// `tail` receives an n^-3 extrapolation of the omitted terms.
  double discrete_sum(const BoundState &state, const Channel &channel, int J, double *tail = nullptr) {
    const auto &z2 = discrete_table(state, channel).z2(spec_.n_max);
    const double km2 = to_double(state.ksq);
    std::vector<double> terms;
    terms.reserve(z2.size());
    for (int n = channel.target_l() + 1; n <= spec_.n_max; ++n) {
      const double z = z2[static_cast<std::size_t>(n)];
      if (n == state.n) {
        if (J == 0)
          terms.push_back(z);
        continue; // weight 0 for J >= 1, excluded for J < 0
      }
      const double w = km2 - 1.0 / (static_cast<double>(n) * n);
      terms.push_back(std::pow(w, J) * z);
    }
    if (tail) {
      // terms fall as n^-3, so the remainder is about last * N / 2
      *tail = terms.empty() ? 0.0 : std::abs(terms.back()) * spec_.n_max / 2.0;
    }
    return detail::pairwise_sum(terms);
  }

  /// Integral over q of (k_m^2 + q^2)^J |<m l|z|q l'>|^2.
  double continuum_integral(const BoundState &state, const Channel &channel, int J, double *error = nullptr) {
    check_convergent(state, channel, J);
    auto &table = continuum_table(state, channel);
    const double k = table.k();
    const double pi = std::numbers::pi;
    auto g = [&](double u) {
      const double sec = 1.0 / std::cos(u);
      return std::pow(k, 2 * J + 1) * std::pow(sec, 2 * J + 2) * table.z2(u);
    };

    std::vector<detail::Panel> panels;
    for (int i = 0; i < spec_.u_panels; ++i)
      panels.push_back(detail::gauss_kronrod_panel(pi / 4 * i / spec_.u_panels, pi / 4 * (i + 1) / spec_.u_panels, g));
    double t = pi / 4;
    while (t / 2 >= spec_.tail_cap * 0.999) {
      panels.push_back(detail::gauss_kronrod_panel(pi / 2 - t, pi / 2 - t / 2, g));
      t /= 2;
    }
    const double t_cap = t;

    auto total_error = [&] {
      double e = 0.0;
      for (const auto &p : panels)
        e += p.error();
      return e;
    };
    while (total_error() > spec_.abs_tol && static_cast<int>(panels.size()) < spec_.max_panels) {
      auto worst = std::max_element(panels.begin(), panels.end(),
                                    [](const auto &a, const auto &b) { return a.error() < b.error(); });
      const double a = worst->a, b = worst->b, mid = 0.5 * (a + b);
      *worst = detail::gauss_kronrod_panel(a, mid, g);
      panels.push_back(detail::gauss_kronrod_panel(mid, b, g));
    }
    std::sort(panels.begin(), panels.end(), [](const auto &a, const auto &b) { return a.a < b.a; });
    std::vector<double> parts;
    for (const auto &p : panels)
      parts.push_back(p.kronrod);
    double sum = detail::pairwise_sum(parts);
    double err = total_error();

    // rebuild the fit nodes from the cached abscissae inside the fit window
    std::vector<std::pair<double, double>> pts;
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    for (const auto &p : panels) {
      if (pi / 2 - p.a > spec_.tail_span * t_cap * 1.0000001)
        continue;
      const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
      for (std::size_t i = 0; i < GK::abscissa().size(); ++i) {
        for (double s : {1.0, -1.0}) {
          if (i == 0 && s < 0)
            continue;
          const double u = c + s * h * GK::abscissa()[i];
          pts.emplace_back(pi / 2 - u, g(u));
        }
      }
    }
    const double tail = detail::tail_fit_integral(pts, t_cap, spec_.tail_degree);
    const double tail_lower = detail::tail_fit_integral(pts, t_cap, spec_.tail_degree - 1);
    if (spec_.tail_extrapolation) {
      sum += tail;
      err += std::abs(tail - tail_lower);
    } else {
      err += std::abs(tail);
    }
    if (error)
      *error = err;
    return sum;
  }

  SplitResult split(const BoundState &state, const Channel &channel, int J) {
    SplitResult r;
    double tail = 0.0, cerr = 0.0;
    r.discrete = discrete_sum(state, channel, J, &tail);
    r.continuum = continuum_integral(state, channel, J, &cerr);
    r.total = r.discrete + r.continuum;
    r.estimated_error = tail + cerr;
    return r;
  }

  /// All available columns for a hydrogen state; divergent orders keep only the discrete part.
  SumRuleValue compare(const BoundState &state, ChannelSel sel, int J, double tol = 2e-4) {
    SumRuleValue v;
    v.state = StateLabel::hydrogen(state.n, state.l);
    v.J = J;
    v.channel = sel;
    v.tolerance = tol;
    double discrete = 0.0, continuum = 0.0, err = 0.0;
    try {
      v.constructive = constructive_value(state, sel, J);
    } catch (const DivergentAtOrigin &) {
      v.divergent = true;
    }
    for (const Channel &ch : channels_for(sel, state.l)) {
      double tail = 0.0;
      discrete += discrete_sum(state, ch, J, &tail);
      err += tail;
      if (!v.divergent) {
        double cerr = 0.0;
        continuum += continuum_integral(state, ch, J, &cerr);
        err += cerr;
      }
    }
    v.discrete = discrete;
    if (!v.divergent)
      v.continuum = continuum;
    v.estimated_error = err;
    const bool total_sel = sel == ChannelSel::Total || (sel == ChannelSel::Plus && state.l == 0);
    if (total_sel && J >= 0 && J <= 4 && !(J == 4 && state.l == 0))
      v.closed_form = closed_form_coulomb(state.n, state.l, J);
    v.pass = true;
    if (v.constructive && v.total())
      v.pass = std::abs(*v.total() - to_double(*v.constructive)) <= std::max(tol, err);
    if (v.constructive && v.closed_form && *v.constructive != *v.closed_form)
      v.pass = false;
    return v;
  }

  /// Discrete-only sums over the solved spectrum of a confining potential.
  SumRuleValue compare_potential(const Potential &v0, int l, int nodes, ChannelSel sel, int J, double tol = 1e-4) {
    if (v0.kind == Potential::Kind::Coulomb)
      throw std::invalid_argument("Coulomb states are selected by (n, l), not by potential");
    if (!detail::confining(v0))
      throw std::invalid_argument("spectral sums need a confining potential (gamma > 0 or log)");
    SumRuleValue v;
    v.state = StateLabel::solved(v0, nodes, l);
    v.J = J;
    v.channel = sel;
    v.tolerance = tol;
    const auto &spectrum = potential_spectrum(v0, l, nodes);
    const GridFunction &m = spectrum.initial;
    double sum = 0.0, tail = 0.0;
    for (const Channel &ch : channels_for(sel, l)) {
      const auto &finals = ch.direction == Direction::Plus ? spectrum.plus : spectrum.minus;
      std::vector<double> terms;
      for (const auto &f : finals) {
        double ov = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i)
          ov += m.weights[i] * m.rho[i] * m.values[i] * f.values[i];
        terms.push_back(to_double(ch.weight) * std::pow(2.0 * (f.energy - m.energy), J) * ov * ov);
      }
      sum += detail::pairwise_sum(terms);
      tail += detail::power_tail(terms, sum);
    }
    v.discrete = sum;
    v.continuum.reset();
    v.estimated_error = tail;
    const bool total_sel = sel == ChannelSel::Total || (sel == ChannelSel::Plus && l == 0);
    if (total_sel && J >= 0 && J <= 4) {
      try {
        v.reference = closed_form_power_law(m, v0, J);
      } catch (const DivergentExpectation &) {
        v.divergent = true;
      }
    }
    if (J >= 0 && J <= 6) {
      try {
        v.ladder = grid_sum_rule(m, v0, sel, J);
      } catch (const SingularDerivative &) {
      }
    }
    // the truncated sum plus its fitted remainder must land within that remainder
    const double extrapolated = sum + tail;
    if (v.reference) {
      const double scale = std::max(1.0, std::abs(*v.reference));
      v.pass = std::abs(extrapolated - *v.reference) <= std::max(tol * scale, tail);
      if (v.ladder)
        v.pass = v.pass && std::abs(*v.ladder - *v.reference) <= tol * scale;
    } else if (v.ladder) {
      v.pass = std::abs(extrapolated - *v.ladder) <= std::max(tol * std::max(1.0, std::abs(*v.ladder)), tail);
    }
    return v;
  }

private:
  struct Spectrum {
    GridFunction initial;
    std::vector<GridFunction> plus, minus;
  };

  void check_convergent(const BoundState &state, const Channel &channel, int J) {
    if (J <= 0)
      return;
    try {
      (void)sum_rule_constructive(family_for_order(state, channel, J), J);
    } catch (const DivergentAtOrigin &e) {
      throw DivergentSumRule(state.label() + " " + to_string(channel.direction) + " J=" + std::to_string(J) +
                             ": continuum integral diverges at large q (" + e.what() + ")");
    }
  }

  detail::DiscreteTable &discrete_table(const BoundState &s, const Channel &ch) {
    auto key = std::tuple{s.n, s.l, static_cast<int>(ch.direction)};
    auto it = discrete_.find(key);
    if (it == discrete_.end())
      it = discrete_.emplace(key, std::make_unique<detail::DiscreteTable>(s, ch)).first;
    return *it->second;
  }

  detail::ContinuumTable &continuum_table(const BoundState &s, const Channel &ch) {
    auto key = std::tuple{s.n, s.l, static_cast<int>(ch.direction)};
    auto it = continuum_.find(key);
    if (it == continuum_.end())
      it = continuum_.emplace(key, std::make_unique<detail::ContinuumTable>(s, ch)).first;
    return *it->second;
  }

  const Spectrum &potential_spectrum(const Potential &v0, int l, int nodes) {
    auto key = std::tuple{v0.name(), l, nodes};
    auto it = spectra_.find(key);
    if (it != spectra_.end())
      return it->second;
    // one shared grid, long enough for the highest final state
    const int top = spec_.potential_states - 1;
    GridFunction probe = solve_bound(v0, l + 1, top);
    SolverSpec ss;
    ss.rho_max = probe.rho.back();
    Spectrum sp;
    sp.initial = solve_bound(v0, l, nodes, ss);
    for (int k = 0; k <= top; ++k) {
      sp.plus.push_back(solve_bound(v0, l + 1, k, ss));
      if (l > 0)
        sp.minus.push_back(solve_bound(v0, l - 1, k, ss));
    }
    return spectra_.emplace(key, std::move(sp)).first->second;
  }

  QuadratureSpec spec_;
  std::map<std::tuple<int, int, int>, std::unique_ptr<detail::DiscreteTable>> discrete_;
  std::map<std::tuple<int, int, int>, std::unique_ptr<detail::ContinuumTable>> continuum_;
  std::map<std::tuple<std::string, int, int>, Spectrum> spectra_;
};

inline double discrete_sum(const BoundState &state, const Channel &channel, int J, const QuadratureSpec &spec = {}) {
  return Oracle(spec).discrete_sum(state, channel, J);
}

inline double continuum_integral(const BoundState &state, const Channel &channel, int J, const QuadratureSpec &spec = {}) {
  return Oracle(spec).continuum_integral(state, channel, J);
}

inline SumRuleValue compare(const BoundState &state, ChannelSel sel, int J, const QuadratureSpec &spec = {}) {
  return Oracle(spec).compare(state, sel, J);
}

// Contour form of the 1S sums: the discrete terms are residues at v = 1/n and the continuum
// is the line integral along the positive imaginary v axis of the same integrand.

/// -(2^8/3) v (1 - v^2)^(J-5) exp(-4 atanh(v)/v) / (1 - exp(-2 pi i / v)).
inline std::complex<double> contour_integrand(std::complex<double> v, int J) {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  const double pi = std::numbers::pi;
  return -(256.0 / 3.0) * v * std::pow(C(1.0) - v * v, J - 5) * std::exp(-4.0 * std::atanh(v) / v) /
         (C(1.0) - std::exp(-2.0 * pi * i / v));
}

struct ResidueCheck {
  int n = 0;
  double residue = 0.0;       // counter-clockwise circle integral
  double discrete_term = 0.0; // ((n^2-1)/n^2)^J |<1S|z|nP>|^2
  double radius_change = 0.0; // |residue(r) - residue(r/2)|
};

struct ContourReport {
  int J = 0;
  std::vector<ResidueCheck> residues;
  double line_integral = 0.0;
  double continuum = 0.0;
  double tolerance = 1e-6;

  bool pass() const {
    for (const auto &r : residues)
      if (std::abs(r.residue - r.discrete_term) > tolerance || r.radius_change > 1e-8)
        return false;
    return std::abs(line_integral - continuum) <= tolerance;
  }
};

namespace detail {

inline double circle_integral(int n, int J, double radius, int points) {
  const std::complex<double> centre(1.0 / n, 0.0);
  std::complex<double> s = 0.0;
  for (int k = 0; k < points; ++k) {
    const double th = 2.0 * std::numbers::pi * k / points;
    const std::complex<double> e(std::cos(th), std::sin(th));
    // dv = i r e^(i th) dth
    s += contour_integrand(centre + radius * e, J) * std::complex<double>(0.0, radius) * e;
  }
  return (s * (2.0 * std::numbers::pi / points)).real();
}

/// Integral of f(i s) i ds over s in (0, inf) with s = tan u, composite Gauss-Legendre.
inline double imaginary_axis_integral(int J, int panels) {
  using G = boost::math::quadrature::gauss<double, 10>;
  const double pi = std::numbers::pi;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = pi / 2 * p / panels, b = pi / 2 * (p + 1) / panels;
    sum += G::integrate(
        [&](double u) {
          const double s = std::tan(u), sec = 1.0 / std::cos(u);
          const std::complex<double> v(0.0, s);
          return (contour_integrand(v, J) * std::complex<double>(0.0, 1.0)).real() * sec * sec;
        },
        a, b);
  }
  return sum;
}

} // namespace detail

inline ContourReport contour_check(int J, Oracle &oracle) {
  if (J < 0 || J > 3)
    throw InvalidOrder("contour check covers J = 0..3");
  ContourReport rep;
  rep.J = J;
  const BoundState s1 = bound_state(1, 0);
  for (int n = 2; n <= 10; ++n) {
    ResidueCheck rc;
    rc.n = n;
    const double radius = 0.25 / (n * (n + 1.0));
    const double coarse = detail::circle_integral(n, J, radius, 128);
    rc.residue = detail::circle_integral(n, J, radius, 256);
    if (std::abs(coarse - rc.residue) > 1e-10 * std::max(1.0, std::abs(rc.residue)))
      throw QuadratureNotConverged("circle quadrature at v = 1/" + std::to_string(n));
    rc.radius_change = std::abs(detail::circle_integral(n, J, radius / 2, 256) - rc.residue);
    const double w = 1.0 - 1.0 / (static_cast<double>(n) * n);
    rc.discrete_term = std::pow(w, J) * to_double(bound_bound_z2(s1, n, Channel::plus(0)));
    rep.residues.push_back(rc);
  }
  const double coarse = detail::imaginary_axis_integral(J, 64);
  rep.line_integral = detail::imaginary_axis_integral(J, 128);
  if (std::abs(coarse - rep.line_integral) > 1e-9)
    throw QuadratureNotConverged("imaginary-axis integral for J=" + std::to_string(J));
  rep.continuum = oracle.continuum_integral(s1, Channel::plus(0), J);
  return rep;
}

inline ContourReport contour_check(int J, const QuadratureSpec &spec = {}) {
  Oracle oracle(spec);
  return contour_check(J, oracle);
}

} // namespace sumrule
