#pragma once

// Sum-rule values from the ladders, closed forms, Kramers-type identities and the
// radiative rates that motivate them.

#include "sumrule/errors.hpp"
#include "sumrule/exactalg.hpp"
#include "sumrule/hydrogen.hpp"
#include "sumrule/ladder.hpp"
#include "sumrule/potentials.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace sumrule {

enum class ChannelSel { Plus, Minus, Total };

inline std::string to_string(ChannelSel c) {
  switch (c) {
  case ChannelSel::Plus:
    return "plus";
  case ChannelSel::Minus:
    return "minus";
  case ChannelSel::Total:
    return "total";
  }
  return "?";
}

inline ChannelSel parse_channel_sel(const std::string &s) {
  if (s == "plus" || s == "+")
    return ChannelSel::Plus;
  if (s == "minus" || s == "-")
    return ChannelSel::Minus;
  if (s == "total")
    return ChannelSel::Total;
  throw std::invalid_argument("unknown channel '" + s + "'");
}

/// Channels contributing to a selection for angular momentum l.
inline std::vector<Channel> channels_for(ChannelSel sel, int l) {
  switch (sel) {
  case ChannelSel::Plus:
    return {Channel::plus(l)};
  case ChannelSel::Minus:
    return {Channel::minus(l)};
  case ChannelSel::Total:
    if (l == 0)
      return {Channel::plus(0)};
    return {Channel::plus(l), Channel::minus(l)};
  }
  return {};
}

/// Either a hydrogen (n, l) or a solved (potential, nodes, l) state.
struct StateLabel {
  std::optional<int> n;
  std::string potential;
  int nodes = 0;
  int l = 0;

  static StateLabel hydrogen(int n, int l) { return {n, "", 0, l}; }
  static StateLabel solved(const Potential &v0, int nodes, int l) { return {std::nullopt, v0.name(), nodes, l}; }

  std::string str() const {
    if (n)
      return bound_state(*n, l).label();
    return potential + " nodes=" + std::to_string(nodes) + " l=" + std::to_string(l);
  }
};

struct SumRuleValue {
  StateLabel state;
  int J = 0;
  ChannelSel channel = ChannelSel::Plus;
  std::optional<double> discrete;
  std::optional<double> continuum;
  std::optional<Rational> constructive;
  std::optional<Rational> closed_form;
  std::optional<double> reference; // closed form evaluated on a solved state
  std::optional<double> ladder;    // grid-rung value on a solved state
  double estimated_error = 0.0;
  double tolerance = 2e-4;
  bool divergent = false;
  bool pass = true;

  std::optional<double> total() const {
    if (!discrete)
      return std::nullopt;
    return *discrete + continuum.value_or(0.0);
  }
};

/// weight * <rung(K)|rung(J-K)>, with rung(-j) = G_j; J = 0 uses the unprojected seed.
inline Rational sum_rule_pairing(const LadderFamily &fam, int J, int K) {
  if (J == 0)
    return fam.channel.weight * overlap(fam.raw_seed, fam.raw_seed);
  const int a = J > 0 ? K : -K;
  const int b = J > 0 ? J - K : J + K;
  if (K < 0 || K > std::abs(J))
    throw InvalidOrder("pairing K=" + std::to_string(K) + " outside 0.." + std::to_string(std::abs(J)));
  return fam.channel.weight * overlap(fam.rung(a), fam.rung(b));
}

inline Rational sum_rule_constructive(const LadderFamily &fam, int J) { return sum_rule_pairing(fam, J, std::abs(J) / 2); }

/// Family with the rungs needed for the canonical pairing at order J.
inline LadderFamily family_for_order(const BoundState &state, const Channel &channel, int J) {
  const int need = std::abs(J) - std::abs(J) / 2;
  if (J >= 0)
    return build_f_ladder(state, channel, std::min(need, 4));
  return build_g_ladder(state, channel, need);
}

/// Exact constructive value for a hydrogen state; Total sums both channels.
inline Rational constructive_value(const BoundState &state, ChannelSel sel, int J) {
  Rational sum = 0;
  for (const Channel &ch : channels_for(sel, state.l))
    sum += sum_rule_constructive(family_for_order(state, ch, J), J);
  return sum;
}

/// Closed forms for S_0..S_4 of a Coulomb state with lambda = l(l+1); the last factor of
/// S_3 and S_4 is 1/sqrt(4 lambda + 1) = 1/(2l+1).
inline Rational closed_form_coulomb(int m, int l, int J) {
  if (m < 1 || l < 0 || l >= m)
    throw InvalidQuantumNumbers("m=" + std::to_string(m) + ", l=" + std::to_string(l));
  const Rational M(m), lam(l * (l + 1));
  const Rational c = (2 * lam - 1) / (4 * lam - 3);
  switch (J) {
  case 0:
    return M * M / 2 * (5 * M * M + 1 - 3 * lam) * c;
  case 1:
    return 1;
  case 2:
    return 4 / (M * M) * c;
  case 3:
    return Rational(-16) / pow(M, 3) / (4 * lam - 3) / (2 * l + 1);
  case 4:
    if (l < 1)
      throw InvalidOrder("S_4 closed form needs l >= 1");
    return pow(4 / M, 3) * (3 * M * M - lam) / (M * M) * (2 * lam - 1) / (lam * pow(4 * lam - 3, 2)) / (2 * l + 1);
  default:
    throw InvalidOrder("closed forms exist for J = 0..4");
  }
}

/// The same S_3, S_4 with the factor 1/sqrt(4 lambda^2 + 1); kept as a negative control.
inline double closed_form_coulomb_printed(int m, int l, int J) {
  if (J != 3 && J != 4)
    return to_double(closed_form_coulomb(m, l, J));
  const double lam = l * (l + 1);
  const double corrected = to_double(closed_form_coulomb(m, l, J));
  return corrected * (2 * l + 1) / std::sqrt(4 * lam * lam + 1);
}

namespace detail {

/// <rho^p> on the grid after checking integrability against u^2 ~ rho^(2l+2).
inline double grid_power_expectation(const GridFunction &s, double p) {
  if (p <= -2.0 * s.l - 3.0)
    throw DivergentExpectation("<rho^" + std::to_string(p) + "> diverges for l=" + std::to_string(s.l));
  return grid_expectation(s, [p](double r) { return std::pow(r, p); });
}

} // namespace detail

/// Power-law and log closed forms evaluated with grid expectation values.
inline double closed_form_power_law(const GridFunction &state, const Potential &v0, int J) {
  const double lam = state.l * (state.l + 1.0);
  const double c = (2 * lam - 1) / (4 * lam - 3);
  const bool log = v0.kind == Potential::Kind::Log;
  const double g = effective_gamma(v0);
  switch (J) {
  case 0:
    return c * detail::grid_power_expectation(state, 2.0);
  case 1:
    return 1.0;
  case 2:
    return 4.0 * c * grid_expectation(state, [&](double r) { return r * v0.derivative(1, r); });
  case 3:
    if (log)
      return 4.0 / (3.0 - 4.0 * lam) * detail::grid_power_expectation(state, -2.0);
    return 4.0 * (c * (g - 2.0) + 1.0) * detail::grid_power_expectation(state, g - 2.0);
  case 4:
    if (log)
      return 16.0 * c * detail::grid_power_expectation(state, -2.0);
    return 16.0 * c * detail::grid_power_expectation(state, 2.0 * g - 2.0);
  default:
    throw InvalidOrder("power-law closed forms exist for J = 0..4");
  }
}

/// Constructive value on a solved state from the explicit grid rungs, J = 0..6.
inline double grid_sum_rule(const GridFunction &state, const Potential &v0, ChannelSel sel, int J) {
  if (J < 0 || J > 6)
    throw InvalidOrder("grid sum rules are available for J = 0..6");
  const int k = J / 2;
  double sum = 0.0;
  for (const Channel &ch : channels_for(sel, state.l)) {
    const GridFunction a = grid_f_ladder(state, v0, ch, k);
    const GridFunction b = k == J - k ? a : grid_f_ladder(state, v0, ch, J - k);
    sum += to_double(ch.weight) * grid_overlap(a, b);
  }
  return sum;
}

/// S_2 from the virial theorem: 4 (2g/(g+2)) eps c.
inline double closed_form_power_law_virial_s2(const GridFunction &state, const Potential &v0) {
  if (v0.kind == Potential::Kind::Log)
    throw InvalidOrder("the virial form of S_2 needs a power law");
  const double lam = state.l * (state.l + 1.0);
  const double g = effective_gamma(v0);
  return 4.0 * (2.0 * g / (g + 2.0)) * state.energy * (2 * lam - 1) / (4 * lam - 3);
}

/// alpha_0 / a_0^3 = 4 S_(-1)^+ for 1S (second-order energy shift in scaled units).
inline Rational polarizability_1s() { return 4 * constructive_value(bound_state(1, 0), ChannelSel::Plus, -1); }

// Kramers-type identities.

enum class FChoice { Const, Rho, Rho2, Rho3, RSquared, V0, V0Prime, RhoV0DoublePrime };

inline const std::vector<FChoice> &all_f_choices() {
  static const std::vector<FChoice> all = {FChoice::Const,    FChoice::Rho, FChoice::Rho2,    FChoice::Rho3,
                                           FChoice::RSquared, FChoice::V0,  FChoice::V0Prime, FChoice::RhoV0DoublePrime};
  return all;
}

inline std::string to_string(FChoice f) {
  switch (f) {
  case FChoice::Const:
    return "const";
  case FChoice::Rho:
    return "rho";
  case FChoice::Rho2:
    return "rho2";
  case FChoice::Rho3:
    return "rho3";
  case FChoice::RSquared:
    return "r_squared";
  case FChoice::V0:
    return "v0";
  case FChoice::V0Prime:
    return "v0_prime";
  case FChoice::RhoV0DoublePrime:
    return "rho_v0_second";
  }
  return "?";
}

inline FChoice parse_f_choice(const std::string &s) {
  for (FChoice f : all_f_choices())
    if (to_string(f) == s)
      return f;
  throw std::invalid_argument("unknown f choice '" + s + "'");
}

namespace detail {

/// p(rho) e^(-c rho) with c >= 0.
struct ExpLaurent {
  Laurent p;
  Rational c = 0;
};

inline ExpLaurent derivative(const ExpLaurent &f) {
  return {sumrule::derivative(f.p) + f.p * Rational(-f.c), f.c};
}

inline ExpLaurent kramers_f(const BoundState &s, FChoice f) {
  switch (f) {
  case FChoice::Const:
    return {laurent_monomial(0, 1), 0};
  case FChoice::Rho:
    return {laurent_monomial(1, 1), 0};
  case FChoice::Rho2:
    return {laurent_monomial(2, 1), 0};
  case FChoice::Rho3:
    return {laurent_monomial(3, 1), 0};
  case FChoice::RSquared:
    return {(s.radial.poly.terms() * s.radial.poly.terms()) * s.radial.norm_sq, 2 * s.radial.rate()};
  case FChoice::V0:
    return {laurent_monomial(-1, -1), 0};
  case FChoice::V0Prime:
    return {laurent_monomial(-2, 1), 0};
  case FChoice::RhoV0DoublePrime:
    return {laurent_monomial(-2, -2), 0};
  }
  return {};
}

inline void check_kramers_validity(const Rational &q, int l, FChoice f) {
  if (q + 2 * l < 0)
    throw DivergentExpectation("f=" + to_string(f) + " behaves as rho^" + to_string(q) + " at the origin, below -2l for l=" +
                               std::to_string(l));
}

} // namespace detail

/// Left side minus right side of the generalized Kramers relation for a Coulomb state, exactly.
inline Rational kramers_general(const BoundState &s, FChoice choice) {
  using detail::ExpLaurent;
  const ExpLaurent f = detail::kramers_f(s, choice);
  const Rational b = f.p.begin()->second;
  const Rational q = f.p.begin()->first;
  detail::check_kramers_validity(q, s.l, choice);
  const ExpLaurent f1 = detail::derivative(f);
  const ExpLaurent f3 = detail::derivative(detail::derivative(f1));
  const Laurent v0 = laurent_monomial(-1, -1), dv0 = laurent_monomial(-2, 1);
  const Rational lam(s.l * (s.l + 1));
  Laurent g = f3.p * Rational(-1, 4);
  g = g + f1.p * s.ksq;
  g = g + dv0 * f.p + (v0 * f1.p) * Rational(2);
  g = g + (f1.p * laurent_monomial(-2, lam)) + (f.p * laurent_monomial(-3, -lam));
  prune(g);
  Rational lhs = 0;
  if (!g.empty()) {
    try {
      PolyExp shifted(s.radial.poly.terms(), s.radial.rate() + f.c);
      lhs = overlap(s.radial.poly, shifted, g) * s.radial.norm_sq;
    } catch (const DivergentAtOrigin &e) {
      throw DivergentExpectation(std::string("f=") + to_string(choice) + ": " + e.what());
    }
  }
  Rational rhs = 0;
  if (q == -2 * s.l)
    rhs = b / 2 * s.radial.leading_coefficient_sq() * (2 * s.l + 1) * (2 * s.l + 1);
  return lhs - rhs;
}

/// The same identity on a solved state, with analytic derivatives of v0 and of f.
inline double kramers_general(const GridFunction &s, const Potential &v0, FChoice choice) {
  if (s.slopes.size() != s.size())
    throw std::invalid_argument("kramers_general needs du/drho samples");
  const int l = s.l;
  const double lam = l * (l + 1.0);
  const double ksq = -2.0 * s.energy;
  const bool log = v0.kind == Potential::Kind::Log;
  const double gam = effective_gamma(v0);
  const double csq = origin_coefficient_sq(s);

  // origin behaviour b rho^q of f
  double b = 1.0, q = 0.0;
  bool log_origin = false;
  switch (choice) {
  case FChoice::Const:
    break;
  case FChoice::Rho:
    q = 1;
    break;
  case FChoice::Rho2:
    q = 2;
    break;
  case FChoice::Rho3:
    q = 3;
    break;
  case FChoice::RSquared:
    b = csq;
    q = 2 * l + 2;
    break;
  case FChoice::V0:
    if (log)
      log_origin = true;
    else
      b = 1.0 / gam, q = gam;
    break;
  case FChoice::V0Prime:
    q = gam - 1.0;
    break;
  case FChoice::RhoV0DoublePrime:
    b = log ? -1.0 : gam - 1.0;
    q = gam - 1.0;
    break;
  }
  if (log_origin && l == 0)
    throw DivergentExpectation("f=ln rho diverges at the origin for l=0");
  if (!log_origin && b != 0.0 && q + 2 * l < 0)
    throw DivergentExpectation("f=" + to_string(choice) + " behaves as rho^" + std::to_string(q) +
                               " at the origin, below -2l for l=" + std::to_string(l));

  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s.rho[i], u = s.values[i], du = s.slopes[i];
    const double v = v0.value(r), dv = v0.derivative(1, r);
    double f = 0, f1 = 0, f3 = 0;
    switch (choice) {
    case FChoice::Const:
      f = 1;
      break;
    case FChoice::Rho:
      f = r, f1 = 1;
      break;
    case FChoice::Rho2:
      f = r * r, f1 = 2 * r;
      break;
    case FChoice::Rho3:
      f = r * r * r, f1 = 3 * r * r, f3 = 6;
      break;
    case FChoice::RSquared: {
      // (u^2)''' = 2 (4 Q u u' + Q' u^2) with u'' = Q u
      const double Q = lam / (r * r) + 2 * v + ksq;
      const double dQ = -2 * lam / (r * r * r) + 2 * dv;
      f = u * u, f1 = 2 * u * du, f3 = 2 * (4 * Q * u * du + dQ * u * u);
      break;
    }
    case FChoice::V0:
      f = v, f1 = dv, f3 = v0.derivative(3, r);
      break;
    case FChoice::V0Prime:
      f = dv, f1 = v0.derivative(2, r), f3 = v0.derivative(4, r);
      break;
    case FChoice::RhoV0DoublePrime:
      f = r * v0.derivative(2, r), f1 = v0.derivative(2, r) + r * v0.derivative(3, r);
      f3 = 3 * v0.derivative(4, r) + r * v0.derivative(5, r);
      break;
    }
    const double integrand = -0.25 * f3 + ksq * f1 + dv * f + 2 * v * f1 + lam * (f1 / (r * r) - f / (r * r * r));
    sum += s.weights[i] * u * u * integrand;
  }
  double rhs = 0.0;
  if (!log_origin && std::abs(q + 2 * l) < 1e-12)
    rhs = b / 2 * csq * (2 * l + 1) * (2 * l + 1);
  return sum - rhs;
}

/// Virial residual <rho v0'> - 2 <eps - v0>; zero for eigenstates.
inline Rational virial_residual(const BoundState &s) {
  // Coulomb: rho v0' = 1/rho, eps - v0 = -k^2/2 + 1/rho
  const Rational inv = expectation_rho_power(s, -1);
  return inv - 2 * (-s.ksq / 2 + inv);
}

inline double virial_residual(const GridFunction &s, const Potential &v0) {
  const double lhs = grid_expectation(s, [&](double r) { return r * v0.derivative(1, r); });
  const double rhs = 2 * grid_expectation(s, [&](double r) { return s.energy - v0.value(r); });
  return lhs - rhs;
}

/// <dV_eff/drho> - C_l^2/2 delta_(l,0).
inline double force_rule_residual(const GridFunction &s, const Potential &v0) {
  const double lam = s.l * (s.l + 1.0);
  const double force = grid_expectation(s, [&](double r) { return v0.derivative(1, r) - lam / (r * r * r); });
  return force - (s.l == 0 ? origin_coefficient_sq(s) / 2 : 0.0);
}

inline Rational force_rule_residual(const BoundState &s) {
  const Rational lam(s.l * (s.l + 1));
  Rational force = expectation_rho_power(s, -2);
  if (s.l > 0)
    force -= lam * expectation_rho_power(s, -3);
  return force - (s.l == 0 ? s.radial.leading_coefficient_sq() / 2 : Rational(0));
}

/// (J+1)/m^2 <rho^J> - (2J+1) <rho^(J-1)> + (J/4)(2l+1+J)(2l+1-J) <rho^(J-2)>.
inline Rational kramers_recurrence(const BoundState &s, int J) {
  if (J < -2 * s.l)
    throw OutOfValidityRange("J=" + std::to_string(J) + " below -2l=" + std::to_string(-2 * s.l));
  const Rational m2(s.n * s.n);
  Rational r = 0;
  auto term = [&](const Rational &coeff, int p) {
    if (coeff != 0)
      r += coeff * expectation_rho_power(s, p);
  };
  term(Rational(J + 1) / m2, J);
  term(Rational(-(2 * J + 1)), J - 1);
  term(Rational(J * (2 * s.l + 1 + J) * (2 * s.l + 1 - J), 4), J - 2);
  return r;
}

// Pairing equivalences.

struct EquivalenceCheck {
  int k = 0;                       // <F_k|F_(J-k)> = <F_(k+1)|F_(J-k-1)> + W(F_k, F_(J-k-1))(0)
  std::optional<Rational> left;    // <F_k|F_(J-k)>
  std::optional<Rational> right;   // <F_(k+1)|F_(J-k-1)>
  std::optional<Rational> wronskian;
  bool applicable = false;
  bool pass = true;
};

struct EquivalenceReport {
  StateLabel state;
  Channel channel;
  int J = 0;
  std::vector<std::optional<Rational>> pairings; // index K: <F_K|F_(J-K)>, empty when divergent
  std::vector<EquivalenceCheck> checks;

  bool pass() const {
    for (const auto &c : checks)
      if (!c.pass)
        return false;
    return true;
  }
};

/// Every adjacent pairing identity at order J, with the Wronskian boundary term.
inline EquivalenceReport equivalence_suite(const LadderFamily &fam, int J) {
  if (J != 3 && J != 4)
    throw InvalidOrder("equivalence suite covers J = 3 and 4");
  if (static_cast<int>(fam.positive.size()) <= J)
    throw InvalidOrder("ladder not built to F_" + std::to_string(J));
  EquivalenceReport rep;
  rep.state = StateLabel::hydrogen(fam.state.n, fam.state.l);
  rep.channel = fam.channel;
  rep.J = J;
  // F_0 is the unprojected seed rho R here; projection only matters for negative orders
  auto rung = [&](int j) -> const RadialFunction & { return j == 0 ? fam.raw_seed : fam.rung(j); };
  for (int k = 0; k <= J; ++k) {
    try {
      rep.pairings.push_back(overlap(rung(k), rung(J - k)));
    } catch (const DivergentAtOrigin &) {
      rep.pairings.emplace_back();
    }
  }
  for (int k = 0; k < J; ++k) {
    EquivalenceCheck c;
    c.k = k;
    c.left = rep.pairings[static_cast<std::size_t>(k)];
    c.right = rep.pairings[static_cast<std::size_t>(k + 1)];
    c.wronskian = wronskian_limit(rung(k), rung(J - k - 1));
    c.applicable = c.left && c.right && c.wronskian;
    if (c.applicable)
      c.pass = *c.left == *c.right + *c.wronskian;
    rep.checks.push_back(c);
  }
  return rep;
}

// Radiative rates.

struct PhysicalConstants {
  double fine_structure = 7.2973525693e-3;
  double electron_mass_energy = 510998.95; // eV
  double hbar = 6.582119569e-16;           // eV s
  double c = 299792458.0;                  // m/s
};

inline const PhysicalConstants &constants() {
  static const PhysicalConstants k;
  return k;
}

struct EinsteinInputs {
  enum class System { Oscillator, Hydrogen2P };
  double fine_structure = constants().fine_structure;
  System system = System::Hydrogen2P;
  double mass_energy = constants().electron_mass_energy; // Mc^2 in eV
  double omega = 0.0;                                    // oscillator angular frequency, 1/s
};

struct EinsteinRates {
  double A = 0.0;          // spontaneous rate, 1/s
  double lifetime = 0.0;   // s
  double classical = 0.0;  // (2/3) alpha (hbar omega / Mc^2) omega at the same frequency and mass
  double quantum_over_classical = 0.0;
};

/// |<b|z|a>|^2 in units of the natural length: 1/2 (oscillator), 2^15/3^10 (hydrogen 1S-2P, Bohr radius).
inline Rational dipole_squared(EinsteinInputs::System system) {
  if (system == EinsteinInputs::System::Hydrogen2P)
    return bound_bound_z2(bound_state(1, 0), 2, Channel::plus(0)); // includes the 1/3 angular weight
  // u_0 = 2 pi^(-1/4) rho e^(-rho^2/2), u_1 = sqrt(8/3) pi^(-1/4) rho^2 e^(-rho^2/2):
  // <u_0|rho|u_1>^2 = 3/2, times the angular weight 1/3
  return Rational(3, 2) * Rational(1, 3);
}

/// A = (4/3) alpha omega (omega |r| / c)^2.
inline EinsteinRates einstein_rates(const EinsteinInputs &in) {
  const auto &k = constants();
  const double alpha = in.fine_structure;
  const double hbar_c = k.hbar * k.c; // eV m
  double omega = in.omega, length_sq = 0.0;
  if (in.system == EinsteinInputs::System::Hydrogen2P) {
    omega = 0.375 * alpha * alpha * in.mass_energy / k.hbar;
    const double a0 = hbar_c / (alpha * in.mass_energy);
    length_sq = a0 * a0;
  } else {
    length_sq = hbar_c * k.c / (in.mass_energy * omega); // hbar / (M omega)
  }
  const double r2 = to_double(dipole_squared(in.system)) * length_sq;
  EinsteinRates r;
  r.A = 4.0 / 3.0 * alpha * omega * omega * omega * r2 / (k.c * k.c);
  r.lifetime = r.A > 0 ? 1.0 / r.A : std::numeric_limits<double>::infinity();
  r.classical = 2.0 / 3.0 * alpha * (k.hbar * omega / in.mass_energy) * omega;
  r.quantum_over_classical = r.classical > 0 ? r.A / r.classical : 0.0;
  return r;
}

/// Gamma = 4 (c hbar / a) (hbar alpha e_q / (M_V c a))^2 C_0^2, in eV.
/// M_V is given as a rest energy (eV) and a in metres.
inline double decay_width(double mv_energy, double e_q, double a, double c0sq, const EinsteinInputs &in = {}) {
  if (mv_energy <= 0 || a <= 0 || c0sq <= 0)
    throw NonPositiveScale("M_V, a and C_0^2 must be positive");
  const auto &k = constants();
  const double hbar_c = k.hbar * k.c; // eV m
  const double coupling = hbar_c * in.fine_structure * e_q / (mv_energy * a);
  return 4.0 * (hbar_c / a) * coupling * coupling * c0sq;
}

} // namespace sumrule
