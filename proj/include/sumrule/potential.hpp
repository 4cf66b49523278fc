#pragma once

#include "sumrule/errors.hpp"
#include "sumrule/rational.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace sumrule {

/// Dimensionless central potential v0(rho), energies in units of hbar^2/(M a^2).
///   Coulomb:      v0 = -1/rho
///   PowerLaw(g):  v0 = rho^g / g   (g != 0, g > -2)
///   Log:          v0 = ln rho
struct Potential {
  enum class Kind { Coulomb, PowerLaw, Log };

  Kind kind = Kind::Coulomb;
  Rational gamma = -1;
  double gamma_cache = -1.0; // to_double(gamma), hot in the solver loops

  static Potential coulomb() { return {Kind::Coulomb, Rational(-1), -1.0}; }
  static Potential log() { return {Kind::Log, Rational(0), 0.0}; }
  static Potential power_law(const Rational &g) {
    if (g == 0 || g <= -2)
      throw std::invalid_argument("power law exponent must satisfy g != 0, g > -2");
    return {Kind::PowerLaw, g, to_double(g)};
  }

  double gamma_d() const { return gamma_cache; }

  /// k-th derivative of v0 at rho (k = 0 is v0 itself).
  double derivative(int k, double rho) const {
    switch (kind) {
    case Kind::Log:
      if (k == 0)
        return std::log(rho);
      // d^k/drho^k ln(rho) = (-1)^(k-1) (k-1)! / rho^k
      return ((k % 2 == 1) ? 1.0 : -1.0) * std::tgamma(k) / std::pow(rho, k);
    case Kind::Coulomb:
    case Kind::PowerLaw: {
      const double g = kind == Kind::Coulomb ? -1.0 : gamma_d();
      double coeff = 1.0 / g;
      for (int i = 0; i < k; ++i)
        coeff *= (g - i);
      if (coeff == 0.0)
        return 0.0;
      return coeff * std::pow(rho, g - k);
    }
    }
    return 0.0;
  }

  double value(double rho) const { return derivative(0, rho); }

  /// Leading behaviour v0 -> b rho^q at the origin; empty for Log.
  std::optional<std::pair<Rational, Rational>> origin_power() const {
    if (kind == Kind::Log)
      return std::nullopt;
    if (kind == Kind::Coulomb)
      return std::pair{Rational(-1), Rational(-1)};
    return std::pair{Rational(1) / gamma, gamma};
  }

  /// True when 2 v0 is a Laurent monomial with integer exponent >= -1.
  bool is_polynomial() const {
    if (kind == Kind::Coulomb)
      return true;
    if (kind == Kind::Log)
      return false;
    return boost::multiprecision::denominator(gamma) == 1 && gamma >= -1;
  }

  std::string name() const {
    switch (kind) {
    case Kind::Coulomb:
      return "coulomb";
    case Kind::Log:
      return "log";
    case Kind::PowerLaw:
      return "gamma=" + to_string(gamma);
    }
    return "?";
  }

  /// Accepts "coulomb", "log", "gamma=<p/q>" (also "gamma=<decimal>" for short decimals).
  static Potential parse(const std::string &text) {
    if (text == "coulomb")
      return coulomb();
    if (text == "log")
      return log();
    const std::string prefix = "gamma=";
    if (text.rfind(prefix, 0) == 0) {
      std::string g = text.substr(prefix.size());
      auto dot = g.find('.');
      if (dot != std::string::npos) {
        std::string digits = g.substr(0, dot) + g.substr(dot + 1);
        Integer den = 1;
        for (std::size_t i = dot + 1; i < g.size(); ++i)
          den *= 10;
        return power_law(Rational(Integer(digits), den));
      }
      return power_law(parse_rational(g));
    }
    throw std::invalid_argument("unknown potential '" + text + "'");
  }
};

} // namespace sumrule
