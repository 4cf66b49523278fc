#include "sumrule/sumrules.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sumrule;

namespace {

const Potential kOscillator = Potential::power_law(2);
const Potential kLinear = Potential::power_law(1);
const Potential kLog = Potential::log();

Rational expect(int n, int l, int p) { return expectation_rho_power(bound_state(n, l), p); }

const std::pair<int, int> kLowStates[] = {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}};

} // namespace

TEST(Constructive, Examples) {
  EXPECT_EQ(constructive_value(bound_state(1, 0), ChannelSel::Plus, 3), rat(16, 3));
  EXPECT_EQ(constructive_value(bound_state(2, 0), ChannelSel::Plus, -1), 30);
  EXPECT_EQ(constructive_value(bound_state(2, 1), ChannelSel::Total, 0), 18);
  EXPECT_EQ(constructive_value(bound_state(2, 1), ChannelSel::Total, -2), 371);
}

TEST(Constructive, OneSTable) {
  const int orders[] = {-4, -3, -2, -1, 0, 1, 2, 3};
  const Rational values[] = {rat(9673, 4608), rat(319, 192), rat(43, 32), rat(9, 8), 1, 1, rat(4, 3), rat(16, 3)};
  for (int i = 0; i < 8; ++i)
    EXPECT_EQ(constructive_value(bound_state(1, 0), ChannelSel::Plus, orders[i]), values[i]) << orders[i];
}

TEST(Constructive, DivergentOrders) {
  EXPECT_THROW(constructive_value(bound_state(1, 0), ChannelSel::Plus, 4), DivergentAtOrigin);
  EXPECT_THROW(constructive_value(bound_state(2, 0), ChannelSel::Plus, 4), DivergentAtOrigin);
}

TEST(Constructive, ZeroOrderUsesRawSeed) {
  // S_0 = <rho^2> times the summed channel weights
  for (auto [n, l] : kLowStates) {
    Rational w = Channel::plus(l).weight;
    if (l > 0)
      w += Channel::minus(l).weight;
    EXPECT_EQ(constructive_value(bound_state(n, l), ChannelSel::Total, 0), w * expect(n, l, 2)) << n << l;
  }
}

TEST(Constructive, PairingChoice) {
  auto fam = family_for_order(bound_state(2, 1), Channel::plus(1), 4);
  EXPECT_EQ(sum_rule_pairing(fam, 4, 2), sum_rule_constructive(fam, 4));
  EXPECT_THROW(sum_rule_pairing(fam, 4, 5), InvalidOrder);
}

TEST(ClosedForm, Examples) {
  EXPECT_EQ(closed_form_coulomb(2, 0, 0), 14);
  EXPECT_EQ(closed_form_coulomb(2, 1, 3), rat(-2, 15));
  EXPECT_EQ(closed_form_coulomb(1, 0, 2), rat(4, 3));
  EXPECT_EQ(closed_form_coulomb(2, 1, 4), rat(2, 5));
  EXPECT_THROW(closed_form_coulomb(1, 0, 4), InvalidOrder);
  EXPECT_THROW(closed_form_coulomb(2, 0, 5), InvalidOrder);
  EXPECT_THROW(closed_form_coulomb(2, 2, 0), InvalidQuantumNumbers);
}

TEST(ClosedForm, PrintedFactorIsANegativeControl) {
  EXPECT_NEAR(closed_form_coulomb_printed(2, 1, 3), -0.0970143, 1e-6);
  EXPECT_NEAR(closed_form_coulomb_printed(2, 1, 4), 0.2910428, 1e-6);
  EXPECT_GT(std::abs(closed_form_coulomb_printed(2, 1, 3) - to_double(constructive_value(bound_state(2, 1), ChannelSel::Total, 3))), 1e-2);
  // the two factors agree at lambda = 0
  EXPECT_DOUBLE_EQ(closed_form_coulomb_printed(3, 0, 3), to_double(closed_form_coulomb(3, 0, 3)));
}

TEST(SumRuleProperty, ConstructiveEqualsClosedForm) {
  for (int m = 1; m <= 5; ++m)
    for (int l = 0; l < m; ++l)
      for (int J = 0; J <= 4; ++J) {
        if (J == 4 && l == 0)
          continue;
        EXPECT_EQ(constructive_value(bound_state(m, l), ChannelSel::Total, J), closed_form_coulomb(m, l, J))
            << m << "," << l << " J=" << J;
      }
}

TEST(SumRuleProperty, Trk) {
  for (auto [n, l] : kLowStates)
    EXPECT_EQ(constructive_value(bound_state(n, l), ChannelSel::Total, 1), 1) << n << l;
}

TEST(SumRuleProperty, ChannelSplit) {
  for (int m = 2; m <= 4; ++m)
    for (int l = 1; l < m; ++l) {
      auto s = bound_state(m, l);
      EXPECT_EQ(constructive_value(s, ChannelSel::Plus, 1), Rational((l + 1) * (l + 1), 2 * l + 1));
      EXPECT_EQ(constructive_value(s, ChannelSel::Minus, 1), Rational(-l * l, 2 * l + 1));
      for (int J = -3; J <= 3; ++J)
        EXPECT_EQ(constructive_value(s, ChannelSel::Total, J),
                  constructive_value(s, ChannelSel::Plus, J) + constructive_value(s, ChannelSel::Minus, J));
    }
}

TEST(SumRuleProperty, ThirdOrderForSStates) {
  for (int m = 1; m <= 5; ++m)
    EXPECT_EQ(constructive_value(bound_state(m, 0), ChannelSel::Total, 3), Rational(16, 3) / pow(Rational(m), 3)) << m;
}

TEST(Polarizability, OneS) {
  EXPECT_EQ(polarizability_1s(), rat(9, 2));
  EXPECT_EQ(constructive_value(bound_state(1, 0), ChannelSel::Plus, -1), rat(9, 8));
}

TEST(PowerLawClosedForm, Oscillator) {
  auto s = solve_bound(kOscillator, 0, 0);
  EXPECT_NEAR(closed_form_power_law(s, kOscillator, 2), 2.0, 1e-6);
  EXPECT_NEAR(closed_form_power_law_virial_s2(s, kOscillator), 2.0, 1e-9);
  EXPECT_NEAR(closed_form_power_law(s, kOscillator, 4), 16.0 / 3.0 * 1.5, 1e-6);
  EXPECT_EQ(closed_form_power_law(s, kOscillator, 1), 1.0);
  EXPECT_THROW(closed_form_power_law(s, kOscillator, 5), InvalidOrder);
}

TEST(PowerLawClosedForm, VirialAndExpectationFormsAgree) {
  for (const auto &v0 : {kOscillator, kLinear, Potential::power_law(3)})
    for (int l = 0; l <= 2; ++l) {
      auto s = solve_bound(v0, l, 1);
      EXPECT_NEAR(closed_form_power_law(s, v0, 2), closed_form_power_law_virial_s2(s, v0), 1e-6) << v0.name() << l;
    }
}

TEST(PowerLawClosedForm, LogRatio) {
  for (int l = 0; l <= 2; ++l) {
    auto s = solve_bound(kLog, l, 0);
    const double ratio = closed_form_power_law(s, kLog, 4) / closed_form_power_law(s, kLog, 3);
    EXPECT_NEAR(ratio, 4.0 * (1 - 2 * l * (l + 1)), 1e-12) << l;
  }
  EXPECT_THROW(closed_form_power_law_virial_s2(solve_bound(kLog, 0, 0), kLog), InvalidOrder);
}

TEST(PowerLawClosedForm, DivergentExpectation) {
  // <rho^(2g-2)> = <rho^-3> for g = -1/2 is not integrable against rho^2 at l = 0
  const Potential soft = Potential::power_law(rat(-1, 2));
  auto s = solve_bound(soft, 0, 0);
  EXPECT_THROW(closed_form_power_law(s, soft, 4), DivergentExpectation);
}

TEST(GridSumRule, MatchesClosedForms) {
  for (const auto &v0 : {kOscillator, kLinear, kLog}) {
    for (int l = 0; l <= 1; ++l) {
      auto s = solve_bound(v0, l, 0);
      for (int J = 0; J <= 4; ++J)
        EXPECT_NEAR(grid_sum_rule(s, v0, ChannelSel::Total, J), closed_form_power_law(s, v0, J),
                    1e-6 * std::max(1.0, std::abs(closed_form_power_law(s, v0, J))))
            << v0.name() << " l=" << l << " J=" << J;
    }
  }
}

TEST(GridSumRule, TrkForNumericStates) {
  for (const auto &v0 : {kOscillator, kLog})
    for (int l = 0; l <= 2; ++l)
      EXPECT_NEAR(grid_sum_rule(solve_bound(v0, l, 1), v0, ChannelSel::Total, 1), 1.0, 1e-4) << v0.name() << l;
}

TEST(Kramers, GeneralIdentityExact) {
  for (auto [n, l] : {std::pair{1, 0}, {2, 0}, {2, 1}, {3, 1}, {3, 2}, {4, 3}}) {
    auto s = bound_state(n, l);
    for (FChoice f : all_f_choices()) {
      const bool singular = l == 0 && (f == FChoice::V0 || f == FChoice::V0Prime || f == FChoice::RhoV0DoublePrime);
      if (singular)
        EXPECT_THROW(kramers_general(s, f), DivergentExpectation) << n << l << to_string(f);
      else
        EXPECT_EQ(kramers_general(s, f), 0) << n << l << " " << to_string(f);
    }
  }
}

TEST(Kramers, RhoCubedValue) {
  // <3 rho^2 (k^2 + 2 v0) + rho^3 v0'> = -(2l-1)(2l+3)/2 for (2,1)
  const Rational lhs = 3 * rat(1, 4) * expect(2, 1, 2) - 6 * expect(2, 1, 1) + expect(2, 1, 1);
  EXPECT_EQ(lhs, rat(-5, 2));
  EXPECT_EQ(kramers_general(bound_state(2, 1), FChoice::Rho3), 0);
}

TEST(Kramers, NumericStates) {
  for (const auto &v0 : {kOscillator, kLinear})
    for (int l = 0; l <= 2; ++l) {
      auto s = solve_bound(v0, l, 1);
      for (FChoice f : all_f_choices()) {
        if (l == 0 && (f == FChoice::V0 || f == FChoice::V0Prime || f == FChoice::RhoV0DoublePrime) &&
            v0.gamma < 2)
          continue;
        EXPECT_NEAR(kramers_general(s, v0, f), 0.0, 1e-5) << v0.name() << " l=" << l << " " << to_string(f);
      }
    }
}

TEST(Kramers, ProbabilityDensityThirdDerivative) {
  for (int nodes = 0; nodes <= 2; ++nodes)
    EXPECT_NEAR(kramers_general(solve_bound(kOscillator, 1, nodes), kOscillator, FChoice::RSquared), 0.0, 1e-6);
}

TEST(Kramers, ParseNames) {
  for (FChoice f : all_f_choices())
    EXPECT_EQ(parse_f_choice(to_string(f)), f);
  EXPECT_THROW(parse_f_choice("rho4"), std::invalid_argument);
}

TEST(KramersRecurrence, ThreeDMinusThree) {
  EXPECT_EQ(expect(3, 2, -3), rat(1, 405));
  EXPECT_EQ(expect(3, 2, -4), rat(2, 3645));
  EXPECT_EQ(expect(3, 2, -5), rat(2, 10935));
  EXPECT_EQ(5 * expect(3, 2, -4), rat(2, 9) * expect(3, 2, -3) + 12 * expect(3, 2, -5));
  EXPECT_EQ(5 * expect(3, 2, -4), rat(2, 729));
  EXPECT_EQ(kramers_recurrence(bound_state(3, 2), -3), 0);
}

TEST(KramersRecurrence, ValidityRange) {
  EXPECT_EQ(kramers_recurrence(bound_state(2, 1), 1), 0);
  EXPECT_THROW(kramers_recurrence(bound_state(2, 1), -3), OutOfValidityRange);
  for (int n = 1; n <= 5; ++n)
    for (int l = 0; l < n; ++l)
      for (int J = -2 * l; J <= 3; ++J)
        EXPECT_EQ(kramers_recurrence(bound_state(n, l), J), 0) << n << l << " J=" << J;
}

TEST(Residuals, VirialAndForce) {
  for (auto [n, l] : kLowStates) {
    EXPECT_EQ(virial_residual(bound_state(n, l)), 0);
    EXPECT_EQ(force_rule_residual(bound_state(n, l)), 0);
  }
  auto s = solve_bound(kLinear, 0, 2);
  EXPECT_NEAR(virial_residual(s, kLinear), 0.0, 1e-6);
  EXPECT_NEAR(force_rule_residual(s, kLinear), 0.0, 1e-5);
}

TEST(Equivalence, OneSThirdOrder) {
  auto rep = equivalence_suite(build_f_ladder(bound_state(1, 0), Channel::plus(0), 3), 3);
  EXPECT_EQ(*rep.pairings[1], 16);
  EXPECT_EQ(*rep.pairings[0], -32);
  EXPECT_EQ(*rep.checks[0].wronskian, -48);
  EXPECT_TRUE(rep.pass());
}

TEST(Equivalence, TwoSThirdOrder) {
  auto rep = equivalence_suite(build_f_ladder(bound_state(2, 0), Channel::plus(0), 3), 3);
  EXPECT_EQ(*rep.pairings[1], 2);
  EXPECT_EQ(*rep.pairings[0], -4);
  // -48/m^3 at m = 2
  EXPECT_EQ(*rep.checks[0].wronskian, -6);
  EXPECT_TRUE(rep.checks[0].applicable);
  EXPECT_TRUE(rep.pass());
}

TEST(Equivalence, TwoPFourthOrder) {
  auto plus = equivalence_suite(build_f_ladder(bound_state(2, 1), Channel::plus(1), 4), 4);
  EXPECT_EQ(*plus.pairings[2], rat(2, 3));
  EXPECT_EQ(*plus.pairings[1], rat(2, 3));
  EXPECT_TRUE(plus.pass());
  auto minus = equivalence_suite(build_f_ladder(bound_state(2, 1), Channel::minus(1), 4), 4);
  EXPECT_EQ(*minus.pairings[1], rat(5, 3));
  EXPECT_EQ(*minus.pairings[2], rat(2, 3));
  EXPECT_EQ(*minus.checks[1].wronskian, 1);
  // the unprojected seed keeps <F_0|F_4> finite
  EXPECT_EQ(*minus.pairings[0], rat(5, 3));
  EXPECT_EQ(*minus.checks[0].wronskian, 0);
  EXPECT_TRUE(minus.pass());
}

TEST(Equivalence, ThreeDAllPairingsEqual) {
  auto rep = equivalence_suite(build_f_ladder(bound_state(3, 2), Channel::plus(2), 4), 4);
  for (const auto &p : rep.pairings)
    EXPECT_EQ(*p, rat(32, 3645));
  EXPECT_TRUE(rep.pass());
  EXPECT_THROW(equivalence_suite(build_f_ladder(bound_state(3, 2), Channel::plus(2), 4), 2), InvalidOrder);
}

TEST(Einstein, HydrogenLifetime) {
  auto r = einstein_rates({});
  EXPECT_NEAR(r.lifetime, 1.6e-9, 0.016e-9);
  EXPECT_EQ(dipole_squared(EinsteinInputs::System::Hydrogen2P), Rational(32768, 59049));
}

TEST(Einstein, OscillatorMatchesClassical) {
  EinsteinInputs in;
  in.system = EinsteinInputs::System::Oscillator;
  in.omega = 2.0e15;
  auto r = einstein_rates(in);
  EXPECT_NEAR(r.quantum_over_classical, 1.0, 1e-12);
  EXPECT_EQ(dipole_squared(in.system), rat(1, 2));
}

TEST(Einstein, NoCoupling) {
  EinsteinInputs in;
  in.fine_structure = 0.0;
  in.system = EinsteinInputs::System::Oscillator;
  in.omega = 1e15;
  EXPECT_EQ(einstein_rates(in).A, 0.0);
  in.fine_structure = 1e-12;
  EXPECT_LT(einstein_rates(in).A, 1e-2);
}

TEST(DecayWidth, TrivialProperties) {
  EXPECT_EQ(decay_width(3.097e9, 0.0, 1e-15, 1.0), 0.0);
  const double one = decay_width(3.097e9, 2.0 / 3.0, 1e-15, 1.0);
  EXPECT_GT(one, 0.0);
  EXPECT_NEAR(decay_width(3.097e9, 2.0 / 3.0, 1e-15, 2.0), 2.0 * one, 1e-12 * one);
  EXPECT_THROW(decay_width(0.0, 1.0, 1e-15, 1.0), NonPositiveScale);
  EXPECT_THROW(decay_width(3.097e9, 1.0, -1.0, 1.0), NonPositiveScale);
  EXPECT_THROW(decay_width(3.097e9, 1.0, 1e-15, 0.0), NonPositiveScale);
}

TEST(DecayWidth, OriginDensityTwoWays) {
  // C_0^2 from the origin fit and from the force rule <v0'> = C_0^2 / 2 at l = 0
  for (const auto &v0 : {kLinear, kOscillator, kLog}) {
    auto s = solve_bound(v0, 0, 0);
    const double fit = origin_coefficient_sq(s);
    const double force = 2.0 * grid_expectation(s, [&](double r) { return v0.derivative(1, r); });
    const double a = 1e-15, mv = 3.097e9, eq = 2.0 / 3.0;
    const double g1 = decay_width(mv, eq, a, fit), g2 = decay_width(mv, eq, a, force);
    EXPECT_NEAR(g1 / g2, 1.0, 1e-5) << v0.name();
  }
}
