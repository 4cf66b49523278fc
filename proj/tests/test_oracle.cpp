#include "sumrule/oracle.hpp"
#include "sumrule/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sumrule;

namespace {

Oracle &shared_oracle() {
  static Oracle o;
  return o;
}

const BoundState k1S = bound_state(1, 0);
const BoundState k2S = bound_state(2, 0);
const BoundState k2P = bound_state(2, 1);

} // namespace

TEST(QuadratureSpec, Validation) {
  QuadratureSpec s;
  EXPECT_NO_THROW(s.validate());
  s.n_max = 1;
  EXPECT_ANY_THROW(s.validate());
  s = {};
  s.abs_tol = 0;
  EXPECT_ANY_THROW(s.validate());
}

TEST(PairwiseSum, MatchesExactSum) {
  std::vector<double> x;
  for (int i = 1; i <= 1000; ++i)
    x.push_back(1.0 / (static_cast<double>(i) * (i + 1)));
  // telescoping: 1 - 1/1001
  EXPECT_NEAR(detail::pairwise_sum(x), 1.0 - 1.0 / 1001, 1e-15);
  EXPECT_EQ(detail::pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(DiscreteSum, Examples) {
  Oracle &o = shared_oracle();
  EXPECT_NEAR(o.discrete_sum(k1S, Channel::plus(0), 0), 0.716587, 1e-4);
  EXPECT_NEAR(o.discrete_sum(k2S, Channel::plus(0), -2), 187.959, 1e-2);
  EXPECT_NEAR(o.discrete_sum(k2P, Channel::plus(1), 4), 0.00470, 1e-4);
}

TEST(DiscreteSum, TermsMatchMatrixElements) {
  QuadratureSpec spec;
  spec.n_max = 2;
  // a single n = 2 term: (3/4)^J 2^15/3^10
  const double z2 = 32768.0 / 59049.0;
  EXPECT_NEAR(Oracle(spec).discrete_sum(k1S, Channel::plus(0), 1), 0.75 * z2, 1e-15);
  EXPECT_NEAR(Oracle(spec).discrete_sum(k1S, Channel::plus(0), -2), z2 / 0.5625, 1e-14);
}

TEST(DiscreteSum, DegenerateTermPolicy) {
  QuadratureSpec spec;
  spec.n_max = 2;
  // 2P -> 2S carries weight 1 at J = 0 and nothing otherwise
  Oracle o(spec);
  const double deg = to_double(bound_bound_z2(k2P, 2, Channel::minus(1)));
  EXPECT_NEAR(o.discrete_sum(k2P, Channel::minus(1), 0), deg + to_double(bound_bound_z2(k2P, 1, Channel::minus(1))), 1e-14);
  EXPECT_NEAR(o.discrete_sum(k2P, Channel::minus(1), 1), -0.75 * to_double(bound_bound_z2(k2P, 1, Channel::minus(1))),
              1e-14);
  EXPECT_NO_THROW(o.discrete_sum(k2P, Channel::minus(1), -1));
}

TEST(ContinuumIntegral, Examples) {
  Oracle &o = shared_oracle();
  EXPECT_NEAR(o.continuum_integral(k1S, Channel::plus(0), 3), 4.972492, 1e-4);
  EXPECT_NEAR(o.continuum_integral(k2P, Channel::plus(1), 4), 0.17307, 1e-3);
}

TEST(ContinuumIntegral, DivergentOrders) {
  Oracle &o = shared_oracle();
  EXPECT_THROW(o.continuum_integral(k1S, Channel::plus(0), 4), DivergentSumRule);
  EXPECT_THROW(o.continuum_integral(k2S, Channel::plus(0), 4), DivergentSumRule);
  EXPECT_THROW(o.continuum_integral(k2P, Channel::plus(1), 5), DivergentSumRule);
  EXPECT_THROW(o.continuum_integral(k2P, Channel::minus(1), 5), DivergentSumRule);
  EXPECT_NO_THROW(o.continuum_integral(k2P, Channel::minus(1), 4));
}

TEST(ContinuumIntegral, ErrorEstimateReported) {
  double err = -1.0;
  shared_oracle().continuum_integral(k1S, Channel::plus(0), 2, &err);
  EXPECT_GE(err, 0.0);
  EXPECT_LT(err, 1e-6);
}

TEST(Split, TotalIsSumOfParts) {
  auto r = shared_oracle().split(k2S, Channel::plus(0), 1);
  EXPECT_EQ(r.total, r.discrete + r.continuum);
  EXPECT_NEAR(r.total, 1.0, 2e-4);
}

TEST(Split, Deterministic) {
  Oracle a, b;
  auto x = a.split(k2P, Channel::plus(1), 2);
  auto y = b.split(k2P, Channel::plus(1), 2);
  EXPECT_EQ(x.discrete, y.discrete);
  EXPECT_EQ(x.continuum, y.continuum);
}

TEST(Compare, Examples) {
  Oracle &o = shared_oracle();
  auto a = o.compare(k1S, ChannelSel::Plus, 2);
  EXPECT_NEAR(*a.discrete, 0.449355, 2e-4);
  EXPECT_NEAR(*a.continuum, 0.883977, 2e-4);
  EXPECT_EQ(*a.constructive, rat(4, 3));
  EXPECT_EQ(*a.closed_form, rat(4, 3));
  EXPECT_TRUE(a.pass);

  auto b = o.compare(k2P, ChannelSel::Minus, 1);
  EXPECT_NEAR(*b.discrete, -0.35677, 2e-4);
  EXPECT_NEAR(*b.continuum, 0.02344, 2e-4);
  EXPECT_EQ(*b.constructive, rat(-1, 3));
  EXPECT_FALSE(b.closed_form);
  EXPECT_TRUE(b.pass);

  auto c = o.compare(k1S, ChannelSel::Plus, -4);
  EXPECT_NEAR(*c.discrete, 1.982648, 2e-4);
  EXPECT_NEAR(*c.continuum, 0.116526, 2e-4);
  EXPECT_EQ(*c.constructive, rat(9673, 4608));
  EXPECT_TRUE(c.pass);
}

TEST(Compare, DivergentKeepsDiscreteOnly) {
  auto v = shared_oracle().compare(k1S, ChannelSel::Plus, 4);
  EXPECT_TRUE(v.divergent);
  EXPECT_TRUE(v.discrete);
  EXPECT_FALSE(v.continuum);
  EXPECT_FALSE(v.constructive);
}

TEST(Compare, TotalChannelAddsBoth) {
  Oracle &o = shared_oracle();
  auto t = o.compare(k2P, ChannelSel::Total, 3);
  auto p = o.compare(k2P, ChannelSel::Plus, 3);
  auto m = o.compare(k2P, ChannelSel::Minus, 3);
  EXPECT_NEAR(*t.total(), *p.total() + *m.total(), 1e-12);
  EXPECT_EQ(*t.constructive, rat(-2, 15));
  EXPECT_EQ(*t.closed_form, rat(-2, 15));
}

TEST(OracleProperty, MonotoneInNmaxForNonPositiveOrders) {
  for (int J : {0, -1, -2}) {
    for (const auto &[s, ch] : {std::pair{k1S, Channel::plus(0)}, {k2S, Channel::plus(0)}, {k2P, Channel::plus(1)}}) {
      const double exact = to_double(constructive_value(s, ch.direction == Direction::Plus ? ChannelSel::Plus : ChannelSel::Minus, J));
      // only the discrete part depends on n_max
      const double continuum = shared_oracle().continuum_integral(s, ch, J);
      double previous = -1e300;
      for (int n_max : {100, 300, 1000, 2000}) {
        QuadratureSpec spec;
        spec.n_max = n_max;
        const double total = Oracle(spec).discrete_sum(s, ch, J) + continuum;
        EXPECT_GT(total, previous) << s.label() << " J=" << J << " n_max=" << n_max;
        EXPECT_LT(total, exact) << s.label() << " J=" << J << " n_max=" << n_max;
        previous = total;
      }
    }
  }
}

TEST(OracleProperty, ErrorEstimateCoverage) {
  // estimated_error bounds |total - constructive| in at least 95% of convergent cases
  Oracle &o = shared_oracle();
  int cases = 0, covered = 0;
  for (auto [n, l] : {std::pair{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}})
    for (ChannelSel sel : {ChannelSel::Plus, ChannelSel::Minus}) {
      if (l == 0 && sel == ChannelSel::Minus)
        continue;
      for (int J = -3; J <= 4; ++J) {
        auto v = o.compare(bound_state(n, l), sel, J);
        if (v.divergent)
          continue;
        ++cases;
        const double dev = std::abs(*v.total() - to_double(*v.constructive));
        covered += dev <= v.estimated_error ? 1 : 0;
        EXPECT_TRUE(v.pass) << n << l << " " << to_string(sel) << " J=" << J;
      }
    }
  EXPECT_GE(covered, 0.95 * cases) << covered << "/" << cases;
}

TEST(Contour, ResidueAtTwo) {
  auto rep = contour_check(1, shared_oracle());
  ASSERT_EQ(rep.residues.size(), 9u);
  EXPECT_EQ(rep.residues[0].n, 2);
  EXPECT_NEAR(rep.residues[0].residue, (32768.0 / 59049.0) * 0.75, 1e-6);
  EXPECT_LT(rep.residues[0].radius_change, 1e-8);
}

TEST(Contour, LineIntegralJZero) {
  auto rep = contour_check(0, shared_oracle());
  EXPECT_NEAR(rep.line_integral, 0.283412, 1e-4);
}

TEST(Contour, AllOrdersPass) {
  for (int J = 0; J <= 3; ++J)
    EXPECT_TRUE(contour_check(J, shared_oracle()).pass()) << J;
  EXPECT_THROW(contour_check(4, shared_oracle()), InvalidOrder);
  EXPECT_THROW(contour_check(-1, shared_oracle()), InvalidOrder);
}

TEST(ReferenceTables, CellTruncation) {
  EXPECT_TRUE(cell_matches(187.9595, {187.959, 3}, 2e-4));
  EXPECT_FALSE(cell_matches(187.9615, {187.959, 3}, 2e-4));
  EXPECT_TRUE(cell_matches(0.7165876, {0.716587, 6}, 2e-4));
  EXPECT_FALSE(cell_matches(0.7168, {0.716587, 6}, 2e-4));
}

TEST(ReferenceTables, EveryRowMatches) {
  auto rep = verify_tables(shared_oracle(), 2e-4);
  EXPECT_EQ(reference_tables().size(), 6u);
  for (const auto &c : rep.checks)
    EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
}

TEST(ReferenceTables, ExactTotals) {
  for (const auto &t : reference_tables())
    for (const auto &row : t.rows)
      EXPECT_EQ(constructive_value(bound_state(t.n, t.l), t.channel, row.J), row.total) << t.name << " J=" << row.J;
}

TEST(PotentialRows, OscillatorIsExact) {
  Oracle &o = shared_oracle();
  const Potential osc = Potential::power_law(2);
  // a single final state carries the whole rule
  auto s1 = o.compare_potential(osc, 0, 0, ChannelSel::Plus, 1);
  EXPECT_NEAR(*s1.discrete, 1.0, 1e-6);
  EXPECT_FALSE(s1.continuum);
  EXPECT_TRUE(s1.pass);
  for (int J = 0; J <= 4; ++J) {
    auto v = o.compare_potential(osc, 0, 0, ChannelSel::Plus, J);
    EXPECT_TRUE(v.pass) << J;
    ASSERT_TRUE(v.reference) << J;
    EXPECT_NEAR(*v.discrete, *v.reference, 1e-6) << J;
  }
}

TEST(PotentialRows, LinearAndLog) {
  Oracle &o = shared_oracle();
  for (int J = 0; J <= 4; ++J)
    EXPECT_TRUE(o.compare_potential(Potential::power_law(1), 0, 0, ChannelSel::Plus, J).pass) << J;
  for (int J = 0; J <= 3; ++J)
    EXPECT_TRUE(o.compare_potential(Potential::log(), 0, 0, ChannelSel::Plus, J).pass) << J;
  // 30 states leave a slowly decaying remainder; the fitted tail has to cover it
  auto trk = o.compare_potential(Potential::log(), 0, 0, ChannelSel::Plus, 1);
  EXPECT_NEAR(*trk.ladder, 1.0, 1e-6);
  EXPECT_LT(*trk.discrete, 1.0);
  EXPECT_LE(1.0 - *trk.discrete, 2 * trk.estimated_error);
  EXPECT_NEAR(*trk.discrete + trk.estimated_error, 1.0, 5e-4);
}

TEST(PotentialRows, Contracts) {
  Oracle &o = shared_oracle();
  EXPECT_THROW(o.compare_potential(Potential::coulomb(), 0, 0, ChannelSel::Plus, 1), std::invalid_argument);
  EXPECT_THROW(o.compare_potential(Potential::power_law(rat(-1, 2)), 0, 0, ChannelSel::Plus, 1), std::invalid_argument);
}
