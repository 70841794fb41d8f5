#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "starfv/selection.hpp"
#include "starfv/twotype.hpp"

using namespace starfv;
using namespace starfv::selection;

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

double logistic_closed(double beta, double x, double t) {
  return x / (x + (1 - x) * std::exp(-beta * t / 2));
}

// E[chi(T)], T ~ Exp(1), along the logistic flow.
double fixation_oracle(double beta, double x) {
  return gk([&](double t) { return std::exp(-t) * logistic_closed(beta, x, t); }, 0.0, 60.0);
}

// pi e^{-tau}/|v(xi)| with tau the time the flow needs from `start` to xi.
double branch_oracle(const DriftSpec& d, double pi, double start, double xi) {
  const double tau = gk([&](double y) { return 1.0 / d.v(y); }, start, xi);
  return pi * std::exp(-tau) / std::abs(d.v(xi));
}

}  // namespace

TEST(Flow, Examples) {
  const DriftSpec n = DriftSpec::neutral(2.0, 0.3);
  EXPECT_NEAR(flow(n, 0.9, 1.0), 0.3 + 0.6 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(flow(n, 0.9, 0.0), 0.9);
  const DriftSpec l = DriftSpec::logistic(2.0);
  EXPECT_NEAR(flow(l, 0.5, std::log(3.0)), 0.75, 1e-15);
  EXPECT_EQ(flow(l, 0.0, 5.0), 0.0);
  EXPECT_EQ(flow(l, 1.0, 5.0), 1.0);
  EXPECT_THROW(flow(l, 1.2, 1.0), InvalidArgument);
  EXPECT_THROW(flow(l, 0.5, -1.0), InvalidArgument);
}

TEST(Flow, Semigroup) {
  const DriftSpec ds[] = {DriftSpec::neutral(1.3, 0.4), DriftSpec::logistic(3.0),
                          DriftSpec::mutation_selection(1.0, 0.5, 2.0),
                          DriftSpec::mutation_selection(3.0, 0.2, 1.5)};
  for (const auto& d : ds)
    for (double x : {0.0, 0.2, 0.7, 1.0})
      for (double s : {0.1, 1.0})
        for (double t : {0.3, 2.0}) EXPECT_NEAR(flow(d, flow(d, x, s), t), flow(d, x, s + t), 1e-13);
}

TEST(Flow, CustomMatchesClosedForms) {
  const double theta = 1.0, p = 0.5, beta = 2.0;
  const DriftSpec ms = DriftSpec::mutation_selection(theta, p, beta);
  const DriftSpec cms = DriftSpec::custom([&](double x) { return ms.v(x); }, 3.0);
  const DriftSpec cl = DriftSpec::custom([](double x) { return 1.5 * x * (1 - x); }, 1.5);
  for (double x : {0.0, 0.1, 0.6, 1.0})
    for (double t : {0.2, 1.0, 6.0}) {
      EXPECT_NEAR(flow(cms, x, t), flow(ms, x, t), 1e-8);
      EXPECT_NEAR(flow(cl, x, t), logistic_closed(3.0, x, t), 1e-8);
    }
  const DriftSpec poly = DriftSpec::custom_polynomial({0.25, 0.5, -1.0});
  EXPECT_NEAR(poly.v(0.5), ms.v(0.5), 1e-15);
}

TEST(Flow, CustomEscape) {
  const DriftSpec up = DriftSpec::custom([](double) { return 1.0; }, 0.0);
  EXPECT_THROW(flow(up, 0.5, 1.0), DomainEscape);
  EXPECT_NO_THROW(flow(up, 0.5, 0.4));
  EXPECT_THROW(DriftSpec::custom(nullptr, 1.0), InvalidArgument);
  EXPECT_THROW(DriftSpec::custom_polynomial({}), InvalidArgument);
  EXPECT_THROW(skeleton_matrix(up), DomainEscape);
}

TEST(Roots, Examples) {
  const RootPair r = roots(1.0, 2.0, 0.5);
  EXPECT_NEAR(r.r1, 0.80901699437494742, 1e-15);
  EXPECT_NEAR(r.r2, -0.30901699437494742, 1e-15);
  const RootPair s = roots(3.0, 1.5, 0.2);
  EXPECT_NEAR(s.r1, 0.30622577482985498, 1e-15);
  EXPECT_NEAR(s.r2, -1.306225774829855, 1e-14);
  for (double beta : {1e-3, 1e-6, 1e-9}) EXPECT_NEAR(roots(1.0, beta, 0.3).r1, 0.3, 10 * beta);
  const DriftSpec ms = DriftSpec::mutation_selection(3.0, 0.2, 1.5);
  EXPECT_NEAR(ms.v(s.r1), 0.0, 1e-15);
  EXPECT_THROW(roots(1.0, 0.0, 0.5), InvalidArgument);
  EXPECT_THROW(roots(1.0, 1.0, 1.0), InvalidArgument);
}

TEST(Roots, MuNuAreFlowsFromTheEnds) {
  for (double t : {0.0, 0.1, 1.0, 8.0}) {
    const MuNu mn = mu_nu(3.0, 0.2, 1.5, t);
    const DriftSpec d = DriftSpec::mutation_selection(3.0, 0.2, 1.5);
    EXPECT_NEAR(mn.mu, flow(d, 1.0, t), 1e-14);
    EXPECT_NEAR(mn.nu, flow(d, 0.0, t), 1e-14);
  }
}

TEST(Skeleton, NeutralForm) {
  const DriftSpec n = DriftSpec::neutral(2.0, 0.3);
  const Eigen::Matrix2d m = skeleton_matrix(n);
  EXPECT_NEAR(m(0, 0), 0.3 + 0.7 / 2.0, 1e-15);
  EXPECT_NEAR(m(1, 0), 0.3 * 1.0 / 2.0, 1e-15);
  const ReplacementStationary pi = replacement_stationary(n);
  EXPECT_NEAR(pi.pi1, 0.3, 1e-15);
  EXPECT_NEAR(pi.pi2, 0.7, 1e-15);
  const Eigen::RowVector2d v(pi.pi1, pi.pi2);
  EXPECT_LT((v * m - v).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Skeleton, MutationSelectionFrozen) {
  // E[mu(T)], E[nu(T)] by 40-digit quadrature.
  struct Case {
    double theta, p, beta, p11, p21, pi1;
  };
  const Case cases[] = {{1.0, 0.5, 2.0, 0.89428838108708538, 0.26313531533287903, 0.71339976261678754},
                        {3.0, 0.2, 1.5, 0.58097075271783904, 0.15725917976176999, 0.2728827656117099}};
  for (const auto& c : cases) {
    const SkeletonEntries s = skeleton_series(c.theta, c.p, c.beta);
    const SkeletonEntries q = skeleton_quadrature(c.theta, c.p, c.beta);
    EXPECT_NEAR(s.p11, c.p11, 1e-14);
    EXPECT_NEAR(s.p21, c.p21, 1e-14);
    EXPECT_NEAR(q.p11, c.p11, 1e-12);
    EXPECT_NEAR(q.p21, c.p21, 1e-12);
    const DriftSpec d = DriftSpec::mutation_selection(c.theta, c.p, c.beta);
    EXPECT_NEAR(replacement_stationary(d).pi1, c.pi1, 1e-14);
    const ReplacementStationary pi = replacement_stationary(d);
    EXPECT_NEAR(pi.pi1 + pi.pi2, 1.0, 1e-15);
  }
}

TEST(Skeleton, SeriesAgreesWithQuadrature) {
  for (double theta : {0.3, 1.0, 4.0})
    for (double p : {0.1, 0.5, 0.9})
      for (double beta : {0.2, 1.0, 6.0}) {
        const SkeletonEntries s = skeleton_series(theta, p, beta);
        const SkeletonEntries q = skeleton_quadrature(theta, p, beta);
        EXPECT_NEAR(s.p11, q.p11, 1e-10) << theta << " " << p << " " << beta;
        EXPECT_NEAR(s.p21, q.p21, 1e-10) << theta << " " << p << " " << beta;
      }
}

TEST(Skeleton, PureSelectionIsAbsorbing) {
  const DriftSpec l = DriftSpec::logistic(1.0);
  EXPECT_TRUE(skeleton_matrix(l).isIdentity(0.0));
  EXPECT_THROW(replacement_stationary(l), NoStationaryDistribution);
  EXPECT_THROW(stationary_law(l), NoStationaryDistribution);
}

TEST(StationaryDensity, NeutralMatchesTwoType) {
  const DriftSpec n = DriftSpec::neutral(1.5, 0.3);
  for (double xi : {0.05, 0.2, 0.5, 0.9})
    EXPECT_NEAR(stationary_density(n, xi), twotype::stationary_density(TwoTypeParams(1.5, 0.3), xi), 1e-15);
}

TEST(StationaryDensity, MutationSelectionFrozen) {
  struct Case {
    double theta, p, beta;
    double xi[3], want[3];
  };
  const Case cases[] = {
      {1.0, 0.5, 2.0, {0.2, 0.5, 0.95}, {0.45892287594782141, 0.20494608425878281, 3.1721386299125037}},
      {3.0, 0.2, 1.5, {0.1, 0.3, 0.9}, {2.2681750438097112, 3.260700886471241, 0.25331866678288013}}};
  for (const auto& c : cases) {
    const DriftSpec d = DriftSpec::mutation_selection(c.theta, c.p, c.beta);
    const ReplacementStationary pi = replacement_stationary(d);
    const double r1 = roots(c.theta, c.beta, c.p).r1;
    for (int k = 0; k < 3; ++k) {
      const double got = stationary_density(d, c.xi[k]);
      EXPECT_NEAR(got, c.want[k], 1e-12 * c.want[k]);
      const double o = c.xi[k] > r1 ? branch_oracle(d, pi.pi1, 1.0, c.xi[k]) : branch_oracle(d, pi.pi2, 0.0, c.xi[k]);
      EXPECT_NEAR(got, o, 1e-9 * o);
    }
    EXPECT_EQ(stationary_density(d, r1), 0.0);
    EXPECT_EQ(stationary_density(d, 1.5), 0.0);
    const MixedLaw law = stationary_law(d);
    EXPECT_NEAR(law.stored_mass(), 1.0, 1e-14);
  }
}

TEST(StationaryDensity, CustomPolynomialMatchesMutationSelection) {
  // theta = 1, p = 0.5, beta = 2: v = 0.25 + 0.5 x - x^2.
  const DriftSpec ms = DriftSpec::mutation_selection(1.0, 0.5, 2.0);
  const DriftSpec poly = DriftSpec::custom_polynomial({0.25, 0.5, -1.0});
  const ReplacementStationary a = replacement_stationary(ms), b = replacement_stationary(poly);
  EXPECT_NEAR(a.pi1, b.pi1, 1e-8);
  for (double xi : {0.2, 0.5, 0.95}) {
    const double want = stationary_density(ms, xi);
    EXPECT_NEAR(stationary_density(poly, xi), want, 1e-7 * want);
  }
}

TEST(StationaryDensity, SamplerMean) {
  const DriftSpec d = DriftSpec::mutation_selection(3.0, 0.2, 1.5);
  const MixedLaw law = stationary_law(d);
  const Estimate e = mc_mean(200000, RngStream(83, 0), [&](RngStream& r) { return stationary_sample(d, r); });
  EXPECT_LT(std::abs(e.value - law.mean()), 4 * e.se);
}

TEST(Fixation, FrozenAndOracle) {
  EXPECT_NEAR(fixation_prob(1.0, 0.3, 1), 0.41486713310475819, 1e-13);
  EXPECT_NEAR(fixation_prob(5.0, 0.1, 1), 0.47748098134692926, 1e-13);
  EXPECT_NEAR(fixation_prob(2.0, 0.5, 1), std::log(2.0), 1e-13);
  for (double beta : {0.3, 1.0, 4.0})
    for (double x : {0.05, 0.4, 0.9}) {
      EXPECT_NEAR(fixation_prob(beta, x, 1), fixation_oracle(beta, x), 1e-11);
      EXPECT_NEAR(fixation_prob(beta, x, 1) + fixation_prob(beta, 1 - x, 2), 1.0, 1e-12);
    }
  EXPECT_EQ(fixation_prob(1.0, 0.0, 1), 0.0);
  EXPECT_EQ(fixation_prob(1.0, 1.0, 2), 1.0);
  EXPECT_THROW(fixation_prob(1.0, 0.5, 3), InvalidArgument);
}

TEST(Swap, MirrorsDrift) {
  const DriftSpec d = DriftSpec::mutation_selection(1.0, 0.5, 2.0);
  const DriftSpec s = swap_types(d);
  for (double y : {0.0, 0.3, 1.0}) EXPECT_NEAR(s.v(y), -d.v(1 - y), 1e-15);
  const DriftSpec n = swap_types(DriftSpec::neutral(1.0, 0.3));
  EXPECT_EQ(n.kind(), DriftSpec::Kind::Neutral);
  EXPECT_NEAR(n.p(), 0.7, 1e-15);
  EXPECT_NEAR(flow(s, 0.25, 1.0), 1 - flow(d, 0.75, 1.0), 1e-8);
}

TEST(Asg, Stationary) {
  for (int i = 1; i <= 50; ++i) EXPECT_NEAR(asg_stationary(2.0, i), 1.0 / (i * (i + 1.0)), 1e-15 / i);
  for (double beta : {0.5, 5.0}) {
    const double a = 2 / beta;
    double s = 0.0;
    for (int i = 1; i <= 2000; ++i) {
      const long double al = a;
      const double want = static_cast<double>(
          al * std::tgamma(al + 1) * std::exp(std::lgamma(static_cast<long double>(i)) - std::lgamma(al + i + 1)));
      EXPECT_NEAR(asg_stationary(beta, i), want, 1e-12 * want);
      s += asg_stationary(beta, i);
    }
    // Tail beyond N is below Gamma(a+1) N^{-a}.
    EXPECT_NEAR(s, 1.0, std::tgamma(a + 1) * std::pow(2000.0, -a));
    EXPECT_LT(s, 1.0);
  }
  EXPECT_GT(asg_stationary(1.0, 5000), 0.0);
  EXPECT_THROW(asg_stationary(1.0, 0), InvalidArgument);
}

TEST(Asg, Paths) {
  RngStream r(89, 0);
  EXPECT_EQ(asg_simulate(1, 1.0, r).t_ua, 0.0);
  for (int k = 0; k < 2000; ++k) {
    const AsgPath p = asg_simulate(4, 1.0, r);
    ASSERT_TRUE(std::isfinite(p.t_ua));
    EXPECT_EQ(p.events.back().state, 1);
    EXPECT_EQ(p.events.back().time, p.t_ua);
    EXPECT_EQ(p.state_at(0.0), 4);
  }
  const AsgPath h = asg_simulate(3, 1.0, r, 5.0);
  for (const auto& ev : h.events) EXPECT_LE(ev.time, 5.0);
}

TEST(Asg, Duality) {
  const SelectionDuality z = selection_duality_check(3, 0.4, 0.0, 1.0, 10, RngStream(97, 0));
  EXPECT_EQ(z.lhs, std::pow(0.4, 3));
  EXPECT_EQ(z.rhs, z.lhs);
  const SelectionDuality one = selection_duality_check(2, 1.0, 1.0, 1.0, 1000, RngStream(97, 1));
  EXPECT_EQ(one.lhs, 1.0);
  EXPECT_EQ(one.rhs, 1.0);
  const SelectionDuality d = selection_duality_check(2, 0.6, 0.7, 2.0, 200000, RngStream(97, 2));
  EXPECT_LT(std::abs(d.lhs - d.rhs), 4 * std::hypot(d.lhs_se, d.rhs_se));
}

TEST(Paths, StayInUnitInterval) {
  const DriftSpec d = DriftSpec::mutation_selection(1.0, 0.5, 2.0);
  RngStream r(101, 0);
  for (int k = 0; k < 500; ++k) {
    const auto path = simulate_path(d, 0.3, 3.0, r);
    EXPECT_GE(path.final_frequency, 0.0);
    EXPECT_LE(path.final_frequency, 1.0);
  }
}
