#include <gtest/gtest.h>

#include <cmath>

#include "starfv/montecarlo.hpp"
#include "starfv/twotype.hpp"

using namespace starfv;
using namespace starfv::twotype;

namespace {

// Density of xi(t) from the last replacement before t: tau = t - T_last has
// density e^{-tau} on (0,t), the replacement is type i with probability
// q_i(t - tau; x), and afterwards xi = p_{i1}(tau). Change of variables tau -> xi.
double density_oracle(double theta, double p, double x, double t, double xi) {
  const double h = theta / 2;
  auto q1 = [&](double s) { return x * std::exp(-h * s) + (1 - std::exp(-h * s)) * p; };
  if (xi > p) {
    const double tau = -std::log((xi - p) / (1 - p)) / h;
    if (tau >= t) return 0.0;
    return std::exp(-tau) * q1(t - tau) / (h * (xi - p));
  }
  if (xi < p) {
    const double tau = -std::log(1 - xi / p) / h;
    if (tau >= t) return 0.0;
    return std::exp(-tau) * (1 - q1(t - tau)) / (h * (p - xi));
  }
  return 0.0;
}

const double kThetas[] = {0.5, 1.0, 2.0, 5.0};
const double kPs[] = {0.1, 0.5, 0.9};

}  // namespace

TEST(LineKernelTest, Examples) {
  const TwoTypeParams prm(2.0, 0.5);
  const auto k0 = line_kernel(prm, 0.0);
  EXPECT_EQ(k0(0, 0), 1.0);
  EXPECT_EQ(k0(0, 1), 0.0);
  EXPECT_EQ(k0(1, 1), 1.0);
  const auto k = line_kernel(prm, std::log(4.0));
  EXPECT_NEAR(k(0, 0), 5.0 / 8, 1e-15);
  EXPECT_NEAR(k(1, 0), 3.0 / 8, 1e-15);
  const auto kinf = line_kernel(TwoTypeParams(1.0, 0.3), 1e4);
  EXPECT_NEAR(kinf(0, 0), 0.3, 1e-15);
  EXPECT_NEAR(kinf(1, 0), 0.3, 1e-15);
  EXPECT_THROW(line_kernel(prm, -1.0), InvalidArgument);
}

TEST(LineKernelTest, RowsStochastic) {
  for (double theta : kThetas)
    for (double p : kPs)
      for (double t : {0.0, 0.01, 1.0, 100.0}) {
        const auto k = line_kernel(TwoTypeParams(theta, p), t);
        for (int i = 0; i < 2; ++i) {
          EXPECT_NEAR(k(i, 0) + k(i, 1), 1.0, 1e-14);
          EXPECT_GE(k(i, 0), 0.0);
          EXPECT_LE(k(i, 0), 1.0);
        }
      }
}

TEST(MarginalQ, Examples) {
  const TwoTypeParams prm(2.0, 0.5);
  EXPECT_NEAR(marginal_q(prm, 1.0, std::log(4.0)).q1, 5.0 / 8, 1e-15);
  const auto q0 = marginal_q(prm, 0.3, 0.0);
  EXPECT_EQ(q0.q1, 0.3);
  EXPECT_NEAR(q0.q2, 0.7, 1e-16);
  for (double t : {0.1, 1.0, 10.0}) EXPECT_NEAR(marginal_q(TwoTypeParams(1.0, 0.3), 0.3, t).q1, 0.3, 1e-15);
  EXPECT_THROW(marginal_q(prm, 1.5, 1.0), InvalidArgument);
}

TEST(TransitionLaw, PointMassAtZero) {
  const MixedLaw law = transition_law(TwoTypeParams(1.0, 0.3), 0.7, 0.0);
  ASSERT_EQ(law.atoms().size(), 1u);
  EXPECT_EQ(law.atoms()[0].location, 0.7);
  EXPECT_EQ(law.atoms()[0].mass, 1.0);
  EXPECT_THROW(transition_law(TwoTypeParams(1.0, 0.3), 0.7, -0.1), InvalidArgument);
}

TEST(TransitionLaw, AtomAndStoredMasses) {
  for (double theta : kThetas)
    for (double p : kPs)
      for (double t : {0.1, 1.0, 10.0}) {
        const MixedLaw law = transition_law(TwoTypeParams(theta, p), 0.3, t);
        ASSERT_EQ(law.atoms().size(), 1u);
        EXPECT_NEAR(law.atoms()[0].mass, std::exp(-t), 1e-15);
        EXPECT_NEAR(law.stored_mass(), 1.0, 1e-12);
        EXPECT_NEAR(law.mass(), 1.0, 1e-10);
      }
}

TEST(TransitionDensity, MatchesChangeOfVariables) {
  for (double theta : kThetas)
    for (double p : kPs)
      for (double x : {0.0, 0.3, 1.0})
        for (double t : {0.1, 1.0, 10.0})
          for (int i = 1; i < 50; ++i) {
            const double xi = i / 50.0;
            const double want = density_oracle(theta, p, x, t, xi);
            const double got = transition_density(TwoTypeParams(theta, p), x, t, xi);
            EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, want))
                << theta << " " << p << " " << x << " " << t << " " << xi;
          }
}

TEST(TransitionDensity, Examples) {
  const TwoTypeParams prm(1.0, 0.3);
  for (double t : {0.1, 1.0, 10.0}) EXPECT_EQ(transition_density(prm, 0.6, t, 0.3), 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(transition_density(TwoTypeParams(2.0, 0.5), 0.2, inf, 0.9), 1.0, 1e-15);
  // Integrates to 1 - e^{-t}.
  const MixedLaw law = transition_law(prm, 0.6, 1.5);
  double cont = 0.0;
  for (const auto& piece : law.pieces()) cont += quad_offset(piece.density, piece.lo, piece.hi).value;
  EXPECT_NEAR(cont, 1.0 - std::exp(-1.5), 1e-11);
}

TEST(TransitionLaw, ConvergesToStationary) {
  const TwoTypeParams prm(1.5, 0.4);
  for (int i = 1; i < 20; ++i) {
    const double xi = i / 20.0;
    EXPECT_NEAR(transition_density(prm, 0.9, 60.0, xi), stationary_density(prm, xi), 1e-12);
  }
}

TEST(Stationary, PieceMassesAndMean) {
  for (double theta : kThetas)
    for (double p : kPs) {
      const MixedLaw law = stationary_law(TwoTypeParams(theta, p));
      ASSERT_EQ(law.pieces().size(), 2u);
      double upper = 0.0, lower = 0.0;
      for (const auto& piece : law.pieces()) {
        const double m = quad_offset(piece.density, piece.lo, piece.hi).value;
        (piece.lo >= p ? upper : lower) += m;
      }
      EXPECT_NEAR(upper, p, 1e-12);
      EXPECT_NEAR(lower, 1.0 - p, 1e-12);
      EXPECT_NEAR(law.mean(), p, 1e-12);
    }
}

TEST(Stationary, UniformCase) {
  const TwoTypeParams prm(2.0, 0.5);
  for (int i = 0; i <= 10; ++i) {
    EXPECT_EQ(stationary_density(prm, i / 10.0), 1.0);
    EXPECT_NEAR(stationary_cdf(prm, i / 10.0), i / 10.0, 1e-15);
  }
}

TEST(Stationary, SamplerMatchesCdf) {
  const TwoTypeParams prm(5.0, 0.3);
  auto xs = mc_collect(200000, RngStream(4, 0), [&](RngStream& r) { return stationary_sample(prm, r); });
  EXPECT_GT(ks_test(xs, [&](double x) { return stationary_cdf(prm, x); }).p_value, 0.01);
}

TEST(Moments, FrozenValues) {
  // Quadrature over the last-replacement time, 40 digits.
  EXPECT_NEAR(transition_moment(TwoTypeParams(1.0, 0.3), 3, 0.8, 0.5), 0.10532391715755876, 1e-14);
  EXPECT_NEAR(transition_moment(TwoTypeParams(5.0, 0.9), 4, 0.0, 2.0), 0.0064407373062628902, 1e-15);
  EXPECT_NEAR(transition_moment(TwoTypeParams(0.5, 0.1), 2, 1.0, 10.0), 0.10728101243436948, 1e-14);
}

TEST(Moments, Examples) {
  const TwoTypeParams prm(1.3, 0.35);
  EXPECT_EQ(transition_moment(prm, 0, 0.2, 0.7), 1.0);
  for (double t : {0.0, 0.5, 3.0})
    EXPECT_NEAR(transition_raw_moment(prm, 1, 0.8, t), 0.35 + 0.45 * std::exp(-0.65 * t), 1e-15);
  const TwoTypeParams uni(2.0, 0.5);
  EXPECT_NEAR(transition_moment(uni, 2, 0.1, 200.0), 1.0 / 12, 1e-15);
  EXPECT_NEAR(stationary_moment(uni, 2).central, 1.0 / 12, 1e-15);
  EXPECT_NEAR(stationary_moment(uni, 2).raw, 1.0 / 3, 1e-15);
  EXPECT_NEAR(stationary_moment(prm, 1).raw, 0.35, 1e-15);
}

TEST(Moments, CentralAndRawStationaryAgree) {
  for (double theta : kThetas)
    for (double p : kPs) {
      const TwoTypeParams prm(theta, p);
      for (int n = 0; n <= 12; ++n) {
        const auto m = stationary_moment(prm, n);
        double raw = 0.0;
        for (int k = 0; k <= n; ++k)
          raw += binomial(n, k) * std::pow(p, n - k) * stationary_moment(prm, k).central;
        EXPECT_NEAR(m.raw, raw, 1e-12);
      }
    }
}

TEST(Moments, MatchLawQuadrature) {
  for (double theta : {0.5, 5.0})
    for (double p : {0.1, 0.9})
      for (int n = 1; n <= 6; ++n) {
        const TwoTypeParams prm(theta, p);
        const MixedLaw law = transition_law(prm, 0.3, 0.8);
        double v = 0.0;
        for (const auto& a : law.atoms()) v += a.mass * std::pow(a.location - p, n);
        for (const auto& piece : law.pieces())
          v += quad_offset([&](double xi, double l, double h) {
                 return std::pow(xi - p, n) * piece.density(xi, l, h);
               }, piece.lo, piece.hi).value;
        EXPECT_NEAR(transition_moment(prm, n, 0.3, 0.8), v, 1e-11);
      }
}

TEST(Sampling, AtomFrequencyAndMean) {
  const TwoTypeParams prm(1.0, 0.3);
  const double x = 0.8, t = 0.7;
  const double atom = marginal_q(prm, x, t).q1;
  const auto est = mc_estimate(400000, RngStream(8, 0), 2, [&](RngStream& r, std::span<double> out) {
    const double xi = sample_transition(prm, x, t, r);
    out[0] = xi == atom;
    out[1] = xi;
  });
  EXPECT_LT(std::abs(est[0].value - std::exp(-t)), 4 * est[0].se);
  EXPECT_LT(std::abs(est[1].value - transition_raw_moment(prm, 1, x, t)), 4 * est[1].se);
}

TEST(Sampling, TwoStageMomentsCompose) {
  // xi(t1 + t2) drawn by restarting from a draw of xi(t1).
  const TwoTypeParams prm(2.5, 0.6);
  const double x = 0.1, t1 = 0.4, t2 = 0.9;
  const auto est = mc_estimate(400000, RngStream(12, 0), 3, [&](RngStream& r, std::span<double> out) {
    const double mid = sample_transition(prm, x, t1, r);
    const double d = sample_transition(prm, mid, t2, r) - 0.6;
    out[0] = d;
    out[1] = d * d;
    out[2] = d * d * d;
  });
  for (int n = 1; n <= 3; ++n)
    EXPECT_LT(std::abs(est[n - 1].value - transition_moment(prm, n, x, t1 + t2)), 4 * est[n - 1].se);
}

TEST(Paths, ReplacementCountAndEndpointLaw) {
  const TwoTypeParams prm(1.0, 0.4);
  const double x = 0.2, horizon = 1.3;
  const Estimate count = mc_mean(100000, RngStream(21, 0), [&](RngStream& r) {
    return double(simulate_path(prm, x, horizon, r).events.size());
  });
  EXPECT_LT(std::abs(count.value - horizon), 3 * count.se);

  auto ends = mc_collect(100000, RngStream(21, 1), [&](RngStream& r) {
    return simulate_path(prm, x, horizon, r).final_frequency;
  });
  auto direct = mc_collect(100000, RngStream(21, 2), [&](RngStream& r) {
    return sample_transition(prm, x, horizon, r);
  });
  EXPECT_GT(ks_test_two_sample(ends, direct).p_value, 0.01);
}

TEST(Paths, InvariantsAndQuietEndpoint) {
  const TwoTypeParams prm(1.0, 0.4);
  RngStream r(5, 0);
  bool saw_quiet = false;
  for (int i = 0; i < 2000; ++i) {
    const PathRecord rec = simulate_path(prm, 0.7, 0.5, r);
    double last = 0.0;
    for (const auto& e : rec.events) {
      ASSERT_GT(e.time, last);
      ASSERT_LE(e.time, 0.5);
      ASSERT_EQ(e.frequency, e.type == 1 ? 1.0 : 0.0);
      last = e.time;
    }
    if (rec.events.empty()) {
      saw_quiet = true;
      EXPECT_EQ(rec.final_frequency, marginal_q(prm, 0.7, 0.5).q1);
    }
  }
  EXPECT_TRUE(saw_quiet);
}

TEST(Replacements, LastReplacementTimeDensity) {
  for (int k : {1, 2, 5})
    for (double tk : {0.1, 0.5, 0.9})
      EXPECT_NEAR(last_replacement_time_density(k, 2.0, 2.0 * tk), k * std::pow(tk, k - 1) / 2.0,
                  1e-15);
  const double m = quad([](double s) { return last_replacement_time_density(4, 1.5, s); }, 0, 1.5).value;
  EXPECT_NEAR(m, 1.0, 1e-13);
}

TEST(Replacements, ComponentsSumToDensity) {
  const TwoTypeParams prm(0.8, 0.45);
  for (int i = 1; i < 40; ++i) {
    const double xi = i / 40.0;
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) s += replacement_component_density(prm, 0.9, 2.0, k, xi);
    EXPECT_NEAR(s, transition_density(prm, 0.9, 2.0, xi), 1e-8);
  }
  EXPECT_THROW(replacement_component_density(prm, 0.9, 2.0, 0, 0.5), InvalidArgument);
}
