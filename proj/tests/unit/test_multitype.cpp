#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "starfv/montecarlo.hpp"
#include "starfv/multitype.hpp"
#include "starfv/quadrature.hpp"
#include "starfv/twotype.hpp"

using namespace starfv;
using namespace starfv::multitype;

namespace {

Eigen::MatrixXd random_stochastic(RngStream& r, int d) {
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = 0.05 + r.uniform();
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(Params, Validation) {
  EXPECT_THROW(MultiParams(1.0, {0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(MultiParams(1.0, {1.0}), InvalidArgument);
  EXPECT_THROW(MultiParams(1.0, {0.0, 1.0}), InvalidArgument);
  EXPECT_THROW(MultiParams(0.0, {0.5, 0.5}), InvalidArgument);
  EXPECT_NO_THROW(MultiParams(1.0, {0.2, 0.3, 0.5}));
}

TEST(Matrix, Validation) {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  EXPECT_THROW(MutationMatrix{bad}, InvalidArgument);
  Eigen::MatrixXd neg(2, 2);
  neg << 1.2, -0.2, 0.5, 0.5;
  EXPECT_THROW(MutationMatrix{neg}, InvalidArgument);
  Eigen::MatrixXd reducible(3, 3);
  reducible << 1, 0, 0, 0.5, 0.5, 0, 0.2, 0.3, 0.5;
  EXPECT_FALSE(is_irreducible(reducible));
  EXPECT_THROW(MutationMatrix{reducible}, InvalidArgument);
  Eigen::MatrixXd cyc(3, 3);
  cyc << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  EXPECT_TRUE(is_irreducible(cyc));
}

TEST(Matrix, TextInput) {
  const auto m = MutationMatrix::from_text("# swap\n0 1\n\n1 0  # second row\n");
  EXPECT_EQ(m.dim(), 2);
  EXPECT_EQ(m.matrix()(0, 1), 1.0);
  EXPECT_THROW(MutationMatrix::from_text("0 1\n1\n"), InvalidArgument);
  EXPECT_THROW(MutationMatrix::from_text("0 x\n1 0\n"), InvalidArgument);
  const std::string path = ::testing::TempDir() + "starfv_matrix.txt";
  std::ofstream(path) << "0.5 0.5\n0.25 0.75\n";
  EXPECT_EQ(MutationMatrix::load(path).matrix()(1, 1), 0.75);
  EXPECT_THROW(MutationMatrix::load(path + ".missing"), InvalidArgument);
}

TEST(PimKernel, Limits) {
  const MultiParams mp(1.5, {0.2, 0.3, 0.5});
  EXPECT_TRUE(pim_line_kernel(mp, 0.0).isIdentity(0.0));
  const Eigen::MatrixXd inf = pim_line_kernel(mp, 1e4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(inf(i, j), mp.p(j), 1e-15);
  for (double t : {0.01, 0.5, 3.0}) {
    const Eigen::MatrixXd k = pim_line_kernel(mp, t);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(k.row(i).sum(), 1.0, 1e-12);
  }
}

TEST(PimLaw, RegionMassesAreLastReplacementProbabilities) {
  // int_0^t e^{-tau} q_i(t - tau; x) dtau, 40-digit quadrature.
  const MultiParams mp(1.5, {0.2, 0.3, 0.5});
  const Eigen::VectorXd x = vec({0.5, 0.1, 0.4});
  const double t = 0.8;
  const double want[] = {0.2295134135487215, 0.085615173183389655, 0.23554244915066729};
  const SimplexLaw law = pim_transition_law(mp, x, t);
  EXPECT_NEAR(law.atom_mass(), std::exp(-t), 1e-15);
  double total = law.atom_mass();
  for (const auto& region : law.regions()) {
    const double m = quad_offset(region.piece.density, region.piece.lo, region.piece.hi).value;
    EXPECT_NEAR(m, want[region.index], 1e-12);
    EXPECT_NEAR(region.piece.mass, want[region.index], 1e-14);
    EXPECT_NEAR(region.piece.lo, mp.p(region.index) + (1 - mp.p(region.index)) * std::exp(-0.75 * t), 1e-15);
    total += m;
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_NEAR(law.stored_mass(), 1.0, 1e-12);
  EXPECT_THROW(pim_transition_law(mp, vec({0.5, 0.5, 0.5}), t), InvalidArgument);
}

TEST(PimLaw, PointsLieOnSimplexAndSamplesToo) {
  const MultiParams mp(1.5, {0.2, 0.3, 0.5});
  const SimplexLaw law = pim_transition_law(mp, vec({0.5, 0.1, 0.4}), 0.8);
  for (const auto& region : law.regions()) {
    const Eigen::VectorXd pt = law.point(region.index, 0.5 * (region.piece.lo + region.piece.hi));
    EXPECT_NEAR(pt.sum(), 1.0, 1e-15);
    EXPECT_GE(pt.minCoeff(), 0.0);
  }
  RngStream r(61, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_NEAR(law.sample(r).sum(), 1.0, 1e-14);
}

TEST(PimLaw, StationaryLimit) {
  const MultiParams mp(3.0, {0.2, 0.3, 0.5});
  const Eigen::VectorXd x = vec({0.5, 0.1, 0.4});
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (double u : {0.1, 0.5, 0.9}) {
      const double xi = mp.p(i) + (1 - mp.p(i)) * u;
      EXPECT_NEAR(pim_region_density(mp, x, 80.0, i, xi), pim_region_density(mp, x, inf, i, xi), 1e-12);
    }
}

TEST(PimStationary, Sampler) {
  const MultiParams mp(1.0, {0.2, 0.3, 0.5});
  const auto est = mc_estimate(200000, RngStream(67, 0), 4, [&](RngStream& r, std::span<double> out) {
    const Eigen::VectorXd s = pim_stationary_sample(mp, r);
    int above = 0;
    for (int i = 0; i < 3; ++i) above += s(i) > mp.p(i);
    out[0] = s(0);
    out[1] = s(1);
    out[2] = s(2);
    out[3] = above;
  });
  for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(est[i].value - mp.p(i)), 4 * est[i].se);
  EXPECT_DOUBLE_EQ(est[3].value, 1.0);

  const MultiParams two(2.5, {0.35, 0.65});
  auto a = mc_collect(50000, RngStream(67, 1), [&](RngStream& r) { return pim_stationary_sample(two, r)(0); });
  auto b = mc_collect(50000, RngStream(67, 2),
                      [&](RngStream& r) { return twotype::stationary_sample(TwoTypeParams(2.5, 0.35), r); });
  EXPECT_GT(ks_test_two_sample(a, b).p_value, 0.01);
}

TEST(MarkovKernel, MatchesPadeExponential) {
  RngStream r(71, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXd m = random_stochastic(r, 4);
    const MutationMatrix mm(m);
    for (double theta : {0.5, 3.0})
      for (double t : {0.0, 0.2, 2.0, 40.0}) {
        const Eigen::MatrixXd gen = 0.5 * theta * (m - Eigen::MatrixXd::Identity(4, 4)) * t;
        const Eigen::MatrixXd want = gen.exp();
        const Eigen::MatrixXd got = markov_line_kernel(mm, theta, t);
        EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12);
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(got.row(i).sum(), 1.0, 1e-12);
      }
  }
}

TEST(MarkovKernel, SwapAndPimReduction) {
  Eigen::MatrixXd sw(2, 2);
  sw << 0, 1, 1, 0;
  const MutationMatrix swap(sw);
  EXPECT_TRUE(markov_line_kernel(swap, 1.0, 0.0).isIdentity(0.0));
  for (double t : {0.3, 1.0, 7.0})
    EXPECT_NEAR(markov_line_kernel(swap, 1.3, t)(0, 0), 0.5 * (1 + std::exp(-1.3 * t)), 1e-12);
  const MultiParams mp(2.0, {0.2, 0.3, 0.5});
  Eigen::MatrixXd rows(3, 3);
  for (int i = 0; i < 3; ++i) rows.row(i) << 0.2, 0.3, 0.5;
  for (double t : {0.1, 1.0, 10.0})
    EXPECT_LT((markov_line_kernel(MutationMatrix(rows), 2.0, t) - pim_line_kernel(mp, t)).cwiseAbs().maxCoeff(),
              1e-12);
}

TEST(MarkovStationary, Gamma) {
  Eigen::MatrixXd ds(3, 3);
  ds << 0.2, 0.3, 0.5, 0.5, 0.2, 0.3, 0.3, 0.5, 0.2;
  const Eigen::VectorXd g = markov_stationary_gamma(MutationMatrix(ds));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(g(i), 1.0 / 3, 1e-15);
  Eigen::MatrixXd sw(2, 2);
  sw << 0, 1, 1, 0;
  EXPECT_NEAR(markov_stationary_gamma(MutationMatrix(sw))(0), 0.5, 1e-15);
  RngStream r(73, 0);
  const Eigen::MatrixXd m = random_stochastic(r, 4);
  const Eigen::VectorXd gm = markov_stationary_gamma(MutationMatrix(m));
  EXPECT_LT((gm.transpose() * m - gm.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(gm.sum(), 1.0, 1e-14);
}

TEST(MarkovStationary, SamplerMeans) {
  // E[P(tau)] for tau ~ Exp(1) is (I - G)^{-1} with G = (theta/2)(P - I).
  RngStream r(79, 0);
  const Eigen::MatrixXd m = random_stochastic(r, 3);
  const MutationMatrix mm(m);
  const double theta = 1.7;
  const Eigen::MatrixXd ep =
      (Eigen::MatrixXd::Identity(3, 3) - 0.5 * theta * (m - Eigen::MatrixXd::Identity(3, 3))).inverse();
  const Eigen::VectorXd want = ep.transpose() * markov_stationary_gamma(mm);
  const auto est = mc_estimate(200000, RngStream(79, 1), 3, [&](RngStream& rr, std::span<double> out) {
    const Eigen::VectorXd s = markov_stationary_sample(mm, theta, rr);
    for (int j = 0; j < 3; ++j) out[j] = s(j);
  });
  for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(est[j].value - want(j)), 4 * est[j].se);

  Eigen::MatrixXd rows(2, 2);
  rows << 0.35, 0.65, 0.35, 0.65;
  auto a = mc_collect(50000, RngStream(79, 2),
                      [&](RngStream& rr) { return markov_stationary_sample(MutationMatrix(rows), 2.5, rr)(0); });
  auto b = mc_collect(50000, RngStream(79, 3),
                      [&](RngStream& rr) { return pim_stationary_sample(MultiParams(2.5, {0.35, 0.65}), rr)(0); });
  EXPECT_GT(ks_test_two_sample(a, b).p_value, 0.01);
}

TEST(Sampling, UniformAtThetaTwoAndNormalized) {
  for (int n = 1; n <= 20; ++n) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      EXPECT_NEAR(infinite_sampling_prob(n, j, 2.0) * (n + 1), 1.0, 1e-15);
      s += infinite_sampling_prob(n, j, 0.7);
    }
    EXPECT_NEAR(s, 1.0, 1e-13);
    const double a = 2.0 / 0.7;
    EXPECT_NEAR(infinite_sampling_prob(n, n, 0.7), a / (n + a), 1e-15);
  }
  EXPECT_THROW(infinite_sampling_prob(3, 4, 1.0), InvalidArgument);
  EXPECT_THROW(num_types_dist(3, 0, 1.0), InvalidArgument);
}

TEST(Sampling, NumTypesFrozen) {
  // Exact rationals at theta = 1, n = 5.
  const double want[] = {2.0 / 7, 5.0 / 21, 4.0 / 21, 1.0 / 7, 1.0 / 7};
  double s = 0.0;
  for (int k = 1; k <= 5; ++k) {
    EXPECT_NEAR(num_types_dist(5, k, 1.0), want[k - 1], 1e-16);
    s += num_types_dist(5, k, 1.0);
  }
  EXPECT_NEAR(s, 1.0, 1e-15);
  EXPECT_GT(infinite_sampling_prob(3000, 1500, 1.0), 0.0);
}
