#include "starfv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "starfv/eigen.hpp"
#include "starfv/lines.hpp"
#include "starfv/montecarlo.hpp"
#include "starfv/multitype.hpp"
#include "starfv/selection.hpp"
#include "starfv/twotype.hpp"

namespace starfv::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const double kThetaGrid[] = {0.5, 1.0, 2.0, 5.0};
const double kPGrid[] = {0.1, 0.5, 0.9};
const double kTGrid[] = {0.1, 1.0, 10.0};
const double kXGrid[] = {0.0, 0.3, 1.0};

// Tracks the worst residual of one family of comparisons.
class Worst {
 public:
  Worst(std::string label, double limit) : label_(std::move(label)), limit_(limit) {}

  void add(double residual, const std::string& where = {}) {
    if (std::isnan(residual)) residual = kInf;
    if (residual > worst_ || count_ == 0) {
      worst_ = residual;
      where_ = where;
    }
    ++count_;
  }
  void add(double got, double want, const std::string& where) { add(std::abs(got - want), where); }

  SubCheck result() const {
    std::string label = label_ + " (" + std::to_string(count_) + " cases";
    if (!where_.empty()) label += ", worst " + where_;
    label += ")";
    return {label, worst_, limit_, true};
  }

 private:
  std::string label_;
  double limit_;
  double worst_ = 0.0;
  std::string where_;
  std::size_t count_ = 0;
};

std::string fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

std::string tag(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ',';
    out += k;
    out += '=';
    out += fmt("%g", v);
  }
  return out;
}

// Sample mean and standard error of a collected ensemble.
Estimate summarize(const std::vector<double>& xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s.estimate();
}

double z_score(double est, double se, double exact) {
  if (se == 0.0) return est == exact ? 0.0 : kInf;
  return std::abs(est - exact) / se;
}

RngStream criterion_stream(std::uint64_t seed, int id) {
  return RngStream(seed, 1000 + static_cast<std::uint64_t>(id));
}

CheckResult normalization() {
  Worst w("|mass - 1|", 1e-10);
  for (double theta : kThetaGrid)
    for (double p : kPGrid)
      for (double t : kTGrid)
        for (double x : kXGrid) {
          const MixedLaw law = twotype::transition_law(TwoTypeParams(theta, p), x, t);
          w.add(law.mass(), 1.0, tag({{"theta", theta}, {"p", p}, {"t", t}, {"x", x}}));
        }
  return {1, "", {w.result()}, {}};
}

CheckResult uniform_case(std::uint64_t seed) {
  const TwoTypeParams prm(2.0, 0.5);
  const RngStream rng = criterion_stream(seed, 2);
  auto sample = mc_collect(1'000'000, rng,
                           [&](RngStream& r) { return twotype::stationary_sample(prm, r); });
  const KsResult ks = ks_test(std::move(sample), [](double x) { return std::clamp(x, 0.0, 1.0); });

  Worst dens("|density - 1|", 1e-12);
  Worst law_dens("|law density - 1|", 1e-12);
  const MixedLaw law = twotype::stationary_law(prm);
  for (int i = 1; i < 100; ++i) {
    const double xi = i / 100.0;
    if (xi == 0.5) continue;
    dens.add(twotype::stationary_density(prm, xi), 1.0, tag({{"xi", xi}}));
    law_dens.add(law.density(xi), 1.0, tag({{"xi", xi}}));
  }
  return {2,
          "",
          {{"KS p-value vs Uniform(0,1), N=1e6", ks.p_value, 0.01, false}, dens.result(),
           law_dens.result()},
          {}};
}

CheckResult moments_mc(std::uint64_t seed) {
  const RngStream base = criterion_stream(seed, 3);
  Worst w("max |z| over central moments n=1..4, N=1e6", 4.0);
  int point = 0;
  for (double theta : kThetaGrid)
    for (double p : kPGrid) {
      const double x = kXGrid[point % 3];
      const double t = kTGrid[(point / 3 + point) % 3];
      const TwoTypeParams prm(theta, p);
      const auto est = mc_estimate(1'000'000, base.substream(static_cast<std::uint64_t>(point)), 4,
                                   [&](RngStream& r, std::span<double> out) {
                                     const double d = twotype::sample_transition(prm, x, t, r) - p;
                                     double pw = 1.0;
                                     for (int n = 0; n < 4; ++n) out[n] = pw *= d;
                                   });
      for (int n = 1; n <= 4; ++n) {
        const double exact = twotype::transition_moment(prm, n, x, t);
        w.add(z_score(est[n - 1].value, est[n - 1].se, exact),
              tag({{"theta", theta}, {"p", p}, {"x", x}, {"t", t}, {"n", n}}));
      }
      ++point;
    }
  return {3, "", {w.result()}, {}};
}

CheckResult eigen_equation() {
  Worst w("max coefficient |L P_n + lambda_n P_n|", 1e-12);
  for (double theta : kThetaGrid)
    for (double p : kPGrid) {
      const TwoTypeParams prm(theta, p);
      for (int n = 1; n <= 12; ++n) {
        const eigen::PolyRep pn = eigen::eigen_poly(prm, n);
        const eigen::PolyRep lp = eigen::generator_apply(prm, pn);
        const double lam = eigen::eigenvalue(prm, n);
        const int deg = std::max(lp.degree(), pn.degree());
        double worst = 0.0;
        for (int k = 0; k <= deg; ++k)
          worst = std::max(worst, std::abs(lp.coeff(k) + lam * pn.coeff(k)));
        w.add(worst, tag({{"theta", theta}, {"p", p}, {"n", n}}));
      }
    }
  return {4, "", {w.result()}, {}};
}

CheckResult expansion_exactness(std::uint64_t seed) {
  RngStream rng = criterion_stream(seed, 5);
  Worst w("|eigen expansion - direct moments|", 1e-10);
  const double xs[] = {0.0, 0.25, 0.5, 0.9, 1.0};
  const double ts[] = {0.0, 0.1, 1.0, 5.0};
  for (int draw = 0; draw < 20; ++draw) {
    const double theta = kThetaGrid[draw % 4];
    const double p = kPGrid[draw % 3];
    const TwoTypeParams prm(theta, p);
    const int degree = 1 + static_cast<int>(rng.uniform() * 8.0);
    std::vector<double> b(static_cast<std::size_t>(degree) + 1);
    for (double& c : b) c = 2.0 * rng.uniform() - 1.0;
    const eigen::PolyRep g = eigen::PolyRep::from_power_basis(p, b);
    for (double x : xs)
      for (double t : ts) {
        double direct = 0.0;
        for (int k = 0; k <= degree; ++k)
          direct += b[static_cast<std::size_t>(k)] * twotype::transition_raw_moment(prm, k, x, t);
        w.add(eigen::expansion_expectation(prm, g, x, t), direct,
              tag({{"draw", draw}, {"x", x}, {"t", t}}));
      }
  }
  return {5, "", {w.result()}, {}};
}

CheckResult biorthogonality() {
  Worst pair("|<P_m, Q~_n> - delta_mn|, 2<=n<=12, 1<=m<=12", 1e-12);
  Worst pv("|PV E[P_m Q_1] - delta_m1|", 1e-12);
  for (double theta : kThetaGrid)
    for (double p : kPGrid) {
      const TwoTypeParams prm(theta, p);
      for (int m = 1; m <= 12; ++m) {
        const eigen::PolyRep pm = eigen::eigen_poly(prm, m);
        for (int n = 2; n <= 12; ++n)
          pair.add(eigen::hyper_pairing(pm, n), m == n ? 1.0 : 0.0,
                   tag({{"theta", theta}, {"p", p}, {"m", m}, {"n", n}}));
        pv.add(eigen::pv_expectation_g_q1(prm, pm), m == 1 ? 1.0 : 0.0,
               tag({{"theta", theta}, {"p", p}, {"m", m}}));
      }
    }
  return {6, "", {pair.result(), pv.result()}, {}};
}

CheckResult spectral_identity() {
  Worst w("|spectral - direct| for n<=20", 1e-10);
  Worst at_zero("t=0 entries differing from delta_jn", 0.0);
  const double ts[] = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  for (double theta : kThetaGrid)
    for (int n = 1; n <= 20; ++n) {
      const lines::SpectralCoeffs sc = lines::spectral_coeffs(n, theta);
      for (double t : ts) {
        const auto a = lines::an_distribution(n, theta, t);
        const auto b = lines::an_distribution_spectral(sc, t);
        double worst = 0.0;
        for (int j = 0; j <= n; ++j)
          worst = std::max(worst, std::abs(a.prob[static_cast<std::size_t>(j)] -
                                           b.prob[static_cast<std::size_t>(j)]));
        w.add(worst, tag({{"theta", theta}, {"n", n}, {"t", t}}));
      }
      const auto a0 = lines::an_distribution(n, theta, 0.0);
      const auto b0 = lines::an_distribution_spectral(sc, 0.0);
      int bad = 0;
      for (int j = 0; j <= n; ++j) {
        const double want = j == n ? 1.0 : 0.0;
        bad += a0.prob[static_cast<std::size_t>(j)] != want;
        bad += b0.prob[static_cast<std::size_t>(j)] != want;
      }
      at_zero.add(bad, tag({{"theta", theta}, {"n", n}}));
    }
  return {7, "", {w.result(), at_zero.result()}, {}};
}

CheckResult absorption_time(std::uint64_t seed) {
  const RngStream base = criterion_stream(seed, 8);
  const double exact = lines::mean_absorption_time(2, 2.0);
  Worst mc("max |z| of simulated mean absorption time, N=1e5", 3.0);
  int k = 0;
  for (int n : {2, 5, 10})
    for (double theta : {1.0, 2.0, 5.0}) {
      const Estimate e = lines::empirical_absorption_time(
          n, theta, 100'000, base.substream(static_cast<std::uint64_t>(k++)));
      mc.add(z_score(e.value, e.se, lines::mean_absorption_time(n, theta)),
             tag({{"n", n}, {"theta", theta}}));
    }
  return {8,
          "",
          {{"|mean_absorption_time(2, theta=2) - 4/3|", std::abs(exact - 4.0 / 3.0), 0.0, true},
           mc.result()},
          {}};
}

CheckResult duality(std::uint64_t seed) {
  const RngStream base = criterion_stream(seed, 9);
  struct Point {
    double theta, p, x, t;
  };
  const Point pts[] = {{1.0, 0.3, 0.7, 0.5}, {2.0, 0.5, 0.2, 1.0}, {5.0, 0.8, 0.9, 2.0}};
  Worst w("max |z| analytic vs coalescent, n<=4, N=1e6", 4.0);
  std::uint64_t k = 0;
  for (const Point& pt : pts)
    for (int n = 1; n <= 4; ++n) {
      const lines::DualityResult r = lines::duality_check(TwoTypeParams(pt.theta, pt.p), n, pt.x,
                                                          pt.t, 1'000'000, base.substream(k++));
      w.add(z_score(r.rhs, r.rhs_se, r.lhs),
            tag({{"theta", pt.theta}, {"p", pt.p}, {"x", pt.x}, {"t", pt.t}, {"n", n}}));
    }
  return {9, "", {w.result()}, {}};
}

CheckResult replacement_decomposition() {
  struct Point {
    double theta, p, x, t;
  };
  const Point pts[] = {
      {1.0, 0.3, 0.6, 1.5}, {2.0, 0.5, 0.2, 0.7}, {5.0, 0.9, 1.0, 3.0}, {0.5, 0.1, 0.0, 1.0}};
  Worst sum("|sum_{k<=50} f_k - transition density|", 1e-8);
  Worst mass("|integral f_k - e^-t t^k/k!|, k<=10", 1e-8);
  for (const Point& pt : pts) {
    const TwoTypeParams prm(pt.theta, pt.p);
    for (int i = 1; i < 100; ++i) {
      const double xi = i / 100.0;
      double s = 0.0;
      for (int k = 1; k <= 50; ++k) s += twotype::replacement_component_density(prm, pt.x, pt.t, k, xi);
      sum.add(s, twotype::transition_density(prm, pt.x, pt.t, xi),
              tag({{"theta", pt.theta}, {"p", pt.p}, {"x", pt.x}, {"t", pt.t}, {"xi", xi}}));
    }
    for (int k = 1; k <= 10; ++k) {
      double integral = 0.0;
      for (const DensityPiece& piece : twotype::replacement_component_pieces(prm, pt.x, pt.t, k))
        if (piece.hi > piece.lo) integral += quad_offset(piece.density, piece.lo, piece.hi).value;
      const double want = std::exp(-pt.t) * std::pow(pt.t, k) / std::tgamma(k + 1.0);
      mass.add(integral, want, tag({{"theta", pt.theta}, {"p", pt.p}, {"t", pt.t}, {"k", k}}));
    }
  }
  return {10, "", {sum.result(), mass.result()}, {}};
}

CheckResult multitype_checks() {
  Worst kernel("|d=2 line kernel - two-type kernel|", 1e-12);
  Worst marg("|d=2 marginal q - two-type q|", 1e-12);
  Worst atom("|d=2 atom location/mass - two-type atom|", 1e-12);
  Worst dens("|d=2 region densities - two-type density|", 1e-12);
  Worst markov("|Markov kernel with rows p - two-type kernel|", 1e-12);
  Worst swap("|swap-matrix kernel - (1 +- e^{-theta t})/2|", 1e-12);
  Worst samp("max relative |sampling prob - 1/(n+1)|, theta=2, n<=20", 1e-15);

  for (double theta : kThetaGrid)
    for (double p : kPGrid) {
      const TwoTypeParams prm(theta, p);
      const multitype::MultiParams mp(theta, {p, 1.0 - p});
      Eigen::MatrixXd rows(2, 2);
      rows << p, 1.0 - p, p, 1.0 - p;
      const multitype::MutationMatrix mm(rows);
      for (double t : kTGrid) {
        const std::string where = tag({{"theta", theta}, {"p", p}, {"t", t}});
        const auto lk = twotype::line_kernel(prm, t);
        const Eigen::MatrixXd pk = multitype::pim_line_kernel(mp, t);
        const Eigen::MatrixXd mk = multitype::markov_line_kernel(mm, theta, t);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            kernel.add(pk(i, j), lk(i, j), where);
            markov.add(mk(i, j), lk(i, j), where);
          }
        for (double x : kXGrid) {
          Eigen::VectorXd xv(2);
          xv << x, 1.0 - x;
          const auto q = twotype::marginal_q(prm, x, t);
          const Eigen::VectorXd mq = multitype::pim_marginal_q(mp, xv, t);
          marg.add(mq(0), q.q1, where);
          marg.add(mq(1), q.q2, where);

          const MixedLaw law = twotype::transition_law(prm, x, t);
          const multitype::SimplexLaw sl = multitype::pim_transition_law(mp, xv, t);
          atom.add(sl.atom()(0), law.atoms().at(0).location, where);
          atom.add(sl.atom_mass(), law.atoms().at(0).mass, where);
          for (int k = 1; k < 64; ++k) {
            const double xi1 = k / 64.0;
            const double xi2 = 1.0 - xi1;
            const double want = twotype::transition_density(prm, x, t, xi1);
            const double got = multitype::pim_region_density(mp, xv, t, 0, xi1) +
                               multitype::pim_region_density(mp, xv, t, 1, xi2);
            dens.add(got, want, where + fmt(",xi=%g", xi1));
          }
        }
      }
      for (int k = 1; k < 64; ++k) {
        const double xi1 = k / 64.0;
        if (xi1 == p) continue;
        Eigen::VectorXd xv(2);
        xv << 0.5, 0.5;
        const double got = multitype::pim_region_density(mp, xv, kInf, 0, xi1) +
                           multitype::pim_region_density(mp, xv, kInf, 1, 1.0 - xi1);
        dens.add(got, twotype::stationary_density(prm, xi1),
                 tag({{"theta", theta}, {"p", p}, {"t", kInf}, {"xi", xi1}}));
      }
    }

  Eigen::MatrixXd sw(2, 2);
  sw << 0.0, 1.0, 1.0, 0.0;
  const multitype::MutationMatrix swap_m(sw);
  for (double theta : kThetaGrid)
    for (double t : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0}) {
      const Eigen::MatrixXd k = multitype::markov_line_kernel(swap_m, theta, t);
      const double e = std::exp(-theta * t);
      const std::string where = tag({{"theta", theta}, {"t", t}});
      swap.add(k(0, 0), 0.5 * (1.0 + e), where);
      swap.add(k(1, 1), 0.5 * (1.0 + e), where);
      swap.add(k(0, 1), 0.5 * (1.0 - e), where);
      swap.add(k(1, 0), 0.5 * (1.0 - e), where);
    }

  for (int n = 1; n <= 20; ++n)
    for (int j = 0; j <= n; ++j) {
      const double want = 1.0 / (n + 1.0);
      samp.add(std::abs(multitype::infinite_sampling_prob(n, j, 2.0) - want) / want,
               tag({{"n", n}, {"j", j}}));
    }

  return {11,
          "",
          {kernel.result(), marg.result(), atom.result(), dens.result(), markov.result(),
           swap.result(), samp.result()},
          {}};
}

CheckResult selection_checks(std::uint64_t seed) {
  RngStream rng = criterion_stream(seed, 12);
  using namespace selection;

  Worst root("relative root residual of chi(1-chi) + phi(p-chi)", 1e-12);
  int bracket_fail = 0;
  for (int i = 0; i < 1000; ++i) {
    const double theta = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
    const double beta = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
    const double p = 0.01 + 0.98 * rng.uniform();
    const double phi = theta / beta;
    const RootPair r = roots(theta, beta, p);
    for (double x : {r.r1, r.r2}) {
      const double scale = std::abs(x) * (1.0 + std::abs(x)) + phi * (p + std::abs(x));
      root.add(std::abs(x * (1.0 - x) + phi * (p - x)) / scale,
               tag({{"theta", theta}, {"beta", beta}, {"p", p}}));
    }
    bracket_fail += !(r.r2 < 0.0 && r.r1 > 0.0 && r.r1 < 1.0);
  }

  struct Point {
    double theta, p, beta;
  };
  const Point pts[] = {{1.0, 0.5, 2.0}, {2.0, 0.3, 1.0}, {0.5, 0.7, 3.0}, {4.0, 0.5, 0.5}};
  Worst skel("|series - quadrature skeleton|", 1e-8);
  Worst mass("|stationary mass - 1|", 1e-8);
  Worst mean("|stationary mean - pi_1|", 1e-8);
  for (const Point& pt : pts) {
    const std::string where = tag({{"theta", pt.theta}, {"p", pt.p}, {"beta", pt.beta}});
    const SkeletonEntries s = skeleton_series(pt.theta, pt.p, pt.beta);
    const SkeletonEntries q = skeleton_quadrature(pt.theta, pt.p, pt.beta);
    skel.add(s.p11, q.p11, where);
    skel.add(s.p21, q.p21, where);
    const DriftSpec d = DriftSpec::mutation_selection(pt.theta, pt.p, pt.beta);
    const MixedLaw law = stationary_law(d);
    mass.add(law.mass(), 1.0, where);
    mean.add(law.mean(), replacement_stationary(d).pi1, where);
  }

  Worst comp("|P1(x) + P2(1-x) - 1|", 1e-10);
  for (double beta : {0.5, 2.0, 5.0})
    for (int i = 1; i < 20; ++i) {
      const double x = i / 20.0;
      comp.add(fixation_prob(beta, x, 1) + fixation_prob(beta, 1.0 - x, 2), 1.0,
               tag({{"beta", beta}, {"x", x}}));
    }

  Worst neutral("|beta=1e-6 forms - neutral forms|", 1e-4);
  for (double theta : {0.5, 1.0, 2.0})
    for (double p : {0.3, 0.5}) {
      const std::string where = tag({{"theta", theta}, {"p", p}});
      const DriftSpec ms = DriftSpec::mutation_selection(theta, p, 1e-6);
      const DriftSpec nt = DriftSpec::neutral(theta, p);
      const Eigen::Matrix2d a = skeleton_matrix(ms);
      const Eigen::Matrix2d b = skeleton_matrix(nt);
      neutral.add((a - b).cwiseAbs().maxCoeff(), where);
      neutral.add(replacement_stationary(ms).pi1, p, where);
      for (double x : {0.0, 0.4, 1.0}) neutral.add(flow(ms, x, 1.0), flow(nt, x, 1.0), where);
      const TwoTypeParams prm(theta, p);
      for (int k = 1; k < 20; ++k) {
        const double xi = k / 20.0;
        if (std::abs(xi - p) < 0.1) continue;
        neutral.add(stationary_density(ms, xi), twotype::stationary_density(prm, xi),
                    where + fmt(",xi=%g", xi));
      }
    }

  return {12,
          "",
          {root.result(),
           {"root pairs outside r2 < 0 < r1 < 1 (1000 draws)", double(bracket_fail), 0.0, true},
           skel.result(),
           mass.result(),
           mean.result(),
           {"|P1(1/2; beta=2) - ln 2|", std::abs(fixation_prob(2.0, 0.5, 1) - std::numbers::ln2),
            1e-8, true},
           comp.result(),
           neutral.result()},
          {}};
}

CheckResult asg_checks(std::uint64_t seed) {
  const RngStream base = criterion_stream(seed, 13);
  Worst mean("max |z| of T_UA mean vs 1, N=1e5", 3.0);
  double min_p = 1.0;
  std::string min_where;
  std::uint64_t k = 0;
  for (int n : {2, 10})
    for (double beta : {0.5, 2.0}) {
      auto sample = mc_collect(100'000, base.substream(k++), [&](RngStream& r) {
        return selection::asg_simulate(n, beta, r).t_ua;
      });
      const Estimate e = summarize(sample);
      const std::string where = tag({{"n", n}, {"beta", beta}});
      mean.add(z_score(e.value, e.se, 1.0), where);
      const KsResult ks =
          ks_test(std::move(sample), [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
      if (ks.p_value < min_p || min_where.empty()) {
        min_p = ks.p_value;
        min_where = where;
      }
    }

  Worst pi("max relative |pi_i - 1/(i(i+1))|, beta=2, i<=20", 1e-15);
  for (int i = 1; i <= 20; ++i) {
    const double want = 1.0 / (i * (i + 1.0));
    pi.add(std::abs(selection::asg_stationary(2.0, i) - want) / want, tag({{"i", i}}));
  }

  Worst gen("|sum pi_i y^i - P2(y)|", 1e-8);
  for (double beta : {0.5, 2.0, 5.0})
    for (int j = 1; j <= 9; ++j) {
      const double y = j / 10.0;
      double s = 0.0;
      double yi = 1.0;
      for (int i = 1; i <= 5000; ++i) {
        yi *= y;
        s += selection::asg_stationary(beta, i) * yi;
      }
      gen.add(s, selection::fixation_prob(beta, y, 2), tag({{"beta", beta}, {"y", y}}));
    }

  Worst dual("max |z| forward vs lineage Monte Carlo, N=1e6", 4.0);
  struct Point {
    int n;
    double x, t;
  };
  for (const Point& pt : {Point{2, 0.5, 1.0}, Point{3, 0.3, 0.5}}) {
    const auto r = selection::selection_duality_check(pt.n, pt.x, pt.t, 2.0, 1'000'000,
                                                      base.substream(k++));
    const double se = std::hypot(r.lhs_se, r.rhs_se);
    dual.add(z_score(r.lhs, se, r.rhs), tag({{"n", pt.n}, {"x", pt.x}, {"t", pt.t}}));
  }

  return {13,
          "",
          {mean.result(),
           {"min KS p-value of T_UA vs Exp(1), N=1e5 (worst " + min_where + ")", min_p, 0.01,
            false},
           pi.result(),
           gen.result(),
           dual.result()},
          {}};
}

}  // namespace

bool SubCheck::passed() const {
  if (std::isnan(observed)) return false;
  return upper_bound ? observed <= limit : observed >= limit;
}

bool CheckResult::passed() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const SubCheck& c) { return c.passed(); });
}

std::string criterion_name(int id) {
  static const char* names[] = {"normalization",
                                "uniform stationary case",
                                "moments vs Monte Carlo",
                                "eigen-equation",
                                "expansion exactness",
                                "biorthogonality",
                                "spectral identity",
                                "absorption time",
                                "moment duality",
                                "replacement decomposition",
                                "multitype embeddings",
                                "selection closed forms",
                                "ancestral selection graph"};
  if (id < 1 || id > kCriteriaCount) throw InvalidArgument("unknown criterion " + std::to_string(id));
  return names[id - 1];
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "all") {
    std::vector<int> ids(kCriteriaCount);
    for (int i = 0; i < kCriteriaCount; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
    return ids;
  }
  if (suite == "twotype") return {1, 2, 3, 10};
  if (suite == "eigen") return {4, 5, 6};
  if (suite == "lines") return {7, 8, 9};
  if (suite == "multitype") return {11};
  if (suite == "selection") return {12, 13};
  std::vector<int> ids;
  std::stringstream ss(suite);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || id < 1 || id > kCriteriaCount)
      throw InvalidArgument("unknown suite or criterion: " + item);
    ids.push_back(id);
  }
  if (ids.empty()) throw InvalidArgument("empty suite");
  return ids;
}

CheckResult run_criterion(int id, std::uint64_t seed) {
  CheckResult r{id, criterion_name(id), {}, {}};
  try {
    switch (id) {
      case 1: r = normalization(); break;
      case 2: r = uniform_case(seed); break;
      case 3: r = moments_mc(seed); break;
      case 4: r = eigen_equation(); break;
      case 5: r = expansion_exactness(seed); break;
      case 6: r = biorthogonality(); break;
      case 7: r = spectral_identity(); break;
      case 8: r = absorption_time(seed); break;
      case 9: r = duality(seed); break;
      case 10: r = replacement_decomposition(); break;
      case 11: r = multitype_checks(); break;
      case 12: r = selection_checks(seed); break;
      case 13: r = asg_checks(seed); break;
    }
  } catch (const std::exception& e) {
    r.checks.clear();
    r.error = e.what();
  }
  r.id = id;
  r.name = criterion_name(id);
  return r;
}

std::vector<CheckResult> run_suite(const std::vector<int>& ids, std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(run_criterion(id, seed));
  return out;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  int passed = 0;
  for (const CheckResult& r : results) {
    const bool ok = r.passed();
    passed += ok;
    os << "[" << (ok ? "PASS" : "FAIL") << "] criterion " << r.id << ": " << r.name << "\n";
    if (!r.error.empty()) os << "    error: " << r.error << "\n";
    for (const SubCheck& c : r.checks) {
      os << "    " << (c.passed() ? "ok  " : "BAD ") << fmt("%.3e", c.observed)
         << (c.upper_bound ? " <= " : " >= ") << fmt("%.1e", c.limit) << "  " << c.label << "\n";
    }
  }
  os << passed << "/" << results.size() << " criteria passed\n";
  return os.str();
}

}  // namespace starfv::verify
