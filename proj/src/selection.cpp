#include "starfv/selection.hpp"

#include <array>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "starfv/quadrature.hpp"

namespace starfv::selection {

namespace {

constexpr double kSeriesSwitch = 0.9;
constexpr double kSkeletonHorizon = 45.0;  // e^{-45} is below double resolution of 1
constexpr double kEscapeSlack = 1e-9;

void check_frequency(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("frequency must lie in [0,1]");
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive");
}

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("p must lie in (0,1)");
}

double logistic_flow(double beta, double x, double t) {
  if (x == 0.0) return 0.0;
  return x / ((1.0 - x) * std::exp(-0.5 * beta * t) + x);
}

using OdeState = std::array<double, 2>;

// Integrates chi' = v(chi) together with I' = e^{-s} chi from 0 to t.
OdeState integrate_custom(const DriftSpec& drift, double x0, double t) {
  namespace odeint = boost::numeric::odeint;
  OdeState y{x0, 0.0};
  if (t == 0.0) return y;
  const double max_dt = drift.lipschitz() > 0.0 ? std::min(1.0, 0.5 / drift.lipschitz()) : 1.0;
  auto rhs = [&drift](const OdeState& s, OdeState& ds, double time) {
    ds[0] = drift.v(s[0]);
    ds[1] = std::exp(-time) * s[0];
  };
  auto observer = [](const OdeState& s, double) {
    if (!(s[0] >= -kEscapeSlack && s[0] <= 1.0 + kEscapeSlack)) {
      throw DomainEscape("custom drift drives the frequency out of [0,1]");
    }
  };
  auto stepper = odeint::make_controlled(1e-13, 1e-12, max_dt,
                                         odeint::runge_kutta_dopri5<OdeState>());
  odeint::integrate_adaptive(stepper, rhs, y, 0.0, t, std::min(0.01, max_dt), observer);
  y[0] = std::clamp(y[0], 0.0, 1.0);
  return y;
}

// E[chi(T)], T ~ Exp(1), for a custom drift from x0.
double custom_exp_average(const DriftSpec& drift, double x0) {
  const OdeState y = integrate_custom(drift, x0, kSkeletonHorizon);
  return y[1] + std::exp(-kSkeletonHorizon) * y[0];
}

// Interior equilibrium of a custom drift with v(0) > 0 > v(1), after
// checking that v changes sign exactly once.
double custom_equilibrium(const DriftSpec& drift) {
  const double v0 = drift.v(0.0);
  const double v1 = drift.v(1.0);
  if (v0 < 0.0 || v1 > 0.0) throw DomainEscape("custom drift points out of [0,1] at a boundary");
  if (v0 == 0.0 || v1 == 0.0) {
    throw NoStationaryDistribution("custom drift has an absorbing boundary");
  }
  boost::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::bisect(
      [&drift](double x) { return drift.v(x); }, 0.0, 1.0,
      [](double a, double b) { return std::abs(b - a) < 1e-15; }, iters);
  const double r = 0.5 * (lo + hi);
  constexpr int kGrid = 2000;
  for (int i = 1; i < kGrid; ++i) {
    const double x = static_cast<double>(i) / kGrid;
    const double v = drift.v(x);
    if ((x < lo && v <= 0.0) || (x > hi && v >= 0.0)) {
      throw InvalidArgument("custom drift must have a single interior equilibrium");
    }
  }
  return r;
}

// Time for the custom flow to go from `from` to `to` (same side of the equilibrium).
double custom_travel_time(const DriftSpec& drift, double from, double to) {
  const double lo = std::min(from, to);
  const double hi = std::max(from, to);
  if (hi == lo) return 0.0;
  // The integrand is nearly singular when `to` approaches the equilibrium, so
  // a relative 1e-10 is the practical target here.
  return quad([&drift](double x) { return 1.0 / std::abs(drift.v(x)); }, lo, hi,
              QuadSpec{1e-13, 1e-10, 4000})
      .value;
}

}  // namespace

DriftSpec DriftSpec::neutral(double theta, double p) {
  check_positive(theta, "theta");
  check_p(p);
  DriftSpec d;
  d.kind_ = Kind::Neutral;
  d.theta_ = theta;
  d.p_ = p;
  d.lipschitz_ = 0.5 * theta;
  return d;
}

DriftSpec DriftSpec::logistic(double beta) {
  check_positive(beta, "beta");
  DriftSpec d;
  d.kind_ = Kind::Logistic;
  d.beta_ = beta;
  d.lipschitz_ = 0.5 * beta;
  return d;
}

DriftSpec DriftSpec::mutation_selection(double theta, double p, double beta) {
  check_positive(theta, "theta");
  check_positive(beta, "beta");
  check_p(p);
  DriftSpec d;
  d.kind_ = Kind::MutationSelection;
  d.theta_ = theta;
  d.p_ = p;
  d.beta_ = beta;
  d.lipschitz_ = 0.5 * (theta + beta);
  return d;
}

DriftSpec DriftSpec::custom(std::function<double(double)> v, double lipschitz) {
  if (!v) throw InvalidArgument("custom drift needs an evaluator");
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) {
    throw InvalidArgument("Lipschitz bound must be finite and non-negative");
  }
  DriftSpec d;
  d.kind_ = Kind::Custom;
  d.custom_ = std::move(v);
  d.lipschitz_ = lipschitz;
  return d;
}

DriftSpec DriftSpec::custom_polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw InvalidArgument("polynomial drift needs coefficients");
  double lip = 0.0;
  for (std::size_t k = 1; k < coeffs.size(); ++k) lip += static_cast<double>(k) * std::abs(coeffs[k]);
  return custom(
      [c = std::move(coeffs)](double x) {
        double v = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
        return v;
      },
      lip);
}

double DriftSpec::v(double x) const {
  switch (kind_) {
    case Kind::Neutral:
      return 0.5 * theta_ * (p_ - x);
    case Kind::Logistic:
      return 0.5 * beta_ * x * (1.0 - x);
    case Kind::MutationSelection:
      return 0.5 * theta_ * (p_ - x) + 0.5 * beta_ * x * (1.0 - x);
    case Kind::Custom:
      return custom_(x);
  }
  return 0.0;
}

DriftSpec swap_types(const DriftSpec& drift) {
  if (drift.kind() == DriftSpec::Kind::Neutral) {
    return DriftSpec::neutral(drift.theta(), 1.0 - drift.p());
  }
  return DriftSpec::custom([drift](double y) { return -drift.v(1.0 - y); }, drift.lipschitz());
}

RootPair roots(double theta, double beta, double p) {
  check_positive(theta, "theta");
  check_positive(beta, "beta");
  check_p(p);
  const double phi = theta / beta;
  const double m = 1.0 - phi;
  const double sq = std::sqrt(m * m + 4.0 * phi * p);
  // Take the root without cancellation first; the product of the roots is -phi p.
  if (m >= 0.0) {
    const double r1 = 0.5 * (m + sq);
    return {r1, -phi * p / r1};
  }
  const double r2 = 0.5 * (m - sq);
  return {-phi * p / r2, r2};
}

double flow(const DriftSpec& drift, double chi0, double t) {
  check_frequency(chi0);
  if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
  if (t == 0.0) return chi0;
  switch (drift.kind()) {
    case DriftSpec::Kind::Neutral:
      return drift.p() + (chi0 - drift.p()) * std::exp(-0.5 * drift.theta() * t);
    case DriftSpec::Kind::Logistic:
      return logistic_flow(drift.beta(), chi0, t);
    case DriftSpec::Kind::MutationSelection: {
      const RootPair r = roots(drift.theta(), drift.beta(), drift.p());
      const double c = (r.r1 - chi0) / (chi0 - r.r2) * std::exp(-0.5 * drift.beta() * (r.r1 - r.r2) * t);
      return r.r1 - (r.r1 - r.r2) * c / (1.0 + c);
    }
    case DriftSpec::Kind::Custom:
      if (std::isinf(t)) throw InvalidArgument("custom flow needs a finite time");
      return integrate_custom(drift, chi0, t)[0];
  }
  return chi0;
}

MuNu mu_nu(double theta, double p, double beta, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
  const RootPair r = roots(theta, beta, p);
  const double e = std::exp(-0.5 * beta * (r.r1 - r.r2) * t);
  const double be = r.b() * e;
  const double ce = r.c() * e;
  return {r.r1 + (r.r1 - r.r2) * be / (1.0 - be), r.r1 - (r.r1 - r.r2) * ce / (1.0 + ce)};
}

namespace {

double series_p11(const RootPair& r, double beta) {
  const double s = 1.0 / (r.a() * beta);
  const double b = r.b();
  double sum = 0.0;
  double bk = 1.0;
  for (int k = 0; k < 10'000'000; ++k) {
    bk *= b;
    const double term = bk / (s + k + 1.0);
    sum += term;
    if (term <= 1e-17 * sum) break;
  }
  return r.r1 + 2.0 / beta * sum;
}

double series_p21(const RootPair& r, double beta) {
  const double s = 1.0 / (r.a() * beta);
  const double c = r.c();
  const double y = c / (1.0 + c);
  double sum = 0.0;
  double coef = 1.0;
  double yk = 1.0;
  for (int k = 0; k < 10'000'000; ++k) {
    if (k > 0) {
      coef *= (s + k) / k;
      yk *= y;
    }
    const double term = coef * yk / (s + k + 1.0);
    sum += term;
    if (term <= 1e-17 * sum) break;
  }
  // c^{-s} y^{s+1} = (1 + c)^{-s} y
  return r.r1 - 2.0 / beta * std::exp(-s * std::log1p(c)) * y * sum;
}

double quadrature_p11(double theta, double p, double beta) {
  return quad([=](double u) { return mu_nu(theta, p, beta, -std::log(u)).mu; }, 0.0, 1.0).value;
}

double quadrature_p21(double theta, double p, double beta) {
  return quad([=](double u) { return mu_nu(theta, p, beta, -std::log(u)).nu; }, 0.0, 1.0).value;
}

}  // namespace

SkeletonEntries skeleton_series(double theta, double p, double beta) {
  const RootPair r = roots(theta, beta, p);
  return {series_p11(r, beta), series_p21(r, beta)};
}

SkeletonEntries skeleton_quadrature(double theta, double p, double beta) {
  return {quadrature_p11(theta, p, beta), quadrature_p21(theta, p, beta)};
}

namespace {

SkeletonEntries skeleton_entries(const DriftSpec& drift) {
  switch (drift.kind()) {
    case DriftSpec::Kind::Neutral: {
      const double h = 0.5 * drift.theta();
      const double p = drift.p();
      return {p + (1.0 - p) / (1.0 + h), p * h / (1.0 + h)};
    }
    case DriftSpec::Kind::Logistic:
      return {1.0, 0.0};
    case DriftSpec::Kind::MutationSelection: {
      const RootPair r = roots(drift.theta(), drift.beta(), drift.p());
      const double y = r.c() / (1.0 + r.c());
      return {r.b() <= kSeriesSwitch ? series_p11(r, drift.beta())
                                     : quadrature_p11(drift.theta(), drift.p(), drift.beta()),
              y <= kSeriesSwitch ? series_p21(r, drift.beta())
                                 : quadrature_p21(drift.theta(), drift.p(), drift.beta())};
    }
    case DriftSpec::Kind::Custom:
      return {custom_exp_average(drift, 1.0), custom_exp_average(drift, 0.0)};
  }
  return {1.0, 0.0};
}

}  // namespace

Eigen::Matrix2d skeleton_matrix(const DriftSpec& drift) {
  const SkeletonEntries e = skeleton_entries(drift);
  Eigen::Matrix2d m;
  m << e.p11, 1.0 - e.p11, e.p21, 1.0 - e.p21;
  return m;
}

ReplacementStationary replacement_stationary(const DriftSpec& drift) {
  const SkeletonEntries e = skeleton_entries(drift);
  const double into1 = e.p21;
  const double out1 = 1.0 - e.p11;
  if (!(into1 + out1 > 0.0) || into1 <= 0.0 || out1 <= 0.0) {
    throw NoStationaryDistribution("skeleton chain is absorbing: no stationary law");
  }
  const double pi1 = into1 / (into1 + out1);
  return {pi1, out1 / (into1 + out1)};
}

namespace {

// Mutation-selection density pieces: upper on (r1, 1), lower on (0, r1).
double ms_upper(const RootPair& r, double beta, double pi1, double from_r1, double xi) {
  const double s = 1.0 / (r.a() * beta);
  const double d = xi - r.r2;
  const double ratio = from_r1 / d / r.b();
  return pi1 * (2.0 / beta) * std::pow(ratio, s - 1.0) / (d * d * r.b());
}

double ms_lower(const RootPair& r, double beta, double pi2, double to_r1, double xi) {
  const double s = 1.0 / (r.a() * beta);
  const double d = xi - r.r2;
  const double ratio = to_r1 / d / r.c();
  return pi2 * (2.0 / beta) * std::pow(ratio, s - 1.0) / (d * d * r.c());
}

double custom_branch(const DriftSpec& drift, double weight, double start, double xi) {
  const double tau = custom_travel_time(drift, start, xi);
  return weight * std::exp(-tau) / std::abs(drift.v(xi));
}

}  // namespace

MixedLaw stationary_law(const DriftSpec& drift) {
  switch (drift.kind()) {
    case DriftSpec::Kind::Neutral:
      return twotype::stationary_law(TwoTypeParams(drift.theta(), drift.p()));
    case DriftSpec::Kind::Logistic:
      throw NoStationaryDistribution("pure selection has no stationary law");
    case DriftSpec::Kind::MutationSelection: {
      const RootPair r = roots(drift.theta(), drift.beta(), drift.p());
      const ReplacementStationary pi = replacement_stationary(drift);
      const double beta = drift.beta();
      DensityPiece upper{r.r1, 1.0,
                         [r, beta, pi](double xi, double from_lo, double) {
                           return ms_upper(r, beta, pi.pi1, from_lo, xi);
                         },
                         pi.pi1,
                         [drift](RngStream& rng) { return flow(drift, 1.0, rng.exponential()); }};
      DensityPiece lower{0.0, r.r1,
                         [r, beta, pi](double xi, double, double from_hi) {
                           return ms_lower(r, beta, pi.pi2, from_hi, xi);
                         },
                         pi.pi2,
                         [drift](RngStream& rng) { return flow(drift, 0.0, rng.exponential()); }};
      return MixedLaw({}, {std::move(upper), std::move(lower)});
    }
    case DriftSpec::Kind::Custom: {
      const double eq = custom_equilibrium(drift);
      const ReplacementStationary pi = replacement_stationary(drift);
      DensityPiece upper{eq, 1.0,
                         [drift, pi](double xi, double, double) {
                           return custom_branch(drift, pi.pi1, 1.0, xi);
                         },
                         pi.pi1,
                         [drift](RngStream& rng) { return flow(drift, 1.0, rng.exponential()); }};
      DensityPiece lower{0.0, eq,
                         [drift, pi](double xi, double, double) {
                           return custom_branch(drift, pi.pi2, 0.0, xi);
                         },
                         pi.pi2,
                         [drift](RngStream& rng) { return flow(drift, 0.0, rng.exponential()); }};
      return MixedLaw({}, {std::move(upper), std::move(lower)});
    }
  }
  throw InvalidArgument("unknown drift kind");
}

double stationary_density(const DriftSpec& drift, double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) return 0.0;
  if (drift.kind() == DriftSpec::Kind::MutationSelection) {
    const RootPair r = roots(drift.theta(), drift.beta(), drift.p());
    const ReplacementStationary pi = replacement_stationary(drift);
    if (xi > r.r1 && xi < 1.0) return ms_upper(r, drift.beta(), pi.pi1, xi - r.r1, xi);
    if (xi > 0.0 && xi < r.r1) return ms_lower(r, drift.beta(), pi.pi2, r.r1 - xi, xi);
    return 0.0;
  }
  return stationary_law(drift).density(xi);
}

double stationary_sample(const DriftSpec& drift, RngStream& rng) {
  if (drift.kind() == DriftSpec::Kind::Neutral) {
    return twotype::stationary_sample(TwoTypeParams(drift.theta(), drift.p()), rng);
  }
  const ReplacementStationary pi = replacement_stationary(drift);
  const double start = rng.uniform() < pi.pi1 ? 1.0 : 0.0;
  return flow(drift, start, rng.exponential());
}

double fixation_prob(double beta, double x, int type) {
  check_positive(beta, "beta");
  check_frequency(x);
  if (type != 1 && type != 2) throw InvalidArgument("type must be 1 or 2");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double a = 2.0 / beta;
  if (type == 1) {
    // (2/beta) x int_0^1 z^{a-1} / (x + (1-x) z) dz
    const double i = quad_offset(
        [=](double, double z, double) { return std::pow(z, a - 1.0) / (x + (1.0 - x) * z); },
        0.0, 1.0).value;
    return a * x * i;
  }
  // 1 - (2/beta)(1-y) int_0^1 z^{a-1} / (1 - y (1-z)) dz with y = x
  const double y = x;
  const double i = quad_offset(
      [=](double, double z, double) { return std::pow(z, a - 1.0) / ((1.0 - y) + y * z); }, 0.0,
      1.0).value;
  return 1.0 - a * (1.0 - y) * i;
}

twotype::PathRecord simulate_path(const DriftSpec& drift, double x, double horizon,
                                  RngStream& rng) {
  return twotype::simulate_replacement_path(
      [&drift](double x0, double s) { return flow(drift, x0, s); }, x, horizon, rng);
}

int AsgPath::state_at(double t) const {
  int state = n;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    state = ev.state;
  }
  return state;
}

AsgPath asg_simulate(int n, double beta, RngStream& rng, double horizon) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  check_positive(beta, "beta");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  AsgPath path{n, horizon, {}, n == 1 ? 0.0 : std::numeric_limits<double>::infinity()};
  const double h = 0.5 * beta;
  int state = n;
  double now = 0.0;
  while (true) {
    if (state == 1 && std::isinf(horizon)) break;
    // From one lineage the collapse is invisible; only branching changes the state.
    const double rate = state == 1 ? h : 1.0 + state * h;
    const double next = now + rng.exponential(rate);
    if (next > horizon) break;
    now = next;
    if (state == 1 || rng.uniform() * rate < state * h) {
      if (state >= kAsgLineageCap) throw SimulationAbort("ASG lineage count exceeded the cap");
      ++state;
    } else {
      state = 1;
      if (std::isinf(path.t_ua)) path.t_ua = now;
    }
    path.events.push_back({now, state});
  }
  return path;
}

double asg_stationary(double beta, int i) {
  check_positive(beta, "beta");
  if (i < 1) throw InvalidArgument("i must be at least 1");
  const double a = 2.0 / beta;
  // (a/i) prod_{k=1}^i k/(a+k)
  if (i <= 1000) {
    double v = a / i;
    for (int k = 1; k <= i; ++k) v *= k / (a + k);
    return v;
  }
  // a Gamma(a+1) Gamma(i)/Gamma(i+a+1); lgamma differences lose digits at large i.
  if (a < 100.0) return a * std::tgamma(a + 1.0) * boost::math::tgamma_delta_ratio(double(i), a + 1.0);
  return std::exp(std::log(a / i) + std::lgamma(i + 1.0) + std::lgamma(a + 1.0) -
                  std::lgamma(a + i + 1.0));
}

SelectionDuality selection_duality_check(int n, double x, double t, double beta,
                                         std::size_t n_mc, const RngStream& rng) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  check_frequency(x);
  check_positive(beta, "beta");
  if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
  if (t == 0.0) return {std::pow(x, n), 0.0, std::pow(x, n), 0.0};
  // Drift -(beta/2) x (1-x) is the logistic flow of the other type.
  const auto negative_flow = [beta](double x0, double s) {
    return 1.0 - logistic_flow(beta, 1.0 - x0, s);
  };
  const Estimate lhs = mc_mean(n_mc, rng.substream(0), [&](RngStream& r) {
    return std::pow(twotype::simulate_replacement_path(negative_flow, x, t, r).final_frequency, n);
  });
  const Estimate rhs = mc_mean(n_mc, rng.substream(1), [&](RngStream& r) {
    return std::pow(x, asg_simulate(n, beta, r, t).state_at(t));
  });
  return {lhs.value, lhs.se, rhs.value, rhs.se};
}

}  // namespace starfv::selection
