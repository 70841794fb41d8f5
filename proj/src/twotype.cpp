#include "starfv/twotype.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "starfv/eigen.hpp"

namespace starfv::twotype {

namespace {

void check_frequency(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("frequency must lie in [0,1]");
}

void check_time(double t) {
  if (!(t >= 0.0) || std::isnan(t)) throw InvalidArgument("time must be non-negative");
}

// e^{-theta t/2}, the probability of no mutation along a line of length t.
double decay(const TwoTypeParams& prm, double t) { return std::exp(-0.5 * prm.theta() * t); }

double mutation_flow(const TwoTypeParams& prm, double x, double t) {
  return prm.p() + (x - prm.p()) * decay(prm, t);
}

// Upper-region density in y = (xi - p)/(1 - p), y > e.
double upper_branch(const TwoTypeParams& prm, double x, double e, double y) {
  const double a = prm.alpha();
  const double p = prm.p();
  double v = p * std::pow(y, a - 1.0);
  if (e > 0.0) v += e * (x - p) * std::pow(y, a - 2.0);
  return a * v / (1.0 - p);
}

// Lower-region density in z = 1 - xi/p, z > e.
double lower_branch(const TwoTypeParams& prm, double x, double e, double z) {
  const double a = prm.alpha();
  const double p = prm.p();
  double v = (1.0 - p) * std::pow(z, a - 1.0);
  if (e > 0.0) v -= e * (x - p) * std::pow(z, a - 2.0);
  return std::max(0.0, a * v / p);
}

}  // namespace

LineKernel line_kernel(const TwoTypeParams& params, double t) {
  check_time(t);
  const double e = decay(params, t);
  const double p = params.p();
  const double p11 = e + (1.0 - e) * p;
  const double p21 = (1.0 - e) * p;
  return {{{{p11, 1.0 - p11}, {p21, 1.0 - p21}}}};
}

TypeProbs marginal_q(const TwoTypeParams& params, double x, double t) {
  check_frequency(x);
  check_time(t);
  const double q1 = mutation_flow(params, x, t);
  return {q1, 1.0 - q1};
}

MixedLaw transition_law(const TwoTypeParams& params, double x, double t) {
  check_frequency(x);
  check_time(t);
  if (t == 0.0) return MixedLaw::point_mass(x);

  const TwoTypeParams prm = params;
  const double p = prm.p();
  const double a = prm.alpha();
  const double e = decay(prm, t);
  const double atom_mass = std::exp(-t);
  const double jump = -std::expm1(-t);
  // Integral of y^{a-2} over (e, 1).
  const double tail = e > 0.0 ? one_minus_exp_over(a - 1.0, 0.5 * prm.theta() * t) : 0.0;
  const double skew = e > 0.0 ? a * e * (x - p) * tail : 0.0;

  // Same expressions as the atom location, so x in {0,1} lands exactly on an edge.
  const double upper_lo = mutation_flow(prm, 1.0, t);
  const double lower_hi = mutation_flow(prm, 0.0, t);

  DensityPiece upper{upper_lo, 1.0,
                     [prm, x, e](double, double from_lo, double) {
                       return upper_branch(prm, x, e, e + from_lo / (1.0 - prm.p()));
                     },
                     p * jump + skew,
                     [prm, x, t](RngStream& rng) {
                       // Last replacement type 1: accept tau with prob q1(t - tau; x).
                       while (true) {
                         const double tau = sample_truncated_exponential(t, rng);
                         if (rng.uniform() < mutation_flow(prm, x, t - tau)) {
                           return line_kernel(prm, tau)(0, 0);
                         }
                       }
                     }};
  DensityPiece lower{0.0, lower_hi,
                     [prm, x, e](double, double, double from_hi) {
                       return lower_branch(prm, x, e, e + from_hi / prm.p());
                     },
                     (1.0 - p) * jump - skew,
                     [prm, x, t](RngStream& rng) {
                       while (true) {
                         const double tau = sample_truncated_exponential(t, rng);
                         if (rng.uniform() >= mutation_flow(prm, x, t - tau)) {
                           return line_kernel(prm, tau)(1, 0);
                         }
                       }
                     }};
  std::vector<Atom> atoms;
  if (atom_mass > 0.0) atoms.push_back({mutation_flow(prm, x, t), atom_mass});
  return MixedLaw(std::move(atoms), {std::move(upper), std::move(lower)});
}

double transition_density(const TwoTypeParams& params, double x, double t, double xi) {
  check_frequency(x);
  check_time(t);
  if (!(xi >= 0.0 && xi <= 1.0)) throw InvalidArgument("xi must lie in [0,1]");
  if (t == 0.0) return 0.0;
  const double p = params.p();
  const double e = decay(params, t);
  if (xi > mutation_flow(params, 1.0, t)) return upper_branch(params, x, e, (xi - p) / (1.0 - p));
  if (xi < mutation_flow(params, 0.0, t)) return lower_branch(params, x, e, (p - xi) / p);
  return 0.0;
}

MixedLaw stationary_law(const TwoTypeParams& params) {
  const TwoTypeParams prm = params;
  const double p = prm.p();
  DensityPiece upper{p, 1.0,
                     [prm](double, double from_lo, double) {
                       return upper_branch(prm, prm.p(), 0.0, from_lo / (1.0 - prm.p()));
                     },
                     p,
                     [prm](RngStream& rng) {
                       const double eta = std::pow(rng.uniform(), 0.5 * prm.theta());
                       return prm.p() + (1.0 - prm.p()) * eta;
                     }};
  DensityPiece lower{0.0, p,
                     [prm](double, double, double from_hi) {
                       return lower_branch(prm, prm.p(), 0.0, from_hi / prm.p());
                     },
                     1.0 - p,
                     [prm](RngStream& rng) {
                       const double eta = std::pow(rng.uniform(), 0.5 * prm.theta());
                       return prm.p() * (1.0 - eta);
                     }};
  return MixedLaw({}, {std::move(upper), std::move(lower)});
}

double stationary_density(const TwoTypeParams& params, double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw InvalidArgument("xi must lie in [0,1]");
  const double p = params.p();
  if (xi > p) return upper_branch(params, p, 0.0, (xi - p) / (1.0 - p));
  if (xi < p) return lower_branch(params, p, 0.0, (p - xi) / p);
  return upper_branch(params, p, 0.0, 0.0);
}

double stationary_cdf(const TwoTypeParams& params, double xi) {
  const double p = params.p();
  const double a = params.alpha();
  if (xi <= 0.0) return 0.0;
  if (xi >= 1.0) return 1.0;
  if (xi >= p) return (1.0 - p) + p * std::pow((xi - p) / (1.0 - p), a);
  return (1.0 - p) * (1.0 - std::pow((p - xi) / p, a));
}

double stationary_sample(const TwoTypeParams& params, RngStream& rng) {
  const double eta = std::pow(rng.uniform(), 0.5 * params.theta());
  const double p = params.p();
  if (rng.uniform() < p) return p * (1.0 - eta) + eta;
  return p * (1.0 - eta);
}

double transition_moment(const TwoTypeParams& params, int n, double x, double t) {
  if (n < 0) throw InvalidArgument("moment order must be non-negative");
  check_frequency(x);
  check_time(t);
  if (n == 0) return 1.0;
  const double p = params.p();
  const double a = params.alpha();
  const double half_theta = 0.5 * params.theta();
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  const double fast = std::exp(-t * (1.0 + n * half_theta));

  double m = fast * std::pow(x - p, n);
  m += a / (n + a) * (p * std::pow(1.0 - p, n) + sign * (1.0 - p) * std::pow(p, n)) *
       -std::expm1(-t * (1.0 + n * half_theta));
  const double e = decay(params, t);
  if (e > 0.0) {
    m += (x - p) * e * a / (n - 1 + a) * (std::pow(1.0 - p, n) - sign * std::pow(p, n)) *
         -std::expm1(-t * (1.0 + (n - 1) * half_theta));
  }
  return m;
}

double transition_raw_moment(const TwoTypeParams& params, int n, double x, double t) {
  if (n < 0) throw InvalidArgument("moment order must be non-negative");
  const double p = params.p();
  double m = 0.0;
  for (int k = 0; k <= n; ++k) {
    m += binomial(n, k) * std::pow(p, n - k) * transition_moment(params, k, x, t);
  }
  return m;
}

StationaryMoment stationary_moment(const TwoTypeParams& params, int n) {
  if (n < 0) throw InvalidArgument("moment order must be non-negative");
  const double p = params.p();
  if (n == 0) return {1.0, 1.0};
  const double a = params.alpha();
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  const double central = a / (n + a) * (p * std::pow(1.0 - p, n) + sign * (1.0 - p) * std::pow(p, n));
  double raw = std::pow(p, n);
  for (int k = 2; k <= n; ++k) {
    raw -= binomial(n, k) * std::pow(p, n - k) * eigen::c_n0(params, k);
  }
  return {central, raw};
}

double sample_transition(const TwoTypeParams& params, double x, double t, RngStream& rng) {
  check_frequency(x);
  if (!(t > 0.0)) throw InvalidArgument("sample_transition needs t > 0");
  if (rng.uniform() < std::exp(-t)) return mutation_flow(params, x, t);
  const double tau = sample_truncated_exponential(t, rng);
  const int from = rng.uniform() < mutation_flow(params, x, t - tau) ? 0 : 1;
  return line_kernel(params, tau)(from, 0);
}

PathRecord simulate_path(const TwoTypeParams& params, double x, double horizon, RngStream& rng) {
  const TwoTypeParams prm = params;
  return simulate_replacement_path(
      [&prm](double x0, double s) { return mutation_flow(prm, x0, s); }, x, horizon, rng);
}

std::array<DensityPiece, 2> replacement_component_pieces(const TwoTypeParams& params, double x,
                                                         double t, int k) {
  check_frequency(x);
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("replacement components need finite t > 0");
  if (k < 1) throw InvalidArgument("replacement count k must be at least 1");
  const TwoTypeParams prm = params;
  const double p = prm.p();
  const double e = decay(prm, t);
  const double weight = poisson_weight(t, k);
  const double scale = 2.0 / (prm.theta() * t);

  // E[e^{-theta T_k/2}] for T_k with density k (s/t)^{k-1}/t on (0,t).
  const double c = 0.5 * prm.theta() * t;
  const double decay_mean =
      std::exp(std::lgamma(k + 1.0) - k * std::log(c)) * boost::math::gamma_p(k, c);
  const double upper_share = p + (x - p) * decay_mean;

  DensityPiece upper{p + (1.0 - p) * e, 1.0,
                     [prm, x, e, k, weight, scale](double, double from_lo, double) {
                       const double p = prm.p();
                       const double y = e + from_lo / (1.0 - p);
                       const double r1 = p + (x - p) * e / y;
                       const double lead = 1.0 + scale * std::log(y);
                       return k * scale * r1 / ((1.0 - p) * y) * std::pow(std::max(lead, 0.0), k - 1) *
                              weight;
                     },
                     weight * upper_share, {}};
  DensityPiece lower{0.0, p * (1.0 - e),
                     [prm, x, e, k, weight, scale](double, double, double from_hi) {
                       const double p = prm.p();
                       const double z = e + from_hi / p;
                       const double r2 = 1.0 - p - (x - p) * e / z;
                       const double lead = 1.0 + scale * std::log(z);
                       return k * scale * std::max(r2, 0.0) / (p * z) *
                              std::pow(std::max(lead, 0.0), k - 1) * weight;
                     },
                     weight * (1.0 - upper_share), {}};
  return {std::move(upper), std::move(lower)};
}

double replacement_component_density(const TwoTypeParams& params, double x, double t, int k,
                                     double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw InvalidArgument("xi must lie in [0,1]");
  const auto pieces = replacement_component_pieces(params, x, t, k);
  for (const auto& pc : pieces) {
    if (pc.contains(xi) || (xi == pc.hi && pc.hi == 1.0) || (xi == pc.lo && pc.lo == 0.0)) {
      return pc.eval(xi);
    }
  }
  return 0.0;
}

double last_replacement_time_density(int k, double t, double tk) {
  if (k < 1) throw InvalidArgument("replacement count k must be at least 1");
  if (!(t > 0.0)) throw InvalidArgument("horizon must be positive");
  if (!(tk > 0.0 && tk < t)) return 0.0;
  return k * std::pow(tk / t, k - 1) / t;
}

}  // namespace starfv::twotype
