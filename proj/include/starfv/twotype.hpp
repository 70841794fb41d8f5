#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "starfv/core.hpp"
#include "starfv/mixed_law.hpp"

// Two-type star-shaped Fleming-Viot process with mutation: the whole
// population is replaced at rate 1 by the offspring of one individual, and
// between replacements the type-1 frequency follows the deterministic
// mutation flow x(s) = p + (x - p) e^{-theta s/2}.
namespace starfv::twotype {

// Single-line type-change probabilities over a horizon, rows indexed by the
// starting type (0 = type 1, 1 = type 2).
struct LineKernel {
  std::array<std::array<double, 2>, 2> p;

  double operator()(int from, int to) const { return p[from][to]; }
};

LineKernel line_kernel(const TwoTypeParams& params, double t);

struct TypeProbs {
  double q1;
  double q2;
};

// Probability that one individual sampled at time t is of type 1 or 2 given
// no replacement in (0, t) and initial frequency x.
TypeProbs marginal_q(const TwoTypeParams& params, double x, double t);

// Law of xi(t) from xi(0) = x: an atom at q1(t;x) with mass e^{-t}, plus
// density pieces above p + (1-p)e^{-theta t/2} and below p(1-e^{-theta t/2}).
// t = 0 gives a point mass at x. t = infinity is accepted and yields the
// stationary law.
MixedLaw transition_law(const TwoTypeParams& params, double x, double t);

// Continuous part of the transition law at xi; zero on the closed gap
// between the pieces.
double transition_density(const TwoTypeParams& params, double x, double t, double xi);

MixedLaw stationary_law(const TwoTypeParams& params);
// At xi = p the limit from above is returned (infinite when theta > 2).
double stationary_density(const TwoTypeParams& params, double xi);
double stationary_cdf(const TwoTypeParams& params, double xi);

// eta = u^{theta/2}; with probability p return p + (1-p) eta, else p(1-eta).
double stationary_sample(const TwoTypeParams& params, RngStream& rng);

// E_x[(xi(t) - p)^n].
double transition_moment(const TwoTypeParams& params, int n, double x, double t);

// E_x[xi(t)^n] by binomial expansion of the central moments.
double transition_raw_moment(const TwoTypeParams& params, int n, double x, double t);

struct StationaryMoment {
  double central;  // E[(xi - p)^n]
  double raw;      // E[xi^n], from the eigenpolynomial constants c_{k0}
};

StationaryMoment stationary_moment(const TwoTypeParams& params, int n);

// Exact draw of xi(t): the atom with probability e^{-t}, otherwise the state
// left by the last replacement, tau time units before t.
double sample_transition(const TwoTypeParams& params, double x, double t, RngStream& rng);

struct ReplacementEvent {
  double time;
  int type;          // 1 or 2
  double frequency;  // type-1 frequency just after the event (1 or 0)
};

struct PathRecord {
  double initial;
  double horizon;
  std::vector<ReplacementEvent> events;
  double final_frequency;
};

// Forward path on [0, horizon] driven by `flow(x0, s)`, the deterministic
// frequency reached from x0 after s time units without replacement.
// Replacement epochs form a rate-1 Poisson process; a replacement is type 1
// with probability equal to the current frequency.
template <class Flow>
PathRecord simulate_replacement_path(Flow&& flow, double x, double horizon, RngStream& rng) {
  if (!(horizon > 0.0)) throw InvalidArgument("simulate_path: horizon must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("simulate_path: x must lie in [0,1]");
  PathRecord rec{x, horizon, {}, x};
  double now = 0.0;
  double anchor = x;
  double anchor_time = 0.0;
  while (true) {
    const double next = now + rng.exponential(1.0);
    if (next > horizon) break;
    const double freq = flow(anchor, next - anchor_time);
    const int type = rng.uniform() < freq ? 1 : 2;
    anchor = type == 1 ? 1.0 : 0.0;
    anchor_time = next;
    now = next;
    rec.events.push_back({next, type, anchor});
  }
  rec.final_frequency = flow(anchor, horizon - anchor_time);
  return rec;
}

PathRecord simulate_path(const TwoTypeParams& params, double x, double horizon, RngStream& rng);

// Joint density of "k >= 1 replacements in (0,t)" and xi(t) = xi.
double replacement_component_density(const TwoTypeParams& params, double x, double t, int k,
                                     double xi);

// The same density as two pieces (upper region first), with piece masses
// P(k replacements) * P(last replacement has type i | k).
std::array<DensityPiece, 2> replacement_component_pieces(const TwoTypeParams& params, double x,
                                                         double t, int k);

// Density of the last replacement epoch t_k given k replacements in (0,t).
double last_replacement_time_density(int k, double t, double tk);

}  // namespace starfv::twotype
