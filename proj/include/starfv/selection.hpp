#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "starfv/core.hpp"
#include "starfv/mixed_law.hpp"
#include "starfv/montecarlo.hpp"
#include "starfv/twotype.hpp"

// Two-type star-shaped process whose frequency follows dchi/dt = v(chi)
// between total replacements, and the lineage-counting dual of the pure
// selection model.
namespace starfv::selection {

class DriftSpec {
 public:
  enum class Kind { Neutral, Logistic, MutationSelection, Custom };

  // v(x) = (theta/2)(p - x)
  static DriftSpec neutral(double theta, double p);
  // v(x) = (beta/2) x (1 - x), beta > 0
  static DriftSpec logistic(double beta);
  // v(x) = (theta p - theta x)/2 + beta x (1 - x)/2, beta > 0
  static DriftSpec mutation_selection(double theta, double p, double beta);
  // Arbitrary drift with a Lipschitz bound used to cap the integrator step.
  static DriftSpec custom(std::function<double(double)> v, double lipschitz);
  // v(x) = sum_k coeffs[k] x^k.
  static DriftSpec custom_polynomial(std::vector<double> coeffs);

  Kind kind() const noexcept { return kind_; }
  double theta() const noexcept { return theta_; }
  double p() const noexcept { return p_; }
  double beta() const noexcept { return beta_; }
  double lipschitz() const noexcept { return lipschitz_; }
  double v(double x) const;

 private:
  DriftSpec() = default;

  Kind kind_ = Kind::Neutral;
  double theta_ = 0.0;
  double p_ = 0.0;
  double beta_ = 0.0;
  double lipschitz_ = 0.0;
  std::function<double(double)> custom_;
};

// Drift of 1 - xi: v'(y) = -v(1 - y). Negative selection is handled by
// swapping types and using beta > 0.
DriftSpec swap_types(const DriftSpec& drift);

// chi(t) from chi(0) = chi0. Custom drifts are integrated with an adaptive
// Dormand-Prince scheme and raise DomainEscape if the path leaves [0,1].
double flow(const DriftSpec& drift, double chi0, double t);

// Roots r1 in (0,1) and r2 < 0 of chi(1 - chi) + phi(p - chi) with phi = theta/beta.
struct RootPair {
  double r1;
  double r2;

  double a() const noexcept { return 0.5 * (r1 - r2); }
  double b() const noexcept { return (1.0 - r1) / (1.0 - r2); }
  double c() const noexcept { return -r1 / r2; }
};

RootPair roots(double theta, double beta, double p);

// mu(t), nu(t): the mutation-selection flow from 1 and from 0.
struct MuNu {
  double mu;
  double nu;
};

MuNu mu_nu(double theta, double p, double beta, double t);

// E[mu(T)] and E[nu(T)] for T ~ Exp(1).
struct SkeletonEntries {
  double p11;
  double p21;
};

// Series in b and in c/(1+c); each sum needs its argument below 1.
SkeletonEntries skeleton_series(double theta, double p, double beta);
// Direct quadrature of E[mu(T)] and E[nu(T)].
SkeletonEntries skeleton_quadrature(double theta, double p, double beta);

// Skeleton chain of replacement types, rows and columns ordered (type 1, type 2).
Eigen::Matrix2d skeleton_matrix(const DriftSpec& drift);

struct ReplacementStationary {
  double pi1;
  double pi2;
};

ReplacementStationary replacement_stationary(const DriftSpec& drift);

// Stationary density of the frequency; zero outside both branch supports.
double stationary_density(const DriftSpec& drift, double xi);
MixedLaw stationary_law(const DriftSpec& drift);
double stationary_sample(const DriftSpec& drift, RngStream& rng);

// Fixation probability of `type` (1 or 2) under pure logistic selection
// (v = (beta/2) x (1 - x)), from initial frequency x of that type.
double fixation_prob(double beta, double x, int type);

// Forward replacement path with drift between replacements.
twotype::PathRecord simulate_path(const DriftSpec& drift, double x, double horizon,
                                  RngStream& rng);

struct AsgEvent {
  double time;
  int state;
};

struct AsgPath {
  int n;
  double horizon;
  std::vector<AsgEvent> events;
  // First time at a single lineage.
  double t_ua = std::numeric_limits<double>::infinity();

  int state_at(double t) const;
};

inline constexpr int kAsgLineageCap = 10'000'000;

// Lineage-counting process B_n: branching at rate i beta/2, collapse to one
// lineage at rate 1. Without a horizon the run stops at the ultimate
// ancestor; with a horizon it continues past it (from one lineage only
// branching happens).
AsgPath asg_simulate(int n, double beta, RngStream& rng,
                     double horizon = std::numeric_limits<double>::infinity());

// Stationary law of B: pi_i = (2/beta)(i-1)!/(2/beta + 1)_(i).
double asg_stationary(double beta, int i);

struct SelectionDuality {
  double lhs;
  double lhs_se;
  double rhs;
  double rhs_se;
};

// E_x[xi(t)^n] under drift -(beta/2) x (1 - x) against E[x^{B_n(t)}], both
// by simulation.
SelectionDuality selection_duality_check(int n, double x, double t, double beta,
                                         std::size_t n_mc, const RngStream& rng);

}  // namespace starfv::selection
