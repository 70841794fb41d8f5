#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "starfv/errors.hpp"

namespace starfv {

// Two-type mutation parameters. theta is the total mutation rate (a line
// mutates at rate theta/2) and p = theta_1/theta is the probability that a
// mutation produces type 1. Boundary values p in {0,1} and theta = 0 are
// rejected; several closed forms degenerate there.
class TwoTypeParams {
 public:
  TwoTypeParams(double theta, double p);

  double theta() const noexcept { return theta_; }
  double p() const noexcept { return p_; }
  double theta1() const noexcept { return theta_ * p_; }
  double theta2() const noexcept { return theta_ * (1.0 - p_); }
  // 2/theta, the exponent that recurs in every stationary quantity.
  double alpha() const noexcept { return 2.0 / theta_; }

 private:
  double theta_;
  double p_;
};

// Deterministic random stream keyed by (base_seed, stream_index). Equal keys
// give identical sequences; distinct indices give independent sequences.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t stream_index);

  std::uint64_t base_seed() const noexcept { return base_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0,1), 53-bit resolution.
  double uniform();
  double exponential(double rate = 1.0);
  // Index drawn with probability proportional to weights (need not sum to 1).
  std::size_t discrete(std::span<const double> weights);

  // Child stream for sharded ensembles; child k of a given stream is fixed.
  RngStream substream(std::uint64_t k) const;

 private:
  std::uint64_t base_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

// tau with density e^{-tau}/(1-e^{-t}) on (0,t), by inverse CDF.
double sample_truncated_exponential(double t, RngStream& rng);

// (1 - e^{-b s})/b, continuous through b = 0 where it equals s.
double one_minus_exp_over(double b, double s);

// Binomial coefficient. Exact integer arithmetic while it fits, log-space
// beyond that.
double binomial(int n, int k);

// Rising factorial a(a+1)...(a+n-1).
double rising_factorial(double a, int n);

// Poisson(mean) probability of k events, evaluated in log-space.
double poisson_weight(double mean, int k);

}  // namespace starfv
