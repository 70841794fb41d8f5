#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "starfv/core.hpp"

namespace starfv {

// Monte Carlo estimate: value, standard error of the mean, sample count.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

// Welford accumulator with an exact pairwise merge.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const;
  Estimate estimate() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Number of RNG shards per ensemble. Fixed so results never depend on the
// hardware thread count.
inline constexpr std::size_t kEnsembleShards = 16;

using VectorDraw = std::function<void(RngStream&, std::span<double>)>;

// Estimates E[draw] component-wise from n draws. Draws are split into
// kEnsembleShards shards, shard s using base.substream(s); shards may run
// concurrently and are merged in shard order.
std::vector<Estimate> mc_estimate(std::size_t n, const RngStream& base, std::size_t dim,
                                  const VectorDraw& draw);

Estimate mc_mean(std::size_t n, const RngStream& base,
                 const std::function<double(RngStream&)>& draw);

// Collects n draws in a deterministic order (shard by shard).
std::vector<double> mc_collect(std::size_t n, const RngStream& base,
                               const std::function<double(RngStream&)>& draw);

struct KsResult {
  double statistic;
  double p_value;
};

// Asymptotic Kolmogorov survival function P(K > lambda).
double kolmogorov_survival(double lambda);

// One-sample Kolmogorov-Smirnov test against a continuous CDF.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov test.
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace starfv
