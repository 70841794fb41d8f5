#include "starfv/core.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace starfv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t base_seed, std::uint64_t stream_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                    static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(stream_index),
                    static_cast<std::uint32_t>(stream_index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

TwoTypeParams::TwoTypeParams(double theta, double p) : theta_(theta), p_(p) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw InvalidArgument("theta must be positive and finite, got " + std::to_string(theta));
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument("p must lie strictly inside (0,1), got " + std::to_string(p));
  }
}

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t stream_index)
    : base_seed_(base_seed),
      stream_index_(stream_index),
      engine_(seeded_engine(base_seed, stream_index)) {}

double RngStream::uniform() {
  // Midpoint of one of 2^53 equal cells, so 0 and 1 are never returned.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double rate) { return -std::log(uniform()) / rate; }

std::size_t RngStream::discrete(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("discrete: empty weight vector");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw InvalidArgument("discrete: weights must have positive sum");
  double u = uniform() * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Skip trailing zero weights that rounding could otherwise land on.
  std::size_t last = weights.size() - 1;
  while (last > 0 && weights[last] <= 0.0) --last;
  return last;
}

RngStream RngStream::substream(std::uint64_t k) const {
  return RngStream(base_seed_, splitmix64(stream_index_ ^ splitmix64(k + 1)));
}

double sample_truncated_exponential(double t, RngStream& rng) {
  if (!(t > 0.0)) throw InvalidArgument("truncated exponential needs t > 0");
  const double u = rng.uniform();
  // tau = -ln(1 - u(1 - e^{-t}))
  return -std::log1p(u * std::expm1(-t));
}

double one_minus_exp_over(double b, double s) {
  if (b == 0.0) return s;
  return -std::expm1(-b * s) / b;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  if (n <= 60) {
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
      c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return static_cast<double>(c);
  }
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

double rising_factorial(double a, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= a + i;
  return r;
}

double poisson_weight(double mean, int k) {
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

}  // namespace starfv
