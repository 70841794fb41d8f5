#include "starfv/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace starfv {

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double RunningStats::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

Estimate RunningStats::estimate() const {
  return {mean_, n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0, n_};
}

namespace {

std::size_t shard_size(std::size_t n, std::size_t s) {
  return n / kEnsembleShards + (s < n % kEnsembleShards ? 1 : 0);
}

template <class Work>
void run_shards(Work&& work) {
  const unsigned hw = std::thread::hardware_concurrency();
  if (hw <= 1) {
    for (std::size_t s = 0; s < kEnsembleShards; ++s) work(s);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t workers = std::min<std::size_t>(hw, kEnsembleShards);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&work, w, workers] {
      for (std::size_t s = w; s < kEnsembleShards; s += workers) work(s);
    });
  }
}

}  // namespace

std::vector<Estimate> mc_estimate(std::size_t n, const RngStream& base, std::size_t dim,
                                  const VectorDraw& draw) {
  std::vector<std::vector<RunningStats>> shards(kEnsembleShards,
                                                std::vector<RunningStats>(dim));
  run_shards([&](std::size_t s) {
    RngStream rng = base.substream(s);
    std::vector<double> buf(dim);
    auto& stats = shards[s];
    for (std::size_t i = 0, m = shard_size(n, s); i < m; ++i) {
      draw(rng, buf);
      for (std::size_t d = 0; d < dim; ++d) stats[d].add(buf[d]);
    }
  });
  std::vector<Estimate> out(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    RunningStats total;
    for (const auto& shard : shards) total.merge(shard[d]);
    out[d] = total.estimate();
  }
  return out;
}

Estimate mc_mean(std::size_t n, const RngStream& base,
                 const std::function<double(RngStream&)>& draw) {
  return mc_estimate(n, base, 1, [&draw](RngStream& rng, std::span<double> out) {
    out[0] = draw(rng);
  })[0];
}

std::vector<double> mc_collect(std::size_t n, const RngStream& base,
                               const std::function<double(RngStream&)>& draw) {
  std::vector<std::vector<double>> shards(kEnsembleShards);
  run_shards([&](std::size_t s) {
    RngStream rng = base.substream(s);
    const std::size_t m = shard_size(n, s);
    shards[s].reserve(m);
    for (std::size_t i = 0; i < m; ++i) shards[s].push_back(draw(rng));
  });
  std::vector<double> out;
  out.reserve(n);
  for (const auto& sh : shards) out.insert(out.end(), sh.begin(), sh.end());
  return out;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double sqrt_n = std::sqrt(n);
  // Stephens' small-sample correction to the asymptotic distribution.
  return {d, kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)};
}

KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace starfv
