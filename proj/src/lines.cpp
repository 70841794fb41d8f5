#include "starfv/lines.hpp"

#include <algorithm>
#include <cmath>

#include "starfv/twotype.hpp"

namespace starfv::lines {

namespace {

void check_args(int n, double theta, double t) {
  if (n < 1) throw InvalidArgument("sample size n must be at least 1");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidArgument("theta must be positive");
  if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
}

// C(n,j) p^j q^{n-j}, with q passed separately to keep 1 - p exact.
double binomial_pmf(int n, int j, double p, double q) {
  if (p == 0.0) return j == 0 ? std::pow(q, n) : 0.0;
  if (q == 0.0) return j == n ? std::pow(p, n) : 0.0;
  if (n <= 60) return binomial(n, j) * std::pow(p, j) * std::pow(q, n - j);
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                  j * std::log(p) + (n - j) * std::log(q));
}

}  // namespace

LineDist an_distribution(int n, double theta, double t) {
  check_args(n, theta, t);
  LineDist d{n, t, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0)};
  if (t == 0.0) {
    d.prob[static_cast<std::size_t>(n)] = 1.0;
    return d;
  }
  if (std::isinf(t)) {
    d.prob[0] = 1.0;
    return d;
  }
  const double h = 0.5 * theta;
  const double pt = std::exp(-h * t);
  const double ut = -std::expm1(-h * t);
  const double et = std::exp(-t);

  for (int j = 2; j <= n; ++j) d.prob[static_cast<std::size_t>(j)] = binomial_pmf(n, j, pt, ut) * et;

  // J_m = int_0^t (1 - p(s))^m e^{-s} ds, by integration by parts:
  // (1 + m h) J_m = m h J_{m-1} - u_t^m e^{-t}.
  double jm = -std::expm1(-t);
  double sum_j = jm;
  double um = 1.0;
  for (int m = 1; m < n; ++m) {
    um *= ut;
    jm = std::max(0.0, (m * h * jm - um * et) / (1.0 + m * h));
    sum_j += jm;
  }
  const double no_merge_one = binomial_pmf(n, 1, pt, ut) * et;
  const double no_merge_any = -std::expm1(n * std::log1p(-pt)) * et;  // (1 - u_t^n) e^{-t}
  d.prob[1] = no_merge_one + pt * sum_j;
  d.prob[0] = std::max(0.0, 1.0 - no_merge_any - pt * sum_j);
  if (ut == 0.0) d.prob[0] = 0.0;
  return d;
}

double an_limit(double theta, double t, LimitState state) {
  if (!(theta > 0.0)) throw InvalidArgument("theta must be positive");
  if (!(t > 0.0)) throw InvalidArgument("an_limit needs t > 0");
  const double b = 1.0 - 0.5 * theta;
  // (e^{-theta t/2} - e^{-t})/(1 - theta/2) = e^{-t} (e^{bt} - 1)/b
  const double one = std::abs(b) < 1e-8 ? t * std::exp(-t) : std::exp(-t) * std::expm1(b * t) / b;
  switch (state) {
    case LimitState::One:
      return one;
    case LimitState::Zero:
      return 1.0 - one - std::exp(-t);
    case LimitState::TwoOrMore:
      return std::exp(-t);
  }
  return 0.0;
}

SpectralCoeffs spectral_coeffs(int n, double theta) {
  check_args(n, theta, 0.0);
  using ld = long double;
  const ld h = static_cast<ld>(theta) / 2;
  const auto nn = static_cast<std::size_t>(n);
  SpectralCoeffs c{n, theta, std::vector<ld>(nn + 1), std::vector<ld>(nn + 1, 0.0L),
                   std::vector<std::vector<ld>>(nn + 1, std::vector<ld>(nn + 1, 0.0L))};
  auto choose = [](int a, int b) -> ld {
    if (b < 0 || b > a) return 0.0L;
    ld v = 1.0L;
    for (int i = 1; i <= b; ++i) v = v * static_cast<ld>(a - b + i) / static_cast<ld>(i);
    return v;
  };
  c.eigenvalues[0] = 0.0L;
  c.eigenvalues[1] = h;
  for (int k = 2; k <= n; ++k) c.eigenvalues[static_cast<std::size_t>(k)] = 1.0L + k * h;

  c.q[0] = 1.0L;
  ld q1 = 0.0L;
  for (int i = 1; i <= n; ++i) {
    q1 += choose(n, i) * ((i - 1) % 2 == 0 ? 1.0L : -1.0L) / (1.0L + (i - 1) * h);
  }
  c.q[1] = q1;
  for (int k = 2; k <= n; ++k) {
    const ld sign = (k - 1) % 2 == 0 ? 1.0L : -1.0L;
    c.q[static_cast<std::size_t>(k)] =
        choose(n, k) * sign * (k - 1) * (1.0L + k * h) / (1.0L + (k - 1) * h);
  }

  c.pmat[0][0] = 1.0L;
  c.pmat[1][0] = -1.0L;
  for (int k = 1; k <= n; ++k) c.pmat[static_cast<std::size_t>(k)][1] = 1.0L;
  for (int k = 2; k <= n; ++k) {
    auto& row = c.pmat[static_cast<std::size_t>(k)];
    row[0] = -h / (1.0L + k * h);
    for (int j = 2; j <= k; ++j) {
      const ld sign = (j - 1) % 2 == 0 ? 1.0L : -1.0L;
      row[static_cast<std::size_t>(j)] =
          choose(k, j) * sign * (1.0L + (k - 1) * h) / ((k - 1) * (1.0L + k * h));
    }
  }
  return c;
}

LineDist an_distribution_spectral(const SpectralCoeffs& c, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
  const auto nn = static_cast<std::size_t>(c.n);
  if (t == 0.0) {
    // The sum collapses to the identity only up to rounding.
    LineDist d{c.n, t, std::vector<double>(nn + 1, 0.0)};
    d.prob[nn] = 1.0;
    return d;
  }
  std::vector<long double> w(nn + 1);
  for (std::size_t k = 0; k <= nn; ++k) {
    w[k] = std::isinf(t) ? (k == 0 ? 1.0L : 0.0L)
                         : std::exp(-c.eigenvalues[k] * static_cast<long double>(t)) * c.q[k];
  }
  LineDist d{c.n, t, std::vector<double>(nn + 1, 0.0)};
  for (std::size_t j = 0; j <= nn; ++j) {
    long double s = 0.0L;
    for (std::size_t k = 0; k <= nn; ++k) s += w[k] * c.pmat[k][j];
    d.prob[j] = static_cast<double>(s);
  }
  return d;
}

LineDist an_distribution_spectral(int n, double theta, double t) {
  return an_distribution_spectral(spectral_coeffs(n, theta), t);
}

double mean_absorption_time(int n, double theta) {
  check_args(n, theta, 0.0);
  const double a = 2.0 / theta;
  // d_i = 1 - prod_{k<=i} k/(k+a), accumulated without the final cancellation.
  double d = 0.0;
  for (int i = 1; i <= n; ++i) d += (1.0 - d) * (a / (i + a));
  return (1.0 + a) * d;
}

int LinesPath::state_at(double t) const {
  int state = n;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    state = ev.state;
  }
  return state;
}

LinesPath simulate_lines(int n, double theta, RngStream& rng, double horizon) {
  check_args(n, theta, 0.0);
  if (!(horizon > 0.0)) throw InvalidArgument("simulate_lines: horizon must be positive");
  const double h = 0.5 * theta;
  LinesPath path;
  path.n = n;
  path.horizon = horizon;
  if (n == 1) path.single_line_time = 0.0;
  int state = n;
  double now = 0.0;
  while (state > 0) {
    const double rate = state == 1 ? h : 1.0 + state * h;
    const double next = now + rng.exponential(rate);
    if (next > horizon) break;
    now = next;
    if (state == 1) {
      state = 0;
      path.absorption_time = now;
      path.events.push_back({now, 0, false});
      break;
    }
    const bool mutation = rng.uniform() * rate < state * h;
    if (mutation) {
      --state;
    } else {
      path.coalesced = true;
      path.coalescence_time = now;
      path.lines_at_merge = state;
      state = 1;
    }
    if (state == 1) path.single_line_time = now;
    path.events.push_back({now, state, !mutation});
  }
  return path;
}

std::vector<Estimate> empirical_line_dist(int n, double theta, double t, std::size_t n_mc,
                                          const RngStream& rng) {
  check_args(n, theta, t);
  const auto dim = static_cast<std::size_t>(n) + 1;
  return mc_estimate(n_mc, rng, dim, [&](RngStream& r, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (t == 0.0) {
      out[static_cast<std::size_t>(n)] = 1.0;
      return;
    }
    const LinesPath path = simulate_lines(n, theta, r, t);
    out[static_cast<std::size_t>(path.state_at(t))] = 1.0;
  });
}

Estimate empirical_absorption_time(int n, double theta, std::size_t n_mc, const RngStream& rng) {
  check_args(n, theta, 0.0);
  return mc_mean(n_mc, rng,
                 [&](RngStream& r) { return simulate_lines(n, theta, r).absorption_time; });
}

DualityResult duality_check(const TwoTypeParams& params, int n, double x, double t,
                            std::size_t n_mc, const RngStream& rng) {
  check_args(n, params.theta(), t);
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("x must lie in [0,1]");
  const double p = params.p();
  const double lhs = twotype::transition_raw_moment(params, n, x, t);
  const Estimate rhs = mc_mean(n_mc, rng, [&](RngStream& r) {
    if (t == 0.0) return std::pow(x, n);
    const LinesPath path = simulate_lines(n, params.theta(), r, t);
    const int a = path.state_at(t);
    if (path.single_line_time > t) return std::pow(x, a) * std::pow(p, n - a);
    const int m = path.lines_at_merge;
    if (a == 1) return x * std::pow(p, n - m);
    return std::pow(p, n + 1 - m);
  });
  return {lhs, rhs.value, rhs.se};
}

Estimate stationary_moment_via_coalescent(const TwoTypeParams& params, int n, std::size_t n_mc,
                                          const RngStream& rng) {
  check_args(n, params.theta(), 0.0);
  const double p = params.p();
  return mc_mean(n_mc, rng, [&](RngStream& r) {
    // Only the jump chain up to the single-line state matters here.
    const double h = 0.5 * params.theta();
    int state = n;
    int merge = 1;
    while (state > 1) {
      const double rate = 1.0 + state * h;
      if (r.uniform() * rate < state * h) {
        --state;
      } else {
        merge = state;
        state = 1;
      }
    }
    return std::pow(p, n + 1 - merge);
  });
}

}  // namespace starfv::lines
