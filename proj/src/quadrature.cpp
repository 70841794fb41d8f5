#include "starfv/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "starfv/errors.hpp"

namespace starfv {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr int kPanelDepth = 12;
constexpr double kPanelRelTol = 1e-13;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct PanelResult {
  double value;
  double error;
};

// One 15-point Kronrod panel with the QUADPACK error heuristic, which is far
// less pessimistic than |K - G| for smooth integrands.
template <class G>
PanelResult kronrod_panel(G& g, double lo, double hi) {
  double raw_err = 0.0;
  double l1 = 0.0;
  const double v = Kronrod::integrate(g, lo, hi, 0, 0.0, &raw_err, &l1);
  const double half = 0.5 * (hi - lo);
  double err = raw_err * half;  // Boost reports this on the [-1,1] scale
  if (l1 > 0.0 && err > 0.0) err = l1 * std::min(1.0, std::pow(200.0 * err / l1, 1.5));
  err = std::max(err, 50.0 * kEps * l1);
  return {v, err};
}

template <class G>
PanelResult adaptive_panel(G& g, double lo, double hi, double abs_tol, int depth) {
  const PanelResult whole = kronrod_panel(g, lo, hi);
  if (!std::isfinite(whole.value)) return whole;
  if (whole.error <= std::max(abs_tol, kPanelRelTol * std::abs(whole.value)) || depth == 0) {
    return whole;
  }
  const double mid = 0.5 * (lo + hi);
  const PanelResult a = adaptive_panel(g, lo, mid, 0.5 * abs_tol, depth - 1);
  const PanelResult b = adaptive_panel(g, mid, hi, 0.5 * abs_tol, depth - 1);
  return {a.value + b.value, a.error + b.error};
}

struct LadderResult {
  double value = 0.0;
  double error = 0.0;
  int rungs = 0;
};

// Integrates g(d) for d in (0, width], d being the distance from the endpoint
// the ladder converges to. Rung k covers (width 2^{-k-1}, width 2^{-k}].
template <class G>
LadderResult ladder(G&& g, double width, double target, int max_rungs) {
  LadderResult out;
  double prev_mag = -1.0;
  double prev_ratio = -1.0;
  int zero_run = 0;
  double hi = width;
  for (int k = 0; k < max_rungs; ++k) {
    const double lo = 0.5 * hi;
    const auto [v, err] = adaptive_panel(g, lo, hi, 0.01 * target, kPanelDepth);
    if (!std::isfinite(v)) {
      throw QuadratureFailure("non-finite integrand on quadrature panel", out.value, INFINITY);
    }
    out.value += v;
    out.error += err;
    out.rungs = k + 1;
    const double mag = std::abs(v);

    if (mag == 0.0) {
      if (++zero_run >= 3) return out;
    } else {
      zero_run = 0;
    }

    if (k >= 3 && prev_mag > 0.0 && mag > 0.0) {
      const double ratio = mag / prev_mag;
      if (ratio < 0.999) {
        // Remainder on (0, lo] if the rungs keep shrinking geometrically.
        const double tail = v * ratio / (1.0 - ratio);
        const double drift = prev_ratio > 0.0 ? std::abs(ratio - prev_ratio) : 1.0;
        const double tail_err = std::abs(tail) * std::min(1.0, 10.0 * drift / (1.0 - ratio));
        if (tail_err < 0.1 * target && std::abs(tail) < 1e3 * target) {
          out.value += tail;
          out.error += tail_err;
          return out;
        }
      }
      prev_ratio = ratio;
    }
    prev_mag = mag;
    hi = lo;
    if (hi < 1e-300) break;
  }
  // Out of rungs: report the remainder as unresolved error.
  out.error += std::abs(out.value) > 0.0 ? prev_mag : 0.0;
  return out;
}

}  // namespace

QuadResult quad_offset(const OffsetIntegrand& f, double lo, double hi, const QuadSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0)) {
    throw InvalidArgument("quadrature tolerances must be positive");
  }
  if (spec.max_subdivisions < 2) throw InvalidArgument("max_subdivisions must be at least 2");
  if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidArgument("quadrature interval must be finite with lo <= hi");
  }
  if (hi == lo) return {0.0, 0.0};

  const double length = hi - lo;
  const double half = 0.5 * length;
  const int rungs_each = spec.max_subdivisions / 2;

  // Pilot pass on a coarse target so the relative tolerance has a scale.
  auto left = [&](double d) { return f(lo + d, d, length - d); };
  auto right = [&](double d) { return f(hi - d, length - d, d); };
  double pilot = kronrod_panel(left, 0.0, half).value + kronrod_panel(right, 0.0, half).value;
  if (!std::isfinite(pilot)) pilot = 0.0;
  double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(pilot));

  const LadderResult a = ladder(left, half, 0.5 * target, rungs_each);
  const LadderResult b = ladder(right, half, 0.5 * target, rungs_each);
  QuadResult r{a.value + b.value, a.error + b.error};
  target = std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value));
  if (!(r.error <= target) || !std::isfinite(r.value)) {
    throw QuadratureFailure("quadrature did not reach tolerance", r.value, r.error);
  }
  return r;
}

QuadResult quad(const std::function<double(double)>& f, double lo, double hi,
                const QuadSpec& spec) {
  return quad_offset([&f](double x, double, double) { return f(x); }, lo, hi, spec);
}

}  // namespace starfv
