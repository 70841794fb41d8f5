#pragma once

#include <functional>

namespace starfv {

struct QuadSpec {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  // Cap on the total number of ladder rungs across both endpoints.
  int max_subdivisions = 4000;
};

struct QuadResult {
  double value;
  double error;
};

// Integrand that also receives the exact distances to both interval ends,
// f(x, x - lo, hi - x). Densities with a power-law singularity at an endpoint
// that is not 0 or 1 need the offset: x itself cannot resolve it.
using OffsetIntegrand = std::function<double(double x, double from_lo, double from_hi)>;

// Adaptive integral over [lo, hi]. Each half of the interval is covered by a
// geometric ladder of Gauss-Kronrod panels shrinking toward its endpoint, so
// integrable endpoint singularities of type (x-a)^{alpha-1}, alpha > 0, are
// handled; the unresolved remainder next to the endpoint is extrapolated
// geometrically. Throws QuadratureFailure when the tolerance is not met.
QuadResult quad_offset(const OffsetIntegrand& f, double lo, double hi, const QuadSpec& spec = {});

QuadResult quad(const std::function<double(double)>& f, double lo, double hi,
                const QuadSpec& spec = {});

}  // namespace starfv
