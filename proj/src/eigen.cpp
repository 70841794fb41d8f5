#include "starfv/eigen.hpp"

#include <cmath>

#include "starfv/twotype.hpp"

namespace starfv::eigen {

PolyRep::PolyRep(double shift, std::vector<double> coeffs)
    : shift_(shift), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  if (!std::isfinite(shift_)) throw InvalidArgument("PolyRep: non-finite shift");
}

PolyRep PolyRep::from_power_basis(double shift, const std::vector<double>& power_coeffs) {
  return PolyRep(0.0, power_coeffs).with_shift(shift);
}

double PolyRep::coeff(int k) const {
  if (k < 0 || k > degree()) return 0.0;
  return coeffs_[static_cast<std::size_t>(k)];
}

double PolyRep::operator()(double x) const {
  const double y = x - shift_;
  double v = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * y + *it;
  return v;
}

PolyRep PolyRep::with_shift(double new_shift) const {
  if (new_shift == shift_) return *this;
  // (x - s)^k = sum_j C(k,j) (x - s')^j (s' - s)^{k-j}
  const double d = new_shift - shift_;
  std::vector<double> out(coeffs_.size(), 0.0);
  for (int k = 0; k <= degree(); ++k) {
    for (int j = 0; j <= k; ++j) {
      out[static_cast<std::size_t>(j)] += coeffs_[static_cast<std::size_t>(k)] * binomial(k, j) *
                                          std::pow(d, k - j);
    }
  }
  return PolyRep(new_shift, std::move(out));
}

double eigenvalue(const TwoTypeParams& params, int n) {
  if (n < 0) throw InvalidArgument("eigenvalue index must be non-negative");
  if (n == 0) return 0.0;
  if (n == 1) return 0.5 * params.theta();
  return 1.0 + 0.5 * n * params.theta();
}

double c_n0(const TwoTypeParams& params, int n) {
  if (n < 2) throw InvalidArgument("c_n0 is defined for n >= 2");
  const double p = params.p();
  const double a = params.alpha();
  return -a / (n + a) * (p * std::pow(1.0 - p, n) + (1.0 - p) * std::pow(-p, n));
}

double c_n1(const TwoTypeParams& params, int n) {
  if (n < 2) throw InvalidArgument("c_n1 is defined for n >= 2");
  const double p = params.p();
  const double a = params.alpha();
  return a / (n - 1 + a) * (std::pow(-p, n) - std::pow(1.0 - p, n));
}

PolyRep eigen_poly(const TwoTypeParams& params, int n) {
  if (n < 1) throw InvalidArgument("eigenpolynomials are indexed from n = 1");
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  if (n >= 2) {
    c[0] = c_n0(params, n);
    c[1] = c_n1(params, n);
  }
  return PolyRep(params.p(), std::move(c));
}

PolyRep generator_apply(const TwoTypeParams& params, const PolyRep& g_in) {
  const double p = params.p();
  const PolyRep g = g_in.with_shift(p);
  const double half_theta = 0.5 * params.theta();
  const double g1 = g(1.0);
  const double g0 = g(0.0);
  // With y = x - p:
  //   x g(1) + (1-x) g(0) - g = y (g(1) - g(0)) + p g(1) + (1-p) g(0) - g(y)
  //   (theta/2)(p - x) g'    = -(theta/2) sum_k k a_k y^k
  std::vector<double> out(std::max<std::size_t>(g.coeffs().size(), 2), 0.0);
  for (int k = 0; k <= g.degree(); ++k) {
    out[static_cast<std::size_t>(k)] = -(1.0 + half_theta * k) * g.coeff(k);
  }
  out[0] += p * g1 + (1.0 - p) * g0;
  out[1] += g1 - g0;
  return PolyRep(p, std::move(out));
}

double q1_eval(const TwoTypeParams& params, double xi) {
  const double p = params.p();
  if (xi == p) throw SingularityError("Q1 is singular at xi = p");
  if (xi > p) return (1.0 / p) * (1.0 - p) / (xi - p);
  return -(1.0 / (1.0 - p)) * p / (p - xi);
}

double pv_expectation_g_q1(const TwoTypeParams& params, const PolyRep& g_in) {
  const PolyRep g = g_in.with_shift(params.p());
  double v = g.coeff(1);
  for (int n = 2; n <= g.degree(); ++n) v -= g.coeff(n) * c_n1(params, n);
  return v;
}

double stationary_expectation(const TwoTypeParams& params, const PolyRep& g_in) {
  const PolyRep g = g_in.with_shift(params.p());
  double v = g.coeff(0);
  for (int n = 2; n <= g.degree(); ++n) v -= g.coeff(n) * c_n0(params, n);
  return v;
}

double hyper_pairing(const PolyRep& g, int n) {
  if (n < 2) throw InvalidArgument("hyperfunction pairing is defined for n >= 2");
  return g.coeff(n);
}

double expansion_expectation(const TwoTypeParams& params, const PolyRep& g_in, double x, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
  const PolyRep g = g_in.with_shift(params.p());
  double v = stationary_expectation(params, g);
  v += std::exp(-eigenvalue(params, 1) * t) * pv_expectation_g_q1(params, g) * (x - params.p());
  for (int n = 2; n <= g.degree(); ++n) {
    const double a = hyper_pairing(g, n);
    if (a == 0.0) continue;
    v += std::exp(-eigenvalue(params, n) * t) * a * eigen_poly(params, n)(x);
  }
  return v;
}

EigenSystem eigen_system(const TwoTypeParams& params, int max_degree) {
  if (max_degree < 1) throw InvalidArgument("eigen_system needs max_degree >= 1");
  EigenSystem sys;
  for (int n = 0; n <= max_degree; ++n) sys.eigenvalues.push_back(eigenvalue(params, n));
  for (int n = 1; n <= max_degree; ++n) sys.polys.push_back(eigen_poly(params, n));
  return sys;
}

}  // namespace starfv::eigen
