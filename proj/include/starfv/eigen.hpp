#pragma once

#include <vector>

#include "starfv/core.hpp"

// Eigenstructure of the two-type generator
//   L g(x) = x (g(1) - g(x)) + (1 - x)(g(0) - g(x)) + (theta/2)(p - x) g'(x).
// Right eigenfunctions are the monic polynomials P_n. Left eigenfunctions
// are only used through their action on polynomial test functions.
namespace starfv::eigen {

// Polynomial sum_k a_k (x - shift)^k.
class PolyRep {
 public:
  PolyRep(double shift, std::vector<double> coeffs);

  // From ordinary power-basis coefficients b_k of sum_k b_k x^k.
  static PolyRep from_power_basis(double shift, const std::vector<double>& power_coeffs);

  double shift() const noexcept { return shift_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  // a_k, zero beyond the degree. Equals g^{(k)}(shift)/k!.
  double coeff(int k) const;

  double operator()(double x) const;
  // Same polynomial expanded about another point.
  PolyRep with_shift(double new_shift) const;

 private:
  double shift_;
  std::vector<double> coeffs_;
};

// lambda_0 = 0, lambda_1 = theta/2, lambda_n = 1 + n theta/2 for n >= 2.
double eigenvalue(const TwoTypeParams& params, int n);

// Constant and linear coefficients of P_n (n >= 2) in powers of (x - p).
double c_n0(const TwoTypeParams& params, int n);
double c_n1(const TwoTypeParams& params, int n);

// Monic right eigenpolynomial P_n, n >= 1.
PolyRep eigen_poly(const TwoTypeParams& params, int n);

// Exact image L g, in powers of (x - p).
PolyRep generator_apply(const TwoTypeParams& params, const PolyRep& g);

// Left eigenfunction Q_1; singular at xi = p.
double q1_eval(const TwoTypeParams& params, double xi);

// E[g(xi) Q_1(xi)] under the stationary law, as a Cauchy principal value:
// g'(p) - sum_{n>=2} a_n c_{n1}.
double pv_expectation_g_q1(const TwoTypeParams& params, const PolyRep& g);

// E[g(xi)] under the stationary law: g(p) - sum_{n>=2} a_n c_{n0}.
double stationary_expectation(const TwoTypeParams& params, const PolyRep& g);

// <g, Q~_n> = g^{(n)}(p)/n! for n >= 2, the hyperfunction pairing, with p
// taken as the expansion point of g.
double hyper_pairing(const PolyRep& g, int n);

// E_x[g(xi(t))] from the finite eigen-expansion.
double expansion_expectation(const TwoTypeParams& params, const PolyRep& g, double x, double t);

struct EigenSystem {
  std::vector<double> eigenvalues;  // lambda_0 .. lambda_N
  std::vector<PolyRep> polys;       // P_1 .. P_N
};

EigenSystem eigen_system(const TwoTypeParams& params, int max_degree);

}  // namespace starfv::eigen
