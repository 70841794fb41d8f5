#pragma once

#include <limits>
#include <vector>

#include "starfv/core.hpp"
#include "starfv/montecarlo.hpp"

// Number of non-mutant ancestral lines A_n(t) in the star-shaped coalescent
// with mutation. From state i > 1 a line mutates at rate i theta/2 (i -> i-1)
// and all lines coalesce at rate 1 (i -> 1); the last line is lost to
// mutation at rate theta/2.
namespace starfv::lines {

struct LineDist {
  int n;
  double t;
  std::vector<double> prob;  // prob[j] = P(A_n(t) = j), j = 0..n
};

LineDist an_distribution(int n, double theta, double t);

enum class LimitState { Zero, One, TwoOrMore };

// n -> infinity limit of P(A_n(t) = 0), P(A_n(t) = 1) or P(A_n(t) >= 2).
double an_limit(double theta, double t, LimitState state);

struct SpectralCoeffs {
  int n;
  double theta;
  std::vector<long double> eigenvalues;        // lambda_0..lambda_n
  std::vector<long double> q;                  // Q_n^{(k)}, k = 0..n
  std::vector<std::vector<long double>> pmat;  // pmat[k][j] = P_j^{(k)}
};

SpectralCoeffs spectral_coeffs(int n, double theta);

// sum_k e^{-lambda_k t} Q_n^{(k)} P_j^{(k)}. The alternating sums lose
// roughly log10 C(n, n/2) digits, so this is intended for moderate n.
LineDist an_distribution_spectral(int n, double theta, double t);
LineDist an_distribution_spectral(const SpectralCoeffs& coeffs, double t);

// Mean time until no non-mutant line remains.
double mean_absorption_time(int n, double theta);

struct LineEvent {
  double time;
  int state;  // number of non-mutant lines just after the event
  bool coalescence;
};

struct LinesPath {
  int n;
  double horizon;
  std::vector<LineEvent> events;
  // Time the chain first has a single line, by coalescence or by mutation
  // (0 when n = 1). Infinite if not reached before the horizon.
  double single_line_time = std::numeric_limits<double>::infinity();
  bool coalesced = false;
  double coalescence_time = std::numeric_limits<double>::infinity();
  // Lines present just before the coalescence; 1 when the single-line state
  // was reached by mutation or n = 1.
  int lines_at_merge = 1;
  double absorption_time = std::numeric_limits<double>::infinity();

  int state_at(double t) const;
};

// Runs the chain from state n until absorption, or until the horizon.
LinesPath simulate_lines(int n, double theta, RngStream& rng,
                         double horizon = std::numeric_limits<double>::infinity());

// Empirical P(A_n(t) = j), one estimate per j.
std::vector<Estimate> empirical_line_dist(int n, double theta, double t, std::size_t n_mc,
                                          const RngStream& rng);

Estimate empirical_absorption_time(int n, double theta, std::size_t n_mc, const RngStream& rng);

struct DualityResult {
  double lhs;
  double rhs;
  double rhs_se;
};

// E_x[xi(t)^n] in closed form against the coalescent expectation
//   x^A p^{n-A}              if the single-line state is not reached by t,
//   x p^{n-M}                if one line is left at t,
//   p^{n+1-M}                if no line is left at t,
// with A = A_n(t) and M the number of lines at the merge.
DualityResult duality_check(const TwoTypeParams& params, int n, double x, double t,
                            std::size_t n_mc, const RngStream& rng);

// Estimate of p^{n+1} E[(1/p)^M] from runs to the single-line state.
Estimate stationary_moment_via_coalescent(const TwoTypeParams& params, int n, std::size_t n_mc,
                                          const RngStream& rng);

}  // namespace starfv::lines
