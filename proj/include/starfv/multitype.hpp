#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "starfv/core.hpp"
#include "starfv/mixed_law.hpp"

// d-type star-shaped process, with parent-independent mutation (a mutant
// takes type j with probability p_j) or general Markov mutation, and the
// infinitely-many-types sampling formula.
namespace starfv::multitype {

class MultiParams {
 public:
  MultiParams(double theta, std::vector<double> p_vec);

  double theta() const noexcept { return theta_; }
  int dim() const noexcept { return static_cast<int>(p_.size()); }
  const std::vector<double>& p_vec() const noexcept { return p_; }
  double p(int i) const { return p_.at(static_cast<std::size_t>(i)); }

 private:
  double theta_;
  std::vector<double> p_;
};

// Row-stochastic, irreducible type-change matrix.
class MutationMatrix {
 public:
  explicit MutationMatrix(Eigen::MatrixXd m);

  // Whitespace-separated rows, one per line; blank lines and '#' comments
  // are skipped.
  static MutationMatrix from_text(const std::string& text);
  static MutationMatrix load(const std::string& path);

  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

 private:
  Eigen::MatrixXd m_;
};

// True when every state reaches every other through positive entries.
bool is_irreducible(const Eigen::MatrixXd& m);

// p_ij(t) = delta_ij e^{-theta t/2} + (1 - e^{-theta t/2}) p_j.
Eigen::MatrixXd pim_line_kernel(const MultiParams& mp, double t);

// q_i(t; x) = x_i e^{-theta t/2} + (1 - e^{-theta t/2}) p_i.
Eigen::VectorXd pim_marginal_q(const MultiParams& mp, const Eigen::VectorXd& x, double t);

// Continuous part in region i: xi_i has a density on (p_i + (1-p_i)e^{-theta t/2}, 1)
// and xi_j = (1 - (xi_i - p_i)/(1 - p_i)) p_j for j != i.
struct SimplexRegion {
  int index;
  DensityPiece piece;
};

class SimplexLaw {
 public:
  SimplexLaw(std::vector<double> p_vec, Eigen::VectorXd atom, double atom_mass,
             std::vector<SimplexRegion> regions);

  const Eigen::VectorXd& atom() const noexcept { return atom_; }
  double atom_mass() const noexcept { return atom_mass_; }
  const std::vector<SimplexRegion>& regions() const noexcept { return regions_; }

  // Full point of the simplex pinned by xi_i in region i.
  Eigen::VectorXd point(int region, double xi_i) const;
  double stored_mass() const;
  Eigen::VectorXd sample(RngStream& rng) const;

 private:
  std::vector<double> p_;
  Eigen::VectorXd atom_;
  double atom_mass_;
  std::vector<SimplexRegion> regions_;
};

SimplexLaw pim_transition_law(const MultiParams& mp, const Eigen::VectorXd& x, double t);

// Density of xi_i in region i; zero outside the region. t = infinity gives
// the stationary region density.
double pim_region_density(const MultiParams& mp, const Eigen::VectorXd& x, double t, int i,
                          double xi_i);

Eigen::VectorXd pim_stationary_sample(const MultiParams& mp, RngStream& rng);

// exp{(theta/2)(P - I) t} by uniformization.
Eigen::MatrixXd markov_line_kernel(const MutationMatrix& m, double theta, double t);

// Stationary vector gamma of the mutation matrix.
Eigen::VectorXd markov_stationary_gamma(const MutationMatrix& m);

// Row i of P(tau), i ~ gamma, tau ~ Exp(1).
Eigen::VectorXd markov_stationary_sample(const MutationMatrix& m, double theta, RngStream& rng);

// C(n,j) E[eta^j (1-eta)^{n-j}] = (n!/j!) (2/theta)_(j) / (1 + 2/theta)_(n).
double infinite_sampling_prob(int n, int j, double theta);

// Probability of k distinct types in a sample of n, k = 1..n.
double num_types_dist(int n, int k, double theta);

}  // namespace starfv::multitype
