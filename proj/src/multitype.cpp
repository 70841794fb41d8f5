#include "starfv/multitype.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "starfv/twotype.hpp"

namespace starfv::multitype {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kPoissonTail = 1e-14;
constexpr double kMaxUniformRate = 50.0;

void check_time(double t) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
}

void check_simplex(const MultiParams& mp, const Eigen::VectorXd& x) {
  if (x.size() != mp.dim()) throw InvalidArgument("x has the wrong dimension");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0)) throw InvalidArgument("x must lie on the simplex");
  }
  if (std::abs(x.sum() - 1.0) > kStochasticTol * mp.dim()) {
    throw InvalidArgument("x must sum to 1");
  }
}

}  // namespace

MultiParams::MultiParams(double theta, std::vector<double> p_vec)
    : theta_(theta), p_(std::move(p_vec)) {
  if (!(theta_ > 0.0) || !std::isfinite(theta_)) throw InvalidArgument("theta must be positive");
  if (p_.size() < 2) throw InvalidArgument("need at least two types");
  for (double v : p_) {
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("type probabilities must lie in (0,1)");
  }
  if (std::abs(std::accumulate(p_.begin(), p_.end(), 0.0) - 1.0) > kStochasticTol) {
    throw InvalidArgument("type probabilities must sum to 1");
  }
}

bool is_irreducible(const Eigen::MatrixXd& m) {
  const Eigen::Index d = m.rows();
  std::vector<std::vector<char>> reach(static_cast<std::size_t>(d),
                                       std::vector<char>(static_cast<std::size_t>(d), 0));
  for (Eigen::Index i = 0; i < d; ++i) {
    reach[i][i] = 1;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (m(i, j) > 0.0) reach[i][j] = 1;
    }
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!reach[i][k]) continue;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (reach[k][j]) reach[i][j] = 1;
      }
    }
  }
  for (const auto& row : reach) {
    for (char c : row) {
      if (!c) return false;
    }
  }
  return true;
}

MutationMatrix::MutationMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() < 2 || m_.rows() != m_.cols()) {
    throw InvalidArgument("mutation matrix must be square with at least two types");
  }
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      if (!(m_(i, j) >= 0.0) || !std::isfinite(m_(i, j))) {
        throw InvalidArgument("mutation matrix entries must be non-negative");
      }
    }
    if (std::abs(m_.row(i).sum() - 1.0) > kStochasticTol) {
      throw InvalidArgument("mutation matrix rows must sum to 1");
    }
  }
  if (!is_irreducible(m_)) throw InvalidArgument("mutation matrix is reducible");
}

MutationMatrix MutationMatrix::from_text(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InvalidArgument("mutation matrix: bad number '" + tok + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("mutation matrix: no rows");
  const auto d = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != d) {
      throw InvalidArgument("mutation matrix must be square");
    }
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return MutationMatrix(std::move(m));
}

MutationMatrix MutationMatrix::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open mutation matrix file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_text(ss.str());
}

Eigen::MatrixXd pim_line_kernel(const MultiParams& mp, double t) {
  check_time(t);
  const double e = std::exp(-0.5 * mp.theta() * t);
  const double jump = -std::expm1(-0.5 * mp.theta() * t);
  const int d = mp.dim();
  Eigen::MatrixXd k(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) k(i, j) = (i == j ? e : 0.0) + jump * mp.p(j);
  }
  return k;
}

Eigen::VectorXd pim_marginal_q(const MultiParams& mp, const Eigen::VectorXd& x, double t) {
  check_simplex(mp, x);
  check_time(t);
  const double e = std::exp(-0.5 * mp.theta() * t);
  Eigen::VectorXd q(mp.dim());
  for (int i = 0; i < mp.dim(); ++i) q[i] = mp.p(i) + (x[i] - mp.p(i)) * e;
  return q;
}

SimplexLaw::SimplexLaw(std::vector<double> p_vec, Eigen::VectorXd atom, double atom_mass,
                       std::vector<SimplexRegion> regions)
    : p_(std::move(p_vec)), atom_(std::move(atom)), atom_mass_(atom_mass),
      regions_(std::move(regions)) {}

Eigen::VectorXd SimplexLaw::point(int region, double xi_i) const {
  const auto d = static_cast<int>(p_.size());
  if (region < 0 || region >= d) throw InvalidArgument("region index out of range");
  const double pi = p_[static_cast<std::size_t>(region)];
  const double rest = 1.0 - (xi_i - pi) / (1.0 - pi);
  Eigen::VectorXd v(d);
  for (int j = 0; j < d; ++j) v[j] = rest * p_[static_cast<std::size_t>(j)];
  v[region] = xi_i;
  return v;
}

double SimplexLaw::stored_mass() const {
  double m = atom_mass_;
  for (const auto& r : regions_) m += r.piece.mass;
  return m;
}

Eigen::VectorXd SimplexLaw::sample(RngStream& rng) const {
  std::vector<double> w{atom_mass_};
  for (const auto& r : regions_) w.push_back(std::max(0.0, r.piece.mass));
  const std::size_t pick = rng.discrete(w);
  if (pick == 0) return atom_;
  const auto& r = regions_[pick - 1];
  return point(r.index, r.piece.sampler(rng));
}

SimplexLaw pim_transition_law(const MultiParams& mp, const Eigen::VectorXd& x, double t) {
  check_simplex(mp, x);
  check_time(t);
  if (t == 0.0) return SimplexLaw(mp.p_vec(), x, 1.0, {});
  const Eigen::VectorXd q =
      std::isinf(t) ? Eigen::Map<const Eigen::VectorXd>(mp.p_vec().data(), mp.dim()).eval()
                    : pim_marginal_q(mp, x, t);
  std::vector<SimplexRegion> regions;
  for (int i = 0; i < mp.dim(); ++i) {
    // Region i is the upper piece of the two-type law with type i against the rest.
    const TwoTypeParams sub(mp.theta(), mp.p(i));
    const MixedLaw law = twotype::transition_law(sub, x[i], t);
    for (const auto& piece : law.pieces()) {
      if (piece.hi == 1.0) {
        regions.push_back({i, piece});
        break;
      }
    }
  }
  return SimplexLaw(mp.p_vec(), q, std::isinf(t) ? 0.0 : std::exp(-t), std::move(regions));
}

double pim_region_density(const MultiParams& mp, const Eigen::VectorXd& x, double t, int i,
                          double xi_i) {
  check_simplex(mp, x);
  check_time(t);
  if (i < 0 || i >= mp.dim()) throw InvalidArgument("region index out of range");
  const TwoTypeParams sub(mp.theta(), mp.p(i));
  if (std::isinf(t)) {
    return xi_i > mp.p(i) ? twotype::stationary_density(sub, xi_i) : 0.0;
  }
  const double lo = mp.p(i) + (1.0 - mp.p(i)) * std::exp(-0.5 * mp.theta() * t);
  if (!(xi_i > lo && xi_i < 1.0)) return 0.0;
  return twotype::transition_density(sub, x[i], t, xi_i);
}

Eigen::VectorXd pim_stationary_sample(const MultiParams& mp, RngStream& rng) {
  const double eta = std::pow(rng.uniform(), 0.5 * mp.theta());
  const auto i = static_cast<int>(rng.discrete(mp.p_vec()));
  Eigen::VectorXd v(mp.dim());
  for (int j = 0; j < mp.dim(); ++j) v[j] = (1.0 - eta) * mp.p(j);
  v[i] += eta;
  return v;
}

Eigen::MatrixXd markov_line_kernel(const MutationMatrix& m, double theta, double t) {
  if (!(theta > 0.0)) throw InvalidArgument("theta must be positive");
  check_time(t);
  const int d = m.dim();
  if (std::isinf(t)) {
    const Eigen::VectorXd g = markov_stationary_gamma(m);
    return Eigen::VectorXd::Ones(d) * g.transpose();
  }
  // Halve the horizon until the uniformization rate is moderate, then square back.
  double rate = 0.5 * theta * t;
  int squarings = 0;
  while (rate > kMaxUniformRate) {
    rate *= 0.5;
    ++squarings;
  }
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
  double weight = std::exp(-rate);
  double covered = weight;
  Eigen::MatrixXd k = weight * power;
  for (int n = 1; 1.0 - covered >= kPoissonTail && n < 10000; ++n) {
    power = power * m.matrix();
    weight *= rate / n;
    covered += weight;
    k += weight * power;
  }
  for (int s = 0; s < squarings; ++s) k = k * k;
  return k;
}

Eigen::VectorXd markov_stationary_gamma(const MutationMatrix& m) {
  const int d = m.dim();
  Eigen::MatrixXd a = m.matrix().transpose() - Eigen::MatrixXd::Identity(d, d);
  a.row(d - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  rhs[d - 1] = 1.0;
  return a.fullPivLu().solve(rhs);
}

Eigen::VectorXd markov_stationary_sample(const MutationMatrix& m, double theta, RngStream& rng) {
  const Eigen::VectorXd g = markov_stationary_gamma(m);
  std::vector<double> w(g.data(), g.data() + g.size());
  const auto i = static_cast<Eigen::Index>(rng.discrete(w));
  const double tau = rng.exponential(1.0);
  return markov_line_kernel(m, theta, tau).row(i).transpose();
}

double infinite_sampling_prob(int n, int j, double theta) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  if (j < 0 || j > n) throw InvalidArgument("j must lie in 0..n");
  if (!(theta > 0.0)) throw InvalidArgument("theta must be positive");
  const double a = 2.0 / theta;
  // (a/(a+j)) prod_{i=j+1}^n i/(a+i), in logs once the product gets long.
  if (n - j <= 1000) {
    double v = a / (a + j);
    for (int i = j + 1; i <= n; ++i) v *= i / (a + i);
    return v;
  }
  double lv = std::log(a / (a + j));
  for (int i = j + 1; i <= n; ++i) lv += std::log(i / (a + i));
  return std::exp(lv);
}

double num_types_dist(int n, int k, double theta) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  if (k < 1 || k > n) throw InvalidArgument("k must lie in 1..n");
  // One block of size n-k+1 plus k-1 singletons; with k = n the all-dust
  // sample (no draw from eta) also has n types.
  double v = infinite_sampling_prob(n, n - k + 1, theta);
  if (k == n) v += infinite_sampling_prob(n, 0, theta);
  return v;
}

}  // namespace starfv::multitype
