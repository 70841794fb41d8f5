#include "starfv/mixed_law.hpp"

#include <algorithm>
#include <cmath>

namespace starfv {

double DensityPiece::eval(double xi) const {
  if (!(xi >= lo && xi <= hi)) return 0.0;
  return density(xi, xi - lo, hi - xi);
}

MixedLaw::MixedLaw(std::vector<Atom> atoms, std::vector<DensityPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
  if (atoms_.empty() && pieces_.empty()) throw InvalidArgument("MixedLaw: empty law");
  for (const Atom& a : atoms_) {
    if (!(a.location >= 0.0 && a.location <= 1.0)) {
      throw InvalidArgument("MixedLaw: atom outside [0,1]");
    }
    if (!(a.mass >= 0.0 && a.mass <= 1.0)) throw InvalidArgument("MixedLaw: atom mass outside [0,1]");
  }
  for (const DensityPiece& pc : pieces_) {
    if (!(pc.lo >= 0.0 && pc.hi <= 1.0 && pc.lo <= pc.hi)) {
      throw InvalidArgument("MixedLaw: piece support must be a sub-interval of [0,1]");
    }
    if (!pc.density) throw InvalidArgument("MixedLaw: piece without density");
    if (!(pc.mass >= 0.0)) throw InvalidArgument("MixedLaw: negative piece mass");
    for (const Atom& a : atoms_) {
      if (a.mass > 0.0 && pc.contains(a.location)) {
        throw InvalidArgument("MixedLaw: atom inside a density piece");
      }
    }
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
      const auto& a = pieces_[i];
      const auto& b = pieces_[j];
      if (a.lo < b.hi && b.lo < a.hi) throw InvalidArgument("MixedLaw: overlapping pieces");
    }
  }
}

MixedLaw MixedLaw::point_mass(double location) { return MixedLaw({{location, 1.0}}, {}); }

double MixedLaw::stored_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.mass;
  for (const DensityPiece& pc : pieces_) m += pc.mass;
  return m;
}

double MixedLaw::mass(const QuadSpec& spec) const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.mass;
  for (const DensityPiece& pc : pieces_) m += quad_offset(pc.density, pc.lo, pc.hi, spec).value;
  return m;
}

double MixedLaw::mean(const QuadSpec& spec) const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.mass * a.location;
  for (const DensityPiece& pc : pieces_) {
    const auto& f = pc.density;
    m += quad_offset([&f](double x, double dl, double dh) { return x * f(x, dl, dh); }, pc.lo,
                     pc.hi, spec)
             .value;
  }
  return m;
}

double MixedLaw::density(double xi) const {
  double d = 0.0;
  for (const DensityPiece& pc : pieces_) {
    if (pc.contains(xi)) d += pc.eval(xi);
  }
  return d;
}

namespace {

// Inverse CDF within a piece by bisection on quadrature; used only when the
// piece carries no exact sampler.
double sample_piece_numerically(const DensityPiece& pc, RngStream& rng) {
  const double target = rng.uniform() * pc.mass;
  double a = pc.lo;
  double b = pc.hi;
  QuadSpec spec;
  spec.abs_tol = 1e-12;
  for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
    const double mid = 0.5 * (a + b);
    const double cdf = quad_offset(
                           [&pc](double x, double dl, double) {
                             return pc.density(x, dl, pc.hi - x);
                           },
                           pc.lo, mid, spec)
                           .value;
    if (cdf < target) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double MixedLaw::sample(RngStream& rng) const {
  std::vector<double> w;
  w.reserve(atoms_.size() + pieces_.size());
  for (const Atom& a : atoms_) w.push_back(a.mass);
  for (const DensityPiece& pc : pieces_) w.push_back(pc.mass);
  const std::size_t k = rng.discrete(w);
  if (k < atoms_.size()) return atoms_[k].location;
  const DensityPiece& pc = pieces_[k - atoms_.size()];
  if (pc.sampler) return pc.sampler(rng);
  return sample_piece_numerically(pc, rng);
}

}  // namespace starfv
