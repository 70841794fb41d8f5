#pragma once

#include <functional>
#include <vector>

#include "starfv/core.hpp"
#include "starfv/quadrature.hpp"

namespace starfv {

struct Atom {
  double location;
  double mass;
};

// Absolutely continuous part of a law on an open interval (lo, hi).
// `density` is the unnormalized density (integrating to `mass`), called as
// density(xi, xi - lo, hi - xi). `sampler`, when set, draws from the piece
// conditioned on landing in it.
struct DensityPiece {
  double lo;
  double hi;
  OffsetIntegrand density;
  double mass;
  std::function<double(RngStream&)> sampler;

  double eval(double xi) const;
  bool contains(double xi) const { return xi > lo && xi < hi; }
};

// Probability law on [0,1] made of finitely many atoms plus finitely many
// density pieces with disjoint supports. Piece masses are stored, not
// renormalized, so normalization can be checked against quadrature.
class MixedLaw {
 public:
  MixedLaw(std::vector<Atom> atoms, std::vector<DensityPiece> pieces);

  static MixedLaw point_mass(double location);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<DensityPiece>& pieces() const noexcept { return pieces_; }

  // Sum of stored atom and piece masses.
  double stored_mass() const;
  // Atom masses plus quadrature of every piece density.
  double mass(const QuadSpec& spec = {}) const;
  double mean(const QuadSpec& spec = {}) const;
  // Continuous density at xi (atoms contribute nothing).
  double density(double xi) const;
  double sample(RngStream& rng) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
};

}  // namespace starfv
