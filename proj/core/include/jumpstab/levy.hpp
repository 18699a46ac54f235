#pragma once

#include <vector>

#include "jumpstab/linalg.hpp"

namespace jumpstab {

/// One atom of a finite Lévy measure: a jump mark and its intensity
/// (expected number of arrivals per unit time).
struct LevyAtom {
  Vec mark;
  double weight = 0.0;
};

/// Finite jump-intensity measure on R^n \ {0}, stored as weighted atoms.
///
/// Arrivals of each atom form an independent Poisson process whose rate is
/// the atom weight; the compensator integral is then an exact finite sum.
class LevyMeasure {
 public:
  LevyMeasure() = default;
  /// Throws ValidationError if a weight is negative or non-finite, a mark is
  /// the zero vector, or marks differ in dimension.
  explicit LevyMeasure(std::vector<LevyAtom> atoms);

  /// Convenience for scalar marks: pairs of (mark, weight).
  static LevyMeasure scalar(const std::vector<std::pair<double, double>>& atoms);

  void add_atom(Vec mark, double weight);

  const std::vector<LevyAtom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  /// Mark dimension, or -1 when there are no atoms.
  Eigen::Index mark_dim() const noexcept;

  double total_mass() const;

  /// Same marks, every weight multiplied by `factor` (> 0).
  LevyMeasure scaled(double factor) const;

 private:
  static void check_atom(const LevyAtom& atom, Eigen::Index expected_dim);

  std::vector<LevyAtom> atoms_;
};

}  // namespace jumpstab
