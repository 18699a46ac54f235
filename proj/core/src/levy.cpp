#include "jumpstab/levy.hpp"

#include <cmath>

#include "jumpstab/error.hpp"
#include "jumpstab/stats.hpp"

namespace jumpstab {

LevyMeasure::LevyMeasure(std::vector<LevyAtom> atoms) {
  for (auto& atom : atoms) add_atom(std::move(atom.mark), atom.weight);
}

LevyMeasure LevyMeasure::scalar(
    const std::vector<std::pair<double, double>>& atoms) {
  LevyMeasure m;
  for (const auto& [mark, weight] : atoms) {
    m.add_atom(Vec::Constant(1, mark), weight);
  }
  return m;
}

void LevyMeasure::check_atom(const LevyAtom& atom, Eigen::Index expected_dim) {
  if (!std::isfinite(atom.weight) || atom.weight < 0.0) {
    throw ValidationError("Lévy atom weight must be finite and nonnegative");
  }
  if (atom.mark.size() == 0 || atom.mark.isZero(0.0)) {
    throw ValidationError("Lévy atom mark must be a nonzero vector");
  }
  if (!atom.mark.allFinite()) {
    throw ValidationError("Lévy atom mark must be finite");
  }
  if (expected_dim >= 0 && atom.mark.size() != expected_dim) {
    throw ValidationError("Lévy atom marks must share one dimension");
  }
}

void LevyMeasure::add_atom(Vec mark, double weight) {
  LevyAtom atom{std::move(mark), weight};
  check_atom(atom, mark_dim());
  atoms_.push_back(std::move(atom));
}

Eigen::Index LevyMeasure::mark_dim() const noexcept {
  return atoms_.empty() ? -1 : atoms_.front().mark.size();
}

double LevyMeasure::total_mass() const {
  CompensatedSum s;
  for (const auto& a : atoms_) s.add(a.weight);
  return s.value();
}

LevyMeasure LevyMeasure::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ValidationError("Lévy measure scale factor must be positive");
  }
  LevyMeasure out;
  out.atoms_ = atoms_;
  for (auto& a : out.atoms_) a.weight *= factor;
  return out;
}

}  // namespace jumpstab
