#include "jumpstab/lipschitz.hpp"

#include <algorithm>
#include <cmath>

#include "jumpstab/rng.hpp"
#include "jumpstab/stats.hpp"

namespace jumpstab {

namespace {

double jump_difference(const ComponentView& c, const Vec& x1, const Vec& x2,
                       const Vec& y1, const Vec& y2) {
  CompensatedSum s;
  for (const auto& atom : c.levy.atoms()) {
    s.add(atom.weight * (c.jump(x1, x2, atom.mark) - c.jump(y1, y2, atom.mark))
                            .squaredNorm());
  }
  return s.value();
}

double jump_size(const ComponentView& c, const Vec& x1, const Vec& x2) {
  CompensatedSum s;
  for (const auto& atom : c.levy.atoms()) {
    s.add(atom.weight * c.jump(x1, x2, atom.mark).squaredNorm());
  }
  return s.value();
}

}  // namespace

double lipschitz_quotient(const CoupledJumpDiffusion& system, const Vec& z,
                          const Vec& zp) {
  const double dz = (z - zp).squaredNorm();
  if (!(dz > 0.0)) return 0.0;
  const Vec x1 = system.x1_of(z), x2 = system.x2_of(z);
  const Vec y1 = system.x1_of(zp), y2 = system.x2_of(zp);
  CompensatedSum num;
  num.add((system.drift(z) - system.drift(zp)).squaredNorm());
  num.add((system.diffusion(z) - system.diffusion(zp)).squaredNorm());
  num.add(jump_difference(system.component1(), x1, x2, y1, y2));
  num.add(jump_difference(system.component2(), x1, x2, y1, y2));
  return num.value() / dz;
}

double jump_growth_quotient(const CoupledJumpDiffusion& system, const Vec& z) {
  const Vec x1 = system.x1_of(z), x2 = system.x2_of(z);
  const double num = jump_size(system.component1(), x1, x2) +
                     jump_size(system.component2(), x1, x2);
  return num / (1.0 + z.squaredNorm());
}

LipschitzReport validate_lipschitz(const CoupledJumpDiffusion& system,
                                   std::size_t sample_count, double box_radius,
                                   const LipschitzBounds& declared,
                                   std::uint64_t seed) {
  if (sample_count < 2) {
    throw ValidationError("validate_lipschitz needs at least two samples");
  }
  if (!(box_radius > 0.0)) {
    throw ValidationError("validate_lipschitz needs a positive box radius");
  }
  const Eigen::Index dim = system.state_dim();
  Rng rng(seed, 0, Channel::kSampling);
  auto unit_point = [&] {
    Vec u(dim);
    for (Eigen::Index i = 0; i < dim; ++i) u[i] = 2.0 * rng.uniform() - 1.0;
    return u;
  };

  LipschitzReport report;
  report.samples = sample_count;
  report.box_radius = box_radius;
  for (std::size_t k = 0; k < sample_count; ++k) {
    const Vec u = unit_point();
    Vec v = unit_point();
    // Every other pair is a close pair to probe local slopes.
    if (k % 2 == 1) v = u + 1e-3 * v;
    for (double r : {box_radius, 0.5 * box_radius}) {
      const double q1 = lipschitz_quotient(system, r * u, r * v);
      const double q2 = jump_growth_quotient(system, r * u);
      if (r == box_radius) {
        report.k1_observed = std::max(report.k1_observed, q1);
        report.k2_observed = std::max(report.k2_observed, q2);
      } else {
        report.k1_half_radius = std::max(report.k1_half_radius, q1);
        report.k2_half_radius = std::max(report.k2_half_radius, q2);
      }
    }
  }
  report.k1_pass = !declared.K1 || report.k1_observed <= *declared.K1;
  report.k2_pass = !declared.K2 || report.k2_observed <= *declared.K2;
  report.unbounded_trend =
      report.k1_observed > 2.0 * report.k1_half_radius + 1e-12;
  return report;
}

}  // namespace jumpstab
