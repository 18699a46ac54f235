#pragma once

#include <cmath>
#include <utility>

#include "jumpstab/jumpstab.hpp"

namespace jumpstab::testing {

inline Vec v1(double x) { return Vec::Constant(1, x); }

inline Vec v2(double a, double b) {
  Vec out(2);
  out << a, b;
  return out;
}

/// dX2 = X2 (a dt + s dW + ∫ g dÑ) with no first component.
inline CoupledJumpDiffusion scalar_linear(double a, double s,
                                          const LevyMeasure& nu = {}) {
  SystemSpec spec;
  spec.dims = {0, 1, 0, 1, 0, nu.empty() ? 0 : 1};
  spec.drift2 = DriftField({1, 1}, [a](const Vec&, const Vec& x) { return Vec(a * x); });
  spec.diff2 = DiffusionField({1, 1}, [s](const Vec&, const Vec& x) { return Mat(s * x); });
  if (!nu.empty()) {
    spec.jump2 = JumpField({1, 1}, [](const Vec&, const Vec& x, const Vec& m) {
      return Vec(m[0] * x);
    });
    spec.levy2 = nu;
  }
  return CoupledJumpDiffusion(std::move(spec));
}

/// Boundary OU dX1 = -theta X1 dt + sigma dW1 coupled to
/// dX2 = X2 (-1 + coupling * X1) dt + s X2 dW2.
inline CoupledJumpDiffusion ou_coupled(double theta, double sigma,
                                       double coupling = 0.0, double s = 0.0) {
  SystemSpec spec;
  spec.dims = {1, 1, 1, 1, 0, 0};
  spec.drift1 = DriftField({1, 1}, [theta](const Vec& x1, const Vec& x2) {
    return Vec::Constant(1, -theta * x1[0] + x2[0]);
  });
  spec.diff1 = DiffusionField({1, 1}, [sigma](const Vec&, const Vec&) {
    return Mat::Constant(1, 1, sigma);
  });
  spec.drift2 = DriftField({1, 1}, [coupling](const Vec& x1, const Vec& x2) {
    return Vec(x2 * (-1.0 + coupling * x1[0]));
  });
  spec.diff2 = DiffusionField({1, 1}, [s](const Vec&, const Vec& x2) { return Mat(s * x2); });
  return CoupledJumpDiffusion(std::move(spec));
}

inline IntegratorConfig config(double dt, double horizon, std::uint64_t seed,
                               std::int64_t stride = 1) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.horizon = horizon;
  cfg.master_seed = seed;
  cfg.record_stride = stride;
  cfg.threads = 1;
  return cfg;
}

}  // namespace jumpstab::testing
