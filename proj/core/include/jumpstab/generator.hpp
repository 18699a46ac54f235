#pragma once

#include <functional>

#include "jumpstab/system.hpp"

namespace jumpstab {

/// Scalar test function g on R^{l1+l2} with optional exact derivatives.
/// Missing derivatives fall back to central differences with step
/// 1e-5 * (1 + |z|).
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;

  Vec grad_at(const Vec& z) const;
  Mat hess_at(const Vec& z) const;
};

Vec central_gradient(const std::function<double(const Vec&)>& g, const Vec& z);
Mat central_hessian(const std::function<double(const Vec&)>& g, const Vec& z);

/// Generator of the coupled system applied to g at z = (x1; x2):
///   grad(g)'b + 1/2 tr(sigma sigma' hess(g))
///   + sum over atoms of both channels w [g(z + gamma) - g(z) - grad(g)'gamma].
/// Channel-1 atoms displace x1 only and channel-2 atoms displace x2 only.
double apply_generator(const CoupledJumpDiffusion& system, const ScalarField& g,
                       const Vec& z);

}  // namespace jumpstab
