#include "jumpstab/generator.hpp"

#include <cmath>

#include "jumpstab/stats.hpp"

namespace jumpstab {

namespace {

double fd_step(const Vec& z) { return 1e-5 * (1.0 + z.norm()); }

}  // namespace

Vec central_gradient(const std::function<double(const Vec&)>& g, const Vec& z) {
  const double h = fd_step(z);
  Vec grad(z.size());
  Vec zp = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    zp[i] = z[i] + h;
    const double up = g(zp);
    zp[i] = z[i] - h;
    const double down = g(zp);
    zp[i] = z[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

Mat central_hessian(const std::function<double(const Vec&)>& g, const Vec& z) {
  const double h = fd_step(z);
  const Eigen::Index n = z.size();
  Mat hess(n, n);
  const double g0 = g(z);
  Vec zp = z;
  for (Eigen::Index i = 0; i < n; ++i) {
    zp[i] = z[i] + h;
    const double up = g(zp);
    zp[i] = z[i] - h;
    const double down = g(zp);
    zp[i] = z[i];
    hess(i, i) = (up - 2.0 * g0 + down) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          zp[i] = z[i] + si * h;
          zp[j] = z[j] + sj * h;
          acc += si * sj * g(zp);
        }
      }
      zp[i] = z[i];
      zp[j] = z[j];
      hess(i, j) = hess(j, i) = acc / (4.0 * h * h);
    }
  }
  return hess;
}

Vec ScalarField::grad_at(const Vec& z) const {
  return gradient ? gradient(z) : central_gradient(value, z);
}

Mat ScalarField::hess_at(const Vec& z) const {
  return hessian ? hessian(z) : central_hessian(value, z);
}

double apply_generator(const CoupledJumpDiffusion& system, const ScalarField& g,
                       const Vec& z) {
  const auto& d = system.dims();
  if (z.size() != d.l1 + d.l2) {
    throw ValidationError("apply_generator: point has the wrong dimension");
  }
  const Vec x1 = system.x1_of(z);
  const Vec x2 = system.x2_of(z);
  const Vec grad = g.grad_at(z);

  CompensatedSum total;
  total.add(grad.dot(system.drift(z)));
  if (d.d1 + d.d2 > 0) {
    const Mat sigma = system.diffusion(z);
    const Mat hess = g.hess_at(z);
    total.add(0.5 * (sigma.transpose() * hess * sigma).trace());
  }

  const double gz = g.value(z);
  auto jump_channel = [&](const ComponentView& c, Eigen::Index offset,
                          Eigen::Index len) {
    for (const auto& atom : c.levy.atoms()) {
      Vec displacement = Vec::Zero(z.size());
      displacement.segment(offset, len) = c.jump(x1, x2, atom.mark);
      const double term =
          g.value(z + displacement) - gz - grad.dot(displacement);
      total.add(atom.weight * term);
    }
  };
  jump_channel(system.component1(), 0, d.l1);
  jump_channel(system.component2(), d.l1, d.l2);
  return total.value();
}

}  // namespace jumpstab
