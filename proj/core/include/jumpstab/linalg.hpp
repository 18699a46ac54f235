#pragma once

#include <Eigen/Dense>

namespace jumpstab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Stacks two vectors into (a; b).
inline Vec stack(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace jumpstab
