#pragma once

#include <cstdint>
#include <optional>

#include "jumpstab/system.hpp"

namespace jumpstab {

/// User-declared constants for the global Lipschitz and jump-growth bounds.
struct LipschitzBounds {
  std::optional<double> K1;
  std::optional<double> K2;
};

/// Empirical lower bounds for K1 (Lipschitz quotient of b, sigma and the
/// jump term) and K2 (jump growth quotient), measured on random points of
/// the box [-R, R]^{l1+l2} and, with the same unit samples, on [-R/2, R/2].
struct LipschitzReport {
  std::size_t samples = 0;
  double box_radius = 0.0;
  double k1_observed = 0.0;
  double k2_observed = 0.0;
  double k1_half_radius = 0.0;
  double k2_half_radius = 0.0;
  bool k1_pass = true;
  bool k2_pass = true;
  /// The K1 quotient more than doubles from radius R/2 to R, which a
  /// globally Lipschitz system cannot do.
  bool unbounded_trend = false;
};

/// Quotient
///   (|b(z)-b(z')|^2 + |sigma(z)-sigma(z')|_F^2
///    + sum_k w_k |gamma(z,m_k)-gamma(z',m_k)|^2) / |z-z'|^2.
double lipschitz_quotient(const CoupledJumpDiffusion& system, const Vec& z,
                          const Vec& zp);

/// sum_k w_k |gamma(z,m_k)|^2 / (1 + |z|^2).
double jump_growth_quotient(const CoupledJumpDiffusion& system, const Vec& z);

/// Requires sample_count >= 2 and box_radius > 0.
LipschitzReport validate_lipschitz(const CoupledJumpDiffusion& system,
                                   std::size_t sample_count, double box_radius,
                                   const LipschitzBounds& declared = {},
                                   std::uint64_t seed = 0x11b5c4a7ULL);

}  // namespace jumpstab
