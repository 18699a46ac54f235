#pragma once

#include <functional>
#include <vector>

#include "jumpstab/integrator.hpp"
#include "jumpstab/stability.hpp"

namespace jumpstab {

using MatrixField = std::function<Mat(const Vec& y1)>;
using JumpMatrixField = std::function<Mat(const Vec& y1, const Vec& mark)>;

/// Linear part in y2 of the second component:
///   b2 ~ B2(y1) y2,  sigma2 ~ [Sigma2_1(y1) y2, ..., Sigma2_d(y1) y2],
///   gamma2 ~ Gamma2(y1, mark) y2.
/// An empty Gamma2 is the zero matrix.
struct LinearizedCoefficients {
  Eigen::Index l1 = 0;
  Eigen::Index l2 = 1;
  MatrixField B2;
  std::vector<MatrixField> Sigma2;
  JumpMatrixField Gamma2;

  Mat B(const Vec& y1) const;
  Mat Sigma(std::size_t l, const Vec& y1) const;
  Mat Gamma(const Vec& y1, const Vec& mark) const;

  /// Sampled checks on [-radius, radius]^{l1}: each Sigma2_l has a bounded
  /// right inverse (condition number below 1e10) and every map, including
  /// Gamma2 at the atoms of nu2, is finite.
  std::vector<HypothesisCheck> check_conditions(const LevyMeasure& nu2,
                                                std::size_t samples,
                                                double radius,
                                                std::uint64_t seed = 7) const;
};

/// (y1, theta, r) with theta = y2/|y2| and r = |y2|^2.
struct PolarState {
  Vec y1;
  Vec theta;
  double r = 0.0;
};
/// Throws ValidationError for y2 = 0, where the angle is undefined.
PolarState to_polar(const Vec& y1, const Vec& y2);
Vec from_polar(const PolarState& p);

/// Sphere drift at r = 0: tangential projection of B2 theta, the Ito
/// correction of the Sigma terms, and the compensator correction of the
/// jump displacement.
Vec coeff_g1(const LinearizedCoefficients& lin, const Vec& y1,
             const Vec& theta, const LevyMeasure& nu2);

/// Sphere diffusion at r = 0, an l2 x d2 matrix whose column l is
/// (I - theta theta') Sigma2_l theta.
Mat coeff_g2(const LinearizedCoefficients& lin, const Vec& y1,
             const Vec& theta);

/// Jump displacement on the sphere: (theta + Gamma theta)/|theta + Gamma theta|
/// - theta. Throws AssumptionViolation when theta + Gamma theta = 0.
Vec coeff_g3(const LinearizedCoefficients& lin, const Vec& y1,
             const Vec& theta, const Vec& mark);

/// Which jump term the log-radius drift uses.
///  kQuadratic: ln|theta+Gamma theta|^2 - |theta+Gamma theta|^2 + 1
///  kGenerator: ln|theta+Gamma theta|^2 - 2 theta' Gamma theta
/// The two differ by the integral of |Gamma theta|^2. kGenerator is the
/// generator applied to ln|y2|^2 and agrees with the closed-form scalar
/// exponent.
enum class H4Variant { kQuadratic, kGenerator };
std::string_view to_string(H4Variant v);

/// Drift of ln R = ln|Y2|^2 at r = 0 in the chosen variant.
double coeff_h4(const LinearizedCoefficients& lin, const Vec& y1,
                const Vec& theta, const LevyMeasure& nu2,
                H4Variant variant = H4Variant::kQuadratic);
inline double coeff_h4_generator(const LinearizedCoefficients& lin,
                                 const Vec& y1, const Vec& theta,
                                 const LevyMeasure& nu2) {
  return coeff_h4(lin, y1, theta, nu2, H4Variant::kGenerator);
}
/// Diffusion of ln R: 2 theta' Sigma2_l theta for each l.
Vec coeff_h5(const LinearizedCoefficients& lin, const Vec& y1,
             const Vec& theta);
/// Jump of ln R: ln|theta + Gamma theta|^2.
double coeff_h6(const LinearizedCoefficients& lin, const Vec& y1,
                const Vec& theta, const Vec& mark);

/// Closed-form exponent of |Y| for dY = Y (a dt + s dW + ∫ g dÑ) with scalar
/// atoms (g_k, w_k): a - s^2/2 + sum w_k (ln|1+g_k| - g_k).
double scalar_exponent(double a, double s, const LevyMeasure& atoms);

struct SpherePath {
  std::vector<double> times;
  std::vector<Vec> y1;
  std::vector<Vec> theta;
};

/// Joint simulation of the boundary process Y1 (component 1 of `system` at
/// x2 = 0, channels W1/N1, with optional fast-scale scaling) and of the angle
/// Theta on the unit sphere (channels W2/N2 with nu2), renormalizing theta
/// after every step. `system` may be null when l1 = 0.
SpherePath simulate_boundary_sphere_system(const LinearizedCoefficients& lin,
                                           const LevyMeasure& nu2,
                                           const CoupledJumpDiffusion* system,
                                           const Vec& y1_0, const Vec& theta_0,
                                           const IntegratorConfig& cfg,
                                           std::uint64_t path_index,
                                           const ChannelScaling& scaling1 = {});

/// Post-burn-in samples (y1; theta) from `ensemble` sphere paths.
OccupationMeasure sphere_occupation(const LinearizedCoefficients& lin,
                                    const LevyMeasure& nu2,
                                    const CoupledJumpDiffusion* system,
                                    const Vec& y1_0, const Vec& theta_0,
                                    const IntegratorConfig& cfg,
                                    std::size_t ensemble,
                                    const ChannelScaling& scaling1 = {});

/// Occupation average of h4 (variant as requested). Negative values predict
/// R(t) -> 0. Note the normalization: this is the drift of ln|Y2|^2, twice
/// the exponent of |Y2|.
Estimate stability_integral(const LinearizedCoefficients& lin,
                            const OccupationMeasure& sphere_occupation,
                            const LevyMeasure& nu2,
                            H4Variant variant = H4Variant::kGenerator);

/// Full system whose second component is exactly linear in y2, with
/// component 1 taken from `component1` (its dims l1, d1, n1 and its drift1,
/// diff1, jump1, levy1).
CoupledJumpDiffusion linearized_system(const LinearizedCoefficients& lin,
                                       const LevyMeasure& nu2,
                                       const SystemSpec& component1);

std::string polar_csv_header();
std::string polar_csv_row(H4Variant variant, const Estimate& e);

}  // namespace jumpstab
