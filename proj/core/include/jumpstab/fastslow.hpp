#pragma once

#include <functional>
#include <vector>

#include "jumpstab/polar.hpp"

namespace jumpstab {

/// Second-component noise coefficients that may only see y2.
using Y2DiffusionFn = std::function<Mat(const Vec& y2)>;
using Y2JumpFn = std::function<Vec(const Vec& y2, const Vec& mark)>;

/// Ingredients of a two-time-scale system. Component 1 is the fast process
/// (its coefficients are scaled by 1/eps, 1/sqrt(eps), 1/eps at run time);
/// component 2 is slow and its noise depends on y2 alone.
struct FastSlowSpec {
  Dimensions dims;
  DriftField drift1;
  DiffusionField diff1;
  JumpField jump1;
  LevyMeasure levy1;

  DriftField drift2;
  Y2DiffusionFn sigma2;
  Y2JumpFn gamma2;
  LevyMeasure levy2;

  /// Linear part: drift2 ~ B2(y1) y2, sigma2 column l ~ Sigma2[l] y2,
  /// gamma2 ~ Gamma2(mark) y2.
  MatrixField B2;
  std::vector<Mat> Sigma2;
  std::function<Mat(const Vec& mark)> Gamma2;
};

class FastSlowSystem {
 public:
  /// Throws ValidationError unless epsilon > 0 and the pieces are
  /// dimensionally consistent.
  FastSlowSystem(FastSlowSpec spec, double epsilon);

  const CoupledJumpDiffusion& base() const noexcept { return base_; }
  double epsilon() const noexcept { return epsilon_; }
  const LinearizedCoefficients& lin() const noexcept { return lin_; }
  const LevyMeasure& nu2() const noexcept { return spec_.levy2; }
  const FastSlowSpec& spec() const noexcept { return spec_; }

  /// Multipliers for component 1: (1/eps, 1/sqrt(eps), 1/eps).
  ChannelScaling fast_scaling() const;
  FastSlowSystem with_epsilon(double epsilon) const;

 private:
  FastSlowSpec spec_;
  double epsilon_;
  CoupledJumpDiffusion base_;
  LinearizedCoefficients lin_;
};

/// Throws ConfigError unless dt <= epsilon / 10.
void check_fast_resolution(const FastSlowSystem& fs, const IntegratorConfig& cfg);

/// Simulates the eps-scaled system. With eps = 1 this is bit-identical to
/// simulate_path on the base system.
PathSample simulate_fastslow(const FastSlowSystem& fs, const Vec& y1_0,
                             const Vec& y2_0, const IntegratorConfig& cfg,
                             std::uint64_t path_index);

/// Both h4 variants averaged over one occupation.
struct LambdaPair {
  Estimate quadratic;
  Estimate generator;

  const Estimate& get(H4Variant v) const {
    return v == H4Variant::kQuadratic ? quadratic : generator;
  }
};

/// Average of h4 over the eps-scaled sphere occupation (Y1^eps, Theta^eps).
LambdaPair lambda_eps(const FastSlowSystem& fs, const Vec& y1_0,
                      const Vec& theta_0, const IntegratorConfig& cfg,
                      std::size_t ensemble);

struct LambdaStar {
  LambdaPair value;
  /// Occupation average of B2 under the boundary law of Y1.
  Mat B_bar;
};

/// Averaged limit: estimates the boundary law of Y1 (unscaled), averages B2
/// against it, simulates the averaged sphere process, and averages h4 over
/// the product. The h4 integrand is affine in B2, so evaluating it at B_bar
/// equals the product-measure average. Values are drifts of ln|Y2|^2: the
/// exponent of |Y2| of the averaged linear system is half of them.
LambdaStar lambda_star(const FastSlowSystem& fs, const Vec& y1_0,
                       const Vec& theta_0, const IntegratorConfig& cfg,
                       std::size_t ensemble);

/// The averaged linear system dY = B_bar Y dt + sum_l Sigma2_l Y dW_l +
/// ∫ Gamma2 Y dÑ as a system with l1 = 0, for direct simulation.
CoupledJumpDiffusion averaged_linear_system(const FastSlowSystem& fs,
                                            const Mat& B_bar);

std::string fastslow_csv_header();
std::string fastslow_csv_row(double epsilon, H4Variant variant, const Estimate& e);

}  // namespace jumpstab
