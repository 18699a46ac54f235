#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jumpstab/integrator.hpp"
#include "jumpstab/stability.hpp"

namespace jumpstab {

/// Constants of the coupling construction.
struct CouplingConfig {
  /// Relaxation gain; must exceed 20 (1 + K2).
  double lambda = 0.0;
  /// Weight exponent in the decay bound; in (0, gamma0 / 4).
  double lambda0 = 0.0;
  double gamma0 = 0.0;
  /// (Lambda1 - m0 gamma0) / 3.
  double varsigma0 = 0.0;
  /// varsigma0 / (2 C_alpha0 Lambda2).
  double alpha = 0.0;
  double alpha0 = 1.0;
  /// > 1 with t^2 exp(alpha0 t / 2) <= C_alpha0 exp(alpha0 t) for t >= 0.
  double C_alpha0 = 0.0;
  /// Envelope radius of the stopping time.
  double delta = 0.0;
  /// Jump-growth constant the gain bound refers to.
  double K2 = 0.0;
  /// Bound on the norm of the right inverse of sigma1.
  double c_sigma = 1.0;

  /// Throws ValidationError when an invariant fails. The C_alpha0 condition
  /// is checked on a grid of t.
  void validate() const;

  /// Builds the default constants from boundary estimates: gamma0 =
  /// Lambda1 / (2 m0), varsigma0 = (Lambda1 - m0 gamma0) / 3, the smallest
  /// admissible C_alpha0 times 1.05, lambda0 = gamma0 / 8 and lambda =
  /// 25 (1 + K2).
  static CouplingConfig from_estimates(double Lambda1, double Lambda2,
                                       const StabilityHypotheses& hyp,
                                       double K2, double delta);
};

/// sup_{t >= 0} t^2 exp(-alpha0 t / 2) = (4 / alpha0)^2 e^{-2}.
double alpha0_supremum(double alpha0);

/// Boundary process X1, and the coupled copy (X1~, X2~), on one time grid.
/// X1 and X1~ are driven by the same W1 and N1 increments.
struct CoupledTriple {
  std::vector<double> times;
  std::vector<Vec> x1;
  std::vector<Vec> x1_tilde;
  std::vector<Vec> x2_tilde;
};

/// Simulates
///   dX1  = boundary dynamics (x2 = 0),
///   dX1~ = component-1 dynamics at (X1~, X2~) + lambda (X1 - X1~) dt,
///   dX2~ = component-2 dynamics at (X1~, X2~) with independent noise.
/// Throws ValidationError on a bad config, DivergenceError on divergence.
CoupledTriple simulate_coupled_triple(const CoupledJumpDiffusion& system,
                                      const Vec& x1_0, const Vec& x1_tilde_0,
                                      const Vec& x2_tilde_0,
                                      const CouplingConfig& ccfg,
                                      const IntegratorConfig& cfg,
                                      std::uint64_t path_index);

/// First recorded time with |X2~(t)| >= delta exp(-gamma0 t), or nullopt if
/// the envelope holds on the whole record.
std::optional<double> stopping_time_tau_delta(const CoupledTriple& triple,
                                              const CouplingConfig& ccfg);

/// Least-squares right inverse of a matrix with full row rank. Singular
/// values below 1e-10 * sigma_max count as zero; throws AssumptionViolation
/// when the rank is short.
Mat right_inverse(const Mat& m);

/// v = lambda sigma1(x1, 0)^+ (x1 - x1~).
Vec girsanov_drift(const CoupledJumpDiffusion& system, const Vec& x1,
                   const Vec& x1_tilde, double lambda);

/// Left Riemann sum of |v|^2 on the recorded grid up to min(tau, horizon).
double drift_budget(const CoupledJumpDiffusion& system,
                    const CoupledTriple& triple, const CouplingConfig& ccfg,
                    std::optional<double> tau);

struct CouplingGridPoint {
  Vec x1_0;
  Vec x1_tilde_0;
  double delta = 0.0;
  /// Defaults to (delta / 2) e1.
  std::optional<Vec> x2_tilde_0;
};

struct CouplingDecayRow {
  double gap0 = 0.0;
  double delta = 0.0;
  /// E sup_{t <= tau} e^{lambda0 t} |X1 - X1~|^2.
  Estimate sup_weighted_gap;
  /// sup_weighted_gap / (gap0 + delta)^2.
  Estimate ratio;
  double tau_hit_fraction = 0.0;
  /// Fraction of paths whose drift budget reaches (gap0 + delta)^2 / epsilon.
  double budget_frequency = 0.0;
};

struct CouplingDecayReport {
  std::vector<CouplingDecayRow> rows;
  /// Largest ratio over the grid, an empirical stand-in for the constant of
  /// the decay bound (not a certified value).
  double c_tilde_hat = 0.0;
  double epsilon = 0.1;
  /// max(c_tilde_hat, 1) lambda c_sigma epsilon / lambda0.
  double budget_bound = 0.0;
};

CouplingDecayReport estimate_coupling_decay(
    const CoupledJumpDiffusion& system,
    const std::vector<CouplingGridPoint>& grid, const CouplingConfig& ccfg,
    const IntegratorConfig& cfg, std::size_t ensemble, double epsilon = 0.1);

std::string coupling_csv_header();
std::string coupling_csv_row(std::size_t index, const CouplingDecayRow& row);

}  // namespace jumpstab
