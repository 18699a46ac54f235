#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jumpstab/integrator.hpp"
#include "jumpstab/stats.hpp"
#include "jumpstab/system.hpp"

namespace jumpstab {

using ScalarFn = std::function<double(const Vec&)>;

/// U(x2) = max(-ln|x2|, 0); satisfies the log-growth inequality with m0 = 1.
ScalarFn log_barrier();

/// Outcome of one sampled spot check.
struct HypothesisCheck {
  std::string name;
  bool passed = true;
  std::size_t samples = 0;
  /// Smallest slack observed (negative when the check failed).
  double worst_margin = 0.0;
};

/// Lyapunov data for the stability criterion: V0, V1 on R^{l1}, the barrier U
/// on R^{l2}, the rate functions f1, f2 on R^{l1} and the constants.
struct StabilityHypotheses {
  ScalarFn V0;
  ScalarFn V1;
  ScalarFn U = log_barrier();
  ScalarFn f1;
  ScalarFn f2;
  double m0 = 1.0;
  double alpha0 = 1.0;
  double delta0 = 1.0;
  /// Bound on the norm of the right inverse of sigma1.
  double c_sigma = 1.0;
  double K3 = 1.0;
  double K4 = 1.0;
  double K5 = 1.0;

  /// Throws ValidationError if f1 is missing or a constant is not positive.
  void validate() const;

  /// U(x2) - U(x2') <= m0 ln(|x2'|/|x2|) on random nonzero pairs whose radii
  /// span 1e-8 .. 1, the unit ball around the boundary where U is used.
  HypothesisCheck check_log_growth(Eigen::Index l2, std::size_t samples,
                                   std::uint64_t seed = 1) const;
  /// |f1| + f2 < K5 V1 on random points of [-radius, radius]^{l1}.
  HypothesisCheck check_domination(Eigen::Index l1, std::size_t samples,
                                   double radius, std::uint64_t seed = 2) const;
  /// U at radius 10^-k is increasing for k = 1..8.
  HypothesisCheck check_blowup(Eigen::Index l2) const;
  /// Generator of V0 on {x2 = 0} is at most K3 - K4 V1 at sampled x1.
  /// Derivatives of V0 come from central differences.
  HypothesisCheck check_foster_lyapunov(const CoupledJumpDiffusion& system,
                                        std::size_t samples, double radius,
                                        std::uint64_t seed = 3) const;
};

/// Weighted sample cloud approximating an invariant measure.
class OccupationMeasure {
 public:
  /// Weights are normalized to sum to one; they must be nonnegative with a
  /// positive sum. Throws ValidationError on an empty sample.
  OccupationMeasure(std::vector<Vec> samples, std::vector<double> weights,
                    double burn_in);
  static OccupationMeasure uniform(std::vector<Vec> samples, double burn_in);

  const std::vector<Vec>& samples() const noexcept { return samples_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double burn_in() const noexcept { return burn_in_; }
  std::size_t size() const noexcept { return samples_.size(); }
  Eigen::Index dim() const noexcept { return samples_.front().size(); }
  Vec mean() const;

 private:
  std::vector<Vec> samples_;
  std::vector<double> weights_;
  double burn_in_;
};

/// Fraction of the horizon discarded before collecting occupation samples.
inline constexpr double kBurnInFraction = 0.2;

/// Concatenates the post-burn-in recorded states of `ensemble` boundary
/// paths (x2 pinned at 0) into an equally weighted occupation measure.
/// Divergence of any boundary path is rethrown as DivergenceError.
OccupationMeasure estimate_invariant_measure(const CoupledJumpDiffusion& system,
                                             const Vec& x1_0,
                                             const IntegratorConfig& cfg,
                                             std::size_t ensemble);

/// Weighted mean of f over the occupation with a batch-means standard
/// error.
Estimate estimate_lambda(const OccupationMeasure& occ, const ScalarFn& f);

struct ExponentOptions {
  /// |x2| below this counts as numerical absorption at 0.
  double absorption_level = 1e-300;
};

struct ExponentEstimate {
  Estimate exponent;
  std::vector<double> slopes;
  std::size_t diverged = 0;
  std::size_t absorbed = 0;
  /// Slope assigned to absorbed paths: the rate needed to reach the
  /// absorption level within the horizon.
  double floor = 0.0;
};

/// Per-path least-squares slope of ln|x2(t)| over the second half of the
/// horizon, averaged over the ensemble. A path that trips the divergence
/// guard is fitted on the second half of its surviving record; one that
/// survives fewer than three records in that window is counted as diverged
/// and dropped. Throws DivergenceError when no path yields a slope.
ExponentEstimate estimate_log_lyapunov_exponent(
    const CoupledJumpDiffusion& system, const Vec& x1_0, const Vec& x2_0,
    const IntegratorConfig& cfg, std::size_t ensemble,
    const ExponentOptions& options = {});

/// Slope of ln|series| against time on the second half of the record. Used by
/// every exponent estimator (also polar, fast-slow and consensus).
struct SlopeFit {
  std::optional<double> slope;
  bool absorbed = false;
};
SlopeFit fit_log_slope(const std::vector<double>& times,
                       const std::vector<double>& magnitudes,
                       double absorption_level = 1e-300);

enum class Verdict { kStable, kInconclusive, kUnstableIndicated };
std::string_view to_string(Verdict v);

struct VerdictOptions {
  /// Paths in the exponent cross-check; 0 skips it.
  std::size_t ensemble = 16;
  /// Cross-check start: x1 defaults to the occupation mean, x2 to
  /// x2_scale * e1.
  std::optional<Vec> x1_start;
  double x2_scale = 1e-3;
  /// Allowed excess of the measured exponent over -gamma0.
  double tolerance = 0.05;
};

struct LyapunovReport {
  Estimate lambda1;
  Estimate lambda2;
  double m0 = 1.0;
  /// Predicted decay rate lambda1 / (2 m0); 0 unless the verdict is stable.
  double gamma0 = 0.0;
  std::optional<ExponentEstimate> exponent;
  /// Measured exponent <= -gamma0 + tolerance (only with a stable verdict
  /// and a cross-check).
  std::optional<bool> agreement;
  Verdict verdict = Verdict::kInconclusive;
};

/// Issues the verdict: stable iff lambda1 - 2 stderr > 0, in which case
/// gamma0 = lambda1 / (2 m0); otherwise unstable-indicated iff the
/// cross-check exponent exceeds zero by two standard errors, else
/// inconclusive.
LyapunovReport stability_verdict(const CoupledJumpDiffusion& system,
                                 const StabilityHypotheses& hyp,
                                 const OccupationMeasure& occ,
                                 const IntegratorConfig& cfg,
                                 const VerdictOptions& options = {});

/// CSV header and row for a LyapunovReport.
std::string lyapunov_csv_header();
std::string lyapunov_csv_row(const LyapunovReport& r);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_real(double x);

}  // namespace jumpstab
