#pragma once

#include <optional>
#include <string>

#include "jumpstab/stability.hpp"

namespace jumpstab {

/// lambda_A = -max_{|x|=1} x'QAx, the negated top eigenvalue of the
/// symmetric part of QA.
double compute_lambda_A(const Mat& Q, const Mat& A);

/// Constants of the quadratic Lyapunov bound L(x'Qx) <= c1 + c2 |x|^2 and of
/// f1(x) <= -K1 + K2 |x|^2.
struct ControlConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double K1 = 1.0;
  double K2 = 1.0;

  /// Throws ValidationError unless c1, c2 >= 0 and K1, K2 > 0.
  void validate() const;
  /// (K2 c1 + K1 c2) / K1: lambda_A must exceed this.
  double threshold() const;
};

struct FeedbackGainDesign {
  Mat Q;
  Mat A;
  double lambda_A = 0.0;
  ControlConstants constants;
  bool design_inequality_holds = false;
  /// lambda_A - threshold.
  double margin = 0.0;

  /// -K1 + K2 c1 / (lambda_A - c2); +inf when lambda_A <= c2.
  double analytic_bound() const;
};

/// Throws ValidationError unless Q is symmetric positive definite.
void check_positive_definite(const Mat& Q);

/// A = -kappa Q^{-1} with kappa = max(1.5 threshold, 1e-6), so that
/// lambda_A = kappa. Throws ValidationError for a singular or indefinite Q
/// or a non-finite threshold.
Mat synthesize_gain(const Mat& Q, double threshold);

/// Records lambda_A, the design inequality and its margin for a given A.
FeedbackGainDesign make_design(const Mat& Q, const Mat& A,
                               const ControlConstants& constants);
/// synthesize_gain followed by make_design.
FeedbackGainDesign design_feedback(const Mat& Q, const ControlConstants& constants);

/// Same system with drift1(x1, x2) + A x1.
CoupledJumpDiffusion controlled_system(const CoupledJumpDiffusion& system,
                                       const Mat& A);

struct WeakStabilizationReport {
  FeedbackGainDesign design;
  std::optional<double> diverged_at;
  /// Occupation average of f1 under the controlled boundary law.
  Estimate integral_f1;
  double analytic_bound = 0.0;
  /// integral_f1 + 2 stderr < 0.
  bool negative = false;
  /// integral_f1 <= analytic_bound + 2 stderr.
  bool within_bound = false;

  bool ok() const { return !diverged_at && negative; }
};

/// Simulates the controlled boundary system, estimates its occupation and
/// the average of f1. Here f1 bounds the drift of ln|x2| from above
/// (f1 <= -K1 + K2 |x1|^2), so a negative average means stabilization; it is
/// the negative of the stability module's f1. A diverging boundary path
/// yields a failed report rather than an exception. The design inequality
/// is reported, not enforced.
WeakStabilizationReport verify_weak_stabilization(
    const CoupledJumpDiffusion& system, const FeedbackGainDesign& design,
    const ScalarFn& f1, const Vec& x1_0,
    const IntegratorConfig& cfg, std::size_t ensemble);

std::string control_csv_header();
std::string control_csv_row(const WeakStabilizationReport& r);

}  // namespace jumpstab
