#include "jumpstab/control.hpp"

#include <cmath>
#include <limits>

namespace jumpstab {

double compute_lambda_A(const Mat& Q, const Mat& A) {
  if (Q.rows() != Q.cols() || A.rows() != A.cols() || Q.rows() != A.rows()) {
    throw ShapeError("Q and A must be square of the same size");
  }
  const Mat qa = Q * A;
  const Mat sym = 0.5 * (qa + qa.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return -es.eigenvalues().maxCoeff();
}

void ControlConstants::validate() const {
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(c1) || !std::isfinite(c2)) {
    throw ValidationError("c1 and c2 must be nonnegative and finite");
  }
  if (!(K1 > 0.0) || !(K2 > 0.0) || !std::isfinite(K1) || !std::isfinite(K2)) {
    throw ValidationError("K1 and K2 must be positive and finite");
  }
}

double ControlConstants::threshold() const { return (K2 * c1 + K1 * c2) / K1; }

double FeedbackGainDesign::analytic_bound() const {
  if (!(lambda_A > constants.c2)) return std::numeric_limits<double>::infinity();
  return -constants.K1 + constants.K2 * constants.c1 / (lambda_A - constants.c2);
}

void check_positive_definite(const Mat& Q) {
  if (Q.rows() == 0 || Q.rows() != Q.cols()) throw ShapeError("Q must be square");
  const double scale = Q.cwiseAbs().maxCoeff();
  if (!Q.allFinite() || (Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw ValidationError("Q must be positive definite (it is singular or indefinite)");
  }
}

Mat synthesize_gain(const Mat& Q, double threshold) {
  check_positive_definite(Q);
  if (!std::isfinite(threshold)) throw ValidationError("design threshold must be finite");
  const double kappa = std::max(1.5 * threshold, 1e-6);
  return -kappa * Q.llt().solve(Mat::Identity(Q.rows(), Q.cols()));
}

FeedbackGainDesign make_design(const Mat& Q, const Mat& A,
                               const ControlConstants& constants) {
  check_positive_definite(Q);
  constants.validate();
  FeedbackGainDesign d;
  d.Q = Q;
  d.A = A;
  d.lambda_A = compute_lambda_A(Q, A);
  d.constants = constants;
  d.margin = d.lambda_A - constants.threshold();
  d.design_inequality_holds = d.margin > 0.0;
  return d;
}

FeedbackGainDesign design_feedback(const Mat& Q, const ControlConstants& constants) {
  constants.validate();
  return make_design(Q, synthesize_gain(Q, constants.threshold()), constants);
}

CoupledJumpDiffusion controlled_system(const CoupledJumpDiffusion& system,
                                       const Mat& A) {
  const auto l1 = system.dims().l1;
  if (A.rows() != l1 || A.cols() != l1) throw ShapeError("gain A must be l1 x l1");
  SystemSpec spec = system.spec();
  DriftField open = spec.drift1;
  spec.drift1 = DriftField({l1, 1}, [open, A](const Vec& x1, const Vec& x2) -> Vec {
    return open(x1, x2) + A * x1;
  });
  return CoupledJumpDiffusion(std::move(spec));
}

WeakStabilizationReport verify_weak_stabilization(
    const CoupledJumpDiffusion& system, const FeedbackGainDesign& design,
    const ScalarFn& f1, const Vec& x1_0,
    const IntegratorConfig& cfg, std::size_t ensemble) {
  if (!f1) throw ValidationError("weak stabilization needs f1");
  WeakStabilizationReport r;
  r.design = design;
  r.analytic_bound = design.analytic_bound();
  const auto controlled = controlled_system(system, design.A);
  try {
    const auto occ = estimate_invariant_measure(controlled, x1_0, cfg, ensemble);
    r.integral_f1 = estimate_lambda(occ, f1);
  } catch (const DivergenceError& e) {
    r.diverged_at = e.time();
    r.integral_f1 = {std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN()};
    return r;
  }
  const double two_se = 2.0 * r.integral_f1.std_error;
  r.negative = r.integral_f1.value + two_se < 0.0;
  r.within_bound = r.integral_f1.value <= r.analytic_bound + two_se;
  return r;
}

std::string control_csv_header() {
  return "lambda_A,threshold,design_ok,integral_f1,integral_f1_stderr,"
         "analytic_bound,status";
}

std::string control_csv_row(const WeakStabilizationReport& r) {
  const char* status = r.diverged_at ? "diverged" : (r.negative ? "stabilized" : "not-shown");
  return format_real(r.design.lambda_A) + "," +
         format_real(r.design.constants.threshold()) + "," +
         (r.design.design_inequality_holds ? "true" : "false") + "," +
         format_real(r.integral_f1.value) + "," +
         format_real(r.integral_f1.std_error) + "," +
         format_real(r.analytic_bound) + "," + status;
}

}  // namespace jumpstab
