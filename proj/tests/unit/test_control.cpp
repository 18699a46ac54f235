#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "builders.hpp"
#include "jumpstab/jumpstab.hpp"

using namespace jumpstab;
using namespace jumpstab::testing;

namespace {

/// x1 driven by unit noise only; x2 has ln-drift -1 + x1^2 (+ s^2/2 Ito).
CoupledJumpDiffusion ou_open_loop(double b1 = 0.0) {
  SystemSpec spec;
  spec.dims = {1, 1, 1, 1, 0, 0};
  spec.drift1 = DriftField({1, 1}, [b1](const Vec& x1, const Vec&) { return Vec(b1 * x1); });
  spec.diff1 = DiffusionField({1, 1}, [](const Vec&, const Vec&) { return Mat::Ones(1, 1); });
  const double s = 0.3;
  spec.drift2 = DriftField({1, 1}, [s](const Vec& x1, const Vec& x2) {
    return Vec(x2 * (x1[0] * x1[0] - 1.0 + 0.5 * s * s));
  });
  spec.diff2 = DiffusionField({1, 1}, [s](const Vec&, const Vec& x2) { return Mat(s * x2); });
  return CoupledJumpDiffusion(std::move(spec));
}

const ScalarFn kF1 = [](const Vec& x1) { return -1.0 + x1.squaredNorm(); };
const ControlConstants kOu{1.0, 0.0, 1.0, 1.0};

double brute_force_lambda(const Mat& Q, const Mat& A, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  double best = -1e300;
  const Mat QA = Q * A;
  for (std::size_t k = 0; k < n; ++k) {
    Vec x(Q.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = nd(eng);
    x.normalize();
    best = std::max(best, x.dot(QA * x));
  }
  return -best;
}

}  // namespace

TEST(LambdaA, Examples) {
  EXPECT_DOUBLE_EQ(compute_lambda_A(Mat::Identity(2, 2), -2.0 * Mat::Identity(2, 2)), 2.0);
  Mat Q(2, 2);
  Q << 1.0, 0.0, 0.0, 2.0;
  EXPECT_DOUBLE_EQ(compute_lambda_A(Q, -Mat::Identity(2, 2)), 1.0);
  Mat skew(2, 2);
  skew << 0.0, 3.0, -3.0, 0.0;
  EXPECT_NEAR(compute_lambda_A(Mat::Identity(2, 2), skew), 0.0, 1e-15);
}

TEST(LambdaA, MatchesBruteForce) {
  std::mt19937_64 eng(2024);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Mat M(2, 2), A(2, 2);
    for (int i = 0; i < 4; ++i) {
      M(i / 2, i % 2) = nd(eng);
      A(i / 2, i % 2) = nd(eng);
    }
    const Mat Q = M * M.transpose() + 0.5 * Mat::Identity(2, 2);
    EXPECT_NEAR(compute_lambda_A(Q, A), brute_force_lambda(Q, A, 100000, 7 + trial), 1e-6);
  }
}

TEST(Synthesis, Examples) {
  const Mat A = synthesize_gain(Mat::Identity(2, 2), 2.0);
  EXPECT_TRUE(A.isApprox(-3.0 * Mat::Identity(2, 2), 1e-15));
  EXPECT_DOUBLE_EQ(compute_lambda_A(Mat::Identity(2, 2), A), 3.0);

  Mat Q(2, 2);
  Q << 1.0, 0.0, 0.0, 4.0;
  const Mat B = synthesize_gain(Q, 1.0);
  Mat expected(2, 2);
  expected << -1.5, 0.0, 0.0, -0.375;
  EXPECT_TRUE(B.isApprox(expected, 1e-15));
  EXPECT_NEAR(compute_lambda_A(Q, B), 1.5, 1e-14);

  const Mat floor = synthesize_gain(Mat::Identity(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(floor(0, 0), -1e-6);
}

TEST(Synthesis, RejectsBadQ) {
  Mat singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  EXPECT_THROW(synthesize_gain(singular, 1.0), ValidationError);
  Mat asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(check_positive_definite(asym), ValidationError);
  EXPECT_THROW(synthesize_gain(Mat::Identity(2, 2), std::nan("")), ValidationError);
}

TEST(Design, RecordsInequalityAndMargin) {
  const auto d = design_feedback(Mat::Identity(1, 1), kOu);
  EXPECT_DOUBLE_EQ(kOu.threshold(), 1.0);
  EXPECT_DOUBLE_EQ(d.lambda_A, 1.5);
  EXPECT_TRUE(d.design_inequality_holds);
  EXPECT_DOUBLE_EQ(d.margin, 0.5);
  EXPECT_DOUBLE_EQ(d.analytic_bound(), -1.0 + 1.0 / 1.5);

  const auto weak = make_design(Mat::Identity(1, 1), Mat::Constant(1, 1, -0.5), kOu);
  EXPECT_FALSE(weak.design_inequality_holds);
  ControlConstants bad = kOu;
  bad.K1 = 0.0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Design, ControlledSystemAddsFeedback) {
  const auto open = ou_open_loop(0.2);
  const auto closed = controlled_system(open, Mat::Constant(1, 1, -3.0));
  const Vec z = v2(0.5, 0.1);
  EXPECT_NEAR(closed.drift(z)[0], open.drift(z)[0] - 1.5, 1e-15);
  EXPECT_EQ(closed.drift(z)[1], open.drift(z)[1]);
}

TEST(WeakStabilization, OuIntegralMatchesClosedForm) {
  const auto cfg = config(1e-3, 200.0, 31, 10);
  for (double kappa : {1.0, 2.0, 5.0}) {
    const auto d = make_design(Mat::Identity(1, 1), Mat::Constant(1, 1, -kappa), kOu);
    const auto r = verify_weak_stabilization(ou_open_loop(), d, kF1, v1(0.0), cfg, 4);
    ASSERT_FALSE(r.diverged_at.has_value());
    const double oracle = -1.0 + 1.0 / (2.0 * kappa);
    EXPECT_NEAR(r.integral_f1.value, oracle, 3.0 * r.integral_f1.std_error) << "kappa=" << kappa;
    EXPECT_TRUE(r.within_bound);
    EXPECT_TRUE(r.negative);
  }
}

TEST(WeakStabilization, NoFeedbackOnUnstableDriftDiverges) {
  const auto d = make_design(Mat::Identity(1, 1), Mat::Zero(1, 1), kOu);
  const auto r = verify_weak_stabilization(ou_open_loop(5.0), d, kF1, v1(1.0), config(1e-3, 20.0, 1), 2);
  ASSERT_TRUE(r.diverged_at.has_value());
  EXPECT_FALSE(r.ok());
  EXPECT_NE(control_csv_row(r).find("diverged"), std::string::npos);
}

TEST(WeakStabilization, StrongerGainLowersIntegral) {
  const auto cfg = config(1e-3, 200.0, 32, 10);
  const auto d1 = make_design(Mat::Identity(1, 1), synthesize_gain(Mat::Identity(1, 1), 2.0), kOu);
  const auto d2 = make_design(Mat::Identity(1, 1), 2.0 * d1.A, kOu);
  const auto r1 = verify_weak_stabilization(ou_open_loop(), d1, kF1, v1(0.0), cfg, 4);
  const auto r2 = verify_weak_stabilization(ou_open_loop(), d2, kF1, v1(0.0), cfg, 4);
  EXPECT_LT(r2.integral_f1.value + 2.0 * combined_stderr(r1.integral_f1, r2.integral_f1),
            r1.integral_f1.value);
}

TEST(WeakStabilization, ClosedLoopDecays) {
  const auto d = design_feedback(Mat::Identity(1, 1), {1.0, 0.0, 1.0, 1.0});
  const auto closed = controlled_system(ou_open_loop(), 2.0 * d.A);
  const auto e = estimate_log_lyapunov_exponent(closed, v1(0.0), v1(1e-3), config(1e-3, 100.0, 4, 20), 20);
  std::size_t negative = 0;
  for (double s : e.slopes) negative += s < 0.0 ? 1 : 0;
  EXPECT_GE(negative, 18u);
}

TEST(WeakStabilization, CsvRowShape) {
  const auto d = make_design(Mat::Identity(1, 1), Mat::Constant(1, 1, -2.0), kOu);
  const auto r = verify_weak_stabilization(ou_open_loop(), d, kF1, v1(0.0), config(1e-2, 50.0, 3), 2);
  const auto h = control_csv_header();
  const auto row = control_csv_row(r);
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_NE(row.find("stabilized"), std::string::npos);
}
