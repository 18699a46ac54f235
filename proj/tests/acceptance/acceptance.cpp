// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "builders.hpp"
#include "jumpstab/jumpstab.hpp"
#include "oracles.hpp"

#ifdef JUMPSTAB_WITH_RUNNER
#include "jumpstab/runner/runner.hpp"
#include "jumpstab/runner/scenarios.hpp"
#endif

using namespace jumpstab;
using namespace jumpstab::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

Mat rot90() {
  Mat j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

// ------------------------------------------------------------ criterion 1

struct ScalarCase {
  double a;
  double s;
  std::vector<std::pair<double, double>> atoms;
};

double closed_form_exponent(const ScalarCase& c) {
  double e = c.a - 0.5 * c.s * c.s;
  for (auto [mark, rate] : c.atoms) e += rate * (std::log(std::abs(1.0 + mark)) - mark);
  return e;
}

void criterion1(Outcome& o) {
  const std::vector<ScalarCase> cases{
      {-1.0, 0.0, {}},
      {0.5, 0.5, {}},
      {0.2, 1.0, {}},
      {0.3, 0.3, {{-0.5, 1.0}}},
      {-0.2, 0.4, {{0.8, 0.5}, {-0.3, 1.0}}},
      {0.1, 0.0, {{-0.9, 0.2}}},
  };
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    Stopwatch sw;
    const auto sys = scalar_linear(c.a, c.s, LevyMeasure::scalar(c.atoms));
    const auto e = estimate_log_lyapunov_exponent(sys, Vec(0), v1(1e-12), config(1e-3, 200.0, seed++, 100), 64);
    const double oracle = closed_form_exponent(c);
    const double err = std::abs(e.exponent.value - oracle);
    const double t = sw.seconds();
    o.detail << " a=" << c.a << ":" << fmt(e.exponent.value) << "/" << fmt(oracle) << "(" << fmt(t, 2) << "s)";
    o.require(err <= 0.05, "exponent off by " + fmt(err));
    o.require(t < 30.0, "run took " + fmt(t) + "s");
  }
}

// ------------------------------------------------------------ criterion 2

void criterion2(Outcome& o) {
  Stopwatch sw;
  const std::vector<std::pair<double, double>> pairs{{1.0, std::sqrt(2.0)}, {2.0, 1.0}, {0.5, 0.5}};
  std::uint64_t seed = 200;
  for (auto [theta, sigma] : pairs) {
    const auto occ = estimate_invariant_measure(ou_coupled(theta, sigma), v1(0.0),
                                                config(1e-3, 1000.0, seed++, 10), 16);
    double m2 = 0.0;
    for (std::size_t k = 0; k < occ.size(); ++k) m2 += occ.weights()[k] * occ.samples()[k].squaredNorm();
    const double oracle = sigma * sigma / (2.0 * theta);
    const double rel = std::abs(m2 - oracle) / oracle;
    o.detail << " theta=" << theta << ":" << fmt(m2) << "/" << fmt(oracle);
    o.require(rel <= 0.05, "relative error " + fmt(rel));
  }
  o.detail << " (" << fmt(sw.seconds(), 3) << "s)";
  o.require(sw.seconds() < 60.0, "took longer than a minute");
}

// ------------------------------------------------------------ criterion 3

struct Sir {
  double c0 = 1, c1 = 1, c2 = 1, c3 = 0.5, c4 = 1, c5 = 1, c6 = 1, c7 = 0.2, sigma1 = 0.2;
  double mark = -0.2, rate = 0.5;
};

CoupledJumpDiffusion sir_system(const Sir& p) {
  auto incidence = [p](double s, double i) {
    return p.c3 * std::max(s, 0.0) / (p.c4 + p.c5 * std::max(s, 0.0) + p.c6 * std::max(i, 0.0));
  };
  SystemSpec spec;
  spec.dims = {1, 1, 1, 1, 0, 1};
  spec.drift1 = DriftField({1, 1}, [=](const Vec& x1, const Vec& x2) {
    return v1(p.c0 - p.c1 * x1[0] - incidence(x1[0], x2[0]) * x2[0]);
  });
  spec.diff1 = DiffusionField({1, 1}, [=](const Vec& x1, const Vec&) { return Mat::Constant(1, 1, p.sigma1 * x1[0]); });
  spec.drift2 = DriftField({1, 1}, [=](const Vec& x1, const Vec& x2) {
    return v1((incidence(x1[0], x2[0]) - p.c2) * x2[0]);
  });
  spec.diff2 = DiffusionField({1, 1}, [=](const Vec&, const Vec& x2) { return Mat::Constant(1, 1, p.c7 * x2[0]); });
  spec.jump2 = JumpField({1, 1}, [](const Vec&, const Vec& x2, const Vec& m) { return v1(m[0] * x2[0]); });
  spec.levy2 = LevyMeasure::scalar({{p.mark, p.rate}});
  return CoupledJumpDiffusion(std::move(spec));
}

/// Exact generator of -ln I on the boundary, which bounds it from below
/// near I = 0.
StabilityHypotheses sir_hypotheses(const Sir& p) {
  StabilityHypotheses h;
  h.V0 = [](const Vec& s) { return s[0]; };
  h.V1 = h.V0;
  const double jumps = p.rate * (p.mark - std::log1p(p.mark));
  h.f1 = [=](const Vec& s) {
    const double sp = std::max(s[0], 0.0);
    return p.c2 + 0.5 * p.c7 * p.c7 + jumps - p.c3 * sp / (p.c4 + p.c5 * sp);
  };
  h.f2 = [](const Vec&) { return 10.0; };
  return h;
}

LyapunovReport sir_verdict(const Sir& p, std::uint64_t seed) {
  const auto sys = sir_system(p);
  const auto cfg = config(1e-3, 100.0, seed, 50);
  const auto occ = estimate_invariant_measure(sys, v1(1.0), cfg, 16);
  VerdictOptions opt;
  opt.ensemble = 32;
  opt.x1_start = v1(1.0);
  opt.x2_scale = 1e-3;
  return stability_verdict(sys, sir_hypotheses(p), occ, cfg, opt);
}

void criterion3(Outcome& o) {
  Stopwatch sw;
  const auto stable = sir_verdict(Sir{}, 300);
  std::size_t fast = 0;
  const auto& slopes = stable.exponent->slopes;
  for (double s : slopes) fast += s <= -0.5 * stable.gamma0 ? 1 : 0;
  const double frac = static_cast<double>(fast) / static_cast<double>(slopes.size());
  o.detail << " lambda1=" << fmt(stable.lambda1.value) << "+-" << fmt(stable.lambda1.std_error)
           << " verdict=" << to_string(stable.verdict) << " gamma0=" << fmt(stable.gamma0)
           << " fraction<=-gamma0/2=" << fmt(frac);
  o.require(stable.verdict == Verdict::kStable, "base set not stable");
  o.require(frac >= 0.9, "too few decaying I-paths");

  Sir endemic;
  endemic.c3 = 6.0;
  const auto other = sir_verdict(endemic, 301);
  o.detail << "; c3=6: lambda1=" << fmt(other.lambda1.value) << " verdict=" << to_string(other.verdict);
  o.require(other.verdict != Verdict::kStable, "large c3 still stable");
  o.detail << " (" << fmt(sw.seconds(), 3) << "s)";
  o.require(sw.seconds() < 120.0, "took longer than two minutes");
}

// ------------------------------------------------------------ criterion 4

CoupledJumpDiffusion mixed_system() {
  SystemSpec spec;
  spec.dims = {1, 1, 1, 1, 1, 1};
  spec.drift1 = DriftField({1, 1}, [](const Vec& x1, const Vec& x2) { return v1(-x1[0] + 0.5 * x2[0]); });
  spec.diff1 = DiffusionField({1, 1}, [](const Vec&, const Vec& x2) { return Mat::Constant(1, 1, 0.6 + 0.1 * x2[0]); });
  spec.jump1 = JumpField({1, 1}, [](const Vec&, const Vec&, const Vec& m) { return v1(m[0]); });
  spec.levy1 = LevyMeasure::scalar({{0.2, 0.5}});
  spec.drift2 = DriftField({1, 1}, [](const Vec& x1, const Vec& x2) { return v1(x2[0] * (-0.5 + 0.3 * x1[0])); });
  spec.diff2 = DiffusionField({1, 1}, [](const Vec&, const Vec& x2) { return Mat::Constant(1, 1, 0.4 * x2[0]); });
  spec.jump2 = JumpField({1, 1}, [](const Vec&, const Vec& x2, const Vec& m) { return v1(m[0] * x2[0]); });
  spec.levy2 = LevyMeasure::scalar({{-0.3, 0.8}, {0.5, 0.4}});
  return CoupledJumpDiffusion(std::move(spec));
}

std::vector<std::pair<std::string, ScalarField>> test_functions() {
  ScalarField sq{[](const Vec& z) { return z.squaredNorm(); },
                 [](const Vec& z) { return Vec(2.0 * z); },
                 [](const Vec& z) { return Mat(2.0 * Mat::Identity(z.size(), z.size())); }};
  ScalarField logq{[](const Vec& z) { return std::log1p(z.squaredNorm()); },
                   [](const Vec& z) { return Vec(2.0 * z / (1.0 + z.squaredNorm())); },
                   [](const Vec& z) {
                     const double q = 1.0 + z.squaredNorm();
                     return Mat(2.0 * Mat::Identity(z.size(), z.size()) / q - 4.0 * z * z.transpose() / (q * q));
                   }};
  ScalarField trig{[](const Vec& z) { return std::sin(z[0]) * std::cos(z[1]); },
                   [](const Vec& z) { return v2(std::cos(z[0]) * std::cos(z[1]), -std::sin(z[0]) * std::sin(z[1])); },
                   [](const Vec& z) {
                     Mat h(2, 2);
                     h << -std::sin(z[0]) * std::cos(z[1]), -std::cos(z[0]) * std::sin(z[1]),
                         -std::cos(z[0]) * std::sin(z[1]), -std::sin(z[0]) * std::cos(z[1]);
                     return h;
                   }};
  return {{"|z|^2", sq}, {"ln(1+|z|^2)", logq}, {"sin*cos", trig}};
}

void criterion4(Outcome& o) {
  const std::vector<std::pair<std::string, std::pair<CoupledJumpDiffusion, Vec>>> systems{
      {"mixed", {mixed_system(), v2(0.7, 0.4)}},
      {"sir", {sir_system(Sir{}), v2(1.0, 0.3)}}};
  const std::vector<double> hs{1e-1, 1e-2, 1e-3};
  for (const auto& [sname, sys] : systems) {
    for (const auto& [gname, g] : test_functions()) {
      const double slope = generator_error_slope(sys.first, g, sys.second, hs);
      o.detail << " " << sname << "/" << gname << ":" << fmt(slope, 3);
      o.require(slope >= 0.8, sname + "/" + gname + " slope " + fmt(slope));
    }
  }
}

// ------------------------------------------------------------ criterion 5

void criterion5(Outcome& o) {
  Stopwatch sw;
  const auto sys = ou_coupled(1.0, 1.0, 0.0, 0.3);
  StabilityHypotheses hyp;
  hyp.f1 = [](const Vec&) { return 1.0 + 0.5 * 0.3 * 0.3; };
  hyp.f2 = [](const Vec&) { return 1.0; };
  const auto ccfg = CouplingConfig::from_estimates(1.0 + 0.5 * 0.3 * 0.3, 1.0, hyp, 0.0, 0.1);
  std::vector<CouplingGridPoint> grid;
  for (double gap : {0.1, 0.5}) {
    for (double delta : {1e-1, 1e-2, 1e-3}) grid.push_back({v1(gap), v1(0.0), delta, std::nullopt});
  }
  const auto r = estimate_coupling_decay(sys, grid, ccfg, config(1e-3, 3.0, 500, 5), 32, 0.1);
  double lo = 1e300, hi = 0.0, worst_freq = 0.0;
  for (const auto& row : r.rows) {
    lo = std::min(lo, row.ratio.value);
    hi = std::max(hi, row.ratio.value);
    worst_freq = std::max(worst_freq, row.budget_frequency);
  }
  o.detail << " ratio range [" << fmt(lo) << ", " << fmt(hi) << "] max/min=" << fmt(hi / lo)
           << " budget frequency " << fmt(worst_freq) << " vs bound " << fmt(r.budget_bound)
           << " (" << fmt(sw.seconds(), 3) << "s)";
  o.require(lo > 0.0 && hi / lo < 100.0, "ratio varies too much");
  o.require(worst_freq <= r.budget_bound / 10.0, "budget frequency above bound/10");
  o.require(sw.seconds() < 120.0, "took longer than two minutes");
}

// ------------------------------------------------------------ criterion 6

LinearizedCoefficients constant_lin(const Mat& B, std::vector<Mat> sigmas,
                                    std::function<Mat(const Vec&)> gamma = {}) {
  LinearizedCoefficients lin;
  lin.l1 = 0;
  lin.l2 = B.rows();
  lin.B2 = [B](const Vec&) { return B; };
  for (const auto& s : sigmas) lin.Sigma2.push_back([s](const Vec&) { return s; });
  if (gamma) lin.Gamma2 = [gamma](const Vec&, const Vec& m) { return gamma(m); };
  return lin;
}

void criterion6(Outcome& o) {
  const std::vector<ScalarCase> scalars{
      {-1.0, 0.0, {}}, {0.3, 0.7, {{-0.45, 1.3}}}, {1.7, 1.1, {{0.8, 0.4}, {-0.2, 2.0}}}};
  std::size_t exact = 0;
  for (const auto& c : scalars) {
    const auto nu = LevyMeasure::scalar(c.atoms);
    const auto lin = constant_lin(Mat::Constant(1, 1, c.a), {Mat::Constant(1, 1, c.s)},
                                  [](const Vec& m) { return Mat(m); });
    const auto occ = sphere_occupation(lin, nu, nullptr, Vec(0), v1(1.0), config(1e-2, 2.0, 1), 2);
    const auto e = stability_integral(lin, occ, nu, H4Variant::kGenerator);
    const bool same = e.value == 2.0 * scalar_exponent(c.a, c.s, nu) && e.std_error == 0.0;
    exact += same ? 1 : 0;
    o.require(same, "scalar identity not exact for a=" + fmt(c.a));
    const double oracle = closed_form_exponent(c);
    o.require(std::abs(scalar_exponent(c.a, c.s, nu) - oracle) <= 1e-14 * (1.0 + std::abs(oracle)),
              "closed form disagrees for a=" + fmt(c.a));
  }
  o.detail << " scalar identity exact " << exact << "/" << scalars.size() << ";";

  struct Bench {
    Mat B;
    std::vector<Mat> sigmas;
    std::vector<std::pair<double, double>> atoms;
    Vec gamma_diag;
  };
  Mat d1(2, 2), d2(2, 2), d3(2, 2);
  d1 << -1.0, 0.0, 0.0, -0.5;
  d2 << -0.5, 0.0, 0.0, -1.5;
  d3 << 0.2, 0.0, 0.0, -1.0;
  Mat s1(2, 2);
  s1 << 0.5, 0.0, 0.0, 0.2;
  const std::vector<Bench> benches{
      {d1 + rot90(), {s1, 0.3 * rot90()}, {{0.5, 0.5}}, v2(1.0, 0.3)},
      {d2 + 2.0 * rot90(), {0.4 * Mat::Identity(2, 2)}, {}, v2(1.0, 1.0)},
      {d3 + 0.5 * rot90(), {0.3 * rot90()}, {{-0.4, 0.7}}, v2(1.0, 0.5)},
  };
  std::uint64_t seed = 600;
  for (const auto& b : benches) {
    const auto nu = LevyMeasure::scalar(b.atoms);
    const Vec gd = b.gamma_diag;
    const auto lin = constant_lin(b.B, b.sigmas, b.atoms.empty() ? std::function<Mat(const Vec&)>()
                                                                 : [gd](const Vec& m) { return Mat(m[0] * gd.asDiagonal()); });
    const auto cfg = config(1e-3, 100.0, seed++, 20);
    const auto occ = sphere_occupation(lin, nu, nullptr, Vec(0), v2(1.0, 0.0), cfg, 32);
    const auto integral = stability_integral(lin, occ, nu);
    const auto direct = estimate_log_lyapunov_exponent(linearized_system(lin, nu, SystemSpec{}), Vec(0),
                                                       v2(1.0, 0.0), cfg, 32);
    const double diff = std::abs(0.5 * integral.value - direct.exponent.value);
    o.detail << " sphere " << fmt(0.5 * integral.value) << " vs direct " << fmt(direct.exponent.value);
    o.require(diff <= 0.05, "2-D benchmark differs by " + fmt(diff));
  }
}

// ------------------------------------------------------------ criterion 7

FastSlowSystem tanh_benchmark(double eps) {
  const double b = 0.5, s = 0.5;
  Mat D(2, 2);
  D << 1.0, 0.0, 0.0, -1.0;
  const MatrixField B2 = [D, b](const Vec& y1) -> Mat { return -Mat::Identity(2, 2) + b * std::tanh(y1[0]) * D; };
  const Mat S = s * rot90();
  FastSlowSpec spec;
  spec.dims = {1, 2, 1, 1, 0, 0};
  spec.drift1 = DriftField({1, 1}, [](const Vec& y1, const Vec&) { return Vec(-y1); });
  spec.diff1 = DiffusionField({1, 1}, [](const Vec&, const Vec&) { return Mat::Constant(1, 1, std::sqrt(2.0)); });
  spec.drift2 = DriftField({2, 1}, [B2](const Vec& y1, const Vec& y2) -> Vec { return B2(y1) * y2; });
  spec.sigma2 = [S](const Vec& y2) { return Mat(S * y2); };
  spec.B2 = B2;
  spec.Sigma2 = {S};
  return FastSlowSystem(std::move(spec), eps);
}

void criterion7(Outcome& o) {
  Stopwatch sw;
  const auto cfg = config(1e-3, 200.0, 700, 20);
  const auto star = lambda_star(tanh_benchmark(0.1), v1(0.0), v2(1.0, 0.0), cfg, 8);
  const Estimate limit = star.value.generator;
  std::vector<Estimate> lambdas;
  for (double eps : {1.0, 0.3, 0.1, 0.03}) {
    lambdas.push_back(lambda_eps(tanh_benchmark(eps), v1(0.0), v2(1.0, 0.0), cfg, 8).generator);
    o.detail << " eps=" << eps << ":" << fmt(lambdas.back().value);
  }
  o.detail << " star=" << fmt(limit.value) << "+-" << fmt(limit.std_error);
  for (std::size_t k = 0; k + 1 < lambdas.size(); ++k) {
    const double d0 = std::abs(lambdas[k].value - limit.value);
    const double d1 = std::abs(lambdas[k + 1].value - limit.value);
    const double slack = combined_stderr(lambdas[k], lambdas[k + 1]);
    o.require(d1 <= d0 + slack, "distance increased at step " + std::to_string(k));
  }
  const auto avg = averaged_linear_system(tanh_benchmark(0.1), star.B_bar);
  const auto direct = estimate_log_lyapunov_exponent(avg, Vec(0), v2(1.0, 0.0), cfg, 16);
  const double diff = std::abs(direct.exponent.value - 0.5 * limit.value);
  o.detail << "; averaged system " << fmt(direct.exponent.value) << " vs " << fmt(0.5 * limit.value)
           << " (" << fmt(sw.seconds(), 3) << "s)";
  o.require(diff <= 0.05, "averaged exponent off by " + fmt(diff));
  o.require(sw.seconds() < 300.0, "took longer than five minutes");
}

// ------------------------------------------------------------ criterion 8

CoupledJumpDiffusion control_plant() {
  SystemSpec spec;
  spec.dims = {1, 1, 1, 1, 0, 0};
  spec.drift1 = DriftField::zero({1, 1});
  spec.diff1 = DiffusionField({1, 1}, [](const Vec&, const Vec&) { return Mat::Ones(1, 1); });
  const double s = 0.2;
  spec.drift2 = DriftField({1, 1}, [s](const Vec& x1, const Vec& x2) {
    return Vec(x2 * (x1[0] * x1[0] - 1.0 + 0.5 * s * s));
  });
  spec.diff2 = DiffusionField({1, 1}, [s](const Vec&, const Vec& x2) { return Mat(s * x2); });
  return CoupledJumpDiffusion(std::move(spec));
}

double lambda_by_angle_grid(const Mat& Q, const Mat& A) {
  const Mat QA = Q * A;
  double best = -1e300;
  const int n = 400000;
  for (int k = 0; k < n; ++k) {
    const double t = std::numbers::pi * k / n;
    const Vec x = v2(std::cos(t), std::sin(t));
    best = std::max(best, x.dot(QA * x));
  }
  return -best;
}

void criterion8(Outcome& o) {
  std::mt19937_64 eng(800);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Mat M(2, 2), A(2, 2);
    for (int i = 0; i < 4; ++i) {
      M(i / 2, i % 2) = nd(eng);
      A(i / 2, i % 2) = nd(eng);
    }
    const Mat Q = M * M.transpose() + 0.5 * Mat::Identity(2, 2);
    worst = std::max(worst, std::abs(compute_lambda_A(Q, A) - lambda_by_angle_grid(Q, A)));
  }
  o.detail << " lambda_A max deviation " << fmt(worst, 3) << ";";
  o.require(worst <= 1e-6, "lambda_A deviates from sampling");

  const ControlConstants constants{1.0, 0.0, 1.0, 1.0};
  const ScalarFn f1 = [](const Vec& x1) { return -1.0 + x1.squaredNorm(); };
  std::uint64_t seed = 810;
  for (double kappa : {1.0, 2.0, 5.0}) {
    const auto d = make_design(Mat::Identity(1, 1), Mat::Constant(1, 1, -kappa), constants);
    const auto r = verify_weak_stabilization(control_plant(), d, f1, v1(0.0), config(1e-3, 400.0, seed++, 10), 32);
    const double oracle = -1.0 + 1.0 / (2.0 * kappa);
    const bool ok = !r.diverged_at && std::abs(r.integral_f1.value - oracle) <= 3.0 * r.integral_f1.std_error;
    o.detail << " kappa=" << kappa << ":" << fmt(r.integral_f1.value) << "+-" << fmt(r.integral_f1.std_error, 2)
             << "/" << fmt(oracle);
    o.require(ok, "integral of f1 outside 3 stderr for kappa=" + fmt(kappa));
  }

  const auto design = design_feedback(Mat::Identity(1, 1), constants);
  const auto closed = controlled_system(control_plant(), design.A);
  const auto e = estimate_log_lyapunov_exponent(closed, v1(0.0), v1(1e-3), config(1e-3, 100.0, 820, 20), 32);
  std::size_t decaying = 0;
  for (double s : e.slopes) decaying += s < 0.0 ? 1 : 0;
  const double frac = static_cast<double>(decaying) / static_cast<double>(e.slopes.size());
  o.detail << "; controlled system decays in " << fmt(frac) << " of paths (exponent "
           << fmt(e.exponent.value) << ")";
  o.require(frac >= 0.9, "controlled system decays in too few paths");
}

// ------------------------------------------------------------ criterion 9

IntMat random_spanning_graph(int n, std::mt19937_64& eng) {
  IntMat a = IntMat::Zero(n + 1, n + 1);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), eng);
  std::vector<int> attached{0};
  for (int node : order) {
    std::uniform_int_distribution<std::size_t> pick(0, attached.size() - 1);
    const int parent = attached[pick(eng)];
    if (parent == 0) {
      a(node, 0) = 1;
    } else {
      a(node, parent) = a(parent, node) = 1;
    }
    attached.push_back(node);
  }
  std::bernoulli_distribution extra(0.25);
  for (int i = 1; i <= n; ++i) {
    if (extra(eng)) a(i, 0) = 1;
    for (int j = i + 1; j <= n; ++j) {
      if (extra(eng)) a(i, j) = a(j, i) = 1;
    }
  }
  return a;
}

/// Degree-minus-adjacency of the follower block plus leader links, built
/// directly from the adjacency.
IntMat reference_H(const IntMat& a) {
  const int n = static_cast<int>(a.rows()) - 1;
  IntMat h = IntMat::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (j == i || a(i, j) == 0) continue;
      h(i - 1, i - 1) += 1;
      if (j > 0) h(i - 1, j - 1) -= 1;
    }
  }
  return h;
}

void criterion9(Outcome& o) {
  const auto path = laplacian_from_adjacency(parse_edge_list("0 1\n1 2\n2 3"));
  Mat K(2, 2), B(2, 2);
  K << 1.0, 0.2, 0.2, 0.8;
  B << 1.0, 0.0, 0.3, 1.0;
  const auto noise = NoiseModel::uniform(3, 0.3, LevyMeasure::scalar({{0.4, 2.0}, {-0.2, 1.0}}), 0.5);
  const AgentDrift f = [](const Vec& x) { return Vec(-x + 0.3 * x.array().sin().matrix()); };
  const Vec x0 = v2(0.4, -0.2);
  Vec err(6);
  err << 1.0, -0.5, 0.3, 0.8, -0.2, 0.6;
  const auto cfg = config(1e-4, 1.0, 900, 1);
  const auto net = simulate_network(path, {K, B}, noise, f, x0, err + x0.replicate(3, 1), cfg, 0);
  const auto sys = simulate_error_system(path, {K, B}, noise, f, x0, err, cfg, 0);
  double sup = 0.0;
  for (std::size_t k = 0; k < net.error.size(); ++k) {
    sup = std::max(sup, (net.error[k] - sys.error[k]).cwiseAbs().maxCoeff());
  }
  o.detail << " network/error sup " << fmt(sup, 3) << ";";
  o.require(sup <= 1e-8, "network and error system differ");

  const auto star = laplacian_from_adjacency(parse_edge_list("0 1\n0 2\n0 3"));
  const ConsensusProtocol unit{Mat::Identity(1, 1), Mat::Identity(1, 1)};
  const AgentDrift zero = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  const auto quiet = consentability_verdict(star, unit, NoiseModel::uniform(3, 0.0, {}, 0.2), zero, v1(0.5),
                                            Vec::Constant(3, 1.0), config(1e-3, 10.0, 901, 10), 4);
  double worst = 0.0;
  for (double e : quiet.exponents) worst = std::max(worst, std::abs(e + 1.0));
  o.detail << " star exponent " << fmt(quiet.exponents.front()) << ";";
  o.require(worst <= 0.02, "star exponent off by " + fmt(worst));

  const ConsensusProtocol off{Mat::Zero(1, 1), Mat::Identity(1, 1)};
  const AgentDrift expanding = [](const Vec& x) { return Vec(0.5 * x); };
  const auto no_gain = consentability_verdict(path, off, NoiseModel::uniform(3, 0.1, {}, 0.2), expanding, v1(0.0),
                                              Vec::Constant(3, 0.1), config(1e-3, 20.0, 902, 10), 8);
  o.detail << " K=0 " << (no_gain.consentable ? "consentable-indicated" : "not-consentable") << ";";
  o.require(!no_gain.consentable, "K = 0 reported consentable");

  std::mt19937_64 eng(903);
  int exact = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 10;
    const IntMat a = random_spanning_graph(n, eng);
    const auto g = laplacian_from_adjacency(a);
    const bool same = g.H_tilde() == reference_H(a) &&
                      reconstruct_H_tilde(selector_matrices(g), n) == g.H_tilde();
    exact += same ? 1 : 0;
  }
  o.detail << " selector identity " << exact << "/50";
  o.require(exact == 50, "selector identity failed");
}

// ------------------------------------------------------------ criterion 10

#ifdef JUMPSTAB_WITH_RUNNER
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion10(Outcome& o) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "jumpstab_acceptance";
  fs::remove_all(base);
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(JUMPSTAB_SCENARIO_DIR)) {
    if (entry.path().extension() == ".ini") configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());
  std::size_t identical = 0;
  for (const auto& path : configs) {
    auto cfg = runner::load_scenario_config(path.string());
    std::vector<runner::RunSummary> runs;
    for (const char* tag : {"a", "b"}) {
      cfg.output_dir = (base / path.stem() / tag).string();
      runs.push_back(runner::run_scenario(cfg));
    }
    bool same = true;
    for (const auto& file : runs[0].files) {
      if (file == "manifest.json") continue;
      same = same && slurp(fs::path(runs[0].output_dir) / file) == slurp(fs::path(runs[1].output_dir) / file);
    }
    identical += same ? 1 : 0;
    o.require(same, path.stem().string() + " outputs differ");
  }
  o.detail << " " << identical << "/" << configs.size() << " scenarios byte-identical";
  o.require(!configs.empty(), "no scenario files found");
  fs::remove_all(base);
}
#else
void criterion10(Outcome& o) { o.require(false, "runner not built"); }
#endif

}  // namespace

int main() {
  const std::vector<std::function<void(Outcome&)>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    Stopwatch sw;
    try {
      criteria[k](o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " ("
              << fmt(sw.seconds(), 3) << "s)" << o.detail.str() << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
