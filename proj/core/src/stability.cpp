#include "jumpstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "jumpstab/ensemble.hpp"
#include "jumpstab/generator.hpp"
#include "jumpstab/rng.hpp"

namespace jumpstab {

ScalarFn log_barrier() {
  return [](const Vec& x2) { return std::max(-std::log(x2.norm()), 0.0); };
}

void StabilityHypotheses::validate() const {
  if (!f1) throw ValidationError("stability hypotheses need f1");
  for (double c : {m0, alpha0, delta0, c_sigma, K3, K4, K5}) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ValidationError("stability constants must be positive and finite");
    }
  }
}

namespace {

Vec random_direction(Rng& rng, Eigen::Index dim) {
  Vec v(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
  } while (v.norm() == 0.0);
  return v.normalized();
}

Vec random_box_point(Rng& rng, Eigen::Index dim, double radius) {
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = radius * (2.0 * rng.uniform() - 1.0);
  return v;
}

void record(HypothesisCheck& c, double margin, bool strict = false) {
  ++c.samples;
  if (c.samples == 1 || margin < c.worst_margin) c.worst_margin = margin;
  if (strict ? !(margin > 0.0) : !(margin >= 0.0)) c.passed = false;
}

}  // namespace

HypothesisCheck StabilityHypotheses::check_log_growth(Eigen::Index l2,
                                                      std::size_t samples,
                                                      std::uint64_t seed) const {
  HypothesisCheck c{"log-growth of U", true, 0, 0.0};
  Rng rng(seed, 0, Channel::kSampling);
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec a = std::pow(10.0, -8.0 * rng.uniform()) * random_direction(rng, l2);
    const Vec b = std::pow(10.0, -8.0 * rng.uniform()) * random_direction(rng, l2);
    const double lhs = U(a) - U(b);
    const double rhs = m0 * std::log(b.norm() / a.norm());
    // Round-off allowance on the logarithms.
    const double slack = 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs));
    record(c, rhs - lhs + slack);
  }
  return c;
}

HypothesisCheck StabilityHypotheses::check_domination(Eigen::Index l1,
                                                      std::size_t samples,
                                                      double radius,
                                                      std::uint64_t seed) const {
  HypothesisCheck c{"|f1| + f2 < K5 V1", true, 0, 0.0};
  if (!V1) throw ValidationError("check_domination needs V1");
  Rng rng(seed, 0, Channel::kSampling);
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec x1 = random_box_point(rng, l1, radius);
    const double f2v = f2 ? f2(x1) : 0.0;
    const double margin = K5 * V1(x1) - std::abs(f1(x1)) - f2v;
    record(c, margin, /*strict=*/true);
  }
  return c;
}

HypothesisCheck StabilityHypotheses::check_blowup(Eigen::Index l2) const {
  HypothesisCheck c{"U blows up at 0", true, 0, 0.0};
  Vec e = Vec::Zero(l2);
  e[0] = 1.0;
  double previous = U(0.1 * e);
  for (int k = 2; k <= 8; ++k) {
    const double current = U(std::pow(10.0, -k) * e);
    record(c, current - previous, /*strict=*/true);
    previous = current;
  }
  return c;
}

HypothesisCheck StabilityHypotheses::check_foster_lyapunov(
    const CoupledJumpDiffusion& system, std::size_t samples, double radius,
    std::uint64_t seed) const {
  HypothesisCheck c{"L V0 <= K3 - K4 V1 on x2 = 0", true, 0, 0.0};
  if (!V0 || !V1) throw ValidationError("check_foster_lyapunov needs V0 and V1");
  const auto& d = system.dims();
  ScalarField g;
  g.value = [&](const Vec& z) { return V0(z.head(d.l1)); };
  Rng rng(seed, 0, Channel::kSampling);
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec x1 = random_box_point(rng, d.l1, radius);
    const Vec z = stack(x1, Vec::Zero(d.l2));
    const double lv = apply_generator(system, g, z);
    record(c, K3 - K4 * V1(x1) - lv);
  }
  return c;
}

OccupationMeasure::OccupationMeasure(std::vector<Vec> samples,
                                     std::vector<double> weights,
                                     double burn_in)
    : samples_(std::move(samples)), weights_(std::move(weights)),
      burn_in_(burn_in) {
  if (samples_.empty()) throw ValidationError("occupation measure is empty");
  if (samples_.size() != weights_.size()) {
    throw ValidationError("occupation samples and weights differ in length");
  }
  CompensatedSum total;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("occupation weights must be nonnegative");
    }
    total.add(w);
  }
  if (!(total.value() > 0.0)) {
    throw ValidationError("occupation weights sum to zero");
  }
  for (double& w : weights_) w /= total.value();
  CompensatedSum check;
  for (double w : weights_) check.add(w);
  if (std::abs(check.value() - 1.0) > 1e-12) {
    throw ValidationError("occupation weights do not normalize");
  }
  const Eigen::Index dim = samples_.front().size();
  for (const auto& s : samples_) {
    if (s.size() != dim) {
      throw ValidationError("occupation samples differ in dimension");
    }
  }
}

OccupationMeasure OccupationMeasure::uniform(std::vector<Vec> samples,
                                             double burn_in) {
  std::vector<double> w(samples.size(), 1.0);
  return OccupationMeasure(std::move(samples), std::move(w), burn_in);
}

Vec OccupationMeasure::mean() const {
  Vec m = Vec::Zero(dim());
  std::vector<double> coord(samples_.size());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    for (std::size_t k = 0; k < samples_.size(); ++k) coord[k] = samples_[k][i];
    m[i] = weighted_mean(coord, weights_);
  }
  return m;
}

OccupationMeasure estimate_invariant_measure(const CoupledJumpDiffusion& system,
                                             const Vec& x1_0,
                                             const IntegratorConfig& cfg,
                                             std::size_t ensemble) {
  if (ensemble == 0) throw ValidationError("ensemble must be positive");
  cfg.validate();
  const double burn_in = kBurnInFraction * cfg.horizon;
  auto paths = run_ensemble(ensemble, cfg.threads, [&](std::size_t i) {
    return simulate_boundary_x1(system, x1_0, cfg, i);
  });
  std::vector<Vec> samples;
  for (auto& p : paths) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p.times[k] >= burn_in) samples.push_back(std::move(p.states[k].x1));
    }
  }
  return OccupationMeasure::uniform(std::move(samples), burn_in);
}

Estimate estimate_lambda(const OccupationMeasure& occ, const ScalarFn& f) {
  std::vector<double> values;
  values.reserve(occ.size());
  for (const auto& s : occ.samples()) values.push_back(f(s));
  return batch_means(values, occ.weights());
}

SlopeFit fit_log_slope(const std::vector<double>& times,
                       const std::vector<double>& magnitudes,
                       double absorption_level) {
  SlopeFit fit;
  if (times.empty()) return fit;
  for (double m : magnitudes) {
    if (!(m >= absorption_level)) {
      fit.absorbed = true;
      return fit;
    }
  }
  const double cut = 0.5 * times.back();
  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= cut) {
      t.push_back(times[k]);
      y.push_back(std::log(magnitudes[k]));
    }
  }
  if (t.size() >= 3) fit.slope = least_squares_slope(t, y);
  return fit;
}

ExponentEstimate estimate_log_lyapunov_exponent(
    const CoupledJumpDiffusion& system, const Vec& x1_0, const Vec& x2_0,
    const IntegratorConfig& cfg, std::size_t ensemble,
    const ExponentOptions& options) {
  if (ensemble == 0) throw ValidationError("ensemble must be positive");
  if (x2_0.size() == 0 || x2_0.norm() == 0.0) {
    throw ValidationError("exponent estimation needs x2(0) != 0");
  }
  cfg.validate();
  ExponentEstimate out;
  out.floor = (std::log(options.absorption_level) - std::log(x2_0.norm())) /
              cfg.horizon;

  IntegrationOptions io;
  io.log_jumps = false;
  auto fits = run_ensemble(ensemble, cfg.threads, [&](std::size_t i) {
    auto r = integrate(system, x1_0, x2_0, cfg, i, io);
    std::vector<double> mags;
    mags.reserve(r.path.size());
    for (const auto& s : r.path.states) mags.push_back(s.x2.norm());
    return std::pair{fit_log_slope(r.path.times, mags, options.absorption_level),
                     r.diverged_at.has_value()};
  });

  for (const auto& [fit, diverged] : fits) {
    if (fit.absorbed) {
      ++out.absorbed;
      out.slopes.push_back(out.floor);
    } else if (fit.slope) {
      out.slopes.push_back(*fit.slope);
      if (diverged) ++out.diverged;
    } else {
      ++out.diverged;
    }
  }
  if (out.slopes.empty()) {
    throw DivergenceError(cfg.horizon,
                          "every path diverged before an exponent could be fitted");
  }
  out.exponent = iid_estimate(out.slopes);
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kStable:
      return "stable";
    case Verdict::kInconclusive:
      return "inconclusive";
    case Verdict::kUnstableIndicated:
      return "unstable-indicated";
  }
  return "inconclusive";
}

LyapunovReport stability_verdict(const CoupledJumpDiffusion& system,
                                 const StabilityHypotheses& hyp,
                                 const OccupationMeasure& occ,
                                 const IntegratorConfig& cfg,
                                 const VerdictOptions& options) {
  hyp.validate();
  const auto& d = system.dims();
  if (occ.dim() != d.l1) {
    throw ValidationError("occupation dimension does not match l1");
  }
  LyapunovReport r;
  r.m0 = hyp.m0;
  r.lambda1 = estimate_lambda(occ, hyp.f1);
  if (hyp.f2) r.lambda2 = estimate_lambda(occ, hyp.f2);

  const bool stable = r.lambda1.value - 2.0 * r.lambda1.std_error > 0.0;
  if (stable) r.gamma0 = r.lambda1.value / (2.0 * hyp.m0);

  if (options.ensemble > 0 && d.l2 > 0) {
    const Vec x1 = options.x1_start ? *options.x1_start : occ.mean();
    Vec x2 = Vec::Zero(d.l2);
    x2[0] = options.x2_scale;
    r.exponent = estimate_log_lyapunov_exponent(system, x1, x2, cfg,
                                                options.ensemble);
  }

  if (stable) {
    r.verdict = Verdict::kStable;
    if (r.exponent) {
      r.agreement = r.exponent->exponent.value <= -r.gamma0 + options.tolerance;
    }
  } else if (r.exponent && r.exponent->exponent.value -
                                   2.0 * r.exponent->exponent.std_error >
                               0.0) {
    r.verdict = Verdict::kUnstableIndicated;
  } else {
    r.verdict = Verdict::kInconclusive;
  }
  return r;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string lyapunov_csv_header() {
  return "lambda1,lambda1_stderr,lambda2,lambda2_stderr,m0,gamma0,"
         "exponent,exponent_stderr,agreement,verdict";
}

std::string lyapunov_csv_row(const LyapunovReport& r) {
  std::ostringstream os;
  os << format_real(r.lambda1.value) << ',' << format_real(r.lambda1.std_error)
     << ',' << format_real(r.lambda2.value) << ','
     << format_real(r.lambda2.std_error) << ',' << format_real(r.m0) << ','
     << format_real(r.gamma0) << ',';
  if (r.exponent) {
    os << format_real(r.exponent->exponent.value) << ','
       << format_real(r.exponent->exponent.std_error);
  } else {
    os << ',';
  }
  os << ',';
  if (r.agreement) os << (*r.agreement ? "true" : "false");
  os << ',' << to_string(r.verdict);
  return os.str();
}

}  // namespace jumpstab
