#include "jumpstab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jumpstab/ensemble.hpp"

namespace jumpstab {

double alpha0_supremum(double alpha0) {
  const double t = 4.0 / alpha0;
  return t * t * std::exp(-2.0);
}

void CouplingConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw ValidationError("coupling config: " + what);
  };
  if (!(K2 >= 0.0)) fail("K2 must be nonnegative");
  if (!(lambda > 20.0 * (1.0 + K2))) {
    std::ostringstream os;
    os << "lambda=" << lambda << " must exceed 20(1+K2)=" << 20.0 * (1.0 + K2);
    fail(os.str());
  }
  if (!(gamma0 > 0.0)) fail("gamma0 must be positive");
  if (!(lambda0 > 0.0 && lambda0 < gamma0 / 4.0)) {
    fail("lambda0 must lie in (0, gamma0/4)");
  }
  if (!(varsigma0 > 0.0)) fail("varsigma0 must be positive");
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (!(alpha0 > 0.0)) fail("alpha0 must be positive");
  if (!(delta > 0.0)) fail("delta must be positive");
  if (!(c_sigma > 0.0)) fail("c_sigma must be positive");
  if (!(C_alpha0 > 1.0)) fail("C_alpha0 must exceed 1");
  const double t_max = 40.0 / alpha0;
  for (int k = 0; k <= 4000; ++k) {
    const double t = t_max * k / 4000.0;
    if (t * t * std::exp(-0.5 * alpha0 * t) > C_alpha0) {
      fail("C_alpha0 is below sup t^2 exp(-alpha0 t/2)");
    }
  }
}

CouplingConfig CouplingConfig::from_estimates(double Lambda1, double Lambda2,
                                              const StabilityHypotheses& hyp,
                                              double K2, double delta) {
  if (!(Lambda1 > 0.0)) {
    throw ValidationError("coupling constants need Lambda1 > 0");
  }
  if (!(Lambda2 > 0.0)) {
    throw ValidationError("coupling constants need Lambda2 > 0");
  }
  CouplingConfig c;
  c.K2 = K2;
  c.lambda = 25.0 * (1.0 + K2);
  c.gamma0 = Lambda1 / (2.0 * hyp.m0);
  c.varsigma0 = (Lambda1 - hyp.m0 * c.gamma0) / 3.0;
  c.alpha0 = hyp.alpha0;
  c.C_alpha0 = 1.05 * std::max(1.0, alpha0_supremum(hyp.alpha0));
  c.alpha = c.varsigma0 / (2.0 * c.C_alpha0 * Lambda2);
  c.lambda0 = c.gamma0 / 8.0;
  c.delta = delta;
  c.c_sigma = hyp.c_sigma;
  c.validate();
  return c;
}

CoupledTriple simulate_coupled_triple(const CoupledJumpDiffusion& system,
                                      const Vec& x1_0, const Vec& x1_tilde_0,
                                      const Vec& x2_tilde_0,
                                      const CouplingConfig& ccfg,
                                      const IntegratorConfig& cfg,
                                      std::uint64_t path_index) {
  ccfg.validate();
  cfg.validate();
  const auto& d = system.dims();
  if (x1_0.size() != d.l1 || x1_tilde_0.size() != d.l1 ||
      x2_tilde_0.size() != d.l2) {
    throw ValidationError("coupled triple: initial state dimension mismatch");
  }
  const auto c1 = system.component1();
  const auto c2 = system.component2();

  Rng w1(cfg.master_seed, path_index, Channel::kBrownian1);
  Rng n1(cfg.master_seed, path_index, Channel::kJumps1);
  Rng w2(cfg.master_seed, path_index, Channel::kBrownian2);
  Rng n2(cfg.master_seed, path_index, Channel::kJumps2);

  CoupledTriple out;
  Vec x1 = x1_0;
  Vec xt1 = x1_tilde_0;
  Vec xt2 = x2_tilde_0;
  const Vec zero2 = Vec::Zero(d.l2);
  auto push = [&](double t) {
    out.times.push_back(t);
    out.x1.push_back(x1);
    out.x1_tilde.push_back(xt1);
    out.x2_tilde.push_back(xt2);
  };
  push(0.0);

  const std::int64_t n = cfg.steps();
  const double relax = ccfg.lambda * cfg.dt;
  ChannelNoise noise1;
  ChannelNoise noise2;
  for (std::int64_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    draw_noise(w1, n1, d.d1, c1.levy, cfg.dt, 1.0, noise1);
    draw_noise(w2, n2, d.d2, c2.levy, cfg.dt, 1.0, noise2);
    const Vec inc_boundary = euler_increment(c1, x1, zero2, noise1, cfg.dt);
    Vec inc_tilde1 = euler_increment(c1, xt1, xt2, noise1, cfg.dt);
    inc_tilde1 += (x1 - xt1) * relax;
    const Vec inc_tilde2 = euler_increment(c2, xt1, xt2, noise2, cfg.dt);
    x1 += inc_boundary;
    xt1 += inc_tilde1;
    xt2 += inc_tilde2;
    if (!state_ok(x1, Vec()) || !state_ok(xt1, xt2)) {
      std::ostringstream os;
      os << "coupled triple diverged at t=" << t;
      throw DivergenceError(t, os.str());
    }
    if (k % cfg.record_stride == 0 || k == n) push(t);
  }
  return out;
}

std::optional<double> stopping_time_tau_delta(const CoupledTriple& triple,
                                              const CouplingConfig& ccfg) {
  for (std::size_t k = 0; k < triple.times.size(); ++k) {
    const double t = triple.times[k];
    if (triple.x2_tilde[k].norm() >= ccfg.delta * std::exp(-ccfg.gamma0 * t)) {
      return t;
    }
  }
  return std::nullopt;
}

Mat right_inverse(const Mat& m) {
  if (m.rows() == 0) return Mat::Zero(m.cols(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  const double cutoff = 1e-10 * smax;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) ++rank;
  }
  if (!(smax > 0.0) || rank < m.rows()) {
    std::ostringstream os;
    os << "diffusion matrix has rank " << rank << " < " << m.rows()
       << "; no bounded right inverse (sigma1 must be right-invertible near "
          "the boundary)";
    throw AssumptionViolation(os.str());
  }
  Vec inv_s = s.head(rank).cwiseInverse();
  return svd.matrixV().leftCols(rank) * inv_s.asDiagonal() *
         svd.matrixU().leftCols(rank).transpose();
}

Vec girsanov_drift(const CoupledJumpDiffusion& system, const Vec& x1,
                   const Vec& x1_tilde, double lambda) {
  const Mat sigma = system.spec().diff1(x1, Vec::Zero(system.dims().l2));
  return lambda * (right_inverse(sigma) * (x1 - x1_tilde));
}

double drift_budget(const CoupledJumpDiffusion& system,
                    const CoupledTriple& triple, const CouplingConfig& ccfg,
                    std::optional<double> tau) {
  CompensatedSum acc;
  for (std::size_t k = 0; k + 1 < triple.times.size(); ++k) {
    if (tau && triple.times[k] >= *tau) break;
    const double h = triple.times[k + 1] - triple.times[k];
    if ((triple.x1[k] - triple.x1_tilde[k]).squaredNorm() == 0.0) continue;
    const Vec v = girsanov_drift(system, triple.x1[k], triple.x1_tilde[k],
                                 ccfg.lambda);
    acc.add(v.squaredNorm() * h);
  }
  return acc.value();
}

CouplingDecayReport estimate_coupling_decay(
    const CoupledJumpDiffusion& system,
    const std::vector<CouplingGridPoint>& grid, const CouplingConfig& ccfg,
    const IntegratorConfig& cfg, std::size_t ensemble, double epsilon) {
  if (grid.empty()) throw ValidationError("coupling decay grid is empty");
  if (ensemble == 0) throw ValidationError("ensemble must be positive");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");

  CouplingDecayReport report;
  report.epsilon = epsilon;
  for (const auto& point : grid) {
    CouplingConfig local = ccfg;
    local.delta = point.delta;
    local.validate();
    Vec x2t0 = Vec::Zero(system.dims().l2);
    if (point.x2_tilde_0) {
      x2t0 = *point.x2_tilde_0;
    } else if (x2t0.size() > 0) {
      x2t0[0] = 0.5 * point.delta;
    }
    const double gap0 = (point.x1_0 - point.x1_tilde_0).norm();
    const double scale = (gap0 + point.delta) * (gap0 + point.delta);

    struct PathResult {
      double sup = 0.0;
      bool hit = false;
      double budget = 0.0;
    };
    auto results = run_ensemble(ensemble, cfg.threads, [&](std::size_t i) {
      const auto triple = simulate_coupled_triple(
          system, point.x1_0, point.x1_tilde_0, x2t0, local, cfg, i);
      const auto tau = stopping_time_tau_delta(triple, local);
      PathResult r;
      r.hit = tau.has_value();
      for (std::size_t k = 0; k < triple.times.size(); ++k) {
        if (tau && triple.times[k] > *tau) break;
        const double w = std::exp(local.lambda0 * triple.times[k]) *
                         (triple.x1[k] - triple.x1_tilde[k]).squaredNorm();
        r.sup = std::max(r.sup, w);
      }
      r.budget = drift_budget(system, triple, local, tau);
      return r;
    });

    std::vector<double> sups;
    std::vector<double> ratios;
    std::size_t hits = 0;
    std::size_t exceed = 0;
    for (const auto& r : results) {
      sups.push_back(r.sup);
      ratios.push_back(r.sup / scale);
      if (r.hit) ++hits;
      if (r.budget >= scale / epsilon) ++exceed;
    }
    CouplingDecayRow row;
    row.gap0 = gap0;
    row.delta = point.delta;
    row.sup_weighted_gap = iid_estimate(sups);
    row.ratio = iid_estimate(ratios);
    row.tau_hit_fraction = static_cast<double>(hits) / static_cast<double>(ensemble);
    row.budget_frequency = static_cast<double>(exceed) / static_cast<double>(ensemble);
    report.c_tilde_hat = std::max(report.c_tilde_hat, row.ratio.value);
    report.rows.push_back(row);
  }
  report.budget_bound = std::max(report.c_tilde_hat, 1.0) * ccfg.lambda *
                        ccfg.c_sigma * epsilon / ccfg.lambda0;
  return report;
}

std::string coupling_csv_header() {
  return "index,gap0,delta,sup_mean,sup_stderr,ratio,ratio_stderr,"
         "tau_hit_fraction,budget_frequency";
}

std::string coupling_csv_row(std::size_t index, const CouplingDecayRow& row) {
  std::ostringstream os;
  os << index << ',' << format_real(row.gap0) << ',' << format_real(row.delta)
     << ',' << format_real(row.sup_weighted_gap.value) << ','
     << format_real(row.sup_weighted_gap.std_error) << ','
     << format_real(row.ratio.value) << ',' << format_real(row.ratio.std_error)
     << ',' << format_real(row.tau_hit_fraction) << ','
     << format_real(row.budget_frequency);
  return os.str();
}

}  // namespace jumpstab
