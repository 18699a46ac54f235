#include "jumpstab/polar.hpp"

#include <cmath>
#include <sstream>

#include "jumpstab/ensemble.hpp"
#include "jumpstab/rng.hpp"

namespace jumpstab {

Mat LinearizedCoefficients::B(const Vec& y1) const {
  if (!B2) return Mat::Zero(l2, l2);
  Mat m = B2(y1);
  if (m.rows() != l2 || m.cols() != l2) throw ShapeError("B2 must be l2 x l2");
  return m;
}

Mat LinearizedCoefficients::Sigma(std::size_t l, const Vec& y1) const {
  Mat m = Sigma2.at(l) ? Sigma2[l](y1) : Mat::Zero(l2, l2);
  if (m.rows() != l2 || m.cols() != l2) throw ShapeError("Sigma2 entries must be l2 x l2");
  return m;
}

Mat LinearizedCoefficients::Gamma(const Vec& y1, const Vec& mark) const {
  if (!Gamma2) return Mat::Zero(l2, l2);
  Mat m = Gamma2(y1, mark);
  if (m.rows() != l2 || m.cols() != l2) throw ShapeError("Gamma2 must be l2 x l2");
  return m;
}

std::vector<HypothesisCheck> LinearizedCoefficients::check_conditions(
    const LevyMeasure& nu2, std::size_t samples, double radius,
    std::uint64_t seed) const {
  HypothesisCheck invertible{"Sigma2 right-invertible", true, 0, 0.0};
  HypothesisCheck bounded{"linear part finite", true, 0, 0.0};
  Rng rng(seed, 0, Channel::kSampling);
  const std::size_t n = l1 == 0 ? 1 : samples;
  auto note = [](HypothesisCheck& c, double margin) {
    ++c.samples;
    if (c.samples == 1 || margin < c.worst_margin) c.worst_margin = margin;
    if (!(margin > 0.0)) c.passed = false;
  };
  for (std::size_t k = 0; k < n; ++k) {
    Vec y1(l1);
    for (Eigen::Index i = 0; i < l1; ++i) y1[i] = radius * (2.0 * rng.uniform() - 1.0);

    note(bounded, B(y1).allFinite() ? 1.0 : -1.0);
    for (const auto& atom : nu2.atoms()) {
      note(bounded, Gamma(y1, atom.mark).allFinite() ? 1.0 : -1.0);
    }
    for (std::size_t l = 0; l < Sigma2.size(); ++l) {
      const Mat s = Sigma(l, y1);
      if (!s.allFinite()) {
        note(bounded, -1.0);
        note(invertible, -1.0);
        continue;
      }
      note(bounded, 1.0);
      Eigen::JacobiSVD<Mat> svd(s);
      const auto& sv = svd.singularValues();
      const double smin = sv[sv.size() - 1];
      // Margin in decades below a condition number of 1e10.
      note(invertible, smin > 0.0 ? 10.0 - std::log10(sv[0] / smin) : -1.0);
    }
  }
  return {invertible, bounded};
}

PolarState to_polar(const Vec& y1, const Vec& y2) {
  const double n = y2.norm();
  if (!(n > 0.0)) throw ValidationError("polar coordinates need y2 != 0");
  return {y1, y2 / n, n * n};
}

Vec from_polar(const PolarState& p) { return std::sqrt(p.r) * p.theta; }

namespace {

void check_unit(const Vec& theta) {
  if (std::abs(theta.norm() - 1.0) > 1e-9) {
    throw ValidationError("theta must be a unit vector");
  }
}

struct JumpImage {
  Vec gtheta;  // Gamma theta
  double norm; // |theta + Gamma theta|
};

JumpImage jump_image(const LinearizedCoefficients& lin, const Vec& y1,
                     const Vec& theta, const Vec& mark) {
  JumpImage j{lin.Gamma(y1, mark) * theta, 0.0};
  j.norm = (theta + j.gtheta).norm();
  if (!(j.norm > 0.0)) {
    throw AssumptionViolation("degenerate jump: theta + Gamma2 theta = 0");
  }
  return j;
}

}  // namespace

Vec coeff_g1(const LinearizedCoefficients& lin, const Vec& y1,
             const Vec& theta, const LevyMeasure& nu2) {
  check_unit(theta);
  const Vec btheta = lin.B(y1) * theta;
  Vec g = btheta - theta.dot(btheta) * theta;
  for (std::size_t l = 0; l < lin.Sigma2.size(); ++l) {
    const Vec st = lin.Sigma(l, y1) * theta;
    const double q = theta.dot(st);
    g += -q * st + (1.5 * q * q - 0.5 * st.squaredNorm()) * theta;
  }
  for (const auto& atom : nu2.atoms()) {
    const JumpImage j = jump_image(lin, y1, theta, atom.mark);
    const Vec g3 = (theta + j.gtheta) / j.norm - theta;
    g += atom.weight * (g3 - j.gtheta + theta.dot(j.gtheta) * theta);
  }
  return g;
}

Mat coeff_g2(const LinearizedCoefficients& lin, const Vec& y1,
             const Vec& theta) {
  check_unit(theta);
  Mat g(lin.l2, static_cast<Eigen::Index>(lin.Sigma2.size()));
  for (std::size_t l = 0; l < lin.Sigma2.size(); ++l) {
    const Vec st = lin.Sigma(l, y1) * theta;
    g.col(static_cast<Eigen::Index>(l)) = st - theta.dot(st) * theta;
  }
  return g;
}

Vec coeff_g3(const LinearizedCoefficients& lin, const Vec& y1,
             const Vec& theta, const Vec& mark) {
  check_unit(theta);
  const JumpImage j = jump_image(lin, y1, theta, mark);
  return (theta + j.gtheta) / j.norm - theta;
}

std::string_view to_string(H4Variant v) {
  return v == H4Variant::kQuadratic ? "quadratic" : "generator";
}

double coeff_h4(const LinearizedCoefficients& lin, const Vec& y1,
                const Vec& theta, const LevyMeasure& nu2, H4Variant variant) {
  check_unit(theta);
  // Accumulated at half scale, in the same order as scalar_exponent, so that
  // the scalar case reproduces the closed form bit for bit.
  double half = theta.dot(lin.B(y1) * theta);
  for (std::size_t l = 0; l < lin.Sigma2.size(); ++l) {
    const Vec st = lin.Sigma(l, y1) * theta;
    const double q = theta.dot(st);
    half += 0.5 * st.squaredNorm() - q * q;
  }
  for (const auto& atom : nu2.atoms()) {
    const JumpImage j = jump_image(lin, y1, theta, atom.mark);
    double term = std::log(j.norm) - theta.dot(j.gtheta);
    if (variant == H4Variant::kQuadratic) term -= 0.5 * j.gtheta.squaredNorm();
    half += atom.weight * term;
  }
  return 2.0 * half;
}

Vec coeff_h5(const LinearizedCoefficients& lin, const Vec& y1,
             const Vec& theta) {
  check_unit(theta);
  Vec h(static_cast<Eigen::Index>(lin.Sigma2.size()));
  for (std::size_t l = 0; l < lin.Sigma2.size(); ++l) {
    h[static_cast<Eigen::Index>(l)] = 2.0 * theta.dot(lin.Sigma(l, y1) * theta);
  }
  return h;
}

double coeff_h6(const LinearizedCoefficients& lin, const Vec& y1,
                const Vec& theta, const Vec& mark) {
  check_unit(theta);
  return 2.0 * std::log(jump_image(lin, y1, theta, mark).norm);
}

double scalar_exponent(double a, double s, const LevyMeasure& atoms) {
  double e = a;
  e += 0.5 * (s * s) - s * s;
  for (const auto& atom : atoms.atoms()) {
    if (atom.mark.size() != 1) throw ShapeError("scalar exponent needs scalar marks");
    const double g = atom.mark[0];
    if (1.0 + g == 0.0) throw AssumptionViolation("jump mark -1 annihilates the state");
    e += atom.weight * (std::log(std::abs(1.0 + g)) - g);
  }
  return e;
}

SpherePath simulate_boundary_sphere_system(const LinearizedCoefficients& lin,
                                           const LevyMeasure& nu2,
                                           const CoupledJumpDiffusion* system,
                                           const Vec& y1_0, const Vec& theta_0,
                                           const IntegratorConfig& cfg,
                                           std::uint64_t path_index,
                                           const ChannelScaling& scaling1) {
  cfg.validate();
  if (lin.l1 > 0 && system == nullptr) {
    throw ValidationError("sphere system with l1 > 0 needs the boundary system");
  }
  if (system != nullptr && (system->dims().l1 != lin.l1 || system->dims().l2 != lin.l2)) {
    throw ShapeError("linearization and boundary system dimensions differ");
  }
  if (y1_0.size() != lin.l1 || theta_0.size() != lin.l2) {
    throw ShapeError("sphere initial state has wrong dimensions");
  }
  if (!(theta_0.norm() > 0.0) || !theta_0.allFinite()) {
    throw ValidationError("initial direction must be finite and nonzero");
  }

  Rng w1(cfg.master_seed, path_index, Channel::kBrownian1);
  Rng n1(cfg.master_seed, path_index, Channel::kJumps1);
  Rng w2(cfg.master_seed, path_index, Channel::kBrownian2);
  Rng n2(cfg.master_seed, path_index, Channel::kJumps2);

  const Vec zero2 = Vec::Zero(lin.l2);
  const auto d2 = static_cast<Eigen::Index>(lin.Sigma2.size());
  const auto& atoms = nu2.atoms();

  SpherePath path;
  const std::int64_t n = cfg.steps();
  const auto records = static_cast<std::size_t>(n / cfg.record_stride + 2);
  path.times.reserve(records);
  path.y1.reserve(records);
  path.theta.reserve(records);

  Vec y1 = y1_0;
  Vec theta = theta_0.normalized();
  path.times.push_back(0.0);
  path.y1.push_back(y1);
  path.theta.push_back(theta);

  ChannelNoise noise1;
  ChannelNoise noise2;
  for (std::int64_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    Vec inc1;
    if (system != nullptr) {
      const auto c1 = system->component1();
      draw_noise(w1, n1, system->dims().d1, c1.levy, cfg.dt, scaling1.intensity, noise1);
      inc1 = euler_increment(c1, y1, zero2, noise1, cfg.dt, scaling1);
    }
    draw_noise(w2, n2, d2, nu2, cfg.dt, 1.0, noise2);

    Vec next = theta + coeff_g1(lin, y1, theta, nu2) * cfg.dt;
    if (d2 > 0) next.noalias() += coeff_g2(lin, y1, theta) * noise2.dW;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const double compensated =
          static_cast<double>(noise2.counts[a]) - atoms[a].weight * cfg.dt;
      next += coeff_g3(lin, y1, theta, atoms[a].mark) * compensated;
    }
    const double norm = next.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      std::ostringstream os;
      os << "sphere process left the sphere irrecoverably at t=" << t;
      throw DivergenceError(t, os.str());
    }
    theta = next / norm;
    if (system != nullptr) {
      y1 += inc1;
      if (!state_ok(y1, zero2)) {
        std::ostringstream os;
        os << "boundary process diverged at t=" << t;
        throw DivergenceError(t, os.str());
      }
    }
    if (k % cfg.record_stride == 0 || k == n) {
      path.times.push_back(t);
      path.y1.push_back(y1);
      path.theta.push_back(theta);
    }
  }
  return path;
}

OccupationMeasure sphere_occupation(const LinearizedCoefficients& lin,
                                    const LevyMeasure& nu2,
                                    const CoupledJumpDiffusion* system,
                                    const Vec& y1_0, const Vec& theta_0,
                                    const IntegratorConfig& cfg,
                                    std::size_t ensemble,
                                    const ChannelScaling& scaling1) {
  if (ensemble == 0) throw ValidationError("ensemble must be positive");
  cfg.validate();
  const double burn_in = kBurnInFraction * cfg.horizon;
  auto paths = run_ensemble(ensemble, cfg.threads, [&](std::size_t i) {
    return simulate_boundary_sphere_system(lin, nu2, system, y1_0, theta_0,
                                           cfg, i, scaling1);
  });
  std::vector<Vec> samples;
  for (const auto& p : paths) {
    for (std::size_t k = 0; k < p.times.size(); ++k) {
      if (p.times[k] >= burn_in) samples.push_back(stack(p.y1[k], p.theta[k]));
    }
  }
  return OccupationMeasure::uniform(std::move(samples), burn_in);
}

Estimate stability_integral(const LinearizedCoefficients& lin,
                            const OccupationMeasure& occ,
                            const LevyMeasure& nu2, H4Variant variant) {
  if (occ.dim() != lin.l1 + lin.l2) {
    throw ShapeError("sphere occupation must live on (y1, theta)");
  }
  std::vector<double> values;
  values.reserve(occ.size());
  for (const auto& z : occ.samples()) {
    values.push_back(coeff_h4(lin, z.head(lin.l1), z.tail(lin.l2), nu2, variant));
  }
  return batch_means(values, occ.weights());
}

CoupledJumpDiffusion linearized_system(const LinearizedCoefficients& lin,
                                       const LevyMeasure& nu2,
                                       const SystemSpec& component1) {
  const auto d2 = static_cast<Eigen::Index>(lin.Sigma2.size());
  SystemSpec spec;
  spec.dims = component1.dims;
  spec.dims.l1 = lin.l1;
  spec.dims.l2 = lin.l2;
  spec.dims.d2 = d2;
  spec.dims.n2 = nu2.empty() ? 0 : nu2.mark_dim();
  spec.drift1 = component1.drift1;
  spec.diff1 = component1.diff1;
  spec.jump1 = component1.jump1;
  spec.levy1 = component1.levy1;
  spec.levy2 = nu2;

  const auto l2 = lin.l2;
  spec.drift2 = DriftField({l2, 1}, [lin](const Vec& x1, const Vec& x2) -> Vec {
    return lin.B(x1) * x2;
  });
  if (d2 > 0) {
    spec.diff2 = DiffusionField({l2, d2}, [lin, l2, d2](const Vec& x1, const Vec& x2) {
      Mat m(l2, d2);
      for (Eigen::Index l = 0; l < d2; ++l) {
        m.col(l) = lin.Sigma(static_cast<std::size_t>(l), x1) * x2;
      }
      return m;
    });
  }
  if (!nu2.empty() && lin.Gamma2) {
    spec.jump2 = JumpField({l2, 1}, [lin](const Vec& x1, const Vec& x2, const Vec& mark) -> Vec {
      return lin.Gamma(x1, mark) * x2;
    });
  }
  return CoupledJumpDiffusion(std::move(spec));
}

std::string polar_csv_header() { return "variant,value,stderr"; }

std::string polar_csv_row(H4Variant variant, const Estimate& e) {
  return std::string(to_string(variant)) + "," + format_real(e.value) + "," +
         format_real(e.std_error);
}

}  // namespace jumpstab
