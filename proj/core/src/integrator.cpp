#include "jumpstab/integrator.hpp"

#include <cmath>
#include <sstream>

namespace jumpstab {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("integrator dt must be positive and finite");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("integrator horizon must be positive and finite");
  }
  if (dt > horizon) throw ConfigError("integrator dt exceeds the horizon");
  if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
}

std::int64_t IntegratorConfig::steps() const {
  const auto n = static_cast<std::int64_t>(std::llround(horizon / dt));
  return n < 1 ? 1 : n;
}

void draw_noise(Rng& brownian, Rng& jumps, Eigen::Index brownian_dim,
                const LevyMeasure& levy, double dt, double intensity_scale,
                ChannelNoise& out) {
  const double sqdt = std::sqrt(dt);
  out.dW.resize(brownian_dim);
  for (Eigen::Index i = 0; i < brownian_dim; ++i) {
    out.dW[i] = sqdt * brownian.normal();
  }
  const auto& atoms = levy.atoms();
  out.counts.resize(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    out.counts[k] = jumps.poisson(atoms[k].weight * intensity_scale * dt);
  }
}

Vec euler_increment(const ComponentView& c, const Vec& x1, const Vec& x2,
                    const ChannelNoise& noise, double dt,
                    const ChannelScaling& scaling) {
  Vec inc = c.drift(x1, x2) * (scaling.drift * dt);
  if (noise.dW.size() > 0 && !c.diffusion.is_zero()) {
    inc.noalias() += c.diffusion(x1, x2) * (scaling.diffusion * noise.dW);
  }
  if (!c.jump.is_zero()) {
    const auto& atoms = c.levy.atoms();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double compensated =
          static_cast<double>(noise.counts[k]) -
          scaling.intensity * atoms[k].weight * dt;
      if (compensated != 0.0) {
        inc += c.jump(x1, x2, atoms[k].mark) * compensated;
      }
    }
  }
  return inc;
}

bool state_ok(const Vec& x1, const Vec& x2) {
  const double sq = x1.squaredNorm() + x2.squaredNorm();
  return std::isfinite(sq) && sq <= kDivergenceBound * kDivergenceBound;
}

namespace {

void check_initial(const CoupledJumpDiffusion& system, const Vec& x1_0,
                   const Vec& x2_0) {
  const auto& d = system.dims();
  if (x1_0.size() != d.l1 || x2_0.size() != d.l2) {
    std::ostringstream os;
    os << "initial state has dimensions (" << x1_0.size() << ", "
       << x2_0.size() << "), system expects (" << d.l1 << ", " << d.l2 << ")";
    throw ValidationError(os.str());
  }
  if (!x1_0.allFinite() || !x2_0.allFinite()) {
    throw ValidationError("initial state must be finite");
  }
}

void log_counts(std::vector<JumpEvent>& log, const ChannelNoise& noise,
                double t, int component) {
  for (std::size_t k = 0; k < noise.counts.size(); ++k) {
    if (noise.counts[k] > 0) log.push_back({t, component, k, noise.counts[k]});
  }
}

}  // namespace

IntegrationResult integrate(const CoupledJumpDiffusion& system, const Vec& x1_0,
                            const Vec& x2_0, const IntegratorConfig& cfg,
                            std::uint64_t path_index,
                            const IntegrationOptions& options) {
  cfg.validate();
  check_initial(system, x1_0, x2_0);
  const auto& d = system.dims();
  const auto c1 = system.component1();
  const auto c2 = system.component2();

  Rng w1(cfg.master_seed, path_index, Channel::kBrownian1);
  Rng n1(cfg.master_seed, path_index, Channel::kJumps1);
  Rng w2(cfg.master_seed, path_index, Channel::kBrownian2);
  Rng n2(cfg.master_seed, path_index, Channel::kJumps2);

  IntegrationResult result;
  auto& path = result.path;
  const std::int64_t n = cfg.steps();
  const auto records = static_cast<std::size_t>(n / cfg.record_stride + 2);
  path.times.reserve(records);
  path.states.reserve(records);

  Vec x1 = x1_0;
  Vec x2 = options.pin_x2 ? Vec::Zero(d.l2) : x2_0;
  path.times.push_back(0.0);
  path.states.push_back({x1, x2});

  ChannelNoise noise1;
  ChannelNoise noise2;
  for (std::int64_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    draw_noise(w1, n1, d.d1, c1.levy, cfg.dt, options.scaling1.intensity, noise1);
    Vec inc1 = euler_increment(c1, x1, x2, noise1, cfg.dt, options.scaling1);
    if (!options.pin_x2) {
      draw_noise(w2, n2, d.d2, c2.levy, cfg.dt, options.scaling2.intensity, noise2);
      Vec inc2 = euler_increment(c2, x1, x2, noise2, cfg.dt, options.scaling2);
      x2 += inc2;
    }
    x1 += inc1;

    if (!state_ok(x1, x2)) {
      result.diverged_at = t;
      return result;
    }
    if (options.log_jumps) {
      log_counts(path.jump_log, noise1, t, 1);
      if (!options.pin_x2) log_counts(path.jump_log, noise2, t, 2);
    }
    if (k % cfg.record_stride == 0 || k == n) {
      path.times.push_back(t);
      path.states.push_back({x1, x2});
    }
  }
  return result;
}

namespace {

PathSample unwrap(IntegrationResult&& r) {
  if (r.diverged_at) {
    std::ostringstream os;
    os << "path diverged at t=" << *r.diverged_at
       << " (non-finite state or norm above " << kDivergenceBound << ")";
    throw DivergenceError(*r.diverged_at, os.str());
  }
  return std::move(r.path);
}

}  // namespace

PathSample simulate_path(const CoupledJumpDiffusion& system, const Vec& x1_0,
                         const Vec& x2_0, const IntegratorConfig& cfg,
                         std::uint64_t path_index) {
  return unwrap(integrate(system, x1_0, x2_0, cfg, path_index));
}

PathSample simulate_boundary_x1(const CoupledJumpDiffusion& system,
                                const Vec& x1_0, const IntegratorConfig& cfg,
                                std::uint64_t path_index) {
  IntegrationOptions opts;
  opts.pin_x2 = true;
  return unwrap(integrate(system, x1_0, Vec::Zero(system.dims().l2), cfg,
                          path_index, opts));
}

}  // namespace jumpstab
