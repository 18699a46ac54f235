#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "jumpstab/rng.hpp"
#include "jumpstab/system.hpp"

namespace jumpstab {

/// Paths whose state norm exceeds this are aborted as divergent.
inline constexpr double kDivergenceBound = 1e12;

struct IntegratorConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  std::uint64_t master_seed = 0;
  std::int64_t record_stride = 1;
  /// Worker threads for ensembles; 0 uses every hardware thread. Results do
  /// not depend on this value.
  unsigned threads = 0;

  /// Throws ConfigError unless 0 < dt <= horizon and record_stride >= 1.
  void validate() const;
  /// Number of Euler steps: round(horizon / dt), at least 1.
  std::int64_t steps() const;
};

struct JumpEvent {
  double time = 0.0;
  int component = 1;
  std::size_t atom = 0;
  std::uint32_t count = 1;
};

struct StatePoint {
  Vec x1;
  Vec x2;
};

/// Recorded trajectory: states at every record_stride-th step plus the final
/// step, and every jump arrival.
struct PathSample {
  std::vector<double> times;
  std::vector<StatePoint> states;
  std::vector<JumpEvent> jump_log;

  std::size_t size() const noexcept { return times.size(); }
};

/// Per-component multipliers: drift, diffusion and jump intensity. The
/// fast-slow system uses (1/eps, 1/sqrt(eps), 1/eps) on component 1.
struct ChannelScaling {
  double drift = 1.0;
  double diffusion = 1.0;
  double intensity = 1.0;
};

/// Noise of one component over one step: Brownian increment (already scaled
/// by sqrt(dt)) and Poisson arrival counts per Lévy atom.
struct ChannelNoise {
  Vec dW;
  std::vector<std::uint32_t> counts;
};

/// Draws one step of noise for a component with `brownian_dim` Brownian
/// motions and the given Lévy measure.
void draw_noise(Rng& brownian, Rng& jumps, Eigen::Index brownian_dim,
                const LevyMeasure& levy, double dt, double intensity_scale,
                ChannelNoise& out);

/// Euler-Maruyama increment of one component with every coefficient at the
/// pre-step state (x1, x2):
///   b dt + sigma dW + sum_k gamma(mark_k) (N_k - w_k dt).
Vec euler_increment(const ComponentView& c, const Vec& x1, const Vec& x2,
                    const ChannelNoise& noise, double dt,
                    const ChannelScaling& scaling = {});

/// True when the state is finite with norm at most kDivergenceBound.
bool state_ok(const Vec& x1, const Vec& x2);

struct IntegrationOptions {
  /// Keep x2 at 0 and advance only component 1 (boundary system).
  bool pin_x2 = false;
  ChannelScaling scaling1;
  ChannelScaling scaling2;
  bool log_jumps = true;
};

/// Path plus the first time the divergence guard fired, if it did. The path
/// then ends at the last good state.
struct IntegrationResult {
  PathSample path;
  std::optional<double> diverged_at;
};

/// Non-throwing integration kernel shared by every simulator.
IntegrationResult integrate(const CoupledJumpDiffusion& system, const Vec& x1_0,
                            const Vec& x2_0, const IntegratorConfig& cfg,
                            std::uint64_t path_index,
                            const IntegrationOptions& options = {});

/// Simulates (X1, X2) from (x1_0, x2_0). The noise is a pure function of
/// (cfg.master_seed, path_index). Throws DivergenceError when the state
/// becomes non-finite or its norm exceeds kDivergenceBound.
PathSample simulate_path(const CoupledJumpDiffusion& system, const Vec& x1_0,
                         const Vec& x2_0, const IntegratorConfig& cfg,
                         std::uint64_t path_index);

/// Simulates the boundary system for X1 with X2 pinned at 0.
PathSample simulate_boundary_x1(const CoupledJumpDiffusion& system,
                                const Vec& x1_0, const IntegratorConfig& cfg,
                                std::uint64_t path_index);

}  // namespace jumpstab
