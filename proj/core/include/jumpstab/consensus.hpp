#pragma once

#include <functional>
#include <string>
#include <vector>

#include "jumpstab/integrator.hpp"
#include "jumpstab/stability.hpp"

namespace jumpstab {

using IntMat = Eigen::MatrixXi;
using IntVec = Eigen::VectorXi;

/// Leader (node 0) plus N followers. a(i, j) = 1 when follower i receives
/// information from node j. The leader row is zero and the follower block is
/// symmetric.
class LeaderFollowerGraph {
 public:
  int followers() const noexcept { return n_; }
  const IntMat& adjacency() const noexcept { return adjacency_; }
  /// (a_10, ..., a_N0).
  const IntVec& a0() const noexcept { return a0_; }
  /// N x N: diagonal sum_{j >= 0, j != i} a_ij, off-diagonal -a_ij.
  const IntMat& H_tilde() const noexcept { return h_tilde_; }
  /// Full (N+1) x (N+1) Laplacian [[0, 0'], [-a0, H_tilde]] of D - A.
  IntMat laplacian() const;

  friend LeaderFollowerGraph laplacian_from_adjacency(const IntMat& adjacency);

 private:
  int n_ = 0;
  IntMat adjacency_;
  IntVec a0_;
  IntMat h_tilde_;
};

/// Validates a 0/1 adjacency with zero diagonal, zero leader row, symmetric
/// follower block and a spanning tree rooted at the leader. Throws
/// ValidationError otherwise.
LeaderFollowerGraph laplacian_from_adjacency(const IntMat& adjacency);

/// Parses an edge list with one "i j" pair per line ('#' starts a comment).
/// A pair of followers is an undirected edge; a pair involving node 0 is a
/// leader-to-follower edge. `followers` fixes N; 0 infers it from the
/// largest index. Throws ValidationError on malformed input.
IntMat parse_edge_list(const std::string& text, int followers = 0);

struct SelectorEdge {
  int i = 0;  // receiving follower
  int j = 0;  // neighbouring follower
  /// s_ii = -a_ij, s_ij = a_ij.
  IntMat S;
};

struct SelectorMatrices {
  std::vector<SelectorEdge> S;
  /// S_bar[i-1] has the single entry (i, i) = a_i0.
  std::vector<IntMat> S_bar;
};

SelectorMatrices selector_matrices(const LeaderFollowerGraph& g);
/// sum_i S_bar_i - sum_ij S_ij in exact integer arithmetic.
IntMat reconstruct_H_tilde(const SelectorMatrices& s, int followers);

/// Measurement noise of the directed edge j -> i: scalar Brownian intensity
/// sigma_ji and scalar jump atoms (mark = multiplier gamma_ji).
struct NoiseModel {
  /// (N+1) x N, entry (j, i-1) = sigma_ji.
  Mat sigma;
  /// (N+1) * N measures, index j * N + (i-1). Empty measures mean no jumps.
  std::vector<LevyMeasure> jumps;
  /// Intensity of the shared plant Brownian motion W.
  double plant = 1.0;

  /// Same sigma on every edge, same atoms on every edge.
  static NoiseModel uniform(int followers, double sigma,
                            const LevyMeasure& atoms = {}, double plant = 1.0);
  const LevyMeasure& edge_jumps(int j, int i) const;
  void validate(int followers) const;
};

struct ConsensusProtocol {
  Mat K;
  Mat B;
  /// Throws ValidationError unless K is symmetric and K, B are n x n.
  void validate() const;
  Mat BK() const { return B * K; }
};

using AgentDrift = std::function<Vec(const Vec&)>;

/// Samples y in a box and checks y' f(y) <= -c |y|^2.
HypothesisCheck check_dissipativity(const AgentDrift& f, Eigen::Index n,
                                    double c, std::size_t samples,
                                    double radius, std::uint64_t seed = 11);

struct ConsensusPath {
  std::vector<double> times;
  std::vector<Vec> leader;
  /// Stacked X = (x1 - x0, ..., xN - x0).
  std::vector<Vec> error;
  /// Stacked (x1, ..., xN); empty for the error-system simulator.
  std::vector<Vec> followers;
};

/// Channels of the Brownian and jump streams of edge j -> i.
std::uint64_t edge_brownian_channel(int j, int i, int followers);
std::uint64_t edge_jump_channel(int j, int i, int followers);

/// Simulates leader and followers under u_i = K sum_j z_ji with
/// z_ji = (x_j - x_i) - (x_j - x_i) xi_ji, where xi_ji integrates to
/// sigma_ji w_ji + jump terms, and a plant Brownian motion shared by all
/// agents. Throws DivergenceError.
ConsensusPath simulate_network(const LeaderFollowerGraph& g,
                               const ConsensusProtocol& p,
                               const NoiseModel& noise, const AgentDrift& f,
                               const Vec& x0_init, const Vec& followers_init,
                               const IntegratorConfig& cfg,
                               std::uint64_t path_index);

/// Simulates the leader and the stacked error
///   dX = (F(x0, X) - (H_tilde ⊗ BK) X) dt + martingale terms
/// assembled from S_ij ⊗ BK and S_bar_i ⊗ BK on the same edge streams as
/// simulate_network, so the two agree pathwise.
ConsensusPath simulate_error_system(const LeaderFollowerGraph& g,
                                   const ConsensusProtocol& p,
                                   const NoiseModel& noise, const AgentDrift& f,
                                   const Vec& x0_init, const Vec& error_init,
                                   const IntegratorConfig& cfg,
                                   std::uint64_t path_index);

struct ConsentabilityOptions {
  double margin = 0.05;
  double required_fraction = 0.9;
};

struct ConsentabilityReport {
  /// Fitted slope of ln max_i |x_i - x0| per path (+inf for a diverged
  /// path, the absorption floor for a path that reached exact consensus).
  std::vector<double> exponents;
  double fraction_decaying = 0.0;
  std::size_t diverged = 0;
  std::size_t absorbed = 0;
  double margin = 0.05;
  bool consentable = false;
};

/// Runs `ensemble` network paths from the given leader state and initial
/// error and issues "consentable-indicated" when at least the required
/// fraction of paths has an exponent <= -margin.
ConsentabilityReport consentability_verdict(
    const LeaderFollowerGraph& g, const ConsensusProtocol& p,
    const NoiseModel& noise, const AgentDrift& f, const Vec& x0_init,
    const Vec& error_init, const IntegratorConfig& cfg, std::size_t ensemble,
    const ConsentabilityOptions& options = {});

std::string consensus_csv_header();
std::string consensus_csv_row(const ConsentabilityReport& r);

}  // namespace jumpstab
