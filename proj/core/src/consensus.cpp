#include "jumpstab/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "jumpstab/ensemble.hpp"

namespace jumpstab {

IntMat LeaderFollowerGraph::laplacian() const {
  IntMat h = IntMat::Zero(n_ + 1, n_ + 1);
  h.block(1, 0, n_, 1) = -a0_;
  h.block(1, 1, n_, n_) = h_tilde_;
  return h;
}

LeaderFollowerGraph laplacian_from_adjacency(const IntMat& a) {
  if (a.rows() != a.cols() || a.rows() < 2) {
    throw ValidationError("adjacency must be square with a leader and at least one follower");
  }
  const int n = static_cast<int>(a.rows()) - 1;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (a(i, j) != 0 && a(i, j) != 1) throw ValidationError("adjacency entries must be 0 or 1");
    }
    if (a(i, i) != 0) throw ValidationError("adjacency must have a zero diagonal");
  }
  if (a.row(0).any()) throw ValidationError("the leader must not receive information");
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (a(i, j) != a(j, i)) {
        throw ValidationError("follower communication must be undirected");
      }
    }
  }

  std::vector<bool> reached(static_cast<std::size_t>(n + 1), false);
  std::deque<int> queue{0};
  reached[0] = true;
  while (!queue.empty()) {
    const int j = queue.front();
    queue.pop_front();
    for (int i = 1; i <= n; ++i) {
      if (!reached[static_cast<std::size_t>(i)] && a(i, j) == 1) {
        reached[static_cast<std::size_t>(i)] = true;
        queue.push_back(i);
      }
    }
  }
  for (int i = 1; i <= n; ++i) {
    if (!reached[static_cast<std::size_t>(i)]) {
      throw ValidationError("graph has no spanning tree rooted at the leader (follower " +
                            std::to_string(i) + " is unreachable)");
    }
  }

  LeaderFollowerGraph g;
  g.n_ = n;
  g.adjacency_ = a;
  g.a0_ = a.block(1, 0, n, 1);
  g.h_tilde_ = -a.block(1, 1, n, n);
  for (int i = 0; i < n; ++i) g.h_tilde_(i, i) = a.row(i + 1).sum();
  return g;
}

IntMat parse_edge_list(const std::string& text, int followers) {
  std::vector<std::pair<int, int>> edges;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int largest = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int i = 0;
    int j = 0;
    if (!(ls >> i)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw ValidationError("edge list line " + std::to_string(line_no) + ": expected 'i j'");
      }
      continue;
    }
    std::string rest;
    if (!(ls >> j) || (ls >> rest)) {
      throw ValidationError("edge list line " + std::to_string(line_no) + ": expected 'i j'");
    }
    if (i < 0 || j < 0 || i == j) {
      throw ValidationError("edge list line " + std::to_string(line_no) +
                            ": nodes must be distinct and nonnegative");
    }
    largest = std::max({largest, i, j});
    edges.emplace_back(i, j);
  }
  const int n = followers > 0 ? followers : largest;
  if (n < 1) throw ValidationError("edge list has no followers");
  if (largest > n) throw ValidationError("edge list references a node beyond N");
  IntMat a = IntMat::Zero(n + 1, n + 1);
  for (auto [i, j] : edges) {
    if (i == 0) {
      a(j, 0) = 1;
    } else if (j == 0) {
      a(i, 0) = 1;
    } else {
      a(i, j) = 1;
      a(j, i) = 1;
    }
  }
  return a;
}

SelectorMatrices selector_matrices(const LeaderFollowerGraph& g) {
  const int n = g.followers();
  const IntMat& a = g.adjacency();
  SelectorMatrices s;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (a(i, j) == 0) continue;
      SelectorEdge e{i, j, IntMat::Zero(n, n)};
      e.S(i - 1, i - 1) = -a(i, j);
      e.S(i - 1, j - 1) = a(i, j);
      s.S.push_back(std::move(e));
    }
    IntMat bar = IntMat::Zero(n, n);
    bar(i - 1, i - 1) = a(i, 0);
    s.S_bar.push_back(std::move(bar));
  }
  return s;
}

IntMat reconstruct_H_tilde(const SelectorMatrices& s, int followers) {
  IntMat h = IntMat::Zero(followers, followers);
  for (const auto& bar : s.S_bar) h += bar;
  for (const auto& e : s.S) h -= e.S;
  return h;
}

NoiseModel NoiseModel::uniform(int followers, double sigma,
                               const LevyMeasure& atoms, double plant) {
  NoiseModel m;
  m.sigma = Mat::Constant(followers + 1, followers, sigma);
  m.jumps.assign(static_cast<std::size_t>((followers + 1) * followers), atoms);
  m.plant = plant;
  return m;
}

const LevyMeasure& NoiseModel::edge_jumps(int j, int i) const {
  static const LevyMeasure none;
  if (jumps.empty()) return none;
  return jumps.at(static_cast<std::size_t>(j * sigma.cols() + (i - 1)));
}

void NoiseModel::validate(int followers) const {
  if (sigma.rows() != followers + 1 || sigma.cols() != followers) {
    throw ShapeError("noise sigma must be (N+1) x N");
  }
  if (!sigma.allFinite()) throw ValidationError("noise intensities must be finite");
  if (!std::isfinite(plant)) throw ValidationError("plant noise intensity must be finite");
  if (!jumps.empty()) {
    if (jumps.size() != static_cast<std::size_t>((followers + 1) * followers)) {
      throw ShapeError("need one jump measure per directed edge slot");
    }
    for (const auto& m : jumps) {
      if (!m.empty() && m.mark_dim() != 1) {
        throw ShapeError("edge jump marks must be scalar multipliers");
      }
    }
  }
}

void ConsensusProtocol::validate() const {
  if (K.rows() != K.cols() || B.rows() != B.cols() || K.rows() != B.rows() || K.rows() == 0) {
    throw ShapeError("K and B must be n x n");
  }
  if (!K.allFinite() || !B.allFinite()) throw ValidationError("K and B must be finite");
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff())) {
    throw ValidationError("gain K must be symmetric");
  }
}

HypothesisCheck check_dissipativity(const AgentDrift& f, Eigen::Index n,
                                    double c, std::size_t samples,
                                    double radius, std::uint64_t seed) {
  HypothesisCheck check{"y'f(y) <= -c|y|^2", true, 0, 0.0};
  Rng rng(seed, 0, Channel::kSampling);
  for (std::size_t k = 0; k < samples; ++k) {
    Vec y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = radius * (2.0 * rng.uniform() - 1.0);
    const double margin = -c * y.squaredNorm() - y.dot(f(y));
    ++check.samples;
    if (check.samples == 1 || margin < check.worst_margin) check.worst_margin = margin;
    if (!(margin >= -1e-12 * (1.0 + y.squaredNorm()))) check.passed = false;
  }
  return check;
}

std::uint64_t edge_brownian_channel(int j, int i, int followers) {
  return static_cast<std::uint64_t>(Channel::kEdgeBase) +
         2 * static_cast<std::uint64_t>(j * (followers + 1) + i);
}

std::uint64_t edge_jump_channel(int j, int i, int followers) {
  return edge_brownian_channel(j, i, followers) + 1;
}

namespace {

/// One directed edge j -> i with its two streams.
struct EdgeStream {
  int j;
  int i;
  double sigma;
  const LevyMeasure* atoms;
  Rng w;
  Rng jumps;

  /// Increment of xi_ji over one step.
  double draw(double dt) {
    double xi = sigma * std::sqrt(dt) * w.normal();
    for (const auto& atom : atoms->atoms()) {
      const double count = static_cast<double>(jumps.poisson(atom.weight * dt));
      xi += atom.mark[0] * (count - atom.weight * dt);
    }
    return xi;
  }
};

std::vector<EdgeStream> open_edges(const LeaderFollowerGraph& g,
                                   const NoiseModel& noise,
                                   const IntegratorConfig& cfg,
                                   std::uint64_t path_index) {
  const int n = g.followers();
  std::vector<EdgeStream> edges;
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (g.adjacency()(i, j) == 0) continue;
      edges.push_back({j, i, noise.sigma(j, i - 1), &noise.edge_jumps(j, i),
                       Rng(cfg.master_seed, path_index, edge_brownian_channel(j, i, n)),
                       Rng(cfg.master_seed, path_index, edge_jump_channel(j, i, n))});
    }
  }
  return edges;
}

void check_inputs(const LeaderFollowerGraph& g, const ConsensusProtocol& p,
                  const NoiseModel& noise, const AgentDrift& f, const Vec& x0,
                  const Vec& stacked, const IntegratorConfig& cfg) {
  cfg.validate();
  p.validate();
  noise.validate(g.followers());
  if (!f) throw ValidationError("agent drift f is required");
  const auto n = p.K.rows();
  if (x0.size() != n || stacked.size() != n * g.followers()) {
    throw ShapeError("initial states must be n and n*N dimensional");
  }
  if (!x0.allFinite() || !stacked.allFinite()) {
    throw ValidationError("initial states must be finite");
  }
}

Vec draw_plant(Rng& rng, Eigen::Index n, double dt, double intensity) {
  Vec dW(n);
  const double scale = intensity * std::sqrt(dt);
  for (Eigen::Index k = 0; k < n; ++k) dW[k] = scale * rng.normal();
  return dW;
}

[[noreturn]] void diverge(double t) {
  std::ostringstream os;
  os << "consensus path diverged at t=" << t;
  throw DivergenceError(t, os.str());
}

}  // namespace

ConsensusPath simulate_network(const LeaderFollowerGraph& g,
                               const ConsensusProtocol& p,
                               const NoiseModel& noise, const AgentDrift& f,
                               const Vec& x0_init, const Vec& followers_init,
                               const IntegratorConfig& cfg,
                               std::uint64_t path_index) {
  check_inputs(g, p, noise, f, x0_init, followers_init, cfg);
  const auto n = p.K.rows();
  const int N = g.followers();
  const Mat BK = p.BK();
  auto edges = open_edges(g, noise, cfg, path_index);
  Rng plant(cfg.master_seed, path_index, Channel::kPlant);

  ConsensusPath path;
  Vec x0 = x0_init;
  Vec x = followers_init;
  auto record = [&](double t) {
    path.times.push_back(t);
    path.leader.push_back(x0);
    path.followers.push_back(x);
    path.error.push_back(x - x0.replicate(N, 1));
  };
  record(0.0);

  const std::int64_t steps = cfg.steps();
  const double dt = cfg.dt;
  Vec u(n * N);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec dW = draw_plant(plant, n, dt, noise.plant);
    u.setZero();
    for (auto& e : edges) {
      const double xi = e.draw(dt);
      const Vec xj = e.j == 0 ? x0 : Vec(x.segment((e.j - 1) * n, n));
      const Vec diff = xj - x.segment((e.i - 1) * n, n);
      u.segment((e.i - 1) * n, n) += diff * dt - diff * xi;
    }
    Vec next(n * N);
    for (int i = 0; i < N; ++i) {
      const Vec xi = x.segment(i * n, n);
      next.segment(i * n, n) = xi + f(xi) * dt + BK * u.segment(i * n, n) + dW;
    }
    x0 = x0 + f(x0) * dt + dW;
    x = std::move(next);
    if (!state_ok(x0, x)) diverge(t);
    if (k % cfg.record_stride == 0 || k == steps) record(t);
  }
  return path;
}

ConsensusPath simulate_error_system(const LeaderFollowerGraph& g,
                                   const ConsensusProtocol& p,
                                   const NoiseModel& noise, const AgentDrift& f,
                                   const Vec& x0_init, const Vec& error_init,
                                   const IntegratorConfig& cfg,
                                   std::uint64_t path_index) {
  check_inputs(g, p, noise, f, x0_init, error_init, cfg);
  const auto n = p.K.rows();
  const int N = g.followers();
  const Mat BK = p.BK();
  const Mat H = Eigen::kroneckerProduct(Mat(g.H_tilde().cast<double>()), BK);

  // Martingale coefficient of each edge stream: -(S_ij ⊗ BK) for follower
  // neighbours, +(S_bar_i ⊗ BK) for the leader edge.
  auto edges = open_edges(g, noise, cfg, path_index);
  const auto sel = selector_matrices(g);
  std::vector<Mat> coeff;
  coeff.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.j == 0) {
      coeff.push_back(Eigen::kroneckerProduct(
          Mat(sel.S_bar[static_cast<std::size_t>(e.i - 1)].cast<double>()), BK));
    } else {
      const auto it = std::find_if(sel.S.begin(), sel.S.end(), [&](const SelectorEdge& s) {
        return s.i == e.i && s.j == e.j;
      });
      coeff.push_back(-Mat(Eigen::kroneckerProduct(Mat(it->S.cast<double>()), BK)));
    }
  }
  Rng plant(cfg.master_seed, path_index, Channel::kPlant);

  ConsensusPath path;
  Vec x0 = x0_init;
  Vec X = error_init;
  auto record = [&](double t) {
    path.times.push_back(t);
    path.leader.push_back(x0);
    path.error.push_back(X);
  };
  record(0.0);

  const std::int64_t steps = cfg.steps();
  const double dt = cfg.dt;
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec dW = draw_plant(plant, n, dt, noise.plant);
    const Vec f0 = f(x0);
    Vec F(n * N);
    for (int i = 0; i < N; ++i) F.segment(i * n, n) = f(x0 + X.segment(i * n, n)) - f0;
    Vec next = X + (F - H * X) * dt;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      next.noalias() += edges[e].draw(dt) * (coeff[e] * X);
    }
    x0 = x0 + f0 * dt + dW;
    X = std::move(next);
    if (!state_ok(x0, X)) diverge(t);
    if (k % cfg.record_stride == 0 || k == steps) record(t);
  }
  return path;
}

ConsentabilityReport consentability_verdict(
    const LeaderFollowerGraph& g, const ConsensusProtocol& p,
    const NoiseModel& noise, const AgentDrift& f, const Vec& x0_init,
    const Vec& error_init, const IntegratorConfig& cfg, std::size_t ensemble,
    const ConsentabilityOptions& options) {
  if (ensemble == 0) throw ValidationError("ensemble must be positive");
  check_inputs(g, p, noise, f, x0_init, error_init, cfg);
  const auto n = p.K.rows();
  const int N = g.followers();
  const Vec followers_init = error_init + x0_init.replicate(N, 1);

  struct Outcome {
    double exponent;
    bool diverged;
    bool absorbed;
  };
  constexpr double kAbsorption = 1e-300;
  auto outcomes = run_ensemble(ensemble, cfg.threads, [&](std::size_t idx) {
    ConsensusPath path;
    try {
      path = simulate_network(g, p, noise, f, x0_init, followers_init, cfg, idx);
    } catch (const DivergenceError&) {
      return Outcome{std::numeric_limits<double>::infinity(), true, false};
    }
    std::vector<double> mags;
    mags.reserve(path.error.size());
    for (const auto& X : path.error) {
      double m = 0.0;
      for (int i = 0; i < N; ++i) m = std::max(m, X.segment(i * n, n).norm());
      mags.push_back(m);
    }
    const SlopeFit fit = fit_log_slope(path.times, mags, kAbsorption);
    if (fit.absorbed) {
      const double start = std::max(mags.front(), kAbsorption);
      return Outcome{(std::log(kAbsorption) - std::log(start)) / cfg.horizon, false, true};
    }
    return Outcome{fit.slope.value_or(std::numeric_limits<double>::quiet_NaN()), false, false};
  });

  ConsentabilityReport r;
  r.margin = options.margin;
  std::size_t decaying = 0;
  for (const auto& o : outcomes) {
    r.exponents.push_back(o.exponent);
    r.diverged += o.diverged ? 1 : 0;
    r.absorbed += o.absorbed ? 1 : 0;
    if (o.absorbed || o.exponent <= -options.margin) ++decaying;
  }
  r.fraction_decaying = static_cast<double>(decaying) / static_cast<double>(ensemble);
  r.consentable = r.fraction_decaying >= options.required_fraction;
  return r;
}

std::string consensus_csv_header() {
  return "paths,fraction_decaying,median_exponent,diverged,absorbed,margin,verdict";
}

std::string consensus_csv_row(const ConsentabilityReport& r) {
  std::vector<double> sorted;
  for (double e : r.exponents) {
    if (!std::isnan(e)) sorted.push_back(e);
  }
  std::sort(sorted.begin(), sorted.end());
  double median = std::numeric_limits<double>::quiet_NaN();
  if (!sorted.empty()) {
    const std::size_t m = sorted.size() / 2;
    median = sorted.size() % 2 == 1 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  }
  return std::to_string(r.exponents.size()) + "," + format_real(r.fraction_decaying) +
         "," + format_real(median) + "," + std::to_string(r.diverged) + "," +
         std::to_string(r.absorbed) + "," + format_real(r.margin) + "," +
         (r.consentable ? "consentable-indicated" : "not-consentable");
}

}  // namespace jumpstab
