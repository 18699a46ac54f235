#include "jumpstab/runner/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jumpstab/jumpstab.hpp"

namespace jumpstab::runner {

namespace {

using K = ParamSpec::Kind;

std::vector<ScenarioInfo> build_catalog() {
  std::vector<ScenarioInfo> c;
  c.push_back({"sir",
               "Stochastic SIR epidemic with Beddington-DeAngelis incidence; "
               "stability of I at 0",
               {{"c0", K::kNumber, "1", "recruitment rate"},
                {"c1", K::kNumber, "1", "natural death rate of S"},
                {"c2", K::kNumber, "1", "removal rate of I"},
                {"c3", K::kNumber, "0.5", "incidence coefficient"},
                {"c4", K::kNumber, "1", "incidence saturation constant (> 0)"},
                {"c5", K::kNumber, "1", "incidence saturation in S"},
                {"c6", K::kNumber, "1", "incidence saturation in I"},
                {"c7", K::kNumber, "0.2", "noise intensity of I"},
                {"sigma1", K::kNumber, "0.2", "noise intensity of S (sigma1 * S)"},
                {"i_jump_marks", K::kVector, "[-0.2]", "relative jump sizes of I"},
                {"i_jump_rates", K::kVector, "[0.5]", "arrival rates of the I jumps"},
                {"f2", K::kNumber, "10", "constant f2 of the hypotheses"},
                {"s0", K::kNumber, "1", "initial S"},
                {"i0", K::kNumber, "1e-3", "initial I"}}});
  c.push_back({"linear",
               "Scalar linear jump diffusion dX = X(a dt + s dW + jumps); closed-form "
               "Lyapunov exponent",
               {{"a", K::kNumber, "-1", "drift rate"},
                {"s", K::kNumber, "0", "diffusion intensity"},
                {"jump_marks", K::kVector, "[]", "relative jump sizes"},
                {"jump_rates", K::kVector, "[]", "jump arrival rates"},
                {"x0", K::kNumber, "1", "initial state"}}});
  c.push_back({"polar",
               "Linearizable systems: polar decomposition, sphere process and "
               "stability integral (2-D linear benchmark)",
               {{"b_diag", K::kVector, "[-1, -0.5]", "diagonal of B"},
                {"omega", K::kNumber, "1", "skew (rotation) part of B"},
                {"sigma_diag", K::kVector, "[0.5, 0.2]", "first noise matrix diag(.,.)"},
                {"sigma_skew", K::kNumber, "0", "second noise matrix, multiple of a rotation"},
                {"jump_marks", K::kVector, "[]", "jump multipliers g (Gamma = g I)"},
                {"jump_rates", K::kVector, "[]", "jump arrival rates"},
                {"theta0", K::kVector, "[1, 0]", "initial direction"},
                {"y0", K::kVector, "[1, 0]", "initial state of the direct simulation"}}});
  c.push_back({"fastslow",
               "Fast-slow coupled jump diffusions: lambda_eps versus the averaged "
               "lambda_star (tanh-modulated benchmark)",
               {{"epsilon", K::kNumber, "0.1", "time-scale separation"},
                {"b", K::kNumber, "0.5", "modulation strength of B2(y1)"},
                {"s", K::kNumber, "0.5", "rotational noise intensity"},
                {"y1_0", K::kNumber, "0", "initial fast state"},
                {"y2_0", K::kVector, "[1e-3, 0]", "initial slow state"},
                {"theta0", K::kVector, "[1, 0]", "initial direction"}}});
  c.push_back({"control",
               "Weak stabilization by linear feedback u = A x1 (OU benchmark)",
               {{"kappa", K::kNumber, "0", "feedback strength; 0 synthesizes it from c1, c2, K1, K2"},
                {"c1", K::kNumber, "1", "constant term of the quadratic generator bound"},
                {"c2", K::kNumber, "0", "quadratic term of the generator bound"},
                {"K1", K::kNumber, "1", "f1 <= -K1 + K2 |x1|^2"},
                {"K2", K::kNumber, "1", "f1 <= -K1 + K2 |x1|^2"},
                {"sigma1", K::kNumber, "1", "noise intensity of x1"},
                {"s", K::kNumber, "0.2", "noise intensity of x2"},
                {"x1_0", K::kNumber, "0", "initial x1"},
                {"x2_0", K::kNumber, "1e-3", "initial x2"}}});
  c.push_back({"consensus",
               "Leader-following consensus under noisy measurements",
               {{"graph", K::kString, "\"0 1; 1 2\"", "edges 'i j' separated by ';' (0 = leader)"},
                {"agent_dim", K::kNumber, "1", "state dimension n of every agent"},
                {"a", K::kNumber, "0", "agent drift f(x) = a x"},
                {"k", K::kNumber, "1", "gain K = k I"},
                {"b", K::kNumber, "1", "input matrix B = b I"},
                {"sigma", K::kNumber, "0.1", "measurement noise intensity on every edge"},
                {"plant", K::kNumber, "1", "shared plant noise intensity"},
                {"jump_marks", K::kVector, "[]", "measurement jump multipliers"},
                {"jump_rates", K::kVector, "[]", "measurement jump rates"},
                {"x0", K::kNumber, "0", "initial leader state (every coordinate)"},
                {"error0", K::kNumber, "0.1", "initial follower offset (every coordinate)"},
                {"margin", K::kNumber, "0.05", "decay margin of the verdict"}}});
  c.push_back({"custom",
               "Affine test system dX1 = (p - q X1) dt + r dW1, "
               "dX2 = X2((c + e X1) dt + s dW2)",
               {{"p", K::kNumber, "1", ""},
                {"q", K::kNumber, "1", ""},
                {"r", K::kNumber, "0.5", ""},
                {"c", K::kNumber, "-0.5", ""},
                {"e", K::kNumber, "0.2", ""},
                {"s", K::kNumber, "0.3", ""},
                {"x1_0", K::kNumber, "1", ""},
                {"x2_0", K::kNumber, "1e-3", ""}},
               false});
  return c;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_catalog() {
  static const std::vector<ScenarioInfo> catalog = build_catalog();
  return catalog;
}

const ScenarioInfo& find_scenario(const std::string& name) {
  for (const auto& s : scenario_catalog()) {
    if (s.name == name) return s;
  }
  throw ValidationError("unknown scenario '" + name + "'");
}

Params::Params(const ScenarioInfo& info, const std::map<std::string, Value>& given) {
  for (const auto& [key, value] : given) {
    const auto it = std::find_if(info.params.begin(), info.params.end(),
                                 [&](const ParamSpec& p) { return p.name == key; });
    if (it == info.params.end()) {
      throw ValidationError("unknown parameter '" + key + "' for scenario " + info.name +
                            " (line " + std::to_string(value.line) + ")");
    }
  }
  for (const auto& p : info.params) {
    const auto it = given.find(p.name);
    const Value v = it != given.end() ? it->second : parse_value_text(p.default_value);
    switch (p.kind) {
      case K::kNumber:
        v.as_number(p.name);
        break;
      case K::kVector:
        v.as_vector(p.name);
        break;
      case K::kString:
        v.as_string(p.name);
        break;
    }
    values_.emplace(p.name, v);
  }
}

const Value& Params::get(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw ValidationError("parameter '" + name + "' is not defined");
  return it->second;
}

double Params::number(const std::string& name) const { return get(name).as_number(name); }
std::vector<double> Params::vector(const std::string& name) const {
  return get(name).as_vector(name);
}
std::string Params::string(const std::string& name) const {
  return get(name).as_string(name);
}

namespace {

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
};

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out;
}

std::string paths_csv(const std::vector<std::string>& columns,
                      const std::vector<Trajectory>& paths) {
  std::ostringstream os;
  os << "path,time," << join(columns) << '\n';
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& tr = paths[p];
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      os << p << ',' << format_real(tr.times[k]);
      for (Eigen::Index i = 0; i < tr.states[k].size(); ++i) {
        os << ',' << format_real(tr.states[k][i]);
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string occupation_csv(const std::vector<std::string>& columns,
                           const OccupationMeasure& occ) {
  std::ostringstream os;
  os << "weight," << join(columns) << '\n';
  for (std::size_t k = 0; k < occ.size(); ++k) {
    os << format_real(occ.weights()[k]);
    for (Eigen::Index i = 0; i < occ.samples()[k].size(); ++i) {
      os << ',' << format_real(occ.samples()[k][i]);
    }
    os << '\n';
  }
  return os.str();
}

Trajectory from_path(const PathSample& p) {
  Trajectory t;
  t.times = p.times;
  for (const auto& s : p.states) t.states.push_back(stack(s.x1, s.x2));
  return t;
}

std::vector<Trajectory> simulate_paths(const CoupledJumpDiffusion& sys, const Vec& x1,
                                       const Vec& x2, const ScenarioConfig& cfg) {
  auto paths = run_ensemble(cfg.trajectory_paths, cfg.integrator.threads, [&](std::size_t i) {
    return from_path(simulate_path(sys, x1, x2, cfg.integrator, i));
  });
  return paths;
}

LevyMeasure scalar_atoms(const Params& p, const std::string& marks_key,
                         const std::string& rates_key) {
  const auto marks = p.vector(marks_key);
  const auto rates = p.vector(rates_key);
  if (marks.size() != rates.size()) {
    throw ValidationError(marks_key + " and " + rates_key + " must have equal length");
  }
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t k = 0; k < marks.size(); ++k) atoms.emplace_back(marks[k], rates[k]);
  return LevyMeasure::scalar(atoms);
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec sized(const Params& p, const std::string& key, Eigen::Index n) {
  const auto v = p.vector(key);
  if (static_cast<Eigen::Index>(v.size()) != n) {
    throw ValidationError("parameter '" + key + "' must have " + std::to_string(n) + " entries");
  }
  return to_vec(v);
}

std::string lyapunov_report(const LyapunovReport& r) {
  return lyapunov_csv_header() + "\n" + lyapunov_csv_row(r) + "\n";
}

// ---------------------------------------------------------------- sir

ScenarioOutput run_sir(const ScenarioConfig& cfg, const Params& p) {
  const double c0 = p.number("c0"), c1 = p.number("c1"), c2 = p.number("c2");
  const double c3 = p.number("c3"), c4 = p.number("c4"), c5 = p.number("c5");
  const double c6 = p.number("c6"), c7 = p.number("c7"), sigma1 = p.number("sigma1");
  if (!(c4 > 0.0) || c5 < 0.0 || c6 < 0.0) {
    throw ValidationError("sir needs c4 > 0 and c5, c6 >= 0");
  }
  const LevyMeasure nu2 = scalar_atoms(p, "i_jump_marks", "i_jump_rates");
  for (const auto& a : nu2.atoms()) {
    if (!(a.mark[0] > -1.0)) throw ValidationError("I jumps must keep I positive (mark > -1)");
  }
  auto incidence = [=](double s, double i) {
    const double sp = std::max(s, 0.0);
    const double ip = std::max(i, 0.0);
    return c3 * sp / (c4 + c5 * sp + c6 * ip);
  };

  SystemSpec spec;
  spec.dims = {1, 1, 1, 1, 0, nu2.empty() ? 0 : 1};
  spec.drift1 = DriftField({1, 1}, [=](const Vec& x1, const Vec& x2) {
    return Vec::Constant(1, c0 - c1 * x1[0] - incidence(x1[0], x2[0]) * x2[0]);
  });
  spec.drift2 = DriftField({1, 1}, [=](const Vec& x1, const Vec& x2) {
    return Vec::Constant(1, (-c2 + incidence(x1[0], x2[0])) * x2[0]);
  });
  spec.diff1 = DiffusionField({1, 1}, [=](const Vec& x1, const Vec&) {
    return Mat::Constant(1, 1, sigma1 * x1[0]);
  });
  spec.diff2 = DiffusionField({1, 1}, [=](const Vec&, const Vec& x2) {
    return Mat::Constant(1, 1, c7 * x2[0]);
  });
  if (!nu2.empty()) {
    spec.jump2 = JumpField({1, 1}, [](const Vec&, const Vec& x2, const Vec& m) {
      return Vec::Constant(1, x2[0] * m[0]);
    });
    spec.levy2 = nu2;
  }
  const CoupledJumpDiffusion sys(std::move(spec));

  double jump_sq = 0.0;
  for (const auto& a : nu2.atoms()) jump_sq += a.weight * a.mark[0] * a.mark[0];
  StabilityHypotheses hyp;
  hyp.V0 = [](const Vec& s) { return s[0]; };
  hyp.V1 = hyp.V0;
  hyp.f1 = [=](const Vec& s) {
    const double sp = std::max(s[0], 0.0);
    return c2 + 0.5 * c7 * c7 + jump_sq - c3 * sp / (c4 + c5 * sp);
  };
  const double f2 = p.number("f2");
  hyp.f2 = [f2](const Vec&) { return f2; };

  const Vec s0 = Vec::Constant(1, p.number("s0"));
  const Vec i0 = Vec::Constant(1, p.number("i0"));
  const auto occ = estimate_invariant_measure(sys, s0, cfg.integrator, cfg.ensemble);
  VerdictOptions vopt;
  vopt.ensemble = cfg.ensemble;
  vopt.x1_start = s0;
  vopt.x2_scale = i0[0];
  const auto report = stability_verdict(sys, hyp, occ, cfg.integrator, vopt);

  ScenarioOutput out;
  out.report = lyapunov_report(report);
  out.occupation = occupation_csv({"S"}, occ);
  if (cfg.wants(OutputKind::kPaths)) out.trajectories = paths_csv({"S", "I"}, simulate_paths(sys, s0, i0, cfg));
  return out;
}

// ---------------------------------------------------------------- linear

CoupledJumpDiffusion scalar_linear(double a, double s, const LevyMeasure& nu) {
  SystemSpec spec;
  spec.dims = {0, 1, 0, 1, 0, nu.empty() ? 0 : 1};
  spec.drift2 = DriftField({1, 1}, [a](const Vec&, const Vec& x) { return Vec(a * x); });
  spec.diff2 = DiffusionField({1, 1}, [s](const Vec&, const Vec& x) { return Mat(s * x); });
  if (!nu.empty()) {
    spec.jump2 = JumpField({1, 1}, [](const Vec&, const Vec& x, const Vec& m) {
      return Vec(m[0] * x);
    });
    spec.levy2 = nu;
  }
  return CoupledJumpDiffusion(std::move(spec));
}

std::string exponent_cells(const ExponentEstimate& e) {
  return format_real(e.exponent.value) + "," + format_real(e.exponent.std_error) + "," +
         std::to_string(e.diverged) + "," + std::to_string(e.absorbed);
}

ScenarioOutput run_linear(const ScenarioConfig& cfg, const Params& p) {
  const double a = p.number("a"), s = p.number("s");
  const LevyMeasure nu = scalar_atoms(p, "jump_marks", "jump_rates");
  const auto sys = scalar_linear(a, s, nu);
  const Vec x0 = Vec::Constant(1, p.number("x0"));
  if (x0[0] == 0.0) throw ValidationError("x0 must be nonzero");
  const auto e = estimate_log_lyapunov_exponent(sys, Vec(0), x0, cfg.integrator, cfg.ensemble);

  ScenarioOutput out;
  out.report = "exponent,exponent_stderr,diverged,absorbed,closed_form\n" + exponent_cells(e) +
               "," + format_real(scalar_exponent(a, s, nu)) + "\n";
  if (cfg.wants(OutputKind::kPaths)) out.trajectories = paths_csv({"x"}, simulate_paths(sys, Vec(0), x0, cfg));
  return out;
}

// ---------------------------------------------------------------- polar

Mat rotation90() {
  Mat j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

ScenarioOutput run_polar(const ScenarioConfig& cfg, const Params& p) {
  const Vec bd = sized(p, "b_diag", 2);
  const Vec sd = sized(p, "sigma_diag", 2);
  const double omega = p.number("omega"), skew = p.number("sigma_skew");
  const LevyMeasure nu2 = scalar_atoms(p, "jump_marks", "jump_rates");
  const Mat B = Mat(bd.asDiagonal()) + omega * rotation90();
  const Mat S1 = sd.asDiagonal();
  const Mat S2 = skew * rotation90();

  LinearizedCoefficients lin;
  lin.l1 = 0;
  lin.l2 = 2;
  lin.B2 = [B](const Vec&) { return B; };
  lin.Sigma2 = {[S1](const Vec&) { return S1; }, [S2](const Vec&) { return S2; }};
  if (!nu2.empty()) {
    lin.Gamma2 = [](const Vec&, const Vec& m) { return Mat(m[0] * Mat::Identity(2, 2)); };
  }
  const Vec theta0 = sized(p, "theta0", 2);
  const Vec y0 = sized(p, "y0", 2);
  if (y0.norm() == 0.0) throw ValidationError("y0 must be nonzero");

  const auto occ = sphere_occupation(lin, nu2, nullptr, Vec(0), theta0, cfg.integrator, cfg.ensemble);
  const auto sys = linearized_system(lin, nu2, SystemSpec{});
  const auto direct = estimate_log_lyapunov_exponent(sys, Vec(0), y0, cfg.integrator, cfg.ensemble);

  ScenarioOutput out;
  std::ostringstream os;
  os << polar_csv_header() << '\n'
     << polar_csv_row(H4Variant::kQuadratic, stability_integral(lin, occ, nu2, H4Variant::kQuadratic)) << '\n'
     << polar_csv_row(H4Variant::kGenerator, stability_integral(lin, occ, nu2, H4Variant::kGenerator))
     << '\n'
     << "direct," << format_real(2.0 * direct.exponent.value) << ','
     << format_real(2.0 * direct.exponent.std_error) << '\n';
  out.report = os.str();
  out.occupation = occupation_csv({"theta1", "theta2"}, occ);
  if (cfg.wants(OutputKind::kPaths)) out.trajectories = paths_csv({"y1", "y2"}, simulate_paths(sys, Vec(0), y0, cfg));
  return out;
}

// ---------------------------------------------------------------- fastslow

FastSlowSystem tanh_benchmark(double epsilon, double b, double s) {
  const Mat J = rotation90();
  Mat D(2, 2);
  D << 1.0, 0.0, 0.0, -1.0;
  FastSlowSpec spec;
  spec.dims = {1, 2, 1, 1, 0, 0};
  spec.drift1 = DriftField({1, 1}, [](const Vec& y1, const Vec&) { return Vec(-y1); });
  spec.diff1 = DiffusionField({1, 1}, [](const Vec&, const Vec&) {
    return Mat::Constant(1, 1, std::sqrt(2.0));
  });
  auto B2 = [D, b](const Vec& y1) -> Mat {
    return -Mat::Identity(2, 2) + b * std::tanh(y1[0]) * D;
  };
  spec.drift2 = DriftField({2, 1}, [B2](const Vec& y1, const Vec& y2) -> Vec { return B2(y1) * y2; });
  spec.sigma2 = [J, s](const Vec& y2) -> Mat { return s * J * y2; };
  spec.B2 = B2;
  spec.Sigma2 = {s * J};
  return FastSlowSystem(std::move(spec), epsilon);
}

ScenarioOutput run_fastslow(const ScenarioConfig& cfg, const Params& p) {
  const auto fs = tanh_benchmark(p.number("epsilon"), p.number("b"), p.number("s"));
  check_fast_resolution(fs, cfg.integrator);
  const Vec y1_0 = Vec::Constant(1, p.number("y1_0"));
  const Vec y2_0 = sized(p, "y2_0", 2);
  const Vec theta0 = sized(p, "theta0", 2);

  const auto occ = sphere_occupation(fs.lin(), fs.nu2(), &fs.base(), y1_0, theta0,
                                     cfg.integrator, cfg.ensemble, fs.fast_scaling());
  const auto star = lambda_star(fs, y1_0, theta0, cfg.integrator, cfg.ensemble);

  std::ostringstream os;
  os << fastslow_csv_header() << '\n';
  for (auto v : {H4Variant::kQuadratic, H4Variant::kGenerator}) {
    os << fastslow_csv_row(fs.epsilon(), v, stability_integral(fs.lin(), occ, fs.nu2(), v)) << '\n';
  }
  // epsilon = 0 labels the averaged limit.
  for (auto v : {H4Variant::kQuadratic, H4Variant::kGenerator}) {
    os << fastslow_csv_row(0.0, v, star.value.get(v)) << '\n';
  }
  ScenarioOutput out;
  out.report = os.str();
  out.occupation = occupation_csv({"y1", "theta1", "theta2"}, occ);
  if (cfg.wants(OutputKind::kPaths)) {
    out.trajectories = paths_csv(
        {"y1", "y2_1", "y2_2"},
        run_ensemble(cfg.trajectory_paths, cfg.integrator.threads, [&](std::size_t i) {
          return from_path(simulate_fastslow(fs, y1_0, y2_0, cfg.integrator, i));
        }));
  }
  return out;
}

// ---------------------------------------------------------------- control

ScenarioOutput run_control(const ScenarioConfig& cfg, const Params& p) {
  const double sigma1 = p.number("sigma1"), s = p.number("s");
  ControlConstants k{p.number("c1"), p.number("c2"), p.number("K1"), p.number("K2")};
  const Mat Q = Mat::Identity(1, 1);
  const double kappa = p.number("kappa");
  if (kappa < 0.0) throw ValidationError("kappa must be nonnegative");
  const auto design = kappa > 0.0 ? make_design(Q, Mat::Constant(1, 1, -kappa), k)
                                  : design_feedback(Q, k);

  SystemSpec spec;
  spec.dims = {1, 1, 1, 1, 0, 0};
  spec.diff1 = DiffusionField({1, 1}, [sigma1](const Vec&, const Vec&) {
    return Mat::Constant(1, 1, sigma1);
  });
  spec.drift2 = DriftField({1, 1}, [s](const Vec& x1, const Vec& x2) {
    return Vec(x2 * (x1[0] * x1[0] - 1.0 + 0.5 * s * s));
  });
  spec.diff2 = DiffusionField({1, 1}, [s](const Vec&, const Vec& x2) { return Mat(s * x2); });
  const CoupledJumpDiffusion open(std::move(spec));
  const ScalarFn f1 = [](const Vec& x1) { return -1.0 + x1[0] * x1[0]; };

  const Vec x1_0 = Vec::Constant(1, p.number("x1_0"));
  const Vec x2_0 = Vec::Constant(1, p.number("x2_0"));
  const auto report = verify_weak_stabilization(open, design, f1, x1_0, cfg.integrator, cfg.ensemble);
  if (report.diverged_at) {
    throw DivergenceError(*report.diverged_at, "controlled boundary system diverged");
  }
  const auto controlled = controlled_system(open, design.A);
  const auto e = estimate_log_lyapunov_exponent(controlled, x1_0, x2_0, cfg.integrator, cfg.ensemble);
  std::size_t negative = 0;
  for (double slope : e.slopes) negative += slope < 0.0 ? 1 : 0;
  const double fraction = e.slopes.empty() ? 0.0 : static_cast<double>(negative) / static_cast<double>(e.slopes.size());

  ScenarioOutput out;
  out.report = control_csv_header() + ",exponent,exponent_stderr,fraction_decaying\n" +
               control_csv_row(report) + "," + format_real(e.exponent.value) + "," +
               format_real(e.exponent.std_error) + "," + format_real(fraction) + "\n";
  out.occupation = occupation_csv(
      {"x1"}, estimate_invariant_measure(controlled, x1_0, cfg.integrator, cfg.ensemble));
  if (cfg.wants(OutputKind::kPaths)) out.trajectories = paths_csv({"x1", "x2"}, simulate_paths(controlled, x1_0, x2_0, cfg));
  return out;
}

// ---------------------------------------------------------------- consensus

ScenarioOutput run_consensus(const ScenarioConfig& cfg, const Params& p) {
  std::string edges = p.string("graph");
  std::replace(edges.begin(), edges.end(), ';', '\n');
  const auto graph = laplacian_from_adjacency(parse_edge_list(edges));
  const int N = graph.followers();
  const double dim = p.number("agent_dim");
  if (dim < 1 || dim != std::floor(dim)) throw ValidationError("agent_dim must be a positive integer");
  const auto n = static_cast<Eigen::Index>(dim);
  ConsensusProtocol proto{p.number("k") * Mat::Identity(n, n), p.number("b") * Mat::Identity(n, n)};
  const LevyMeasure atoms = scalar_atoms(p, "jump_marks", "jump_rates");
  const auto noise = NoiseModel::uniform(N, p.number("sigma"), atoms, p.number("plant"));
  const double a = p.number("a");
  const AgentDrift f = [a](const Vec& x) { return Vec(a * x); };
  const Vec x0 = Vec::Constant(n, p.number("x0"));
  const Vec err = Vec::Constant(n * N, p.number("error0"));
  ConsentabilityOptions opt;
  opt.margin = p.number("margin");
  const auto report = consentability_verdict(graph, proto, noise, f, x0, err, cfg.integrator,
                                             cfg.ensemble, opt);

  ScenarioOutput out;
  out.report = consensus_csv_header() + "\n" + consensus_csv_row(report) + "\n";
  if (cfg.wants(OutputKind::kPaths)) {
    std::vector<std::string> cols;
    for (int agent = 0; agent <= N; ++agent) {
      for (Eigen::Index d = 0; d < n; ++d) {
        cols.push_back("x" + std::to_string(agent) + (n > 1 ? "_" + std::to_string(d + 1) : ""));
      }
    }
    const Vec followers = err + x0.replicate(N, 1);
    out.trajectories = paths_csv(
        cols, run_ensemble(cfg.trajectory_paths, cfg.integrator.threads, [&](std::size_t i) {
          const auto path = simulate_network(graph, proto, noise, f, x0, followers, cfg.integrator, i);
          Trajectory t;
          t.times = path.times;
          for (std::size_t k = 0; k < path.times.size(); ++k) {
            t.states.push_back(stack(path.leader[k], path.followers[k]));
          }
          return t;
        }));
  }
  return out;
}

// ---------------------------------------------------------------- custom

ScenarioOutput run_custom(const ScenarioConfig& cfg, const Params& p) {
  const double pp = p.number("p"), q = p.number("q"), r = p.number("r");
  const double c = p.number("c"), e = p.number("e"), s = p.number("s");
  SystemSpec spec;
  spec.dims = {1, 1, 1, 1, 0, 0};
  spec.drift1 = DriftField({1, 1}, [=](const Vec& x1, const Vec&) {
    return Vec::Constant(1, pp - q * x1[0]);
  });
  spec.diff1 = DiffusionField({1, 1}, [r](const Vec&, const Vec&) { return Mat::Constant(1, 1, r); });
  spec.drift2 = DriftField({1, 1}, [=](const Vec& x1, const Vec& x2) {
    return Vec(x2 * (c + e * x1[0]));
  });
  spec.diff2 = DiffusionField({1, 1}, [s](const Vec&, const Vec& x2) { return Mat(s * x2); });
  const CoupledJumpDiffusion sys(std::move(spec));

  StabilityHypotheses hyp;
  hyp.f1 = [=](const Vec& x1) { return -(c + e * x1[0]) + 0.5 * s * s; };
  const Vec x1_0 = Vec::Constant(1, p.number("x1_0"));
  const Vec x2_0 = Vec::Constant(1, p.number("x2_0"));
  const auto occ = estimate_invariant_measure(sys, x1_0, cfg.integrator, cfg.ensemble);
  VerdictOptions vopt;
  vopt.ensemble = cfg.ensemble;
  vopt.x1_start = x1_0;
  vopt.x2_scale = x2_0[0];
  const auto report = stability_verdict(sys, hyp, occ, cfg.integrator, vopt);

  ScenarioOutput out;
  out.report = lyapunov_report(report);
  out.occupation = occupation_csv({"x1"}, occ);
  if (cfg.wants(OutputKind::kPaths)) out.trajectories = paths_csv({"x1", "x2"}, simulate_paths(sys, x1_0, x2_0, cfg));
  return out;
}

}  // namespace

ScenarioOutput execute_scenario(const ScenarioConfig& cfg) {
  const auto& info = find_scenario(cfg.scenario);
  const Params params(info, cfg.parameters);
  if (cfg.wants(OutputKind::kOccupation) && (info.name == "linear" || info.name == "consensus")) {
    throw ValidationError("scenario " + info.name + " has no occupation output");
  }
  ScenarioOutput out;
  if (info.name == "sir") {
    out = run_sir(cfg, params);
  } else if (info.name == "linear") {
    out = run_linear(cfg, params);
  } else if (info.name == "polar") {
    out = run_polar(cfg, params);
  } else if (info.name == "fastslow") {
    out = run_fastslow(cfg, params);
  } else if (info.name == "control") {
    out = run_control(cfg, params);
  } else if (info.name == "consensus") {
    out = run_consensus(cfg, params);
  } else {
    out = run_custom(cfg, params);
  }
  return out;
}

}  // namespace jumpstab::runner
