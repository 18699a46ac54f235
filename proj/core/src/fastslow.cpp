#include "jumpstab/fastslow.hpp"

#include <cmath>
#include <sstream>

namespace jumpstab {

namespace {

SystemSpec base_spec(const FastSlowSpec& s) {
  const auto& d = s.dims;
  SystemSpec out;
  out.dims = d;
  out.drift1 = s.drift1;
  out.diff1 = s.diff1;
  out.jump1 = s.jump1;
  out.levy1 = s.levy1;
  out.drift2 = s.drift2;
  out.levy2 = s.levy2;
  if (s.sigma2) {
    auto f = s.sigma2;
    out.diff2 = DiffusionField({d.l2, d.d2},
                               [f](const Vec&, const Vec& x2) { return f(x2); });
  }
  if (s.gamma2) {
    auto f = s.gamma2;
    out.jump2 = JumpField({d.l2, 1}, [f](const Vec&, const Vec& x2, const Vec& m) {
      return f(x2, m);
    });
  }
  return out;
}

LinearizedCoefficients make_lin(const FastSlowSpec& s) {
  const auto l2 = s.dims.l2;
  if (static_cast<Eigen::Index>(s.Sigma2.size()) != s.dims.d2) {
    throw ShapeError("fast-slow Sigma2 needs one matrix per Brownian motion of component 2");
  }
  LinearizedCoefficients lin;
  lin.l1 = s.dims.l1;
  lin.l2 = l2;
  lin.B2 = s.B2;
  for (const Mat& m : s.Sigma2) {
    if (m.rows() != l2 || m.cols() != l2) throw ShapeError("Sigma2 entries must be l2 x l2");
    lin.Sigma2.push_back([m](const Vec&) { return m; });
  }
  if (s.Gamma2) {
    auto g = s.Gamma2;
    lin.Gamma2 = [g](const Vec&, const Vec& mark) { return g(mark); };
  }
  return lin;
}

}  // namespace

FastSlowSystem::FastSlowSystem(FastSlowSpec spec, double epsilon)
    : spec_(std::move(spec)),
      epsilon_(epsilon),
      base_(base_spec(spec_)),
      lin_(make_lin(spec_)) {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw ValidationError("epsilon must be positive and finite");
  }
  if (spec_.dims.l1 == 0) throw ValidationError("fast-slow system needs a fast component");
}

ChannelScaling FastSlowSystem::fast_scaling() const {
  return {1.0 / epsilon_, 1.0 / std::sqrt(epsilon_), 1.0 / epsilon_};
}

FastSlowSystem FastSlowSystem::with_epsilon(double epsilon) const {
  return FastSlowSystem(spec_, epsilon);
}

void check_fast_resolution(const FastSlowSystem& fs, const IntegratorConfig& cfg) {
  if (cfg.dt > fs.epsilon() / 10.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt=" << cfg.dt << " does not resolve the fast scale; need dt <= eps/10 = "
       << fs.epsilon() / 10.0;
    throw ConfigError(os.str());
  }
}

PathSample simulate_fastslow(const FastSlowSystem& fs, const Vec& y1_0,
                             const Vec& y2_0, const IntegratorConfig& cfg,
                             std::uint64_t path_index) {
  check_fast_resolution(fs, cfg);
  IntegrationOptions opts;
  opts.scaling1 = fs.fast_scaling();
  auto r = integrate(fs.base(), y1_0, y2_0, cfg, path_index, opts);
  if (r.diverged_at) {
    std::ostringstream os;
    os << "fast-slow path diverged at t=" << *r.diverged_at;
    throw DivergenceError(*r.diverged_at, os.str());
  }
  return std::move(r.path);
}

LambdaPair lambda_eps(const FastSlowSystem& fs, const Vec& y1_0,
                      const Vec& theta_0, const IntegratorConfig& cfg,
                      std::size_t ensemble) {
  check_fast_resolution(fs, cfg);
  const auto occ = sphere_occupation(fs.lin(), fs.nu2(), &fs.base(), y1_0,
                                     theta_0, cfg, ensemble, fs.fast_scaling());
  return {stability_integral(fs.lin(), occ, fs.nu2(), H4Variant::kQuadratic),
          stability_integral(fs.lin(), occ, fs.nu2(), H4Variant::kGenerator)};
}

namespace {

LinearizedCoefficients averaged_lin(const FastSlowSystem& fs, const Mat& B_bar) {
  LinearizedCoefficients lin = fs.lin();
  lin.l1 = 0;
  lin.B2 = [B_bar](const Vec&) { return B_bar; };
  return lin;
}

}  // namespace

LambdaStar lambda_star(const FastSlowSystem& fs, const Vec& y1_0,
                       const Vec& theta_0, const IntegratorConfig& cfg,
                       std::size_t ensemble) {
  const auto occ1 = estimate_invariant_measure(fs.base(), y1_0, cfg, ensemble);
  const auto l2 = fs.lin().l2;

  // Entrywise occupation average of B2 with a batch-means error per entry.
  std::vector<std::vector<double>> entries(static_cast<std::size_t>(l2 * l2));
  for (const auto& y1 : occ1.samples()) {
    const Mat b = fs.lin().B(y1);
    for (Eigen::Index j = 0; j < l2; ++j) {
      for (Eigen::Index i = 0; i < l2; ++i) {
        entries[static_cast<std::size_t>(j * l2 + i)].push_back(b(i, j));
      }
    }
  }
  Mat B_bar(l2, l2);
  double b_var = 0.0;
  for (Eigen::Index j = 0; j < l2; ++j) {
    for (Eigen::Index i = 0; i < l2; ++i) {
      const auto e = batch_means(entries[static_cast<std::size_t>(j * l2 + i)],
                                 occ1.weights());
      B_bar(i, j) = e.value;
      b_var += e.std_error * e.std_error;
    }
  }

  const auto lin = averaged_lin(fs, B_bar);
  const auto occ2 = sphere_occupation(lin, fs.nu2(), nullptr, Vec(0), theta_0,
                                      cfg, ensemble);
  // |2 theta' dB theta| <= 2 |dB|_F bounds the contribution of the error in
  // B_bar.
  const double b_se = 2.0 * std::sqrt(b_var);
  auto with_b = [b_se](Estimate e) {
    e.std_error = std::sqrt(e.std_error * e.std_error + b_se * b_se);
    return e;
  };
  LambdaStar out;
  out.value.quadratic = with_b(stability_integral(lin, occ2, fs.nu2(), H4Variant::kQuadratic));
  out.value.generator =
      with_b(stability_integral(lin, occ2, fs.nu2(), H4Variant::kGenerator));
  out.B_bar = B_bar;
  return out;
}

CoupledJumpDiffusion averaged_linear_system(const FastSlowSystem& fs,
                                            const Mat& B_bar) {
  SystemSpec none;
  return linearized_system(averaged_lin(fs, B_bar), fs.nu2(), none);
}

std::string fastslow_csv_header() { return "epsilon,variant,lambda,stderr"; }

std::string fastslow_csv_row(double epsilon, H4Variant variant, const Estimate& e) {
  return format_real(epsilon) + "," + std::string(to_string(variant)) + "," +
         format_real(e.value) + "," + format_real(e.std_error);
}

}  // namespace jumpstab
