#include "jumpstab/system.hpp"

#include <sstream>

#include "jumpstab/rng.hpp"

namespace jumpstab {

namespace {

template <class Field>
void settle_shape(Field& field, Shape expected, const char* name) {
  field.adopt_shape(expected);
  if (!(field.shape() == expected)) {
    std::ostringstream os;
    os << name << " declared " << field.shape().rows << "x"
       << field.shape().cols << ", system dimensions require " << expected.rows
       << "x" << expected.cols;
    throw ShapeError(os.str());
  }
}

void check_levy(const LevyMeasure& levy, Eigen::Index n, const char* name) {
  if (!levy.empty() && levy.mark_dim() != n) {
    std::ostringstream os;
    os << name << " marks have dimension " << levy.mark_dim()
       << " but the system declares " << n;
    throw ValidationError(os.str());
  }
}

}  // namespace

CoupledJumpDiffusion::CoupledJumpDiffusion(SystemSpec spec,
                                           BoundaryCheck check)
    : spec_(std::move(spec)) {
  const auto& d = spec_.dims;
  if (d.l1 < 0 || d.l2 < 0 || d.d1 < 0 || d.d2 < 0 || d.n1 < 0 || d.n2 < 0) {
    throw ValidationError("system dimensions must be nonnegative");
  }
  if (d.l1 + d.l2 == 0) throw ValidationError("system has no state");

  settle_shape(spec_.drift1, {d.l1, 1}, "drift1");
  settle_shape(spec_.drift2, {d.l2, 1}, "drift2");
  settle_shape(spec_.diff1, {d.l1, d.d1}, "diff1");
  settle_shape(spec_.diff2, {d.l2, d.d2}, "diff2");
  settle_shape(spec_.jump1, {d.l1, 1}, "jump1");
  settle_shape(spec_.jump2, {d.l2, 1}, "jump2");
  check_levy(spec_.levy1, d.n1, "levy1");
  check_levy(spec_.levy2, d.n2, "levy2");

  check_boundary(check);
}

void CoupledJumpDiffusion::check_boundary(const BoundaryCheck& check) const {
  const auto& d = spec_.dims;
  if (d.l2 == 0) return;
  if (spec_.drift2.is_zero() && spec_.diff2.is_zero() &&
      spec_.jump2.is_zero()) {
    return;
  }
  Rng rng(check.seed, 0, Channel::kSampling);
  const Vec x2 = Vec::Zero(d.l2);
  for (std::size_t k = 0; k < check.samples; ++k) {
    Vec x1(d.l1);
    for (Eigen::Index i = 0; i < d.l1; ++i) {
      // The first sample is the origin; the rest fill the box.
      x1[i] = k == 0 ? 0.0 : check.radius * (2.0 * rng.uniform() - 1.0);
    }
    auto fail = [&](const char* what, double magnitude) {
      std::ostringstream os;
      os << "boundary condition violated: " << what << "(x1,0) has norm "
         << magnitude << " at x1=[" << x1.transpose()
         << "]; x2=0 must be an equilibrium";
      throw ValidationError(os.str());
    };
    const double b = spec_.drift2(x1, x2).norm();
    if (!(b <= check.tolerance)) fail("drift2", b);
    const double s = spec_.diff2(x1, x2).norm();
    if (!(s <= check.tolerance)) fail("diff2", s);
    for (const auto& atom : spec_.levy2.atoms()) {
      const double g = spec_.jump2(x1, x2, atom.mark).norm();
      if (!(g <= check.tolerance)) fail("jump2", g);
    }
  }
}

Vec CoupledJumpDiffusion::drift(const Vec& z) const {
  const Vec x1 = x1_of(z);
  const Vec x2 = x2_of(z);
  return stack(spec_.drift1(x1, x2), spec_.drift2(x1, x2));
}

Mat CoupledJumpDiffusion::diffusion(const Vec& z) const {
  const auto& d = spec_.dims;
  const Vec x1 = x1_of(z);
  const Vec x2 = x2_of(z);
  Mat out = Mat::Zero(d.l1 + d.l2, d.d1 + d.d2);
  out.topLeftCorner(d.l1, d.d1) = spec_.diff1(x1, x2);
  out.bottomRightCorner(d.l2, d.d2) = spec_.diff2(x1, x2);
  return out;
}

}  // namespace jumpstab
