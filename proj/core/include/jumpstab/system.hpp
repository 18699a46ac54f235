#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "jumpstab/error.hpp"
#include "jumpstab/levy.hpp"
#include "jumpstab/linalg.hpp"

namespace jumpstab {

struct Shape {
  Eigen::Index rows = -1;
  Eigen::Index cols = -1;

  bool known() const noexcept { return rows >= 0 && cols >= 0; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// A coefficient of the coupled system: a deterministic evaluator with a
/// declared output shape. An empty evaluator is the zero field.
template <class Out, class... Args>
class CoefficientField {
 public:
  using Function = std::function<Out(Args...)>;

  CoefficientField() = default;
  CoefficientField(Shape shape, Function fn,
                   std::optional<double> lipschitz_hint = std::nullopt)
      : shape_(shape), fn_(std::move(fn)), lipschitz_hint_(lipschitz_hint) {
    if (!shape_.known()) throw ShapeError("coefficient shape must be declared");
    if (lipschitz_hint_ && !(*lipschitz_hint_ >= 0.0)) {
      throw ValidationError("Lipschitz hint must be nonnegative");
    }
  }

  static CoefficientField zero(Shape shape) {
    CoefficientField f;
    f.shape_ = shape;
    f.lipschitz_hint_ = 0.0;
    return f;
  }

  Out operator()(Args... args) const {
    if (!fn_) return Out::Zero(shape_.rows, shape_.cols);
    Out out = fn_(std::forward<Args>(args)...);
    if (out.rows() != shape_.rows || out.cols() != shape_.cols) {
      throw ShapeError("coefficient returned " + std::to_string(out.rows()) +
                       "x" + std::to_string(out.cols()) + ", declared " +
                       std::to_string(shape_.rows) + "x" +
                       std::to_string(shape_.cols));
    }
    return out;
  }

  const Shape& shape() const noexcept { return shape_; }
  bool is_zero() const noexcept { return !fn_; }
  const std::optional<double>& lipschitz_hint() const noexcept {
    return lipschitz_hint_;
  }

  /// Used by the system constructor to give undeclared zero fields a shape.
  void adopt_shape(Shape shape) {
    if (!shape_.known()) shape_ = shape;
  }

 private:
  Shape shape_;
  Function fn_;
  std::optional<double> lipschitz_hint_;
};

/// (x1, x2) -> vector of length l_i.
using DriftField = CoefficientField<Vec, const Vec&, const Vec&>;
/// (x1, x2) -> l_i x d_i matrix.
using DiffusionField = CoefficientField<Mat, const Vec&, const Vec&>;
/// (x1, x2, mark) -> vector of length l_i.
using JumpField = CoefficientField<Vec, const Vec&, const Vec&, const Vec&>;

/// (l1, l2, d1, d2, n1, n2): state, Brownian and mark dimensions.
struct Dimensions {
  Eigen::Index l1 = 0;
  Eigen::Index l2 = 0;
  Eigen::Index d1 = 0;
  Eigen::Index d2 = 0;
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
};

/// Everything needed to describe dX_i = b_i dt + sigma_i dW_i + ∫ gamma_i dÑ_i.
/// Fields left default-constructed are zero.
struct SystemSpec {
  Dimensions dims;
  DriftField drift1;
  DriftField drift2;
  DiffusionField diff1;
  DiffusionField diff2;
  JumpField jump1;
  JumpField jump2;
  LevyMeasure levy1;
  LevyMeasure levy2;
};

/// Sampling plan for the x2 = 0 boundary check.
struct BoundaryCheck {
  std::size_t samples = 32;
  double radius = 5.0;
  double tolerance = 1e-12;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// Read-only view of one component's coefficients.
struct ComponentView {
  const DriftField& drift;
  const DiffusionField& diffusion;
  const JumpField& jump;
  const LevyMeasure& levy;
};

/// Fully coupled jump diffusion with 0 an equilibrium of the second
/// component. Immutable after construction.
class CoupledJumpDiffusion {
 public:
  /// Validates dimensions and shapes, then samples x1 in a box and checks
  /// drift2(x1,0), diff2(x1,0) and jump2(x1,0,mark) vanish. Throws
  /// ValidationError on any violation.
  explicit CoupledJumpDiffusion(SystemSpec spec, BoundaryCheck check = {});

  const Dimensions& dims() const noexcept { return spec_.dims; }
  const SystemSpec& spec() const noexcept { return spec_; }

  ComponentView component1() const noexcept {
    return {spec_.drift1, spec_.diff1, spec_.jump1, spec_.levy1};
  }
  ComponentView component2() const noexcept {
    return {spec_.drift2, spec_.diff2, spec_.jump2, spec_.levy2};
  }

  Eigen::Index state_dim() const noexcept { return spec_.dims.l1 + spec_.dims.l2; }
  Vec x1_of(const Vec& z) const { return z.head(spec_.dims.l1); }
  Vec x2_of(const Vec& z) const { return z.tail(spec_.dims.l2); }

  /// Stacked drift b(z) = (b1; b2).
  Vec drift(const Vec& z) const;
  /// Block-diagonal diffusion diag(sigma1, sigma2), size l x (d1 + d2).
  Mat diffusion(const Vec& z) const;

 private:
  void check_boundary(const BoundaryCheck& check) const;

  SystemSpec spec_;
};

}  // namespace jumpstab
