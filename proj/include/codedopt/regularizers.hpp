#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "codedopt/linalg.hpp"
#include "codedopt/problem.hpp"

namespace codedopt {

enum class RegularizerKind { L1Ball, L2Ball, KSparse };

std::string_view to_string(RegularizerKind kind);
std::optional<RegularizerKind> parse_regularizer_kind(std::string_view text);

/// Constraint set K = {θ : R(θ) ≤ radius} (balls) or {θ : ‖θ‖₀ ≤ k}.
struct RegularizerSpec {
  RegularizerKind kind = RegularizerKind::L1Ball;
  double radius = 0.0;  ///< ball kinds
  Index k = 1;          ///< KSparse

  bool convex() const { return kind != RegularizerKind::KSparse; }

  static RegularizerSpec l1(double radius) { return {RegularizerKind::L1Ball, radius, 1}; }
  static RegularizerSpec l2(double radius) { return {RegularizerKind::L2Ball, radius, 1}; }
  static RegularizerSpec ksparse(Index k) { return {RegularizerKind::KSparse, 0.0, k}; }

  /// Throws InvalidParameter when radius < 0 or k is out of [1, d].
  void validate(Index d) const;

  friend bool operator==(const RegularizerSpec&, const RegularizerSpec&) = default;
};

/// R(v): ‖v‖₁, ‖v‖₂ or the nonzero count, by kind.
double regularizer_value(RegularizerKind kind, const Vector& v);

/// Bound the projection is allowed to exceed R by, from rounding.
double feasibility_slack(double radius);

/// Euclidean projection onto K. ℓ1 uses the sort-based simplex reduction,
/// KSparse keeps the k largest magnitudes with ties going to lower indices.
/// Already-feasible inputs are returned unchanged, which makes re-projection
/// an exact fixed point.
Vector project(const RegularizerSpec& spec, const Vector& v);

/// 1 for convex constraints, 2 otherwise.
double kappa(const RegularizerSpec& spec);

/// Tunes the constraint to the truth: radius = R(θ*), or k = ‖θ*‖₀.
RegularizerSpec radius_from_truth(RegularizerKind kind, const GroundTruth& truth);

/// Tangent cone of R at θ* (the smallest closed cone containing the descent
/// set), plus a FullSpace variant used to exercise estimators on R^d.
class DescentCone {
 public:
  enum class Shape { L1Tangent, HalfSpace, KSparseHull, FullSpace };

  static DescentCone full_space(Index dim);
  /// Throws DegenerateCone when θ* = 0.
  static DescentCone at(const RegularizerSpec& spec, const Vector& theta_star);

  Shape shape() const { return shape_; }
  Index dim() const { return dim_; }

  /// Membership with absolute slack `tol·‖h‖`.
  bool contains(const Vector& h, double tol = 1e-10) const;

  /// Exact Euclidean projection for convex shapes; nullopt for KSparseHull.
  std::optional<Vector> project(const Vector& g) const;
  bool has_projection() const { return shape_ != Shape::KSparseHull; }

 private:
  DescentCone(Shape shape, Index dim) : shape_(shape), dim_(dim) {}

  Shape shape_;
  Index dim_;
  Vector theta_star_;
  Vector signs_;             ///< sign(θ*) on the support, 0 elsewhere
  Eigen::VectorXi on_support_;
  Index support_size_ = 0;
  Index k_ = 0;
};

/// Unit directions h/‖h‖ with R(θ* + h) ≤ R(θ*) checked to 1e-10 for every
/// returned h. Requires the spec to be tuned to θ* (radius = R(θ*), or
/// k = ‖θ*‖₀). Columns of the result are the samples.
SampleMatrix sample_descent_directions(const RegularizerSpec& spec, const GroundTruth& truth,
                                       Index count, std::uint64_t seed);

}  // namespace codedopt
