#include "codedopt/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "codedopt/errors.hpp"
#include "codedopt/rng.hpp"

namespace codedopt {

std::string_view to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::L1Ball: return "l1";
    case RegularizerKind::L2Ball: return "l2";
    case RegularizerKind::KSparse: return "ksparse";
  }
  return "l1";
}

std::optional<RegularizerKind> parse_regularizer_kind(std::string_view text) {
  if (text == "l1") return RegularizerKind::L1Ball;
  if (text == "l2") return RegularizerKind::L2Ball;
  if (text == "ksparse") return RegularizerKind::KSparse;
  return std::nullopt;
}

void RegularizerSpec::validate(Index d) const {
  if (kind == RegularizerKind::KSparse) {
    if (k < 1 || k > d) {
      throw Error(Errc::InvalidParameter,
                  "ksparse k=" + std::to_string(k) + " must lie in [1, " + std::to_string(d) + "]");
    }
  } else if (!(radius >= 0.0)) {
    throw Error(Errc::InvalidParameter, "regularizer radius must be nonnegative");
  }
}

double regularizer_value(RegularizerKind kind, const Vector& v) {
  switch (kind) {
    case RegularizerKind::L1Ball: return v.lpNorm<1>();
    case RegularizerKind::L2Ball: return v.norm();
    case RegularizerKind::KSparse: return static_cast<double>((v.array() != 0.0).count());
  }
  return 0.0;
}

double feasibility_slack(double radius) { return 1e-12 * std::max(1.0, radius); }

namespace {

Vector project_l1(const Vector& v, double radius) {
  if (v.lpNorm<1>() <= radius + feasibility_slack(radius)) return v;
  if (radius == 0.0) return Vector::Zero(v.size());

  std::vector<double> mags(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(v(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());

  // Largest j with mags[j] > (sum_{i<=j} mags[i] - R) / (j+1).
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (mags[j] - candidate > 0.0) threshold = candidate;
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    double shrunk = std::max(std::abs(v(i)) - threshold, 0.0);
    out(i) = std::copysign(shrunk, v(i));
    if (shrunk == 0.0) out(i) = 0.0;
  }
  return out;
}

Vector project_l2(const Vector& v, double radius) {
  double norm = v.norm();
  if (norm <= radius + feasibility_slack(radius)) return v;
  if (radius == 0.0) return Vector::Zero(v.size());
  return v * (radius / norm);
}

Vector project_ksparse(const Vector& v, Index k) {
  if (k >= v.size()) return v;
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
  Vector out = Vector::Zero(v.size());
  for (Index i = 0; i < k; ++i) {
    Index idx = order[static_cast<std::size_t>(i)];
    out(idx) = v(idx);
  }
  return out;
}

}  // namespace

Vector project(const RegularizerSpec& spec, const Vector& v) {
  switch (spec.kind) {
    case RegularizerKind::L1Ball: return project_l1(v, spec.radius);
    case RegularizerKind::L2Ball: return project_l2(v, spec.radius);
    case RegularizerKind::KSparse: return project_ksparse(v, spec.k);
  }
  return v;
}

double kappa(const RegularizerSpec& spec) { return spec.convex() ? 1.0 : 2.0; }

RegularizerSpec radius_from_truth(RegularizerKind kind, const GroundTruth& truth) {
  switch (kind) {
    case RegularizerKind::L1Ball: return RegularizerSpec::l1(truth.theta_star.lpNorm<1>());
    case RegularizerKind::L2Ball: return RegularizerSpec::l2(truth.theta_star.norm());
    case RegularizerKind::KSparse:
      return RegularizerSpec::ksparse(static_cast<Index>((truth.theta_star.array() != 0.0).count()));
  }
  return {};
}

// ---------------------------------------------------------------------------
// DescentCone

DescentCone DescentCone::full_space(Index dim) { return DescentCone(Shape::FullSpace, dim); }

DescentCone DescentCone::at(const RegularizerSpec& spec, const Vector& theta_star) {
  if ((theta_star.array() != 0.0).count() == 0) {
    throw Error(Errc::DegenerateCone, "descent cone at theta* = 0 is the whole space");
  }
  Shape shape = Shape::L1Tangent;
  if (spec.kind == RegularizerKind::L2Ball) shape = Shape::HalfSpace;
  if (spec.kind == RegularizerKind::KSparse) shape = Shape::KSparseHull;

  DescentCone cone(shape, theta_star.size());
  cone.theta_star_ = theta_star;
  cone.signs_ = Vector::Zero(theta_star.size());
  cone.on_support_ = Eigen::VectorXi::Zero(theta_star.size());
  for (Index i = 0; i < theta_star.size(); ++i) {
    if (theta_star(i) != 0.0) {
      cone.signs_(i) = theta_star(i) > 0.0 ? 1.0 : -1.0;
      cone.on_support_(i) = 1;
      ++cone.support_size_;
    }
  }
  cone.k_ = spec.kind == RegularizerKind::KSparse ? spec.k : cone.support_size_;
  return cone;
}

bool DescentCone::contains(const Vector& h, double tol) const {
  const double slack = tol * std::max(h.norm(), 1e-300);
  switch (shape_) {
    case Shape::FullSpace: return true;
    case Shape::HalfSpace: return theta_star_.dot(h) <= slack * theta_star_.norm();
    case Shape::L1Tangent: {
      // Directional derivative of ‖·‖₁ at θ* along h.
      double derivative = 0.0;
      for (Index i = 0; i < h.size(); ++i) {
        derivative += on_support_(i) != 0 ? signs_(i) * h(i) : std::abs(h(i));
      }
      return derivative <= slack;
    }
    case Shape::KSparseHull: {
      // h = t(v − θ*) with ‖v‖₀ ≤ k: θ* + h/t must be k-sparse for some t > 0.
      Index union_size = 0;
      std::vector<double> ratios;
      for (Index i = 0; i < h.size(); ++i) {
        bool h_nz = std::abs(h(i)) > slack;
        bool s_nz = on_support_(i) != 0;
        if (h_nz || s_nz) ++union_size;
        if (h_nz && s_nz) {
          double r = -h(i) / theta_star_(i);
          if (r > 0.0) ratios.push_back(r);
        }
      }
      std::sort(ratios.begin(), ratios.end());
      Index best = 0;
      for (std::size_t a = 0; a < ratios.size();) {
        std::size_t b = a;
        while (b < ratios.size() && ratios[b] - ratios[a] <= 1e-9 * ratios[a]) ++b;
        best = std::max<Index>(best, static_cast<Index>(b - a));
        a = b;
      }
      return union_size - best <= k_;
    }
  }
  return false;
}

std::optional<Vector> DescentCone::project(const Vector& g) const {
  switch (shape_) {
    case Shape::FullSpace: return g;
    case Shape::HalfSpace: {
      Vector unit = theta_star_.normalized();
      double along = unit.dot(g);
      return along > 0.0 ? Vector(g - along * unit) : g;
    }
    case Shape::KSparseHull: return std::nullopt;
    case Shape::L1Tangent: break;
  }

  // Moreau: Π_C(g) = g − Π_{C°}(g) with C° = ∪_{t≥0} t·∂‖θ*‖₁. The distance to
  // t·∂‖θ*‖₁ is convex in t; its derivative is piecewise linear in t with
  // breakpoints at the off-support magnitudes.
  double on_support_corr = 0.0;
  std::vector<double> off;
  for (Index i = 0; i < g.size(); ++i) {
    if (on_support_(i) != 0) on_support_corr += signs_(i) * g(i);
    else off.push_back(std::abs(g(i)));
  }
  std::sort(off.begin(), off.end(), std::greater<>());
  const double k = static_cast<double>(support_size_);

  double t = 0.0;
  double partial = 0.0;
  for (std::size_t j = 0; j <= off.size(); ++j) {
    if (j > 0) partial += off[j - 1];
    double upper = j == 0 ? std::numeric_limits<double>::infinity() : off[j - 1];
    double lower = j < off.size() ? off[j] : 0.0;
    double candidate = (on_support_corr + partial) / (k + static_cast<double>(j));
    if (candidate >= lower && candidate <= upper) {
      t = candidate;
      break;
    }
  }
  t = std::max(t, 0.0);

  Vector out(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    if (on_support_(i) != 0) {
      out(i) = g(i) - t * signs_(i);
    } else {
      double shrunk = std::max(std::abs(g(i)) - t, 0.0);
      out(i) = shrunk == 0.0 ? 0.0 : std::copysign(shrunk, g(i));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Descent-direction sampling

namespace {

constexpr double kMembershipTol = 1e-10;

Vector gaussian(Rng& rng, Index d) {
  Vector g(d);
  for (Index i = 0; i < d; ++i) g(i) = rng.normal();
  return g;
}

/// Off-support perturbation paired with enough on-support shrinkage.
Vector l1_shrink_direction(Rng& rng, const GroundTruth& truth) {
  const Index d = truth.dim();
  const Index k = static_cast<Index>(truth.support.size());
  Vector h = Vector::Zero(d);
  std::vector<Index> off;
  off.reserve(static_cast<std::size_t>(d - k));
  for (Index i = 0, s = 0; i < d; ++i) {
    if (s < k && truth.support[static_cast<std::size_t>(s)] == i) {
      ++s;
      continue;
    }
    off.push_back(i);
  }
  Index q = off.empty() ? 0 : static_cast<Index>(rng.index(std::min<std::size_t>(off.size(), 2 * k + 2) + 1));
  auto picks = rng.sample_without_replacement(off.size(), static_cast<std::size_t>(q));
  for (std::size_t p : picks) h(off[p]) = rng.normal();
  double off_l1 = h.lpNorm<1>();

  double corr = 0.0;
  double on_norm2 = 0.0;
  for (Index i : truth.support) {
    h(i) = rng.normal();
    corr += (truth.theta_star(i) > 0 ? 1.0 : -1.0) * h(i);
    on_norm2 += h(i) * h(i);
  }
  double shift = std::max(0.0, (corr + off_l1) / static_cast<double>(k));
  shift += 0.5 * rng.uniform() * std::sqrt(on_norm2 / static_cast<double>(k));
  for (Index i : truth.support) h(i) -= shift * (truth.theta_star(i) > 0 ? 1.0 : -1.0);
  return h;
}

Vector halfspace_direction(Rng& rng, const Vector& theta_star) {
  Vector g = gaussian(rng, theta_star.size());
  Vector unit = theta_star.normalized();
  double along = unit.dot(g);
  double push = 0.5 * rng.uniform() * g.norm() / std::sqrt(static_cast<double>(g.size()));
  return g - (std::max(along, 0.0) + push) * unit;
}

Vector ksparse_direction(Rng& rng, const GroundTruth& truth, Index k, bool on_support_only) {
  const Index d = truth.dim();
  Vector v = Vector::Zero(d);
  if (on_support_only) {
    for (Index i : truth.support) v(i) = truth.theta_star(i) + rng.normal();
    return v - truth.theta_star;
  }
  // Swap j support entries for fresh off-support ones; keep the rest.
  Index support_size = static_cast<Index>(truth.support.size());
  Index swaps = 1 + static_cast<Index>(rng.index(static_cast<std::size_t>(std::max<Index>(1, support_size))));
  auto kept = rng.sample_without_replacement(static_cast<std::size_t>(support_size),
                                             static_cast<std::size_t>(std::max<Index>(0, support_size - swaps)));
  for (std::size_t p : kept) v(truth.support[p]) = rng.normal();
  Index budget = k - static_cast<Index>(kept.size());
  std::vector<Index> off;
  for (Index i = 0; i < d; ++i)
    if (truth.theta_star(i) == 0.0) off.push_back(i);
  auto fresh = rng.sample_without_replacement(off.size(), std::min<std::size_t>(off.size(), static_cast<std::size_t>(budget)));
  for (std::size_t p : fresh) v(off[p]) = rng.normal();
  return v - truth.theta_star;
}

/// Scales a tangent direction so that θ* + h stays inside the descent set.
double raw_scale(const RegularizerSpec& spec, const GroundTruth& truth, const Vector& h) {
  if (spec.kind == RegularizerKind::KSparse) return 1.0;
  double min_support = std::numeric_limits<double>::infinity();
  for (Index i : truth.support) min_support = std::min(min_support, std::abs(truth.theta_star(i)));
  double step = std::min(1e-6, 0.5 * min_support);
  return step / std::max(h.lpNorm<Eigen::Infinity>(), 1e-300);
}

}  // namespace

SampleMatrix sample_descent_directions(const RegularizerSpec& spec, const GroundTruth& truth,
                                       Index count, std::uint64_t seed) {
  const Index d = truth.dim();
  DescentCone cone = DescentCone::at(spec, truth.theta_star);
  const double r_star = regularizer_value(spec.kind, truth.theta_star);
  if (spec.kind == RegularizerKind::KSparse) {
    if (spec.k != static_cast<Index>(r_star)) {
      throw Error(Errc::InvalidParameter, "ksparse k must equal the sparsity of theta*");
    }
  } else if (std::abs(spec.radius - r_star) > 1e-9 * std::max(1.0, r_star)) {
    throw Error(Errc::InvalidParameter, "descent directions need radius = R(theta*)");
  }

  SampleMatrix out(d, std::max<Index>(count, 0));
  Rng rng(seed);
  Index filled = 0;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 100 * static_cast<std::size_t>(std::max<Index>(count, 1)) + 1000;
  while (filled < count) {
    if (++attempts > max_attempts) {
      throw Error(Errc::DegenerateCone, "descent-direction sampler could not fill the request");
    }
    Vector h;
    switch (filled % 3) {
      case 0:  // structured perturbation
        if (spec.kind == RegularizerKind::L1Ball) h = l1_shrink_direction(rng, truth);
        else if (spec.kind == RegularizerKind::L2Ball) h = halfspace_direction(rng, truth.theta_star);
        else h = ksparse_direction(rng, truth, spec.k, false);
        break;
      case 1: {  // rejection sampling of plain Gaussian directions
        bool accepted = false;
        for (int tries = 0; tries < 32 && !accepted; ++tries) {
          h = gaussian(rng, d);
          accepted = cone.contains(h, 0.0);
        }
        if (!accepted) {
          if (spec.kind == RegularizerKind::KSparse) h = ksparse_direction(rng, truth, spec.k, true);
          else h = *cone.project(gaussian(rng, d));
        }
        break;
      }
      default:  // exact tangent-cone projection
        if (spec.kind == RegularizerKind::KSparse) h = ksparse_direction(rng, truth, spec.k, true);
        else h = *cone.project(gaussian(rng, d));
        break;
    }
    double norm = h.norm();
    if (!(norm > 0.0)) continue;
    Vector raw = raw_scale(spec, truth, h) * h;
    if (regularizer_value(spec.kind, truth.theta_star + raw) > r_star + kMembershipTol) continue;
    out.col(filled++) = h / norm;
  }
  return out;
}

}  // namespace codedopt
