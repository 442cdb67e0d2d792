#include "codedopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "codedopt/errors.hpp"
#include "codedopt/parallel.hpp"
#include "codedopt/rng.hpp"

namespace codedopt {

namespace {

constexpr Index kWidthBatch = 64;
constexpr Index kPairBlock = 256;

void require_samples(const SampleMatrix& samples, Index dim, const char* what) {
  if (samples.cols() == 0) throw Error(Errc::InvalidSampleSet, std::string(what) + ": sample set is empty");
  if (samples.rows() != dim) {
    throw Error(Errc::InvalidShape, std::string(what) + ": samples live in R^" + std::to_string(samples.rows()) +
                                        ", expected R^" + std::to_string(dim));
  }
}

bool refinable(const ConeRefinement& refine) {
  return refine.cone != nullptr && refine.cone->has_projection() && refine.iterations > 0;
}

/// Π_C(g)/‖Π_C(g)‖ when that is a nonzero verified member of C.
std::optional<Vector> cone_unit(const DescentCone& cone, const Vector& g) {
  auto p = cone.project(g);
  if (!p) return std::nullopt;
  double norm = p->norm();
  if (!(norm > 1e-14 * std::max(1.0, g.norm()))) return std::nullopt;
  Vector u = *p / norm;
  if (!cone.contains(u, 1e-9)) return std::nullopt;
  return u;
}

Vector gaussian_vector(Rng& rng, Index dim) {
  Vector g(dim);
  for (Index i = 0; i < dim; ++i) g(i) = rng.normal();
  return g;
}

/// Columns of `samples` ordered by descending score, at most `count`.
std::vector<Index> top_columns(const Vector& scores, Index count) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  count = std::min<Index>(count, scores.size());
  std::partial_sort(order.begin(), order.begin() + count, order.end(),
                    [&](Index a, Index b) { return scores(a) > scores(b); });
  order.resize(static_cast<std::size_t>(count));
  return order;
}

Vector apply_rate_operator(const Matrix& X, double mu_tilde, const Vector& v) {
  Vector Xv = X * v;
  return v - mu_tilde * (X.transpose() * Xv);
}

}  // namespace

WidthEstimate estimate_gaussian_width(const SampleMatrix& unit_samples, Index draws, std::uint64_t seed) {
  if (unit_samples.cols() == 0) throw Error(Errc::InvalidSampleSet, "gaussian width: sample set is empty");
  if (draws < 1) throw Error(Errc::InvalidParameter, "gaussian width needs at least one draw");
  for (Index j = 0; j < unit_samples.cols(); ++j) {
    if (std::abs(unit_samples.col(j).norm() - 1.0) > 1e-8) {
      throw Error(Errc::InvalidSampleSet, "gaussian width: sample " + std::to_string(j) + " is not a unit vector");
    }
  }
  const Index n = unit_samples.rows();
  const Index batches = (draws + kWidthBatch - 1) / kWidthBatch;
  std::vector<double> sums(static_cast<std::size_t>(batches));
  std::vector<double> squares(static_cast<std::size_t>(batches));
  parallel_for(static_cast<std::size_t>(batches), [&](std::size_t b) {
    const Index begin = static_cast<Index>(b) * kWidthBatch;
    const Index size = std::min(kWidthBatch, draws - begin);
    Rng rng(derive_seed(seed, "width-draws", {b}));
    Eigen::MatrixXd G(n, size);
    for (Index j = 0; j < size; ++j)
      for (Index i = 0; i < n; ++i) G(i, j) = rng.normal();
    Eigen::RowVectorXd sup = (unit_samples.transpose() * G).colwise().maxCoeff();
    sums[b] = sup.sum();
    squares[b] = sup.squaredNorm();
  });
  const double nd = static_cast<double>(draws);
  const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) / nd;
  const double sq = std::accumulate(squares.begin(), squares.end(), 0.0);
  const double var = draws > 1 ? std::max(0.0, (sq - nd * mean * mean) / (nd - 1.0)) : 0.0;
  return {mean, std::sqrt(var / nd), draws, unit_samples.cols()};
}

SampleMatrix map_through(const Matrix& X, const SampleMatrix& directions, Index* dropped) {
  require_samples(directions, X.cols(), "map_through");
  Eigen::MatrixXd mapped = X * directions;
  std::vector<Index> keep;
  for (Index j = 0; j < mapped.cols(); ++j) {
    double norm = mapped.col(j).norm();
    if (norm > 1e-12 * std::max(1.0, directions.col(j).norm())) {
      mapped.col(j) /= norm;
      keep.push_back(j);
    }
  }
  if (dropped) *dropped = directions.cols() - static_cast<Index>(keep.size());
  SampleMatrix out(mapped.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Index>(j)) = mapped.col(keep[j]);
  return out;
}

double minimal_computational_load(double omega, double eta) {
  if (omega < 0.0 || eta < 0.0) {
    throw Error(Errc::InvalidParameter, "minimal computational load needs omega >= 0 and eta >= 0");
  }
  return (omega + eta) * (omega + eta);
}

SpectralEstimate cone_restricted_spectral_norm(const Matrix& X, const SampleMatrix& unit_samples,
                                               const ConeRefinement& refine) {
  require_samples(unit_samples, X.cols(), "cone-restricted spectral norm");
  SpectralEstimate out;
  out.samples = unit_samples.cols();
  out.upper_bound = spectral_norm(X);
  Vector norms = (X * unit_samples).colwise().norm().transpose();
  out.value = norms.maxCoeff();

  if (refinable(refine)) {
    const DescentCone& cone = *refine.cone;
    std::vector<Vector> starts;
    for (Index j : top_columns(norms, refine.starts)) starts.emplace_back(unit_samples.col(j));
    Rng rng(derive_seed(refine.seed, "refine-sigma"));
    for (Index r = 0; r < refine.starts; ++r) {
      if (auto u = cone_unit(cone, gaussian_vector(rng, X.cols()))) starts.push_back(*u);
    }
    for (Vector u : starts) {
      double prev = (X * u).norm();
      for (Index it = 0; it < refine.iterations; ++it) {
        auto next = cone_unit(cone, X.transpose() * (X * u));
        if (!next) break;
        u = std::move(*next);
        double value = (X * u).norm();
        out.value = std::max(out.value, value);
        if (std::abs(value - prev) <= 1e-13 * std::max(1.0, value)) break;
        prev = value;
      }
    }
  }
  return out;
}

SpectralEstimate convergence_rate_rho(const Matrix& X, double mu_tilde, const SampleMatrix& unit_samples,
                                      const ConeRefinement& refine) {
  require_samples(unit_samples, X.cols(), "convergence rate");
  if (mu_tilde < 0.0) throw Error(Errc::InvalidParameter, "mu_tilde must be nonnegative");
  SpectralEstimate out;
  out.samples = unit_samples.cols();
  const double sigma = spectral_norm(X);
  out.upper_bound = std::max(1.0, std::abs(1.0 - mu_tilde * sigma * sigma));

  // Images M·v for every sample, then uᵀ(Mv) over pair blocks to bound memory.
  Eigen::MatrixXd images = unit_samples - mu_tilde * (X.transpose() * (X * unit_samples));
  const Index N = unit_samples.cols();
  double best = -std::numeric_limits<double>::infinity();
  Index best_u = 0;
  Index best_v = 0;
  for (Index begin = 0; begin < N; begin += kPairBlock) {
    const Index size = std::min(kPairBlock, N - begin);
    Eigen::MatrixXd block = unit_samples.transpose() * images.middleCols(begin, size);
    Index r = 0;
    Index c = 0;
    double value = block.maxCoeff(&r, &c);
    if (value > best) {
      best = value;
      best_u = r;
      best_v = begin + c;
    }
  }
  out.value = best;

  if (refinable(refine)) {
    const DescentCone& cone = *refine.cone;
    std::vector<Vector> starts{unit_samples.col(best_u), unit_samples.col(best_v)};
    Rng rng(derive_seed(refine.seed, "refine-rho"));
    for (Index r = 0; r < refine.starts; ++r) {
      if (auto u = cone_unit(cone, gaussian_vector(rng, X.cols()))) starts.push_back(*u);
    }
    for (Vector u : starts) {
      double prev = -std::numeric_limits<double>::infinity();
      for (Index it = 0; it < refine.iterations; ++it) {
        auto v = cone_unit(cone, apply_rate_operator(X, mu_tilde, u));
        if (!v) break;
        auto next = cone_unit(cone, apply_rate_operator(X, mu_tilde, *v));
        if (!next) break;
        u = std::move(*next);
        double value = u.dot(apply_rate_operator(X, mu_tilde, *v));
        out.value = std::max(out.value, value);
        if (std::abs(value - prev) <= 1e-13 * std::max(1.0, std::abs(value))) break;
        prev = value;
      }
    }
  }
  return out;
}

SpectralEstimate noise_amplification_xi(const Matrix& X, const Vector& w, const SampleMatrix& negated_samples,
                                        const ConeRefinement& refine) {
  require_samples(negated_samples, X.cols(), "noise amplification");
  if (w.size() != X.rows()) throw Error(Errc::InvalidShape, "noise vector length does not match X");
  const double wnorm = w.norm();
  if (!(wnorm > 0.0)) throw Error(Errc::InvalidParameter, "noise amplification is undefined for w = 0");
  SpectralEstimate out;
  out.samples = negated_samples.cols();
  Vector a = X.transpose() * (w / wnorm);
  out.upper_bound = a.norm();
  out.value = (negated_samples.transpose() * a).maxCoeff();

  // Over unit v ∈ −C the maximizer of ⟨v, a⟩ is −Π_C(−a)/‖Π_C(−a)‖.
  if (refinable(refine)) {
    if (auto u = cone_unit(*refine.cone, -a)) out.value = std::max(out.value, -u->dot(a));
  }
  return out;
}

WidthEstimate estimate_conic_width(const Matrix& X, const SampleMatrix& directions, Index draws,
                                   std::uint64_t seed, const ConeRefinement& refine) {
  if (draws < 1) throw Error(Errc::InvalidParameter, "conic width needs at least one draw");
  Index dropped = 0;
  SampleMatrix mapped = map_through(X, directions, &dropped);
  if (mapped.cols() == 0) throw Error(Errc::InvalidSampleSet, "every direction lies in the null space of X");

  const Index n = X.rows();
  const bool refined = refinable(refine);
  const double sigma = refined ? spectral_norm(X) : 0.0;
  const double lipschitz = sigma * sigma;

  const Index batches = (draws + kWidthBatch - 1) / kWidthBatch;
  std::vector<double> sums(static_cast<std::size_t>(batches));
  std::vector<double> squares(static_cast<std::size_t>(batches));
  parallel_for(static_cast<std::size_t>(batches), [&](std::size_t b) {
    const Index begin = static_cast<Index>(b) * kWidthBatch;
    const Index size = std::min(kWidthBatch, draws - begin);
    Rng rng(derive_seed(seed, "width-draws", {b}));
    Eigen::MatrixXd G(n, size);
    for (Index j = 0; j < size; ++j)
      for (Index i = 0; i < n; ++i) G(i, j) = rng.normal();
    Eigen::RowVectorXd sup = (mapped.transpose() * G).colwise().maxCoeff();

    if (refined && lipschitz > 0.0) {
      const DescentCone& cone = *refine.cone;
      for (Index j = 0; j < size; ++j) {
        const Vector g = G.col(j);
        Vector h = Vector::Zero(X.cols());
        Vector y = h;
        double t = 1.0;
        for (Index it = 0; it < refine.iterations; ++it) {
          Vector step = y - (X.transpose() * (X * y - g)) / lipschitz;
          auto proj = cone.project(step);
          if (!proj) break;
          double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
          y = *proj + ((t - 1.0) / t_next) * (*proj - h);
          h = std::move(*proj);
          t = t_next;
        }
        Vector z = X * h;
        double znorm = z.norm();
        if (znorm > 1e-12 && cone.contains(h, 1e-9)) sup(j) = std::max(sup(j), g.dot(z) / znorm);
      }
    }
    sums[b] = sup.sum();
    squares[b] = sup.squaredNorm();
  });
  const double nd = static_cast<double>(draws);
  const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) / nd;
  const double sq = std::accumulate(squares.begin(), squares.end(), 0.0);
  const double var = draws > 1 ? std::max(0.0, (sq - nd * mean * mean) / (nd - 1.0)) : 0.0;
  return {mean, std::sqrt(var / nd), draws, mapped.cols()};
}

GeometryEstimates estimate_geometry(const Dataset& dataset, const GroundTruth& truth, const RegularizerSpec& spec,
                                    double mu_tilde, const GeometryOptions& options) {
  if (options.samples < 1) throw Error(Errc::InvalidParameter, "geometry needs at least one cone sample");
  const DescentCone cone = DescentCone::at(spec, truth.theta_star);
  SampleMatrix dirs =
      sample_descent_directions(spec, truth, options.samples, derive_seed(options.seed, "geometry-cone"));

  ConeRefinement refine;
  if (options.refine && cone.has_projection()) {
    refine = {&cone, options.refine_iterations, 4, derive_seed(options.seed, "geometry-refine")};
  }

  GeometryEstimates out;
  out.eta = options.eta;
  out.mu_tilde = mu_tilde;
  out.kappa = kappa(spec);
  out.mc_samples = options.samples;
  out.width_draws = options.width_draws;

  Index dropped = 0;
  map_through(dataset.X, dirs, &dropped);
  out.dropped_directions = dropped;
  WidthEstimate width =
      estimate_conic_width(dataset.X, dirs, options.width_draws, derive_seed(options.seed, "geometry-width"), refine);
  out.omega = std::max(0.0, width.omega);
  out.omega_std_error = width.std_error;
  out.m0 = minimal_computational_load(out.omega, out.eta);

  SpectralEstimate sigma = cone_restricted_spectral_norm(dataset.X, dirs, refine);
  out.sigma_R = sigma.value;
  out.sigma_upper = sigma.upper_bound;

  SpectralEstimate rho = convergence_rate_rho(dataset.X, mu_tilde, dirs, refine);
  out.rho = std::max(0.0, rho.value);
  out.rho_upper = rho.upper_bound;

  if (dataset.w.norm() > 0.0) {
    SpectralEstimate xi = noise_amplification_xi(dataset.X, dataset.w, -dirs, refine);
    out.xi = std::max(0.0, xi.value);
    out.xi_upper = xi.upper_bound;
  }
  return out;
}

}  // namespace codedopt
