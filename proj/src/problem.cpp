#include "codedopt/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "codedopt/errors.hpp"
#include "codedopt/rng.hpp"

namespace codedopt {

GroundTruth gen_sparse_signal(Index d, Index k, std::uint64_t seed) {
  if (d <= 0) throw Error(Errc::InvalidParameter, "dimension d must be positive");
  if (k <= 0 || k > d) {
    throw Error(Errc::InvalidSparsity,
                "sparsity k=" + std::to_string(k) + " must satisfy 0 < k <= d=" + std::to_string(d));
  }
  Rng rng(seed);
  auto drawn = rng.sample_without_replacement(static_cast<std::size_t>(d), static_cast<std::size_t>(k));
  std::sort(drawn.begin(), drawn.end());

  GroundTruth truth;
  truth.theta_star = Vector::Zero(d);
  truth.sparsity_k = k;
  truth.support.reserve(drawn.size());
  for (std::size_t idx : drawn) {
    double value = 0.0;
    // A draw of exactly 0.0 would silently shrink the support.
    while (value == 0.0) value = rng.normal();
    truth.theta_star(static_cast<Index>(idx)) = value;
    truth.support.push_back(static_cast<Index>(idx));
  }
  return truth;
}

Dataset gen_dataset(const GroundTruth& truth, Index n, double noise_std, std::uint64_t seed,
                    DesignScaling scaling) {
  if (n <= 0) throw Error(Errc::InvalidParameter, "row count n must be positive");
  if (!(noise_std >= 0.0)) throw Error(Errc::InvalidParameter, "noise_std must be nonnegative");
  const Index d = truth.dim();
  const double scale = scaling == DesignScaling::Normalized ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;

  Rng rng(seed);
  Dataset data;
  data.X.resize(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) data.X(i, j) = scale * rng.normal();
  data.w.resize(n);
  for (Index i = 0; i < n; ++i) data.w(i) = noise_std * rng.normal();
  data.y = data.X * truth.theta_star + data.w;
  return data;
}

double relative_error(const Vector& theta, const GroundTruth& truth) {
  if (theta.size() != truth.dim()) {
    throw Error(Errc::InvalidShape, "relative_error: dimension mismatch");
  }
  double denom = truth.theta_star.norm();
  if (denom == 0.0) throw Error(Errc::DivisionByZero, "relative_error: ||theta*|| is zero");
  return (theta - truth.theta_star).norm() / denom;
}

}  // namespace codedopt
