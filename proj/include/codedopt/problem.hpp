#pragma once

#include <cstdint>
#include <vector>

#include "codedopt/linalg.hpp"

namespace codedopt {

/// Sparse ground-truth parameter θ*.
struct GroundTruth {
  Vector theta_star;
  Index sparsity_k = 0;
  std::vector<Index> support;  ///< ascending, distinct, in [0, d)

  Index dim() const { return theta_star.size(); }
};

/// Entry variance of the synthetic design. `Standard` draws X_ij ~ N(0,1);
/// `Normalized` draws X_ij ~ N(0,1/n) so columns have unit expected norm.
enum class DesignScaling { Standard, Normalized };

/// Uncoded least-squares instance y = Xθ* + w.
struct Dataset {
  Matrix X;  ///< n×d, row i is feature vector x_i
  Vector y;
  Vector w;  ///< noise actually added

  Index rows() const { return X.rows(); }
  Index cols() const { return X.cols(); }
};

/// k distinct support indices drawn uniformly, values i.i.d. N(0,1).
GroundTruth gen_sparse_signal(Index d, Index k, std::uint64_t seed);

Dataset gen_dataset(const GroundTruth& truth, Index n, double noise_std, std::uint64_t seed,
                    DesignScaling scaling = DesignScaling::Standard);

/// ‖θ − θ*‖₂ / ‖θ*‖₂.
double relative_error(const Vector& theta, const GroundTruth& truth);

}  // namespace codedopt
