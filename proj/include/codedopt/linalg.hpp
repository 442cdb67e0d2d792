#pragma once

#include <Eigen/Dense>

namespace codedopt {

using Index = Eigen::Index;
/// Dense row-major storage; workers own contiguous row blocks.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
/// Column-per-sample storage for direction sets.
using SampleMatrix = Eigen::MatrixXd;

/// Largest singular value by power iteration on XᵀX; stops when the relative
/// change drops below `rel_tol`.
double spectral_norm(const Matrix& X, double rel_tol = 1e-8, int max_iter = 10000);

}  // namespace codedopt
