#include "codedopt/linalg.hpp"

#include <cmath>

namespace codedopt {

double spectral_norm(const Matrix& X, double rel_tol, int max_iter) {
  if (X.size() == 0) return 0.0;
  // Deterministic, non-degenerate start.
  Vector v(X.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = 1.0 + 0.1 * std::sin(static_cast<double>(i + 1));
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector Xv = X * v;
    Vector next = X.transpose() * Xv;
    double norm = next.norm();
    if (norm == 0.0) return 0.0;
    double estimate = std::sqrt(norm);
    next /= norm;
    bool done = std::abs(estimate - sigma) <= rel_tol * estimate;
    sigma = estimate;
    v = std::move(next);
    if (done) break;
  }
  return (X * v).norm();
}

}  // namespace codedopt
