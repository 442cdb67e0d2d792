#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "codedopt/errors.hpp"
#include "codedopt/problem.hpp"

using namespace codedopt;

TEST(SparseSignal, PaperScaleHasTwentyNonzeros) {
  GroundTruth t = gen_sparse_signal(4000, 20, 1);
  EXPECT_EQ(t.dim(), 4000);
  EXPECT_EQ(t.sparsity_k, 20);
  EXPECT_EQ(t.support.size(), 20u);
  Index nonzero = 0;
  for (Index i = 0; i < t.dim(); ++i) nonzero += t.theta_star(i) != 0.0;
  EXPECT_EQ(nonzero, 20);
  std::set<Index> unique(t.support.begin(), t.support.end());
  EXPECT_EQ(unique.size(), 20u);
  for (Index idx : t.support) {
    EXPECT_GE(idx, 0);
    EXPECT_LT(idx, 4000);
    EXPECT_NE(t.theta_star(idx), 0.0);
  }
  EXPECT_TRUE(std::is_sorted(t.support.begin(), t.support.end()));
}

TEST(SparseSignal, FullSupportWhenKEqualsD) {
  GroundTruth t = gen_sparse_signal(5, 5, 3);
  EXPECT_EQ(t.support, (std::vector<Index>{0, 1, 2, 3, 4}));
  for (Index i = 0; i < 5; ++i) EXPECT_NE(t.theta_star(i), 0.0);
}

TEST(SparseSignal, Deterministic) {
  GroundTruth a = gen_sparse_signal(10, 3, 7);
  GroundTruth b = gen_sparse_signal(10, 3, 7);
  EXPECT_EQ(a.theta_star, b.theta_star);
  EXPECT_EQ(a.support, b.support);
  GroundTruth c = gen_sparse_signal(10, 3, 8);
  EXPECT_NE(a.theta_star, c.theta_star);
}

TEST(SparseSignal, RejectsBadSparsity) {
  for (Index k : {Index{0}, Index{11}, Index{-1}}) {
    try {
      gen_sparse_signal(10, k, 1);
      FAIL() << "k=" << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidSparsity);
    }
  }
}

TEST(Dataset, NoiselessPaperInstance) {
  GroundTruth t = gen_sparse_signal(4000, 20, 2);
  Dataset d = gen_dataset(t, 3000, 0.0, 3);
  EXPECT_EQ(d.rows(), 3000);
  EXPECT_EQ(d.cols(), 4000);
  EXPECT_EQ(d.w.norm(), 0.0);
  EXPECT_EQ((d.y - d.X * t.theta_star).norm(), 0.0);
}

TEST(Dataset, SingleRow) {
  GroundTruth t = gen_sparse_signal(6, 2, 4);
  Dataset d = gen_dataset(t, 1, 0.0, 5);
  ASSERT_EQ(d.rows(), 1);
  EXPECT_DOUBLE_EQ(d.y(0), d.X.row(0).dot(t.theta_star));
}

TEST(Dataset, EntriesHaveZeroMean) {
  GroundTruth t = gen_sparse_signal(10, 2, 6);
  Dataset d = gen_dataset(t, 10000, 0.0, 7);
  double mean = d.X.mean();
  EXPECT_NEAR(mean, 0.0, 0.03);
  double var = (d.X.array() - mean).square().mean();
  EXPECT_NEAR(var, 1.0, 0.03);
}

TEST(Dataset, NormalizedScalingHasVarianceOneOverN) {
  GroundTruth t = gen_sparse_signal(50, 2, 6);
  Dataset d = gen_dataset(t, 400, 0.0, 7, DesignScaling::Normalized);
  double var = d.X.array().square().mean();
  EXPECT_NEAR(var * 400.0, 1.0, 0.03);
}

TEST(Dataset, NoiseIsRecoverable) {
  GroundTruth t = gen_sparse_signal(30, 4, 8);
  Dataset d = gen_dataset(t, 40, 0.5, 9);
  EXPECT_GT(d.w.norm(), 0.0);
  EXPECT_LE((d.y - d.X * t.theta_star - d.w).lpNorm<Eigen::Infinity>(), 1e-12);
  Dataset again = gen_dataset(t, 40, 0.5, 9);
  EXPECT_EQ(d.X, again.X);
  EXPECT_EQ(d.y, again.y);
}

TEST(Dataset, RejectsNegativeNoise) {
  GroundTruth t = gen_sparse_signal(5, 1, 1);
  try {
    gen_dataset(t, 3, -0.1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidParameter);
  }
}

TEST(RelativeError, Examples) {
  GroundTruth t = gen_sparse_signal(8, 3, 11);
  EXPECT_EQ(relative_error(t.theta_star, t), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(2.0 * t.theta_star, t), 1.0);

  GroundTruth hand;
  hand.theta_star = Vector(2);
  hand.theta_star << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(relative_error(Vector::Zero(2), hand), 1.0);
}

TEST(RelativeError, ZeroTruthIsAnError) {
  GroundTruth zero;
  zero.theta_star = Vector::Zero(3);
  try {
    relative_error(Vector::Ones(3), zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DivisionByZero);
  }
}

TEST(RelativeError, PositiveAwayFromTruth) {
  GroundTruth t = gen_sparse_signal(8, 3, 12);
  Vector theta = t.theta_star;
  theta(0) += 1e-9;
  EXPECT_GT(relative_error(theta, t), 0.0);
}
