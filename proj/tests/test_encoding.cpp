#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "codedopt/encoding.hpp"
#include "codedopt/errors.hpp"

using namespace codedopt;

TEST(Dct, Orthonormal) {
  Matrix H = dct_matrix(16);
  EXPECT_LE((H * H.transpose() - Matrix::Identity(16, 16)).norm(), 1e-12);
}

TEST(Dct, MatchesDefinition) {
  const Index n = 7;
  Matrix H = dct_matrix(n);
  for (Index k = 0; k < n; ++k) {
    const double c = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (Index j = 0; j < n; ++j) {
      EXPECT_NEAR(H(k, j), c * std::cos(std::numbers::pi * (2 * j + 1) * k / (2.0 * n)), 1e-14);
    }
  }
}

TEST(Encoder, GaussianShapeAndDeterminism) {
  EncoderSpec spec{EncoderKind::Gaussian, 12, 9, 42};
  Matrix A = build_encoder(spec);
  EXPECT_EQ(A.rows(), 12);
  EXPECT_EQ(A.cols(), 9);
  EXPECT_EQ(A, build_encoder(spec));
  spec.seed = 43;
  EXPECT_NE(A, build_encoder(spec));
}

TEST(Encoder, RandomizedDctRowsAreOrthonormal) {
  EncoderSpec spec{EncoderKind::RandomizedDCT, 10, 32, 5};
  Matrix A = build_encoder(spec);
  EXPECT_LE((A * A.transpose() - Matrix::Identity(10, 10)).norm(), 1e-12);
  // Every entry has magnitude of some DCT entry: sign flips only.
  Matrix H = dct_matrix(32);
  for (Index i = 0; i < A.rows(); ++i) {
    bool found = false;
    for (Index r = 0; r < 32 && !found; ++r) {
      found = (A.row(i).cwiseAbs() - H.row(r).cwiseAbs()).norm() < 1e-12;
    }
    EXPECT_TRUE(found) << "row " << i;
  }
}

TEST(Encoder, RandomizedDctGramScale) {
  // Averaged AᵀA over draws approaches (m/n)·I.
  const Index n = 16, m = 8;
  Matrix sum = Matrix::Zero(n, n);
  const int draws = 3000;
  for (int t = 0; t < draws; ++t) {
    Matrix A = build_encoder({EncoderKind::RandomizedDCT, m, n, static_cast<std::uint64_t>(t)});
    sum += A.transpose() * A;
  }
  sum /= draws;
  EXPECT_LE((sum - gram_scale({EncoderKind::RandomizedDCT, m, n, 0}) * Matrix::Identity(n, n)).norm(), 0.1);
}

TEST(Encoder, IdentityAndValidation) {
  EXPECT_EQ(build_encoder({EncoderKind::Identity, 5, 5, 0}), Matrix::Identity(5, 5));
  EXPECT_THROW(build_encoder({EncoderKind::Identity, 4, 5, 0}), Error);
  EXPECT_THROW(build_encoder({EncoderKind::RandomizedDCT, 6, 5, 0}), Error);
  EXPECT_THROW(build_encoder({EncoderKind::Gaussian, 0, 5, 0}), Error);
  EXPECT_EQ(gram_scale({EncoderKind::Gaussian, 30, 5, 0}), 30.0);
  EXPECT_EQ(gram_scale({EncoderKind::Identity, 5, 5, 0}), 1.0);
}

TEST(Encoder, ParseNames) {
  EXPECT_EQ(parse_encoder_kind("gaussian"), EncoderKind::Gaussian);
  EXPECT_EQ(parse_encoder_kind("dct"), EncoderKind::RandomizedDCT);
  EXPECT_EQ(parse_encoder_kind("identity"), EncoderKind::Identity);
  EXPECT_FALSE(parse_encoder_kind("hadamard"));
  for (auto k : {EncoderKind::Gaussian, EncoderKind::RandomizedDCT, EncoderKind::Identity})
    EXPECT_EQ(parse_encoder_kind(to_string(k)), k);
}

TEST(Partition, BalancedContiguousCover) {
  auto blocks = partition_rows(10, 3);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0], (RowBlock{0, 4}));
  EXPECT_EQ(blocks[1], (RowBlock{4, 3}));
  EXPECT_EQ(blocks[2], (RowBlock{7, 3}));
  for (Index m = 1; m < 40; ++m) {
    for (Index L = 1; L <= m; ++L) {
      auto b = partition_rows(m, L);
      Index next = 0;
      for (const auto& block : b) {
        EXPECT_EQ(block.begin, next);
        EXPECT_GE(block.size, m / L);
        EXPECT_LE(block.size, m / L + 1);
        next = block.end();
      }
      EXPECT_EQ(next, m);
    }
  }
}

TEST(Partition, RejectsInvalid) {
  EXPECT_THROW(partition_rows(3, 4), Error);
  EXPECT_THROW(partition_rows(3, 0), Error);
}

TEST(Encode, ProductsAndIdentityCopy) {
  GroundTruth t = gen_sparse_signal(6, 2, 1);
  Dataset d = gen_dataset(t, 8, 0.1, 2);
  EncoderSpec spec{EncoderKind::Gaussian, 5, 8, 3};
  auto [AX, Ay] = encode(d, spec);
  Matrix A = build_encoder(spec);
  EXPECT_LE((AX - A * d.X).norm(), 1e-12);
  EXPECT_LE((Ay - A * d.y).norm(), 1e-12);

  auto [IX, Iy] = encode(d, {EncoderKind::Identity, 8, 8, 0});
  EXPECT_EQ(IX, d.X);
  EXPECT_EQ(Iy, d.y);

  EXPECT_THROW(encode(d, {EncoderKind::Gaussian, 5, 7, 3}), Error);

  EncodedDataset e = make_encoded(d, spec, 2);
  EXPECT_EQ(e.partitions.size(), 2u);
  EXPECT_EQ(e.AX, AX);
}
