#include "codedopt/encoding.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "codedopt/errors.hpp"
#include "codedopt/rng.hpp"

namespace codedopt {

std::string_view to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::Gaussian: return "gaussian";
    case EncoderKind::RandomizedDCT: return "dct";
    case EncoderKind::Identity: return "identity";
  }
  return "gaussian";
}

std::optional<EncoderKind> parse_encoder_kind(std::string_view text) {
  if (text == "gaussian") return EncoderKind::Gaussian;
  if (text == "dct") return EncoderKind::RandomizedDCT;
  if (text == "identity") return EncoderKind::Identity;
  return std::nullopt;
}

void EncoderSpec::validate() const {
  if (m < 1 || n < 1) throw Error(Errc::InvalidShape, "encoder needs m >= 1 and n >= 1");
  if (kind == EncoderKind::Identity && m != n) {
    throw Error(Errc::InvalidShape, "identity encoder requires m = n (m=" + std::to_string(m) +
                                        ", n=" + std::to_string(n) + ")");
  }
  if (kind == EncoderKind::RandomizedDCT && m > n) {
    throw Error(Errc::InvalidShape, "randomized DCT encoder requires m <= n (m=" + std::to_string(m) +
                                        ", n=" + std::to_string(n) + ")");
  }
}

Matrix dct_matrix(Index n) {
  Matrix H(n, n);
  const double nd = static_cast<double>(n);
  const double c0 = std::sqrt(1.0 / nd);
  const double ck = std::sqrt(2.0 / nd);
  for (Index k = 0; k < n; ++k) {
    double c = k == 0 ? c0 : ck;
    for (Index j = 0; j < n; ++j) {
      H(k, j) = c * std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * k) / (2.0 * nd));
    }
  }
  return H;
}

Matrix build_encoder(const EncoderSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  switch (spec.kind) {
    case EncoderKind::Identity: return Matrix::Identity(spec.n, spec.n);
    case EncoderKind::Gaussian: {
      Matrix A(spec.m, spec.n);
      for (Index i = 0; i < spec.m; ++i)
        for (Index j = 0; j < spec.n; ++j) A(i, j) = rng.normal();
      return A;
    }
    case EncoderKind::RandomizedDCT: {
      auto rows = rng.sample_without_replacement(static_cast<std::size_t>(spec.n),
                                                 static_cast<std::size_t>(spec.m));
      Vector signs(spec.n);
      for (Index j = 0; j < spec.n; ++j) signs(j) = rng.sign();
      Matrix H = dct_matrix(spec.n);
      Matrix A(spec.m, spec.n);
      for (Index i = 0; i < spec.m; ++i) {
        A.row(i) = H.row(static_cast<Index>(rows[static_cast<std::size_t>(i)])).cwiseProduct(signs.transpose());
      }
      return A;
    }
  }
  return {};
}

double gram_scale(const EncoderSpec& spec) {
  switch (spec.kind) {
    case EncoderKind::Gaussian: return static_cast<double>(spec.m);
    case EncoderKind::RandomizedDCT: return static_cast<double>(spec.m) / static_cast<double>(spec.n);
    case EncoderKind::Identity: return 1.0;
  }
  return 1.0;
}

std::vector<RowBlock> partition_rows(Index m, Index workers) {
  if (workers < 1 || workers > m) {
    throw Error(Errc::InvalidPartition, "worker count L=" + std::to_string(workers) +
                                            " must satisfy 1 <= L <= m=" + std::to_string(m));
  }
  std::vector<RowBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(workers));
  Index base = m / workers;
  Index extra = m % workers;
  Index begin = 0;
  for (Index l = 0; l < workers; ++l) {
    Index size = base + (l < extra ? 1 : 0);
    blocks.push_back({begin, size});
    begin += size;
  }
  return blocks;
}

std::pair<Matrix, Vector> encode(const Dataset& dataset, const EncoderSpec& spec) {
  if (spec.n != dataset.rows()) {
    throw Error(Errc::InvalidShape, "encoder has n=" + std::to_string(spec.n) + " columns but dataset has " +
                                        std::to_string(dataset.rows()) + " rows");
  }
  if (spec.kind == EncoderKind::Identity) {
    spec.validate();
    return {dataset.X, dataset.y};
  }
  Matrix A = build_encoder(spec);
  Matrix AX = A * dataset.X;
  Vector Ay = A * dataset.y;
  return {std::move(AX), std::move(Ay)};
}

EncodedDataset make_encoded(const Dataset& dataset, const EncoderSpec& spec, Index workers) {
  auto [AX, Ay] = encode(dataset, spec);
  EncodedDataset out{spec, std::move(AX), std::move(Ay), partition_rows(spec.m, workers)};
  return out;
}

}  // namespace codedopt
