#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "codedopt/linalg.hpp"
#include "codedopt/problem.hpp"

namespace codedopt {

enum class EncoderKind { Gaussian, RandomizedDCT, Identity };

std::string_view to_string(EncoderKind kind);
std::optional<EncoderKind> parse_encoder_kind(std::string_view text);

/// Shape and randomness of the encoding matrix A (m×n). m is the
/// computational load.
struct EncoderSpec {
  EncoderKind kind = EncoderKind::Gaussian;
  Index m = 1;
  Index n = 1;
  std::uint64_t seed = 0;

  /// Throws InvalidShape unless m ≥ 1, Identity has m = n and DCT has m ≤ n.
  void validate() const;
};

/// Orthonormal DCT-II: H(k, j) = c_k cos(π(2j+1)k / 2n).
Matrix dct_matrix(Index n);

/// Gaussian: i.i.d. N(0,1). RandomizedDCT: m DCT-II rows chosen without
/// replacement (in draw order) times a random ±1 diagonal. Identity: I_n.
Matrix build_encoder(const EncoderSpec& spec);

/// λ with E[AᵀA] = λI: m (Gaussian), m/n (randomized DCT), 1 (identity).
double gram_scale(const EncoderSpec& spec);

/// Contiguous worker block [begin, begin + size).
struct RowBlock {
  Index begin = 0;
  Index size = 0;

  Index end() const { return begin + size; }
  friend bool operator==(const RowBlock&, const RowBlock&) = default;
};

/// L contiguous balanced blocks covering [0, m); the first m mod L blocks
/// carry one extra row.
std::vector<RowBlock> partition_rows(Index m, Index workers);

struct EncodedDataset {
  EncoderSpec encoder;
  Matrix AX;  ///< m×d
  Vector Ay;
  std::vector<RowBlock> partitions;
};

/// (A·X, A·y).
std::pair<Matrix, Vector> encode(const Dataset& dataset, const EncoderSpec& spec);

EncodedDataset make_encoded(const Dataset& dataset, const EncoderSpec& spec, Index workers);

}  // namespace codedopt
