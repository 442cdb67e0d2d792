#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codedopt/encoding.hpp"
#include "codedopt/linalg.hpp"
#include "codedopt/problem.hpp"
#include "codedopt/regularizers.hpp"

namespace codedopt {

enum class StragglerMode { None, RowLevel, WorkerLevel };

std::string_view to_string(StragglerMode mode);
std::optional<StragglerMode> parse_straggler_mode(std::string_view text);

/// RowLevel drops exactly s encoded rows per iteration. WorkerLevel drops
/// whole workers, visiting them in random order and keeping each one that
/// still fits under s rows, so the dropped set is a maximal subset.
struct StragglerModel {
  StragglerMode mode = StragglerMode::None;
  Index s = 0;
  std::uint64_t seed = 0;

  /// Throws InvalidStragglers when s < 0 or s > m.
  void validate(Index m) const;
};

enum class StepMode { Fixed, Calibrated, TheoremScaled };

std::string_view to_string(StepMode mode);
std::optional<StepMode> parse_step_mode(std::string_view text);

/// Encoded step size per iteration:
///   Fixed          μ = μ̃
///   Calibrated     μ = μ̃ / λ where E[AᵀA] = λI (see gram_scale)
///   TheoremScaled  μ = μ̃ / β²_{s_τ,m} with the realized s_τ
/// Uncoded runs always step with μ̃.
struct StepRule {
  StepMode mode = StepMode::Fixed;
  double mu_tilde = 1.0;

  void validate() const;
};

struct IterationRecord {
  Index iter = 0;
  double rel_error = 0.0;
  Index s_tau = 0;       ///< straggling rows in the step that produced this iterate
  double mu_used = 0.0;  ///< 0 for the initial record
};

struct Snapshot {
  Index iter = 0;
  Vector theta;
};

struct Trace {
  std::vector<IterationRecord> records;  ///< iterations 0..T
  std::vector<Snapshot> snapshots;
  std::optional<Index> converged_at;  ///< first iteration below the threshold
  std::string fingerprint;
  Vector final_theta;

  Index iterations() const { return static_cast<Index>(records.size()) - 1; }
  double final_error() const { return records.back().rel_error; }
};

struct RunOptions {
  Index iterations = 500;
  /// Keep θ every `stride` iterations; 0 keeps only the final iterate.
  Index stride = 0;
  double threshold = 1e-3;
};

/// Iteration at which the trace first drops below `threshold`, or T + 1 when
/// it never does.
Index iterations_to_threshold(const Trace& trace, double threshold);

/// Straggling rows S_τ for iteration `iter`, ascending. Depends only on
/// (model.seed, iter) and the partition.
std::vector<Index> sample_straggler_set(const StragglerModel& model, Index iter, Index m,
                                        const std::vector<RowBlock>& partitions);

/// Σ_ℓ M_ℓᵀ(M_ℓθ − b_ℓ) over worker blocks in ascending order, with rows in
/// `stragglers` (ascending) contributing nothing.
Vector aggregate_gradient(const Matrix& M, const Vector& b, const std::vector<RowBlock>& partitions,
                          const std::vector<Index>& stragglers, const Vector& theta);

/// θ_{τ+1} = P(θ_τ − μ̃ Σ_ℓ X_ℓᵀ(X_ℓθ_τ − y_ℓ)) from θ₀ = 0 on `workers`
/// row blocks.
Trace run_uncoded_pgd(const Dataset& dataset, const GroundTruth& truth, const RegularizerSpec& spec,
                      const StepRule& rule, Index workers, const RunOptions& options = {});

/// θ_{τ+1} = P(θ_τ − μ_τ (AX)_{S_τᶜ}ᵀ((AX)_{S_τᶜ}θ_τ − (Ay)_{S_τᶜ})).
/// Throws DegenerateIteration when every row straggles and Divergence when
/// the relative error leaves [0, 1e12].
Trace run_encoded_pgd(const EncodedDataset& encoded, const GroundTruth& truth, const RegularizerSpec& spec,
                      const StepRule& rule, const StragglerModel& model, const RunOptions& options = {});

}  // namespace codedopt
